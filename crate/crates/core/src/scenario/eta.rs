use super::ScenarioError;

/// Risk polynomial whose smallest root in (0, 1) gives the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RiskPolynomial {
    /// `C(n,c) t^(n-c) - (1-beta)/n * sum_{i=c}^{n-1} C(i,c) t^(i-c)`.
    #[default]
    OneSided,
    /// `C(n,c) t^(n-c) - (1-beta)/(2n) * sum_{i=c}^{n-1} C(i,c) t^(i-c)
    ///  - (1-beta)/(6n) * sum_{i=n+1}^{4n} C(i,c) t^(i-c)`.
    TwoSided,
}

fn ln_binom(n: usize, k: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + v.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// Sign of the risk polynomial at `t`, evaluated in log space.
fn positive_at(poly: RiskPolynomial, n: usize, c: usize, beta: f64, t: f64) -> bool {
    let lt = t.ln();
    let lead = ln_binom(n, c) + (n - c) as f64 * lt;
    let sum = |from: usize, to: usize| {
        log_sum_exp((from..=to).map(|i| ln_binom(i, c) + (i - c) as f64 * lt))
    };
    let risk = (1.0 - beta).ln() - (n as f64).ln();
    let neg = match poly {
        RiskPolynomial::OneSided => risk + sum(c, n - 1),
        RiskPolynomial::TwoSided => log_sum_exp(
            [
                risk - 2f64.ln() + sum(c, n - 1),
                risk - 6f64.ln() + sum(n + 1, 4 * n),
            ]
            .into_iter(),
        ),
    };
    lead > neg
}

/// Lower bound on the containment probability for `n` samples and
/// complexity `c` at confidence `beta`.
pub fn compute_eta(n: usize, c: usize, beta: f64) -> Result<f64, ScenarioError> {
    compute_eta_with(RiskPolynomial::OneSided, n, c, beta)
}

pub fn compute_eta_with(
    poly: RiskPolynomial,
    n: usize,
    c: usize,
    beta: f64,
) -> Result<f64, ScenarioError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(ScenarioError::Beta(beta));
    }
    if n == 0 {
        return Err(ScenarioError::Empty);
    }
    if c > n {
        return Err(ScenarioError::Complexity { c, n });
    }
    if c == n {
        return Ok(0.0);
    }
    // Scan upwards for the first sign change, then bisect.
    let mut lo = 0.0;
    let mut hi = None;
    let mut t = 1e-6;
    while t < 1.0 {
        if positive_at(poly, n, c, beta, t) {
            hi = Some(t);
            break;
        }
        lo = t;
        t *= 1.1;
    }
    let mut hi = match hi {
        Some(h) => h,
        None if positive_at(poly, n, c, beta, 1.0) => 1.0,
        None => return Err(ScenarioError::NoRoot { n, c }),
    };
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if positive_at(poly, n, c, beta, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
