use super::CheckError;
use crate::model::ConcreteCtmc;
use crate::scalar::Real;

/// Smallest accepted truncation tolerance.
pub const MIN_EPSILON: f64 = 1e-12;

/// Poisson(q) probabilities for `left..left + weights.len()`; the mass left
/// out on each side is at most `eps / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWindow {
    pub left: usize,
    pub weights: Vec<f64>,
}

impl PoissonWindow {
    pub fn right(&self) -> usize {
        self.left + self.weights.len() - 1
    }
}

/// Truncated Poisson weights, computed from the mode outwards. Neighbours of
/// the mode follow from the ratio recurrence and each tail is bounded by a
/// geometric series. The weights are then scaled to sum to one minus the
/// tail bounds, which avoids the rounding error of `lgamma` at large `q`.
pub fn poisson_window(q: f64, eps: f64) -> PoissonWindow {
    if q <= 0.0 {
        return PoissonWindow {
            left: 0,
            weights: vec![1.0],
        };
    }
    let mode = q.floor() as usize;
    let log_mode = -q + mode as f64 * q.ln() - libm::lgamma(mode as f64 + 1.0);
    let w_mode = log_mode.exp();
    let mut tails = 0.0;

    let mut right = vec![w_mode];
    let mut k = mode;
    loop {
        let next = right[right.len() - 1] * q / (k + 1) as f64;
        let ratio = q / (k + 2) as f64;
        if ratio < 1.0 && next / (1.0 - ratio) <= eps / 2.0 {
            tails += next / (1.0 - ratio);
            break;
        }
        right.push(next);
        k += 1;
    }

    let mut left_weights = Vec::new();
    let mut k = mode;
    let mut w = w_mode;
    while k > 0 {
        let prev = w * k as f64 / q;
        let ratio = (k - 1) as f64 / q;
        if prev / (1.0 - ratio) <= eps / 2.0 {
            tails += prev / (1.0 - ratio);
            break;
        }
        left_weights.push(prev);
        w = prev;
        k -= 1;
    }
    left_weights.reverse();
    left_weights.extend(right);
    let total: f64 = left_weights.iter().sum();
    let scale = (1.0 - tails) / total;
    left_weights.iter_mut().for_each(|w| *w *= scale);
    PoissonWindow {
        left: k,
        weights: left_weights,
    }
}

/// Uniformised DTMC of a chain in which some states are made absorbing.
pub(crate) struct Uniformized<'a, T> {
    chain: &'a ConcreteCtmc<T>,
    absorbing: Vec<bool>,
    /// Rate leaving each state towards other states.
    out: Vec<T>,
    lambda: T,
}

impl<'a, T: Real> Uniformized<'a, T> {
    pub fn new(chain: &'a ConcreteCtmc<T>, absorbing: Option<&[bool]>) -> Self {
        let n = chain.num_states();
        let absorbing = absorbing
            .map(|a| a.to_vec())
            .unwrap_or_else(|| vec![false; n]);
        let mut out = vec![T::zero(); n];
        let mut lambda = T::zero();
        for s in 0..n {
            if absorbing[s] {
                continue;
            }
            let mut o = T::zero();
            for (t, r) in chain.row(s) {
                if t != s {
                    o = o + r;
                }
            }
            out[s] = o;
            if o > lambda {
                lambda = o;
            }
        }
        Uniformized {
            chain,
            absorbing,
            out,
            lambda,
        }
    }

    fn step(&self, pi: &[T], next: &mut [T]) {
        for x in next.iter_mut() {
            *x = T::zero();
        }
        for (s, &p) in pi.iter().enumerate() {
            if p == T::zero() {
                continue;
            }
            if self.absorbing[s] {
                next[s] = next[s] + p;
                continue;
            }
            let scale = p / self.lambda;
            for (t, r) in self.chain.row(s) {
                if t != s {
                    next[t] = next[t] + scale * r;
                }
            }
            next[s] = next[s] + p - scale * self.out[s];
        }
    }

    /// Distribution after time `t`; the result underestimates the exact one
    /// componentwise, with at most `eps` missing mass in total.
    pub fn advance(&self, pi: &[T], t: f64, eps: f64) -> Vec<T> {
        let q = self.lambda.to_f64_lossy() * t;
        if t == 0.0 || q == 0.0 {
            return pi.to_vec();
        }
        let window = poisson_window(q, eps);
        let mut acc = vec![T::zero(); pi.len()];
        let mut cur = pi.to_vec();
        let mut next = vec![T::zero(); pi.len()];
        for k in 0..=window.right() {
            if k >= window.left {
                let w = T::lit(window.weights[k - window.left]);
                for (a, &c) in acc.iter_mut().zip(&cur) {
                    *a = *a + w * c;
                }
            }
            if k < window.right() {
                self.step(&cur, &mut next);
                std::mem::swap(&mut cur, &mut next);
            }
        }
        acc
    }
}

pub(crate) fn check_epsilon(eps: f64) -> Result<(), CheckError> {
    if !(eps >= MIN_EPSILON) || !eps.is_finite() {
        return Err(CheckError::Tolerance(eps));
    }
    Ok(())
}

pub(crate) fn check_time(t: f64) -> Result<(), CheckError> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(CheckError::Time(t));
    }
    Ok(())
}

pub(crate) fn initial_vector<T: Real>(c: &ConcreteCtmc<T>) -> Vec<T> {
    let mut pi = vec![T::zero(); c.num_states()];
    for &(s, p) in &c.initial {
        pi[s] = pi[s] + p;
    }
    pi
}

/// Transient distribution at time `t` by uniformization.
pub fn transient_distribution<T: Real>(
    c: &ConcreteCtmc<T>,
    t: f64,
    eps: f64,
) -> Result<Vec<T>, CheckError> {
    check_epsilon(eps)?;
    check_time(t)?;
    Ok(Uniformized::new(c, None).advance(&initial_vector(c), t, eps))
}

fn label<'a, T: Copy>(c: &'a ConcreteCtmc<T>, name: &str) -> Result<&'a [bool], CheckError> {
    c.label(name)
        .ok_or_else(|| CheckError::UnknownLabel(name.to_string()))
}

/// Probability of reaching `target` within `tau`.
pub fn reach_probability<T: Real>(
    c: &ConcreteCtmc<T>,
    target: &str,
    tau: f64,
    eps: f64,
) -> Result<T, CheckError> {
    check_epsilon(eps)?;
    check_time(tau)?;
    let target = label(c, target)?;
    let pi = Uniformized::new(c, Some(target)).advance(&initial_vector(c), tau, eps);
    Ok(mass(&pi, target))
}

/// Probability of `left U[t1,t2] target`; `left` defaults to the complement
/// of `target`.
pub fn interval_reach<T: Real>(
    c: &ConcreteCtmc<T>,
    target: &str,
    left: Option<&str>,
    t1: f64,
    t2: f64,
    eps: f64,
) -> Result<T, CheckError> {
    check_epsilon(eps)?;
    check_time(t1)?;
    check_time(t2)?;
    if t1 > t2 {
        return Err(CheckError::Window(t1, t2));
    }
    let target = label(c, target)?;
    let left: Vec<bool> = match left {
        Some(l) => label(c, l)?.to_vec(),
        None => target.iter().map(|x| !x).collect(),
    };
    let survivors = phase_one(c, target, &left, t1, eps / 2.0, None).0;
    let absorbing: Vec<bool> = target.iter().zip(&left).map(|(&t, &l)| t || !l).collect();
    let pi = Uniformized::new(c, Some(&absorbing)).advance(&survivors, t2 - t1, eps / 2.0);
    Ok(mass(&pi, target))
}

/// Runs the chain to `t1` with non-`left` states absorbing and keeps the mass
/// of paths that are still allowed to succeed. Also returns the mass of the
/// failed paths (excluding `sink`).
pub(crate) fn phase_one<T: Real>(
    c: &ConcreteCtmc<T>,
    target: &[bool],
    left: &[bool],
    t1: f64,
    eps: f64,
    sink: Option<usize>,
) -> (Vec<T>, T) {
    let start = initial_vector(c);
    let keep = |s: usize| Some(s) == sink || left[s] || (t1 == 0.0 && target[s]);
    let pi = if t1 == 0.0 {
        start
    } else {
        let absorbing: Vec<bool> = left.iter().map(|l| !l).collect();
        Uniformized::new(c, Some(&absorbing)).advance(&start, t1, eps)
    };
    let mut failed = T::zero();
    let survivors = pi
        .iter()
        .enumerate()
        .map(|(s, &p)| {
            if keep(s) {
                p
            } else {
                failed = failed + p;
                T::zero()
            }
        })
        .collect();
    (survivors, failed)
}

/// Expected instantaneous reward at time `t`.
pub fn instant_reward<T: Real>(
    c: &ConcreteCtmc<T>,
    reward: &str,
    t: f64,
    eps: f64,
) -> Result<T, CheckError> {
    let r = c
        .reward(reward)
        .ok_or_else(|| CheckError::UnknownReward(reward.to_string()))?;
    let pi = transient_distribution(c, t, eps)?;
    Ok(pi
        .iter()
        .zip(r)
        .fold(T::zero(), |acc, (&p, &x)| acc + p * x))
}

pub(crate) fn mass<T: Real>(pi: &[T], set: &[bool]) -> T {
    pi.iter()
        .zip(set)
        .filter(|(_, &b)| b)
        .fold(T::zero(), |acc, (&p, _)| acc + p)
}
