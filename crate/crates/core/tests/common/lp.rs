//! Dense two-phase simplex with Bland's rule, for small oracle problems.

const TOL: f64 = 1e-10;

/// Minimises `c.x` subject to `a x <= b`, `x >= 0`. Returns `None` when
/// infeasible or unbounded.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let rows = a.len();
    let nv = c.len();
    // Columns: variables, slacks, artificials, rhs.
    let art: Vec<usize> = (0..rows).filter(|&i| b[i] < 0.0).collect();
    let width = nv + rows + art.len() + 1;
    let rhs = width - 1;
    let mut t = vec![vec![0.0; width]; rows];
    let mut basis = vec![0; rows];
    for i in 0..rows {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..nv {
            t[i][j] = sign * a[i][j];
        }
        t[i][nv + i] = sign;
        t[i][rhs] = sign * b[i];
        basis[i] = nv + i;
    }
    for (k, &i) in art.iter().enumerate() {
        t[i][nv + rows + k] = 1.0;
        basis[i] = nv + rows + k;
    }
    // Phase one.
    if !art.is_empty() {
        let mut obj = vec![0.0; width];
        for k in 0..art.len() {
            obj[nv + rows + k] = 1.0;
        }
        reduce(&mut obj, &t, &basis);
        run(&mut t, &mut basis, &mut obj, width - 1)?;
        if -obj[rhs] > 1e-8 {
            return None;
        }
        // Drive remaining artificials out of the basis.
        for i in 0..rows {
            if basis[i] >= nv + rows {
                if let Some(j) = (0..nv + rows).find(|&j| t[i][j].abs() > 1e-9) {
                    pivot(&mut t, &mut basis, i, j);
                }
            }
        }
    }
    let mut obj = vec![0.0; width];
    obj[..nv].copy_from_slice(c);
    reduce(&mut obj, &t, &basis);
    run(&mut t, &mut basis, &mut obj, nv + rows)?;
    let mut x = vec![0.0; nv];
    for i in 0..rows {
        if basis[i] < nv {
            x[basis[i]] = t[i][rhs];
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Some((x, value))
}

fn reduce(obj: &mut [f64], t: &[Vec<f64>], basis: &[usize]) {
    for (i, &j) in basis.iter().enumerate() {
        let f = obj[j];
        if f != 0.0 {
            for k in 0..obj.len() {
                obj[k] -= f * t[i][k];
            }
        }
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, c: usize) {
    let p = t[r][c];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let row = t[r].clone();
    for (i, line) in t.iter_mut().enumerate() {
        if i != r && line[c] != 0.0 {
            let f = line[c];
            for k in 0..line.len() {
                line[k] -= f * row[k];
            }
        }
    }
    basis[r] = c;
}

/// Simplex iterations over columns `0..cols`.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], obj: &mut Vec<f64>, cols: usize) -> Option<()> {
    let rhs = obj.len() - 1;
    loop {
        let Some(enter) = (0..cols).find(|&j| obj[j] < -TOL) else {
            return Some(());
        };
        let mut leave: Option<(f64, usize, usize)> = None;
        for i in 0..t.len() {
            if t[i][enter] > TOL {
                let ratio = t[i][rhs] / t[i][enter];
                let better = match leave {
                    None => true,
                    Some((r, _, b)) => ratio < r - 1e-12 || (ratio <= r + 1e-12 && basis[i] < b),
                };
                if better {
                    leave = Some((ratio, i, basis[i]));
                }
            }
        }
        let (_, r, _) = leave?;
        pivot(t, basis, r, enter);
        let row = t[r].clone();
        let f = obj[enter];
        for k in 0..obj.len() {
            obj[k] -= f * row[k];
        }
    }
}
