use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::checker::{IntervalSolution, SolutionVector};

/// Absolute tolerance for comparing solution values against region faces.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl BoxRegion {
    /// The whole space.
    pub fn unbounded(m: usize) -> Self {
        BoxRegion {
            lower: vec![f64::NEG_INFINITY; m],
            upper: vec![f64::INFINITY; m],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(l, u)| l > u)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| l <= v && v <= u)
    }

    /// Position of a point: outside if it violates a bound, on the boundary
    /// if it lies within `tol` of a face.
    pub fn membership(&self, x: &[f64], tol: f64) -> Membership {
        if !self.contains(x) {
            return Membership::Outside;
        }
        let near = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .any(|(v, (l, u))| v - l <= tol || u - v <= tol);
        if near {
            Membership::Boundary
        } else {
            Membership::Inside
        }
    }

    /// Whether `self` is contained in `other` up to `tol`.
    pub fn within(&self, other: &BoxRegion, tol: f64) -> bool {
        (0..self.dim())
            .all(|r| self.lower[r] >= other.lower[r] - tol && self.upper[r] <= other.upper[r] + tol)
    }

    pub fn volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l).max(0.0))
            .product()
    }

    pub fn width_sum(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).sum()
    }
}

/// Optimal region of the relaxed problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSolution {
    pub region: BoxRegion,
    /// Samples with a positive slack, ascending.
    pub relaxed: Vec<usize>,
    /// Dimensions where the upper rank bound fell below the lower one and
    /// the region degenerated to a point.
    pub collapsed: Vec<bool>,
}

impl BoxSolution {
    pub fn any_collapsed(&self) -> bool {
        self.collapsed.iter().any(|&c| c)
    }
}

/// Per-sample boxes `[lower_i, upper_i]`.
#[derive(Debug, Clone)]
pub(crate) struct Boxes<'a> {
    pub lower: Vec<&'a [f64]>,
    pub upper: Vec<&'a [f64]>,
    pub m: usize,
}

impl<'a> Boxes<'a> {
    pub fn new(lower: Vec<&'a [f64]>, upper: Vec<&'a [f64]>) -> Result<Self, ScenarioError> {
        let m = lower.first().ok_or(ScenarioError::Empty)?.len();
        for i in 0..lower.len() {
            for got in [lower[i].len(), upper[i].len()] {
                if got != m {
                    return Err(ScenarioError::Dimension {
                        index: i,
                        expected: m,
                        got,
                    });
                }
            }
            let ok = lower[i]
                .iter()
                .zip(upper[i])
                .all(|(l, u)| l.is_finite() && u.is_finite() && l <= u);
            if !ok {
                return Err(ScenarioError::Interval(i));
            }
        }
        Ok(Boxes { lower, upper, m })
    }

    pub fn precise(sols: &'a [SolutionVector]) -> Result<Self, ScenarioError> {
        let v: Vec<&[f64]> = sols.iter().map(|s| s.values.as_slice()).collect();
        Boxes::new(v.clone(), v)
    }

    pub fn intervals(sols: &'a [IntervalSolution]) -> Result<Self, ScenarioError> {
        Boxes::new(
            sols.iter().map(|s| s.lower.as_slice()).collect(),
            sols.iter().map(|s| s.upper.as_slice()).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn subset(&self, keep: &[usize]) -> Boxes<'a> {
        Boxes {
            lower: keep.iter().map(|&i| self.lower[i]).collect(),
            upper: keep.iter().map(|&i| self.upper[i]).collect(),
            m: self.m,
        }
    }

    pub fn is_precise(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| l == u)
    }
}

/// Rank of the bounds `k = floor(1/rho) + 1`, rejecting critical values.
pub(crate) fn rank_of(rho: f64) -> Result<usize, ScenarioError> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(ScenarioError::Rho(rho));
    }
    let inv = 1.0 / rho;
    if (inv - inv.round()).abs() <= 1e-9 * inv.max(1.0) {
        return Err(ScenarioError::CriticalRho(rho));
    }
    Ok(if inv >= usize::MAX as f64 / 2.0 {
        usize::MAX / 2
    } else {
        inv.floor() as usize + 1
    })
}

fn kth(mut v: Vec<f64>, k: usize, order: impl Fn(&f64, &f64) -> Ordering) -> f64 {
    v.sort_by(order);
    v[k - 1]
}

/// One dimension: `(lower, upper, collapsed)`.
fn solve_dim(l: &[f64], u: &[f64], k: usize) -> (f64, f64, bool) {
    let n = l.len();
    if k <= n {
        let hi = kth(u.to_vec(), k, |a, b| b.total_cmp(a));
        let lo = kth(l.to_vec(), k, |a, b| a.total_cmp(b));
        if lo <= hi {
            return (lo, hi, false);
        }
    }
    // Both bounds meet at a minimiser of sum (u_i - x)^+ + (x - l_i)^+; the
    // minimisers form an interval and the one of least norm is taken.
    let mut ls = l.to_vec();
    let mut us = u.to_vec();
    ls.sort_by(f64::total_cmp);
    us.sort_by(f64::total_cmp);
    let mut points: Vec<f64> = ls.iter().chain(&us).copied().collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let le = |v: &[f64], p: f64| v.partition_point(|&x| x <= p) as i64;
    let lt = |v: &[f64], p: f64| v.partition_point(|&x| x < p) as i64;
    let right_slope = |p: f64| le(&ls, p) - (n as i64 - le(&us, p));
    let left_slope = |p: f64| lt(&ls, p) - (n as i64 - lt(&us, p));
    let a = *points
        .iter()
        .find(|&&p| right_slope(p) >= 0)
        .expect("slope turns positive");
    let b = *points
        .iter()
        .rev()
        .find(|&&p| left_slope(p) <= 0)
        .expect("slope starts negative");
    let x = 0.0f64.clamp(a, b);
    (x, x, true)
}

pub(crate) fn solve_boxes(b: &Boxes<'_>, rho: f64) -> Result<BoxSolution, ScenarioError> {
    let k = rank_of(rho)?;
    let mut region = BoxRegion {
        lower: vec![0.0; b.m],
        upper: vec![0.0; b.m],
    };
    let mut collapsed = vec![false; b.m];
    for r in 0..b.m {
        let l: Vec<f64> = b.lower.iter().map(|x| x[r]).collect();
        let u: Vec<f64> = b.upper.iter().map(|x| x[r]).collect();
        let (lo, hi, c) = solve_dim(&l, &u, k);
        region.lower[r] = lo;
        region.upper[r] = hi;
        collapsed[r] = c;
    }
    let relaxed = (0..b.len())
        .filter(|&i| {
            (0..b.m).any(|r| b.upper[i][r] > region.upper[r] || b.lower[i][r] < region.lower[r])
        })
        .collect();
    Ok(BoxSolution {
        region,
        relaxed,
        collapsed,
    })
}

/// Region for precise solution vectors, per dimension by the rank rule.
pub fn solve_box_precise(sols: &[SolutionVector], rho: f64) -> Result<BoxSolution, ScenarioError> {
    solve_boxes(&Boxes::precise(sols)?, rho)
}

/// Conservative region for interval solutions: upper bounds rank the upper
/// face, lower bounds the lower face.
pub fn solve_box_imprecise(
    sols: &[IntervalSolution],
    rho: f64,
) -> Result<BoxSolution, ScenarioError> {
    solve_boxes(&Boxes::intervals(sols)?, rho)
}

/// Region for raw per-sample bounds.
pub fn solve_box(
    lower: &[Vec<f64>],
    upper: &[Vec<f64>],
    rho: f64,
) -> Result<BoxSolution, ScenarioError> {
    let b = Boxes::new(
        lower.iter().map(|v| v.as_slice()).collect(),
        upper.iter().map(|v| v.as_slice()).collect(),
    )?;
    solve_boxes(&b, rho)
}

/// `num_ge[r][i]`: samples whose upper bound in dimension `r` is at least
/// that of sample `i`; `num_le[r][i]` likewise for lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RankStats {
    pub num_ge: Vec<Vec<usize>>,
    pub num_le: Vec<Vec<usize>>,
}

pub fn rank_stats(sols: &[IntervalSolution]) -> Result<RankStats, ScenarioError> {
    let b = Boxes::intervals(sols)?;
    let count = |vals: &[&[f64]], r: usize, keep: &dyn Fn(f64, f64) -> bool| -> Vec<usize> {
        vals.iter()
            .map(|x| vals.iter().filter(|y| keep(y[r], x[r])).count())
            .collect()
    };
    Ok(RankStats {
        num_ge: (0..b.m)
            .map(|r| count(&b.upper, r, &|y, x| y >= x))
            .collect(),
        num_le: (0..b.m)
            .map(|r| count(&b.lower, r, &|y, x| y <= x))
            .collect(),
    })
}
