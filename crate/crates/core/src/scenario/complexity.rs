use serde::{Deserialize, Serialize};

use super::region::{
    rank_of, solve_boxes, BoxRegion, BoxSolution, Boxes, Membership, BOUNDARY_TOL,
};
use super::ScenarioError;
use crate::checker::{IntervalSolution, SolutionVector};

/// Boundary samples `B`, inner rectangle `I` and surely noncritical samples `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryAnalysis {
    pub boundary: Vec<usize>,
    /// Open rectangle disjoint from every box in `B`; `None` if empty.
    pub inner: Option<BoxRegion>,
    pub surely_noncritical: Vec<usize>,
}

/// Greedy critical set: starts from the relaxed and boundary samples and
/// drops boundary samples in ascending index while the region is unchanged.
pub(crate) fn greedy_critical_set(
    b: &Boxes<'_>,
    rho: f64,
    sol: &BoxSolution,
) -> Result<Vec<usize>, ScenarioError> {
    let n = b.len();
    let relaxed: Vec<bool> = (0..n)
        .map(|i| sol.relaxed.binary_search(&i).is_ok())
        .collect();
    let same = |w: &[usize]| -> Result<bool, ScenarioError> {
        if w.is_empty() {
            return Ok(false);
        }
        Ok(solve_boxes(&b.subset(w), rho)?.region == sol.region)
    };
    let everything: Vec<usize> = (0..n).collect();
    let mut w = everything.clone();
    if !sol.any_collapsed() {
        let start: Vec<usize> = (0..n)
            .filter(|&i| relaxed[i] || on_boundary(b, i, &sol.region))
            .collect();
        if same(&start)? {
            w = start;
        }
    }
    let candidates: Vec<usize> = w.iter().copied().filter(|&i| !relaxed[i]).collect();
    for c in candidates {
        let trial: Vec<usize> = w.iter().copied().filter(|&i| i != c).collect();
        if same(&trial)? {
            w = trial;
        }
    }
    Ok(w)
}

fn on_boundary(b: &Boxes<'_>, i: usize, region: &BoxRegion) -> bool {
    region.membership(b.lower[i], BOUNDARY_TOL) == Membership::Boundary
        || region.membership(b.upper[i], BOUNDARY_TOL) == Membership::Boundary
}

/// Upper bound on the complexity of precise solutions.
pub fn complexity_precise(
    sols: &[SolutionVector],
    rho: f64,
    sol: &BoxSolution,
) -> Result<usize, ScenarioError> {
    Ok(greedy_critical_set(&Boxes::precise(sols)?, rho, sol)?.len())
}

/// Whether box `i` meets the boundary of `region`.
fn touches_boundary(b: &Boxes<'_>, i: usize, region: &BoxRegion) -> bool {
    let (l, u) = (b.lower[i], b.upper[i]);
    let meets = (0..b.m)
        .all(|r| l[r] <= region.upper[r] + BOUNDARY_TOL && u[r] >= region.lower[r] - BOUNDARY_TOL);
    let interior = (0..b.m)
        .all(|r| l[r] > region.lower[r] + BOUNDARY_TOL && u[r] < region.upper[r] - BOUNDARY_TOL);
    meets && !interior
}

fn overlap(b: &Boxes<'_>, i: usize, region: &BoxRegion) -> f64 {
    (0..b.m)
        .map(|r| (b.upper[i][r].min(region.upper[r]) - b.lower[i][r].max(region.lower[r])).max(0.0))
        .product()
}

/// Shrinks the open rectangle `inner` until it misses box `i`, along the
/// single face whose move keeps the largest fraction of the width. Returns
/// false if no move leaves a nonempty rectangle.
fn shrink_away(b: &Boxes<'_>, i: usize, inner: &mut BoxRegion) -> bool {
    let (l, u) = (b.lower[i], b.upper[i]);
    let disjoint = (0..b.m).any(|r| u[r] <= inner.lower[r] || l[r] >= inner.upper[r]);
    if disjoint {
        return true;
    }
    let mut best: Option<(f64, usize, bool)> = None;
    for r in 0..b.m {
        let width = inner.upper[r] - inner.lower[r];
        for (raise, kept) in [
            (true, inner.upper[r] - u[r]),
            (false, l[r] - inner.lower[r]),
        ] {
            if kept > 0.0 {
                let frac = kept / width;
                if best.map_or(true, |(f, _, _)| frac > f) {
                    best = Some((frac, r, raise));
                }
            }
        }
    }
    match best {
        Some((_, r, true)) => {
            inner.lower[r] = u[r];
            true
        }
        Some((_, r, false)) => {
            inner.upper[r] = l[r];
            true
        }
        None => false,
    }
}

pub(crate) fn boundary_analysis(
    b: &Boxes<'_>,
    rho: f64,
    sol: &BoxSolution,
) -> Result<BoundaryAnalysis, ScenarioError> {
    let n = b.len();
    let k = rank_of(rho)?;
    let region = &sol.region;
    let boundary: Vec<usize> = (0..n).filter(|&i| touches_boundary(b, i, region)).collect();
    let mut inner = Some(region.clone());
    if sol.any_collapsed() || k > n {
        inner = None;
    }
    if let Some(rect) = inner.as_mut() {
        let mut order = boundary.clone();
        let vol: Vec<f64> = (0..n).map(|i| overlap(b, i, region)).collect();
        order.sort_by(|&x, &y| vol[y].total_cmp(&vol[x]).then(x.cmp(&y)));
        let mut alive = true;
        for i in order {
            if !shrink_away(b, i, rect) {
                alive = false;
                break;
            }
        }
        // Intersect with the rank box spanned by the k-th smallest upper and
        // k-th largest lower bounds.
        for r in 0..b.m {
            let mut us: Vec<f64> = b.upper.iter().map(|x| x[r]).collect();
            let mut ls: Vec<f64> = b.lower.iter().map(|x| x[r]).collect();
            us.sort_by(f64::total_cmp);
            ls.sort_by(|a, b| b.total_cmp(a));
            rect.lower[r] = rect.lower[r].max(us[k - 1]);
            rect.upper[r] = rect.upper[r].min(ls[k - 1]);
        }
        if !alive || (0..b.m).any(|r| rect.lower[r] >= rect.upper[r]) {
            inner = None;
        }
    }
    let surely_noncritical = match &inner {
        None => Vec::new(),
        Some(rect) => (0..n)
            .filter(|i| boundary.binary_search(i).is_err() && sol.relaxed.binary_search(i).is_err())
            .filter(|&i| {
                (0..b.m).all(|r| {
                    b.lower[i][r] > rect.lower[r] + BOUNDARY_TOL
                        && b.upper[i][r] < rect.upper[r] - BOUNDARY_TOL
                })
            })
            .collect(),
    };
    Ok(BoundaryAnalysis {
        boundary,
        inner,
        surely_noncritical,
    })
}

/// Upper bound `n - |X|` on the complexity of the unknown precise problem.
pub fn complexity_imprecise(
    sols: &[IntervalSolution],
    rho: f64,
    sol: &BoxSolution,
) -> Result<(usize, BoundaryAnalysis), ScenarioError> {
    let b = Boxes::intervals(sols)?;
    let analysis = boundary_analysis(&b, rho, sol)?;
    Ok((b.len() - analysis.surely_noncritical.len(), analysis))
}
