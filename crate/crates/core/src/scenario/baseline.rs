use super::complexity::greedy_critical_set;
use super::eta::compute_eta;
use super::region::{solve_boxes, BoxRegion, Boxes};
use super::ScenarioError;
use crate::checker::SolutionVector;

/// Per-measure bounds combined by the union bound.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentBaseline {
    /// Confidence level used for each measure, `1 - (1 - beta)/m`.
    pub beta_tilde: f64,
    pub complexities: Vec<usize>,
    pub etas: Vec<f64>,
    /// `max(0, 1 - sum_r (1 - eta_r))`.
    pub combined: f64,
}

/// Treats every measure as its own one-dimensional problem.
pub fn baseline_independent(
    sols: &[SolutionVector],
    rho: f64,
    beta: f64,
) -> Result<IndependentBaseline, ScenarioError> {
    let all = Boxes::precise(sols)?;
    let n = all.len();
    let beta_tilde = 1.0 - (1.0 - beta) / all.m as f64;
    let mut complexities = Vec::with_capacity(all.m);
    let mut etas = Vec::with_capacity(all.m);
    for r in 0..all.m {
        let column: Vec<[f64; 1]> = sols.iter().map(|s| [s.values[r]]).collect();
        let rows: Vec<&[f64]> = column.iter().map(|v| v.as_slice()).collect();
        let b = Boxes::new(rows.clone(), rows)?;
        let sol = solve_boxes(&b, rho)?;
        let d = greedy_critical_set(&b, rho, &sol)?.len();
        complexities.push(d);
        etas.push(compute_eta(n, d, beta_tilde)?);
    }
    let combined = (1.0 - etas.iter().map(|e| 1.0 - e).sum::<f64>()).max(0.0);
    Ok(IndependentBaseline {
        beta_tilde,
        complexities,
        etas,
        combined,
    })
}

/// Fraction of `fresh` solution vectors inside `region`.
pub fn baseline_frequentist(
    fresh: &[SolutionVector],
    region: &BoxRegion,
) -> Result<f64, ScenarioError> {
    if fresh.is_empty() {
        return Err(ScenarioError::Empty);
    }
    let inside = fresh.iter().filter(|s| region.contains(&s.values)).count();
    Ok(inside as f64 / fresh.len() as f64)
}
