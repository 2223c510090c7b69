//! Prediction regions, complexity bounds and containment guarantees.

mod baseline;
mod complexity;
mod eta;
mod outcome;
mod region;

pub use baseline::{baseline_frequentist, baseline_independent, IndependentBaseline};
pub use complexity::{complexity_imprecise, complexity_precise, BoundaryAnalysis};
pub use eta::{compute_eta, compute_eta_with, RiskPolynomial};
pub use outcome::{
    bound_outcome, refine_until, IterationRecord, Mode, RefineReport, Regions, ScenarioOutcome,
    DEFAULT_BETAS,
};
pub use region::{
    rank_stats, solve_box, solve_box_imprecise, solve_box_precise, BoxRegion, BoxSolution,
    Membership, RankStats, BOUNDARY_TOL,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("no samples")]
    Empty,
    #[error("cost of relaxation must be positive and finite, got {0}")]
    Rho(f64),
    #[error("rho = {0} is critical (1/rho is an integer); use a value from rho_grid")]
    CriticalRho(f64),
    #[error("confidence level must lie in (0, 1), got {0}")]
    Beta(f64),
    #[error("complexity {c} exceeds sample count {n}")]
    Complexity { c: usize, n: usize },
    #[error("solution {index} has {got} entries, expected {expected}")]
    Dimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("solution {0} has a non-finite or inverted interval")]
    Interval(usize),
    #[error("no sign change of the risk polynomial on (0, 1) for n={n}, c={c}")]
    NoRoot { n: usize, c: usize },
    #[error("malformed file: {0}")]
    Format(String),
}

/// Costs of relaxation `[2, 1/1.5, 1/2.5, ..., 1/(k - 0.5)]`, which avoid the
/// critical values `1/j`.
pub fn rho_grid(k: usize) -> Vec<f64> {
    let mut grid = Vec::with_capacity(k);
    if k >= 1 {
        grid.push(2.0);
    }
    for j in 2..=k {
        grid.push(1.0 / (j as f64 - 0.5));
    }
    grid
}
