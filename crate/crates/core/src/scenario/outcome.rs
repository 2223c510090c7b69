use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::complexity::{boundary_analysis, greedy_critical_set, BoundaryAnalysis};
use super::eta::compute_eta;
use super::region::{solve_boxes, BoxRegion, Boxes};
use super::ScenarioError;
use crate::checker::IntervalSolution;

pub const DEFAULT_BETAS: [f64; 3] = [0.9, 0.99, 0.999];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Precise,
    Imprecise,
}

/// Region, complexity bound and containment bounds for one cost of relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub rho: f64,
    pub region: BoxRegion,
    pub relaxed: Vec<usize>,
    pub complexity_bound: usize,
    /// `(beta, eta)` in the order requested.
    pub eta_by_beta: Vec<(f64, f64)>,
    pub n: usize,
    pub mode: Mode,
    /// Present for interval inputs that are not all exact.
    pub boundary: Option<BoundaryAnalysis>,
}

impl ScenarioOutcome {
    pub fn eta(&self, beta: f64) -> Option<f64> {
        self.eta_by_beta
            .iter()
            .find(|(b, _)| *b == beta)
            .map(|&(_, e)| e)
    }
}

/// Solves the region, bounds its complexity and evaluates the bound for
/// every confidence level. Interval inputs of zero width are handled as
/// precise ones.
pub fn bound_outcome(
    sols: &[IntervalSolution],
    rho: f64,
    betas: &[f64],
    mode: Mode,
) -> Result<ScenarioOutcome, ScenarioError> {
    let b = Boxes::intervals(sols)?;
    let precise = b.is_precise();
    if mode == Mode::Precise && !precise {
        return Err(ScenarioError::Format(
            "precise mode needs zero-width solutions".into(),
        ));
    }
    let sol = solve_boxes(&b, rho)?;
    let (complexity_bound, boundary) = if precise {
        (greedy_critical_set(&b, rho, &sol)?.len(), None)
    } else {
        let a = boundary_analysis(&b, rho, &sol)?;
        (b.len() - a.surely_noncritical.len(), Some(a))
    };
    let eta_by_beta = betas
        .iter()
        .map(|&beta| Ok((beta, compute_eta(b.len(), complexity_bound, beta)?)))
        .collect::<Result<_, ScenarioError>>()?;
    Ok(ScenarioOutcome {
        rho,
        region: sol.region,
        relaxed: sol.relaxed,
        complexity_bound,
        eta_by_beta,
        n: b.len(),
        mode,
        boundary,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Solutions refined before this solve.
    pub refined: usize,
    pub complexity_bound: usize,
    pub eta: f64,
    /// Whether this solve replaced the reported outcome.
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineReport {
    pub outcome: ScenarioOutcome,
    pub solutions: Vec<IntervalSolution>,
    pub history: Vec<IterationRecord>,
}

/// Repeatedly refines the solutions whose boxes meet the region boundary
/// and solves again. Stops when the bound improves by less than
/// `target_gain` or after `max_iters` solves. A solve whose bound is lower
/// than the reported one is not accepted, so the reported bound never
/// decreases.
pub fn refine_until<E, F>(
    mut sols: Vec<IntervalSolution>,
    rho: f64,
    beta: f64,
    target_gain: f64,
    max_iters: usize,
    mut refiner: F,
) -> Result<RefineReport, E>
where
    E: From<ScenarioError>,
    F: FnMut(&IntervalSolution) -> Result<IntervalSolution, E>,
{
    let mut outcome = bound_outcome(&sols, rho, &[beta], Mode::Imprecise)?;
    let mut history = vec![IterationRecord {
        refined: 0,
        complexity_bound: outcome.complexity_bound,
        eta: outcome.eta_by_beta[0].1,
        accepted: true,
    }];
    let mut latest = outcome.clone();
    while history.len() < max_iters.max(1) {
        let Some(analysis) = &latest.boundary else {
            break;
        };
        let targets: Vec<usize> = analysis
            .boundary
            .iter()
            .copied()
            .filter(|&i| sols[i].lower != sols[i].upper)
            .collect();
        if targets.is_empty() {
            break;
        }
        for &i in &targets {
            sols[i] = refiner(&sols[i])?;
        }
        latest = bound_outcome(&sols, rho, &[beta], Mode::Imprecise)?;
        let gain = latest.eta_by_beta[0].1 - outcome.eta_by_beta[0].1;
        history.push(IterationRecord {
            refined: targets.len(),
            complexity_bound: latest.complexity_bound,
            eta: latest.eta_by_beta[0].1,
            accepted: gain >= 0.0,
        });
        if gain >= 0.0 {
            outcome = latest.clone();
        }
        if gain < target_gain {
            break;
        }
    }
    Ok(RefineReport {
        outcome,
        solutions: sols,
        history,
    })
}

#[derive(Serialize, Deserialize)]
struct RegionDoc {
    rho: f64,
    beta: BTreeMap<String, f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    relaxed: Vec<usize>,
    complexity_bound: usize,
    mode: Mode,
    n: usize,
}

/// Contents of a regions file.
#[derive(Debug, Clone, PartialEq)]
pub struct Regions {
    pub measure_ids: Vec<String>,
    pub outcomes: Vec<ScenarioOutcome>,
}

#[derive(Serialize, Deserialize)]
struct RegionsDoc {
    measure_ids: Vec<String>,
    regions: Vec<RegionDoc>,
}

impl Regions {
    pub fn to_json(&self) -> String {
        let regions = self
            .outcomes
            .iter()
            .map(|o| RegionDoc {
                rho: o.rho,
                beta: o
                    .eta_by_beta
                    .iter()
                    .map(|(b, e)| (b.to_string(), *e))
                    .collect(),
                lower: o.region.lower.clone(),
                upper: o.region.upper.clone(),
                relaxed: o.relaxed.clone(),
                complexity_bound: o.complexity_bound,
                mode: o.mode,
                n: o.n,
            })
            .collect();
        let doc = RegionsDoc {
            measure_ids: self.measure_ids.clone(),
            regions,
        };
        serde_json::to_string_pretty(&doc).expect("serialisable")
    }

    /// Parses a regions file; boundary analyses are not stored.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let doc: RegionsDoc =
            serde_json::from_str(text).map_err(|e| ScenarioError::Format(e.to_string()))?;
        let m = doc.measure_ids.len();
        let outcomes = doc
            .regions
            .into_iter()
            .map(|r| {
                if r.lower.len() != m || r.upper.len() != m {
                    return Err(ScenarioError::Format("region dimension mismatch".into()));
                }
                let mut eta_by_beta = r
                    .beta
                    .into_iter()
                    .map(|(b, e)| {
                        b.parse::<f64>()
                            .map(|b| (b, e))
                            .map_err(|_| ScenarioError::Format(format!("bad beta key {b}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                eta_by_beta.sort_by(|x, y| x.0.total_cmp(&y.0));
                Ok(ScenarioOutcome {
                    rho: r.rho,
                    region: BoxRegion {
                        lower: r.lower,
                        upper: r.upper,
                    },
                    relaxed: r.relaxed,
                    complexity_bound: r.complexity_bound,
                    eta_by_beta,
                    n: r.n,
                    mode: r.mode,
                    boundary: None,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Regions {
            measure_ids: doc.measure_ids,
            outcomes,
        })
    }
}
