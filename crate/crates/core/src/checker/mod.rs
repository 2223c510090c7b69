//! Transient analysis of instantiated chains and solution vectors.

mod analysis;
mod curve;
mod measures;
mod solutions;
mod transient;

use std::sync::Arc;

use rayon::prelude::*;

pub use analysis::{analyze, chain_reward_range, MeasureValue};
pub use curve::{region_to_curve, CurveBand};
pub use measures::{extinction_family, Measure, MeasureKind, MeasureSet};
pub use solutions::{IntervalSolution, SolutionVector, Solutions};
pub use transient::{
    instant_reward, interval_reach, poisson_window, reach_probability, transient_distribution,
    PoissonWindow, MIN_EPSILON,
};

use crate::model::{
    build_partial, cluster_valuations, ModelError, ParametricCtmc, PartialCtmc, RetainedSet,
    Valuation,
};
use crate::scalar::{rational_to_f64, Rational};

pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const DEFAULT_REL_GAP: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CheckError {
    #[error("tolerance {0} is below the supported minimum of 1e-12")]
    Tolerance(f64),
    #[error("invalid time {0}")]
    Time(f64),
    #[error("invalid window [{0}, {1}]")]
    Window(f64, f64),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("unknown reward {0}")]
    UnknownReward(String),
    #[error("invalid measure: {0}")]
    Measure(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error("delta must lie in (0, 1], got {0}")]
    Delta(f64),
    #[error("measures do not form a horizon family")]
    NotHorizonFamily,
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn model_reward_range(m: &ParametricCtmc) -> impl Fn(&str) -> (f64, f64) + '_ {
    move |name| match m.reward_index(name) {
        Some(k) => {
            let hi = rational_to_f64(&m.reward_upper_bound(k));
            let lo = rational_to_f64(&m.reward_lower_bound(k));
            (lo, hi)
        }
        None => (0.0, 0.0),
    }
}

/// Precise solution vector of `u`, each entry within `eps`.
pub fn solve_measures(
    m: &ParametricCtmc,
    u: &[Rational],
    phi: &MeasureSet,
    eps: f64,
) -> Result<Vec<f64>, CheckError> {
    if phi.is_empty() {
        return Ok(Vec::new());
    }
    phi.validate_for(m)?;
    let c = m.structure()?.instantiate::<f64>(u)?;
    let values = analyze(&c, None, phi, eps, &chain_reward_range(&c))?;
    Ok(values.into_iter().map(|v| v.value).collect())
}

/// Options of the approximate (partial-model) analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxOptions {
    pub delta: f64,
    pub eps: f64,
    pub rel_gap: f64,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            delta: 1e-3,
            eps: DEFAULT_EPSILON,
            rel_gap: DEFAULT_REL_GAP,
        }
    }
}

/// Interval bounds from one partial model.
fn bound_once(
    m: &ParametricCtmc,
    u: &[Rational],
    phi: &MeasureSet,
    delta: f64,
    eps: f64,
    reuse: Option<&Arc<RetainedSet>>,
) -> Result<(Vec<MeasureValue>, PartialCtmc), CheckError> {
    let p: PartialCtmc = build_partial(m, u, delta, reuse)?;
    let values = analyze(&p.ctmc, Some(p.sink), phi, eps, &model_reward_range(m))?;
    Ok((values, p))
}

fn gap_met(values: &[MeasureValue], rel_gap: f64) -> bool {
    values
        .iter()
        .all(|v| v.upper - v.lower <= rel_gap * v.upper.max(1e-12))
}

/// Interval solution from partial models. The threshold is divided by 10
/// until every entry meets the relative gap; `converged` is false when the
/// threshold underflowed first.
pub fn bound_measures(
    m: &ParametricCtmc,
    u: &[Rational],
    phi: &MeasureSet,
    opts: ApproxOptions,
    reuse: Option<&Arc<RetainedSet>>,
) -> Result<IntervalSolution, CheckError> {
    if !(opts.delta > 0.0 && opts.delta <= 1.0) {
        return Err(CheckError::Delta(opts.delta));
    }
    phi.validate_for(m)?;
    let mut delta = opts.delta;
    let mut reuse = reuse;
    loop {
        let (values, p) = bound_once(m, u, phi, delta, opts.eps, reuse)?;
        let met = gap_met(&values, opts.rel_gap);
        let complete = !p.sink_reachable();
        let next = delta / 10.0;
        if met || complete || next < f64::MIN_POSITIVE {
            return Ok(IntervalSolution {
                valuation_index: 0,
                lower: values.iter().map(|v| v.lower).collect(),
                upper: values.iter().map(|v| v.upper).collect(),
                delta,
                converged: met,
            });
        }
        delta = next;
        reuse = None;
    }
}

/// One refinement step: recomputes the bounds with a ten times smaller
/// threshold and intersects them with the previous interval.
pub fn refine_solution(
    prev: &IntervalSolution,
    m: &ParametricCtmc,
    u: &[Rational],
    phi: &MeasureSet,
    eps: f64,
) -> Result<IntervalSolution, CheckError> {
    if prev.lower == prev.upper {
        return Ok(prev.clone());
    }
    let delta = prev.delta / 10.0;
    if delta < f64::MIN_POSITIVE {
        return Ok(prev.clone());
    }
    let (values, _) = bound_once(m, u, phi, delta, eps, None)?;
    let lower: Vec<f64> = values
        .iter()
        .zip(&prev.lower)
        .map(|(v, &l)| v.lower.max(l))
        .collect();
    let upper: Vec<f64> = values
        .iter()
        .zip(&prev.upper)
        .zip(&lower)
        .map(|((v, &h), &l)| v.upper.min(h).max(l))
        .collect();
    Ok(IntervalSolution {
        valuation_index: prev.valuation_index,
        lower,
        upper,
        delta,
        converged: prev.converged,
    })
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool")
}

/// Precise solutions for all valuations, ordered by valuation index.
pub fn solve_all(
    m: &ParametricCtmc,
    us: &[Valuation],
    phi: &MeasureSet,
    eps: f64,
    threads: usize,
) -> Result<Vec<SolutionVector>, CheckError> {
    phi.validate_for(m)?;
    m.structure()?;
    pool(threads).install(|| {
        us.par_iter()
            .enumerate()
            .map(|(i, u)| {
                Ok(SolutionVector {
                    valuation_index: i,
                    values: solve_measures(m, u, phi, eps)?,
                })
            })
            .collect()
    })
}

/// Interval solutions for all valuations. Valuations are clustered and each
/// cluster first reuses the retained states of its representative.
pub fn bound_all(
    m: &ParametricCtmc,
    us: &[Valuation],
    phi: &MeasureSet,
    opts: ApproxOptions,
    cluster_radius: Option<f64>,
    threads: usize,
) -> Result<Vec<IntervalSolution>, CheckError> {
    phi.validate_for(m)?;
    let pool = pool(threads);
    let Some(radius) = cluster_radius else {
        return pool.install(|| {
            us.par_iter()
                .enumerate()
                .map(|(i, u)| {
                    let mut s = bound_measures(m, u, phi, opts, None)?;
                    s.valuation_index = i;
                    Ok(s)
                })
                .collect()
        });
    };
    let clusters = cluster_valuations(m, us, radius);
    let mut owner = vec![0; us.len()];
    for (k, c) in clusters.iter().enumerate() {
        for &i in &c.members {
            owner[i] = k;
        }
    }
    let retained: Vec<Arc<RetainedSet>> = pool.install(|| {
        clusters
            .par_iter()
            .map(|c| {
                let p: PartialCtmc = build_partial(m, &us[c.representative], opts.delta, None)?;
                Ok(p.retained)
            })
            .collect::<Result<_, CheckError>>()
    })?;
    pool.install(|| {
        us.par_iter()
            .enumerate()
            .map(|(i, u)| {
                let mut s = bound_measures(m, u, phi, opts, Some(&retained[owner[i]]))?;
                s.valuation_index = i;
                Ok(s)
            })
            .collect()
    })
}
