use std::collections::BTreeMap;

use super::measures::{MeasureKind, MeasureSet};
use super::transient::{check_epsilon, initial_vector, mass, phase_one, Uniformized};
use super::CheckError;
use crate::model::ConcreteCtmc;
use crate::scalar::Real;

/// Result of one measure on a (possibly truncated) chain. `value` treats the
/// sink as a failing state; `lower`/`upper` bound the value of the untruncated
/// chain, including the uniformization truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Bounds on a state reward over all states, used for truncated mass.
pub type RewardRange<'a> = &'a dyn Fn(&str) -> (f64, f64);

/// Evaluates all measures on `c`. Measures sharing the same absorbing
/// configuration are computed along one incremental time sweep, with the
/// tolerance split evenly over the sweep.
pub fn analyze<T: Real>(
    c: &ConcreteCtmc<T>,
    sink: Option<usize>,
    phi: &MeasureSet,
    eps: f64,
    reward_range: RewardRange<'_>,
) -> Result<Vec<MeasureValue>, CheckError> {
    check_epsilon(eps)?;
    let n = c.num_states();
    let not_sink = |s: usize| Some(s) != sink;
    let mut out: Vec<Option<MeasureValue>> = vec![None; phi.len()];

    let mut reach: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut window: BTreeMap<(&str, Option<&str>, u64), Vec<usize>> = BTreeMap::new();
    let mut rewards: Vec<usize> = Vec::new();
    for (i, m) in phi.measures.iter().enumerate() {
        match &m.kind {
            MeasureKind::Reach { target, .. } => reach.entry(target).or_default().push(i),
            MeasureKind::ReachInterval {
                target, left, t1, ..
            } => window
                .entry((target, left.as_deref(), t1.to_bits()))
                .or_default()
                .push(i),
            MeasureKind::InstantReward { .. } => rewards.push(i),
        }
    }
    let by_horizon = |idx: &mut Vec<usize>| {
        idx.sort_by(|&a, &b| {
            phi.measures[a]
                .horizon()
                .total_cmp(&phi.measures[b].horizon())
        })
    };
    let label = |name: &str| -> Result<Vec<bool>, CheckError> {
        c.label(name)
            .map(|l| l.to_vec())
            .ok_or_else(|| CheckError::UnknownLabel(name.to_string()))
    };

    for (target, mut idx) in reach {
        by_horizon(&mut idx);
        let target = label(target)?;
        let mut absorbing = target.clone();
        if let Some(s) = sink {
            absorbing[s] = true;
        }
        let uni = Uniformized::new(c, Some(&absorbing));
        let step_eps = eps / idx.len() as f64;
        let mut pi = initial_vector(c);
        let mut now = 0.0;
        for i in idx {
            let t = phi.measures[i].horizon();
            pi = uni.advance(&pi, t - now, step_eps);
            now = t;
            let hit = mass(&pi, &target).to_f64_lossy();
            let open: f64 = (0..n)
                .filter(|&s| !target[s] && not_sink(s))
                .map(|s| pi[s].to_f64_lossy())
                .sum();
            out[i] = Some(probability(hit, 1.0 - open));
        }
    }

    for ((target, left, t1), mut idx) in window {
        by_horizon(&mut idx);
        let t1 = f64::from_bits(t1);
        let target = label(target)?;
        let left = match left {
            Some(l) => label(l)?,
            None => target.iter().map(|x| !x).collect(),
        };
        let (mut pi, failed) = phase_one(c, &target, &left, t1, eps / 2.0, sink);
        let failed = failed.to_f64_lossy();
        let mut absorbing: Vec<bool> = (0..n).map(|s| target[s] || !left[s]).collect();
        if let Some(s) = sink {
            absorbing[s] = true;
        }
        let uni = Uniformized::new(c, Some(&absorbing));
        let step_eps = eps / 2.0 / idx.len() as f64;
        let mut now = t1;
        for i in idx {
            let t = phi.measures[i].horizon();
            pi = uni.advance(&pi, t - now, step_eps);
            now = t;
            let hit = mass(&pi, &target).to_f64_lossy();
            let open: f64 = (0..n)
                .filter(|&s| !target[s] && not_sink(s))
                .map(|s| pi[s].to_f64_lossy())
                .sum();
            out[i] = Some(probability(hit, 1.0 - failed - open));
        }
    }

    if !rewards.is_empty() {
        by_horizon(&mut rewards);
        let uni = Uniformized::new(c, None);
        let step_eps = eps / rewards.len() as f64;
        let mut pi = initial_vector(c);
        let mut now = 0.0;
        for i in rewards {
            let (name, t) = match &phi.measures[i].kind {
                MeasureKind::InstantReward { reward, t } => (reward.as_str(), *t),
                _ => unreachable!(),
            };
            let r = c
                .reward(name)
                .ok_or_else(|| CheckError::UnknownReward(name.to_string()))?;
            pi = uni.advance(&pi, t - now, step_eps);
            now = t;
            let mut value = 0.0;
            let mut covered = 0.0;
            for s in (0..n).filter(|&s| not_sink(s)) {
                let p = pi[s].to_f64_lossy();
                value += p * r[s].to_f64_lossy();
                covered += p;
            }
            let (lo, hi) = reward_range(name);
            let slack = (1.0 - covered).max(0.0);
            out[i] = Some(MeasureValue {
                value,
                lower: value + slack * lo.min(0.0),
                upper: value + slack * hi.max(0.0),
            });
        }
    }

    Ok(out
        .into_iter()
        .map(|v| v.expect("every measure evaluated"))
        .collect())
}

fn probability(hit: f64, upper: f64) -> MeasureValue {
    let value = hit.clamp(0.0, 1.0);
    MeasureValue {
        value,
        lower: value,
        upper: upper.clamp(value, 1.0),
    }
}

/// Reward range taken from the reward vectors of `c` itself.
pub fn chain_reward_range<T: Real>(c: &ConcreteCtmc<T>) -> impl Fn(&str) -> (f64, f64) + '_ {
    move |name| match c.reward(name) {
        Some(r) => r.iter().fold((0.0f64, 0.0f64), |(lo, hi), x| {
            let x = x.to_f64_lossy();
            (lo.min(x), hi.max(x))
        }),
        None => (0.0, 0.0),
    }
}
