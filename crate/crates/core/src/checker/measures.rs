use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::CheckError;
use crate::model::ParametricCtmc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureKind {
    /// Probability of reaching `target` within `tau`.
    Reach { target: String, tau: f64 },
    /// `left U[t1,t2] target`, with `left` defaulting to the complement of
    /// `target`.
    ReachInterval {
        target: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        left: Option<String>,
        t1: f64,
        t2: f64,
    },
    /// Expected state reward at time `t`.
    InstantReward { reward: String, t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub id: String,
    #[serde(flatten)]
    pub kind: MeasureKind,
}

impl Measure {
    /// Time at which the measure is read off.
    pub fn horizon(&self) -> f64 {
        match &self.kind {
            MeasureKind::Reach { tau, .. } => *tau,
            MeasureKind::ReachInterval { t2, .. } => *t2,
            MeasureKind::InstantReward { t, .. } => *t,
        }
    }

    pub fn is_probability(&self) -> bool {
        !matches!(self.kind, MeasureKind::InstantReward { .. })
    }
}

/// Ordered measure list; solution vectors follow this order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureSet {
    pub measures: Vec<Measure>,
}

fn finite_nonneg(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

impl MeasureSet {
    pub fn new(measures: Vec<Measure>) -> Result<Self, CheckError> {
        let set = MeasureSet { measures };
        set.validate_shape()?;
        Ok(set)
    }

    pub fn from_json(text: &str) -> Result<Self, CheckError> {
        let set: MeasureSet =
            serde_json::from_str(text).map_err(|e| CheckError::Format(e.to_string()))?;
        set.validate_shape()?;
        Ok(set)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.measures.iter().map(|m| m.id.clone()).collect()
    }

    fn validate_shape(&self) -> Result<(), CheckError> {
        let mut ids = BTreeSet::new();
        for m in &self.measures {
            if !ids.insert(m.id.as_str()) {
                return Err(CheckError::Measure(format!("duplicate id {}", m.id)));
            }
            let ok = match &m.kind {
                MeasureKind::Reach { tau, .. } => finite_nonneg(*tau),
                MeasureKind::ReachInterval { t1, t2, .. } => {
                    finite_nonneg(*t1) && finite_nonneg(*t2) && t1 <= t2
                }
                MeasureKind::InstantReward { t, .. } => finite_nonneg(*t),
            };
            if !ok {
                return Err(CheckError::Measure(format!(
                    "{}: invalid time bounds",
                    m.id
                )));
            }
        }
        Ok(())
    }

    /// Checks that every referenced label and reward exists in `model`.
    pub fn validate_for(&self, model: &ParametricCtmc) -> Result<(), CheckError> {
        for m in &self.measures {
            let (labels, reward): (Vec<&String>, Option<&String>) = match &m.kind {
                MeasureKind::Reach { target, .. } => (vec![target], None),
                MeasureKind::ReachInterval { target, left, .. } => {
                    (std::iter::once(target).chain(left.iter()).collect(), None)
                }
                MeasureKind::InstantReward { reward, .. } => (vec![], Some(reward)),
            };
            for l in labels {
                if model.label_index(l).is_none() {
                    return Err(CheckError::UnknownLabel(l.clone()));
                }
            }
            if let Some(r) = reward {
                if model.reward_index(r).is_none() {
                    return Err(CheckError::UnknownReward(r.clone()));
                }
            }
        }
        Ok(())
    }

    /// Horizons if all measures are reachability measures of one family
    /// (same target, same left operand and window start), ascending.
    pub fn horizon_family(&self) -> Option<Vec<f64>> {
        let first = self.measures.first()?;
        let key = |m: &Measure| match &m.kind {
            MeasureKind::Reach { target, .. } => Some((0, target.clone(), None, 0.0)),
            MeasureKind::ReachInterval {
                target, left, t1, ..
            } => Some((1, target.clone(), left.clone(), *t1)),
            MeasureKind::InstantReward { .. } => None,
        };
        let k0 = key(first)?;
        let mut horizons = Vec::new();
        for m in &self.measures {
            if key(m)? != k0 {
                return None;
            }
            horizons.push(m.horizon());
        }
        if horizons.windows(2).all(|w| w[0] < w[1]) {
            Some(horizons)
        } else {
            None
        }
    }
}

/// SIR-style extinction family `(not target) U[start, start + span*i/m] target`
/// for `i = 1..m`.
pub fn extinction_family(target: &str, start: f64, span: f64, m: usize) -> MeasureSet {
    let measures = (1..=m)
        .map(|i| {
            let t2 = start + span * i as f64 / m as f64;
            Measure {
                id: format!("w_{}", format_time(t2)),
                kind: MeasureKind::ReachInterval {
                    target: target.to_string(),
                    left: None,
                    t1: start,
                    t2,
                },
            }
        })
        .collect();
    MeasureSet { measures }
}

fn format_time(t: f64) -> String {
    let s = format!("{t:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
