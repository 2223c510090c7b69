use serde::{Deserialize, Serialize};

use super::CheckError;

/// Precise solution vector of one valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionVector {
    pub valuation_index: usize,
    pub values: Vec<f64>,
}

/// Per-measure bounds of one valuation.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSolution {
    pub valuation_index: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Exploration threshold of the partial model that produced the bounds.
    pub delta: f64,
    /// False if the relative gap was not reached.
    pub converged: bool,
}

impl IntervalSolution {
    /// Zero-width interval at a precise solution.
    pub fn exact(s: &SolutionVector) -> Self {
        IntervalSolution {
            valuation_index: s.valuation_index,
            lower: s.values.clone(),
            upper: s.values.clone(),
            delta: 0.0,
            converged: true,
        }
    }

    pub fn width(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| u - l)
            .fold(0.0, f64::max)
    }
}

/// Contents of a solutions file.
#[derive(Debug, Clone, PartialEq)]
pub enum Solutions {
    Exact {
        measure_ids: Vec<String>,
        solutions: Vec<SolutionVector>,
    },
    Approx {
        measure_ids: Vec<String>,
        solutions: Vec<IntervalSolution>,
    },
}

#[derive(Serialize, Deserialize)]
struct Doc {
    measure_ids: Vec<String>,
    mode: String,
    solutions: Vec<Entry>,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    i: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
}

impl Solutions {
    pub fn measure_ids(&self) -> &[String] {
        match self {
            Solutions::Exact { measure_ids, .. } | Solutions::Approx { measure_ids, .. } => {
                measure_ids
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Solutions::Exact { solutions, .. } => solutions.len(),
            Solutions::Approx { solutions, .. } => solutions.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Interval view; precise solutions become zero-width intervals.
    pub fn intervals(&self) -> Vec<IntervalSolution> {
        match self {
            Solutions::Exact { solutions, .. } => {
                solutions.iter().map(IntervalSolution::exact).collect()
            }
            Solutions::Approx { solutions, .. } => solutions.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let (mode, entries) = match self {
            Solutions::Exact { solutions, .. } => (
                "exact",
                solutions
                    .iter()
                    .map(|s| Entry {
                        i: s.valuation_index,
                        values: Some(s.values.clone()),
                        lower: None,
                        upper: None,
                        delta: None,
                        converged: None,
                    })
                    .collect::<Vec<_>>(),
            ),
            Solutions::Approx { solutions, .. } => (
                "approx",
                solutions
                    .iter()
                    .map(|s| Entry {
                        i: s.valuation_index,
                        values: None,
                        lower: Some(s.lower.clone()),
                        upper: Some(s.upper.clone()),
                        delta: Some(s.delta),
                        converged: Some(s.converged),
                    })
                    .collect(),
            ),
        };
        let doc = Doc {
            measure_ids: self.measure_ids().to_vec(),
            mode: mode.to_string(),
            solutions: entries,
        };
        serde_json::to_string_pretty(&doc).expect("serialisable")
    }

    pub fn from_json(text: &str) -> Result<Self, CheckError> {
        let doc: Doc = serde_json::from_str(text).map_err(|e| CheckError::Format(e.to_string()))?;
        let m = doc.measure_ids.len();
        let bad = |i: usize, what: &str| CheckError::Format(format!("solution {i}: {what}"));
        match doc.mode.as_str() {
            "exact" => {
                let solutions = doc
                    .solutions
                    .into_iter()
                    .map(|e| {
                        let values = e.values.ok_or_else(|| bad(e.i, "missing values"))?;
                        if values.len() != m {
                            return Err(bad(e.i, "wrong length"));
                        }
                        Ok(SolutionVector {
                            valuation_index: e.i,
                            values,
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Ok(Solutions::Exact {
                    measure_ids: doc.measure_ids,
                    solutions,
                })
            }
            "approx" => {
                let solutions = doc
                    .solutions
                    .into_iter()
                    .map(|e| {
                        let lower = e.lower.ok_or_else(|| bad(e.i, "missing lower"))?;
                        let upper = e.upper.ok_or_else(|| bad(e.i, "missing upper"))?;
                        if lower.len() != m || upper.len() != m {
                            return Err(bad(e.i, "wrong length"));
                        }
                        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
                            return Err(bad(e.i, "lower exceeds upper"));
                        }
                        Ok(IntervalSolution {
                            valuation_index: e.i,
                            lower,
                            upper,
                            delta: e.delta.unwrap_or(0.0),
                            converged: e.converged.unwrap_or(true),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Ok(Solutions::Approx {
                    measure_ids: doc.measure_ids,
                    solutions,
                })
            }
            other => Err(CheckError::Format(format!("unknown mode {other}"))),
        }
    }
}
