//! Guarded-command parametric CTMCs and explicit-state builders.

mod build;
mod cluster;
mod ctmc;
mod json;
mod partial;
mod structure;

use std::sync::{Arc, OnceLock};

pub use build::{build_full, build_full_capped, DEFAULT_STATE_CAP};
pub use cluster::{cluster_valuations, ValuationCluster, DEFAULT_CLUSTER_RADIUS};
pub use ctmc::ConcreteCtmc;
pub use json::parse_model;
pub use partial::{build_partial, PartialCtmc, RetainedSet};
pub use structure::{check_graph_preserving, GraphCheck, ParametricStructure};

use crate::expr::{CompiledExpr, CompiledGuard, Expr, GuardExpr, ParseError};
use crate::scalar::Rational;

/// One sampled assignment of parameter values, in declaration order.
pub type Valuation = Vec<Rational>;

/// Marginal distribution of a parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    Normal { mean: f64, std: f64 },
    Uniform { low: f64, high: f64 },
}

impl Distribution {
    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Normal { mean, .. } => mean,
            Distribution::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    /// Scale used to standardise coordinates when clustering.
    pub fn scale(&self) -> f64 {
        match *self {
            Distribution::Normal { std, .. } => std,
            Distribution::Uniform { low, high } => (high - low) / 12f64.sqrt(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Parameter {
    pub name: String,
    pub distribution: Distribution,
}

#[derive(Debug, Clone)]
pub struct StateVariable {
    pub name: String,
    pub init: i64,
    pub min: i64,
    pub max: i64,
}

#[derive(Debug, Clone)]
pub struct Command {
    pub guard: GuardExpr,
    pub rate: Expr,
    /// `(variable index, new value)`; unlisted variables keep their value.
    pub updates: Vec<(usize, Expr)>,
    guard_c: CompiledGuard,
    /// Slots: parameters first, then state variables.
    rate_c: CompiledExpr,
    updates_c: Vec<(usize, CompiledExpr)>,
}

#[derive(Debug, Clone)]
pub struct Label {
    pub name: String,
    pub guard: GuardExpr,
    compiled: CompiledGuard,
}

#[derive(Debug, Clone)]
pub struct Reward {
    pub name: String,
    pub states: Expr,
    compiled: CompiledExpr,
}

/// Variable assignment of one state.
pub type State = Vec<i64>;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("{context}: {error}")]
    Parse { context: String, error: ParseError },
    #[error("{context}: undeclared identifier {name}")]
    Undeclared { context: String, name: String },
    #[error("{context}: parameter {name} is not allowed here")]
    ParameterInStateExpr { context: String, name: String },
    #[error("duplicate name {0}")]
    Duplicate(String),
    #[error("{0}: bounds must be integers")]
    NonIntegerBound(String),
    #[error("variable {name}: {reason}")]
    Bounds { name: String, reason: String },
    #[error("init_distribution: {0}")]
    InitDistribution(String),
    #[error("distribution of {name}: {reason}")]
    Distribution { name: String, reason: String },
    #[error("state space exceeds the cap of {0} states")]
    StateCap(usize),
    #[error("update of {var} yields {value} outside [{min}, {max}] in state {state:?}")]
    UpdateOutOfBounds {
        var: String,
        value: String,
        min: i64,
        max: i64,
        state: State,
    },
    #[error("valuation has {got} entries, model has {expected} parameters")]
    Dimension { expected: usize, got: usize },
    #[error("valuation is not graph-preserving: {0}")]
    NotGraphPreserving(String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("unknown reward {0}")]
    UnknownReward(String),
}

/// Parametric CTMC given as a guarded-command program.
#[derive(Debug)]
pub struct ParametricCtmc {
    pub name: String,
    pub parameters: Vec<Parameter>,
    pub variables: Vec<StateVariable>,
    /// Initial distribution with exact probabilities; a point mass on the
    /// declared `init` values unless given explicitly.
    pub initial: Vec<(State, Rational)>,
    pub commands: Vec<Command>,
    pub labels: Vec<Label>,
    pub rewards: Vec<Reward>,
    structure: OnceLock<Result<Arc<ParametricStructure>, ModelError>>,
}

impl ParametricCtmc {
    pub fn parameter_names(&self) -> Vec<&str> {
        self.parameters.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.name == name)
    }

    pub fn reward_index(&self, name: &str) -> Option<usize> {
        self.rewards.iter().position(|r| r.name == name)
    }

    pub fn check_dimension(&self, u: &[Rational]) -> Result<(), ModelError> {
        if u.len() != self.parameters.len() {
            return Err(ModelError::Dimension {
                expected: self.parameters.len(),
                got: u.len(),
            });
        }
        Ok(())
    }

    /// Parameter-independent state graph with polynomial edge rates, built on
    /// first use and shared afterwards.
    pub fn structure(&self) -> Result<Arc<ParametricStructure>, ModelError> {
        self.structure
            .get_or_init(|| ParametricStructure::build(self, DEFAULT_STATE_CAP).map(Arc::new))
            .clone()
    }

    /// Upper bound of each reward expression over the variable bounds box.
    pub fn reward_upper_bound(&self, reward: usize) -> Rational {
        let boxes: Vec<(Rational, Rational)> = self
            .variables
            .iter()
            .map(|v| (crate::scalar::int(v.min), crate::scalar::int(v.max)))
            .collect();
        self.rewards[reward].compiled.bounds(&boxes).1
    }

    /// Lower bound of each reward expression over the variable bounds box.
    pub fn reward_lower_bound(&self, reward: usize) -> Rational {
        let boxes: Vec<(Rational, Rational)> = self
            .variables
            .iter()
            .map(|v| (crate::scalar::int(v.min), crate::scalar::int(v.max)))
            .collect();
        self.rewards[reward].compiled.bounds(&boxes).0
    }

    fn state_slots(state: &[i64]) -> Vec<Rational> {
        state.iter().map(|&v| crate::scalar::int(v)).collect()
    }

    pub fn label_holds(&self, label: usize, state: &[i64]) -> bool {
        self.labels[label].compiled.eval(&Self::state_slots(state))
    }

    pub fn reward_value(&self, reward: usize, state: &[i64]) -> Rational {
        self.rewards[reward]
            .compiled
            .eval(&Self::state_slots(state))
    }
}
