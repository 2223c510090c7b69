use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use serde::Deserialize;

use super::{
    Command, Distribution, Label, ModelError, Parameter, ParametricCtmc, Reward, State,
    StateVariable,
};
use crate::expr::{parse_expression, parse_guard, CompiledExpr, Expr, GuardExpr};
use crate::scalar::{f64_to_rational, Rational};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    name: String,
    #[serde(default)]
    parameters: Vec<ParameterDoc>,
    variables: Vec<VariableDoc>,
    #[serde(default)]
    init_distribution: Option<Vec<InitDoc>>,
    commands: Vec<CommandDoc>,
    #[serde(default)]
    labels: BTreeMap<String, String>,
    #[serde(default)]
    rewards: BTreeMap<String, RewardDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParameterDoc {
    name: String,
    distribution: DistributionDoc,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum DistributionDoc {
    Normal { mean: f64, std: f64 },
    Uniform { low: f64, high: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    init: serde_json::Number,
    min: serde_json::Number,
    max: serde_json::Number,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitDoc {
    state: BTreeMap<String, serde_json::Number>,
    prob: serde_json::Number,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommandDoc {
    guard: String,
    rate: String,
    #[serde(default)]
    updates: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RewardDoc {
    states: String,
}

/// Parses and validates a model document.
pub fn parse_model(document: &str) -> Result<ParametricCtmc, ModelError> {
    let doc: ModelDoc =
        serde_json::from_str(document).map_err(|e| ModelError::Schema(e.to_string()))?;

    let mut seen = BTreeSet::new();
    let mut parameters = Vec::new();
    for p in doc.parameters {
        check_ident(&p.name)?;
        if !seen.insert(p.name.clone()) {
            return Err(ModelError::Duplicate(p.name));
        }
        let distribution = match p.distribution {
            DistributionDoc::Normal { mean, std } => {
                if !(std > 0.0 && std.is_finite() && mean.is_finite()) {
                    return Err(ModelError::Distribution {
                        name: p.name,
                        reason: "std must be positive and finite".into(),
                    });
                }
                Distribution::Normal { mean, std }
            }
            DistributionDoc::Uniform { low, high } => {
                if !(low < high && low.is_finite() && high.is_finite()) {
                    return Err(ModelError::Distribution {
                        name: p.name,
                        reason: "low must be below high".into(),
                    });
                }
                Distribution::Uniform { low, high }
            }
        };
        parameters.push(Parameter {
            name: p.name,
            distribution,
        });
    }

    let mut variables = Vec::new();
    for v in doc.variables {
        check_ident(&v.name)?;
        if !seen.insert(v.name.clone()) {
            return Err(ModelError::Duplicate(v.name));
        }
        let int = |n: &serde_json::Number| {
            n.as_i64()
                .ok_or_else(|| ModelError::NonIntegerBound(v.name.clone()))
        };
        let (init, min, max) = (int(&v.init)?, int(&v.min)?, int(&v.max)?);
        if min > max {
            return Err(ModelError::Bounds {
                name: v.name,
                reason: format!("min {min} exceeds max {max}"),
            });
        }
        if init < min || init > max {
            return Err(ModelError::Bounds {
                name: v.name,
                reason: format!("init {init} outside [{min}, {max}]"),
            });
        }
        variables.push(StateVariable {
            name: v.name,
            init,
            min,
            max,
        });
    }

    let param_slot: HashMap<&str, usize> = parameters
        .iter()
        .enumerate()
        .map(|(i, p)| (p.name.as_str(), i))
        .collect();
    let var_slot: HashMap<&str, usize> = variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let np = parameters.len();

    // Rates see parameters and state variables; everything else only state.
    let rate_resolve = |n: &str| {
        param_slot
            .get(n)
            .copied()
            .or_else(|| var_slot.get(n).map(|i| np + i))
    };
    let state_resolve = |n: &str| var_slot.get(n).copied();
    let check_state_ids = |context: &str, ids: BTreeSet<String>| -> Result<(), ModelError> {
        for name in ids {
            if param_slot.contains_key(name.as_str()) {
                return Err(ModelError::ParameterInStateExpr {
                    context: context.to_string(),
                    name,
                });
            }
            if !var_slot.contains_key(name.as_str()) {
                return Err(ModelError::Undeclared {
                    context: context.to_string(),
                    name,
                });
            }
        }
        Ok(())
    };

    let mut commands = Vec::new();
    for (k, c) in doc.commands.into_iter().enumerate() {
        let ctx = format!("command {k}");
        let guard = guard_of(&format!("{ctx} guard"), &c.guard)?;
        check_state_ids(&format!("{ctx} guard"), guard.free_identifiers())?;
        let rate = expr_of(&format!("{ctx} rate"), &c.rate)?;
        for name in rate.free_identifiers() {
            if rate_resolve(&name).is_none() {
                return Err(ModelError::Undeclared {
                    context: format!("{ctx} rate"),
                    name,
                });
            }
        }
        let mut updates = Vec::new();
        for (var, text) in &c.updates {
            let idx = *var_slot
                .get(var.as_str())
                .ok_or_else(|| ModelError::Undeclared {
                    context: format!("{ctx} updates"),
                    name: var.clone(),
                })?;
            let e = expr_of(&format!("{ctx} update of {var}"), text)?;
            check_state_ids(&format!("{ctx} update of {var}"), e.free_identifiers())?;
            updates.push((idx, e));
        }
        let guard_c = guard.compile(&state_resolve).expect("identifiers checked");
        let rate_c = rate.compile(&rate_resolve).expect("identifiers checked");
        let updates_c = updates
            .iter()
            .map(|(i, e)| (*i, e.compile(&state_resolve).expect("identifiers checked")))
            .collect();
        commands.push(Command {
            guard,
            rate,
            updates,
            guard_c,
            rate_c,
            updates_c,
        });
    }

    let mut labels = Vec::new();
    for (name, text) in doc.labels {
        let ctx = format!("label {name}");
        let guard = guard_of(&ctx, &text)?;
        check_state_ids(&ctx, guard.free_identifiers())?;
        let compiled = guard.compile(&state_resolve).expect("identifiers checked");
        labels.push(Label {
            name,
            guard,
            compiled,
        });
    }

    let mut rewards = Vec::new();
    for (name, r) in doc.rewards {
        let ctx = format!("reward {name}");
        let states = expr_of(&ctx, &r.states)?;
        check_state_ids(&ctx, states.free_identifiers())?;
        let compiled: CompiledExpr = states.compile(&state_resolve).expect("identifiers checked");
        rewards.push(Reward {
            name,
            states,
            compiled,
        });
    }

    let initial = match doc.init_distribution {
        None => vec![(
            variables.iter().map(|v| v.init).collect::<State>(),
            crate::scalar::int(1),
        )],
        Some(entries) => initial_distribution(&variables, &var_slot, entries)?,
    };

    Ok(ParametricCtmc {
        name: doc.name,
        parameters,
        variables,
        initial,
        commands,
        labels,
        rewards,
        structure: OnceLock::new(),
    })
}

fn initial_distribution(
    variables: &[StateVariable],
    var_slot: &HashMap<&str, usize>,
    entries: Vec<InitDoc>,
) -> Result<Vec<(State, Rational)>, ModelError> {
    if entries.is_empty() {
        return Err(ModelError::InitDistribution("empty".into()));
    }
    let mut out: Vec<(State, Rational)> = Vec::new();
    let mut total = Rational::zero();
    for e in entries {
        let mut state: State = variables.iter().map(|v| v.init).collect();
        for (name, value) in &e.state {
            let idx = *var_slot.get(name.as_str()).ok_or_else(|| {
                ModelError::InitDistribution(format!("undeclared variable {name}"))
            })?;
            let v = value.as_i64().ok_or_else(|| {
                ModelError::InitDistribution(format!("{name} must be an integer"))
            })?;
            let decl = &variables[idx];
            if v < decl.min || v > decl.max {
                return Err(ModelError::InitDistribution(format!(
                    "{name} = {v} outside [{}, {}]",
                    decl.min, decl.max
                )));
            }
            state[idx] = v;
        }
        let prob = crate::expr::parse_decimal(&e.prob.to_string())
            .or_else(|| e.prob.as_f64().and_then(f64_to_rational))
            .ok_or_else(|| ModelError::InitDistribution("bad probability".into()))?;
        if !prob.is_positive() {
            return Err(ModelError::InitDistribution(
                "probabilities must be positive".into(),
            ));
        }
        total += &prob;
        match out.iter_mut().find(|(s, _)| *s == state) {
            Some((_, p)) => *p += prob,
            None => out.push((state, prob)),
        }
    }
    let one = crate::scalar::int(1);
    let tol = Rational::new(1.into(), 1_000_000_000.into());
    if (&total - &one).abs() > tol {
        return Err(ModelError::InitDistribution(format!(
            "probabilities sum to {}, not 1",
            crate::expr::format_decimal(&total)
        )));
    }
    // Normalise so the exact total is one.
    for (_, p) in &mut out {
        *p = &*p / &total;
    }
    Ok(out)
}

fn check_ident(name: &str) -> Result<(), ModelError> {
    let mut chars = name.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(ModelError::Schema(format!("invalid identifier {name:?}")))
    }
}

fn expr_of(context: &str, text: &str) -> Result<Expr, ModelError> {
    parse_expression(text).map_err(|error| ModelError::Parse {
        context: context.to_string(),
        error,
    })
}

fn guard_of(context: &str, text: &str) -> Result<GuardExpr, ModelError> {
    parse_guard(text).map_err(|error| ModelError::Parse {
        context: context.to_string(),
        error,
    })
}
