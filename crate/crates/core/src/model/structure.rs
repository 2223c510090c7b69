use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::build::Explorer;
use super::ctmc::Annotations;
use super::{ConcreteCtmc, ModelError, ParametricCtmc, State};
use crate::expr::{Atom, Polynomial};
use crate::scalar::{int, Rational, Real};

/// State graph of a parametric CTMC with edge rates kept as polynomials in
/// the parameters. The graph does not depend on the valuation as long as the
/// valuation is graph-preserving, so it is built once and instantiated many
/// times.
#[derive(Debug)]
pub struct ParametricStructure {
    states: Vec<State>,
    initial: Vec<(usize, Rational)>,
    /// `(target, polynomial id, positive factor)`.
    rows: Vec<Vec<(usize, usize, Rational)>>,
    /// Distinct edge polynomials, each scaled to a unit leading coefficient.
    polys: Vec<Polynomial>,
    notes: Annotations,
    num_parameters: usize,
}

/// Outcome of a graph-preservation check.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphCheck {
    pub ok: bool,
    pub reason: Option<String>,
}

impl ParametricStructure {
    pub fn build(m: &ParametricCtmc, cap: usize) -> Result<Self, ModelError> {
        let np = m.parameters.len();
        let mut explorer = Explorer::new(m, cap)?;
        let mut polys: Vec<Polynomial> = Vec::new();
        let mut poly_ids: HashMap<Polynomial, usize> = HashMap::new();
        let mut rows = Vec::new();
        let mut next = 0;
        while next < explorer.states.len() {
            let state = explorer.states[next].clone();
            let mut edges: Vec<(State, Polynomial)> = Vec::new();
            for (k, target) in m.moves(&state)? {
                let p = m.commands[k].rate_c.to_polynomial(&|slot| {
                    if slot < np {
                        Atom::Variable(slot)
                    } else {
                        Atom::Value(int(state[slot - np]))
                    }
                });
                match edges.iter_mut().find(|(t, _)| *t == target) {
                    Some((_, q)) => *q = q.add(&p),
                    None => edges.push((target, p)),
                }
            }
            let mut row = Vec::new();
            for (target, p) in edges {
                if p.is_zero() {
                    continue;
                }
                let normal = p.normalized();
                let factor = leading(&p).abs();
                let id = *poly_ids.entry(normal.clone()).or_insert_with(|| {
                    polys.push(normal);
                    polys.len() - 1
                });
                row.push((explorer.index_of(target)?, id, factor));
            }
            rows.push(row);
            next += 1;
        }
        let notes = Annotations::compute(m, &explorer.states, 0);
        Ok(ParametricStructure {
            states: explorer.states,
            initial: explorer.initial,
            rows,
            polys,
            notes,
            num_parameters: np,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn edge_polynomials(&self) -> &[Polynomial] {
        &self.polys
    }

    fn check_values(&self, u: &[Rational]) -> Result<Vec<Rational>, ModelError> {
        if u.len() != self.num_parameters {
            return Err(ModelError::Dimension {
                expected: self.num_parameters,
                got: u.len(),
            });
        }
        let values: Vec<Rational> = self.polys.iter().map(|p| p.evaluate(u)).collect();
        for (p, v) in self.polys.iter().zip(&values) {
            if !v.is_positive() {
                return Err(ModelError::NotGraphPreserving(format!(
                    "edge rate {} evaluates to {}",
                    describe(p),
                    crate::expr::format_decimal(v)
                )));
            }
        }
        Ok(values)
    }

    pub fn check(&self, u: &[Rational]) -> GraphCheck {
        match self.check_values(u) {
            Ok(_) => GraphCheck {
                ok: true,
                reason: None,
            },
            Err(e) => GraphCheck {
                ok: false,
                reason: Some(e.to_string()),
            },
        }
    }

    /// Concrete CTMC at `u`; identical to [`super::build_full`] for every
    /// graph-preserving valuation.
    pub fn instantiate<T: Real>(&self, u: &[Rational]) -> Result<ConcreteCtmc<T>, ModelError> {
        let values = self.check_values(u)?;
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(t, id, factor)| (*t, factor * &values[*id]))
                    .collect()
            })
            .collect();
        Ok(ConcreteCtmc::assemble(
            self.states.clone(),
            &self.initial,
            rows,
            &self.notes,
        ))
    }
}

fn leading(p: &Polynomial) -> Rational {
    p.terms()
        .last()
        .map(|(_, c)| c.clone())
        .unwrap_or_else(Rational::zero)
}

fn describe(p: &Polynomial) -> String {
    let terms: Vec<String> = p
        .terms()
        .map(|(mono, c)| {
            let mut s = crate::expr::format_decimal(c);
            for (v, e) in mono {
                s.push_str(&format!("*p{v}"));
                if *e > 1 {
                    s.push_str(&format!("^{e}"));
                }
            }
            s
        })
        .collect();
    terms.join(" + ")
}

/// True iff every symbolically nonzero edge rate is positive at `u`.
pub fn check_graph_preserving(m: &ParametricCtmc, u: &[Rational]) -> GraphCheck {
    match m.structure() {
        Ok(s) => s.check(u),
        Err(e) => GraphCheck {
            ok: false,
            reason: Some(e.to_string()),
        },
    }
}
