use std::collections::HashMap;

use num_traits::{Signed, Zero};

use super::ctmc::Annotations;
use super::{ConcreteCtmc, ModelError, ParametricCtmc, State};
use crate::scalar::{int, to_i64_exact, Rational, Real};

pub const DEFAULT_STATE_CAP: usize = 10_000_000;

impl ParametricCtmc {
    /// Targets of the enabled commands of `state`, one entry per command, in
    /// command order.
    pub(crate) fn moves(&self, state: &[i64]) -> Result<Vec<(usize, State)>, ModelError> {
        let slots: Vec<Rational> = state.iter().map(|&v| int(v)).collect();
        let mut out = Vec::new();
        for (k, c) in self.commands.iter().enumerate() {
            if !c.guard_c.eval(&slots) {
                continue;
            }
            let mut next = state.to_vec();
            for (var, e) in &c.updates_c {
                let value = e.eval(&slots);
                let decl = &self.variables[*var];
                match to_i64_exact(&value) {
                    Some(v) if v >= decl.min && v <= decl.max => next[*var] = v,
                    _ => {
                        return Err(ModelError::UpdateOutOfBounds {
                            var: decl.name.clone(),
                            value: crate::expr::format_decimal(&value),
                            min: decl.min,
                            max: decl.max,
                            state: state.to_vec(),
                        })
                    }
                }
            }
            out.push((k, next));
        }
        Ok(out)
    }

    /// Exact outgoing rates of `state` at valuation `u`, parallel commands
    /// summed, targets in order of first appearance, zero sums dropped.
    pub(crate) fn successors(
        &self,
        u: &[Rational],
        state: &[i64],
    ) -> Result<Vec<(State, Rational)>, ModelError> {
        let mut slots: Vec<Rational> = u.to_vec();
        slots.extend(state.iter().map(|&v| int(v)));
        let mut out: Vec<(State, Rational)> = Vec::new();
        for (k, next) in self.moves(state)? {
            let rate = self.commands[k].rate_c.eval(&slots);
            match out.iter_mut().find(|(t, _)| *t == next) {
                Some((_, r)) => *r += rate,
                None => out.push((next, rate)),
            }
        }
        for (t, r) in &out {
            if r.is_negative() {
                return Err(ModelError::NotGraphPreserving(format!(
                    "rate {} from {:?} to {:?}",
                    crate::expr::format_decimal(r),
                    state,
                    t
                )));
            }
        }
        out.retain(|(_, r)| !r.is_zero());
        Ok(out)
    }
}

/// Instantiates `u` and explores the reachable state space breadth-first.
pub fn build_full<T: Real>(
    m: &ParametricCtmc,
    u: &[Rational],
) -> Result<ConcreteCtmc<T>, ModelError> {
    build_full_capped(m, u, DEFAULT_STATE_CAP)
}

pub fn build_full_capped<T: Real>(
    m: &ParametricCtmc,
    u: &[Rational],
    cap: usize,
) -> Result<ConcreteCtmc<T>, ModelError> {
    m.check_dimension(u)?;
    let mut explorer = Explorer::new(m, cap)?;
    let mut rows = Vec::new();
    let mut next = 0;
    while next < explorer.states.len() {
        let succ = m.successors(u, &explorer.states[next])?;
        let mut row = Vec::with_capacity(succ.len());
        for (t, r) in succ {
            row.push((explorer.index_of(t)?, r));
        }
        rows.push(row);
        next += 1;
    }
    let notes = Annotations::compute(m, &explorer.states, 0);
    Ok(ConcreteCtmc::assemble(
        explorer.states,
        &explorer.initial,
        rows,
        &notes,
    ))
}

pub(crate) struct Explorer {
    pub states: Vec<State>,
    pub index: HashMap<State, usize>,
    pub initial: Vec<(usize, Rational)>,
    cap: usize,
}

impl Explorer {
    pub fn new(m: &ParametricCtmc, cap: usize) -> Result<Self, ModelError> {
        let mut e = Explorer {
            states: Vec::new(),
            index: HashMap::new(),
            initial: Vec::new(),
            cap,
        };
        for (s, p) in &m.initial {
            let i = e.index_of(s.clone())?;
            e.initial.push((i, p.clone()));
        }
        Ok(e)
    }

    pub fn index_of(&mut self, s: State) -> Result<usize, ModelError> {
        if let Some(&i) = self.index.get(&s) {
            return Ok(i);
        }
        if self.states.len() >= self.cap {
            return Err(ModelError::StateCap(self.cap));
        }
        let i = self.states.len();
        self.index.insert(s.clone(), i);
        self.states.push(s);
        Ok(i)
    }
}
