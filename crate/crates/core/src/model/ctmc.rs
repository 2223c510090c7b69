use std::collections::BTreeMap;

use num_traits::Zero;

use super::{ParametricCtmc, State};
use crate::scalar::{Rational, Real};

/// Label sets and exact state rewards of an explored state list.
#[derive(Debug, Clone, Default)]
pub(crate) struct Annotations {
    pub labels: BTreeMap<String, Vec<bool>>,
    pub rewards: BTreeMap<String, Vec<Rational>>,
}

impl Annotations {
    /// The trailing `extra` states (the sink of a partial model) satisfy no
    /// label and earn no reward.
    pub fn compute(model: &ParametricCtmc, states: &[State], extra: usize) -> Self {
        let modelled = states.len() - extra;
        let labels = model
            .labels
            .iter()
            .enumerate()
            .map(|(k, l)| {
                let set = (0..states.len())
                    .map(|i| i < modelled && model.label_holds(k, &states[i]))
                    .collect();
                (l.name.clone(), set)
            })
            .collect();
        let rewards = model
            .rewards
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let v = (0..states.len())
                    .map(|i| {
                        if i < modelled {
                            model.reward_value(k, &states[i])
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect();
                (r.name.clone(), v)
            })
            .collect();
        Annotations { labels, rewards }
    }
}

/// Explicit CTMC in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteCtmc<T = f64> {
    pub states: Vec<State>,
    pub initial: Vec<(usize, T)>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    rates: Vec<T>,
    pub exit_rates: Vec<T>,
    pub label_sets: BTreeMap<String, Vec<bool>>,
    pub reward_vectors: BTreeMap<String, Vec<T>>,
}

impl<T: Real> ConcreteCtmc<T> {
    /// Assembles a chain from exact per-row edge lists. Rows must not contain
    /// duplicate targets and every rate must be positive.
    pub(crate) fn assemble(
        states: Vec<State>,
        initial: &[(usize, Rational)],
        rows: Vec<Vec<(usize, Rational)>>,
        notes: &Annotations,
    ) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut rates = Vec::new();
        let mut exit_rates = Vec::with_capacity(rows.len());
        row_ptr.push(0);
        for row in rows {
            let mut exit = T::zero();
            for (t, r) in row {
                let r = T::from_rational(&r);
                exit = exit + r;
                cols.push(t);
                rates.push(r);
            }
            exit_rates.push(exit);
            row_ptr.push(cols.len());
        }
        ConcreteCtmc {
            states,
            initial: initial
                .iter()
                .map(|(s, p)| (*s, T::from_rational(p)))
                .collect(),
            row_ptr,
            cols,
            rates,
            exit_rates,
            label_sets: notes.labels.clone(),
            reward_vectors: notes
                .rewards
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(T::from_rational).collect()))
                .collect(),
        }
    }

    /// Builds a chain directly from float rates; used by tests and examples.
    pub fn from_rates(n: usize, initial: Vec<(usize, T)>, edges: &[(usize, usize, T)]) -> Self {
        let mut rows: Vec<BTreeMap<usize, T>> = vec![BTreeMap::new(); n];
        for &(s, t, r) in edges {
            assert!(r > T::zero(), "rates must be positive");
            let e = rows[s].entry(t).or_insert_with(T::zero);
            *e = *e + r;
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut rates = Vec::new();
        let mut exit_rates = Vec::new();
        for row in rows {
            let mut exit = T::zero();
            for (t, r) in row {
                cols.push(t);
                rates.push(r);
                exit = exit + r;
            }
            exit_rates.push(exit);
            row_ptr.push(cols.len());
        }
        ConcreteCtmc {
            states: (0..n as i64).map(|i| vec![i]).collect(),
            initial,
            row_ptr,
            cols,
            rates,
            exit_rates,
            label_sets: BTreeMap::new(),
            reward_vectors: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, name: &str, set: Vec<bool>) -> Self {
        assert_eq!(set.len(), self.num_states());
        self.label_sets.insert(name.to_string(), set);
        self
    }

    pub fn with_reward(mut self, name: &str, values: Vec<T>) -> Self {
        assert_eq!(values.len(), self.num_states());
        self.reward_vectors.insert(name.to_string(), values);
        self
    }
}

impl<T: Copy> ConcreteCtmc<T> {
    pub fn num_states(&self) -> usize {
        self.exit_rates.len()
    }

    /// Stored transitions, self-loops included.
    pub fn num_transitions(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, s: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.row_ptr[s]..self.row_ptr[s + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.rates[range].iter().copied())
    }

    pub fn label(&self, name: &str) -> Option<&[bool]> {
        self.label_sets.get(name).map(|v| v.as_slice())
    }

    pub fn reward(&self, name: &str) -> Option<&[T]> {
        self.reward_vectors.get(name).map(|v| v.as_slice())
    }
}
