use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

use super::build::{Explorer, DEFAULT_STATE_CAP};
use super::ctmc::Annotations;
use super::{ConcreteCtmc, ModelError, ParametricCtmc, State};
use crate::scalar::{rational_to_f64, Rational, Real};

/// States kept by a partial exploration, in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct RetainedSet {
    pub states: Vec<State>,
    pub delta: f64,
}

/// Truncated CTMC: the retained states followed by one absorbing sink that
/// collects all transitions leaving the retained set.
#[derive(Debug, Clone)]
pub struct PartialCtmc<T = f64> {
    pub ctmc: ConcreteCtmc<T>,
    pub sink: usize,
    pub retained: Arc<RetainedSet>,
    pub delta: f64,
    /// Cluster the retained set was computed for, if shared.
    pub origin: Option<usize>,
}

impl<T: Copy> PartialCtmc<T> {
    /// True iff some retained state has a transition into the sink.
    pub fn sink_reachable(&self) -> bool {
        (0..self.sink).any(|s| self.ctmc.row(s).any(|(t, _)| t == self.sink))
    }
}

#[derive(PartialEq)]
struct Entry {
    estimate: f64,
    seq: usize,
    id: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.estimate
            .total_cmp(&other.estimate)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Builds a partial model at `u`. States are explored best-first by the
/// largest product of embedded-chain branch probabilities along any path
/// from the initial distribution; a state is kept iff it lies in the initial
/// support or that estimate exceeds `delta`. With `reuse`, exactly the given
/// states are kept (plus any missing initial states).
pub fn build_partial<T: Real>(
    m: &ParametricCtmc,
    u: &[Rational],
    delta: f64,
    reuse: Option<&Arc<RetainedSet>>,
) -> Result<PartialCtmc<T>, ModelError> {
    m.check_dimension(u)?;
    let (retained, mut cache) = match reuse {
        Some(r) => {
            let mut states = r.states.clone();
            for (s, _) in &m.initial {
                if !states.contains(s) {
                    states.push(s.clone());
                }
            }
            let set = if states.len() == r.states.len() {
                r.clone()
            } else {
                Arc::new(RetainedSet {
                    states,
                    delta: r.delta,
                })
            };
            (set, HashMap::new())
        }
        None => {
            let (states, cache) = explore(m, u, delta)?;
            (Arc::new(RetainedSet { states, delta }), cache)
        }
    };

    let index: HashMap<&State, usize> = retained
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let sink = retained.states.len();
    let mut rows = Vec::with_capacity(sink + 1);
    for s in &retained.states {
        let succ = match cache.remove(s) {
            Some(v) => v,
            None => m.successors(u, s)?,
        };
        let mut row: Vec<(usize, Rational)> = Vec::new();
        let mut lost: Option<Rational> = None;
        for (t, r) in succ {
            match index.get(&t) {
                Some(&j) => row.push((j, r)),
                None => {
                    lost = Some(match lost {
                        Some(acc) => acc + r,
                        None => r,
                    })
                }
            }
        }
        if let Some(r) = lost {
            row.push((sink, r));
        }
        rows.push(row);
    }
    rows.push(Vec::new());

    let initial: Vec<(usize, Rational)> = m
        .initial
        .iter()
        .map(|(s, p)| (index[s], p.clone()))
        .collect();
    let mut states = retained.states.clone();
    states.push(Vec::new());
    let notes = Annotations::compute(m, &states, 1);
    Ok(PartialCtmc {
        ctmc: ConcreteCtmc::assemble(states, &initial, rows, &notes),
        sink,
        retained,
        delta,
        origin: None,
    })
}

type SuccessorCache = HashMap<State, Vec<(State, Rational)>>;

fn explore(
    m: &ParametricCtmc,
    u: &[Rational],
    delta: f64,
) -> Result<(Vec<State>, SuccessorCache), ModelError> {
    let mut explorer = Explorer::new(m, DEFAULT_STATE_CAP)?;
    let mut best: Vec<f64> = Vec::new();
    let mut done: Vec<bool> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let initial_ids: Vec<usize> = explorer.initial.iter().map(|(i, _)| *i).collect();
    best.resize(explorer.states.len(), 0.0);
    done.resize(explorer.states.len(), false);
    for (i, p) in &explorer.initial {
        let p = rational_to_f64(p);
        if p > best[*i] {
            best[*i] = p;
        }
    }
    for &i in &initial_ids {
        heap.push(Entry {
            estimate: best[i],
            seq,
            id: i,
        });
        seq += 1;
    }

    let mut order: Vec<usize> = initial_ids.clone();
    order.dedup();
    let mut cache = SuccessorCache::new();
    while let Some(Entry { estimate, id, .. }) = heap.pop() {
        if done[id] || estimate < best[id] {
            continue;
        }
        let is_initial = initial_ids.contains(&id);
        if !is_initial && !(estimate > delta) {
            // Every remaining estimate is at most `delta`, so nothing else
            // can be retained; unexpanded initial states are kept regardless.
            break;
        }
        done[id] = true;
        if !is_initial {
            order.push(id);
        }
        let state = explorer.states[id].clone();
        let succ = m.successors(u, &state)?;
        let exit: f64 = succ
            .iter()
            .filter(|(t, _)| *t != state)
            .map(|(_, r)| rational_to_f64(r))
            .sum();
        for (t, r) in &succ {
            if *t == state {
                continue;
            }
            let j = explorer.index_of(t.clone())?;
            if j >= best.len() {
                best.push(0.0);
                done.push(false);
            }
            let q = estimate * rational_to_f64(r) / exit;
            if q > best[j] && !done[j] {
                best[j] = q;
                heap.push(Entry {
                    estimate: q,
                    seq,
                    id: j,
                });
                seq += 1;
            }
        }
        cache.insert(state, succ);
    }
    let states = order.iter().map(|&i| explorer.states[i].clone()).collect();
    Ok((states, cache))
}
