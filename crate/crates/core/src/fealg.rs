//! The first-element marking procedure.
//!
//! A state is a tuple of `k` sets, the `i`-th independent in `M_i`. An arriving
//! element that fits into every set of a state is marked, and the state is
//! replaced by the `k` states obtained by adding it to one of the sets.

use crate::error::{Error, Result};
use crate::ground::{ElementId, ElementSet};
use crate::matroids::{CommonOracle, MatroidRef};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateTuple {
    sets: Vec<ElementSet>,
}

impl StateTuple {
    pub fn empty(k: usize) -> Self {
        StateTuple { sets: vec![ElementSet::new(); k] }
    }

    pub fn sets(&self) -> &[ElementSet] {
        &self.sets
    }

    pub fn size(&self) -> usize {
        self.sets.iter().map(ElementSet::len).sum()
    }
}

/// `sum_{t < rho*k} k^t`, saturating at `u128::MAX`.
pub fn fe_mark_bound(k: usize, rho: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for _ in 0..rho.saturating_mul(k) {
        total = total.saturating_add(term);
        term = term.saturating_mul(k as u128);
    }
    total
}

#[derive(Clone, Debug)]
pub struct FeAlg {
    matroids: Vec<MatroidRef>,
    states: Vec<StateTuple>,
    marked: Vec<ElementId>,
    processed: usize,
    mark_budget: u128,
    dedup: bool,
    peak_states: usize,
}

impl FeAlg {
    /// `rho` must bound the rank of every matroid; the budgets derived from it
    /// are asserted on every step.
    pub fn new(matroids: Vec<MatroidRef>, rho: usize) -> Result<Self> {
        if matroids.is_empty() {
            return Err(Error::NoMatroids);
        }
        let k = matroids.len();
        Ok(FeAlg {
            mark_budget: fe_mark_bound(k, rho),
            states: vec![StateTuple::empty(k)],
            matroids,
            marked: Vec::new(),
            processed: 0,
            dedup: false,
            peak_states: 1,
        })
    }

    /// Collapse identical state tuples after every step.
    pub fn with_dedup(mut self, dedup: bool) -> Self {
        self.dedup = dedup;
        self
    }

    pub fn k(&self) -> usize {
        self.matroids.len()
    }

    /// Processes `u` and reports whether at least one state accepted it.
    pub fn process(&mut self, u: ElementId) -> bool {
        self.processed += 1;
        let k = self.k();
        let mut next = Vec::with_capacity(self.states.len());
        let mut accepted = false;
        for s in self.states.drain(..) {
            let grown: Option<Vec<ElementSet>> = s
                .sets
                .iter()
                .zip(&self.matroids)
                .map(|(set, m)| {
                    let g = set.with(u);
                    m.independent(&g).then_some(g)
                })
                .collect();
            match grown {
                Some(grown) => {
                    accepted = true;
                    for (i, g) in grown.into_iter().enumerate() {
                        let mut child = s.clone();
                        child.sets[i] = g;
                        next.push(child);
                    }
                }
                None => next.push(s),
            }
        }
        if self.dedup {
            next.sort_unstable();
            next.dedup();
        }
        self.states = next;
        if accepted {
            self.marked.push(u);
        }
        self.peak_states = self.peak_states.max(self.states.len());
        assert!(
            self.marked.len() as u128 <= self.mark_budget,
            "mark budget exceeded: {} > {}",
            self.marked.len(),
            self.mark_budget
        );
        assert!(
            self.states.len() as u128 <= self.state_budget(),
            "state budget exceeded: {} > {}",
            self.states.len(),
            self.state_budget()
        );
        debug_assert!(self.states.iter().all(|s| s.size() <= self.processed * k));
        accepted
    }

    pub fn marked(&self) -> &[ElementId] {
        &self.marked
    }

    pub fn marked_count(&self) -> usize {
        self.marked.len()
    }

    pub fn processed_count(&self) -> usize {
        self.processed
    }

    pub fn states(&self) -> &[StateTuple] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn peak_states(&self) -> usize {
        self.peak_states
    }

    pub fn mark_budget(&self) -> u128 {
        self.mark_budget
    }

    pub fn state_budget(&self) -> u128 {
        self.mark_budget.saturating_mul(self.k() as u128).saturating_add(1)
    }
}

/// Exhaustively checks the exchange guarantee over every non-empty common
/// independent subset `O` of the processed prefix. Returns the violating sets.
pub fn check_first_element_property(
    matroids: &[MatroidRef],
    processed: &[ElementId],
    marked: &[ElementId],
) -> Result<Vec<ElementSet>> {
    if processed.len() > 12 {
        return Err(Error::TooLarge(processed.len(), 12));
    }
    let oracle = CommonOracle::new(matroids.to_vec())?;
    let position = |u: ElementId| processed.iter().position(|&v| v == u).expect("processed element");
    let mut bad = Vec::new();
    for mask in 1u32..(1 << processed.len()) {
        let o: ElementSet = (0..processed.len()).filter(|i| mask >> i & 1 == 1).map(|i| processed[i]).collect();
        if !oracle.independent(&o) {
            continue;
        }
        let first = processed[mask.trailing_zeros() as usize];
        let rest = o.without(first);
        let ok = marked.iter().any(|&u| position(u) <= position(first) && oracle.independent(&rest.with(u)));
        if !ok {
            bad.push(o);
        }
    }
    Ok(bad)
}
