//! Ground-truth optimum by exhaustive search and the streaming greedy baseline.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::ground::{ElementId, ElementSet, Stream};
use crate::matroids::{CommonOracle, MatroidRef};
use crate::num::Rational;
use crate::submodular::ValueOracle;

/// Largest ground set the exhaustive search accepts.
pub const EXACT_GROUND_LIMIT: usize = 64;
/// Visited feasible sets before the search gives up.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 24;

/// Maximizes `value` over feasible subsets of `candidates`, visiting each
/// feasible set once and never extending an infeasible one. Ties go to the
/// lexicographically smallest set.
pub fn max_feasible_subset(
    candidates: &[ElementId],
    feasible: &dyn Fn(&ElementSet) -> bool,
    value: &dyn Fn(&ElementSet) -> Rational,
    node_budget: u64,
) -> Result<(ElementSet, Rational)> {
    let mut items = candidates.to_vec();
    items.sort_unstable();
    items.dedup();
    let empty = ElementSet::new();
    let mut best = (empty.clone(), value(&empty));
    let mut visited = 0u64;
    let mut stack: Vec<(usize, ElementSet)> = vec![(0, empty)];
    while let Some((start, set)) = stack.pop() {
        for idx in (start..items.len()).rev() {
            let grown = set.with(items[idx]);
            if !feasible(&grown) {
                continue;
            }
            visited += 1;
            if visited > node_budget {
                return Err(Error::SearchBudgetExhausted(node_budget));
            }
            let v = value(&grown);
            if v > best.1 || (v == best.1 && grown < best.0) {
                best = (grown.clone(), v);
            }
            stack.push((idx + 1, grown));
        }
    }
    Ok(best)
}

/// Optimum of `f` over common independent sets of the first `n` elements.
pub fn brute_force_opt(f: &dyn ValueOracle, matroids: &[MatroidRef], n: usize) -> Result<(ElementSet, Rational)> {
    brute_force_opt_with_budget(f, matroids, n, DEFAULT_NODE_BUDGET)
}

pub fn brute_force_opt_with_budget(
    f: &dyn ValueOracle,
    matroids: &[MatroidRef],
    n: usize,
    node_budget: u64,
) -> Result<(ElementSet, Rational)> {
    if n > EXACT_GROUND_LIMIT {
        return Err(Error::TooLarge(n, EXACT_GROUND_LIMIT));
    }
    let oracle = CommonOracle::new(matroids.to_vec())?;
    if n > oracle.ground_size() || n > f.ground_size() {
        return Err(Error::InvalidParameter(format!("n = {n} exceeds the ground set")));
    }
    let candidates: Vec<ElementId> = (0..n as ElementId).collect();
    max_feasible_subset(&candidates, &|s| oracle.independent(s), &|s| f.eval(s), node_budget)
}

/// Adds every arriving element that keeps the set common independent. With an
/// objective and `require_non_negative`, elements with a negative marginal are skipped.
pub fn streaming_greedy(
    stream: &Stream,
    oracle: &CommonOracle,
    objective: Option<&dyn ValueOracle>,
    require_non_negative: bool,
) -> ElementSet {
    let mut out = ElementSet::new();
    let mut current = objective.map(|f| f.eval(&out));
    for u in stream.cursor() {
        let grown = out.with(u);
        if !oracle.independent(&grown) {
            continue;
        }
        if let (Some(f), Some(cur), true) = (objective, current.as_mut(), require_non_negative) {
            let v = f.eval(&grown);
            if (&v - &*cur).is_negative() {
                continue;
            }
            *cur = v;
        }
        out = grown;
    }
    out
}
