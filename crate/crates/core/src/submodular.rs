//! Exact-rational value oracles and property checkers.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ground::{ElementId, ElementSet, Rng};
use crate::matching::LayerGraph;
use crate::num::{int, min_power_at_least, Rational};

pub trait ValueOracle: fmt::Debug + Send + Sync {
    fn ground_size(&self) -> usize;

    /// Value without bounds validation.
    fn eval(&self, set: &ElementSet) -> Rational;

    /// Whether the function is claimed monotone.
    fn is_monotone(&self) -> bool;

    fn value(&self, set: &ElementSet) -> Result<Rational> {
        set.check_bounds(self.ground_size())?;
        Ok(self.eval(set))
    }
}

pub type ValueRef = Arc<dyn ValueOracle>;

/// `f(u | S)`; fails if `u` is already in `S`.
pub fn marginal(f: &dyn ValueOracle, u: ElementId, set: &ElementSet) -> Result<Rational> {
    if set.contains(u) {
        return Err(Error::AlreadyPresent(u));
    }
    let with = crate::ground::set_insert(set, u, f.ground_size())?;
    Ok(f.value(&with)? - f.value(set)?)
}

#[derive(Clone, Debug)]
pub struct Cardinality {
    pub ground_size: usize,
}

impl ValueOracle for Cardinality {
    fn ground_size(&self) -> usize {
        self.ground_size
    }

    fn eval(&self, set: &ElementSet) -> Rational {
        int(set.len() as i64)
    }

    fn is_monotone(&self) -> bool {
        true
    }
}

/// Weighted coverage: element `u` covers the items `covers[u]`.
#[derive(Clone, Debug)]
pub struct Coverage {
    covers: Vec<Vec<u32>>,
    weights: Vec<Rational>,
}

impl Coverage {
    pub fn new(covers: Vec<Vec<u32>>, weights: Vec<Rational>) -> Result<Self> {
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidParameter("negative coverage weight".into()));
        }
        if covers.iter().flatten().any(|&i| i as usize >= weights.len()) {
            return Err(Error::InvalidParameter("covered item without a weight".into()));
        }
        Ok(Coverage { covers, weights })
    }

    pub fn covers(&self) -> &[Vec<u32>] {
        &self.covers
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }
}

impl ValueOracle for Coverage {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn eval(&self, set: &ElementSet) -> Rational {
        let mut items: Vec<u32> = set.iter().flat_map(|u| self.covers[u as usize].iter().copied()).collect();
        items.sort_unstable();
        items.dedup();
        items.into_iter().map(|i| &self.weights[i as usize]).sum()
    }

    fn is_monotone(&self) -> bool {
        true
    }
}

/// Weighted cut function over graph vertices: total weight of edges with
/// exactly one endpoint in the set. Non-negative, submodular, not monotone.
#[derive(Clone, Debug)]
pub struct Cut {
    vertices: usize,
    edges: Vec<(u32, u32, Rational)>,
}

impl Cut {
    pub fn new(vertices: usize, edges: Vec<(u32, u32, Rational)>) -> Result<Self> {
        for (a, b, w) in &edges {
            if *a as usize >= vertices || *b as usize >= vertices {
                return Err(Error::InvalidParameter(format!("edge ({a}, {b}) outside {vertices} vertices")));
            }
            if w.is_negative() {
                return Err(Error::InvalidParameter("negative cut weight".into()));
            }
        }
        Ok(Cut { vertices, edges })
    }

    pub fn edges(&self) -> &[(u32, u32, Rational)] {
        &self.edges
    }
}

impl ValueOracle for Cut {
    fn ground_size(&self) -> usize {
        self.vertices
    }

    fn eval(&self, set: &ElementSet) -> Rational {
        self.edges.iter().filter(|(a, b, _)| set.contains(*a) != set.contains(*b)).map(|(_, _, w)| w).sum()
    }

    fn is_monotone(&self) -> bool {
        false
    }
}

/// Per-layer statistics of a query set, after clamping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerStats {
    pub s: Rational,
    pub s_not_o: Rational,
}

impl LayerStats {
    /// `s = min(1, count/m)`; the non-`o` share is what remains of `s` after the
    /// `o`-indexed copies are taken out, floored at zero. Below saturation this is
    /// exactly `count_not_o/m`.
    pub fn new(count: usize, count_o: usize, m: &Rational) -> Self {
        let one = Rational::one();
        let s = (int(count as i64) / m).min(one);
        let s_not_o = (&s - int(count_o as i64) / m).max(Rational::zero());
        LayerStats { s, s_not_o }
    }
}

/// The layered hard family: layer `i` has ground elements `(edge, copy)` for every
/// edge of `G_i` and copy index `1..=n`; `o_i` marks the copy index whose edges
/// cover only their own layer.
#[derive(Clone, Debug)]
pub struct ChainFamilyFn {
    layers: Vec<LayerGraph>,
    copies: u32,
    eps: Rational,
    o: Vec<u32>,
    m: Vec<Rational>,
    offsets: Vec<u32>,
}

/// Location of a ground element inside the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeCopy {
    /// 1-based layer.
    pub layer: usize,
    pub edge: usize,
    /// 1-based copy index.
    pub copy: u32,
}

impl ChainFamilyFn {
    pub fn new(layers: Vec<LayerGraph>, copies: u32, eps: Rational, o: Vec<u32>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("chain family needs at least one layer".into()));
        }
        if copies == 0 {
            return Err(Error::InvalidParameter("copy count must be positive".into()));
        }
        if !eps.is_positive() {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if o.len() != layers.len() || o.iter().any(|&j| j == 0 || j > copies) {
            return Err(Error::InvalidParameter(format!("need {} indices in 1..={copies}", layers.len())));
        }
        let base = Rational::one() + &eps;
        let m = layers
            .iter()
            .map(|g| {
                let nu = int(g.matching_size().max(1) as i64);
                let t = min_power_at_least(&base, &nu);
                num_traits::pow(base.clone(), t as usize)
            })
            .collect();
        let mut offsets = Vec::with_capacity(layers.len() + 1);
        let mut acc = 0u32;
        for g in &layers {
            offsets.push(acc);
            acc += g.edges().len() as u32 * copies;
        }
        offsets.push(acc);
        Ok(ChainFamilyFn { layers, copies, eps, o, m, offsets })
    }

    /// Same layers and copies, different hidden indices.
    pub fn with_indices(&self, o: Vec<u32>) -> Result<Self> {
        if o.len() != self.layers.len() || o.iter().any(|&j| j == 0 || j > self.copies) {
            return Err(Error::InvalidParameter("bad index vector".into()));
        }
        Ok(ChainFamilyFn { o, ..self.clone() })
    }

    pub fn p(&self) -> usize {
        self.layers.len()
    }

    pub fn copies(&self) -> u32 {
        self.copies
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn indices(&self) -> &[u32] {
        &self.o
    }

    pub fn layers(&self) -> &[LayerGraph] {
        &self.layers
    }

    /// `m_i` for 1-based layer `i`.
    pub fn layer_scale(&self, i: usize) -> &Rational {
        &self.m[i - 1]
    }

    /// Ids of layer `i` (1-based).
    pub fn layer_range(&self, i: usize) -> std::ops::Range<ElementId> {
        self.offsets[i - 1]..self.offsets[i]
    }

    pub fn element(&self, layer: usize, edge: usize, copy: u32) -> ElementId {
        self.offsets[layer - 1] + edge as u32 * self.copies + (copy - 1)
    }

    pub fn decode(&self, u: ElementId) -> EdgeCopy {
        let layer = self.offsets.partition_point(|&off| off <= u);
        let local = u - self.offsets[layer - 1];
        EdgeCopy { layer, edge: (local / self.copies) as usize, copy: local % self.copies + 1 }
    }

    /// One pass over `S` accumulating two counters per layer, then a right fold.
    pub fn streaming_value(&self, set: &ElementSet) -> Rational {
        let p = self.p();
        let mut count = vec![0usize; p];
        let mut count_o = vec![0usize; p];
        for u in set.iter() {
            let loc = self.decode(u);
            count[loc.layer - 1] += 1;
            if loc.copy == self.o[loc.layer - 1] {
                count_o[loc.layer - 1] += 1;
            }
        }
        let mut acc = Rational::zero();
        for i in (1..=p).rev() {
            let st = LayerStats::new(count[i - 1], count_o[i - 1], &self.m[i - 1]);
            acc = fold_step(p, i, &st, &acc);
        }
        acc
    }

    /// Direct transcription of the recursive definition, restricting the set to
    /// the suffix of layers at every level.
    pub fn recursive_value(&self, set: &ElementSet) -> Rational {
        self.recurse(1, set)
    }

    fn recurse(&self, i: usize, set: &ElementSet) -> Rational {
        let p = self.p();
        let range = self.layer_range(i);
        let in_layer: Vec<EdgeCopy> = set.iter().filter(|u| range.contains(u)).map(|u| self.decode(u)).collect();
        let count_o = in_layer.iter().filter(|l| l.copy == self.o[i - 1]).count();
        let st = LayerStats::new(in_layer.len(), count_o, &self.m[i - 1]);
        if i == p {
            return st.s.min(Rational::one());
        }
        let suffix: ElementSet = set.iter().filter(|&u| u >= range.end).collect();
        fold_step(p, i, &st, &self.recurse(i + 1, &suffix))
    }

    pub fn layer_stats(&self, set: &ElementSet, i: usize) -> LayerStats {
        let range = self.layer_range(i);
        let locs: Vec<EdgeCopy> = set.iter().filter(|u| range.contains(u)).map(|u| self.decode(u)).collect();
        let count_o = locs.iter().filter(|l| l.copy == self.o[i - 1]).count();
        LayerStats::new(locs.len(), count_o, &self.m[i - 1])
    }

    /// Random set whose edges in every layer form a matching of that layer.
    pub fn sample_matching_set(&self, rng: &mut Rng) -> ElementSet {
        let mut out = ElementSet::new();
        for (li, g) in self.layers.iter().enumerate() {
            let mut order: Vec<usize> = (0..g.edges().len()).collect();
            rng.shuffle(&mut order);
            let mut chosen: Vec<usize> = Vec::new();
            for e in order {
                chosen.push(e);
                if !g.is_matching(&chosen) || rng.coin() {
                    chosen.pop();
                }
            }
            for e in chosen {
                out.insert(self.element(li + 1, e, 1 + rng.below(self.copies as u64) as u32));
            }
        }
        out
    }

    /// Random set with at most `floor(m_i)` elements in each layer.
    pub fn sample_bounded_set(&self, rng: &mut Rng) -> ElementSet {
        let mut out = ElementSet::new();
        for i in 1..=self.p() {
            let cap = crate::num::ceil(&self.m[i - 1]);
            let cap: usize = cap.try_into().unwrap_or(usize::MAX);
            let mut ids: Vec<ElementId> = self.layer_range(i).collect();
            rng.shuffle(&mut ids);
            let take = rng.index(cap.min(ids.len()) + 1);
            let take = if int(take as i64) > self.m[i - 1] { take - 1 } else { take };
            out = out.union(&ids[..take].iter().copied().collect());
        }
        out
    }
}

fn fold_step(p: usize, i: usize, st: &LayerStats, inner: &Rational) -> Rational {
    let cap = int((p + 1 - i) as i64);
    if i == p {
        return st.s.clone().min(cap);
    }
    let keep = Rational::one() - &st.s_not_o / &cap;
    (&st.s + keep * inner).min(cap)
}

impl ValueOracle for ChainFamilyFn {
    fn ground_size(&self) -> usize {
        *self.offsets.last().expect("non-empty") as usize
    }

    fn eval(&self, set: &ElementSet) -> Rational {
        self.streaming_value(set)
    }

    fn is_monotone(&self) -> bool {
        true
    }
}

/// A violated inequality: for monotonicity `(A, B, None)` with `f(A) > f(B)`;
/// for submodularity `(A, B, Some(u))` with `f(u|A) < f(u|B)`.
#[derive(Clone, Debug)]
pub struct Violation {
    pub a: ElementSet,
    pub b: ElementSet,
    pub u: Option<ElementId>,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Clone, Debug, Default)]
pub struct PropertyReport {
    pub trials: usize,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
}

impl PropertyReport {
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }

    fn record(&mut self, v: Violation) {
        self.violation_count += 1;
        if self.violations.len() < 8 {
            self.violations.push(v);
        }
    }
}

pub fn random_subset(set: &ElementSet, rng: &mut Rng) -> ElementSet {
    set.iter().filter(|_| rng.coin()).collect()
}

pub fn uniform_sampler(ground_size: usize) -> impl FnMut(&mut Rng) -> ElementSet {
    move |rng| (0..ground_size as ElementId).filter(|_| rng.coin()).collect()
}

/// Samples nested pairs `A ⊆ B ⊆ W` with `W` from the uniform sampler.
pub fn check_monotone(f: &dyn ValueOracle, trials: usize, rng: &mut Rng) -> PropertyReport {
    check_monotone_with(f, trials, rng, uniform_sampler(f.ground_size()))
}

pub fn check_monotone_with(
    f: &dyn ValueOracle,
    trials: usize,
    rng: &mut Rng,
    mut sample: impl FnMut(&mut Rng) -> ElementSet,
) -> PropertyReport {
    let mut report = PropertyReport { trials, ..Default::default() };
    for _ in 0..trials {
        let b = sample(rng);
        let a = random_subset(&b, rng);
        let (fa, fb) = (f.eval(&a), f.eval(&b));
        if fa > fb {
            report.record(Violation { a, b, u: None, lhs: fa, rhs: fb });
        }
    }
    report
}

pub fn check_submodular(f: &dyn ValueOracle, trials: usize, rng: &mut Rng) -> PropertyReport {
    check_submodular_with(f, trials, rng, uniform_sampler(f.ground_size()))
}

/// `sample` draws a universe `W`; the triple is `u ∈ W`, `B ⊆ W - u`, `A ⊆ B`.
pub fn check_submodular_with(
    f: &dyn ValueOracle,
    trials: usize,
    rng: &mut Rng,
    mut sample: impl FnMut(&mut Rng) -> ElementSet,
) -> PropertyReport {
    let mut report = PropertyReport { trials, ..Default::default() };
    let mut done = 0;
    while done < trials {
        let w = sample(rng);
        if w.is_empty() {
            continue;
        }
        done += 1;
        let u = w.as_slice()[rng.index(w.len())];
        let b = random_subset(&w.without(u), rng);
        let a = random_subset(&b, rng);
        let gain_a = f.eval(&a.with(u)) - f.eval(&a);
        let gain_b = f.eval(&b.with(u)) - f.eval(&b);
        if gain_a < gain_b {
            report.record(Violation { a, b, u: Some(u), lhs: gain_a, rhs: gain_b });
        }
    }
    report
}

pub fn check_non_negative(f: &dyn ValueOracle, trials: usize, rng: &mut Rng) -> PropertyReport {
    let mut report = PropertyReport { trials, ..Default::default() };
    let mut sample = uniform_sampler(f.ground_size());
    for _ in 0..trials {
        let s = sample(rng);
        let v = f.eval(&s);
        if v.is_negative() {
            report.record(Violation { a: s.clone(), b: s, u: None, lhs: v, rhs: Rational::zero() });
        }
    }
    report
}

/// Result of checking one of the family's structural bounds on a concrete set.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub set: ElementSet,
    pub value: Rational,
    pub bound: Rational,
    pub holds: bool,
}

/// Two members sharing `o_1..o_{i-1}` agree on every subset of `N_{<=i}`.
pub fn check_restriction_identity(
    f: &ChainFamilyFn,
    g: &ChainFamilyFn,
    i: usize,
    queries: usize,
    rng: &mut Rng,
) -> Result<PropertyReport> {
    if f.layers != g.layers || f.copies != g.copies || f.eps != g.eps {
        return Err(Error::PremiseViolated("family members differ in structure".into()));
    }
    if i == 0 || i > f.p() {
        return Err(Error::IndexOutOfRange { index: i, max: f.p() });
    }
    if f.o[..i - 1] != g.o[..i - 1] {
        return Err(Error::PremiseViolated(format!("indices differ before layer {i}")));
    }
    let end = f.layer_range(i).end;
    let mut report = PropertyReport { trials: queries, ..Default::default() };
    for _ in 0..queries {
        let s: ElementSet = (0..end).filter(|_| rng.coin()).collect();
        let (a, b) = (f.eval(&s), g.eval(&s));
        if a != b {
            report.record(Violation { a: s.clone(), b: s, u: None, lhs: a, rhs: b });
        }
    }
    Ok(report)
}

/// The `o`-indexed copies of one maximum matching per layer reach `p/(1+eps)`.
pub fn check_matching_lower_bound(f: &ChainFamilyFn) -> BoundCheck {
    let mut set = ElementSet::new();
    for (li, g) in f.layers.iter().enumerate() {
        for e in g.max_matching() {
            set.insert(f.element(li + 1, e, f.o[li]));
        }
    }
    let value = f.eval(&set);
    let bound = int(f.p() as i64) / (Rational::one() + &f.eps);
    BoundCheck { holds: value >= bound, set, value, bound }
}

/// Sets avoiding every `o` index with at most `m_i/alpha` elements per layer
/// stay below `1 + p/(alpha+1)`.
pub fn check_no_case_upper_bound(f: &ChainFamilyFn, alpha: &Rational, set: &ElementSet) -> Result<BoundCheck> {
    if *alpha <= Rational::one() {
        return Err(Error::InvalidParameter("alpha must exceed 1".into()));
    }
    set.check_bounds(f.ground_size())?;
    for i in 1..=f.p() {
        let range = f.layer_range(i);
        let locs: Vec<EdgeCopy> = set.iter().filter(|u| range.contains(u)).map(|u| f.decode(u)).collect();
        if locs.iter().any(|l| l.copy == f.o[i - 1]) {
            return Err(Error::PremiseViolated(format!("layer {i} contains an o-indexed element")));
        }
        if int(locs.len() as i64) * alpha > f.m[i - 1] {
            return Err(Error::PremiseViolated(format!("layer {i} holds more than m_i/alpha elements")));
        }
    }
    let value = f.eval(set);
    let bound = Rational::one() + int(f.p() as i64) / (alpha + Rational::one());
    Ok(BoundCheck { holds: value < bound, set: set.clone(), value, bound })
}
