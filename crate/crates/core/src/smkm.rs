//! Guess-forking streaming algorithms for submodular maximization over the
//! intersection of `k` matroids.
//!
//! Every guess is realized by forking. A *waiting* branch `(S, j)` holds a
//! partial solution and the index of its next iteration. When the iteration
//! starts it becomes a *group*: the threshold guess `i(j)` is forked over every
//! bucket, with one set of marking instances per bucket created the first time
//! an element lands in it. The `i(j) = ∞` outcome is the sibling waiting branch
//! `(S, j + 1)`. Marked elements fork new waiting branches `(S + u, j + 1)`.
//!
//! Two waiting branches with the same `(S, j)` behave identically from then on,
//! so they are merged, keeping the lexicographically smaller path. Outputs are
//! compared by value, then by path.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fealg::FeAlg;
use crate::ground::{ElementId, ElementSet, Stream};
use crate::matroids::{contract, full_rank, CommonOracle, MatroidRef};
use crate::num::{ceil, ceil_log2, floor_log2, frac, int, min_power_at_least, pow2, Rational};
use crate::submodular::ValueOracle;

/// One resolved guess along a branch.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    /// The threshold guess for this iteration was `∞`.
    Skip,
    /// Monotone variant: `element` was the chosen mark in `bucket`.
    Pick { bucket: u32, element: ElementId },
    /// Non-monotone variant: the mark was guessed to be the optimum's element.
    Exact { bucket: u32, element: ElementId },
    /// Non-monotone variant: all slots filled when `trigger` arrived and the
    /// random slot choice landed on `element`.
    Slot { bucket: u32, trigger: ElementId, element: ElementId },
    /// Non-monotone variant: stream ended with some slots filled.
    Tail { bucket: u32, element: ElementId },
}

pub type Path = Vec<Step>;

/// Behaviour of the non-monotone variant when the stream ends before every
/// slot of an iteration is filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PartialSlots {
    /// Any already-filled slot may be chosen.
    #[default]
    PickAmongFilled,
    /// The branch is dropped.
    Prune,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Monotone,
    NonMonotone(PartialSlots),
}

/// How many iterations may run and when they start.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Horizon {
    /// Exactly this many iterations, each starting right after the previous one.
    Exact(usize),
    /// Iteration `j` starts once every matroid has rank at least `j` on the
    /// elements seen so far.
    Gated,
}

pub const DEFAULT_BRANCH_CAP: usize = 1 << 20;

#[derive(Clone, Debug)]
pub struct GuessConfig {
    pub eps: Rational,
    pub variant: Variant,
    pub branch_cap: usize,
}

impl GuessConfig {
    /// Accepts any `eps` in `(0, 1)`; the guarantee-bearing entry points
    /// additionally require `eps < 1/7`.
    pub fn new(eps: Rational, variant: Variant) -> Result<Self> {
        if !eps.is_positive() || eps >= Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "epsilon {} outside (0, 1)",
                crate::num::format_fraction(&eps)
            )));
        }
        Ok(GuessConfig { eps, variant, branch_cap: DEFAULT_BRANCH_CAP })
    }

    pub fn with_branch_cap(mut self, cap: usize) -> Self {
        self.branch_cap = cap;
        self
    }

    /// Marking instances per bucket: one, or `ceil(1/eps)` for the non-monotone variant.
    pub fn copies(&self) -> usize {
        match self.variant {
            Variant::Monotone => 1,
            Variant::NonMonotone(_) => {
                let c = ceil(&(Rational::one() / &self.eps));
                c.try_into().expect("copy count fits usize")
            }
        }
    }
}

pub fn check_eps(eps: &Rational) -> Result<()> {
    if !eps.is_positive() || *eps >= frac(1, 7) {
        return Err(Error::EpsilonOutOfRange(crate::num::format_fraction(eps)));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunMetrics {
    /// Peak number of live threads: waiting branches plus one thread per
    /// threshold outcome of every running iteration.
    pub peak_branches: usize,
    pub branches_created: usize,
    pub iterations_started: usize,
    pub max_iteration: usize,
    pub marks: usize,
    pub peak_fe_states: usize,
    pub peak_fe_states_total: usize,
    pub elements: usize,
    /// Live threshold-grid size after each element (wrapper runs only).
    pub grid_history: Vec<usize>,
    pub peak_instances: usize,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub solution: ElementSet,
    pub value: Rational,
    pub path: Path,
    /// Exponent `i` of the winning threshold `2^i` (wrapper runs only).
    pub tau_exponent: Option<i64>,
    pub metrics: RunMetrics,
}

/// Greedy rank tracking of the elements seen so far, one basis per matroid.
#[derive(Clone, Debug)]
pub struct RankTracker {
    matroids: Vec<MatroidRef>,
    bases: Vec<ElementSet>,
}

impl RankTracker {
    pub fn new(matroids: Vec<MatroidRef>) -> Self {
        let bases = vec![ElementSet::new(); matroids.len()];
        RankTracker { matroids, bases }
    }

    pub fn observe(&mut self, u: ElementId) {
        for (m, b) in self.matroids.iter().zip(self.bases.iter_mut()) {
            let grown = b.with(u);
            if m.independent(&grown) {
                *b = grown;
            }
        }
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.bases.iter().map(ElementSet::len).collect()
    }

    pub fn min_rank(&self) -> usize {
        self.bases.iter().map(ElementSet::len).min().unwrap_or(0)
    }
}

/// `tau / (1+eps)^i` for growing `i`, plus the per-iteration top bucket.
#[derive(Clone, Debug)]
struct Ladder {
    base: Rational,
    eps: Rational,
    rungs: Vec<Rational>,
    top: Vec<u32>,
}

impl Ladder {
    fn new(tau: &Rational, eps: &Rational) -> Self {
        Ladder { base: Rational::one() + eps, eps: eps.clone(), rungs: vec![tau.clone()], top: vec![0] }
    }

    /// Largest bucket index for iteration `j`: the least `c` with `(1+eps)^c >= j^2/eps`.
    fn top(&mut self, j: usize) -> u32 {
        while self.top.len() <= j {
            let jj = self.top.len() as i64;
            let c = min_power_at_least(&self.base, &(int(jj * jj) / &self.eps));
            self.top.push(c);
        }
        self.top[j]
    }

    fn rung(&mut self, i: usize) -> &Rational {
        while self.rungs.len() <= i {
            let next = self.rungs.last().expect("non-empty") / &self.base;
            self.rungs.push(next);
        }
        &self.rungs[i]
    }

    /// Bucket `i <= top` with `rung(i+1) < delta <= rung(i)`.
    fn bucket(&mut self, delta: &Rational, top: u32) -> Option<u32> {
        if !delta.is_positive() || delta > self.rung(0) || delta <= self.rung(top as usize + 1) {
            return None;
        }
        let (mut lo, mut hi) = (0usize, top as usize);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if *delta > *self.rung(mid + 1) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        debug_assert!(*delta <= *self.rung(lo) && *delta > *self.rung(lo + 1));
        Some(lo as u32)
    }
}

#[derive(Clone, Debug)]
struct Branch {
    set: ElementSet,
    value: Rational,
    path: Path,
}

#[derive(Clone, Debug)]
struct Mark {
    element: ElementId,
    copy: usize,
    value: Rational,
}

#[derive(Clone, Debug)]
struct Bucket {
    copies: Vec<FeAlg>,
    marks: Vec<Mark>,
    has_mark: Vec<bool>,
}

#[derive(Clone, Debug)]
struct Group {
    base: Branch,
    j: usize,
    top: u32,
    matroids: Vec<MatroidRef>,
    buckets: BTreeMap<u32, Bucket>,
}

impl Group {
    fn threads(&self) -> usize {
        self.top as usize + 1
    }
}

/// One run of the forking algorithm for a fixed threshold `tau`.
pub struct GuessRun<'a> {
    f: &'a dyn ValueOracle,
    matroids: Vec<MatroidRef>,
    config: GuessConfig,
    copies: usize,
    horizon: Horizon,
    rho: usize,
    ladder: Ladder,
    tracker: Option<RankTracker>,
    waiting: BTreeMap<(usize, ElementSet), Branch>,
    groups: Vec<Group>,
    best: Branch,
    metrics: RunMetrics,
    finished: bool,
}

impl<'a> GuessRun<'a> {
    /// `rho` must bound the rank of every matroid; it only feeds the budget
    /// assertions of the marking instances.
    pub fn new(
        f: &'a dyn ValueOracle,
        matroids: Vec<MatroidRef>,
        config: GuessConfig,
        tau: Rational,
        horizon: Horizon,
        rho: usize,
    ) -> Result<Self> {
        if !tau.is_positive() {
            return Err(Error::InvalidParameter("tau must be positive".into()));
        }
        CommonOracle::new(matroids.clone())?;
        if matroids[0].ground_size() != f.ground_size() {
            return Err(Error::GroundMismatch(matroids[0].ground_size(), f.ground_size()));
        }
        let empty = Branch { set: ElementSet::new(), value: f.eval(&ElementSet::new()), path: Vec::new() };
        let tracker = matches!(horizon, Horizon::Gated).then(|| RankTracker::new(matroids.clone()));
        let mut waiting = BTreeMap::new();
        waiting.insert((1, ElementSet::new()), empty.clone());
        Ok(GuessRun {
            f,
            copies: config.copies(),
            ladder: Ladder::new(&tau, &config.eps),
            matroids,
            config,
            horizon,
            rho,
            tracker,
            waiting,
            groups: Vec::new(),
            best: empty,
            metrics: RunMetrics { peak_branches: 1, branches_created: 1, ..Default::default() },
            finished: false,
        })
    }

    fn may_start(&self, j: usize) -> bool {
        match self.horizon {
            Horizon::Exact(n) => j <= n,
            Horizon::Gated => self.tracker.as_ref().is_some_and(|t| t.min_rank() >= j),
        }
    }

    fn offer(&mut self, b: &Branch) {
        if b.value > self.best.value || (b.value == self.best.value && b.path < self.best.path) {
            self.best = b.clone();
        }
    }

    fn add_waiting(&mut self, j: usize, b: Branch) {
        self.metrics.branches_created += 1;
        self.offer(&b);
        match self.waiting.entry((j, b.set.clone())) {
            Entry::Vacant(v) => {
                v.insert(b);
            }
            Entry::Occupied(mut o) => {
                if b.path < o.get().path {
                    o.insert(b);
                }
            }
        }
    }

    fn start_ready(&mut self) {
        loop {
            let ready: Vec<(usize, ElementSet)> =
                self.waiting.keys().filter(|(j, _)| self.may_start(*j)).cloned().collect();
            if ready.is_empty() {
                break;
            }
            for key in ready {
                let b = self.waiting.remove(&key).expect("present");
                let j = key.0;
                if let Some(t) = &self.tracker {
                    assert!(t.min_rank() >= j, "iteration {j} started before the rank gate opened");
                }
                let matroids = self
                    .matroids
                    .iter()
                    .map(|m| contract(m, &b.set).expect("branch solutions are common independent"))
                    .collect();
                let top = self.ladder.top(j);
                self.metrics.iterations_started += 1;
                self.metrics.max_iteration = self.metrics.max_iteration.max(j);
                let mut skip = b.clone();
                skip.path.push(Step::Skip);
                self.groups.push(Group { base: b, j, top, matroids, buckets: BTreeMap::new() });
                self.add_waiting(j + 1, skip);
            }
        }
        if let Horizon::Exact(n) = self.horizon {
            self.waiting.retain(|(j, _), _| *j <= n);
        }
    }

    fn live_threads(&self) -> usize {
        self.waiting.len() + self.groups.iter().map(Group::threads).sum::<usize>()
    }

    /// Feeds one stream element to every running iteration.
    pub fn process(&mut self, u: ElementId) -> Result<()> {
        assert!(!self.finished, "process after finish");
        self.metrics.elements += 1;
        if let Some(t) = &mut self.tracker {
            t.observe(u);
        }
        self.start_ready();
        let mut spawned: Vec<(usize, Branch)> = Vec::new();
        let copies = self.copies;
        let variant = self.config.variant;
        for g in &mut self.groups {
            let grown = g.base.set.with(u);
            let value = self.f.eval(&grown);
            let delta = &value - &g.base.value;
            let Some(b) = self.ladder.bucket(&delta, g.top) else {
                continue;
            };
            debug_assert!(delta.is_positive());
            let bucket = g.buckets.entry(b).or_insert_with(|| Bucket {
                copies: (0..copies)
                    .map(|_| FeAlg::new(g.matroids.clone(), self.rho).expect("non-empty matroid list"))
                    .collect(),
                marks: Vec::new(),
                has_mark: vec![false; copies],
            });
            let child = |step: Step, set: ElementSet, value: Rational| {
                let mut path = g.base.path.clone();
                path.push(step);
                Branch { set, value, path }
            };
            match variant {
                Variant::Monotone => {
                    if bucket.copies[0].process(u) {
                        self.metrics.marks += 1;
                        bucket.marks.push(Mark { element: u, copy: 0, value: value.clone() });
                        spawned.push((g.j + 1, child(Step::Pick { bucket: b, element: u }, grown, value)));
                    }
                }
                Variant::NonMonotone(_) => {
                    for l in 0..copies {
                        if !bucket.copies[l].process(u) {
                            continue;
                        }
                        self.metrics.marks += 1;
                        spawned.push((
                            g.j + 1,
                            child(Step::Exact { bucket: b, element: u }, grown.clone(), value.clone()),
                        ));
                        let others_filled = (0..copies).all(|c| c == l || bucket.has_mark[c]);
                        if others_filled {
                            for m in bucket.marks.iter().filter(|m| m.copy != l) {
                                let step = Step::Slot { bucket: b, trigger: u, element: m.element };
                                spawned.push((g.j + 1, child(step, g.base.set.with(m.element), m.value.clone())));
                            }
                        }
                        bucket.marks.push(Mark { element: u, copy: l, value: value.clone() });
                        bucket.has_mark[l] = true;
                        break;
                    }
                }
            }
        }
        for (j, b) in spawned {
            self.add_waiting(j, b);
        }
        self.update_peaks()
    }

    fn update_peaks(&mut self) -> Result<()> {
        let live = self.live_threads();
        self.metrics.peak_branches = self.metrics.peak_branches.max(live);
        let mut total = 0;
        for g in &self.groups {
            for b in g.buckets.values() {
                for fe in &b.copies {
                    total += fe.state_count();
                    self.metrics.peak_fe_states = self.metrics.peak_fe_states.max(fe.peak_states());
                }
            }
        }
        self.metrics.peak_fe_states_total = self.metrics.peak_fe_states_total.max(total);
        if live > self.config.branch_cap {
            return Err(Error::BranchBudgetExceeded { live, cap: self.config.branch_cap });
        }
        Ok(())
    }

    /// Ends the stream and returns the best output over all branches.
    pub fn finish(mut self) -> RunOutcome {
        self.finished = true;
        if let Variant::NonMonotone(PartialSlots::PickAmongFilled) = self.config.variant {
            let mut tails = Vec::new();
            for g in &self.groups {
                for (&b, bucket) in &g.buckets {
                    for m in &bucket.marks {
                        let mut path = g.base.path.clone();
                        path.push(Step::Tail { bucket: b, element: m.element });
                        tails.push(Branch { set: g.base.set.with(m.element), value: m.value.clone(), path });
                    }
                }
            }
            for t in &tails {
                self.offer(t);
            }
        }
        RunOutcome {
            solution: self.best.set,
            value: self.best.value,
            path: self.best.path,
            tau_exponent: None,
            metrics: self.metrics,
        }
    }

    pub fn best_value(&self) -> &Rational {
        &self.best.value
    }

    pub fn metrics(&self) -> &RunMetrics {
        &self.metrics
    }
}

/// Largest rank among the matroids over their whole ground sets.
pub fn rank_bound(matroids: &[MatroidRef]) -> usize {
    matroids.iter().map(|m| full_rank(m.as_ref())).max().unwrap_or(0)
}

/// Runs the forking algorithm with a known threshold and iteration count.
pub fn run_guess(
    stream: &Stream,
    f: &dyn ValueOracle,
    matroids: &[MatroidRef],
    config: GuessConfig,
    tau: &Rational,
    horizon: Horizon,
) -> Result<RunOutcome> {
    let mut run = GuessRun::new(f, matroids.to_vec(), config, tau.clone(), horizon, rank_bound(matroids))?;
    for u in stream.cursor() {
        run.process(u)?;
    }
    Ok(run.finish())
}

/// Monotone variant with known `tau` and `|OPT|`.
pub fn run_alg2(
    stream: &Stream,
    f: &dyn ValueOracle,
    matroids: &[MatroidRef],
    eps: &Rational,
    tau: &Rational,
    opt_size: usize,
) -> Result<RunOutcome> {
    check_eps(eps)?;
    if !f.is_monotone() {
        return Err(Error::NotMonotone);
    }
    let config = GuessConfig::new(eps.clone(), Variant::Monotone)?;
    run_guess(stream, f, matroids, config, tau, Horizon::Exact(opt_size))
}

/// Non-monotone variant with known `tau` and `|OPT|`; the random slot choice is forked.
pub fn run_alg3(
    stream: &Stream,
    f: &dyn ValueOracle,
    matroids: &[MatroidRef],
    eps: &Rational,
    tau: &Rational,
    opt_size: usize,
) -> Result<RunOutcome> {
    check_eps(eps)?;
    let config = GuessConfig::new(eps.clone(), Variant::NonMonotone(PartialSlots::default()))?;
    run_guess(stream, f, matroids, config, tau, Horizon::Exact(opt_size))
}

/// Exponents `i` with `m <= 2^i <= 2 m (k g)^2 / eps`.
pub fn tau_grid_exponents(m: &Rational, k: usize, g: usize, eps: &Rational) -> Option<std::ops::RangeInclusive<i64>> {
    if !m.is_positive() {
        return None;
    }
    let kg = int((k * g) as i64);
    let upper = int(2) * m * &kg * &kg / eps;
    Some(ceil_log2(m)..=floor_log2(&upper))
}

/// The full single-pass pipeline: no knowledge of `tau`, `|OPT|` or the rank.
pub struct StreamingRun<'a> {
    f: &'a dyn ValueOracle,
    matroids: Vec<MatroidRef>,
    oracle: CommonOracle,
    config: GuessConfig,
    rho: usize,
    max_singleton: Rational,
    greedy: ElementSet,
    instances: BTreeMap<i64, GuessRun<'a>>,
    metrics: RunMetrics,
}

impl<'a> StreamingRun<'a> {
    pub fn new(f: &'a dyn ValueOracle, matroids: Vec<MatroidRef>, config: GuessConfig) -> Result<Self> {
        let oracle = CommonOracle::new(matroids.clone())?;
        if oracle.ground_size() != f.ground_size() {
            return Err(Error::GroundMismatch(oracle.ground_size(), f.ground_size()));
        }
        Ok(StreamingRun {
            f,
            rho: rank_bound(&matroids),
            matroids,
            oracle,
            config,
            max_singleton: Rational::zero(),
            greedy: ElementSet::new(),
            instances: BTreeMap::new(),
            metrics: RunMetrics::default(),
        })
    }

    pub fn live_exponents(&self) -> Vec<i64> {
        self.instances.keys().copied().collect()
    }

    /// Greedy common independent set of the non-loop prefix.
    pub fn greedy(&self) -> &ElementSet {
        &self.greedy
    }

    pub fn max_singleton(&self) -> &Rational {
        &self.max_singleton
    }

    pub fn k(&self) -> usize {
        self.matroids.len()
    }

    pub fn process(&mut self, u: ElementId) -> Result<()> {
        self.metrics.elements += 1;
        let single = ElementSet::singleton(u);
        if !self.oracle.independent(&single) {
            self.metrics.grid_history.push(self.instances.len());
            return Ok(());
        }
        let grown = self.greedy.with(u);
        if self.oracle.independent(&grown) {
            self.greedy = grown;
        }
        let fu = self.f.eval(&single);
        if fu > self.max_singleton {
            self.max_singleton = fu;
        }
        let k = self.matroids.len();
        if let Some(range) = tau_grid_exponents(&self.max_singleton, k, self.greedy.len(), &self.config.eps) {
            self.instances.retain(|i, _| range.contains(i));
            for i in range {
                if let std::collections::btree_map::Entry::Vacant(v) = self.instances.entry(i) {
                    v.insert(GuessRun::new(
                        self.f,
                        self.matroids.clone(),
                        self.config.clone(),
                        pow2(i),
                        Horizon::Gated,
                        self.rho,
                    )?);
                }
            }
            let g = self.greedy.len() as i64;
            let limit = int(2 * (k as i64) * (k as i64) * g * g) / &self.config.eps;
            let count = self.instances.len() as i64;
            assert!(pow2(count - 1) <= limit, "threshold grid holds {count} instances, above the bound");
        }
        for run in self.instances.values_mut() {
            run.process(u)?;
        }
        self.metrics.grid_history.push(self.instances.len());
        self.metrics.peak_instances = self.metrics.peak_instances.max(self.instances.len());
        let live: usize = self.instances.values().map(|r| r.live_threads()).sum();
        self.metrics.peak_branches = self.metrics.peak_branches.max(live);
        Ok(())
    }

    pub fn finish(self) -> RunOutcome {
        let mut metrics = self.metrics;
        let mut best: Option<RunOutcome> = None;
        for (i, run) in self.instances {
            let mut out = run.finish();
            out.tau_exponent = Some(i);
            let m = &out.metrics;
            metrics.branches_created += m.branches_created;
            metrics.iterations_started += m.iterations_started;
            metrics.max_iteration = metrics.max_iteration.max(m.max_iteration);
            metrics.marks += m.marks;
            metrics.peak_fe_states = metrics.peak_fe_states.max(m.peak_fe_states);
            metrics.peak_fe_states_total = metrics.peak_fe_states_total.max(m.peak_fe_states_total);
            // Instances iterate in increasing exponent, so strict improvement
            // keeps the smallest (exponent, path) among equal values.
            let better = best.as_ref().is_none_or(|b| out.value > b.value);
            if better {
                best = Some(out);
            }
        }
        match best {
            Some(mut b) => {
                b.metrics = metrics;
                b
            }
            None => RunOutcome {
                value: self.f.eval(&ElementSet::new()),
                solution: ElementSet::new(),
                path: Vec::new(),
                tau_exponent: None,
                metrics,
            },
        }
    }
}

/// Single pass without `tau`, `|OPT|` or rank knowledge.
pub fn run_streaming(
    stream: &Stream,
    f: &dyn ValueOracle,
    matroids: &[MatroidRef],
    eps: &Rational,
    monotone: bool,
) -> Result<RunOutcome> {
    check_eps(eps)?;
    if monotone && !f.is_monotone() {
        return Err(Error::NotMonotone);
    }
    let variant = if monotone { Variant::Monotone } else { Variant::NonMonotone(PartialSlots::default()) };
    run_streaming_with(stream, f, matroids, GuessConfig::new(eps.clone(), variant)?)
}

pub fn run_streaming_with(
    stream: &Stream,
    f: &dyn ValueOracle,
    matroids: &[MatroidRef],
    config: GuessConfig,
) -> Result<RunOutcome> {
    let mut run = StreamingRun::new(f, matroids.to_vec(), config)?;
    for u in stream.cursor() {
        run.process(u)?;
    }
    Ok(run.finish())
}

/// Lower bound on `f(out)/f(OPT)` for the forking algorithms with a good
/// threshold: `(1 - 6 eps (1+eps)) / (2 + eps)` when monotone, with an extra
/// `-eps` in the numerator otherwise.
pub fn guarantee_factor(eps: &Rational, monotone: bool) -> Rational {
    let one = Rational::one();
    let mut num = &one - int(6) * eps * (&one + eps);
    if !monotone {
        num -= eps;
    }
    num / (int(2) + eps)
}

/// Guarantee of the threshold-free pipeline: the inner factor divided by `1 + 3 eps`.
pub fn streaming_guarantee_factor(eps: &Rational, monotone: bool) -> Rational {
    guarantee_factor(eps, monotone) / (Rational::one() + int(3) * eps)
}
