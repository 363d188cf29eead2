//! Invariant batteries. Each returns a [`Report`] of named pass/fail checks.

use std::fmt;
use std::sync::Arc;

use smkm_core::fealg::{check_first_element_property, FeAlg};
use smkm_core::hardgen::{
    gen_coordinate, gen_hidden_chain, gen_random_partition, is_successful, matching_matroids, random_layer,
    CorpusObjective,
};
use smkm_core::matroids::{check_matroid_axioms, common_independent, contract, truncate, UniformMatroid};
use smkm_core::num::{format_fraction, frac, int, pow2};
use smkm_core::reference::{brute_force_opt, streaming_greedy};
use smkm_core::smkm::{rank_bound, streaming_guarantee_factor, GuessConfig, PartialSlots, StreamingRun, Variant};
use smkm_core::submodular::{
    check_matching_lower_bound, check_monotone, check_no_case_upper_bound, check_restriction_identity,
    check_submodular_with, Cardinality, ChainFamilyFn,
};
use smkm_core::{ElementId, ElementSet, Matroid, MatroidRef, Rational, Result, Rng};

use crate::corpus::CorpusEntry;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn axioms(report: &mut Report, name: String, m: &dyn Matroid) -> Result<()> {
    let r = check_matroid_axioms(m)?;
    let detail = format!(
        "{} sets, {} hereditary and {} exchange violations",
        r.sets_checked,
        r.hereditary.len(),
        r.exchange.len()
    );
    report.push(name, r.exhaustive && r.is_clean(), detail);
    Ok(())
}

/// Exhaustive axiom checks on every built-in oracle kind with `n <= 12`, and
/// block interchangeability of hidden-chain systems with `k m <= 12`.
pub fn matroid_axioms(seed: u64) -> Result<Report> {
    let mut report = Report::default();
    let mut rng = Rng::new(seed);
    for t in 0..4 {
        let n = 6 + 2 * t;
        let inst = gen_random_partition(n, 2, CorpusObjective::Coverage, &mut rng)?;
        let base: MatroidRef = Arc::new(inst.partitions[0].clone());
        axioms(&mut report, format!("partition n={n}"), base.as_ref())?;
        let greedy: ElementSet = {
            let mut s = ElementSet::new();
            for u in 0..2 as ElementId {
                if base.independent(&s.with(u)) {
                    s.insert(u);
                }
            }
            s
        };
        axioms(&mut report, format!("contracted n={n} by {greedy:?}"), contract(&base, &greedy)?.as_ref())?;
        for r in 0..3 {
            axioms(&mut report, format!("truncated n={n} rank {r}"), truncate(&base, r).as_ref())?;
        }
    }
    for rank in [0, 1, 3, 10] {
        axioms(&mut report, format!("uniform n=10 rank {rank}"), &UniformMatroid { ground_size: 10, rank })?;
    }
    let mut equivalence_bad = 0;
    let mut systems = 0;
    for k in 2..=12 {
        for m in 1..=12 / k {
            let sys = gen_hidden_chain(k, m, &mut rng)?.system;
            for (i, mi) in sys.matroids().iter().enumerate() {
                axioms(&mut report, format!("hidden-chain k={k} m={m} matroid {}", i + 1), mi.as_ref())?;
            }
            equivalence_bad += sys.check_block_equivalence()?.len();
            systems += 1;
        }
    }
    report.push(
        "hidden-chain block equivalence",
        equivalence_bad == 0,
        format!("{systems} systems, {equivalence_bad} violations"),
    );
    for (p, m, k) in [(3, 4, 3), (4, 3, 2), (2, 12, 4)] {
        let inst = gen_coordinate(p, m, k, &mut rng)?;
        for (i, mi) in inst.system().matroids().iter().enumerate() {
            axioms(&mut report, format!("coordinate p={p} m={m} coordinate {}", i + 1), mi.as_ref())?;
        }
    }
    let family = ChainFamilyFn::new(vec![random_layer(2, &mut rng)], 3, frac(1, 4), vec![1])?;
    if smkm_core::ValueOracle::ground_size(&family) <= 12 {
        for (i, mi) in matching_matroids(&family).iter().enumerate() {
            axioms(&mut report, format!("matching side {}", i + 1), mi.as_ref())?;
        }
    }
    Ok(report)
}

/// Mark and state budgets after every element, then the exhaustive
/// replacement guarantee over all common independent subsets of the stream.
pub fn fealg(corpus: &[CorpusEntry]) -> Result<Report> {
    let mut report = Report::default();
    let (mut budget_bad, mut exchange_bad, mut checked) = (0, 0, 0);
    let (mut max_marks, mut max_states) = (0, 0);
    for entry in corpus.iter().filter(|e| e.stream.len() <= 12) {
        let mut fe = FeAlg::new(entry.matroids.clone(), rank_bound(&entry.matroids))?;
        for u in entry.stream.cursor() {
            fe.process(u);
            if fe.marked_count() as u128 > fe.mark_budget() || fe.state_count() as u128 > fe.state_budget() {
                budget_bad += 1;
            }
        }
        max_marks = max_marks.max(fe.marked_count());
        max_states = max_states.max(fe.peak_states());
        exchange_bad += check_first_element_property(&entry.matroids, entry.stream.order(), fe.marked())?.len();
        checked += 1;
    }
    report.push(
        "budgets",
        budget_bad == 0,
        format!("{checked} instances, {budget_bad} violations, max {max_marks} marks, peak {max_states} states"),
    );
    report.push("replacement", exchange_bad == 0, format!("{checked} instances, {exchange_bad} uncovered sets"));
    Ok(report)
}

/// Restriction identity, the matching lower bound, the bounded upper bound,
/// monotonicity on nested pairs and submodularity on matching-respecting triples.
pub fn family(seed: u64, trials: usize) -> Result<Report> {
    let mut report = Report::default();
    let mut rng = Rng::new(seed);
    let families = 10;
    let per = trials.div_ceil(families);
    let (mut ident_bad, mut ident_q) = (0, 0);
    let (mut lower_bad, mut upper_bad, mut upper_n) = (0, 0, 0);
    let (mut mono_bad, mut sub_bad) = (0, 0);
    let alpha = int(2);
    for _ in 0..families {
        let p = 2 + rng.index(2);
        let copies = 2 + rng.index(3) as u32;
        let layers = (0..p).map(|_| random_layer(2 + rng.index(2) as u32, &mut rng)).collect();
        let o: Vec<u32> = (0..p).map(|_| 1 + rng.below(copies as u64) as u32).collect();
        let f = ChainFamilyFn::new(layers, copies, frac(1, 4), o.clone())?;
        for i in 1..=p {
            let mut other = o.clone();
            for x in other.iter_mut().skip(i - 1) {
                *x = 1 + rng.below(copies as u64) as u32;
            }
            let g = f.with_indices(other)?;
            let r = check_restriction_identity(&f, &g, i, 50, &mut rng)?;
            ident_bad += r.violation_count;
            ident_q += r.trials;
        }
        lower_bad += usize::from(!check_matching_lower_bound(&f).holds);
        for _ in 0..50 {
            let mut set = ElementSet::new();
            for i in 1..=p {
                let cap = (f.layer_scale(i) / &alpha).floor().to_integer();
                let cap: usize = cap.try_into().unwrap_or(0);
                let mut ids: Vec<ElementId> = f.layer_range(i).filter(|&u| f.decode(u).copy != o[i - 1]).collect();
                rng.shuffle(&mut ids);
                let take = rng.index(cap.min(ids.len()) + 1);
                set = set.union(&ids[..take].iter().copied().collect());
            }
            upper_bad += usize::from(!check_no_case_upper_bound(&f, &alpha, &set)?.holds);
            upper_n += 1;
        }
        mono_bad += check_monotone(&f, per, &mut rng).violation_count;
        sub_bad += check_submodular_with(&f, per, &mut rng, |r| f.sample_matching_set(r)).violation_count;
    }
    report.push("restriction identity", ident_bad == 0, format!("{ident_q} queries, {ident_bad} mismatches"));
    report.push("matching lower bound", lower_bad == 0, format!("{families} families, {lower_bad} below p/(1+eps)"));
    report.push(
        "bounded upper bound",
        upper_bad == 0,
        format!("{upper_n} sets, {upper_bad} at or above 1+p/(1+alpha)"),
    );
    report.push("monotone", mono_bad == 0, format!("{} nested pairs, {mono_bad} violations", per * families));
    report.push("submodular", sub_bad == 0, format!("{} matching triples, {sub_bad} violations", per * families));
    Ok(report)
}

/// Outcome of driving the full pipeline over a corpus.
#[derive(Clone, Debug)]
pub struct GuaranteeStats {
    pub instances: usize,
    pub infeasible: usize,
    pub below_bound: usize,
    pub grid_violations: usize,
    pub grid_checks: usize,
    /// Smallest `f(out)/f(OPT)` over instances with a positive optimum.
    pub min_ratio: Option<Rational>,
}

/// Runs the threshold-free pipeline on every entry, checking the instance-count
/// bound `2^(count-1) <= 2 k^2 |G|^2 / eps` after every element and the
/// final value against `streaming_guarantee_factor(eps, false) * f(OPT)`.
pub fn guarantee_stats(corpus: &[CorpusEntry], eps: &Rational) -> Result<GuaranteeStats> {
    let factor = streaming_guarantee_factor(eps, false);
    let mut st = GuaranteeStats {
        instances: 0,
        infeasible: 0,
        below_bound: 0,
        grid_violations: 0,
        grid_checks: 0,
        min_ratio: None,
    };
    for entry in corpus {
        let f = entry.objective.as_ref();
        let variant = if entry.monotone { Variant::Monotone } else { Variant::NonMonotone(PartialSlots::default()) };
        let mut run = StreamingRun::new(f, entry.matroids.clone(), GuessConfig::new(eps.clone(), variant)?)?;
        for u in entry.stream.cursor() {
            run.process(u)?;
            let count = run.live_exponents().len() as i64;
            let (k, g) = (run.k() as i64, run.greedy().len() as i64);
            st.grid_checks += 1;
            if count > 0 && pow2(count - 1) > int(2 * k * k * g * g) / eps {
                st.grid_violations += 1;
            }
        }
        let out = run.finish();
        let (_, opt) = brute_force_opt(f, &entry.matroids, entry.stream.ground_size())?;
        st.instances += 1;
        if !common_independent(&entry.matroids, &out.solution)? || f.eval(&out.solution) != out.value {
            st.infeasible += 1;
        }
        if out.value < &opt * &factor {
            st.below_bound += 1;
        }
        if opt > int(0) {
            let ratio = &out.value / &opt;
            if st.min_ratio.as_ref().is_none_or(|m| ratio < *m) {
                st.min_ratio = Some(ratio);
            }
        }
    }
    Ok(st)
}

pub fn smkm_guarantee(corpus: &[CorpusEntry], eps: &Rational) -> Result<Report> {
    let st = guarantee_stats(corpus, eps)?;
    let mut report = Report::default();
    let min = st.min_ratio.as_ref().map_or("n/a".into(), format_fraction);
    report.push("feasible", st.infeasible == 0, format!("{} instances, {} infeasible", st.instances, st.infeasible));
    report.push(
        "guarantee",
        st.below_bound == 0,
        format!(
            "{} below bound {}, min ratio {min}",
            st.below_bound,
            format_fraction(&streaming_guarantee_factor(eps, false))
        ),
    );
    report.push(
        "grid bound",
        st.grid_violations == 0,
        format!("{} checks, {} violations", st.grid_checks, st.grid_violations),
    );
    Ok(report)
}

/// Fraction of `seeds` coordinate instances that are successful.
pub fn success_rate(p: usize, m: usize, k: usize, seeds: u64, seed: u64) -> Result<f64> {
    let base = Rng::new(seed);
    let mut ok = 0;
    for s in 0..seeds {
        let inst = gen_coordinate(p, m, k, &mut base.split(s))?;
        ok += usize::from(is_successful(&inst));
    }
    Ok(ok as f64 / seeds as f64)
}

pub fn hardgen_success(p: usize, m: usize, k: usize, seeds: u64, seed: u64, min_rate: f64) -> Result<Report> {
    let rate = success_rate(p, m, k, seeds, seed)?;
    let bound = smkm_core::hardgen::success_lower_bound(p, m, k);
    let mut report = Report::default();
    report.push(
        format!("success p={p} m={m} k={k}"),
        rate >= min_rate,
        format!("rate {rate:.4} over {seeds} seeds, bound {bound:.4}, required {min_rate}"),
    );
    Ok(report)
}

/// Mean output size of the streaming greedy on hidden-chain instances.
pub fn greedy_mean_size(k: usize, m: usize, seeds: u64, seed: u64) -> Result<f64> {
    let base = Rng::new(seed);
    let mut total = 0;
    for s in 0..seeds {
        let inst = gen_hidden_chain(k, m, &mut base.split(s))?;
        let oracle = inst.system.common_oracle();
        let out = streaming_greedy(&inst.stream, &oracle, Some(&Cardinality { ground_size: k * m }), false);
        total += out.len();
    }
    Ok(total as f64 / seeds as f64)
}
