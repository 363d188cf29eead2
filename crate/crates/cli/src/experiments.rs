//! Solver runs on instance files and chain protocol trials, as CSV records.

use std::time::Instant;

use clap::ValueEnum;
use smkm_core::chainsim::{
    meter, run_protocol1, run_protocol2, run_protocol3, sample_chain, Case, InnerAlgorithm, TreeMode,
};
use smkm_core::io::InstanceFile;
use smkm_core::matching::LayerGraph;
use smkm_core::matroids::{common_independent, CommonOracle};
use smkm_core::num::{format_fraction, int};
use smkm_core::reference::{brute_force_opt, streaming_greedy, EXACT_GROUND_LIMIT};
use smkm_core::smkm::{run_alg2, run_alg3, run_streaming_with, GuessConfig, PartialSlots, Variant};
use smkm_core::submodular::ChainFamilyFn;
use smkm_core::{Error, Rational, Result, Rng};

pub const RUN_CSV_HEADER: &str = "# smkm-run-csv v1";
pub const RUN_COLUMNS: [&str; 10] =
    ["instance_id", "alg", "eps", "f_out", "f_opt", "ratio", "feasible", "peak_branches", "marks", "wall_ms"];
pub const CHAIN_CSV_HEADER: &str = "# smkm-chain-csv v1";
pub const CHAIN_COLUMNS: [&str; 8] = ["protocol", "trial", "params", "inner", "case", "verdict", "correct", "max_bits"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// Threshold-free single-pass pipeline.
    Stream,
    /// Monotone forking algorithm with the optimum as threshold.
    Alg2,
    /// Non-monotone forking algorithm with the optimum as threshold.
    Alg3,
    Greedy,
    Exact,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Stream => "stream",
            Algorithm::Alg2 => "alg2",
            Algorithm::Alg3 => "alg3",
            Algorithm::Greedy => "greedy",
            Algorithm::Exact => "exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRow {
    pub instance_id: String,
    pub alg: Algorithm,
    pub eps: Rational,
    pub f_out: Rational,
    pub f_opt: Option<Rational>,
    pub feasible: bool,
    pub peak_branches: usize,
    pub marks: usize,
    pub wall_ms: u128,
}

impl RunRow {
    pub fn ratio(&self) -> Option<Rational> {
        match &self.f_opt {
            Some(opt) if *opt > int(0) => Some(&self.f_out / opt),
            Some(_) if self.f_out == int(0) => Some(int(1)),
            _ => None,
        }
    }

    /// CSV fields in [`RUN_COLUMNS`] order; the wall time is blank unless `timed`.
    pub fn record(&self, timed: bool) -> Vec<String> {
        vec![
            self.instance_id.clone(),
            self.alg.name().into(),
            format_fraction(&self.eps),
            format_fraction(&self.f_out),
            self.f_opt.as_ref().map(format_fraction).unwrap_or_default(),
            self.ratio().as_ref().map(format_fraction).unwrap_or_default(),
            self.feasible.to_string(),
            self.peak_branches.to_string(),
            self.marks.to_string(),
            if timed { self.wall_ms.to_string() } else { String::new() },
        ]
    }
}

/// Optimum when the exhaustive search finishes within its budget.
fn try_opt(file: &InstanceFile) -> Result<Option<(smkm_core::ElementSet, Rational)>> {
    if file.ground_size > EXACT_GROUND_LIMIT {
        return Ok(None);
    }
    let f = file.objective()?;
    match brute_force_opt(f.as_ref(), &file.matroids()?, file.ground_size) {
        Ok(opt) => Ok(Some(opt)),
        Err(Error::SearchBudgetExhausted(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn run_instance(file: &InstanceFile, alg: Algorithm, eps: &Rational, branch_cap: usize) -> Result<RunRow> {
    let f = file.objective()?;
    let ms = file.matroids()?;
    let stream = file.stream()?;
    let opt = try_opt(file)?;
    let start = Instant::now();
    let need_opt = || opt.clone().ok_or(Error::TooLarge(file.ground_size, EXACT_GROUND_LIMIT));
    let (solution, peak_branches, marks) = match alg {
        Algorithm::Exact => (need_opt()?.0, 0, 0),
        Algorithm::Greedy => {
            let oracle = CommonOracle::new(ms.clone())?;
            (streaming_greedy(&stream, &oracle, Some(f.as_ref()), false), 0, 0)
        }
        Algorithm::Alg2 | Algorithm::Alg3 => {
            let (set, value) = need_opt()?;
            let out = if alg == Algorithm::Alg2 {
                run_alg2(&stream, f.as_ref(), &ms, eps, &value, set.len())?
            } else {
                run_alg3(&stream, f.as_ref(), &ms, eps, &value, set.len())?
            };
            (out.solution, out.metrics.peak_branches, out.metrics.marks)
        }
        Algorithm::Stream => {
            smkm_core::smkm::check_eps(eps)?;
            let variant = if file.monotone { Variant::Monotone } else { Variant::NonMonotone(PartialSlots::default()) };
            let config = GuessConfig::new(eps.clone(), variant)?.with_branch_cap(branch_cap);
            let out = run_streaming_with(&stream, f.as_ref(), &ms, config)?;
            (out.solution, out.metrics.peak_branches, out.metrics.marks)
        }
    };
    let wall_ms = start.elapsed().as_millis();
    Ok(RunRow {
        instance_id: file.id.clone(),
        alg,
        eps: eps.clone(),
        f_out: f.eval(&solution),
        f_opt: opt.map(|(_, v)| v),
        feasible: common_independent(&ms, &solution)?,
        peak_branches,
        marks,
        wall_ms,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Inner {
    Exact,
    Greedy,
    /// Random feasible subsets, seeded per trial.
    Random,
    /// Greedy capped at `floor(m_i / alpha)` per layer (protocol 3 only).
    Capped,
}

impl Inner {
    fn name(self) -> &'static str {
        match self {
            Inner::Exact => "exact",
            Inner::Greedy => "greedy",
            Inner::Random => "random",
            Inner::Capped => "capped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainParams {
    pub protocol: u8,
    /// Protocol 1: players. Protocol 2: coordinates.
    pub k: usize,
    /// String length for protocols 1 and 2; copies per edge for protocol 3.
    pub m: usize,
    /// Protocol 2: players. Protocol 3: layers.
    pub p: usize,
    /// Parallel copies for protocol 1.
    pub copies: usize,
    /// Protocol 3: edges in each layer's perfect matching.
    pub side: u32,
    pub eps: Rational,
    pub alpha: Rational,
    pub case: Option<Case>,
    pub inner: Inner,
    pub trials: usize,
    pub seed: u64,
}

impl ChainParams {
    fn describe(&self) -> String {
        match self.protocol {
            1 => format!("k={} m={} copies={}", self.k, self.m, self.copies),
            2 => format!("p={} m={} k={}", self.p, self.m, self.k),
            _ => format!(
                "p={} n={} side={} eps={} alpha={}",
                self.p,
                self.m,
                self.side,
                format_fraction(&self.eps),
                format_fraction(&self.alpha)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainRow {
    pub trial: usize,
    pub case: Case,
    pub verdict: Case,
    pub max_bits: usize,
}

#[derive(Clone, Debug)]
pub struct ChainSummary {
    pub rows: Vec<ChainRow>,
    pub correct: usize,
    pub max_bits: usize,
}

impl ChainSummary {
    pub fn success_rate(&self) -> f64 {
        self.correct as f64 / self.rows.len().max(1) as f64
    }
}

pub fn chain_trials(params: &ChainParams) -> Result<ChainSummary> {
    let base = Rng::new(params.seed);
    let mut rows = Vec::with_capacity(params.trials);
    for trial in 0..params.trials {
        let mut rng = base.split(trial as u64 + 1);
        let trial_seed = rng.next_u64();
        let inner = |family: Option<&ChainFamilyFn>| -> Result<InnerAlgorithm> {
            Ok(match params.inner {
                Inner::Exact => InnerAlgorithm::Exact,
                Inner::Greedy => InnerAlgorithm::Greedy,
                Inner::Random => InnerAlgorithm::RandomFeasible { seed: trial_seed },
                Inner::Capped => match family {
                    Some(f) => InnerAlgorithm::capped_for(f, &params.alpha),
                    None => return Err(Error::InvalidParameter("capped inner solver needs protocol 3".into())),
                },
            })
        };
        let players = match params.protocol {
            1 => params.k,
            2 => params.p,
            3 => params.p + 1,
            other => return Err(Error::InvalidParameter(format!("unknown protocol {other}"))),
        };
        let inst = sample_chain(players, params.m, &mut rng, params.case)?;
        let case = inst.case;
        let transcript = match params.protocol {
            1 => run_protocol1(&inst, &inner(None)?, params.copies)?,
            2 => run_protocol2(&inst, params.k, trial_seed, TreeMode::Lazy, &inner(None)?)?,
            _ => {
                let layers = vec![LayerGraph::perfect_matching(params.side); params.p];
                let family = ChainFamilyFn::new(layers, params.m as u32, params.eps.clone(), vec![1; params.p])?;
                run_protocol3(&inst, &family, &params.alpha, &inner(Some(&family))?)?
            }
        };
        rows.push(ChainRow { trial, case, verdict: transcript.verdict, max_bits: meter(&transcript.hops) });
    }
    let correct = rows.iter().filter(|r| r.case == r.verdict).count();
    let max_bits = rows.iter().map(|r| r.max_bits).max().unwrap_or(0);
    Ok(ChainSummary { rows, correct, max_bits })
}

/// Per-trial records followed by one summary record.
pub fn chain_records(params: &ChainParams, summary: &ChainSummary) -> Vec<Vec<String>> {
    let proto = params.protocol.to_string();
    let desc = params.describe();
    let inner = params.inner.name().to_string();
    let mut out: Vec<Vec<String>> = summary
        .rows
        .iter()
        .map(|r| {
            vec![
                proto.clone(),
                r.trial.to_string(),
                desc.clone(),
                inner.clone(),
                r.case.to_string(),
                r.verdict.to_string(),
                (r.case == r.verdict).to_string(),
                r.max_bits.to_string(),
            ]
        })
        .collect();
    out.push(vec![
        proto,
        "summary".into(),
        desc,
        inner,
        String::new(),
        String::new(),
        format!("{:.4}", summary.success_rate()),
        summary.max_bits.to_string(),
    ]);
    out
}
