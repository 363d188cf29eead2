//! The chain communication problem, bit-metered player relays, and the three
//! reductions that turn a streaming solver into a chain protocol.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::{hash_path, mix64, ElementId, ElementSet, Rng};
use crate::hardgen::{matching_matroids, sample_layer};
use crate::matroids::{CommonOracle, HiddenChainSystem};
use crate::num::{int, Rational};
use crate::reference::{max_feasible_subset, DEFAULT_NODE_BUDGET};
use crate::submodular::{ChainFamilyFn, ValueOracle};

/// Version tag written at the start of every hop.
pub const MESSAGE_VERSION: u8 = 1;
const VERSION_BITS: u32 = 8;
/// Largest `m^{p-2}` the precomputation tree may reach.
pub const TREE_BUDGET: u128 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Zero,
    One,
}

impl Case {
    pub fn bit(self) -> bool {
        self == Case::One
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Zero => write!(f, "0-case"),
            Case::One => write!(f, "1-case"),
        }
    }
}

/// `p` players; players `1..p-1` hold bit strings of length `n`, players
/// `2..p` hold indices. Every string's bit at the next player's index equals the case.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainInstance {
    pub p: usize,
    pub n: usize,
    pub strings: Vec<Vec<bool>>,
    /// `indices[i]` is the 1-based index held by player `i + 2`.
    pub indices: Vec<u32>,
    pub case: Case,
}

impl ChainInstance {
    /// String of player `i` (1-based, `i < p`).
    pub fn string(&self, i: usize) -> &[bool] {
        &self.strings[i - 1]
    }

    /// Index held by player `i` (`2 <= i <= p`).
    pub fn index(&self, i: usize) -> u32 {
        self.indices[i - 2]
    }

    pub fn check_promise(&self) -> Result<()> {
        if self.strings.len() + 1 != self.p || self.indices.len() + 1 != self.p {
            return Err(Error::PromiseViolated("string/index counts do not match p".into()));
        }
        for i in 1..self.p {
            let x = self.string(i);
            let t = self.index(i + 1) as usize;
            if x.len() != self.n || t == 0 || t > self.n {
                return Err(Error::PromiseViolated(format!("player {i} has malformed input")));
            }
            if x[t - 1] != self.case.bit() {
                return Err(Error::PromiseViolated(format!("player {i}'s bit at index {t} is not the case bit")));
            }
        }
        Ok(())
    }
}

pub fn sample_chain(p: usize, n: usize, rng: &mut Rng, forced: Option<Case>) -> Result<ChainInstance> {
    if p < 2 || n < 1 {
        return Err(Error::InvalidParameter(format!("chain needs p >= 2 and n >= 1 (got p={p}, n={n})")));
    }
    let case = forced.unwrap_or_else(|| if rng.coin() { Case::One } else { Case::Zero });
    let indices: Vec<u32> = (2..=p).map(|_| rng.index(n) as u32 + 1).collect();
    let strings = (1..p)
        .map(|i| {
            let mut x: Vec<bool> = (0..n).map(|_| rng.coin()).collect();
            x[indices[i - 1] as usize - 1] = case.bit();
            x
        })
        .collect();
    let inst = ChainInstance { p, n, strings, indices, case };
    inst.check_promise().expect("sampler keeps the promise");
    Ok(inst)
}

/// Bits needed to write any value in `0..n`.
pub fn id_width(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

#[derive(Clone, Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bits: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Writes the low `width` bits of `value`, most significant first.
    pub fn write(&mut self, value: u64, width: u32) {
        assert!(width == 64 || value >> width == 0, "value {value} does not fit in {width} bits");
        for b in (0..width).rev() {
            if self.bits.is_multiple_of(8) {
                self.bytes.push(0);
            }
            if (value >> b) & 1 == 1 {
                let last = self.bytes.last_mut().expect("pushed above");
                *last |= 0x80 >> (self.bits % 8);
            }
            self.bits += 1;
        }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn finish(self) -> Hop {
        Hop { bytes: self.bytes, bits: self.bits }
    }
}

#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    hop: &'a Hop,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(hop: &'a Hop) -> Self {
        BitReader { hop, pos: 0 }
    }

    pub fn read(&mut self, width: u32) -> Result<u64> {
        if self.pos + width as usize > self.hop.bits {
            return Err(Error::MalformedMessage(format!("read of {width} bits past end at bit {}", self.pos)));
        }
        let mut v = 0u64;
        for _ in 0..width {
            let bit = (self.hop.bytes[self.pos / 8] >> (7 - self.pos % 8)) & 1;
            v = (v << 1) | bit as u64;
            self.pos += 1;
        }
        Ok(v)
    }

    pub fn remaining(&self) -> usize {
        self.hop.bits - self.pos
    }
}

/// One message between consecutive players.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Hop {
    pub bytes: Vec<u8>,
    pub bits: usize,
}

#[derive(Clone, Debug)]
pub struct Transcript {
    pub hops: Vec<Hop>,
    pub verdict: Case,
    /// Final solution of every parallel copy.
    pub outputs: Vec<ElementSet>,
    /// Objective value used for the verdict, when the protocol has one.
    pub value: Option<Rational>,
}

/// Size of the largest hop in bits.
pub fn meter(hops: &[Hop]) -> usize {
    hops.iter().map(|h| h.bits).max().unwrap_or(0)
}

/// What a player can offer the solver: the feasibility oracle it can
/// evaluate and, optionally, the objective. Without one the objective is cardinality.
pub struct SolverEnv<'a> {
    pub ground_size: usize,
    pub feasible: &'a dyn Fn(&ElementSet) -> bool,
    pub objective: Option<&'a dyn ValueOracle>,
}

impl SolverEnv<'_> {
    pub fn value(&self, set: &ElementSet) -> Rational {
        match self.objective {
            Some(f) => f.eval(set),
            None => int(set.len() as i64),
        }
    }
}

/// A streaming algorithm whose entire memory can be written to a hop.
pub trait StreamingSolver {
    fn process(&mut self, u: ElementId, env: &SolverEnv);
    fn solve(&self, env: &SolverEnv) -> Result<ElementSet>;
    fn encode(&self, w: &mut BitWriter, ground_size: usize);
}

pub trait SolverFactory {
    fn create(&self, copy: usize) -> Box<dyn StreamingSolver>;
    fn decode(&self, copy: usize, r: &mut BitReader, ground_size: usize) -> Result<Box<dyn StreamingSolver>>;
}

/// Built-in inner algorithms. All of them keep a single set in memory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InnerAlgorithm {
    /// Stores every element and returns an optimal feasible subset.
    Exact,
    /// Keeps an arriving element when the set stays feasible and the value grows.
    Greedy,
    /// Greedy that first flips a coin derived from `(seed, copy, element)`.
    RandomFeasible { seed: u64 },
    /// Greedy with at most `caps[i]` kept elements inside `ranges[i]`.
    CappedGreedy { ranges: Vec<Range<ElementId>>, caps: Vec<usize> },
}

impl InnerAlgorithm {
    /// Per-layer caps of `floor(m_i / alpha)` over the family's layers.
    pub fn capped_for(family: &ChainFamilyFn, alpha: &Rational) -> Self {
        let ranges = (1..=family.p()).map(|i| family.layer_range(i)).collect();
        let caps = (1..=family.p())
            .map(|i| {
                let c = (family.layer_scale(i) / alpha).floor().to_integer();
                usize::try_from(c).unwrap_or(0)
            })
            .collect();
        InnerAlgorithm::CappedGreedy { ranges, caps }
    }
}

#[derive(Clone, Debug)]
pub struct SetSolver {
    alg: InnerAlgorithm,
    copy: usize,
    kept: ElementSet,
}

impl SetSolver {
    pub fn kept(&self) -> &ElementSet {
        &self.kept
    }

    fn improves(&self, u: ElementId, env: &SolverEnv) -> bool {
        let grown = self.kept.with(u);
        (env.feasible)(&grown) && env.value(&grown) > env.value(&self.kept)
    }
}

impl StreamingSolver for SetSolver {
    fn process(&mut self, u: ElementId, env: &SolverEnv) {
        if self.kept.contains(u) {
            return;
        }
        let keep = match &self.alg {
            InnerAlgorithm::Exact => true,
            InnerAlgorithm::Greedy => self.improves(u, env),
            InnerAlgorithm::RandomFeasible { seed } => {
                let coin = mix64(hash_path(*seed, &[self.copy, u as usize])) & 1 == 1;
                coin && (env.feasible)(&self.kept.with(u))
            }
            InnerAlgorithm::CappedGreedy { ranges, caps } => match ranges.iter().position(|r| r.contains(&u)) {
                Some(layer) => {
                    let used = self.kept.iter().filter(|v| ranges[layer].contains(v)).count();
                    used < caps[layer] && self.improves(u, env)
                }
                None => self.improves(u, env),
            },
        };
        if keep {
            self.kept.insert(u);
        }
    }

    fn solve(&self, env: &SolverEnv) -> Result<ElementSet> {
        match self.alg {
            InnerAlgorithm::Exact => {
                let (set, _) =
                    max_feasible_subset(self.kept.as_slice(), env.feasible, &|s| env.value(s), DEFAULT_NODE_BUDGET)?;
                Ok(set)
            }
            _ => Ok(self.kept.clone()),
        }
    }

    fn encode(&self, w: &mut BitWriter, ground_size: usize) {
        w.write(self.kept.len() as u64, id_width(ground_size + 1));
        for u in self.kept.iter() {
            w.write(u as u64, id_width(ground_size));
        }
    }
}

impl SolverFactory for InnerAlgorithm {
    fn create(&self, copy: usize) -> Box<dyn StreamingSolver> {
        Box::new(SetSolver { alg: self.clone(), copy, kept: ElementSet::new() })
    }

    fn decode(&self, copy: usize, r: &mut BitReader, ground_size: usize) -> Result<Box<dyn StreamingSolver>> {
        let len = r.read(id_width(ground_size + 1))? as usize;
        let mut kept = ElementSet::new();
        for _ in 0..len {
            let u = r.read(id_width(ground_size))?;
            if u as usize >= ground_size || !kept.insert(u as ElementId) {
                return Err(Error::MalformedMessage(format!("bad element {u} in solver state")));
            }
        }
        Ok(Box::new(SetSolver { alg: self.clone(), copy, kept }))
    }
}

/// What one streaming player feeds the solvers.
struct Stage<'a> {
    feasible: Box<dyn Fn(&ElementSet) -> bool + 'a>,
    objective: Option<Box<dyn ValueOracle + 'a>>,
    elements: Vec<ElementId>,
}

impl<'a> Stage<'a> {
    fn env(&self, ground_size: usize) -> SolverEnv<'_> {
        SolverEnv { ground_size, feasible: &*self.feasible, objective: self.objective.as_deref() }
    }
}

/// Known chain indices and decoded solver copies carried by one hop.
type Received = (Vec<u32>, Vec<Box<dyn StreamingSolver>>);

struct Relay {
    hops: Vec<Hop>,
    solvers: Vec<Box<dyn StreamingSolver>>,
    /// Indices `t^2..` known to the player after the last streaming player.
    known: Vec<u32>,
}

/// Runs streaming players `1..=streaming`. Player `i` decodes the previous hop,
/// appends its own index, streams its stage, and writes the next hop unless it
/// is the last streaming player and `send_last` is false.
fn relay<'a>(
    inst: &ChainInstance,
    streaming: usize,
    send_last: bool,
    ground_size: usize,
    alg: &dyn SolverFactory,
    copies: usize,
    mut stage: impl FnMut(usize, &[u32]) -> Result<Stage<'a>>,
) -> Result<Relay> {
    let iw = id_width(inst.n);
    let receive = |hop: &Hop, player: usize| -> Result<Received> {
        let mut r = BitReader::new(hop);
        let version = r.read(VERSION_BITS)?;
        if version != MESSAGE_VERSION as u64 {
            return Err(Error::MalformedMessage(format!("unknown message version {version}")));
        }
        let mut known = Vec::with_capacity(player);
        for _ in 2..player {
            known.push(r.read(iw)? as u32 + 1);
        }
        let solvers = (0..copies).map(|c| alg.decode(c, &mut r, ground_size)).collect::<Result<Vec<_>>>()?;
        if r.remaining() != 0 {
            return Err(Error::MalformedMessage(format!("{} trailing bits", r.remaining())));
        }
        if player <= inst.p {
            known.push(inst.index(player));
        }
        Ok((known, solvers))
    };

    let mut hops = Vec::with_capacity(streaming);
    let mut solvers: Vec<Box<dyn StreamingSolver>> = (0..copies).map(|c| alg.create(c)).collect();
    let mut known = Vec::new();
    for i in 1..=streaming {
        if i > 1 {
            (known, solvers) = receive(hops.last().expect("previous hop"), i)?;
        }
        let st = stage(i, &known)?;
        let env = st.env(ground_size);
        for &u in &st.elements {
            for s in solvers.iter_mut() {
                s.process(u, &env);
            }
        }
        if i < streaming || send_last {
            let mut w = BitWriter::new();
            w.write(MESSAGE_VERSION as u64, VERSION_BITS);
            for &t in &known {
                w.write(t as u64 - 1, iw);
            }
            for s in &solvers {
                s.encode(&mut w, ground_size);
            }
            hops.push(w.finish());
        }
    }
    if send_last {
        (known, solvers) = receive(hops.last().expect("last hop"), streaming + 1)?;
    }
    Ok(Relay { hops, solvers, known })
}

/// Copies needed to boost the single-copy protocol: `ceil(2 k^2 / eps)`.
pub fn boosted_copies(k: usize, eps: &Rational) -> Result<usize> {
    if *eps <= int(0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let c = (int(2 * (k * k) as i64) / eps).ceil().to_integer();
    usize::try_from(c).map_err(|_| Error::InvalidParameter("copy count overflows".into()))
}

/// Hidden-chain reduction. Player `i < k` forwards block elements whose bit
/// is set and knows the hidden elements of earlier blocks; player `k` forwards
/// its whole block and reads off the answer.
pub fn run_protocol1(inst: &ChainInstance, alg: &dyn SolverFactory, copies: usize) -> Result<Transcript> {
    inst.check_promise()?;
    if copies == 0 {
        return Err(Error::InvalidParameter("need at least one copy".into()));
    }
    let (k, m) = (inst.p, inst.n);
    let ground_size = k * m;
    let system_for = |known: &[u32]| -> Result<HiddenChainSystem> {
        // Later hidden elements are unknown; any choice gives the same oracle on N_{<=i}.
        let hidden = (1..k)
            .map(|j| {
                let offset = known.get(j - 1).map_or(0, |&t| t as usize - 1);
                ((j - 1) * m + offset) as ElementId
            })
            .collect();
        HiddenChainSystem::new(k, m, hidden)
    };
    let mut final_oracle = None;
    let relay = relay(inst, k, false, ground_size, alg, copies, |i, known| {
        let oracle = system_for(known)?.common_oracle();
        let elements = if i < k {
            let x = inst.string(i);
            (0..m).filter(|&j| x[j]).map(|j| ((i - 1) * m + j) as ElementId).collect()
        } else {
            final_oracle = Some(oracle.clone());
            ((k - 1) * m..k * m).map(|u| u as ElementId).collect()
        };
        Ok(Stage { feasible: Box::new(move |s| oracle.independent(s)), objective: None, elements })
    })?;
    let oracle = final_oracle.expect("last player ran");
    let feasible = |s: &ElementSet| oracle.independent(s);
    let env = SolverEnv { ground_size, feasible: &feasible, objective: None };
    let outputs = relay.solvers.iter().map(|s| s.solve(&env)).collect::<Result<Vec<_>>>()?;
    for t in &outputs {
        assert!(oracle.independent(t), "inner algorithm returned a dependent set");
    }
    let verdict = if outputs.iter().any(|t| t.len() >= 2) { Case::One } else { Case::Zero };
    Ok(Transcript { hops: relay.hops, verdict, outputs, value: None })
}

/// Public-coin precomputation for the coordinate reduction: node `path`
/// (0-based choices `t^2-1, ..., t^r-1`) holds `m` vectors of `[p]^k` avoiding
/// every coordinate of the hidden vectors on the path to it.
#[derive(Clone, Debug)]
pub struct PrecomputationTree {
    p: usize,
    m: usize,
    k: usize,
    seed: u64,
    nodes: HashMap<Vec<usize>, Vec<Vec<u16>>>,
}

impl PrecomputationTree {
    pub fn new(p: usize, m: usize, k: usize, seed: u64) -> Result<Self> {
        if p < 2 || m < 1 || k < 1 {
            return Err(Error::InvalidParameter(format!("need p >= 2, m >= 1, k >= 1 (got p={p}, m={m}, k={k})")));
        }
        let size = (m as u128).checked_pow(p as u32 - 2).unwrap_or(u128::MAX);
        if size > TREE_BUDGET {
            return Err(Error::PrecomputationBudget(size, TREE_BUDGET));
        }
        if (p as f64).powi(k as i32) > (u32::MAX as f64) + 1.0 {
            return Err(Error::InvalidParameter(format!("{p}^{k} vectors do not fit 32-bit ids")));
        }
        Ok(PrecomputationTree { p, m, k, seed, nodes: HashMap::new() })
    }

    /// Builds every node of depth at most `p - 2`.
    pub fn materialize_all(&mut self) {
        let mut frontier = vec![Vec::new()];
        for depth in 0..self.p - 1 {
            let mut next = Vec::new();
            for path in frontier {
                self.node(&path);
                if depth + 1 < self.p - 1 {
                    next.extend((0..self.m).map(|j| [path.as_slice(), &[j]].concat()));
                }
            }
            frontier = next;
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&mut self, path: &[usize]) -> &[Vec<u16>] {
        if !self.nodes.contains_key(path) {
            let prior: Vec<Vec<u16>> = (0..path.len()).map(|l| self.node(&path[..l])[path[l]].clone()).collect();
            let mut rng = Rng::new(hash_path(self.seed, path));
            let layer = sample_layer(self.p, self.m, self.k, &prior, &mut rng);
            self.nodes.insert(path.to_vec(), layer);
        }
        &self.nodes[path]
    }

    pub fn ground_size(&self) -> usize {
        self.p.pow(self.k as u32)
    }

    /// Base-`p` id of a vector.
    pub fn encode(&self, v: &[u16]) -> ElementId {
        v.iter().rev().fold(0u64, |acc, &c| acc * self.p as u64 + (c as u64 - 1)) as ElementId
    }

    pub fn decode(&self, u: ElementId) -> Vec<u16> {
        let mut rest = u as u64;
        (0..self.k)
            .map(|_| {
                let c = rest % self.p as u64;
                rest /= self.p as u64;
                c as u16 + 1
            })
            .collect()
    }

    /// Pairwise coordinate-disjointness: independence in all `k` coordinate matroids.
    pub fn independent(&self, set: &ElementSet) -> bool {
        let vs: Vec<Vec<u16>> = set.iter().map(|u| self.decode(u)).collect();
        vs.iter().enumerate().all(|(a, x)| vs[a + 1..].iter().all(|y| x.iter().zip(y).all(|(c, d)| c != d)))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TreeMode {
    #[default]
    Lazy,
    Exhaustive,
}

/// Coordinate reduction: player `r` streams the set-bit vectors of the tree
/// node selected by `t^2..t^r`; player `p` answers 1-case when the solver
/// returns at least two vectors.
pub fn run_protocol2(
    inst: &ChainInstance,
    k: usize,
    seed: u64,
    mode: TreeMode,
    alg: &dyn SolverFactory,
) -> Result<Transcript> {
    inst.check_promise()?;
    let (p, m) = (inst.p, inst.n);
    let mut tree = PrecomputationTree::new(p, m, k, seed)?;
    if mode == TreeMode::Exhaustive {
        tree.materialize_all();
    }
    let ground_size = tree.ground_size();
    let layers: Vec<Vec<ElementId>> = {
        let mut out = Vec::with_capacity(p - 1);
        let mut path: Vec<usize> = Vec::new();
        for r in 1..p {
            if r > 1 {
                path.push(inst.index(r) as usize - 1);
            }
            let vectors = tree.node(&path).to_vec();
            let ids = vectors.iter().map(|v| tree.encode(v)).collect();
            out.push(ids);
        }
        out
    };
    let tree = &tree;
    let relay = relay(inst, p - 1, true, ground_size, alg, 1, |r, known| {
        assert_eq!(known, &inst.indices[..r - 1]);
        let x = inst.string(r);
        let elements = (0..m).filter(|&j| x[j]).map(|j| layers[r - 1][j]).collect();
        Ok(Stage { feasible: Box::new(move |s| tree.independent(s)), objective: None, elements })
    })?;
    let feasible = |s: &ElementSet| tree.independent(s);
    let env = SolverEnv { ground_size, feasible: &feasible, objective: None };
    let outputs = relay.solvers.iter().map(|s| s.solve(&env)).collect::<Result<Vec<_>>>()?;
    let verdict = if outputs.iter().any(|t| t.len() >= 2) { Case::One } else { Case::Zero };
    Ok(Transcript { hops: relay.hops, verdict, outputs, value: None })
}

/// `1 + p / (1 + alpha)`.
pub fn protocol3_threshold(p: usize, alpha: &Rational) -> Result<Rational> {
    if *alpha <= int(0) {
        return Err(Error::InvalidParameter("alpha must be positive".into()));
    }
    Ok(int(1) + int(p as i64) / (int(1) + alpha))
}

/// Layered-family reduction on a chain instance with `p + 1` players over the
/// `p` graphs of `family`. Player `i` streams copies `(e, j)` of layer `i`
/// edges with `x^i_j = 1`; player `p + 1` evaluates the family with
/// `o_i = t^{i+1}` and compares against [`protocol3_threshold`].
pub fn run_protocol3(
    inst: &ChainInstance,
    family: &ChainFamilyFn,
    alpha: &Rational,
    alg: &dyn SolverFactory,
) -> Result<Transcript> {
    inst.check_promise()?;
    let p = family.p();
    if inst.p != p + 1 {
        return Err(Error::InvalidParameter(format!("{p} layers need a chain with {} players", p + 1)));
    }
    if family.copies() as usize != inst.n {
        return Err(Error::InvalidParameter("family copy count must equal the string length".into()));
    }
    let threshold = protocol3_threshold(p, alpha)?;
    let oracle = CommonOracle::new(matching_matroids(family))?;
    let ground_size = family.ground_size();
    let family_for = |known: &[u32]| -> Result<ChainFamilyFn> {
        let o = (0..p).map(|i| known.get(i).copied().unwrap_or(1)).collect();
        family.with_indices(o)
    };
    let relay = relay(inst, p, true, ground_size, alg, 1, |i, known| {
        let f = family_for(&known[..i - 1])?;
        let x = inst.string(i);
        let elements = (0..family.layers()[i - 1].edges().len())
            .flat_map(|e| (1..=inst.n as u32).filter(|&j| x[j as usize - 1]).map(move |j| (e, j)))
            .map(|(e, j)| family.element(i, e, j))
            .collect();
        let oracle = &oracle;
        Ok(Stage { feasible: Box::new(move |s| oracle.independent(s)), objective: Some(Box::new(f)), elements })
    })?;
    let f = family_for(&relay.known)?;
    let feasible = |s: &ElementSet| oracle.independent(s);
    let env = SolverEnv { ground_size, feasible: &feasible, objective: Some(&f) };
    let outputs = relay.solvers.iter().map(|s| s.solve(&env)).collect::<Result<Vec<_>>>()?;
    let value = f.eval(&outputs[0]);
    let verdict = if value >= threshold { Case::One } else { Case::Zero };
    Ok(Transcript { hops: relay.hops, verdict, outputs, value: Some(value) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::LayerGraph;
    use crate::num::frac;
    use proptest::prelude::{any, prop_assert_eq, proptest};

    fn run_uninterrupted(alg: &InnerAlgorithm, elements: &[ElementId], env: &SolverEnv) -> ElementSet {
        let mut s = alg.create(0);
        for &u in elements {
            s.process(u, env);
        }
        s.solve(env).unwrap()
    }

    #[test]
    fn promise_holds_for_forced_cases() {
        let mut rng = Rng::new(3);
        for case in [Case::Zero, Case::One] {
            for _ in 0..50 {
                let inst = sample_chain(5, 7, &mut rng, Some(case)).unwrap();
                assert_eq!(inst.case, case);
                for i in 1..5 {
                    assert_eq!(inst.string(i)[inst.index(i + 1) as usize - 1], case.bit());
                }
            }
        }
    }

    #[test]
    fn degenerate_chain() {
        let mut rng = Rng::new(1);
        let inst = sample_chain(2, 1, &mut rng, None).unwrap();
        assert_eq!(inst.indices, vec![1]);
        assert_eq!(inst.strings, vec![vec![inst.case.bit()]]);
        assert!(sample_chain(1, 3, &mut rng, None).is_err());
    }

    #[test]
    fn bit_io_round_trip() {
        let mut w = BitWriter::new();
        w.write(5, 3);
        w.write(0, 0);
        w.write(1023, 10);
        w.write(1, 1);
        let hop = w.finish();
        assert_eq!(hop.bits, 14);
        let mut r = BitReader::new(&hop);
        assert_eq!(r.read(3).unwrap(), 5);
        assert_eq!(r.read(10).unwrap(), 1023);
        assert_eq!(r.read(1).unwrap(), 1);
        assert!(r.read(1).is_err());
        assert_eq!(id_width(1), 0);
        assert_eq!(id_width(2), 1);
        assert_eq!(id_width(16), 4);
        assert_eq!(id_width(17), 5);
    }

    #[test]
    fn meter_of_nothing_is_zero() {
        assert_eq!(meter(&[]), 0);
        assert_eq!(meter(&[Hop::default()]), 0);
    }

    #[test]
    fn protocol1_exact_is_always_right() {
        let mut rng = Rng::new(21);
        for case in [Case::Zero, Case::One] {
            for _ in 0..10 {
                let inst = sample_chain(3, 4, &mut rng, Some(case)).unwrap();
                let t = run_protocol1(&inst, &InnerAlgorithm::Exact, 1).unwrap();
                assert_eq!(t.verdict, case);
                if case == Case::One {
                    assert_eq!(t.outputs[0].len(), 3);
                }
            }
        }
    }

    #[test]
    fn protocol1_greedy_zero_case() {
        let mut rng = Rng::new(22);
        for _ in 0..200 {
            let inst = sample_chain(4, 6, &mut rng, Some(Case::Zero)).unwrap();
            let t = run_protocol1(&inst, &InnerAlgorithm::Greedy, 1).unwrap();
            assert_eq!(t.verdict, Case::Zero);
        }
    }

    #[test]
    fn protocol1_meter_golden() {
        let mut rng = Rng::new(2024);
        let inst = sample_chain(4, 16, &mut rng, Some(Case::One)).unwrap();
        let t = run_protocol1(&inst, &InnerAlgorithm::Greedy, 1).unwrap();
        assert_eq!(t.hops.len(), 3);
        // 8 version bits + 2 index fields of 4 bits + 7-bit count + one 6-bit id.
        assert_eq!(meter(&t.hops), 29);
        let bits: Vec<usize> = t.hops.iter().map(|h| h.bits).collect();
        assert_eq!(bits, vec![21, 25, 29]);
    }

    #[test]
    fn protocol1_matches_uninterrupted_run() {
        let mut rng = Rng::new(23);
        for alg in [InnerAlgorithm::Greedy, InnerAlgorithm::Exact, InnerAlgorithm::RandomFeasible { seed: 4 }] {
            for _ in 0..20 {
                let inst = sample_chain(4, 5, &mut rng, None).unwrap();
                let t = run_protocol1(&inst, &alg, 1).unwrap();
                let hidden = (1..4).map(|j| ((j - 1) * 5 + inst.index(j + 1) as usize - 1) as ElementId).collect();
                let oracle = HiddenChainSystem::new(4, 5, hidden).unwrap().common_oracle();
                let mut elements = Vec::new();
                for i in 1..4 {
                    elements.extend((0..5).filter(|&j| inst.string(i)[j]).map(|j| ((i - 1) * 5 + j) as ElementId));
                }
                elements.extend(15..20);
                let feasible = |s: &ElementSet| oracle.independent(s);
                let env = SolverEnv { ground_size: 20, feasible: &feasible, objective: None };
                assert_eq!(t.outputs[0], run_uninterrupted(&alg, &elements, &env));
            }
        }
    }

    #[test]
    fn boosted_copy_count() {
        assert_eq!(boosted_copies(3, &frac(1, 2)).unwrap(), 36);
        assert_eq!(boosted_copies(2, &frac(3, 1)).unwrap(), 3);
    }

    #[test]
    fn copies_share_one_message() {
        let mut rng = Rng::new(5);
        let inst = sample_chain(3, 8, &mut rng, Some(Case::Zero)).unwrap();
        let one = run_protocol1(&inst, &InnerAlgorithm::RandomFeasible { seed: 1 }, 1).unwrap();
        let four = run_protocol1(&inst, &InnerAlgorithm::RandomFeasible { seed: 1 }, 4).unwrap();
        assert_eq!(four.outputs.len(), 4);
        assert_eq!(four.outputs[0], one.outputs[0]);
        assert!(meter(&four.hops) > meter(&one.hops));
    }

    proptest! {
        #[test]
        fn protocol1_zero_case_for_any_feasible_output(seed in any::<u64>(), k in 2usize..5, m in 1usize..6) {
            let mut rng = Rng::new(seed);
            let inst = sample_chain(k, m, &mut rng, Some(Case::Zero)).unwrap();
            let t = run_protocol1(&inst, &InnerAlgorithm::RandomFeasible { seed: rng.next_u64() }, 3).unwrap();
            prop_assert_eq!(t.verdict, Case::Zero);
        }

        #[test]
        fn solver_state_survives_encoding(seed in any::<u64>(), cut in 0usize..12) {
            let mut rng = Rng::new(seed);
            let elements: Vec<ElementId> = (0..12).map(|_| rng.index(20) as ElementId).collect();
            let sys = HiddenChainSystem::new(4, 5, vec![1, 7, 13]).unwrap().common_oracle();
            let feasible = |s: &ElementSet| sys.independent(s);
            let env = SolverEnv { ground_size: 20, feasible: &feasible, objective: None };
            for alg in [InnerAlgorithm::Exact, InnerAlgorithm::Greedy, InnerAlgorithm::RandomFeasible { seed }] {
                let mut first = alg.create(2);
                for &u in &elements[..cut] {
                    first.process(u, &env);
                }
                let mut w = BitWriter::new();
                first.encode(&mut w, 20);
                let hop = w.finish();
                let mut second = alg.decode(2, &mut BitReader::new(&hop), 20).unwrap();
                for &u in &elements[cut..] {
                    second.process(u, &env);
                }
                let mut whole = alg.create(2);
                for &u in &elements {
                    whole.process(u, &env);
                }
                prop_assert_eq!(second.solve(&env).unwrap(), whole.solve(&env).unwrap());
            }
        }
    }

    #[test]
    fn malformed_messages_are_rejected() {
        let hop = Hop { bytes: vec![0xff], bits: 3 };
        assert!(InnerAlgorithm::Exact.decode(0, &mut BitReader::new(&hop), 20).is_err());
        let mut w = BitWriter::new();
        w.write(1, 5);
        w.write(25, 5);
        let hop = w.finish();
        assert!(matches!(
            InnerAlgorithm::Exact.decode(0, &mut BitReader::new(&hop), 20),
            Err(Error::MalformedMessage(_))
        ));
    }

    #[test]
    fn tree_lazy_matches_exhaustive() {
        let mut lazy = PrecomputationTree::new(4, 3, 6, 99).unwrap();
        let mut full = PrecomputationTree::new(4, 3, 6, 99).unwrap();
        full.materialize_all();
        assert_eq!(full.node_count(), 1 + 3 + 9);
        for path in [vec![], vec![2], vec![1, 0], vec![2, 2]] {
            assert_eq!(lazy.node(&path).to_vec(), full.node(&path).to_vec());
        }
        assert_eq!(lazy.node_count(), 5);
    }

    #[test]
    fn tree_nodes_avoid_path_vectors() {
        let mut tree = PrecomputationTree::new(4, 5, 8, 7).unwrap();
        let o1 = tree.node(&[])[3].clone();
        let o2 = tree.node(&[3])[1].clone();
        for v in tree.node(&[3, 1]).to_vec() {
            assert!(v.iter().zip(&o1).all(|(a, b)| a != b));
            assert!(v.iter().zip(&o2).all(|(a, b)| a != b));
        }
        for v in tree.node(&[3]).to_vec() {
            assert_eq!(tree.decode(tree.encode(&v)), v);
        }
    }

    #[test]
    fn tree_budget_is_enforced() {
        assert!(matches!(PrecomputationTree::new(5, 50, 4, 0), Err(Error::PrecomputationBudget(125_000, _))));
        assert!(PrecomputationTree::new(4, 300, 4, 0).is_ok());
    }

    #[test]
    fn protocol2_exact_one_case() {
        let mut rng = Rng::new(31);
        for trial in 0..100 {
            let inst = sample_chain(3, 4, &mut rng, Some(Case::One)).unwrap();
            let t = run_protocol2(&inst, 12, trial, TreeMode::Lazy, &InnerAlgorithm::Exact).unwrap();
            assert_eq!(t.verdict, Case::One);
        }
    }

    #[test]
    fn protocol2_exact_zero_case() {
        let bound = crate::hardgen::success_lower_bound(3, 4, 20);
        assert!(bound > 0.9);
        let mut rng = Rng::new(32);
        let trials = 100;
        let correct = (0..trials)
            .filter(|&trial| {
                let inst = sample_chain(3, 4, &mut rng, Some(Case::Zero)).unwrap();
                let t = run_protocol2(&inst, 20, trial, TreeMode::Lazy, &InnerAlgorithm::Exact).unwrap();
                t.verdict == Case::Zero
            })
            .count();
        assert!(correct * 3 >= trials as usize * 2, "only {correct} of {trials} correct");
    }

    #[test]
    fn protocol2_modes_agree_and_meter_counts_indices() {
        let mut rng = Rng::new(33);
        let inst = sample_chain(4, 3, &mut rng, None).unwrap();
        let lazy = run_protocol2(&inst, 6, 5, TreeMode::Lazy, &InnerAlgorithm::Greedy).unwrap();
        let full = run_protocol2(&inst, 6, 5, TreeMode::Exhaustive, &InnerAlgorithm::Greedy).unwrap();
        assert_eq!(lazy.outputs, full.outputs);
        assert_eq!(lazy.hops, full.hops);
        // Hop r carries r - 1 indices of 2 bits after the 8-bit version.
        let id_bits = id_width(4usize.pow(6));
        for (r, hop) in lazy.hops.iter().enumerate() {
            let mut rd = BitReader::new(hop);
            rd.read(8).unwrap();
            for _ in 0..r {
                rd.read(2).unwrap();
            }
            let len = rd.read(id_width(4usize.pow(6) + 1)).unwrap() as usize;
            assert_eq!(rd.remaining(), len * id_bits as usize);
        }
    }

    #[test]
    fn protocol2_two_players_is_one_handoff() {
        let mut rng = Rng::new(34);
        let inst = sample_chain(2, 5, &mut rng, None).unwrap();
        let t = run_protocol2(&inst, 4, 0, TreeMode::Exhaustive, &InnerAlgorithm::Exact).unwrap();
        assert_eq!(t.hops.len(), 1);
        assert!(t.outputs[0].len() <= 1);
    }

    fn two_matchings() -> Vec<LayerGraph> {
        let g = LayerGraph::new(4, vec![(0, 2), (1, 3)]).unwrap();
        vec![g.clone(), g]
    }

    #[test]
    fn protocol3_exact_one_case() {
        let mut rng = Rng::new(41);
        let alpha = int(3);
        for _ in 0..10 {
            let inst = sample_chain(3, 4, &mut rng, Some(Case::One)).unwrap();
            let family = ChainFamilyFn::new(two_matchings(), 4, frac(1, 4), vec![1, 1]).unwrap();
            let t = run_protocol3(&inst, &family, &alpha, &InnerAlgorithm::Exact).unwrap();
            let value = t.value.unwrap();
            assert!(value >= int(2) / (int(1) + frac(1, 4)));
            assert_eq!(t.verdict, Case::One);
        }
    }

    #[test]
    fn protocol3_capped_zero_case() {
        let mut rng = Rng::new(42);
        let alpha = int(2);
        let layers = vec![
            LayerGraph::new(8, vec![(0, 4), (1, 5), (2, 6), (3, 7)]).unwrap(),
            LayerGraph::new(8, vec![(0, 4), (1, 5), (2, 6), (3, 7)]).unwrap(),
        ];
        for _ in 0..20 {
            let inst = sample_chain(3, 5, &mut rng, Some(Case::Zero)).unwrap();
            let family = ChainFamilyFn::new(layers.clone(), 5, frac(1, 4), vec![1, 1]).unwrap();
            let alg = InnerAlgorithm::capped_for(&family, &alpha);
            let t = run_protocol3(&inst, &family, &alpha, &alg).unwrap();
            assert!(t.value.clone().unwrap() < protocol3_threshold(2, &alpha).unwrap());
            assert_eq!(t.verdict, Case::Zero);
        }
    }

    #[test]
    fn protocol3_empty_strings() {
        let inst = ChainInstance {
            p: 3,
            n: 2,
            strings: vec![vec![false, false], vec![false, false]],
            indices: vec![1, 2],
            case: Case::Zero,
        };
        let family = ChainFamilyFn::new(two_matchings(), 2, frac(1, 4), vec![1, 1]).unwrap();
        let t = run_protocol3(&inst, &family, &int(1), &InnerAlgorithm::Exact).unwrap();
        assert!(t.outputs[0].is_empty());
        assert_eq!(t.value, Some(int(0)));
        assert_eq!(t.verdict, Case::Zero);
        assert!(run_protocol3(&inst, &family, &int(0), &InnerAlgorithm::Exact).is_err());
    }

    #[test]
    fn protocol3_greedy_matches_uninterrupted_run() {
        let mut rng = Rng::new(43);
        for _ in 0..10 {
            let inst = sample_chain(3, 3, &mut rng, None).unwrap();
            let family = ChainFamilyFn::new(two_matchings(), 3, frac(1, 4), vec![1, 1]).unwrap();
            let t = run_protocol3(&inst, &family, &int(3), &InnerAlgorithm::Greedy).unwrap();
            let f = family.with_indices(inst.indices.clone()).unwrap();
            let oracle = CommonOracle::new(matching_matroids(&f)).unwrap();
            let mut elements = Vec::new();
            for i in 1..=2 {
                for e in 0..2 {
                    elements.extend((1..=3u32).filter(|&j| inst.string(i)[j as usize - 1]).map(|j| f.element(i, e, j)));
                }
            }
            let feasible = |s: &ElementSet| oracle.independent(s);
            let env = SolverEnv { ground_size: f.ground_size(), feasible: &feasible, objective: Some(&f) };
            assert_eq!(t.outputs[0], run_uninterrupted(&InnerAlgorithm::Greedy, &elements, &env));
        }
    }
}
