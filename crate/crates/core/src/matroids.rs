//! Independence oracles.
//!
//! Every oracle is an immutable value behind [`MatroidRef`]. `independent` is the
//! unchecked hot-path query; `is_independent` validates ground-set membership first.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::ground::{ElementId, ElementSet, Rng};

pub trait Matroid: fmt::Debug + Send + Sync {
    /// Size of the id space `0..n` the oracle is defined over.
    fn ground_size(&self) -> usize;

    fn in_ground(&self, u: ElementId) -> bool {
        (u as usize) < self.ground_size()
    }

    /// Independence test without ground-set validation.
    fn independent(&self, set: &ElementSet) -> bool;

    fn is_independent(&self, set: &ElementSet) -> Result<bool> {
        if let Some(u) = set.iter().find(|&u| !self.in_ground(u)) {
            return Err(Error::OutOfGround { element: u, ground_size: self.ground_size() });
        }
        Ok(self.independent(set))
    }
}

pub type MatroidRef = Arc<dyn Matroid>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionMatroid {
    block_of: Vec<u32>,
    capacity: Vec<u32>,
}

impl PartitionMatroid {
    pub fn new(block_of: Vec<u32>, capacity: Vec<u32>) -> Result<Self> {
        if let Some(&b) = block_of.iter().find(|&&b| b as usize >= capacity.len()) {
            return Err(Error::InvalidParameter(format!(
                "block {b} has no capacity entry ({} blocks)",
                capacity.len()
            )));
        }
        Ok(PartitionMatroid { block_of, capacity })
    }

    /// Builds from explicit blocks; elements not listed are rejected.
    pub fn from_blocks(ground_size: usize, blocks: &[Vec<ElementId>], capacity: Vec<u32>) -> Result<Self> {
        let mut block_of = vec![u32::MAX; ground_size];
        for (b, members) in blocks.iter().enumerate() {
            for &u in members {
                let slot = block_of.get_mut(u as usize).ok_or(Error::OutOfGround { element: u, ground_size })?;
                if *slot != u32::MAX {
                    return Err(Error::InvalidParameter(format!("element {u} in two blocks")));
                }
                *slot = b as u32;
            }
        }
        if let Some(u) = block_of.iter().position(|&b| b == u32::MAX) {
            return Err(Error::InvalidParameter(format!("element {u} in no block")));
        }
        Self::new(block_of, capacity)
    }

    pub fn block_of(&self) -> &[u32] {
        &self.block_of
    }

    pub fn capacity(&self) -> &[u32] {
        &self.capacity
    }
}

impl Matroid for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.block_of.len()
    }

    fn independent(&self, set: &ElementSet) -> bool {
        let mut blocks: SmallVec<[u32; 16]> = set.iter().map(|u| self.block_of[u as usize]).collect();
        blocks.sort_unstable();
        let mut i = 0;
        while i < blocks.len() {
            let b = blocks[i];
            let mut j = i;
            while j < blocks.len() && blocks[j] == b {
                j += 1;
            }
            if (j - i) as u32 > self.capacity[b as usize] {
                return false;
            }
            i = j;
        }
        true
    }
}

/// Sets of size at most `rank`; `rank = n` is the free matroid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformMatroid {
    pub ground_size: usize,
    pub rank: usize,
}

impl UniformMatroid {
    pub fn free(n: usize) -> Self {
        UniformMatroid { ground_size: n, rank: n }
    }
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.ground_size
    }

    fn independent(&self, set: &ElementSet) -> bool {
        set.len() <= self.rank
    }
}

#[derive(Clone, Debug)]
pub struct ContractedMatroid {
    base: MatroidRef,
    contracted: ElementSet,
}

impl ContractedMatroid {
    pub fn contracted(&self) -> &ElementSet {
        &self.contracted
    }
}

impl Matroid for ContractedMatroid {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn in_ground(&self, u: ElementId) -> bool {
        self.base.in_ground(u) && !self.contracted.contains(u)
    }

    fn independent(&self, set: &ElementSet) -> bool {
        if self.contracted.is_empty() {
            return self.base.independent(set);
        }
        self.base.independent(&set.union(&self.contracted))
    }
}

/// `M / S`. Fails if `S` is dependent in `M`.
pub fn contract(base: &MatroidRef, set: &ElementSet) -> Result<MatroidRef> {
    if !base.is_independent(set)? {
        return Err(Error::InvalidParameter(format!("cannot contract dependent set {set:?}")));
    }
    Ok(Arc::new(ContractedMatroid { base: base.clone(), contracted: set.clone() }))
}

#[derive(Clone, Debug)]
pub struct TruncatedMatroid {
    base: MatroidRef,
    rank: usize,
}

impl Matroid for TruncatedMatroid {
    fn ground_size(&self) -> usize {
        self.base.ground_size()
    }

    fn in_ground(&self, u: ElementId) -> bool {
        self.base.in_ground(u)
    }

    fn independent(&self, set: &ElementSet) -> bool {
        set.len() <= self.rank && self.base.independent(set)
    }
}

pub fn truncate(base: &MatroidRef, rank: usize) -> MatroidRef {
    Arc::new(TruncatedMatroid { base: base.clone(), rank })
}

/// Greedy rank of `set` in `m`.
pub fn rank(m: &dyn Matroid, set: &ElementSet) -> usize {
    let mut basis = ElementSet::new();
    for u in set.iter() {
        let cand = basis.with(u);
        if m.independent(&cand) {
            basis = cand;
        }
    }
    basis.len()
}

pub fn full_rank(m: &dyn Matroid) -> usize {
    let all: ElementSet = (0..m.ground_size() as ElementId).filter(|&u| m.in_ground(u)).collect();
    rank(m, &all)
}

/// Intersection of matroids over one ground set, exposed only through the
/// common-independence query.
#[derive(Clone, Debug)]
pub struct CommonOracle {
    matroids: Vec<MatroidRef>,
}

impl CommonOracle {
    pub fn new(matroids: Vec<MatroidRef>) -> Result<Self> {
        let first = matroids.first().ok_or(Error::NoMatroids)?;
        let n = first.ground_size();
        if let Some(m) = matroids.iter().find(|m| m.ground_size() != n) {
            return Err(Error::GroundMismatch(n, m.ground_size()));
        }
        Ok(CommonOracle { matroids })
    }

    pub fn ground_size(&self) -> usize {
        self.matroids[0].ground_size()
    }

    pub fn count(&self) -> usize {
        self.matroids.len()
    }

    pub fn independent(&self, set: &ElementSet) -> bool {
        self.matroids.iter().all(|m| m.independent(set))
    }

    pub fn is_independent(&self, set: &ElementSet) -> Result<bool> {
        for m in &self.matroids {
            if !m.is_independent(set)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn common_independent(matroids: &[MatroidRef], set: &ElementSet) -> Result<bool> {
    CommonOracle::new(matroids.to_vec())?.is_independent(set)
}

/// `k` consecutive blocks of `m` elements with hidden elements `u_1..u_{k-1}`.
/// Matroid `i` caps `N_{<=i}` minus the earlier hidden elements at one element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HiddenChainSystem {
    k: usize,
    m: usize,
    hidden: Vec<ElementId>,
}

impl HiddenChainSystem {
    pub fn new(k: usize, m: usize, hidden: Vec<ElementId>) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::InvalidParameter("hidden chain needs k >= 1 and m >= 1".into()));
        }
        if hidden.len() != k - 1 {
            return Err(Error::InvalidParameter(format!("expected {} hidden elements, got {}", k - 1, hidden.len())));
        }
        for (i, &u) in hidden.iter().enumerate() {
            if u as usize / m != i {
                return Err(Error::InvalidParameter(format!("hidden element {u} not in block {}", i + 1)));
            }
        }
        Ok(HiddenChainSystem { k, m, hidden })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ground_size(&self) -> usize {
        self.k * self.m
    }

    pub fn hidden(&self) -> &[ElementId] {
        &self.hidden
    }

    /// Element ids of block `i` (1-based).
    pub fn block(&self, i: usize) -> std::ops::Range<ElementId> {
        ((i - 1) * self.m) as ElementId..(i * self.m) as ElementId
    }

    /// 1-based block index of `u`.
    pub fn block_index(&self, u: ElementId) -> usize {
        u as usize / self.m + 1
    }

    /// `M_i` as a partition matroid: the capped block plus singleton blocks.
    pub fn matroid(&self, i: usize) -> Result<PartitionMatroid> {
        if i == 0 || i > self.k {
            return Err(Error::IndexOutOfRange { index: i, max: self.k });
        }
        let n = self.ground_size();
        let limit = (i * self.m) as ElementId;
        let earlier = &self.hidden[..i - 1];
        let mut block_of = Vec::with_capacity(n);
        let mut capacity = vec![1];
        for u in 0..n as ElementId {
            if u < limit && !earlier.contains(&u) {
                block_of.push(0);
            } else {
                block_of.push(capacity.len() as u32);
                capacity.push(1);
            }
        }
        PartitionMatroid::new(block_of, capacity)
    }

    pub fn matroids(&self) -> Vec<MatroidRef> {
        (1..=self.k).map(|i| Arc::new(self.matroid(i).expect("index in range")) as MatroidRef).collect()
    }

    /// The common-oracle-only surface.
    pub fn common_oracle(&self) -> CommonOracle {
        CommonOracle::new(self.matroids()).expect("non-empty, shared ground")
    }

    /// Exhaustive check that all elements of `N_i` are interchangeable inside
    /// common independent subsets of `N_{<=i}`. Returns violating `(S, out, in)`.
    pub fn check_block_equivalence(&self) -> Result<Vec<(ElementSet, ElementId, ElementId)>> {
        let n = self.ground_size();
        if n > 12 {
            return Err(Error::TooLarge(n, 12));
        }
        let oracle = self.common_oracle();
        let mut bad = Vec::new();
        for i in 1..=self.k {
            let prefix = i * self.m;
            for mask in 0u64..(1 << prefix) {
                let s = ElementSet::from_mask(mask);
                if !oracle.independent(&s) {
                    continue;
                }
                for out in s.iter().filter(|&u| self.block_index(u) == i) {
                    for inn in self.block(i).filter(|&v| !s.contains(v)) {
                        let swapped = s.without(out).with(inn);
                        if !oracle.independent(&swapped) {
                            bad.push((s.clone(), out, inn));
                        }
                    }
                }
            }
        }
        Ok(bad)
    }
}

/// Vectors in `[p]^k`; coordinate `i` induces a partition matroid with one
/// block per value and capacity one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateSystem {
    p: usize,
    k: usize,
    coords: Vec<Vec<u16>>,
}

impl CoordinateSystem {
    pub fn new(p: usize, k: usize, coords: Vec<Vec<u16>>) -> Result<Self> {
        for (e, v) in coords.iter().enumerate() {
            if v.len() != k {
                return Err(Error::InvalidParameter(format!("element {e} has {} coordinates, expected {k}", v.len())));
            }
            if v.iter().any(|&c| c == 0 || c as usize > p) {
                return Err(Error::InvalidParameter(format!("element {e} has a coordinate outside 1..={p}")));
            }
        }
        Ok(CoordinateSystem { p, k, coords })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coords(&self) -> &[Vec<u16>] {
        &self.coords
    }

    pub fn ground_size(&self) -> usize {
        self.coords.len()
    }

    pub fn matroids(&self) -> Vec<MatroidRef> {
        (1..=self.k).map(|i| Arc::new(coordinate_matroid(self, i).expect("index in range")) as MatroidRef).collect()
    }
}

pub fn coordinate_matroid(sys: &CoordinateSystem, i: usize) -> Result<PartitionMatroid> {
    if i == 0 || i > sys.k {
        return Err(Error::IndexOutOfRange { index: i, max: sys.k });
    }
    let block_of = sys.coords.iter().map(|v| v[i - 1] as u32 - 1).collect();
    PartitionMatroid::new(block_of, vec![1; sys.p])
}

/// Outcome of [`check_matroid_axioms`]. Violation lists are capped.
#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub exhaustive: bool,
    pub sets_checked: u64,
    pub empty_dependent: bool,
    /// `(independent set, dependent subset)`.
    pub hereditary: Vec<(ElementSet, ElementSet)>,
    /// `(A, B)` with `|A| < |B|` both independent and no augmenting element.
    pub exchange: Vec<(ElementSet, ElementSet)>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        !self.empty_dependent && self.hereditary.is_empty() && self.exchange.is_empty()
    }
}

const MAX_REPORTED: usize = 16;
pub const EXHAUSTIVE_AXIOM_LIMIT: usize = 12;
pub const SAMPLED_AXIOM_LIMIT: usize = 20;

/// Exhaustive for ground size <= 12, sampled (seeded) up to 20.
pub fn check_matroid_axioms(m: &dyn Matroid) -> Result<AxiomReport> {
    let n = m.ground_size();
    if n > SAMPLED_AXIOM_LIMIT {
        return Err(Error::TooLarge(n, SAMPLED_AXIOM_LIMIT));
    }
    let mut report = AxiomReport { empty_dependent: !m.independent(&ElementSet::new()), ..Default::default() };
    if n <= EXHAUSTIVE_AXIOM_LIMIT {
        exhaustive_axioms(m, n, &mut report);
    } else {
        sampled_axioms(m, n, &mut report, &mut Rng::new(0x5eed));
    }
    Ok(report)
}

fn exhaustive_axioms(m: &dyn Matroid, n: usize, report: &mut AxiomReport) {
    report.exhaustive = true;
    let total = 1usize << n;
    let indep: Vec<bool> = (0..total).map(|mask| m.independent(&ElementSet::from_mask(mask as u64))).collect();
    report.sets_checked = total as u64;
    let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for mask in 0..total {
        if !indep[mask] {
            continue;
        }
        by_size[mask.count_ones() as usize].push(mask);
        let mut rest = mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest ^= bit;
            if !indep[mask ^ bit] && report.hereditary.len() < MAX_REPORTED {
                report
                    .hereditary
                    .push((ElementSet::from_mask(mask as u64), ElementSet::from_mask((mask ^ bit) as u64)));
            }
        }
    }
    // With heredity in place, exchange for |B| = |A| + 1 implies the general case.
    for size in 0..n {
        for &a in &by_size[size] {
            for &b in &by_size[size + 1] {
                let mut cand = b & !a;
                let mut ok = false;
                while cand != 0 {
                    let bit = cand & cand.wrapping_neg();
                    cand ^= bit;
                    if indep[a | bit] {
                        ok = true;
                        break;
                    }
                }
                if !ok && report.exchange.len() < MAX_REPORTED {
                    report.exchange.push((ElementSet::from_mask(a as u64), ElementSet::from_mask(b as u64)));
                }
            }
        }
    }
}

fn random_independent(m: &dyn Matroid, n: usize, rng: &mut Rng) -> ElementSet {
    let mut order: Vec<ElementId> = (0..n as ElementId).filter(|&u| m.in_ground(u)).collect();
    rng.shuffle(&mut order);
    let mut s = ElementSet::new();
    let stop = rng.index(n + 1);
    for u in order {
        if s.len() >= stop {
            break;
        }
        let c = s.with(u);
        if m.independent(&c) {
            s = c;
        }
    }
    s
}

fn sampled_axioms(m: &dyn Matroid, n: usize, report: &mut AxiomReport, rng: &mut Rng) {
    const TRIALS: u64 = 20_000;
    report.sets_checked = TRIALS;
    for _ in 0..TRIALS {
        let b = random_independent(m, n, rng);
        let sub: ElementSet = b.iter().filter(|_| rng.coin()).collect();
        if !m.independent(&sub) && report.hereditary.len() < MAX_REPORTED {
            report.hereditary.push((b.clone(), sub));
        }
        let a = random_independent(m, n, rng);
        let (a, b) = if a.len() < b.len() { (a, b) } else { (b, a) };
        if a.len() < b.len()
            && !b.difference(&a).iter().any(|x| m.independent(&a.with(x)))
            && report.exchange.len() < MAX_REPORTED
        {
            report.exchange.push((a, b));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc<M: Matroid + 'static>(m: M) -> MatroidRef {
        Arc::new(m)
    }

    fn blocks_01_23() -> MatroidRef {
        arc(PartitionMatroid::new(vec![0, 0, 1, 1], vec![1, 1]).unwrap())
    }

    #[test]
    fn empty_set_always_independent() {
        let hc = HiddenChainSystem::new(3, 2, vec![1, 2]).unwrap();
        for m in hc.matroids() {
            assert!(m.is_independent(&ElementSet::new()).unwrap());
        }
        assert!(blocks_01_23().is_independent(&ElementSet::new()).unwrap());
    }

    #[test]
    fn hidden_chain_examples() {
        let hc = HiddenChainSystem::new(2, 2, vec![0]).unwrap();
        let oracle = hc.common_oracle();
        assert!(oracle.is_independent(&ElementSet::from([0, 2])).unwrap());
        let m2 = hc.matroid(2).unwrap();
        assert!(!m2.is_independent(&ElementSet::from([1, 2])).unwrap());

        let hc3 = HiddenChainSystem::new(3, 2, vec![1, 2]).unwrap();
        for last in hc3.block(3) {
            assert!(hc3.common_oracle().is_independent(&ElementSet::from([1, 2, last])).unwrap());
        }
        assert!(!hc3.common_oracle().independent(&ElementSet::from([0, 2, 4])));
    }

    #[test]
    fn hidden_chain_validation() {
        assert!(HiddenChainSystem::new(2, 2, vec![2]).is_err());
        assert!(HiddenChainSystem::new(3, 2, vec![0]).is_err());
        assert!(HiddenChainSystem::new(2, 2, vec![1]).unwrap().matroid(3).is_err());
    }

    #[test]
    fn coordinate_examples() {
        let sys = CoordinateSystem::new(3, 2, vec![vec![1, 2], vec![1, 3], vec![2, 2], vec![2, 2]]).unwrap();
        let both = ElementSet::from([0, 1]);
        assert!(!coordinate_matroid(&sys, 1).unwrap().independent(&both));
        assert!(coordinate_matroid(&sys, 2).unwrap().independent(&both));
        assert!(!coordinate_matroid(&sys, 1).unwrap().independent(&ElementSet::from([2, 3])));
        assert_eq!(coordinate_matroid(&sys, 3), Err(Error::IndexOutOfRange { index: 3, max: 2 }));
        assert!(CoordinateSystem::new(3, 2, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn contract_examples() {
        let m = blocks_01_23();
        let c = contract(&m, &ElementSet::from([0])).unwrap();
        assert!(!c.is_independent(&ElementSet::from([1])).unwrap());
        assert!(c.is_independent(&ElementSet::from([2])).unwrap());
        assert!(c.is_independent(&ElementSet::from([0])).is_err());
        assert!(contract(&m, &ElementSet::from([0, 1])).is_err());

        let none = contract(&m, &ElementSet::new()).unwrap();
        for mask in 0..16u64 {
            let s = ElementSet::from_mask(mask);
            assert_eq!(none.independent(&s), m.independent(&s));
        }
    }

    #[test]
    fn contract_matches_definition_exhaustively() {
        let hc = HiddenChainSystem::new(2, 3, vec![1]).unwrap();
        for base in hc.matroids() {
            for cmask in 0u64..64 {
                let c = ElementSet::from_mask(cmask);
                let Ok(con) = contract(&base, &c) else {
                    assert!(!base.independent(&c));
                    continue;
                };
                for tmask in 0u64..64 {
                    if tmask & cmask != 0 {
                        continue;
                    }
                    let t = ElementSet::from_mask(tmask);
                    assert_eq!(con.is_independent(&t).unwrap(), base.independent(&t.union(&c)));
                }
            }
        }
    }

    #[test]
    fn truncate_examples() {
        let free = arc(UniformMatroid::free(3));
        assert!(truncate(&free, 0).is_independent(&ElementSet::new()).unwrap());
        assert!(!truncate(&free, 1).is_independent(&ElementSet::from([0, 1])).unwrap());
        assert!(truncate(&free, 2).is_independent(&ElementSet::from([0, 1])).unwrap());
    }

    #[test]
    fn rank_examples() {
        let m = PartitionMatroid::new(vec![0, 0, 1], vec![1, 1]).unwrap();
        assert_eq!(rank(&m, &ElementSet::new()), 0);
        assert_eq!(rank(&m, &ElementSet::from([0, 1, 2])), 2);
        let t = truncate(&arc(UniformMatroid::free(5)), 2);
        assert_eq!(rank(t.as_ref(), &ElementSet::from([0, 1, 2, 3, 4])), 2);
    }

    #[test]
    fn rank_monotone_submodular_exhaustive() {
        let hc = HiddenChainSystem::new(2, 5, vec![3]).unwrap();
        for m in hc.matroids() {
            let r: Vec<usize> = (0u64..1024).map(|s| rank(m.as_ref(), &ElementSet::from_mask(s))).collect();
            for a in 0usize..1024 {
                for x in 0..10 {
                    let ax = a | (1 << x);
                    assert!(r[ax] >= r[a]);
                }
                // Local submodularity: r(A+x) + r(A+y) >= r(A+x+y) + r(A).
                for x in 0..10 {
                    for y in x + 1..10 {
                        if a & (1 << x) != 0 || a & (1 << y) != 0 {
                            continue;
                        }
                        assert!(r[a | 1 << x] + r[a | 1 << y] >= r[a | 1 << x | 1 << y] + r[a]);
                    }
                }
            }
        }
    }

    #[test]
    fn common_independent_checks_ground() {
        assert_eq!(common_independent(&[], &ElementSet::new()), Err(Error::NoMatroids));
        let mixed = vec![arc(UniformMatroid::free(3)), arc(UniformMatroid::free(4))];
        assert_eq!(common_independent(&mixed, &ElementSet::new()), Err(Error::GroundMismatch(3, 4)));
        assert!(common_independent(&mixed[..1], &ElementSet::from([0, 2])).unwrap());
    }

    #[test]
    fn axioms_hold_for_builtins() {
        let p = PartitionMatroid::new(vec![0, 0, 1, 1, 2, 2], vec![1, 2, 0]).unwrap();
        assert!(check_matroid_axioms(&p).unwrap().is_clean());
        let hc = HiddenChainSystem::new(2, 3, vec![2]).unwrap();
        for m in hc.matroids() {
            let r = check_matroid_axioms(m.as_ref()).unwrap();
            assert!(r.exhaustive && r.is_clean(), "{r:?}");
        }
        let sys = CoordinateSystem::new(3, 2, (0..9).map(|e| vec![e % 3 + 1, e / 3 + 1]).collect()).unwrap();
        for m in sys.matroids() {
            assert!(check_matroid_axioms(m.as_ref()).unwrap().is_clean());
        }
        let big = HiddenChainSystem::new(4, 4, vec![0, 5, 10]).unwrap();
        for m in big.matroids() {
            let r = check_matroid_axioms(m.as_ref()).unwrap();
            assert!(!r.exhaustive && r.is_clean());
        }
        assert!(check_matroid_axioms(&UniformMatroid::free(21)).is_err());
    }

    #[derive(Debug)]
    struct RejectsZero;

    impl Matroid for RejectsZero {
        fn ground_size(&self) -> usize {
            4
        }

        fn independent(&self, set: &ElementSet) -> bool {
            set.as_slice() != [0]
        }
    }

    #[derive(Debug)]
    struct NoExchange;

    impl Matroid for NoExchange {
        fn ground_size(&self) -> usize {
            3
        }

        // Independent sets: subsets of {0} and of {1, 2}.
        fn independent(&self, set: &ElementSet) -> bool {
            !(set.contains(0) && set.len() > 1)
        }
    }

    #[test]
    fn axioms_flag_broken_oracles() {
        let r = check_matroid_axioms(&RejectsZero).unwrap();
        assert!(!r.hereditary.is_empty());
        assert!(r.hereditary.iter().any(|(_, sub)| *sub == ElementSet::from([0])));
        let r = check_matroid_axioms(&NoExchange).unwrap();
        assert!(r.hereditary.is_empty());
        assert!(r.exchange.contains(&(ElementSet::from([0]), ElementSet::from([1, 2]))));
    }

    #[test]
    fn hidden_chain_block_equivalence() {
        for (k, m) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 3), (2, 6), (3, 4)] {
            let mut rng = Rng::new((k * 31 + m) as u64);
            let hidden = (0..k - 1).map(|i| (i * m + rng.index(m)) as ElementId).collect();
            let hc = HiddenChainSystem::new(k, m, hidden).unwrap();
            assert!(hc.check_block_equivalence().unwrap().is_empty(), "k={k} m={m}");
        }
    }

    #[test]
    fn maximum_common_independent_has_size_k() {
        let hc = HiddenChainSystem::new(3, 3, vec![2, 4]).unwrap();
        let oracle = hc.common_oracle();
        let best = (0u64..512)
            .filter(|&s| oracle.independent(&ElementSet::from_mask(s)))
            .map(|s| s.count_ones())
            .max()
            .unwrap();
        assert_eq!(best, 3);
    }
}
