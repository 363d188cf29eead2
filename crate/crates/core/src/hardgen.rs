//! Hard instance generators and the random benchmark corpus.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ground::{ElementId, ElementSet, Rng, Stream};
use crate::matching::LayerGraph;
use crate::matroids::{CoordinateSystem, HiddenChainSystem, MatroidRef, PartitionMatroid};
use crate::num::{int, Rational};
use crate::submodular::{Cardinality, ChainFamilyFn, Coverage, Cut};

#[derive(Clone, Debug)]
pub struct HiddenChainInstance {
    pub system: HiddenChainSystem,
    /// Block 1 first, then block 2, ...; uniformly shuffled inside each block.
    pub stream: Stream,
}

impl HiddenChainInstance {
    pub fn objective(&self) -> Cardinality {
        Cardinality { ground_size: self.system.ground_size() }
    }
}

pub fn gen_hidden_chain(k: usize, m: usize, rng: &mut Rng) -> Result<HiddenChainInstance> {
    if k < 2 || m < 1 {
        return Err(Error::InvalidParameter(format!("hidden chain needs k >= 2 and m >= 1 (got k={k}, m={m})")));
    }
    let hidden = (0..k - 1).map(|i| (i * m + rng.index(m)) as ElementId).collect();
    let system = HiddenChainSystem::new(k, m, hidden)?;
    let mut order = Vec::with_capacity(k * m);
    for i in 1..=k {
        let mut block: Vec<ElementId> = system.block(i).collect();
        rng.shuffle(&mut block);
        order.extend(block);
    }
    let stream = Stream::new(order, k * m)?;
    Ok(HiddenChainInstance { system, stream })
}

/// Layers `S_1..S_{p-1}` of `m` vectors in `[p]^k`, with one hidden vector per layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateInstance {
    pub p: usize,
    pub m: usize,
    pub k: usize,
    pub layers: Vec<Vec<Vec<u16>>>,
    /// Position of the hidden vector inside each layer.
    pub hidden_index: Vec<usize>,
}

impl CoordinateInstance {
    /// Element id of position `idx` in layer `r` (1-based).
    pub fn element(&self, r: usize, idx: usize) -> ElementId {
        ((r - 1) * self.m + idx) as ElementId
    }

    pub fn system(&self) -> CoordinateSystem {
        let coords = self.layers.iter().flatten().cloned().collect();
        CoordinateSystem::new(self.p, self.k, coords).expect("generated coordinates are in range")
    }

    pub fn hidden(&self) -> ElementSet {
        self.hidden_index.iter().enumerate().map(|(r, &i)| self.element(r + 1, i)).collect()
    }

    pub fn hidden_vectors(&self) -> Vec<Vec<u16>> {
        self.hidden_index.iter().enumerate().map(|(r, &i)| self.layers[r][i].clone()).collect()
    }

    /// `S_1` then `S_2`, ..., each in sampling order.
    pub fn stream(&self) -> Stream {
        Stream::identity(self.layers.len() * self.m)
    }

    pub fn ground_size(&self) -> usize {
        self.layers.len() * self.m
    }
}

/// `m` vectors drawn with replacement from the vectors that differ from every
/// `prior` vector in every coordinate. The domain is a product set, so each
/// coordinate is drawn independently from its allowed values.
pub fn sample_layer(p: usize, m: usize, k: usize, prior: &[Vec<u16>], rng: &mut Rng) -> Vec<Vec<u16>> {
    let allowed: Vec<Vec<u16>> =
        (0..k).map(|c| (1..=p as u16).filter(|v| prior.iter().all(|o| o[c] != *v)).collect()).collect();
    assert!(allowed.iter().all(|a| !a.is_empty()), "sampling domain is empty");
    (0..m)
        .map(|_| {
            let v: Vec<u16> = allowed.iter().map(|a| a[rng.index(a.len())]).collect();
            assert!(prior.iter().all(|o| o.iter().zip(&v).all(|(x, y)| x != y)));
            v
        })
        .collect()
}

pub fn gen_coordinate(p: usize, m: usize, k: usize, rng: &mut Rng) -> Result<CoordinateInstance> {
    if p < 2 || m < 1 || k < 1 {
        return Err(Error::InvalidParameter(format!("need p >= 2, m >= 1, k >= 1 (got p={p}, m={m}, k={k})")));
    }
    if p > u16::MAX as usize {
        return Err(Error::InvalidParameter("alphabet too large".into()));
    }
    let mut layers = Vec::with_capacity(p - 1);
    let mut hidden_index = Vec::with_capacity(p - 1);
    let mut prior: Vec<Vec<u16>> = Vec::new();
    for _ in 1..p {
        let layer = sample_layer(p, m, k, &prior, rng);
        let idx = rng.index(m);
        prior.push(layer[idx].clone());
        layers.push(layer);
        hidden_index.push(idx);
    }
    Ok(CoordinateInstance { p, m, k, layers, hidden_index })
}

/// Every pair of non-hidden elements shares at least one coordinate.
pub fn is_successful(inst: &CoordinateInstance) -> bool {
    let hidden = inst.hidden();
    let rest: Vec<&Vec<u16>> = inst
        .layers
        .iter()
        .enumerate()
        .flat_map(|(r, layer)| layer.iter().enumerate().map(move |(i, v)| (inst.element(r + 1, i), v)))
        .filter(|(u, _)| !hidden.contains(*u))
        .map(|(_, v)| v)
        .collect();
    rest.iter().enumerate().all(|(a, x)| rest[a + 1..].iter().all(|y| x.iter().zip(y.iter()).any(|(p, q)| p == q)))
}

/// Lower bound `1 - C(p m, 2) e^{-k/p}` on the success probability.
pub fn success_lower_bound(p: usize, m: usize, k: usize) -> f64 {
    let pm = (p * m) as f64;
    1.0 - pm * (pm - 1.0) / 2.0 * (-(k as f64) / p as f64).exp()
}

#[derive(Clone, Debug)]
pub struct ChainFamilyInstance {
    pub family: ChainFamilyFn,
    /// Two partition matroids capping every (layer, vertex) at one edge copy:
    /// one over left endpoints, one over right endpoints.
    pub matroids: Vec<MatroidRef>,
    /// Layer by layer, shuffled inside each layer.
    pub stream: Stream,
}

/// Left- and right-endpoint partition matroids capping every vertex of every layer at one edge copy.
pub fn matching_partitions(family: &ChainFamilyFn) -> [PartitionMatroid; 2] {
    let n = crate::submodular::ValueOracle::ground_size(family);
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    let mut base = 0u32;
    for (li, g) in family.layers().iter().enumerate() {
        for u in family.layer_range(li + 1) {
            let (l, r) = g.oriented(family.decode(u).edge);
            left.push(base + l);
            right.push(base + r);
        }
        base += g.vertices();
    }
    let caps = vec![1; base as usize];
    [
        PartitionMatroid::new(left, caps.clone()).expect("blocks in range"),
        PartitionMatroid::new(right, caps).expect("blocks in range"),
    ]
}

pub fn matching_matroids(family: &ChainFamilyFn) -> Vec<MatroidRef> {
    matching_partitions(family).into_iter().map(|m| Arc::new(m) as MatroidRef).collect()
}

/// Maximum matching of every layer at its hidden copy index.
pub fn planted_solution(family: &ChainFamilyFn) -> ElementSet {
    let mut set = ElementSet::new();
    for (li, g) in family.layers().iter().enumerate() {
        for e in g.max_matching() {
            set.insert(family.element(li + 1, e, family.indices()[li]));
        }
    }
    set
}

pub fn gen_chain_family_instance(
    p: usize,
    layers: Vec<LayerGraph>,
    n: u32,
    eps: Rational,
    o: Vec<u32>,
    rng: &mut Rng,
) -> Result<ChainFamilyInstance> {
    if layers.len() != p {
        return Err(Error::InvalidParameter(format!("expected {p} layers, got {}", layers.len())));
    }
    let family = ChainFamilyFn::new(layers, n, eps, o)?;
    let matroids = matching_matroids(&family);
    let mut order = Vec::new();
    for i in 1..=p {
        let mut ids: Vec<ElementId> = family.layer_range(i).collect();
        rng.shuffle(&mut ids);
        order.extend(ids);
    }
    let stream = Stream::new(order, crate::submodular::ValueOracle::ground_size(&family))?;
    Ok(ChainFamilyInstance { family, matroids, stream })
}

/// Random bipartite multigraph with `side` vertices per side; each of the
/// `side * side` vertex pairs becomes an edge with probability 1/2.
pub fn random_layer(side: u32, rng: &mut Rng) -> LayerGraph {
    let mut edges = Vec::new();
    for a in 0..side {
        for b in 0..side {
            if rng.coin() {
                edges.push((a, side + b));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, side));
    }
    LayerGraph::new(2 * side, edges).expect("bipartite by construction")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusObjective {
    Coverage,
    Cut,
}

/// Random instance for benchmarking: `k` partition matroids and a coverage or cut objective.
#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub partitions: Vec<PartitionMatroid>,
    pub objective: RandomObjective,
    pub stream: Stream,
}

#[derive(Clone, Debug)]
pub enum RandomObjective {
    Coverage(Coverage),
    Cut(Cut),
}

impl RandomInstance {
    pub fn matroids(&self) -> Vec<MatroidRef> {
        self.partitions.iter().map(|p| Arc::new(p.clone()) as MatroidRef).collect()
    }

    pub fn value_oracle(&self) -> &dyn crate::submodular::ValueOracle {
        match &self.objective {
            RandomObjective::Coverage(c) => c,
            RandomObjective::Cut(c) => c,
        }
    }
}

pub fn gen_random_partition(n: usize, k: usize, objective: CorpusObjective, rng: &mut Rng) -> Result<RandomInstance> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and k >= 1".into()));
    }
    let partitions = (0..k)
        .map(|_| {
            let blocks = 2 + rng.index(n.div_ceil(2).max(1));
            let block_of = (0..n).map(|_| rng.below(blocks as u64) as u32).collect();
            let capacity = (0..blocks).map(|_| 1 + rng.below(2) as u32).collect();
            PartitionMatroid::new(block_of, capacity)
        })
        .collect::<Result<Vec<_>>>()?;
    let objective = match objective {
        CorpusObjective::Coverage => {
            let items = 2 * n;
            let covers =
                (0..n).map(|_| (0..1 + rng.index(4)).map(|_| rng.below(items as u64) as u32).collect()).collect();
            let weights = (0..items).map(|_| int(1 + rng.below(9) as i64)).collect();
            RandomObjective::Coverage(Coverage::new(covers, weights)?)
        }
        CorpusObjective::Cut => {
            let mut edges = Vec::new();
            for a in 0..n as u32 {
                for b in a + 1..n as u32 {
                    if rng.below(3) == 0 {
                        edges.push((a, b, int(1 + rng.below(5) as i64)));
                    }
                }
            }
            RandomObjective::Cut(Cut::new(n, edges)?)
        }
    };
    let stream = crate::ground::random_permutation(n, rng);
    Ok(RandomInstance { partitions, objective, stream })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroids::CommonOracle;
    use crate::num::frac;
    use crate::reference::{brute_force_opt, streaming_greedy};
    use crate::submodular::{check_matching_lower_bound, check_no_case_upper_bound, ValueOracle};

    #[test]
    fn hidden_chain_small() {
        let inst = gen_hidden_chain(2, 1, &mut Rng::new(0)).unwrap();
        assert_eq!(inst.system.hidden(), &[0]);
        assert_eq!(inst.stream.order(), &[0, 1]);
        let (set, v) = brute_force_opt(&inst.objective(), &inst.system.matroids(), 2).unwrap();
        assert_eq!((set, v), (ElementSet::from([0, 1]), int(2)));
        assert!(gen_hidden_chain(1, 3, &mut Rng::new(0)).is_err());
    }

    #[test]
    fn hidden_chain_blocks_in_order() {
        let mut rng = Rng::new(5);
        let inst = gen_hidden_chain(3, 4, &mut rng).unwrap();
        let blocks: Vec<usize> = inst.stream.order().iter().map(|&u| inst.system.block_index(u)).collect();
        assert!(blocks.windows(2).all(|w| w[0] <= w[1]));
        let (_, v) = brute_force_opt(&inst.objective(), &inst.system.matroids(), 12).unwrap();
        assert_eq!(v, int(3));
    }

    #[test]
    fn greedy_fails_on_hidden_chain() {
        let mut total = 0usize;
        for seed in 0..300 {
            let inst = gen_hidden_chain(5, 50, &mut Rng::new(seed)).unwrap();
            total += streaming_greedy(&inst.stream, &inst.system.common_oracle(), None, false).len();
        }
        assert!(total as f64 / 300.0 <= 1.5, "mean {}", total as f64 / 300.0);
    }

    #[test]
    fn coordinate_basics() {
        let inst = gen_coordinate(2, 1, 4, &mut Rng::new(1)).unwrap();
        assert_eq!(inst.layers.len(), 1);
        assert_eq!(inst.hidden().len(), 1);
        let mut rng = Rng::new(2);
        for _ in 0..200 {
            let p = 2 + rng.index(4);
            let inst = gen_coordinate(p, 1 + rng.index(5), 1 + rng.index(6), &mut rng).unwrap();
            let sys = inst.system();
            assert!(CommonOracle::new(sys.matroids()).unwrap().independent(&inst.hidden()));
            let hidden = inst.hidden_vectors();
            for (r, layer) in inst.layers.iter().enumerate() {
                for v in layer {
                    for o in &hidden[..r] {
                        assert!(o.iter().zip(v).all(|(a, b)| a != b));
                    }
                }
            }
        }
    }

    #[test]
    fn success_predicate() {
        let mut inst = CoordinateInstance {
            p: 3,
            m: 2,
            k: 2,
            layers: vec![vec![vec![1, 1], vec![2, 2]], vec![vec![1, 3], vec![3, 3]]],
            hidden_index: vec![1, 1],
        };
        assert!(is_successful(&inst));
        inst.layers[1][0] = vec![3, 1];
        // (1,1) and (3,1) still share coordinate 2.
        assert!(is_successful(&inst));
        inst.layers[1][0] = vec![3, 2];
        assert!(!is_successful(&inst));
        let scalar =
            CoordinateInstance { p: 2, m: 2, k: 1, layers: vec![vec![vec![1], vec![2]]], hidden_index: vec![0] };
        assert!(is_successful(&scalar));
    }

    #[test]
    fn success_rate_matches_bound() {
        let trials = 500;
        let hits =
            (0..trials).filter(|&s| is_successful(&gen_coordinate(3, 10, 40, &mut Rng::new(s)).unwrap())).count();
        assert!(hits as f64 / trials as f64 >= 0.99);
        assert!(success_lower_bound(3, 10, 40) > 0.999);
    }

    #[test]
    fn chain_family_instance() {
        let inst = gen_chain_family_instance(
            1,
            vec![LayerGraph::perfect_matching(1)],
            2,
            frac(1, 4),
            vec![1],
            &mut Rng::new(0),
        )
        .unwrap();
        assert_eq!(inst.family.ground_size(), 2);
        // Two copies of one edge conflict.
        assert!(!CommonOracle::new(inst.matroids.clone()).unwrap().independent(&ElementSet::from([0, 1])));

        let layers = vec![LayerGraph::perfect_matching(2); 2];
        let inst = gen_chain_family_instance(2, layers, 3, frac(1, 4), vec![2, 3], &mut Rng::new(1)).unwrap();
        let check = check_matching_lower_bound(&inst.family);
        assert!(check.holds);
        assert!(CommonOracle::new(inst.matroids.clone()).unwrap().independent(&check.set));
        let s = ElementSet::from([inst.family.element(1, 0, 1), inst.family.element(2, 1, 1)]);
        let d = check_no_case_upper_bound(&inst.family, &int(2), &s);
        // m_i = 625/256 allows one element per layer at alpha = 2.
        let d = d.unwrap();
        assert!(d.holds && d.bound == frac(5, 3));
        assert!(gen_chain_family_instance(
            2,
            vec![LayerGraph::perfect_matching(1)],
            1,
            frac(1, 4),
            vec![1, 1],
            &mut Rng::new(0)
        )
        .is_err());
    }

    #[test]
    fn matching_feasibility_is_per_layer_matching() {
        let mut rng = Rng::new(8);
        let layers = vec![random_layer(3, &mut rng), random_layer(2, &mut rng)];
        let inst = gen_chain_family_instance(2, layers, 2, frac(1, 4), vec![1, 2], &mut rng).unwrap();
        let oracle = CommonOracle::new(inst.matroids.clone()).unwrap();
        let f = &inst.family;
        for _ in 0..2000 {
            let s: ElementSet = (0..f.ground_size() as u32).filter(|_| rng.below(4) == 0).collect();
            let by_layer = (1..=2).all(|i| {
                let edges: Vec<usize> =
                    s.iter().filter(|u| f.layer_range(i).contains(u)).map(|u| f.decode(u).edge).collect();
                f.layers()[i - 1].is_matching(&edges)
            });
            assert_eq!(oracle.independent(&s), by_layer);
        }
    }

    #[test]
    fn random_corpus_is_valid() {
        let mut rng = Rng::new(4);
        for kind in [CorpusObjective::Coverage, CorpusObjective::Cut] {
            let inst = gen_random_partition(10, 3, kind, &mut rng).unwrap();
            assert_eq!(inst.matroids().len(), 3);
            assert_eq!(inst.value_oracle().ground_size(), 10);
            assert_eq!(inst.stream.len(), 10);
        }
    }
}
