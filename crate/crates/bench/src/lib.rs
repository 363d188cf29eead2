//! Seeded fixtures for the criterion benches.

use smkm_core::hardgen::{
    gen_chain_family_instance, gen_hidden_chain, gen_random_partition, planted_solution, random_layer,
    ChainFamilyInstance, CorpusObjective, HiddenChainInstance, RandomInstance,
};
use smkm_core::num::frac;
use smkm_core::{ElementSet, Rng};

pub fn hidden_chain(k: usize, m: usize, seed: u64) -> HiddenChainInstance {
    gen_hidden_chain(k, m, &mut Rng::new(seed)).expect("valid hidden-chain parameters")
}

pub fn random_partition(n: usize, k: usize, objective: CorpusObjective, seed: u64) -> RandomInstance {
    gen_random_partition(n, k, objective, &mut Rng::new(seed)).expect("valid partition parameters")
}

/// A chain-family instance with `p` layers of `side`-vertex random graphs, plus its planted solution.
pub fn chain_family(p: usize, side: u32, copies: u32, seed: u64) -> (ChainFamilyInstance, ElementSet) {
    let mut rng = Rng::new(seed);
    let layers = (0..p).map(|_| random_layer(side, &mut rng)).collect();
    let o = (0..p).map(|_| 1 + rng.below(copies as u64) as u32).collect();
    let inst = gen_chain_family_instance(p, layers, copies, frac(1, 4), o, &mut rng).expect("valid family parameters");
    let planted = planted_solution(&inst.family);
    (inst, planted)
}
