//! Seeded instance corpora shared by `verify` and the acceptance tests.

use std::sync::Arc;

use smkm_core::hardgen::{gen_coordinate, gen_hidden_chain, gen_random_partition, CorpusObjective, RandomObjective};
use smkm_core::submodular::Cardinality;
use smkm_core::{MatroidRef, Result, Rng, Stream, ValueRef};

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub matroids: Vec<MatroidRef>,
    pub objective: ValueRef,
    pub stream: Stream,
    pub monotone: bool,
}

fn random_objective(n: usize, kind: CorpusObjective, rng: &mut Rng) -> Result<ValueRef> {
    Ok(match gen_random_partition(n, 1, kind, rng)?.objective {
        RandomObjective::Coverage(c) => Arc::new(c),
        RandomObjective::Cut(c) => Arc::new(c),
    })
}

/// `count` instances with `n <= 12` and `k <= 3`, cycling through partition
/// matroids with coverage, partition with cut, hidden-chain with coverage and
/// hidden-chain with cut. Coverage entries take the monotone path.
pub fn guarantee_corpus(count: usize, seed: u64) -> Result<Vec<CorpusEntry>> {
    let base = Rng::new(seed);
    (0..count)
        .map(|i| {
            let mut rng = base.split(i as u64 + 1);
            let kind = if i % 2 == 0 { CorpusObjective::Coverage } else { CorpusObjective::Cut };
            let monotone = kind == CorpusObjective::Coverage;
            let tag = if monotone { "coverage" } else { "cut" };
            if i % 4 < 2 {
                let n = 6 + rng.index(7);
                let k = 1 + rng.index(3);
                let inst = gen_random_partition(n, k, kind, &mut rng)?;
                Ok(CorpusEntry {
                    id: format!("partition-{tag}-{i}"),
                    matroids: inst.matroids(),
                    objective: random_objective(n, kind, &mut rng)?,
                    stream: inst.stream,
                    monotone,
                })
            } else {
                let k = 2 + rng.index(2);
                let m = 1 + rng.index(12 / k);
                let inst = gen_hidden_chain(k, m, &mut rng)?;
                Ok(CorpusEntry {
                    id: format!("hidden_chain-{tag}-{i}"),
                    matroids: inst.system.matroids(),
                    objective: random_objective(k * m, kind, &mut rng)?,
                    stream: inst.stream,
                    monotone,
                })
            }
        })
        .collect()
}

/// Guarantee corpus plus small coordinate instances, all with `n <= 12`.
pub fn fealg_corpus(count: usize, seed: u64) -> Result<Vec<CorpusEntry>> {
    let mut out = guarantee_corpus(count, seed)?;
    let base = Rng::new(seed ^ 0xc0);
    for i in 0..count / 4 {
        let mut rng = base.split(i as u64);
        let (p, m, k) = (2 + rng.index(3), 1 + rng.index(3), 1 + rng.index(3));
        let inst = gen_coordinate(p, m.min(12 / (p - 1)), k, &mut rng)?;
        out.push(CorpusEntry {
            id: format!("coordinate-{i}"),
            matroids: inst.system().matroids(),
            objective: Arc::new(Cardinality { ground_size: inst.ground_size() }),
            stream: inst.stream(),
            monotone: true,
        });
    }
    Ok(out)
}
