//! Ground sets, canonical element sets, arrival streams and the seeded generator.
//!
//! The generator is ChaCha8 (`rand_chacha`) seeded through `seed_from_u64`. All
//! integer draws go through 64-bit ranges so results do not depend on the
//! platform's pointer width. Independent experiment cells derive their
//! generators with [`Rng::split`], which seeds a fresh generator with
//! `seed XOR cell`.

use std::fmt;

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type ElementId = u32;

/// A set of elements kept sorted and duplicate-free, so equal sets compare and
/// hash identically regardless of insertion order.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementSet(SmallVec<[ElementId; 8]>);

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(u: ElementId) -> Self {
        let mut s = Self::new();
        s.0.push(u);
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.0
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = ElementId> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, u: ElementId) -> bool {
        self.0.binary_search(&u).is_ok()
    }

    /// Inserts `u`; returns false if it was already present.
    pub fn insert(&mut self, u: ElementId) -> bool {
        match self.0.binary_search(&u) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, u);
                true
            }
        }
    }

    pub fn remove(&mut self, u: ElementId) -> bool {
        match self.0.binary_search(&u) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// Copy of `self` with `u` added.
    pub fn with(&self, u: ElementId) -> Self {
        let mut s = self.clone();
        s.insert(u);
        s
    }

    pub fn without(&self, u: ElementId) -> Self {
        let mut s = self.clone();
        s.remove(u);
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = SmallVec::with_capacity(self.len() + other.len());
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        ElementSet(out)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.iter().filter(|&u| !other.contains(u)).collect()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.iter().filter(|&u| other.contains(u)).collect()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|u| other.contains(u))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.iter().all(|u| !other.contains(u))
    }

    pub fn max_element(&self) -> Option<ElementId> {
        self.0.last().copied()
    }

    pub fn check_bounds(&self, ground_size: usize) -> Result<()> {
        match self.max_element() {
            Some(u) if u as usize >= ground_size => Err(Error::OutOfGround { element: u, ground_size }),
            _ => Ok(()),
        }
    }

    pub fn to_mask(&self) -> u64 {
        self.iter().fold(0u64, |m, u| {
            debug_assert!(u < 64);
            m | (1 << u)
        })
    }

    pub fn from_mask(mut mask: u64) -> Self {
        let mut s = Self::new();
        while mask != 0 {
            s.0.push(mask.trailing_zeros());
            mask &= mask - 1;
        }
        s
    }
}

impl FromIterator<ElementId> for ElementSet {
    fn from_iter<I: IntoIterator<Item = ElementId>>(iter: I) -> Self {
        let mut v: SmallVec<[ElementId; 8]> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ElementSet(v)
    }
}

impl<const N: usize> From<[ElementId; N]> for ElementSet {
    fn from(a: [ElementId; N]) -> Self {
        a.into_iter().collect()
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// Bounds-checked insertion.
pub fn set_insert(s: &ElementSet, u: ElementId, ground_size: usize) -> Result<ElementSet> {
    if u as usize >= ground_size {
        return Err(Error::OutOfGround { element: u, ground_size });
    }
    Ok(s.with(u))
}

/// An arrival order over (a subset of) a ground set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stream {
    order: Vec<ElementId>,
    ground_size: usize,
}

impl Stream {
    pub fn new(order: Vec<ElementId>, ground_size: usize) -> Result<Self> {
        let mut seen = vec![false; ground_size];
        for &u in &order {
            let slot = seen.get_mut(u as usize).ok_or(Error::OutOfGround { element: u, ground_size })?;
            if *slot {
                return Err(Error::NotAPermutation(format!("element {u} repeats")));
            }
            *slot = true;
        }
        Ok(Stream { order, ground_size })
    }

    pub fn identity(n: usize) -> Self {
        Stream { order: (0..n as ElementId).collect(), ground_size: n }
    }

    pub fn order(&self) -> &[ElementId] {
        &self.order
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Single-use reader; algorithms take one of these to make the one-pass
    /// discipline explicit.
    pub fn cursor(&self) -> StreamCursor<'_> {
        StreamCursor { stream: self, pos: 0 }
    }
}

pub struct StreamCursor<'a> {
    stream: &'a Stream,
    pos: usize,
}

impl StreamCursor<'_> {
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn ground_size(&self) -> usize {
        self.stream.ground_size
    }
}

impl Iterator for StreamCursor<'_> {
    type Item = ElementId;

    fn next(&mut self) -> Option<ElementId> {
        let u = self.stream.order.get(self.pos).copied()?;
        self.pos += 1;
        Some(u)
    }
}

pub fn random_permutation(n: usize, rng: &mut Rng) -> Stream {
    let mut order: Vec<ElementId> = (0..n as ElementId).collect();
    rng.shuffle(&mut order);
    Stream { order, ground_size: n }
}

#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh generator for experiment cell `cell`, independent of `self`'s position.
    pub fn split(&self, cell: u64) -> Rng {
        Rng::new(self.seed ^ cell)
    }

    /// Uniform in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.inner.gen_range(0..n)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 1
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.gen()
    }

    /// Fisher-Yates with 64-bit draws.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

/// SplitMix64 finalizer; used to derive deterministic per-key seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn hash_path(seed: u64, path: &[usize]) -> u64 {
    path.iter().fold(mix64(seed), |h, &x| mix64(h ^ mix64(x as u64 + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert_eq, proptest};

    #[test]
    fn insert_examples() {
        assert_eq!(set_insert(&ElementSet::new(), 3, 10).unwrap(), ElementSet::from([3]));
        assert_eq!(set_insert(&ElementSet::from([1, 4]), 2, 10).unwrap(), ElementSet::from([1, 2, 4]));
        assert_eq!(set_insert(&ElementSet::from([1, 2]), 2, 10).unwrap(), ElementSet::from([1, 2]));
        assert_eq!(set_insert(&ElementSet::new(), 10, 10), Err(Error::OutOfGround { element: 10, ground_size: 10 }));
    }

    #[test]
    fn permutation_edge_cases() {
        assert!(random_permutation(0, &mut Rng::new(3)).is_empty());
        assert_eq!(random_permutation(1, &mut Rng::new(99)).order(), &[0]);
    }

    #[test]
    fn permutation_golden() {
        let s = random_permutation(5, &mut Rng::new(7));
        assert_eq!(s.order(), &[4, 0, 1, 2, 3]);
    }

    #[test]
    fn stream_validation() {
        assert!(Stream::new(vec![0, 1, 1], 3).is_err());
        assert!(Stream::new(vec![0, 3], 3).is_err());
        assert!(Stream::new(vec![2, 0], 3).is_ok());
    }

    #[test]
    fn cursor_is_single_pass() {
        let s = Stream::identity(3);
        let mut c = s.cursor();
        assert_eq!(c.by_ref().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(c.next(), None);
        assert_eq!(c.position(), 3);
    }

    #[test]
    fn split_is_xor_seeded() {
        let r = Rng::new(40);
        assert_eq!(r.split(2).seed(), 42);
        let mut a = r.split(5);
        let mut b = Rng::new(45);
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn mask_round_trip() {
        let s = ElementSet::from([0, 5, 63]);
        assert_eq!(ElementSet::from_mask(s.to_mask()), s);
    }

    proptest! {
        #[test]
        fn canonical_form_independent_of_order(mut v in proptest::collection::vec(0u32..50, 0..20), seed in any::<u64>()) {
            let a: ElementSet = v.iter().copied().collect();
            Rng::new(seed).shuffle(&mut v);
            let mut b = ElementSet::new();
            for u in v { b.insert(u); }
            prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
            prop_assert_eq!(a, b);
        }

        #[test]
        fn permutation_reproducible(n in 0usize..40, seed in any::<u64>()) {
            let a = random_permutation(n, &mut Rng::new(seed));
            let b = random_permutation(n, &mut Rng::new(seed));
            prop_assert_eq!(&a, &b);
            let mut sorted = a.order().to_vec();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..n as u32).collect::<Vec<_>>());
        }

        #[test]
        fn union_matches_naive(a in proptest::collection::vec(0u32..30, 0..10), b in proptest::collection::vec(0u32..30, 0..10)) {
            let sa: ElementSet = a.iter().copied().collect();
            let sb: ElementSet = b.iter().copied().collect();
            let naive: ElementSet = a.into_iter().chain(b).collect();
            prop_assert_eq!(sa.union(&sb), naive);
        }
    }
}
