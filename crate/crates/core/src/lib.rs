//! Streaming maximization of submodular functions subject to the intersection of
//! `k` matroids, together with the hard-instance generators and communication
//! protocol simulators used to probe the space/approximation trade-off.
//!
//! The crate is organised bottom-up:
//!
//! * [`ground`]: element ids, canonical sets, single-pass streams, seeded RNG.
//! * [`matroids`]: independence oracles and the structured matroid systems.
//! * [`submodular`]: exact-rational value oracles, including the chain family.
//! * [`fealg`]: the state-tuple marking procedure for common independent sets.
//! * [`smkm`]: the guess-forking streaming algorithms and the threshold grid.
//! * [`reference`]: brute-force optimum and streaming greedy baselines.
//! * [`hardgen`]: hard instance generators.
//! * [`chainsim`]: CHAIN problem sampling and the reduction protocols.
//! * [`io`]: the JSON instance format shared by the CLI and tests.

pub mod chainsim;
pub mod error;
pub mod fealg;
pub mod ground;
pub mod hardgen;
pub mod io;
pub mod matching;
pub mod matroids;
pub mod num;
pub mod reference;
pub mod smkm;
pub mod submodular;

pub use error::{Error, Result};
pub use ground::{ElementId, ElementSet, Rng, Stream};
pub use matroids::{CommonOracle, Matroid, MatroidRef};
pub use num::Rational;
pub use submodular::{ValueOracle, ValueRef};
