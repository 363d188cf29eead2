//! Experiment plumbing behind the `smkm` binary: seeded corpora, verification
//! batteries, and CSV row producers for solver runs and chain protocol trials.

pub mod corpus;
pub mod experiments;
pub mod verify;
