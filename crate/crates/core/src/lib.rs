//! Age of Information (AoI) in a two-user broadcast packet-erasure channel
//! with feedback, under a three-action scheduling model: a fresh packet for
//! user 1, a fresh packet for user 2, or the XOR of the two overheard
//! packets.
//!
//! The crate is split along the same lines as the model itself:
//!
//! * [`channel`] holds the correlated erasure law and its sampler.
//! * [`aoi`] is the deterministic state machine (ages, overheard-queue ages)
//!   and the weighted-sum objective; [`renewal`] decomposes a sample path
//!   into inter-delivery intervals.
//! * [`policy`] has the stationary randomized and Max-Weight schedulers.
//! * [`analysis`] collects every closed form: the universal lower bound, the
//!   exact randomized-policy age, the Max-Weight upper bound and the
//!   one-slot Lyapunov drift.
//! * [`sim`] is the seeded Monte Carlo engine, replication with confidence
//!   intervals, the coded-vs-uncoded sweep, the sample-path replay and the
//!   config-file reader used by the `bcast-aoi` binary.

pub mod analysis;
pub mod aoi;
pub mod channel;
pub mod error;
pub mod policy;
pub mod renewal;
pub mod sim;

pub use aoi::{Action, AgeWeights, AoiState, User};
pub use channel::{ChannelParams, ErasurePair};
pub use error::{Error, Result};
pub use policy::{ActionWeights, MwWeightTriple, Policy};
