//! Monte Carlo simulation, replication and the parameter sweep.

pub mod config;
pub mod engine;
pub mod replicate;
pub mod sweep;
pub mod trace;

pub use engine::{run_simulation, SimConfig, SimResult, UserStats};
pub use replicate::{derive_seed, replicate, run_replicates, ReplicateSummary};
pub use sweep::{run_sweep, write_csv, write_report, SweepConfig, SweepRow};
pub use trace::{parse_script, parse_state, run_trace};
