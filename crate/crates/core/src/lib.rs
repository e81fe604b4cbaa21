//! Sequential-elimination algorithms for fixed-budget best-arm identification.
//!
//! The crate is organised by concern:
//!
//! * [`env`]: Bernoulli bandit environments, gaps, seeded reward streams.
//! * [`schedule`]: budget arithmetic of the general elimination framework.
//! * [`algorithms`]: the general elimination engine, N-Seq-El, Succ-Rej,
//!   Seq-Halv and the UCB-E baseline.
//! * [`complexity`]: H1 / H2 / H(p) / C_p, misidentification bounds and the
//!   p-advisor.
//! * [`sideobs`]: star-block partitions and Sequential Block Elimination.
//! * [`harness`]: benchmark setups, Monte-Carlo batches, the exact oracle and
//!   report serialisation.
//! * [`cli`]: the `seqelim` command-line front end.

pub mod algorithms;
pub mod cli;
pub mod complexity;
pub mod env;
pub mod error;
pub mod harness;
pub mod schedule;
pub mod sideobs;

pub use algorithms::{AlgorithmId, RoundRecord, RunRecord};
pub use env::{BanditEnv, GapVector, RewardKind, RngStream};
pub use error::{Error, Result};
pub use schedule::{EliminationSchedule, ScheduleSpec};
pub use sideobs::{BlockPartition, BlockSchedule};
