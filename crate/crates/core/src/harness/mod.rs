//! Benchmark setups, Monte-Carlo experiments, the exact oracle and report
//! serialization.

pub mod experiment;
pub mod oracle;
pub mod report;
pub mod setups;

pub use experiment::{
    ci_half_width, count_errors, run_experiment, summarize_ratios, Algorithm, AlgorithmResult,
    CiMethod, ExperimentConfig, ExperimentReport, RatioRow, RatioValue,
};
pub use oracle::{exact_misid_probability, ExactOracleResult, ENUMERATION_LIMIT};
pub use report::{read_csv, read_json, write_csv, write_json, CsvRow, CSV_HEADER};
pub use setups::{group_size, make_setup, setup_means, SetupId, SetupKind, BEST_MEAN};

use crate::complexity::h1;
use crate::env::BanditEnv;
use crate::error::Result;
use crate::schedule::ceil_snapped;

/// Default budget `T = ceil(H1)`.
pub fn default_budget(env: &BanditEnv) -> Result<u64> {
    Ok(ceil_snapped(h1(&env.gaps())?))
}
