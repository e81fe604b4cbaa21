use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::algorithms::{run_nseqel, run_seq_halve, run_succ_rej, run_ucb_e, RunRecord};
use crate::complexity::h1;
use crate::env::{derive_seed, ArmStreams, BanditEnv};
use crate::error::{Error, Result};
use crate::sideobs::{block_schedule_power, run_block_elimination, BlockPartition};

/// An algorithm together with its tuning, as benchmarked by the harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "alg", rename_all = "snake_case")]
pub enum Algorithm {
    NSeqEl { p: f64 },
    SuccRej,
    SeqHalv,
    /// UCB-E with `a = c T / H1`.
    UcbE { c: f64 },
    /// Sequential Block Elimination on a partition such as `10x4`, with the
    /// power schedule of exponent `p`.
    Block { blocks: String, p: f64 },
}

impl Algorithm {
    /// The nine-bar lineup: N-Seq-El at four exponents, Succ-Rej, Seq-Halv
    /// and UCB-E at three scales.
    pub fn standard_lineup() -> Vec<Algorithm> {
        let mut v: Vec<Algorithm> = [0.75, 1.35, 1.7, 2.0]
            .into_iter()
            .map(|p| Algorithm::NSeqEl { p })
            .collect();
        v.push(Algorithm::SuccRej);
        v.push(Algorithm::SeqHalv);
        v.extend([1.0, 2.0, 4.0].map(|c| Algorithm::UcbE { c }));
        v
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::NSeqEl { .. } => "nseqel",
            Self::SuccRej => "succrej",
            Self::SeqHalv => "seqhalv",
            Self::UcbE { .. } => "ucbe",
            Self::Block { .. } => "block",
        }
    }

    /// Parameter string for reports, e.g. `p=0.75`. Empty when untuned.
    pub fn params(&self) -> String {
        match self {
            Self::NSeqEl { p } => format!("p={p}"),
            Self::SuccRej | Self::SeqHalv => String::new(),
            Self::UcbE { c } => format!("c={c}"),
            Self::Block { blocks, p } => format!("blocks={blocks};p={p}"),
        }
    }

    /// Runs once on `env` with the reward streams of `seed`.
    pub fn run(&self, env: &BanditEnv, budget: u64, seed: u64) -> Result<RunRecord> {
        let mut source = ArmStreams::new(env, seed);
        match self {
            Self::NSeqEl { p } => run_nseqel(&mut source, budget, *p),
            Self::SuccRej => run_succ_rej(&mut source, budget),
            Self::SeqHalv => run_seq_halve(&mut source, budget),
            Self::UcbE { c } => {
                let a = c * budget as f64 / h1(&env.gaps())?;
                run_ucb_e(&mut source, budget, a)
            }
            Self::Block { blocks, p } => {
                let part = BlockPartition::parse(blocks)?;
                let sched = block_schedule_power(part.num_blocks(), budget, *p)?;
                run_block_elimination(&mut source, &part, &sched)
            }
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            f.write_str(self.label())
        } else {
            write!(f, "{}({params})", self.label())
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// Accepts `nseqel:0.75`, `nseqel:p=0.75`, `succrej`, `seqhalv`,
    /// `ucbe:2`, `ucbe:c=2` and `block:10x4[:p=1]`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let args: Vec<&str> = parts.collect();
        let num = |arg: Option<&&str>, key: &str| -> Result<f64> {
            let raw = arg.ok_or_else(|| Error::Unknown(format!("{s:?} needs {key}=<value>")))?;
            let raw = raw.strip_prefix(key).and_then(|r| r.strip_prefix('=')).unwrap_or(raw);
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
                .ok_or_else(|| Error::Unknown(format!("bad {key} in {s:?}")))
        };
        match name.as_str() {
            "nseqel" | "n-seq-el" => Ok(Self::NSeqEl {
                p: num(args.first(), "p")?,
            }),
            "succrej" | "succ-rej" => Ok(Self::SuccRej),
            "seqhalv" | "seq-halv" => Ok(Self::SeqHalv),
            "ucbe" | "ucb-e" => Ok(Self::UcbE {
                c: num(args.first(), "c")?,
            }),
            "block" => {
                let blocks = args
                    .first()
                    .ok_or_else(|| Error::Unknown(format!("{s:?} needs a partition")))?;
                BlockPartition::parse(blocks)?;
                let p = if args.len() > 1 { num(args.get(1), "p")? } else { 1.0 };
                Ok(Self::Block {
                    blocks: blocks.to_string(),
                    p,
                })
            }
            _ => Err(Error::Unknown(format!("algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    /// `1.96 sqrt(f (1 - f) / n)`.
    #[default]
    Normal,
    /// Half the width of the exact 95% Clopper-Pearson interval.
    ClopperPearson,
}

impl FromStr for CiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(Self::Normal),
            "clopper-pearson" | "exact" => Ok(Self::ClopperPearson),
            _ => Err(Error::Unknown(format!("CI method {s:?}"))),
        }
    }
}

const Z95: f64 = 1.959_963_984_540_054;

/// 95% confidence half-width for `errors` misidentifications in `runs`.
pub fn ci_half_width(errors: u64, runs: u64, method: CiMethod) -> f64 {
    let n = runs as f64;
    let f = errors as f64 / n;
    match method {
        CiMethod::Normal => Z95 * (f * (1.0 - f) / n).sqrt(),
        CiMethod::ClopperPearson => {
            let x = errors as f64;
            let lo = if errors == 0 {
                0.0
            } else {
                Beta::new(x, n - x + 1.0).expect("valid shape").inverse_cdf(0.025)
            };
            let hi = if errors == runs {
                1.0
            } else {
                Beta::new(x + 1.0, n - x).expect("valid shape").inverse_cdf(0.975)
            };
            0.5 * (hi - lo)
        }
    }
}

/// Settings of a Monte-Carlo batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Free-form label echoed into reports (e.g. `setup1`).
    pub setup: String,
    pub budget: u64,
    pub runs: u64,
    pub root_seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub ci: CiMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmResult {
    pub alg: String,
    pub params: String,
    /// Misidentification count; `None` when the algorithm failed.
    pub errors: Option<u64>,
    pub freq: Option<f64>,
    pub ci_half: Option<f64>,
    pub failure: Option<String>,
}

impl AlgorithmResult {
    /// `alg` or `alg(params)`.
    pub fn name(&self) -> String {
        if self.params.is_empty() {
            self.alg.clone()
        } else {
            format!("{}({})", self.alg, self.params)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub setup: String,
    pub num_arms: usize,
    pub budget: u64,
    pub runs: u64,
    pub root_seed: u64,
    pub ci: CiMethod,
    pub results: Vec<AlgorithmResult>,
}

impl ExperimentReport {
    pub fn result(&self, name: &str) -> Option<&AlgorithmResult> {
        self.results
            .iter()
            .find(|r| r.name() == name)
            .or_else(|| self.results.iter().find(|r| r.alg == name))
    }

    pub fn freq(&self, name: &str) -> Option<f64> {
        self.result(name).and_then(|r| r.freq)
    }
}

/// Counts misidentifications of `alg` over `runs` coupled runs.
///
/// Run `j` uses seed `derive_seed(root_seed, j)` for every algorithm, so
/// algorithms in one batch see common random numbers. Counts are integer
/// sums and do not depend on scheduling.
pub fn count_errors(
    env: &BanditEnv,
    alg: &Algorithm,
    budget: u64,
    runs: u64,
    root_seed: u64,
) -> Result<u64> {
    let best = env.best_arm();
    (0..runs)
        .into_par_iter()
        .map(|j| {
            let rec = alg.run(env, budget, derive_seed(root_seed, j))?;
            Ok(u64::from(rec.recommended != best))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Runs every algorithm `cfg.runs` times and aggregates the error rates.
///
/// An algorithm that fails (e.g. budget too small for Seq-Halv) is reported
/// with its error message; the rest of the batch still runs.
pub fn run_experiment(
    env: &BanditEnv,
    algorithms: &[Algorithm],
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if cfg.runs == 0 {
        return Err(Error::OutOfRange("runs = 0".into()));
    }
    if cfg.budget < env.num_arms() as u64 {
        return Err(Error::BudgetTooSmall {
            budget: cfg.budget,
            required: env.num_arms() as u64,
        });
    }
    let work = || -> Vec<AlgorithmResult> {
        algorithms
            .iter()
            .map(|alg| {
                let counted = count_errors(env, alg, cfg.budget, cfg.runs, cfg.root_seed);
                let (errors, failure) = match counted {
                    Ok(e) => (Some(e), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                AlgorithmResult {
                    alg: alg.label().to_string(),
                    params: alg.params(),
                    errors,
                    freq: errors.map(|e| e as f64 / cfg.runs as f64),
                    ci_half: errors.map(|e| ci_half_width(e, cfg.runs, cfg.ci)),
                    failure,
                }
            })
            .collect()
    };
    let results = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(ExperimentReport {
        setup: cfg.setup.clone(),
        num_arms: env.num_arms(),
        budget: cfg.budget,
        runs: cfg.runs,
        root_seed: cfg.root_seed,
        ci: cfg.ci,
        results,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RatioValue {
    /// `freq_baseline / freq_alg` with a delta-method 95% half-width.
    Finite { ratio: f64, ci_half: f64 },
    /// The algorithm never erred while the baseline did.
    Infinite,
    /// Baseline frequency is zero (or a frequency is missing).
    Undefined,
}

impl fmt::Display for RatioValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite { ratio, ci_half } => write!(f, "{ratio:.3} ± {ci_half:.3}"),
            Self::Infinite => f.write_str("∞"),
            Self::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub algorithm: String,
    pub value: RatioValue,
}

/// Ratio `freq_baseline / freq_alg` for every algorithm in `report`.
///
/// The interval treats the two frequencies as independent, which is
/// conservative under common random numbers.
pub fn summarize_ratios(report: &ExperimentReport, baseline: &str) -> Result<Vec<RatioRow>> {
    let base = report
        .result(baseline)
        .ok_or_else(|| Error::Unknown(format!("baseline {baseline:?} not in report")))?;
    let n = report.runs as f64;
    Ok(report
        .results
        .iter()
        .map(|r| {
            let value = match (base.freq, r.freq) {
                (Some(fb), Some(fa)) if fb > 0.0 && fa > 0.0 => {
                    let ratio = fb / fa;
                    let var = (1.0 - fb) / (n * fb) + (1.0 - fa) / (n * fa);
                    RatioValue::Finite {
                        ratio,
                        ci_half: Z95 * ratio * var.sqrt(),
                    }
                }
                (Some(fb), Some(_)) if fb > 0.0 => RatioValue::Infinite,
                _ => RatioValue::Undefined,
            };
            RatioRow {
                algorithm: r.name(),
                value,
            }
        })
        .collect())
}
