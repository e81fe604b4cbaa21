//! Command-line front end.
//!
//! Flags may also come from a TOML file given with `--config`; flags win.
//! Exit codes: 0 success, 2 configuration error, 3 runtime error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::complexity::{
    advise_p, c_p, complexity_report, logbar, proposition1_bound, table1_bound, BoundAlgorithm,
};
use crate::env::BanditEnv;
use crate::harness::{
    default_budget, exact_misid_probability, make_setup, read_csv, read_json, run_experiment,
    write_csv, write_json, Algorithm, CiMethod, ExperimentConfig, ExperimentReport, SetupId,
    SetupKind,
};
use crate::sideobs::{block_schedule_power, theorem2_bound, BlockPartition};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

const DEFAULT_RUNS: u64 = 4000;
const DEFAULT_ARMS: usize = 40;
const DEFAULT_PS: [f64; 4] = [0.75, 1.35, 1.7, 2.0];

#[derive(Debug, Parser)]
#[command(name = "seqelim", version, about = "Fixed-budget best-arm identification by sequential elimination")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte-Carlo run of chosen algorithms on one instance.
    Run(ExpArgs),
    /// The nine-algorithm benchmark over one or more setups.
    Bench(ExpArgs),
    /// Complexity measures and error bounds for an instance.
    Bound(BoundArgs),
    /// Suitable range of p for K arms with f_K competitive ones.
    AdviseP(AdviseArgs),
    /// Sequential Block Elimination with side observations.
    Block(BlockArgs),
    /// Exact misidentification probability by enumeration.
    Oracle(OracleArgs),
    /// Print a previously written report.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InstanceArgs {
    /// Benchmark setup (1-6 or geo7). Repeatable for `bench`.
    #[arg(long = "setup", conflicts_with = "means")]
    pub setups: Vec<String>,
    /// Explicit comma-separated Bernoulli means.
    #[arg(long, value_delimiter = ',')]
    pub means: Option<Vec<f64>>,
    /// Number of arms for setups (40 or 120). Repeatable for `bench`.
    #[arg(long = "k")]
    pub ks: Vec<usize>,
    /// Budget T; defaults to ceil(H1).
    #[arg(long, short = 'T')]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExpArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Algorithm such as `nseqel:p=1.7`, `succrej`, `seqhalv`, `ucbe:c=2`,
    /// `block:10x4:p=1`. Repeatable; defaults to the nine-bar lineup.
    #[arg(long = "alg")]
    pub algs: Vec<String>,
    /// Monte-Carlo runs per algorithm [default: 4000]
    #[arg(long)]
    pub runs: Option<u64>,
    /// Root seed; run j uses a seed derived from it [default: 0]
    #[arg(long, env = "SEQELIM_SEED")]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
    /// Machine-readable output file; `-` for stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// `normal` or `clopper-pearson`.
    #[arg(long)]
    pub ci: Option<String>,
    /// TOML file with any of the flags above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Exponents for H(p), C_p and the N-Seq-El rows. Repeatable.
    #[arg(long = "p")]
    pub ps: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct AdviseArgs {
    /// Number of arms
    #[arg(long)]
    pub k: usize,
    /// Number of competitive arms.
    #[arg(long, conflicts_with = "gamma", required_unless_present = "gamma")]
    pub fk: Option<f64>,
    /// Use f_K = K^gamma.
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BlockArgs {
    #[command(flatten)]
    pub exp: ExpArgs,
    /// Partition: `SIZExCOUNT` (e.g. `10x4`) or a list of sizes (`3,2,2`).
    #[arg(long)]
    pub blocks: String,
    /// Exponent of the power schedule.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Algorithms to evaluate; defaults to the nine-bar lineup.
    #[arg(long = "alg")]
    pub algs: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A JSON or CSV file written by `run`, `bench` or `block`.
    #[arg(long = "in")]
    pub input: PathBuf,
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    setup: Option<Vec<String>>,
    means: Option<Vec<f64>>,
    k: Option<Vec<usize>>,
    budget: Option<u64>,
    alg: Option<Vec<String>>,
    runs: Option<u64>,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
    ci: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn config(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Human output goes to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("seqelim: {e}");
            e.code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Run(args) => cmd_run(args, false, out),
        Command::Bench(args) => cmd_run(args, true, out),
        Command::Bound(args) => cmd_bound(args, out),
        Command::AdviseP(args) => cmd_advise_p(args, out),
        Command::Block(args) => cmd_block(args, out),
        Command::Oracle(args) => cmd_oracle(args, out),
        Command::Report(args) => cmd_report(args, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(runtime)
}

/// Folds the `--config` file into `args`; values given as flags win.
fn merge_config(mut args: ExpArgs) -> CliResult<ExpArgs> {
    let Some(path) = args.config.clone() else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    let file: FileConfig = toml::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
    let inst = &mut args.instance;
    if inst.setups.is_empty() && inst.means.is_none() {
        inst.setups = file.setup.unwrap_or_default();
        inst.means = file.means;
    }
    if inst.ks.is_empty() {
        inst.ks = file.k.unwrap_or_default();
    }
    inst.budget = inst.budget.or(file.budget);
    if args.algs.is_empty() {
        args.algs = file.alg.unwrap_or_default();
    }
    args.runs = args.runs.or(file.runs);
    args.seed = args.seed.or(file.seed);
    args.threads = args.threads.or(file.threads);
    args.out = args.out.or(file.out);
    args.format = args.format.or(file.format);
    args.ci = args.ci.or(file.ci);
    Ok(args)
}

/// A named environment resolved from `--setup`/`--k` or `--means`.
struct Instance {
    label: String,
    env: BanditEnv,
}

fn resolve_instances(inst: &InstanceArgs) -> CliResult<Vec<Instance>> {
    if let Some(means) = &inst.means {
        if !inst.ks.is_empty() && inst.ks != [means.len()] {
            return Err(config(format!("--k disagrees with {} means", means.len())));
        }
        let env = BanditEnv::bernoulli(means.clone()).map_err(config)?;
        return Ok(vec![Instance {
            label: "custom".into(),
            env,
        }]);
    }
    if inst.setups.is_empty() {
        return Err(config("give --setup or --means"));
    }
    let mut v = Vec::new();
    for name in &inst.setups {
        let kind: SetupKind = name.parse().map_err(config)?;
        let ks = match (kind, inst.ks.is_empty()) {
            (SetupKind::Geo7, _) => vec![7],
            (_, true) => vec![DEFAULT_ARMS],
            (_, false) => inst.ks.clone(),
        };
        for k in ks {
            let id = SetupId::new(kind, k).map_err(config)?;
            v.push(Instance {
                label: kind.to_string(),
                env: make_setup(id).map_err(config)?,
            });
        }
    }
    Ok(v)
}

fn single_instance(inst: &InstanceArgs) -> CliResult<Instance> {
    let mut v = resolve_instances(inst)?;
    if v.len() != 1 {
        return Err(config("this command takes exactly one instance"));
    }
    Ok(v.remove(0))
}

fn budget_for(inst: &InstanceArgs, env: &BanditEnv) -> CliResult<u64> {
    match inst.budget {
        Some(t) => Ok(t),
        None => default_budget(env).map_err(config),
    }
}

fn parse_algs(names: &[String]) -> CliResult<Vec<Algorithm>> {
    if names.is_empty() {
        return Ok(Algorithm::standard_lineup());
    }
    names.iter().map(|s| s.parse().map_err(config)).collect()
}

fn experiment_config(args: &ExpArgs, label: &str, budget: u64) -> CliResult<ExperimentConfig> {
    let ci = match &args.ci {
        Some(s) => s.parse::<CiMethod>().map_err(config)?,
        None => CiMethod::Normal,
    };
    let runs = args.runs.unwrap_or(DEFAULT_RUNS);
    if runs == 0 {
        return Err(config("--runs must be positive"));
    }
    if args.threads == Some(0) {
        return Err(config("--threads must be positive"));
    }
    Ok(ExperimentConfig {
        setup: label.to_string(),
        budget,
        runs,
        root_seed: args.seed.unwrap_or(0),
        threads: args.threads,
        ci,
    })
}

fn default_out_path(reports: &[ExperimentReport], format: Format) -> PathBuf {
    let stem = match reports {
        [r] => format!("seqelim_{}_K{}", r.setup, r.num_arms),
        _ => "seqelim_bench".to_string(),
    };
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    PathBuf::from(format!("{stem}.{ext}"))
}

/// Writes the machine-readable file and returns a note for the terminal.
fn persist(
    reports: &[ExperimentReport],
    args: &ExpArgs,
    out: &mut dyn Write,
) -> CliResult<Option<PathBuf>> {
    let format = args.format.unwrap_or(Format::Csv);
    let path = args.out.clone().unwrap_or_else(|| default_out_path(reports, format));
    let write = |w: &mut dyn Write| -> crate::error::Result<()> {
        match format {
            Format::Json => write_json(reports, &mut *w),
            Format::Csv => write_csv(reports, &mut *w),
        }
    };
    if path == Path::new("-") {
        write(out).map_err(runtime)?;
        return Ok(None);
    }
    let file = File::create(&path).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    write(&mut w).map_err(runtime)?;
    w.flush().map_err(runtime)?;
    Ok(Some(path))
}

fn cmd_run(args: ExpArgs, bench: bool, out: &mut dyn Write) -> CliResult<()> {
    let args = merge_config(args)?;
    let instances = resolve_instances(&args.instance)?;
    if !bench && instances.len() != 1 {
        return Err(config("`run` takes one instance; use `bench` for several"));
    }
    let algs = parse_algs(&args.algs)?;
    let mut reports = Vec::new();
    for inst in &instances {
        let budget = budget_for(&args.instance, &inst.env)?;
        let cfg = experiment_config(&args, &inst.label, budget)?;
        let report = run_experiment(&inst.env, &algs, &cfg).map_err(runtime)?;
        reports.push(report);
    }
    finish(&reports, &args, out)
}

fn finish(reports: &[ExperimentReport], args: &ExpArgs, out: &mut dyn Write) -> CliResult<()> {
    let to_stdout = args.out.as_deref() == Some(Path::new("-"));
    if !to_stdout {
        for r in reports {
            emit(out, &r.render_table())?;
        }
    }
    if let Some(path) = persist(reports, args, out)? {
        emit(out, &format!("wrote {}\n", path.display()))?;
    }
    Ok(())
}

fn cmd_bound(args: BoundArgs, out: &mut dyn Write) -> CliResult<()> {
    let inst = single_instance(&args.instance)?;
    let gaps = inst.env.gaps();
    let k = inst.env.num_arms();
    let budget = budget_for(&args.instance, &inst.env)?;
    let ps = if args.ps.is_empty() { DEFAULT_PS.to_vec() } else { args.ps };
    let rep = complexity_report(&gaps, &ps).map_err(config)?;

    let mut s = String::new();
    let _ = writeln!(s, "{} K={k} T={budget}", inst.label);
    let _ = writeln!(s, "H1 = {:.4}", rep.h1);
    let _ = writeln!(s, "H2 = {:.4}", rep.h2);
    let _ = writeln!(s, "logbar K = {:.6}", logbar(k));
    for &p in &ps {
        let _ = writeln!(
            s,
            "p = {p}: H(p) = {:.4}, C_p = {:.6}",
            rep.h_p[&format!("{p}")],
            c_p(k, p)
        );
    }
    let _ = writeln!(s, "{:<16} {:>14} {:>14} {:>14}", "algorithm", "alpha", "beta", "bound(T)");
    let mut rows = vec![BoundAlgorithm::SuccRej, BoundAlgorithm::SeqHalv];
    rows.extend(ps.iter().map(|&p| BoundAlgorithm::NSeqEl { p }));
    for alg in rows {
        let b = table1_bound(alg, &gaps).map_err(config)?;
        let name = match alg {
            BoundAlgorithm::SuccRej => "succrej".to_string(),
            BoundAlgorithm::SeqHalv => "seqhalv".to_string(),
            BoundAlgorithm::NSeqEl { p } => format!("nseqel(p={p})"),
        };
        let _ = writeln!(
            s,
            "{name:<16} {:>14.4} {:>14.4} {:>14.6e}",
            b.alpha,
            b.beta,
            b.eval(budget as f64)
        );
    }
    for &p in &ps {
        let v = proposition1_bound(&gaps, p, budget).map_err(config)?;
        let _ = writeln!(s, "N-Seq-El guarantee (p={p}) at T: {v:.6e}");
    }
    emit(out, &s)
}

fn cmd_advise_p(args: AdviseArgs, out: &mut dyn Write) -> CliResult<()> {
    let fk = match (args.fk, args.gamma) {
        (Some(f), _) => f,
        (None, Some(g)) => (args.k as f64).powf(g),
        (None, None) => return Err(config("give --fk or --gamma")),
    };
    let a = advise_p(args.k, fk).map_err(config)?;
    let row = match a.condition {
        crate::complexity::FkCondition::Few => "f_K <= log K",
        crate::complexity::FkCondition::Intermediate => "log K < f_K < K/log K",
        crate::complexity::FkCondition::Many => "f_K >= K/log K",
    };
    let mut s = String::new();
    let _ = writeln!(s, "K = {}, f_K = {fk:.4} ({row})", a.num_arms);
    let _ = writeln!(s, "recommended p in {}", a.recommended);
    let _ = writeln!(s, "interpolated range {}", a.interpolated);
    let _ = writeln!(s, "suggested p = {:.3}", a.suggest());
    emit(out, &s)
}

fn cmd_block(args: BlockArgs, out: &mut dyn Write) -> CliResult<()> {
    let BlockArgs { exp, blocks, p } = args;
    let exp = merge_config(exp)?;
    let inst = single_instance(&exp.instance)?;
    let partition = BlockPartition::parse(&blocks).map_err(config)?;
    if partition.num_arms() != inst.env.num_arms() {
        return Err(config(format!(
            "partition covers {} arms, instance has {}",
            partition.num_arms(),
            inst.env.num_arms()
        )));
    }
    let budget = budget_for(&exp.instance, &inst.env)?;
    let sched = block_schedule_power(partition.num_blocks(), budget, p).map_err(config)?;
    let bound = theorem2_bound(&partition, &sched, &inst.env.gaps(), Some(p)).map_err(runtime)?;

    let alg = Algorithm::Block { blocks, p };
    let cfg = experiment_config(&exp, &inst.label, budget)?;
    let report = run_experiment(&inst.env, &[alg], &cfg).map_err(runtime)?;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "M = {} blocks, C = {:.6}, targets {:?}, block pulls {}",
        partition.num_blocks(),
        sched.normalizer(),
        sched.targets(),
        sched.block_pulls()
    );
    let _ = write!(s, "block elimination bound at T: {:.6e}", bound.general);
    if let Some(pw) = bound.power {
        let _ = write!(s, " (power form {pw:.6e})");
    }
    s.push('\n');
    emit(out, &s)?;
    finish(&[report], &exp, out)
}

fn cmd_oracle(args: OracleArgs, out: &mut dyn Write) -> CliResult<()> {
    let inst = single_instance(&args.instance)?;
    let budget = budget_for(&args.instance, &inst.env)?;
    let algs = parse_algs(&args.algs)?;
    let mut s = format!("{} K={} T={budget}\n", inst.label, inst.env.num_arms());
    let mut failed = None;
    for alg in &algs {
        match exact_misid_probability(&inst.env, alg, budget) {
            Ok(r) => {
                let _ = writeln!(s, "{:<24} {:.12} ({} states)", alg.to_string(), r.probability, r.enumeration_size);
            }
            Err(e) => {
                let _ = writeln!(s, "{:<24} failed: {e}", alg.to_string());
                failed = Some(e);
            }
        }
    }
    emit(out, &s)?;
    match failed {
        Some(e) => Err(runtime(e)),
        None => Ok(()),
    }
}

fn cmd_report(args: ReportArgs, out: &mut dyn Write) -> CliResult<()> {
    let file = File::open(&args.input).map_err(|e| config(format!("{}: {e}", args.input.display())))?;
    let is_csv = args.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let rows = read_csv(file).map_err(runtime)?;
        let mut s = String::new();
        for r in rows {
            let fmt_opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.5}"));
            let name = if r.params.is_empty() { r.alg.clone() } else { format!("{}({})", r.alg, r.params) };
            let _ = writeln!(
                s,
                "{} K={} T={} {name:<24} {:>10} {:>10}",
                r.setup,
                r.num_arms,
                r.budget,
                fmt_opt(r.freq),
                fmt_opt(r.ci_half)
            );
        }
        return emit(out, &s);
    }
    let reports = read_json(file).map_err(runtime)?;
    for r in &reports {
        emit(out, &r.render_table())?;
    }
    Ok(())
}
