//! The `mbandit` command line: single runs, seed sweeps, K-scaling sweeps and
//! the verification suites.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

pub use config::*;

use crate::bandit::{run_experiment, Algo, RegretTrace};
use crate::error::{input_err, Error, Result};
use crate::matroid::{MatroidKind, MatroidSpec, TieBreak};
use crate::verify::{run_suite, SuiteOptions, SUITES};

#[derive(Debug, Parser)]
#[command(name = "mbandit", version, about = "Matroid semi-bandit experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run; writes the regret CSV and a summary block.
    Run(RunArgs),
    /// Runs `--seeds` consecutive seeds in parallel and aggregates final regret.
    SweepSeeds(RunArgs),
    /// Per-round timing of cucb and fastercucb on `uniform K D` for each K.
    Scaling(ScalingArgs),
    /// Randomized oracle and invariant suites.
    Verify(VerifyArgs),
}

/// Experiment flags shared by every command that runs the bandit.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Key=value file; flags win over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// e.g. "uniform 8 3", "partition 4 \"0,0,1,1\"", "graphical 3 \"0,1;1,2\"".
    #[arg(long)]
    pub matroid: Option<String>,
    /// cucb, fastercucb or lazyheap.
    #[arg(long)]
    pub algo: Option<String>,
    /// Horizon.
    #[arg(long = "T")]
    pub horizon: Option<String>,
    /// Precision exponent of the fastercucb accuracy.
    #[arg(long)]
    pub m: Option<String>,
    /// Fixed index accuracy instead of the horizon default.
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// Comma list, linear:HI:LO, const:V or twolevel:HI:LO:NHI.
    #[arg(long)]
    pub means: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub seeds: Option<String>,
    /// Lazy-heap rebuild rounds: pow2, squares or power:ALPHA.
    #[arg(long)]
    pub schedule: Option<String>,
    /// twopoint or gaussian:SIGMA.
    #[arg(long)]
    pub arms: Option<String>,
    /// coverage or per-arm.
    #[arg(long = "init-mode")]
    pub init_mode: Option<String>,
    /// running or round-indexed.
    #[arg(long = "mean-update")]
    pub mean_update: Option<String>,
    /// Output CSV path; the summary goes next to it with a `.summary` suffix.
    #[arg(long)]
    pub out: Option<String>,
    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,
}

impl ConfigArgs {
    pub fn raw(&self) -> Result<RawConfig> {
        let flags = RawConfig {
            matroid: self.matroid.clone(),
            algo: self.algo.clone(),
            horizon: self.horizon.clone(),
            m: self.m.clone(),
            epsilon: self.epsilon.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            means: self.means.clone(),
            seed: self.seed.clone(),
            seeds: self.seeds.clone(),
            schedule: self.schedule.clone(),
            out: self.out.clone(),
            arms: self.arms.clone(),
            init_mode: self.init_mode.clone(),
            mean_update: self.mean_update.clone(),
        };
        Ok(match &self.config {
            Some(path) => flags.over(RawConfig::from_file(path)?),
            None => flags,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Fill the round_nanos column (otherwise 0, keeping the CSV reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub cfg: ConfigArgs,
    /// Comma-separated ground-set sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ks: Vec<usize>,
    /// Rank of the uniform matroid; defaults to the rank of `--matroid`, else 8.
    #[arg(long)]
    pub d: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suite names (repeatable or comma-separated); all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<String>,
    /// Acceptance-size parameters instead of the quick defaults.
    #[arg(long)]
    pub full: bool,
    #[arg(long = "inject-fault", hide = true)]
    pub inject_fault: Option<String>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match with_thread_pool(|| execute(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mbandit: {e}");
            match e {
                Error::Input(_) | Error::Refused(_) => 2,
                _ => 1,
            }
        }
    }
}

fn with_thread_pool<R: Send>(f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    let Some(n) = std::env::var("MB_THREADS").ok() else {
        return f();
    };
    let n: usize = n
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| input_err!("MB_THREADS: expected a positive integer, got '{n}'"))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    pool.install(f)
}

pub fn execute(command: &Command) -> Result<i32> {
    match command {
        Command::Run(a) => cmd_run(a),
        Command::SweepSeeds(a) => cmd_sweep_seeds(a),
        Command::Scaling(a) => cmd_scaling(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn output_paths(out: &Path) -> (PathBuf, PathBuf) {
    let mut summary = out.as_os_str().to_owned();
    summary.push(".summary");
    (out.to_path_buf(), PathBuf::from(summary))
}

/// Writes `contents`, creating parent directories; an existing file is only
/// replaced with `force`.
pub fn write_output(path: &Path, contents: &str, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(input_err!("out: {} exists (pass --force to overwrite)", path.display()));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_pair(out: &Option<PathBuf>, csv: &str, summary: &str, force: bool) -> Result<()> {
    if let Some(out) = out {
        let (csv_path, summary_path) = output_paths(out);
        for p in [&csv_path, &summary_path] {
            if p.exists() && !force {
                return Err(input_err!("out: {} exists (pass --force to overwrite)", p.display()));
            }
        }
        write_output(&csv_path, csv, force)?;
        write_output(&summary_path, summary, force)?;
    }
    print!("{summary}");
    Ok(())
}

/// `round,cum_regret,round_nanos`, one row per round.
pub fn trace_csv(trace: &RegretTrace, timing: bool) -> String {
    let mut s = String::with_capacity(trace.cumulative_regret.len() * 24);
    s.push_str("round,cum_regret,round_nanos\n");
    for (i, r) in trace.cumulative_regret.iter().enumerate() {
        let ns = if timing { trace.round_nanos[i] } else { 0 };
        let _ = writeln!(s, "{},{r},{ns}", i + 1);
    }
    s
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| v.to_string())
}

/// Key=value summary of a run.
pub fn trace_summary(trace: &RegretTrace) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "final_regret={}", trace.final_regret());
    let _ = writeln!(s, "regret_over_logT={}", trace.regret_over_log_t());
    let _ = writeln!(s, "theorem_bound={}", trace.theorem_bound);
    let _ = writeln!(s, "T0={}", trace.t0);
    let _ = writeln!(s, "delta_min={}", fmt_opt(trace.gaps.delta_min));
    for (k, n) in trace.pulls_final.iter().enumerate() {
        let _ = writeln!(s, "N_{k}={n}");
    }
    s
}

fn cmd_run(a: &RunArgs) -> Result<i32> {
    let cfg = ExperimentConfig::from_raw(&a.cfg.raw()?)?;
    let trace = run_experiment(&cfg.run_config(cfg.seed)?)?;
    write_pair(&cfg.out, &trace_csv(&trace, a.timing), &trace_summary(&trace), a.cfg.force)?;
    Ok(0)
}

/// Mean, median and sample standard deviation.
pub fn aggregate(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 };
    let sd = if n > 1 {
        (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    (mean, median, sd)
}

fn cmd_sweep_seeds(a: &RunArgs) -> Result<i32> {
    let cfg = ExperimentConfig::from_raw(&a.cfg.raw()?)?;
    let n = cfg.seeds.ok_or_else(|| input_err!("seeds: required for sweep-seeds"))?;
    let mut base = cfg.run_config(cfg.seed)?;
    if base.algo == Algo::FasterCucb {
        base.hitting_set = base.shared_hitting_set()?;
    }
    let seeds: Vec<u64> = (0..n as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    let finals: Vec<(u64, f64, f64)> = seeds
        .par_iter()
        .map(|&s| {
            let mut c = base.clone();
            c.seed = s;
            run_experiment(&c).map(|t| (s, t.final_regret(), t.regret_over_log_t()))
        })
        .collect::<Result<_>>()?;
    let mut csv = String::from("seed,final_regret,regret_over_logT\n");
    for (s, r, rl) in &finals {
        let _ = writeln!(csv, "{s},{r},{rl}");
    }
    let values: Vec<f64> = finals.iter().map(|x| x.1).collect();
    let (mean, median, sd) = aggregate(&values);
    let summary = format!("seeds={n}\nmean={mean}\nmedian={median}\nstddev={sd}\n");
    write_pair(&cfg.out, &csv, &summary, a.cfg.force)?;
    Ok(0)
}

fn cmd_scaling(a: &ScalingArgs) -> Result<i32> {
    let mut raw = a.cfg.raw()?;
    let d = match (a.d, raw.matroid.as_deref()) {
        (Some(d), _) => d,
        (None, Some(m)) => m.parse::<MatroidSpec>()?.rank(),
        (None, None) => 8,
    };
    let k_max = a.ks.iter().copied().max().ok_or_else(|| input_err!("ks: empty"))?;
    raw.matroid = Some(format!("uniform {k_max} {d}"));
    if raw.horizon.is_none() {
        raw.horizon = Some("20000".to_string());
    }
    let cfg = ExperimentConfig::from_raw_unchecked_horizon(&raw)?;
    if cfg.matroid.kind() != MatroidKind::Uniform {
        return Err(input_err!("matroid: scaling uses uniform matroids"));
    }
    let mut csv = String::from("K,algo,mean_ns,p50_ns,p99_ns\n");
    // runs one at a time: concurrent runs would distort the timings
    for &k in &a.ks {
        if k < d {
            return Err(input_err!("ks: K = {k} is below the rank {d}"));
        }
        for algo in [Algo::Cucb, Algo::FasterCucb] {
            let mut rc = cfg.run_config_for(MatroidSpec::uniform(k, d)?, cfg.seed)?;
            rc.algo = algo;
            let t = run_experiment(&rc)?.timing();
            let line = format!("{k},{algo},{:.1},{},{}", t.mean_ns, t.p50_ns, t.p99_ns);
            eprintln!("{line}");
            csv.push_str(&line);
            csv.push('\n');
        }
    }
    match &cfg.out {
        Some(p) => write_output(p, &csv, a.cfg.force)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let tie = match a.inject_fault.as_deref() {
        None => TieBreak::AscendingIndex,
        Some("tie-break") => TieBreak::DescendingIndex,
        Some(other) => return Err(input_err!("inject-fault: unknown fault '{other}'")),
    };
    let names: Vec<&str> = if a.suite.is_empty() {
        SUITES.to_vec()
    } else {
        a.suite.iter().map(|s| s.trim()).collect()
    };
    for n in &names {
        if !SUITES.contains(n) {
            return Err(input_err!("suite: unknown '{n}' (one of {})", SUITES.join(", ")));
        }
    }
    let opts = SuiteOptions { full: a.full, tie };
    let mut failed = 0;
    for n in names {
        let r = run_suite(n, opts)?;
        println!("{r}");
        failed += usize::from(!r.passed);
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("mbandit").chain(args.iter().copied()))
    }

    #[test]
    fn flags_parse_into_config() {
        let cli = parse(&["run", "--matroid", "uniform 8 3", "--algo", "fastercucb", "--T", "100000", "--m", "1", "--a", "0.1", "--b", "0.9", "--seed", "7"]).unwrap();
        let Command::Run(a) = cli.command else { panic!() };
        let cfg = ExperimentConfig::from_raw(&a.cfg.raw().unwrap()).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.algo, Algo::FasterCucb);
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert!(parse(&["run", "--bogus", "1"]).is_err());
        assert_eq!(main_with_args(["mbandit", "run", "--bogus", "1"]), 2);
    }

    #[test]
    fn invariant_errors_exit_nonzero() {
        assert_ne!(main_with_args(["mbandit", "run", "--T", "5", "--matroid", "uniform 8 3"]), 0);
        assert_ne!(main_with_args(["mbandit", "run", "--T", "50", "--algo", "lazyheap", "--matroid", "graphical 3 \"0,1;1,2\""]), 0);
    }

    #[test]
    fn aggregate_values() {
        let (m, med, sd) = aggregate(&[1.0, 2.0, 3.0, 10.0]);
        assert_eq!(m, 4.0);
        assert_eq!(med, 2.5);
        assert!((sd - 4.08248290463863).abs() < 1e-12);
        assert_eq!(aggregate(&[0.0, 0.0]), (0.0, 0.0, 0.0));
    }

    #[test]
    fn summary_path_appends_suffix() {
        let (c, s) = output_paths(Path::new("out/run.csv"));
        assert_eq!(c, PathBuf::from("out/run.csv"));
        assert_eq!(s, PathBuf::from("out/run.csv.summary"));
    }
}
