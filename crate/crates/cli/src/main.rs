//! `nbdiff` — two-sample inference for overdispersed count data.
//!
//! Subcommands: `analyze` real count samples, `simulate` coverage experiment
//! grids, and `report` a simulation results CSV.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use nbdiff::distributions::{mom_dispersion, summarize, SampleStats};
use nbdiff::inference::{
    ci_bernstein_from_stats, ci_mixture, ci_normal_two_sample, select_method,
    test_mean_difference, ArmSpec, IntervalEstimate, MethodKind, SelectorThresholds, TestResult,
    VarianceGridCell, VarianceMode,
};
use nbdiff::simulation::{run_grid, GridSpec};

use nbdiff_cli::config::parse_grid_config;
use nbdiff_cli::csvio::{read_results_csv, write_result_rows, RESULTS_HEADER};
use nbdiff_cli::input::{read_counts, read_grouped_counts};
use nbdiff_cli::report::{length_summary, render_summary, write_coverage_matrices};

const EXIT_DEGENERATE: u8 = 3;
const PARALLELISM_ENV: &str = "NBDIFF_PARALLELISM";

#[derive(Parser)]
#[command(
    name = "nbdiff",
    version,
    about = "Confidence intervals and tests for the difference of means of two overdispersed count samples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze two observed count samples
    Analyze(Box<AnalyzeArgs>),
    /// Run a grid of Monte Carlo coverage experiments
    Simulate(SimulateArgs),
    /// Summarize a results CSV and emit plot data
    Report(ReportArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Counts for sample X: plain text, one non-negative integer per line
    #[arg(long, requires = "y", conflicts_with = "data")]
    x: Option<PathBuf>,
    /// Counts for sample Y
    #[arg(long, requires = "x")]
    y: Option<PathBuf>,
    /// Two-column CSV `group,count` with groups `x` and `y`
    #[arg(long)]
    data: Option<PathBuf>,
    /// Significance level of the intervals
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Interval methods to compute
    #[arg(long, value_delimiter = ',', default_value = "normal,bernstein,mixture")]
    methods: Vec<String>,
    /// Variance estimation for the normal interval: `direct` or `grid`
    #[arg(long, default_value = "direct")]
    variance_mode: String,
    /// Distribution kind of X̄ in grid mode: normal, gamma, or chi-square
    #[arg(long)]
    kind_x: Option<String>,
    /// Distribution kind of Ȳ in grid mode
    #[arg(long)]
    kind_y: Option<String>,
    /// Population mean of X for grid mode
    #[arg(long)]
    mu_x: Option<f64>,
    /// Population dispersion of X for grid mode
    #[arg(long)]
    theta_x: Option<f64>,
    /// Population mean of Y for grid mode
    #[arg(long)]
    mu_y: Option<f64>,
    /// Population dispersion of Y for grid mode
    #[arg(long)]
    theta_y: Option<f64>,
    /// Weight of the normal interval in the mixture
    #[arg(long, default_value_t = 0.5)]
    mixture_weight: f64,
    /// Scaling constant on the lower support bound
    #[arg(long, default_value_t = 1.0)]
    c_a: f64,
    /// Scaling constant on the upper support bound
    #[arg(long, default_value_t = 1.0)]
    c_b: f64,
    /// Null value w: also test H0: mu_x - mu_y = w
    #[arg(long)]
    null: Option<f64>,
    /// Write a machine-readable JSON record here
    #[arg(long)]
    record: Option<PathBuf>,
    /// Exit nonzero when any requested interval is degenerate
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Grid configuration file
    #[arg(long, conflicts_with = "full_grid")]
    config: Option<PathBuf>,
    /// Run the built-in full factorial survey (52,900 experiments — days of
    /// compute at the default 10,000 trials)
    #[arg(long)]
    full_grid: bool,
    /// Results CSV path
    #[arg(long)]
    output: PathBuf,
    /// Worker threads (default: NBDIFF_PARALLELISM env var, else 1)
    #[arg(long)]
    parallelism: Option<usize>,
    /// Override the master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the per-experiment trial count
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Results CSV produced by `nbdiff simulate`
    results: PathBuf,
    /// Also write per-surface `n_x,n_y,coverage` matrices here
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => cmd_analyze(*args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Report(args) => cmd_report(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_methods(names: &[String]) -> Result<Vec<MethodKind>> {
    if names.is_empty() {
        bail!("at least one method must be requested");
    }
    let mut methods = Vec::new();
    for name in names {
        let m: MethodKind = name.parse().map_err(|e| anyhow!("{e}"))?;
        match m {
            MethodKind::Normal | MethodKind::Bernstein | MethodKind::Mixture => {}
            other => bail!("method `{other}` has no two-sample interval estimator"),
        }
        if methods.contains(&m) {
            bail!("method `{m}` requested more than once");
        }
        methods.push(m);
    }
    Ok(methods)
}

fn grid_cell_from_args(args: &AnalyzeArgs, x_stats: &SampleStats, y_stats: &SampleStats) -> Result<VarianceGridCell> {
    let need = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| anyhow!("--variance-mode grid requires --{name}"))
    };
    let kind_x: MethodKind = args
        .kind_x
        .as_deref()
        .ok_or_else(|| anyhow!("--variance-mode grid requires --kind-x"))?
        .parse()
        .map_err(|e| anyhow!("--kind-x: {e}"))?;
    let kind_y: MethodKind = args
        .kind_y
        .as_deref()
        .ok_or_else(|| anyhow!("--variance-mode grid requires --kind-y"))?
        .parse()
        .map_err(|e| anyhow!("--kind-y: {e}"))?;
    let x_arm = ArmSpec::from_population(
        kind_x,
        need("mu-x", args.mu_x)?,
        need("theta-x", args.theta_x)?,
        x_stats.n,
    )?;
    let y_arm = ArmSpec::from_population(
        kind_y,
        need("mu-y", args.mu_y)?,
        need("theta-y", args.theta_y)?,
        y_stats.n,
    )?;
    Ok(VarianceGridCell::new(&x_arm, &y_arm))
}

fn selector_note(stats: &SampleStats) -> String {
    match mom_dispersion(stats) {
        Ok(theta_hat) => {
            match select_method(stats.n, stats.mean, theta_hat, &SelectorThresholds::default()) {
                Ok(kind) => format!("{kind} (theta-hat = {theta_hat:.6})"),
                Err(e) => format!("unavailable ({e})"),
            }
        }
        Err(e) => format!("unavailable ({e})"),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let methods = parse_methods(&args.methods)?;
    let (x, y) = match (&args.x, &args.y, &args.data) {
        (Some(x_path), Some(y_path), None) => (read_counts(x_path)?, read_counts(y_path)?),
        (None, None, Some(data_path)) => read_grouped_counts(data_path)?,
        _ => bail!("provide either --x and --y, or --data"),
    };
    let x_stats = summarize(&x).map_err(|e| anyhow!("sample x: {e}"))?;
    let y_stats = summarize(&y).map_err(|e| anyhow!("sample y: {e}"))?;
    let diff = x_stats.mean - y_stats.mean;

    let variance_mode = match args.variance_mode.as_str() {
        "direct" => VarianceMode::Direct,
        "grid" => VarianceMode::Grid(grid_cell_from_args(&args, &x_stats, &y_stats)?),
        other => bail!("--variance-mode must be `direct` or `grid`, got `{other}`"),
    };

    let needs_normal =
        methods.contains(&MethodKind::Normal) || methods.contains(&MethodKind::Mixture);
    let needs_bernstein =
        methods.contains(&MethodKind::Bernstein) || methods.contains(&MethodKind::Mixture);
    let normal_ci = needs_normal
        .then(|| ci_normal_two_sample(&x_stats, &y_stats, args.alpha, &variance_mode))
        .transpose()?;
    let bernstein_ci = needs_bernstein
        .then(|| ci_bernstein_from_stats(&x_stats, &y_stats, args.alpha, args.c_a, args.c_b))
        .transpose()?;

    let mut intervals: Vec<IntervalEstimate> = Vec::new();
    for &method in &methods {
        let ci = match method {
            MethodKind::Normal => normal_ci.expect("computed above"),
            MethodKind::Bernstein => bernstein_ci.expect("computed above"),
            MethodKind::Mixture => ci_mixture(
                normal_ci.as_ref().expect("computed above"),
                bernstein_ci.as_ref().expect("computed above"),
                args.mixture_weight,
            )?,
            _ => unreachable!("parse_methods restricts the set"),
        };
        intervals.push(ci);
    }

    let mut tests: Vec<TestResult> = Vec::new();
    if let Some(w) = args.null {
        for &method in &methods {
            if matches!(method, MethodKind::Normal | MethodKind::Bernstein) {
                tests.push(test_mean_difference(
                    &x, &y, w, method, args.alpha, args.c_a, args.c_b,
                )?);
            }
        }
        if tests.is_empty() {
            eprintln!("note: --null given but no testable method (normal/bernstein) requested");
        }
    }

    // Human-readable report.
    println!(
        "sample x: n={}  mean={}  variance={}  max={}",
        x_stats.n, x_stats.mean, x_stats.variance, x_stats.max
    );
    println!(
        "sample y: n={}  mean={}  variance={}  max={}",
        y_stats.n, y_stats.mean, y_stats.variance, y_stats.max
    );
    println!("difference of sample means: {diff}");
    println!("suggested one-sample method: x -> {}", selector_note(&x_stats));
    println!("suggested one-sample method: y -> {}", selector_note(&y_stats));
    println!(
        "{}% confidence intervals for mu_x - mu_y:",
        (1.0 - args.alpha) * 100.0
    );
    println!(
        "  {:<10} {:>14} {:>14} {:>14}",
        "method", "lower", "upper", "length"
    );
    for ci in &intervals {
        let tag = if ci.degenerate { "  (degenerate)" } else { "" };
        println!(
            "  {:<10} {:>14.6} {:>14.6} {:>14.6}{tag}",
            ci.method.name(),
            ci.lower,
            ci.upper,
            ci.length
        );
    }
    if let Some(w) = args.null {
        println!("test of H0: mu_x - mu_y = {w} (two-sided):");
        println!(
            "  {:<10} {:>14} {:>14}   reject at alpha={}",
            "method", "statistic", "p-value", args.alpha
        );
        for t in &tests {
            println!(
                "  {:<10} {:>14.6} {:>14} {}",
                t.method.name(),
                t.statistic,
                t.p_value,
                if t.reject { "  yes" } else { "  no" }
            );
        }
    }

    let degenerate: Vec<&IntervalEstimate> =
        intervals.iter().filter(|ci| ci.degenerate).collect();
    for ci in &degenerate {
        eprintln!(
            "warning: {} interval is degenerate (zero width) — constant samples carry no variance information",
            ci.method.name()
        );
    }

    if let Some(path) = &args.record {
        fs::write(path, analysis_record(&x_stats, &y_stats, &intervals, &tests))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }

    if args.strict && !degenerate.is_empty() {
        return Ok(ExitCode::from(EXIT_DEGENERATE));
    }
    Ok(ExitCode::SUCCESS)
}

/// Flat JSON record of one analysis. Every value is finite by construction,
/// so `Display` output is valid JSON.
fn analysis_record(
    x_stats: &SampleStats,
    y_stats: &SampleStats,
    intervals: &[IntervalEstimate],
    tests: &[TestResult],
) -> String {
    let stats_json = |s: &SampleStats| {
        format!(
            r#"{{"n":{},"mean":{},"variance":{},"max":{}}}"#,
            s.n, s.mean, s.variance, s.max
        )
    };
    let interval_json = |ci: &IntervalEstimate| {
        format!(
            r#"{{"method":"{}","lower":{},"upper":{},"length":{},"level":{},"degenerate":{}}}"#,
            ci.method.name(),
            ci.lower,
            ci.upper,
            ci.length,
            ci.level,
            ci.degenerate
        )
    };
    let test_json = |t: &TestResult| {
        format!(
            r#"{{"method":"{}","null_value":{},"statistic":{},"p_value":{},"alpha":{},"reject":{}}}"#,
            t.method.name(),
            t.null_value,
            t.statistic,
            t.p_value,
            t.alpha,
            t.reject
        )
    };
    format!(
        "{{\"x\":{},\"y\":{},\"diff\":{},\"intervals\":[{}],\"tests\":[{}]}}\n",
        stats_json(x_stats),
        stats_json(y_stats),
        x_stats.mean - y_stats.mean,
        intervals
            .iter()
            .map(interval_json)
            .collect::<Vec<_>>()
            .join(","),
        tests.iter().map(test_json).collect::<Vec<_>>().join(",")
    )
}

fn default_parallelism() -> Result<usize> {
    match std::env::var(PARALLELISM_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .with_context(|| format!("{PARALLELISM_ENV}={v} is not a positive integer")),
        Err(_) => Ok(1),
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode> {
    let mut grid: GridSpec = if args.full_grid {
        let trials = args.trials.unwrap_or(10_000);
        let seed = args.seed.unwrap_or(1);
        let grid = GridSpec::full_grid(trials, seed);
        eprintln!(
            "warning: full survey grid is {} experiments at {} trials each; \
             expect a multi-day run at full scale",
            grid.len(),
            trials
        );
        grid
    } else {
        let path = args
            .config
            .as_ref()
            .ok_or_else(|| anyhow!("provide --config <file> or --full-grid"))?;
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        parse_grid_config(&text).with_context(|| format!("{}", path.display()))?
    };
    if let Some(seed) = args.seed {
        grid.master_seed = seed;
    }
    if !args.full_grid {
        if let Some(trials) = args.trials {
            grid.trials = trials;
        }
    }
    let parallelism = match args.parallelism {
        Some(p) if p >= 1 => p,
        Some(_) => bail!("--parallelism must be >= 1"),
        None => default_parallelism()?,
    };

    let file = fs::File::create(&args.output)
        .with_context(|| format!("cannot create {}", args.output.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{RESULTS_HEADER}")?;

    let mut write_error: Option<std::io::Error> = None;
    let results = run_grid(&grid, parallelism, |result| {
        if write_error.is_some() {
            return;
        }
        // Stream each finished experiment so long runs leave partial output.
        if let Err(e) = write_result_rows(&mut out, result).and_then(|_| out.flush()) {
            write_error = Some(e);
        }
    })
    .map_err(|e| anyhow!("simulation failed: {e}"))?;
    if let Some(e) = write_error {
        return Err(anyhow!(e).context(format!("writing {}", args.output.display())));
    }
    out.flush()?;

    eprintln!(
        "wrote {} experiments x {} methods to {}",
        results.len(),
        grid.methods.len(),
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_report(args: ReportArgs) -> Result<ExitCode> {
    let rows = read_results_csv(&args.results)?;
    let experiments = {
        let mut keys: Vec<_> = rows.iter().map(|r| r.experiment_key()).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.len()
    };
    let summary = length_summary(&rows)?;
    print!("{}", render_summary(&summary, experiments));

    if let Some(dir) = &args.out_dir {
        let paths = write_coverage_matrices(&rows, dir)?;
        println!(
            "wrote {} coverage matrix file(s) under {}",
            paths.len(),
            dir.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}
