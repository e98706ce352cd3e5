//! Command line interface for the capital asset pricing game engine.
//!
//! Subcommands: `simulate` (one full game with witness ledgers), `analyze`
//! (statistics over a CSV return series), `verify` (Monte Carlo sweep of the
//! witness implications), `sweep` (convergence study over round durations).
//!
//! Exit codes: 0 success/verified, 1 usage error, 2 data error,
//! 3 verification violation.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use capm_game::bounds::{
    optimize_upper_bound, prop2_sandwich, verify_witness_lower, verify_witness_upper,
    IMPLICATION_SLACK,
};
use capm_game::ingest::ReturnSeries;
use capm_game::protocol::{GameConfig, Weights};
use capm_game::report::RunReport;
use capm_game::sim::{run_many, run_play, trial_seeds, PlayOutcome, PlaySpec};
use capm_game::strategies::{GbmParams, InvestorPolicy, MarketModel, SpeculatorPolicy};

#[derive(Parser)]
#[command(
    name = "capm-game",
    version,
    about = "Capital asset pricing game: simulate plays, analyze return series, verify the witness bounds",
    after_help = "Environment:\n  CAPM_GAME_THREADS  cap the size of the worker thread pool\n\n\
Default grids span three orders of magnitude: epsilon {0.01, 0.1, 0.3} and alpha {0.5, 0.1, 0.01}."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one full game and report statistics, bounds, and verdicts.
    Simulate(SimulateArgs),
    /// Compute all statistics, residuals, and bounds over a CSV series.
    Analyze(AnalyzeArgs),
    /// Monte Carlo sweep of the witness implications; exits 3 on violation.
    Verify(VerifyArgs),
    /// Convergence study over a list of round durations at fixed horizon.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct MarketArgs {
    /// Market model: gbm | csv | alternating
    #[arg(long, default_value = "gbm")]
    market: String,

    /// Per-security drift per unit time, comma separated, index first.
    /// A single value is broadcast to all securities.
    #[arg(long, default_value = "0.05,0.08", allow_hyphen_values = true)]
    mu: String,

    /// Per-security volatility per sqrt unit time, comma separated.
    #[arg(long, default_value = "0.2,0.3")]
    sigma: String,

    /// Pairwise correlation: a scalar, or matrix rows "1,0.5;0.5,1".
    #[arg(long, default_value = "0.5", allow_hyphen_values = true)]
    corr: String,

    /// Number of non-index securities.
    #[arg(long = "K", default_value_t = 1)]
    num_securities: usize,

    /// Number of rounds.
    #[arg(long = "N", default_value_t = 100_000)]
    num_rounds: usize,

    /// Round duration in time units.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,

    /// Seed for stochastic markets (trial i uses seed + i in sweeps).
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Return series to replay when --market csv.
    #[arg(long)]
    csv: Option<PathBuf>,

    /// Alternation magnitude when --market alternating.
    #[arg(long, default_value_t = 0.01)]
    magnitude: f64,

    /// Investor policy: hold-index | fixed:w0,w1,... | buy-and-hold:w0,w1,...
    #[arg(long, default_value = "hold-index")]
    investor: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    market: MarketArgs,

    /// Witness blend fraction for the report's prediction section.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    /// Prediction level for the report's bounds.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,

    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write the played return path as CSV here.
    #[arg(long)]
    dump_path: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Return series to analyze.
    #[arg(long)]
    csv: PathBuf,

    /// Round duration of the series (e.g. 1/252 for daily data in years).
    #[arg(long)]
    dt: f64,

    /// How Investor's portfolio s is formed from the columns:
    /// col:J (column J is already s) | hold-index | fixed:w0,w1,...
    /// Default: column 1 when present, otherwise hold-index.
    #[arg(long)]
    investor: Option<String>,

    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,

    #[arg(long, default_value_t = 0.1)]
    alpha: f64,

    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    market: MarketArgs,

    /// Number of independent seeded trials.
    #[arg(long, default_value_t = 1000)]
    trials: usize,

    /// Witness blend fractions to check, comma separated.
    #[arg(long, default_value = "0.01,0.1,0.3")]
    epsilons: String,

    /// Prediction levels to check, comma separated.
    #[arg(long, default_value = "0.5,0.1,0.01")]
    alphas: String,

    /// Write the JSON tally here.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Test hook: scale every bound by 0.0 before checking, to prove the
    /// verifier can fail.
    #[arg(long, hide = true)]
    corrupt_bound: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    market: MarketArgs,

    /// Round durations to sweep, comma separated.
    #[arg(long, default_value = "1e-2,1e-3,1e-4")]
    dt_list: String,

    /// Fixed horizon T; each dt runs T/dt rounds.
    #[arg(long, default_value_t = 50.0)]
    horizon: f64,

    /// Number of seeded sweeps (sweep i uses seed + i for every dt).
    #[arg(long, default_value_t = 1)]
    sweeps: usize,

    /// Prediction level for the optimized bound column.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,

    /// Write the CSV table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Marker for bad flag values and combinations, so they map to exit code 1.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: String) -> anyhow::Error {
    anyhow::Error::new(UsageError(message))
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };

    if let Ok(threads) = std::env::var("CAPM_GAME_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) => capm_game::sim::init_thread_cap(Some(n)),
            Err(_) => {
                eprintln!("error: CAPM_GAME_THREADS must be an integer, got {threads:?}");
                return 1;
            }
        }
    }

    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            classify(&err)
        }
    }
}

/// Map errors onto the documented exit codes: bad flags and unplayable
/// configurations are usage (1), everything reached through data is 2.
fn classify(err: &anyhow::Error) -> i32 {
    use capm_game::Error as E;
    if err.downcast_ref::<UsageError>().is_some()
        || err.downcast_ref::<std::num::ParseFloatError>().is_some()
        || err.downcast_ref::<std::num::ParseIntError>().is_some()
    {
        return 1;
    }
    match err.downcast_ref::<E>() {
        Some(
            E::InvalidConfig(_)
            | E::InvalidWeights { .. }
            | E::NonFiniteWeight { .. }
            | E::DimensionMismatch { .. }
            | E::EpsilonOutOfRange { .. }
            | E::AlphaOutOfRange(_)
            | E::InvalidSplit { .. }
            | E::NotPositiveSemidefinite,
        ) => 1,
        _ => 2,
    }
}

// ---------------------------------------------------------------------------
// Flag parsing helpers
// ---------------------------------------------------------------------------

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .with_context(|| format!("cannot parse {what} value {s:?}"))
        })
        .collect()
}

fn broadcast(values: Vec<f64>, width: usize, what: &str) -> Result<Vec<f64>> {
    if values.len() == width {
        Ok(values)
    } else if values.len() == 1 {
        Ok(vec![values[0]; width])
    } else {
        Err(usage(format!(
            "--{what} needs 1 or {width} values, got {}",
            values.len()
        )))
    }
}

fn parse_correlation(text: &str, width: usize) -> Result<Vec<Vec<f64>>> {
    if text.contains(';') {
        let rows: Vec<Vec<f64>> = text
            .split(';')
            .map(|row| parse_f64_list(row, "corr"))
            .collect::<Result<_>>()?;
        if rows.len() != width || rows.iter().any(|r| r.len() != width) {
            return Err(usage(format!("--corr matrix must be {width}x{width}")));
        }
        Ok(rows)
    } else {
        let rho: f64 = text
            .trim()
            .parse()
            .with_context(|| format!("cannot parse --corr value {text:?}"))?;
        Ok(GbmParams::with_uniform_correlation(vec![0.0; width], vec![0.0; width], rho).correlation)
    }
}

fn parse_investor(spec: &str, width: usize) -> Result<InvestorPolicy> {
    if spec == "hold-index" {
        return Ok(InvestorPolicy::HoldIndex);
    }
    if let Some(rest) = spec.strip_prefix("fixed:") {
        let weights = parse_f64_list(rest, "investor weight")?;
        if weights.len() != width {
            return Err(usage(format!("--investor fixed: needs {width} weights")));
        }
        return Ok(InvestorPolicy::FixedWeights(Weights::new(weights)?));
    }
    if let Some(rest) = spec.strip_prefix("buy-and-hold:") {
        let weights = parse_f64_list(rest, "investor weight")?;
        if weights.len() != width {
            return Err(usage(format!("--investor buy-and-hold: needs {width} weights")));
        }
        return Ok(InvestorPolicy::BuyAndHold(Weights::new(weights)?));
    }
    Err(usage(format!(
        "unknown investor spec {spec:?}; expected hold-index, fixed:..., or buy-and-hold:..."
    )))
}

/// Resolved market setup: game shape, the model for a given trial seed, and
/// a human description.
struct MarketSetup {
    config: GameConfig,
    gbm: Option<GbmParams>,
    fixed: Option<MarketModel>,
    description: String,
}

impl MarketSetup {
    fn model(&self, seed: u64) -> MarketModel {
        match (&self.gbm, &self.fixed) {
            (Some(params), _) => MarketModel::Gbm {
                params: params.clone(),
                seed,
            },
            (None, Some(model)) => model.clone(),
            (None, None) => unreachable!("market setup holds gbm or fixed"),
        }
    }

    fn is_stochastic(&self) -> bool {
        self.gbm.is_some()
    }
}

fn resolve_market(args: &MarketArgs) -> Result<MarketSetup> {
    match args.market.as_str() {
        "gbm" => {
            let config = GameConfig::new(args.num_securities, args.num_rounds, args.dt)?;
            let width = config.total_securities();
            let mu = broadcast(parse_f64_list(&args.mu, "mu")?, width, "mu")?;
            let sigma = broadcast(parse_f64_list(&args.sigma, "sigma")?, width, "sigma")?;
            let correlation = parse_correlation(&args.corr, width)?;
            let params = GbmParams {
                mu,
                sigma,
                correlation,
            };
            let description = MarketModel::Gbm {
                params: params.clone(),
                seed: args.seed,
            }
            .describe();
            Ok(MarketSetup {
                config,
                gbm: Some(params),
                fixed: None,
                description,
            })
        }
        "csv" => {
            let path = args
                .csv
                .as_ref()
                .ok_or_else(|| usage(format!("--market csv requires --csv <path>")))?;
            let series = ReturnSeries::load_csv(path, args.dt)?;
            let config = series.game_config()?;
            let description = format!("csv replay of {} ({} rounds)", path.display(), series.num_rounds());
            Ok(MarketSetup {
                config,
                gbm: None,
                fixed: Some(series.as_market()),
                description,
            })
        }
        "alternating" => {
            let config = GameConfig::new(args.num_securities, args.num_rounds, args.dt)?;
            let model = MarketModel::Alternating {
                magnitude: args.magnitude,
            };
            let description = model.describe();
            Ok(MarketSetup {
                config,
                gbm: None,
                fixed: Some(model),
                description,
            })
        }
        other => Err(usage(format!(
            "unknown market {other:?}; expected gbm, csv, or alternating"
        ))),
    }
}

fn write_or_print(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn witness_epsilons(epsilon: f64) -> Vec<f64> {
    let mut epsilons = vec![0.01, 0.1, 0.3];
    if !epsilons.contains(&epsilon) {
        epsilons.push(epsilon);
        epsilons.sort_by(f64::total_cmp);
    }
    epsilons
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let started = Instant::now();
    let setup = resolve_market(&args.market)?;
    let investor = parse_investor(&args.market.investor, setup.config.total_securities())?;
    let split = SpeculatorPolicy::split(vec![
        (0.5, SpeculatorPolicy::Blend { epsilon: args.epsilon }),
        (0.5, SpeculatorPolicy::ShortBlend { epsilon: args.epsilon }),
    ])?;
    let spec = PlaySpec::new(setup.config, investor, setup.model(args.market.seed))
        .with_epsilons(witness_epsilons(args.epsilon))
        .with_split(split);
    let outcome = run_play(&spec, args.dump_path.is_some())?;

    if let Some(dump) = &args.dump_path {
        let labels: Vec<String> = std::iter::once("index".to_string())
            .chain((1..setup.config.total_securities()).map(|k| format!("sec{k}")))
            .collect();
        let rows = outcome.returns.clone().expect("path kept for dumping");
        ReturnSeries::new(labels, rows, setup.config.dt(), "simulate".into())?.save_csv(dump)?;
    }

    let mut report = RunReport::build(
        "simulate",
        &outcome,
        args.market.investor.clone(),
        setup.description.clone(),
        setup.is_stochastic().then_some(args.market.seed),
        args.epsilon,
        args.alpha,
    )?;
    report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);

    println!("{}", report.render_text());
    if let Some(out) = &args.out {
        write_or_print(Some(out), &report.to_json())?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn cmd_analyze(args: AnalyzeArgs) -> Result<i32> {
    let started = Instant::now();
    let series = ReturnSeries::load_csv(&args.csv, args.dt)?;

    // An index-only file still supports s = m analysis: replay the index
    // as the sole non-index security and hold the index.
    let (series, default_investor) = if series.num_securities() == 0 {
        let mut labels = series.labels.clone();
        labels.push(format!("{}(dup)", labels[0]));
        let rows = series
            .rows
            .iter()
            .map(|row| {
                let m = row.index_return();
                capm_game::ReturnVector::new(vec![m, m]).expect("copied returns stay valid")
            })
            .collect();
        (
            ReturnSeries::new(labels, rows, args.dt, series.source.clone())?,
            "hold-index".to_string(),
        )
    } else {
        (series, "col:1".to_string())
    };

    let width = series.labels.len();
    let spec_text = args.investor.clone().unwrap_or(default_investor);
    let investor = if let Some(rest) = spec_text.strip_prefix("col:") {
        let column: usize = rest
            .parse()
            .with_context(|| format!("cannot parse column index {rest:?}"))?;
        if column == 0 || column >= width {
            return Err(usage(format!(
                "col:{column} out of range; file has return columns 1..{}",
                width - 1
            )));
        }
        let mut weights = vec![0.0; width];
        weights[column] = 1.0;
        InvestorPolicy::FixedWeights(Weights::new(weights)?)
    } else {
        parse_investor(&spec_text, width)?
    };

    let config = series.game_config()?;
    let spec = PlaySpec::new(config, investor, series.as_market())
        .with_epsilons(witness_epsilons(args.epsilon));
    let outcome = run_play(&spec, false)?;

    let mut report = RunReport::build(
        "analyze",
        &outcome,
        spec_text,
        format!("csv replay of {} ({} rounds)", args.csv.display(), series.num_rounds()),
        None,
        args.epsilon,
        args.alpha,
    )?;
    report.timing_ms = Some(started.elapsed().as_secs_f64() * 1e3);

    println!("{}", report.render_text());
    if let Some(out) = &args.out {
        write_or_print(Some(out), &report.to_json())?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct VerifyReport {
    command: String,
    trials: usize,
    config: GameConfig,
    investor: String,
    market: String,
    seed: u64,
    epsilons: Vec<f64>,
    alphas: Vec<f64>,
    corrupt_bound: bool,
    checks: usize,
    violations: usize,
    guard_violations: u64,
    min_upper_margin: f64,
    min_lower_margin: f64,
    min_sandwich_lower_gap: f64,
    min_sandwich_upper_gap: f64,
    verified: bool,
    timing_ms: Option<f64>,
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let started = Instant::now();
    let setup = resolve_market(&args.market)?;
    let investor = parse_investor(&args.market.investor, setup.config.total_securities())?;
    let epsilons = parse_f64_list(&args.epsilons, "epsilon")?;
    let alphas = parse_f64_list(&args.alphas, "alpha")?;
    if epsilons.is_empty() || alphas.is_empty() {
        return Err(usage(format!("--epsilons and --alphas must be nonempty")));
    }
    let corrupt_factor = if args.corrupt_bound { 0.0 } else { 1.0 };

    let seeds = trial_seeds(args.market.seed, args.trials);
    let outcomes: Vec<PlayOutcome> = run_many(&seeds, |seed| {
        let spec = PlaySpec::new(setup.config, investor.clone(), setup.model(seed))
            .with_epsilons(epsilons.clone());
        run_play(&spec, false)
    })?;

    let mut checks = 0usize;
    let mut violations = 0usize;
    let mut guard_violations = 0u64;
    let mut min_upper_margin = f64::INFINITY;
    let mut min_lower_margin = f64::INFINITY;
    let mut min_sandwich_lower = f64::INFINITY;
    let mut min_sandwich_upper = f64::INFINITY;

    for outcome in &outcomes {
        let sum = &outcome.summary;
        let gaps = prop2_sandwich(sum);
        min_sandwich_lower = min_sandwich_lower.min(gaps.lower_gap);
        min_sandwich_upper = min_sandwich_upper.min(gaps.upper_gap);
        if gaps.lower_gap < -1e-12 || gaps.upper_gap < -1e-12 {
            violations += 1;
        }
        for pair in &outcome.witnesses {
            guard_violations += pair.short_guard_violations;
            for &alpha in &alphas {
                let upper = verify_witness_upper(
                    sum,
                    pair.blend_capital,
                    outcome.index_capital,
                    pair.epsilon,
                    alpha,
                )?;
                let lower = verify_witness_lower(
                    sum,
                    pair.short_capital,
                    outcome.index_capital,
                    pair.epsilon,
                    alpha,
                )?;
                checks += 2;
                // The corruption hook rescales the bound before the
                // comparison; with factor zero the residual must clear a
                // bound of zero, which a correct engine cannot promise.
                let upper_ok = upper.via_wealth
                    || upper.residual
                        < corrupt_factor * upper.bound
                            + IMPLICATION_SLACK * upper.residual.abs().max(upper.bound.abs()).max(1.0);
                let lower_ok = lower.via_wealth
                    || lower.residual
                        > corrupt_factor * lower.bound
                            - IMPLICATION_SLACK * lower.residual.abs().max(lower.bound.abs()).max(1.0);
                if !upper_ok {
                    violations += 1;
                }
                if !lower_ok {
                    violations += 1;
                }
                min_upper_margin = min_upper_margin.min(upper.margin);
                min_lower_margin = min_lower_margin.min(lower.margin);
            }
        }
    }

    let verified = violations == 0;
    let report = VerifyReport {
        command: "verify".into(),
        trials: args.trials,
        config: setup.config,
        investor: args.market.investor.clone(),
        market: setup.description,
        seed: args.market.seed,
        epsilons,
        alphas,
        corrupt_bound: args.corrupt_bound,
        checks,
        violations,
        guard_violations,
        min_upper_margin,
        min_lower_margin,
        min_sandwich_lower_gap: min_sandwich_lower,
        min_sandwich_upper_gap: min_sandwich_upper,
        verified,
        timing_ms: Some(started.elapsed().as_secs_f64() * 1e3),
    };

    println!(
        "verify: {} trials, {} checks, {} violations, {} guard trips",
        report.trials, report.checks, report.violations, report.guard_violations
    );
    println!(
        "margins: upper {:.6e}, lower {:.6e}; sandwich gaps: lower {:.6e}, upper {:.6e}",
        report.min_upper_margin,
        report.min_lower_margin,
        report.min_sandwich_lower_gap,
        report.min_sandwich_upper_gap
    );
    println!("verdict: {}", if verified { "PASS" } else { "FAIL" });

    if let Some(out) = &args.out {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        write_or_print(Some(out), &text)?;
    }
    Ok(if verified { 0 } else { 3 })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let setup = resolve_market(&args.market)?;
    if setup.gbm.is_none() {
        return Err(usage(format!("sweep requires a stochastic market (--market gbm)")));
    }
    let dt_list = parse_f64_list(&args.dt_list, "dt")?;
    if dt_list.is_empty() {
        return Err(usage(format!("--dt-list must be nonempty")));
    }
    if args.sweeps == 0 {
        return Err(usage(format!("--sweeps must be at least 1")));
    }

    // One job per (sweep, dt) pair; matched seeds across dt within a sweep.
    let mut jobs = Vec::new();
    for sweep in 0..args.sweeps {
        for &dt in &dt_list {
            jobs.push((sweep, dt, args.market.seed.wrapping_add(sweep as u64)));
        }
    }

    let width = setup.config.total_securities();
    let investor = parse_investor(&args.market.investor, width)?;
    let params = setup.gbm.clone().expect("checked above");
    let alpha = args.alpha;
    let horizon = args.horizon;

    let job_indices: Vec<u64> = (0..jobs.len() as u64).collect();
    let rows: Vec<String> = run_many(&job_indices, |i| {
        let (sweep, dt, seed) = jobs[i as usize];
        let rounds = (horizon / dt).round() as usize;
        let config = GameConfig::new(width - 1, rounds.max(1), dt)?;
        let market = MarketModel::Gbm {
            params: params.clone(),
            seed,
        };
        let spec = PlaySpec::new(config, investor.clone(), market);
        let outcome = run_play(&spec, false)?;
        let sum = outcome.summary;
        let best = optimize_upper_bound(&sum, alpha)?;
        Ok(format!(
            "{sweep},{dt},{rounds},{},{},{},{}",
            sum.capm_residual().abs(),
            best.bound,
            best.epsilon,
            sum.max_abs_m
        ))
    })?;

    let mut table = String::from(
        "sweep,dt,rounds,abs_capm_residual,optimized_upper_bound,optimal_epsilon,max_abs_m\n",
    );
    for row in rows {
        table.push_str(&row);
        table.push('\n');
    }
    write_or_print(args.out.as_deref(), &table)?;
    Ok(0)
}
