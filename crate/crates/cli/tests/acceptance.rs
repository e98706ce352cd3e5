//! Acceptance suite: every release criterion with its tolerance pinned in
//! code, one pass/fail line per criterion.
//!
//! Run with `cargo test -p capm-game-cli --test acceptance -- --nocapture`
//! to see the lines. Criteria with wall-clock limits are serialized through
//! a gate so that harness-level test parallelism cannot distort timings.

use std::path::PathBuf;
use std::process::Command;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use capm_game::bounds::{
    big_gamma, gamma, log_remainder, prop1_lower_envelope, prop1_upper_envelope, prop2_sandwich,
    verify_witness_lower, verify_witness_upper,
};
use capm_game::moments::MomentAccumulator;
use capm_game::protocol::{GameConfig, Weights};
use capm_game::sim::{run_many, run_play, trial_seeds, PlayOutcome, PlaySpec};
use capm_game::strategies::{GbmParams, InvestorPolicy, MarketModel};

const BIN: &str = env!("CARGO_BIN_EXE_capm-game");

static GATE: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn pass(name: &str, detail: String) {
    println!("ACCEPTANCE {name}: PASS ({detail})");
}

fn tmp_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

// ---------------------------------------------------------------------------
// Criterion 1: cross-moment identity on random paths
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_cross_moment_identity() {
    let _guard = serial();
    let started = Instant::now();
    let seeds = trial_seeds(0xC1_000, 10_000);
    let residuals = run_many(&seeds, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rounds = rng.gen_range(1..=10_000usize);
        let mut acc = MomentAccumulator::new(1e-3)?;
        for _ in 0..rounds {
            acc.update(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05))?;
        }
        let sum = acc.summarize()?;
        let lhs = sum.sigma_diff_sq / 2.0;
        let rhs = sum.sigma_s_sq / 2.0 + sum.sigma_m_sq / 2.0 - sum.sigma_sm;
        Ok((lhs - rhs).abs() / sum.sigma_diff_sq.max(1e-300))
    })
    .unwrap();
    let worst = residuals.iter().cloned().fold(0.0f64, f64::max);
    let elapsed = started.elapsed();

    assert!(worst < 1e-9, "worst relative identity residual {worst}");
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    pass(
        "1 cross-moment identity",
        format!("10000 paths, worst residual {worst:.3e}, {elapsed:.1?}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: Taylor sandwich over the whole domain
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_taylor_sandwich() {
    let _guard = serial();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2_000);
    let mut min_lower_slack = f64::INFINITY;
    let mut min_upper_slack = f64::INFINITY;
    for _ in 0..100_000 {
        let x = rng.gen_range(-0.99f64..10.0);
        let remainder = log_remainder(x);
        min_lower_slack = min_lower_slack.min(remainder - gamma(x).unwrap());
        min_upper_slack = min_upper_slack.min(big_gamma(x) - remainder);
    }
    let elapsed = started.elapsed();

    assert!(min_lower_slack >= -1e-14, "gamma side slack {min_lower_slack}");
    assert!(min_upper_slack >= -1e-14, "Gamma side slack {min_upper_slack}");
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass(
        "2 Taylor sandwich",
        format!(
            "100000 samples, min slacks {min_lower_slack:.3e} / {min_upper_slack:.3e}, {elapsed:.1?}"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criteria 3-5 share one 1000-game sweep
// ---------------------------------------------------------------------------

const SWEEP_SEED: u64 = 0xC3_000;
const SWEEP_EPSILONS: [f64; 3] = [0.01, 0.1, 0.3];
const SWEEP_ALPHAS: [f64; 3] = [0.5, 0.1, 0.01];

fn sweep_market(seed: u64) -> MarketModel {
    MarketModel::Gbm {
        params: GbmParams::with_uniform_correlation(vec![0.05, 0.08], vec![0.2, 0.3], 0.5),
        seed,
    }
}

fn sweep_spec(seed: u64) -> PlaySpec {
    let config = GameConfig::new(1, 100_000, 1e-3).unwrap();
    let investor = InvestorPolicy::FixedWeights(Weights::new(vec![0.5, 0.5]).unwrap());
    PlaySpec::new(config, investor, sweep_market(seed)).with_epsilons(SWEEP_EPSILONS.to_vec())
}

struct Sweep {
    outcomes: Vec<PlayOutcome>,
    elapsed: Duration,
}

fn sweep() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let started = Instant::now();
        let outcomes = run_many(&trial_seeds(SWEEP_SEED, 1000), |seed| {
            run_play(&sweep_spec(seed), false)
        })
        .unwrap();
        Sweep {
            outcomes,
            elapsed: started.elapsed(),
        }
    })
}

#[test]
fn criterion_03_witness_implication_upper() {
    let _guard = serial();
    let sweep = sweep();
    let mut cases = 0usize;
    let mut min_margin = f64::INFINITY;
    for outcome in &sweep.outcomes {
        for pair in &outcome.witnesses {
            for alpha in SWEEP_ALPHAS {
                let check = verify_witness_upper(
                    &outcome.summary,
                    pair.blend_capital,
                    outcome.index_capital,
                    pair.epsilon,
                    alpha,
                )
                .unwrap();
                assert!(
                    check.satisfied,
                    "upper witness failed: eps={} alpha={alpha} residual={} bound={} ratio={}",
                    pair.epsilon, check.residual, check.bound, check.wealth_ratio
                );
                min_margin = min_margin.min(check.margin);
                cases += 1;
            }
        }
    }
    assert_eq!(cases, 9000);
    assert!(
        sweep.elapsed < Duration::from_secs(300),
        "sweep took {:?}",
        sweep.elapsed
    );
    pass(
        "3 witness implication upper",
        format!(
            "9000 cases true, min margin {min_margin:.3e}, sweep {:.1?}",
            sweep.elapsed
        ),
    );
}

#[test]
fn criterion_04_witness_implication_lower() {
    let _guard = serial();
    let sweep = sweep();
    let mut cases = 0usize;
    let mut guard_trips = 0u64;
    let mut min_margin = f64::INFINITY;
    for outcome in &sweep.outcomes {
        for pair in &outcome.witnesses {
            guard_trips += pair.short_guard_violations;
            for alpha in SWEEP_ALPHAS {
                let check = verify_witness_lower(
                    &outcome.summary,
                    pair.short_capital,
                    outcome.index_capital,
                    pair.epsilon,
                    alpha,
                )
                .unwrap();
                assert!(
                    check.satisfied,
                    "lower witness failed: eps={} alpha={alpha} residual={} bound={}",
                    pair.epsilon, check.residual, check.bound
                );
                min_margin = min_margin.min(check.margin);
                cases += 1;
            }
        }
    }
    assert_eq!(cases, 9000);
    assert_eq!(guard_trips, 0, "short-blend bankruptcy guard tripped");
    assert!(
        sweep.elapsed < Duration::from_secs(300),
        "sweep took {:?}",
        sweep.elapsed
    );
    pass(
        "4 witness implication lower",
        format!(
            "9000 cases true, 0 guard trips, min margin {min_margin:.3e}",
        ),
    );
}

#[test]
fn criterion_05_growth_residual_sandwich() {
    let _guard = serial();
    let sweep = sweep();
    let mut min_lower = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    for outcome in &sweep.outcomes {
        let gaps = prop2_sandwich(&outcome.summary);
        min_lower = min_lower.min(gaps.lower_gap);
        min_upper = min_upper.min(gaps.upper_gap);
    }
    assert!(min_lower >= -1e-12, "lower sandwich gap {min_lower}");
    assert!(min_upper >= -1e-12, "upper sandwich gap {min_upper}");
    pass(
        "5 growth residual sandwich",
        format!("1000 paths, min gaps {min_lower:.3e} / {min_upper:.3e}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: moment recovery from the stochastic market
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_gbm_moment_recovery() {
    let _guard = serial();
    let started = Instant::now();
    let config = GameConfig::new(1, 100_000, 1e-3).unwrap();
    let summaries = run_many(&trial_seeds(0xC6_000, 20), |seed| {
        let market = MarketModel::Gbm {
            params: GbmParams::with_uniform_correlation(vec![0.05, 0.05], vec![0.2, 0.2], 0.0),
            seed,
        };
        let investor = InvestorPolicy::FixedWeights(Weights::new(vec![0.0, 1.0]).unwrap());
        Ok(run_play(&PlaySpec::new(config, investor, market), false)?.summary)
    })
    .unwrap();

    let passes = summaries
        .iter()
        .filter(|sum| (sum.mu_s - 0.05).abs() < 0.07 && (sum.sigma_s_sq - 0.04).abs() < 0.002)
        .count();
    let elapsed = started.elapsed();

    assert!(passes >= 19, "only {passes}/20 seeds inside the bands");
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    pass(
        "6 moment recovery",
        format!("{passes}/20 seeds inside both bands, {elapsed:.1?}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: growth residual bounded by the realized envelopes
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_deficit_formula_at_desk_scale() {
    let _guard = serial();
    let config = GameConfig::new(1, 100_000, 1e-3).unwrap();
    let grid = capm_game::bounds::epsilon_grid();
    let outcomes = run_many(&trial_seeds(0xC7_000, 100), |seed| {
        let investor = InvestorPolicy::FixedWeights(Weights::new(vec![0.5, 0.5]).unwrap());
        let spec = PlaySpec::new(config, investor, sweep_market(seed))
            .with_epsilons(grid.clone());
        run_play(&spec, false)
    })
    .unwrap();

    let mut worst_upper_margin = f64::INFINITY;
    let mut worst_lower_margin = f64::INFINITY;
    let mut worst_composite = f64::INFINITY;
    for outcome in &outcomes {
        let sum = &outcome.summary;
        let deficit = sum.deficit_residual();

        // Tightest path-evaluated bounds over the epsilon grid, with the
        // witness ledgers' realized wealth in the level slot; these hold on
        // every play with no stochastic tolerance.
        let mut upper_star = f64::INFINITY;
        let mut lower_star = f64::NEG_INFINITY;
        for pair in &outcome.witnesses {
            assert_eq!(pair.short_guard_violations, 0, "guard tripped at desk scale");
            let log_blend = (pair.blend_capital / outcome.index_capital).ln();
            upper_star =
                upper_star.min(prop1_upper_envelope(sum, pair.epsilon, log_blend).unwrap());
            let log_short = (pair.short_capital / outcome.index_capital).ln();
            lower_star =
                lower_star.max(prop1_lower_envelope(sum, pair.epsilon, log_short).unwrap());
        }

        let upper_margin = sum.p2_upper_slack() + upper_star - deficit;
        let lower_margin = sum.p2_lower_slack() - lower_star + deficit;
        assert!(
            upper_margin >= -1e-9,
            "upper chain violated: deficit {deficit}, slack {}, bound {upper_star}",
            sum.p2_upper_slack()
        );
        assert!(
            lower_margin >= -1e-9,
            "lower chain violated: deficit {deficit}, slack {}, bound {lower_star}",
            sum.p2_lower_slack()
        );
        let slack = sum.p2_upper_slack().max(sum.p2_lower_slack());
        let bound = upper_star.max(-lower_star);
        let composite = slack + bound - deficit.abs();
        assert!(
            composite >= -1e-9,
            "|deficit| {} exceeded slack {slack} + optimized bound {bound}",
            deficit.abs()
        );
        worst_upper_margin = worst_upper_margin.min(upper_margin);
        worst_lower_margin = worst_lower_margin.min(lower_margin);
        worst_composite = worst_composite.min(composite);
    }
    pass(
        "7 deficit formula",
        format!(
            "100 runs, min margins upper {worst_upper_margin:.3e} lower {worst_lower_margin:.3e} composite {worst_composite:.3e}"
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: convergence sweep over round durations
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_convergence_sweep() {
    let _guard = serial();
    let output = Command::new(BIN)
        .args([
            "sweep",
            "--mu",
            "0.05,0.08",
            "--sigma",
            "0.2,0.3",
            "--corr",
            "0.5",
            "--K",
            "1",
            "--investor",
            "fixed:0.5,0.5",
            "--dt-list",
            "1e-2,1e-3,1e-4",
            "--horizon",
            "50",
            "--sweeps",
            "10",
            "--alpha",
            "0.1",
            "--seed",
            "51200",
        ])
        .output()
        .expect("sweep runs");
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));

    let stdout = String::from_utf8(output.stdout).unwrap();
    let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
    for line in stdout.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        rows.push((
            cells[0].parse().unwrap(),
            cells[1].parse().unwrap(),
            cells[4].parse().unwrap(),
            cells[6].parse().unwrap(),
        ));
    }
    assert_eq!(rows.len(), 30, "10 sweeps x 3 durations");

    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for sweep in 0..10 {
        let mut per_sweep: Vec<(f64, f64, f64)> = rows
            .iter()
            .filter(|(s, _, _, _)| *s == sweep)
            .map(|(_, dt, bound, max_m)| (*dt, *bound, *max_m))
            .collect();
        per_sweep.sort_by(|a, b| b.0.total_cmp(&a.0));
        assert_eq!(per_sweep.len(), 3);
        // Optimized bound must decrease as dt shrinks, in every sweep.
        assert!(
            per_sweep[0].1 > per_sweep[1].1 && per_sweep[1].1 > per_sweep[2].1,
            "bound not monotone in sweep {sweep}: {per_sweep:?}"
        );
        // max|m| shrinks by roughly sqrt(10) per decade.
        for window in per_sweep.windows(2) {
            let ratio = window[0].2 / window[1].2;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            assert!(
                (2.0..=5.0).contains(&ratio),
                "max|m| decade ratio {ratio} outside [2, 5] in sweep {sweep}"
            );
        }
    }
    pass(
        "8 convergence sweep",
        format!("10 sweeps monotone, max|m| decade ratios in [{min_ratio:.2}, {max_ratio:.2}]"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: negative control through the CLI
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_corrupt_bound_negative_control() {
    let _guard = serial();
    let status = Command::new(BIN)
        .args([
            "verify",
            "--trials",
            "1000",
            "--K",
            "1",
            "--N",
            "100000",
            "--dt",
            "0.001",
            "--mu",
            "0.05,0.08",
            "--sigma",
            "0.2,0.3",
            "--corr",
            "0.5",
            "--investor",
            "fixed:0.5,0.5",
            "--seed",
            "49920",
            "--corrupt-bound",
        ])
        .stdout(std::process::Stdio::null())
        .status()
        .expect("verify runs");
    assert_eq!(status.code(), Some(3), "corrupted bound must exit 3");
    pass("9 negative control", "corrupted bound exits 3".into());
}

// ---------------------------------------------------------------------------
// Criterion 10: determinism and round trip
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_determinism_and_round_trip() {
    let _guard = serial();
    let csv_a = tmp_path("determinism_a.csv");
    let csv_b = tmp_path("determinism_b.csv");
    let json_a = tmp_path("determinism_a.json");
    let json_b = tmp_path("determinism_b.json");
    let json_c = tmp_path("determinism_c.json");

    let simulate = |csv: &PathBuf, json: &PathBuf| {
        let status = Command::new(BIN)
            .args([
                "simulate",
                "--K",
                "1",
                "--N",
                "20000",
                "--dt",
                "0.001",
                "--mu",
                "0.05,0.08",
                "--sigma",
                "0.2,0.3",
                "--corr",
                "0.5",
                "--investor",
                "fixed:0.5,0.5",
                "--seed",
                "424242",
            ])
            .arg("--dump-path")
            .arg(csv)
            .arg("--out")
            .arg(json)
            .stdout(std::process::Stdio::null())
            .status()
            .expect("simulate runs");
        assert!(status.success());
    };
    simulate(&csv_a, &json_a);
    simulate(&csv_b, &json_b);

    // Byte-identical path dumps.
    let bytes_a = std::fs::read(&csv_a).unwrap();
    let bytes_b = std::fs::read(&csv_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "path dumps differ between identical runs");

    // Byte-identical JSON reports once timing metadata is removed.
    let strip = |path: &PathBuf| {
        let mut value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        value["timing_ms"] = serde_json::Value::Null;
        serde_json::to_string_pretty(&value).unwrap()
    };
    assert_eq!(strip(&json_a), strip(&json_b), "reports differ modulo timing");

    // Analyzing the dump reproduces every moment to 1e-12 relative.
    let status = Command::new(BIN)
        .args(["analyze", "--dt", "0.001", "--investor", "fixed:0.5,0.5"])
        .arg("--csv")
        .arg(&csv_a)
        .arg("--out")
        .arg(&json_c)
        .stdout(std::process::Stdio::null())
        .status()
        .expect("analyze runs");
    assert!(status.success());

    let report_a: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_a).unwrap()).unwrap();
    let report_c: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_c).unwrap()).unwrap();
    let mut worst = 0.0f64;
    for key in [
        "mu_s",
        "mu_m",
        "sigma_s_sq",
        "sigma_m_sq",
        "sigma_sm",
        "sigma_diff_sq",
        "sigma_2ms_sq",
        "lambda_s",
        "lambda_m",
        "max_abs_s",
        "max_abs_m",
    ] {
        let a = report_a["summary"][key].as_f64().unwrap();
        let c = report_c["summary"][key].as_f64().unwrap();
        let rel = (a - c).abs() / a.abs().max(c.abs()).max(1e-300);
        assert!(rel < 1e-12, "{key} differs: simulate {a} vs analyze {c}");
        worst = worst.max(rel);
    }
    pass(
        "10 determinism and round trip",
        format!("dumps byte-identical, moments reproduce to {worst:.3e}"),
    );
}
