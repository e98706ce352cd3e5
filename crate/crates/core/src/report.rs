//! Machine-readable (JSON) and human-readable reports over one play.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    optimize_lower_bound, optimize_upper_bound, prop1_lower_envelope, prop1_upper_envelope,
    prop2_sandwich, verify_witness_lower, verify_witness_upper, OptimizedBound, SandwichGaps,
};
use crate::error::Result;
use crate::moments::MomentSummary;
use crate::protocol::{GameConfig, RestrictionFindings};
use crate::sim::PlayOutcome;

/// Residuals, proof-chain bounds, and the witness verdicts for one play at
/// one `(epsilon, alpha)` pair. The verdicts are theorems: a `false` value
/// signals an implementation defect, not a property of the path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    pub epsilon: f64,
    pub alpha: f64,
    pub capm_residual: f64,
    pub deficit_residual: f64,
    pub upper_bound_p1: f64,
    pub lower_bound_p1: f64,
    pub p2_upper_slack: f64,
    pub p2_lower_slack: f64,
    pub speculator_terminal_ratio_blend: f64,
    pub speculator_terminal_ratio_short: f64,
    pub witness_verdict_upper: bool,
    pub witness_verdict_lower: bool,
    pub short_guard_violations: u64,
}

impl PredictionReport {
    pub fn build(outcome: &PlayOutcome, epsilon: f64, alpha: f64) -> Result<Self> {
        let sum = &outcome.summary;
        let pair = outcome.witness(epsilon)?;
        let upper = verify_witness_upper(
            sum,
            pair.blend_capital,
            outcome.index_capital,
            epsilon,
            alpha,
        )?;
        let lower = verify_witness_lower(
            sum,
            pair.short_capital,
            outcome.index_capital,
            epsilon,
            alpha,
        )?;
        Ok(Self {
            epsilon,
            alpha,
            capm_residual: sum.capm_residual(),
            deficit_residual: sum.deficit_residual(),
            upper_bound_p1: upper.bound,
            lower_bound_p1: lower.bound,
            p2_upper_slack: sum.p2_upper_slack(),
            p2_lower_slack: sum.p2_lower_slack(),
            speculator_terminal_ratio_blend: upper.wealth_ratio,
            speculator_terminal_ratio_short: lower.wealth_ratio,
            witness_verdict_upper: upper.satisfied,
            witness_verdict_lower: lower.satisfied,
            short_guard_violations: pair.short_guard_violations,
        })
    }
}

/// Terminal ledgers of one play; speculator accounts are keyed by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalCapitals {
    pub investor: f64,
    pub index: f64,
    pub speculators: BTreeMap<String, f64>,
}

/// Full report for one play: configuration echo, every per-unit-time
/// statistic, residuals, bounds at the grid-optimized epsilon, the realized
/// (level-free) envelopes from the tracked witnesses, sandwich gaps,
/// verdicts, and restriction diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: GameConfig,
    pub seed: Option<u64>,
    pub investor: String,
    pub market: String,
    pub summary: MomentSummary,
    pub capm_residual: f64,
    pub deficit_residual: f64,
    pub alpha: f64,
    /// Tightest level-alpha upper bound over the epsilon grid.
    pub optimized_upper: OptimizedBound,
    /// Tightest level-alpha lower bound over the epsilon grid.
    pub optimized_lower: OptimizedBound,
    /// Tightest realized upper envelope over the tracked witnesses: the
    /// level term replaced by the blend ledger's realized log wealth ratio.
    pub realized_upper: Option<OptimizedBound>,
    /// Mirror envelope from the short-blend ledgers.
    pub realized_lower: Option<OptimizedBound>,
    pub sandwich: SandwichGaps,
    pub prediction: PredictionReport,
    pub restriction: RestrictionFindings,
    pub terminal: TerminalCapitals,
    pub clamp_count: u64,
    /// Wall-clock duration; excluded from determinism comparisons.
    pub timing_ms: Option<f64>,
}

impl RunReport {
    pub fn build(
        command: &str,
        outcome: &PlayOutcome,
        investor: String,
        market: String,
        seed: Option<u64>,
        epsilon: f64,
        alpha: f64,
    ) -> Result<Self> {
        let sum = &outcome.summary;
        let prediction = PredictionReport::build(outcome, epsilon, alpha)?;

        let mut realized_upper: Option<OptimizedBound> = None;
        let mut realized_lower: Option<OptimizedBound> = None;
        for pair in &outcome.witnesses {
            let log_blend = (pair.blend_capital / outcome.index_capital).ln();
            let upper = prop1_upper_envelope(sum, pair.epsilon, log_blend)?;
            if realized_upper.map_or(true, |b| upper < b.bound) {
                realized_upper = Some(OptimizedBound {
                    epsilon: pair.epsilon,
                    bound: upper,
                });
            }
            if pair.short_guard_violations == 0 && pair.short_capital > 0.0 {
                let log_short = (pair.short_capital / outcome.index_capital).ln();
                let lower = prop1_lower_envelope(sum, pair.epsilon, log_short)?;
                if realized_lower.map_or(true, |b| lower > b.bound) {
                    realized_lower = Some(OptimizedBound {
                        epsilon: pair.epsilon,
                        bound: lower,
                    });
                }
            }
        }

        let mut speculators = BTreeMap::new();
        for pair in &outcome.witnesses {
            speculators.insert(format!("blend(eps={})", pair.epsilon), pair.blend_capital);
            speculators.insert(
                format!("short-blend(eps={})", pair.epsilon),
                pair.short_capital,
            );
        }
        if let Some(capital) = outcome.split_capital {
            speculators.insert("split".into(), capital);
        }

        Ok(Self {
            command: command.to_string(),
            config: outcome.config,
            seed,
            investor,
            market,
            summary: *sum,
            capm_residual: sum.capm_residual(),
            deficit_residual: sum.deficit_residual(),
            alpha,
            optimized_upper: optimize_upper_bound(sum, alpha)?,
            optimized_lower: optimize_lower_bound(sum, alpha)?,
            realized_upper,
            realized_lower,
            sandwich: prop2_sandwich(sum),
            prediction,
            restriction: outcome.restriction,
            terminal: TerminalCapitals {
                investor: outcome.investor_capital,
                index: outcome.index_capital,
                speculators,
            },
            clamp_count: outcome.clamp_count,
            timing_ms: None,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Aligned-column text rendering for terminals.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut line = |label: &str, value: String| {
            let _ = writeln!(out, "{label:<26} {value}");
        };
        line("command", self.command.clone());
        line(
            "game",
            format!(
                "K={} N={} dt={} T={}",
                self.config.num_securities(),
                self.config.num_rounds(),
                self.config.dt(),
                self.config.horizon()
            ),
        );
        line("investor", self.investor.clone());
        line("market", self.market.clone());
        if let Some(seed) = self.seed {
            line("seed", seed.to_string());
        }
        let s = &self.summary;
        line("mu_s / mu_m", format!("{:+.6e} / {:+.6e}", s.mu_s, s.mu_m));
        line(
            "sigma_s^2 / sigma_m^2",
            format!("{:.6e} / {:.6e}", s.sigma_s_sq, s.sigma_m_sq),
        );
        line("sigma_sm", format!("{:+.6e}", s.sigma_sm));
        line("sigma_(s-m)^2", format!("{:.6e}", s.sigma_diff_sq));
        line(
            "lambda_s / lambda_m",
            format!("{:+.6e} / {:+.6e}", s.lambda_s, s.lambda_m),
        );
        line("capm residual", format!("{:+.6e}", self.capm_residual));
        line("deficit residual", format!("{:+.6e}", self.deficit_residual));
        line(
            "p1 bound (upper)",
            format!(
                "{:+.6e} at eps={:.4e}, alpha={}",
                self.optimized_upper.bound, self.optimized_upper.epsilon, self.alpha
            ),
        );
        line(
            "p1 bound (lower)",
            format!(
                "{:+.6e} at eps={:.4e}, alpha={}",
                self.optimized_lower.bound, self.optimized_lower.epsilon, self.alpha
            ),
        );
        if let Some(upper) = &self.realized_upper {
            line(
                "realized envelope (up)",
                format!("{:+.6e} at eps={:.4e}", upper.bound, upper.epsilon),
            );
        }
        if let Some(lower) = &self.realized_lower {
            line(
                "realized envelope (lo)",
                format!("{:+.6e} at eps={:.4e}", lower.bound, lower.epsilon),
            );
        }
        line(
            "sandwich gaps",
            format!(
                "lower {:+.6e}, upper {:+.6e}",
                self.sandwich.lower_gap, self.sandwich.upper_gap
            ),
        );
        line(
            "witness verdicts",
            format!(
                "upper {} / lower {} (eps={}, alpha={})",
                self.prediction.witness_verdict_upper,
                self.prediction.witness_verdict_lower,
                self.prediction.epsilon,
                self.prediction.alpha
            ),
        );
        line(
            "restriction",
            format!(
                "max|s|={:.4e}{} max|m|={:.4e}{} clamps={} lnT<=dt^-1/2: {}",
                self.restriction.max_abs_s,
                if self.restriction.max_abs_s_exceeded { "!" } else { "" },
                self.restriction.max_abs_m,
                if self.restriction.max_abs_m_exceeded { "!" } else { "" },
                self.clamp_count,
                self.restriction.largest_increment_negligible
            ),
        );
        line(
            "terminal capital",
            format!(
                "investor {:.6e}, index {:.6e}",
                self.terminal.investor, self.terminal.index
            ),
        );
        for (label, capital) in &self.terminal.speculators {
            line(&format!("  {label}"), format!("{capital:.6e}"));
        }
        if let Some(ms) = self.timing_ms {
            line("elapsed", format!("{ms:.1} ms"));
        }
        out
    }
}
