//! Third-order Taylor envelopes for `ln(1+x)` and the explicit error bounds
//! they induce on the pricing and growth residuals, together with the
//! witness checks that make those bounds falsifiable on concrete plays.
//!
//! The envelope is `gamma(x) <= ln(1+x) - x + x^2/2 <= Gamma(x)` with
//! `gamma(x) = (1/3)(x/(1+x))^3` and `Gamma(x) = (1/3)x^3`, both
//! monotonically increasing on `(-1, inf)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::MomentSummary;

/// Relative slack applied to every implication check to absorb accumulated
/// floating point error. A violation beyond this slack fails the check.
pub const IMPLICATION_SLACK: f64 = 1e-12;

/// Lower Taylor envelope `(1/3)(x/(1+x))^3`, defined for `x > -1`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > -1.0) {
        return Err(Error::GammaOutOfDomain(x));
    }
    Ok(gamma_raw(x))
}

#[inline]
pub(crate) fn gamma_raw(x: f64) -> f64 {
    let r = x / (1.0 + x);
    r * r * r / 3.0
}

/// Upper Taylor envelope `(1/3)x^3`, defined everywhere.
#[inline]
pub fn big_gamma(x: f64) -> f64 {
    x * x * x / 3.0
}

/// Third-order remainder of the log expansion: `ln(1+x) - x + x^2/2`.
/// Sandwiched between `gamma` and `big_gamma` for every `x > -1`.
pub fn log_remainder(x: f64) -> f64 {
    x.ln_1p() - x + 0.5 * x * x
}

fn check_epsilon(epsilon: f64, high: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < high) {
        return Err(Error::EpsilonOutOfRange {
            value: epsilon,
            low: 0.0,
            high,
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(())
}

/// Shared curvature terms of the upper-bound chain, without the level term.
fn upper_curvature(sum: &MomentSummary, epsilon: f64) -> f64 {
    0.5 * epsilon * sum.sigma_diff_sq
        + (sum.sigma_s_sq * sum.max_s_ratio
            + sum.sigma_m_sq * sum.max_m_ratio
            + sum.sigma_m_sq * sum.max_abs_m)
            / (3.0 * epsilon)
}

fn lower_curvature(sum: &MomentSummary, epsilon: f64) -> f64 {
    0.5 * epsilon * sum.sigma_diff_sq
        + (sum.sigma_m_sq * sum.max_m_ratio
            + sum.sigma_2ms_sq * sum.max_2ms_ratio
            + sum.sigma_m_sq * sum.max_abs_m)
            / (3.0 * epsilon)
}

/// Upper bound on the pricing residual at level `alpha`: on any path where
/// the blend witness fails to multiply capital by `1/alpha` relative to the
/// index,
///
/// `capm_residual < eps/2 * sigma_{s-m}^2 + (1/3eps)(sigma_s^2 max|s|/|1+s|^3
///  + sigma_m^2 max|m|/|1+m|^3 + sigma_m^2 max|m|) + ln(1/alpha)/(T eps)`.
pub fn prop1_upper_bound(sum: &MomentSummary, epsilon: f64, alpha: f64) -> Result<f64> {
    check_epsilon(epsilon, 1.0)?;
    check_alpha(alpha)?;
    Ok(upper_curvature(sum, epsilon) + (1.0 / alpha).ln() / (sum.horizon * epsilon))
}

/// Lower bound on the pricing residual at level `alpha`, the mirror chain
/// built from the short-blend witness.
pub fn prop1_lower_bound(sum: &MomentSummary, epsilon: f64, alpha: f64) -> Result<f64> {
    check_epsilon(epsilon, 1.0 / 3.0)?;
    check_alpha(alpha)?;
    Ok(-lower_curvature(sum, epsilon) - (1.0 / alpha).ln() / (sum.horizon * epsilon))
}

/// Unconditional path form of the upper bound: replaces `ln(1/alpha)` with
/// the realized log wealth ratio `ln(H_N / M_N)` of the blend witness. This
/// holds on every play with no level parameter and no disjunction.
pub fn prop1_upper_envelope(sum: &MomentSummary, epsilon: f64, log_wealth_ratio: f64) -> Result<f64> {
    check_epsilon(epsilon, 1.0)?;
    Ok(upper_curvature(sum, epsilon) + log_wealth_ratio / (sum.horizon * epsilon))
}

/// Unconditional path form of the lower bound with the short-blend witness's
/// realized log wealth ratio.
pub fn prop1_lower_envelope(sum: &MomentSummary, epsilon: f64, log_wealth_ratio: f64) -> Result<f64> {
    check_epsilon(epsilon, 1.0 / 3.0)?;
    Ok(-lower_curvature(sum, epsilon) - log_wealth_ratio / (sum.horizon * epsilon))
}

/// Number of points in the default epsilon search grid.
pub const EPSILON_GRID_LEN: usize = 25;
/// Range of the default epsilon search grid; the top stays below 1/3 so the
/// same grid serves both proof chains.
pub const EPSILON_GRID_MIN: f64 = 1e-3;
pub const EPSILON_GRID_MAX: f64 = 0.33;

/// Log-spaced grid of candidate blend fractions. The bounds treat epsilon as
/// a free parameter; minimizing over this grid is a presentation choice.
pub fn epsilon_grid() -> Vec<f64> {
    let lo = EPSILON_GRID_MIN.ln();
    let hi = EPSILON_GRID_MAX.ln();
    (0..EPSILON_GRID_LEN)
        .map(|i| (lo + (hi - lo) * i as f64 / (EPSILON_GRID_LEN - 1) as f64).exp())
        .collect()
}

/// A bound together with the epsilon that attained it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizedBound {
    pub epsilon: f64,
    pub bound: f64,
}

/// Tightest (smallest) upper bound over the epsilon grid.
pub fn optimize_upper_bound(sum: &MomentSummary, alpha: f64) -> Result<OptimizedBound> {
    let mut best: Option<OptimizedBound> = None;
    for epsilon in epsilon_grid() {
        let bound = prop1_upper_bound(sum, epsilon, alpha)?;
        if best.map_or(true, |b| bound < b.bound) {
            best = Some(OptimizedBound { epsilon, bound });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Tightest (largest) lower bound over the epsilon grid.
pub fn optimize_lower_bound(sum: &MomentSummary, alpha: f64) -> Result<OptimizedBound> {
    let mut best: Option<OptimizedBound> = None;
    for epsilon in epsilon_grid() {
        let bound = prop1_lower_bound(sum, epsilon, alpha)?;
        if best.map_or(true, |b| bound > b.bound) {
            best = Some(OptimizedBound { epsilon, bound });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Outcome of one witness implication check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub epsilon: f64,
    pub alpha: f64,
    /// The implication held. The implications are theorems; a false value
    /// signals a defect in the engine, not a property of the path.
    pub satisfied: bool,
    /// True when the wealth clause `H_N >= (1/alpha) M_N` carried the check.
    pub via_wealth: bool,
    pub residual: f64,
    pub bound: f64,
    /// Realized `H_N / M_N` of the witness ledger.
    pub wealth_ratio: f64,
    /// Distance to violation: max of the normalized wealth margin and the
    /// residual-to-bound margin. Negative beyond slack means a defect.
    pub margin: f64,
}

fn implication_slack(residual: f64, bound: f64) -> f64 {
    IMPLICATION_SLACK * residual.abs().max(bound.abs()).max(1.0)
}

/// Check the level-`alpha` prediction for the upper chain: either the blend
/// witness got rich or the pricing residual is below its bound.
pub fn verify_witness_upper(
    sum: &MomentSummary,
    blend_terminal: f64,
    index_terminal: f64,
    epsilon: f64,
    alpha: f64,
) -> Result<WitnessCheck> {
    let bound = prop1_upper_bound(sum, epsilon, alpha)?;
    let residual = sum.capm_residual();
    let wealth_ratio = blend_terminal / index_terminal;
    let slack = implication_slack(residual, bound);
    let via_wealth = alpha * wealth_ratio >= 1.0 - IMPLICATION_SLACK;
    let satisfied = via_wealth || residual < bound + slack;
    Ok(WitnessCheck {
        epsilon,
        alpha,
        satisfied,
        via_wealth,
        residual,
        bound,
        wealth_ratio,
        margin: (alpha * wealth_ratio - 1.0).max(bound - residual),
    })
}

/// Check the level-`alpha` prediction for the lower chain with the
/// short-blend witness.
pub fn verify_witness_lower(
    sum: &MomentSummary,
    short_terminal: f64,
    index_terminal: f64,
    epsilon: f64,
    alpha: f64,
) -> Result<WitnessCheck> {
    let bound = prop1_lower_bound(sum, epsilon, alpha)?;
    let residual = sum.capm_residual();
    let wealth_ratio = short_terminal / index_terminal;
    let slack = implication_slack(residual, bound);
    let via_wealth = alpha * wealth_ratio >= 1.0 - IMPLICATION_SLACK;
    let satisfied = via_wealth || residual > bound - slack;
    Ok(WitnessCheck {
        epsilon,
        alpha,
        satisfied,
        via_wealth,
        residual,
        bound,
        wealth_ratio,
        margin: (alpha * wealth_ratio - 1.0).max(residual - bound),
    })
}

/// The two gaps of the growth-residual sandwich
///
/// `capm - p2_lower_slack <= deficit <= capm + p2_upper_slack`,
///
/// reported as distances from the residual to each side. Both are
/// deterministic consequences of the Taylor envelope and must be
/// nonnegative up to floating point slack on every path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichGaps {
    pub lower_gap: f64,
    pub upper_gap: f64,
    pub p2_lower_slack: f64,
    pub p2_upper_slack: f64,
}

pub fn prop2_sandwich(sum: &MomentSummary) -> SandwichGaps {
    let capm = sum.capm_residual();
    let deficit = sum.deficit_residual();
    let p2_lower_slack = sum.p2_lower_slack();
    let p2_upper_slack = sum.p2_upper_slack();
    SandwichGaps {
        lower_gap: deficit - (capm - p2_lower_slack),
        upper_gap: (capm + p2_upper_slack) - deficit,
        p2_lower_slack,
        p2_upper_slack,
    }
}
