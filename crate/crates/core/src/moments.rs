//! Streaming path statistics: per-unit-time uncentered moments of the
//! Investor and index return sequences, their log growth rates, and the
//! curvature maxima consumed by the error bounds.
//!
//! Accumulators store raw compensated sums, never running means, so merging
//! two accumulators is plain addition and parallel segment processing gives
//! the same totals as one sequential pass.

use serde::{Deserialize, Serialize};

use crate::bounds::{big_gamma, gamma_raw};
use crate::error::{Error, Result};

/// Neumaier-compensated running sum. One `f64` of carry protects sums of
/// up to ~1e7 small terms from losing digits.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let (sum, carry) = two_sum(self.sum, value);
        self.sum = sum;
        self.carry += carry;
    }

    pub fn merge(&self, other: &Self) -> Self {
        let (sum, carry) = two_sum(self.sum, other.sum);
        Self {
            sum,
            carry: self.carry + other.carry + carry,
        }
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let c = if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    };
    (s, c)
}

/// `|x| / |1 + x|^3`, the per-round curvature ratio whose running maximum
/// feeds the third-order remainder bounds.
#[inline]
pub fn curvature_ratio(x: f64) -> f64 {
    let d = (1.0 + x).abs();
    x.abs() / (d * d * d)
}

/// Streaming sums over one play's `(s_n, m_n)` sequence.
#[derive(Debug, Clone, Default)]
pub struct MomentAccumulator {
    n: u64,
    dt: f64,
    sum_s: CompensatedSum,
    sum_m: CompensatedSum,
    sum_s2: CompensatedSum,
    sum_m2: CompensatedSum,
    sum_sm: CompensatedSum,
    sum_diff2: CompensatedSum,
    sum_2ms2: CompensatedSum,
    sum_log_s: CompensatedSum,
    sum_log_m: CompensatedSum,
    sum_gamma_abs_s: CompensatedSum,
    sum_gamma_abs_m: CompensatedSum,
    sum_big_gamma_s: CompensatedSum,
    sum_big_gamma_m: CompensatedSum,
    max_abs_s: f64,
    max_abs_m: f64,
    max_s_ratio: f64,
    max_m_ratio: f64,
    max_2ms_ratio: f64,
}

impl MomentAccumulator {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "round duration must be a positive real, got {dt}"
            )));
        }
        Ok(Self {
            dt,
            ..Default::default()
        })
    }

    /// Record one round. Both returns must lie in the open domain (-1, inf)
    /// or the log growth terms are undefined (an Investor or index wipeout).
    pub fn update(&mut self, s: f64, m: f64) -> Result<()> {
        for value in [s, m] {
            if !value.is_finite() || value <= -1.0 {
                return Err(Error::ReturnOutOfDomain { value });
            }
        }
        let diff = s - m;
        let two_m_minus_s = 2.0 * m - s;
        self.sum_s.add(s);
        self.sum_m.add(m);
        self.sum_s2.add(s * s);
        self.sum_m2.add(m * m);
        self.sum_sm.add(s * m);
        self.sum_diff2.add(diff * diff);
        self.sum_2ms2.add(two_m_minus_s * two_m_minus_s);
        self.sum_log_s.add(s.ln_1p());
        self.sum_log_m.add(m.ln_1p());
        self.sum_gamma_abs_s.add(gamma_raw(s).abs());
        self.sum_gamma_abs_m.add(gamma_raw(m).abs());
        self.sum_big_gamma_s.add(big_gamma(s));
        self.sum_big_gamma_m.add(big_gamma(m));
        self.max_abs_s = self.max_abs_s.max(s.abs());
        self.max_abs_m = self.max_abs_m.max(m.abs());
        self.max_s_ratio = self.max_s_ratio.max(curvature_ratio(s));
        self.max_m_ratio = self.max_m_ratio.max(curvature_ratio(m));
        self.max_2ms_ratio = self.max_2ms_ratio.max(curvature_ratio(two_m_minus_s));
        self.n += 1;
        Ok(())
    }

    /// Combine two accumulators over disjoint segments of the same play:
    /// sums add, maxima combine by max, counts add.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        if self.dt != other.dt {
            return Err(Error::DtMismatch {
                left: self.dt,
                right: other.dt,
            });
        }
        Ok(Self {
            n: self.n + other.n,
            dt: self.dt,
            sum_s: self.sum_s.merge(&other.sum_s),
            sum_m: self.sum_m.merge(&other.sum_m),
            sum_s2: self.sum_s2.merge(&other.sum_s2),
            sum_m2: self.sum_m2.merge(&other.sum_m2),
            sum_sm: self.sum_sm.merge(&other.sum_sm),
            sum_diff2: self.sum_diff2.merge(&other.sum_diff2),
            sum_2ms2: self.sum_2ms2.merge(&other.sum_2ms2),
            sum_log_s: self.sum_log_s.merge(&other.sum_log_s),
            sum_log_m: self.sum_log_m.merge(&other.sum_log_m),
            sum_gamma_abs_s: self.sum_gamma_abs_s.merge(&other.sum_gamma_abs_s),
            sum_gamma_abs_m: self.sum_gamma_abs_m.merge(&other.sum_gamma_abs_m),
            sum_big_gamma_s: self.sum_big_gamma_s.merge(&other.sum_big_gamma_s),
            sum_big_gamma_m: self.sum_big_gamma_m.merge(&other.sum_big_gamma_m),
            max_abs_s: self.max_abs_s.max(other.max_abs_s),
            max_abs_m: self.max_abs_m.max(other.max_abs_m),
            max_s_ratio: self.max_s_ratio.max(other.max_s_ratio),
            max_m_ratio: self.max_m_ratio.max(other.max_m_ratio),
            max_2ms_ratio: self.max_2ms_ratio.max(other.max_2ms_ratio),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn sum_s(&self) -> f64 {
        self.sum_s.value()
    }

    pub fn sum_m(&self) -> f64 {
        self.sum_m.value()
    }

    pub fn sum_sm(&self) -> f64 {
        self.sum_sm.value()
    }

    pub fn sum_s2(&self) -> f64 {
        self.sum_s2.value()
    }

    pub fn sum_m2(&self) -> f64 {
        self.sum_m2.value()
    }

    pub fn sum_diff2(&self) -> f64 {
        self.sum_diff2.value()
    }

    /// Normalize every sum by the elapsed time `T = n * dt`.
    pub fn summarize(&self) -> Result<MomentSummary> {
        if self.n == 0 {
            return Err(Error::EmptyAccumulator);
        }
        let horizon = self.n as f64 * self.dt;
        Ok(MomentSummary {
            n: self.n,
            dt: self.dt,
            horizon,
            mu_s: self.sum_s.value() / horizon,
            mu_m: self.sum_m.value() / horizon,
            sigma_s_sq: self.sum_s2.value() / horizon,
            sigma_m_sq: self.sum_m2.value() / horizon,
            sigma_sm: self.sum_sm.value() / horizon,
            sigma_diff_sq: self.sum_diff2.value() / horizon,
            sigma_2ms_sq: self.sum_2ms2.value() / horizon,
            lambda_s: self.sum_log_s.value() / horizon,
            lambda_m: self.sum_log_m.value() / horizon,
            gamma_abs_s_rate: self.sum_gamma_abs_s.value() / horizon,
            gamma_abs_m_rate: self.sum_gamma_abs_m.value() / horizon,
            big_gamma_s_rate: self.sum_big_gamma_s.value() / horizon,
            big_gamma_m_rate: self.sum_big_gamma_m.value() / horizon,
            max_abs_s: self.max_abs_s,
            max_abs_m: self.max_abs_m,
            max_s_ratio: self.max_s_ratio,
            max_m_ratio: self.max_m_ratio,
            max_2ms_ratio: self.max_2ms_ratio,
        })
    }
}

/// Per-unit-time statistics of one play. All second moments are uncentered:
/// time-averaged sums of raw products, with no mean subtraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub n: u64,
    pub dt: f64,
    /// Elapsed time `T = n * dt`.
    pub horizon: f64,
    /// Mean simple return of Investor's portfolio per unit time.
    pub mu_s: f64,
    /// Mean simple return of the index per unit time.
    pub mu_m: f64,
    pub sigma_s_sq: f64,
    pub sigma_m_sq: f64,
    pub sigma_sm: f64,
    /// Second moment of the per-round difference `s_n - m_n`.
    pub sigma_diff_sq: f64,
    /// Second moment of `2 m_n - s_n`, used by the lower error bound.
    pub sigma_2ms_sq: f64,
    /// Log growth rate of Investor's capital: `exp(lambda_s * T)` is the
    /// terminal investor ledger.
    pub lambda_s: f64,
    /// Log growth rate of the index.
    pub lambda_m: f64,
    /// `(1/T) sum |gamma(s_n)|`.
    pub gamma_abs_s_rate: f64,
    /// `(1/T) sum |gamma(m_n)|`.
    pub gamma_abs_m_rate: f64,
    /// `(1/T) sum Gamma(s_n)` (signed).
    pub big_gamma_s_rate: f64,
    /// `(1/T) sum Gamma(m_n)` (signed).
    pub big_gamma_m_rate: f64,
    pub max_abs_s: f64,
    pub max_abs_m: f64,
    /// Running max of `|s_n| / |1 + s_n|^3`.
    pub max_s_ratio: f64,
    /// Running max of `|m_n| / |1 + m_n|^3`.
    pub max_m_ratio: f64,
    /// Running max of `|2 m_n - s_n| / |1 + 2 m_n - s_n|^3`.
    pub max_2ms_ratio: f64,
}

impl MomentSummary {
    /// The pricing residual `mu_s - mu_m + sigma_m^2 - sigma_sm`. Under the
    /// efficient market hypothesis this is predicted to be near zero.
    pub fn capm_residual(&self) -> f64 {
        self.mu_s - self.mu_m + self.sigma_m_sq - self.sigma_sm
    }

    /// The growth residual `lambda_s - lambda_m + sigma_{s-m}^2 / 2`: log
    /// growth shortfall against the index plus the theoretical performance
    /// deficit.
    pub fn deficit_residual(&self) -> f64 {
        self.lambda_s - self.lambda_m + 0.5 * self.sigma_diff_sq
    }

    /// Taylor correction that bounds the growth residual from above:
    /// `(1/T)(sum Gamma(s_n) + sum |gamma(m_n)|)`.
    pub fn p2_upper_slack(&self) -> f64 {
        self.big_gamma_s_rate + self.gamma_abs_m_rate
    }

    /// Taylor correction that bounds the growth residual from below:
    /// `(1/T)(sum |gamma(s_n)| + sum Gamma(m_n))`.
    pub fn p2_lower_slack(&self) -> f64 {
        self.gamma_abs_s_rate + self.big_gamma_m_rate
    }
}
