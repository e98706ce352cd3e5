//! The basic capital asset pricing game: a perfect-information, turn-based
//! state machine with three capital ledgers.
//!
//! Each round, Investor picks an allocation `g`, Speculator picks `h`, and
//! Market picks the vector of simple returns `x`. Later movers see the moves
//! already made this round. The three ledgers compound multiplicatively:
//! Investor and Speculator by the gross return of their allocation, the
//! index by `1 + x^0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::MomentAccumulator;

/// Absolute tolerance on the "weights sum to one" constraint. Inputs inside
/// the tolerance are renormalized by dividing by the actual sum.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Static parameters of one game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    num_securities: usize,
    num_rounds: usize,
    dt: f64,
}

impl GameConfig {
    /// `num_securities` counts the non-index securities (the market holds
    /// one more: the index itself, at position 0). `dt` is the duration of
    /// one trading round.
    pub fn new(num_securities: usize, num_rounds: usize, dt: f64) -> Result<Self> {
        if num_securities < 1 {
            return Err(Error::InvalidConfig(
                "at least one non-index security is required".into(),
            ));
        }
        if num_rounds < 1 {
            return Err(Error::InvalidConfig("at least one round is required".into()));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "round duration must be a positive real, got {dt}"
            )));
        }
        Ok(Self {
            num_securities,
            num_rounds,
            dt,
        })
    }

    /// Number of non-index securities.
    pub fn num_securities(&self) -> usize {
        self.num_securities
    }

    /// Total securities including the index at position 0.
    pub fn total_securities(&self) -> usize {
        self.num_securities + 1
    }

    pub fn num_rounds(&self) -> usize {
        self.num_rounds
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Trading horizon, always derived as `num_rounds * dt`.
    pub fn horizon(&self) -> f64 {
        self.num_rounds as f64 * self.dt
    }
}

/// Market's move for one round: per-security simple returns, index first.
/// Every component is finite and strictly greater than -1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnVector(Vec<f64>);

impl ReturnVector {
    pub fn new(returns: Vec<f64>) -> Result<Self> {
        for (index, &value) in returns.iter().enumerate() {
            if !value.is_finite() || value <= -1.0 {
                return Err(Error::InvalidReturn { index, value });
            }
        }
        Ok(Self(returns))
    }

    /// Simple return of the market index (security 0).
    pub fn index_return(&self) -> f64 {
        self.0[0]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// A portfolio allocation over the K+1 securities: capital fractions summing
/// to one. Negative components are short positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteWeight { index, value });
            }
            sum += value;
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights { sum });
        }
        let mut weights = weights;
        // Renormalize so downstream arithmetic sees an exact unit sum.
        // Dividing by a sum that is exactly 1.0 is a bitwise no-op.
        if sum != 1.0 {
            for w in &mut weights {
                *w /= sum;
            }
        }
        Ok(Self(weights))
    }

    /// All capital in the index: `e_0`.
    pub fn hold_index(total_securities: usize) -> Self {
        let mut w = vec![0.0; total_securities];
        w[0] = 1.0;
        Self(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Portfolio simple return under `x`: the dot product of weights and
    /// per-security returns.
    pub fn portfolio_return(&self, x: &ReturnVector) -> f64 {
        self.0
            .iter()
            .zip(x.as_slice())
            .map(|(w, r)| w * r)
            .sum()
    }

    /// Portfolio gross return under `x`: `sum_k w^k (1 + x^k)`.
    pub fn gross_return(&self, x: &ReturnVector) -> f64 {
        self.0
            .iter()
            .zip(x.as_slice())
            .map(|(w, r)| w * (1.0 + r))
            .sum()
    }
}

/// Append-only log of the recorded moves `(g_n, x_n)`; Speculator's moves
/// are intentionally not part of it. Stored flat to keep long games cheap.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HistoryLog {
    width: usize,
    investor: Vec<f64>,
    returns: Vec<f64>,
}

impl HistoryLog {
    fn new(width: usize) -> Self {
        Self {
            width,
            investor: Vec::new(),
            returns: Vec::new(),
        }
    }

    fn push(&mut self, g: &Weights, x: &ReturnVector) {
        self.investor.extend_from_slice(g.as_slice());
        self.returns.extend_from_slice(x.as_slice());
    }

    pub fn len(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.returns.len() / self.width
        }
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    /// The `(g, x)` pair recorded at round `round + 1`, as slices.
    pub fn round(&self, round: usize) -> (&[f64], &[f64]) {
        let lo = round * self.width;
        let hi = lo + self.width;
        (&self.investor[lo..hi], &self.returns[lo..hi])
    }

    pub fn rounds(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        (0..self.len()).map(move |i| self.round(i))
    }
}

/// What one `step` did: the round number it completed and the per-round
/// returns of the three ledgers.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub round: usize,
    /// Investor's simple return `s_n = sum_k g^k x^k`.
    pub investor_return: f64,
    /// Index simple return `m_n = x^0`.
    pub index_return: f64,
    pub investor_gross: f64,
    pub speculator_gross: f64,
    pub index_gross: f64,
}

/// Full state of a play: round counter, the three capital ledgers, and the
/// recorded history (the sample-space element of the play).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameState {
    config: GameConfig,
    round: usize,
    investor_capital: f64,
    speculator_capital: f64,
    index_capital: f64,
    history: HistoryLog,
}

/// Start a fresh game: round 0, all three ledgers at one monetary unit,
/// empty history.
pub fn new_game(config: GameConfig) -> GameState {
    GameState {
        round: 0,
        investor_capital: 1.0,
        speculator_capital: 1.0,
        index_capital: 1.0,
        history: HistoryLog::new(config.total_securities()),
        config,
    }
}

impl GameState {
    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn is_finished(&self) -> bool {
        self.round >= self.config.num_rounds
    }

    /// Investor's capital ledger.
    pub fn investor_capital(&self) -> f64 {
        self.investor_capital
    }

    /// Speculator's capital ledger.
    pub fn speculator_capital(&self) -> f64 {
        self.speculator_capital
    }

    /// Capital of one unit invested in the index at the start.
    pub fn index_capital(&self) -> f64 {
        self.index_capital
    }

    pub fn history(&self) -> &HistoryLog {
        &self.history
    }

    /// Play one round. `g` and `x` are moved into the history; `h` is not
    /// recorded. Validation happens before any mutation, so a failed step
    /// leaves the state untouched.
    ///
    /// An investor gross return <= 0 rejects the path: `s_n` is defined by
    /// dividing by the previous capital, so the ledger must stay positive.
    /// A speculator gross return < 0 violates the nonnegative-capital rule
    /// and is reported as an error rather than clamped.
    pub fn step(&mut self, g: Weights, h: &Weights, x: ReturnVector) -> Result<StepOutcome> {
        if self.is_finished() {
            return Err(Error::GameFinished { rounds: self.round });
        }
        let width = self.config.total_securities();
        for got in [g.len(), h.len(), x.len()] {
            if got != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got,
                });
            }
        }

        let round = self.round + 1;
        let investor_gross = g.gross_return(&x);
        let speculator_gross = h.gross_return(&x);
        let index_gross = 1.0 + x.index_return();
        if investor_gross <= 0.0 {
            return Err(Error::InvestorBankrupt {
                round,
                gross: investor_gross,
            });
        }
        if speculator_gross < 0.0 {
            return Err(Error::SpeculatorNegative {
                round,
                gross: speculator_gross,
            });
        }

        let outcome = StepOutcome {
            round,
            investor_return: g.portfolio_return(&x),
            index_return: x.index_return(),
            investor_gross,
            speculator_gross,
            index_gross,
        };

        self.investor_capital *= investor_gross;
        self.speculator_capital *= speculator_gross;
        self.index_capital *= index_gross;
        self.history.push(&g, &x);
        self.round = round;
        Ok(outcome)
    }

    /// Index capital recomputed from the recorded history, for consistency
    /// checks against the running ledger.
    pub fn recomputed_index_capital(&self) -> f64 {
        self.history
            .rounds()
            .map(|(_, x)| 1.0 + x[0])
            .product()
    }

    /// Investor capital recomputed from the recorded history.
    pub fn recomputed_investor_capital(&self) -> f64 {
        self.history
            .rounds()
            .map(|(g, x)| g.iter().zip(x).map(|(w, r)| w * (1.0 + r)).sum::<f64>())
            .product()
    }
}

/// Investor moves first and sees only the completed rounds.
pub trait InvestorStrategy {
    fn propose(&mut self, state: &GameState) -> Result<Weights>;
}

/// Speculator moves second and additionally sees Investor's move for the
/// current round.
pub trait SpeculatorStrategy {
    fn propose(&mut self, state: &GameState, investor_move: &Weights) -> Result<Weights>;
}

/// Market moves last and sees both same-round moves.
pub trait MarketStrategy {
    fn propose(
        &mut self,
        state: &GameState,
        investor_move: &Weights,
        speculator_move: &Weights,
    ) -> Result<ReturnVector>;
}

/// Run a full play of `config.num_rounds()` rounds, feeding every round's
/// `(s_n, m_n)` into a moment accumulator.
pub fn run_game(
    config: GameConfig,
    investor: &mut dyn InvestorStrategy,
    speculator: &mut dyn SpeculatorStrategy,
    market: &mut dyn MarketStrategy,
) -> Result<(GameState, MomentAccumulator)> {
    let mut state = new_game(config);
    let mut acc = MomentAccumulator::new(config.dt())?;
    while !state.is_finished() {
        let g = investor.propose(&state)?;
        let h = speculator.propose(&state, &g)?;
        let x = market.propose(&state, &g, &h)?;
        let outcome = state.step(g, &h, x)?;
        acc.update(outcome.investor_return, outcome.index_return)?;
    }
    Ok((state, acc))
}

/// Limits for the game's continuity restriction: per-round returns small,
/// volatilities finite. Breaches are flagged in reports, never enforced
/// mid-play; adversarial experiments may break the limits on purpose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictionThresholds {
    pub max_abs_s: f64,
    pub max_abs_m: f64,
    pub sigma_s_sq: f64,
    pub sigma_m_sq: f64,
}

impl Default for RestrictionThresholds {
    fn default() -> Self {
        Self {
            max_abs_s: 0.1,
            max_abs_m: 0.1,
            sigma_s_sq: 10.0,
            sigma_m_sq: 10.0,
        }
    }
}

/// Running monitor of the restriction quantities for one play.
#[derive(Debug, Clone)]
pub struct RestrictionMonitor {
    thresholds: RestrictionThresholds,
    dt: f64,
    rounds: u64,
    max_abs_s: f64,
    max_abs_m: f64,
    sum_s_sq: f64,
    sum_m_sq: f64,
}

impl RestrictionMonitor {
    pub fn new(thresholds: RestrictionThresholds, dt: f64) -> Self {
        Self {
            thresholds,
            dt,
            rounds: 0,
            max_abs_s: 0.0,
            max_abs_m: 0.0,
            sum_s_sq: 0.0,
            sum_m_sq: 0.0,
        }
    }

    pub fn update(&mut self, s: f64, m: f64) {
        self.rounds += 1;
        self.max_abs_s = self.max_abs_s.max(s.abs());
        self.max_abs_m = self.max_abs_m.max(m.abs());
        self.sum_s_sq += s * s;
        self.sum_m_sq += m * m;
    }

    pub fn max_abs_s(&self) -> f64 {
        self.max_abs_s
    }

    pub fn max_abs_m(&self) -> f64 {
        self.max_abs_m
    }

    pub fn findings(&self) -> RestrictionFindings {
        let horizon = self.rounds as f64 * self.dt;
        let sigma_s_sq = if self.rounds == 0 {
            0.0
        } else {
            self.sum_s_sq / horizon
        };
        let sigma_m_sq = if self.rounds == 0 {
            0.0
        } else {
            self.sum_m_sq / horizon
        };
        // ln T <= dt^(-1/2) is the sufficiency remark for the largest
        // increment to stay negligible; surfaced as a diagnostic only.
        let log_horizon = if horizon > 0.0 { horizon.ln() } else { f64::NEG_INFINITY };
        let sqrt_inv_dt = (1.0 / self.dt).sqrt();
        RestrictionFindings {
            thresholds: self.thresholds,
            max_abs_s: self.max_abs_s,
            max_abs_m: self.max_abs_m,
            sigma_s_sq,
            sigma_m_sq,
            max_abs_s_exceeded: self.max_abs_s > self.thresholds.max_abs_s,
            max_abs_m_exceeded: self.max_abs_m > self.thresholds.max_abs_m,
            sigma_s_sq_exceeded: sigma_s_sq > self.thresholds.sigma_s_sq,
            sigma_m_sq_exceeded: sigma_m_sq > self.thresholds.sigma_m_sq,
            log_horizon,
            sqrt_inv_dt,
            largest_increment_negligible: log_horizon <= sqrt_inv_dt,
        }
    }
}

/// Snapshot of the restriction diagnostics at the end of a play.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestrictionFindings {
    pub thresholds: RestrictionThresholds,
    pub max_abs_s: f64,
    pub max_abs_m: f64,
    pub sigma_s_sq: f64,
    pub sigma_m_sq: f64,
    pub max_abs_s_exceeded: bool,
    pub max_abs_m_exceeded: bool,
    pub sigma_s_sq_exceeded: bool,
    pub sigma_m_sq_exceeded: bool,
    pub log_horizon: f64,
    pub sqrt_inv_dt: f64,
    pub largest_increment_negligible: bool,
}
