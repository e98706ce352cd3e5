//! Concrete players: investor allocation policies, market return models
//! (stochastic, deterministic, adversarial), and the speculator witness
//! policies whose ledgers drive the error-bound checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{
    GameConfig, GameState, InvestorStrategy, MarketStrategy, ReturnVector, SpeculatorStrategy,
    Weights,
};

/// Returns generated by the stochastic market are clamped to stay above
/// this floor; clamps are counted and must be astronomically rare for
/// reasonable parameters.
pub const RETURN_FLOOR: f64 = -1.0 + 1e-9;

// ---------------------------------------------------------------------------
// Investor
// ---------------------------------------------------------------------------

/// How Investor redistributes capital each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InvestorPolicy {
    /// All capital in the index every round; replicates the index exactly.
    HoldIndex,
    /// The same fractions every round (rebalanced each round).
    FixedWeights(Weights),
    /// Constant share counts: fractions drift with prices.
    BuyAndHold(Weights),
    /// An explicit per-round schedule; must cover every round.
    Schedule(Vec<Weights>),
}

impl InvestorPolicy {
    pub fn player(&self, config: &GameConfig) -> InvestorPlayer {
        InvestorPlayer {
            policy: self.clone(),
            width: config.total_securities(),
            prices: vec![1.0; config.total_securities()],
            cursor: 0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            InvestorPolicy::HoldIndex => "hold-index".into(),
            InvestorPolicy::FixedWeights(w) => format!("fixed:{}", join_f64(w.as_slice())),
            InvestorPolicy::BuyAndHold(w) => format!("buy-and-hold:{}", join_f64(w.as_slice())),
            InvestorPolicy::Schedule(s) => format!("schedule[{} rounds]", s.len()),
        }
    }
}

fn join_f64(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Per-play state for an [`InvestorPolicy`].
#[derive(Debug, Clone)]
pub struct InvestorPlayer {
    policy: InvestorPolicy,
    width: usize,
    prices: Vec<f64>,
    cursor: usize,
}

impl InvestorStrategy for InvestorPlayer {
    fn propose(&mut self, state: &GameState) -> Result<Weights> {
        match &self.policy {
            InvestorPolicy::HoldIndex => Ok(Weights::hold_index(self.width)),
            InvestorPolicy::FixedWeights(w) => {
                check_width(w.len(), self.width)?;
                Ok(w.clone())
            }
            InvestorPolicy::BuyAndHold(initial) => {
                check_width(initial.len(), self.width)?;
                // Catch prices up with the recorded rounds, then hold the
                // share counts bought at round one (unit prices, unit
                // capital, so shares equal the initial fractions).
                while self.cursor < state.history().len() {
                    let (_, x) = state.history().round(self.cursor);
                    for (price, r) in self.prices.iter_mut().zip(x) {
                        *price *= 1.0 + r;
                    }
                    self.cursor += 1;
                }
                let values: Vec<f64> = initial
                    .as_slice()
                    .iter()
                    .zip(&self.prices)
                    .map(|(share, price)| share * price)
                    .collect();
                let total: f64 = values.iter().sum();
                if !(total > 0.0) {
                    return Err(Error::InvalidWeights { sum: total });
                }
                Weights::new(values.iter().map(|v| v / total).collect())
            }
            InvestorPolicy::Schedule(rounds) => rounds
                .get(state.round())
                .cloned()
                .ok_or_else(|| Error::StrategyExhausted {
                    strategy: "schedule".into(),
                    round: state.round() + 1,
                }),
        }
    }
}

fn check_width(got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Market
// ---------------------------------------------------------------------------

/// Drift, volatility, and cross-correlation of the stochastic market, one
/// entry per security (index first). Drift is per unit time, volatility per
/// square root of unit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub correlation: Vec<Vec<f64>>,
}

impl GbmParams {
    /// Constant pairwise correlation `rho` across all securities.
    pub fn with_uniform_correlation(mu: Vec<f64>, sigma: Vec<f64>, rho: f64) -> Self {
        let n = mu.len();
        let correlation = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { rho }).collect())
            .collect();
        Self {
            mu,
            sigma,
            correlation,
        }
    }

    fn validate(&self, width: usize) -> Result<()> {
        check_width(self.mu.len(), width)?;
        check_width(self.sigma.len(), width)?;
        check_width(self.correlation.len(), width)?;
        for row in &self.correlation {
            check_width(row.len(), width)?;
        }
        if self.sigma.iter().any(|s| *s < 0.0 || !s.is_finite()) {
            return Err(Error::InvalidConfig("volatility must be nonnegative".into()));
        }
        if self.mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidConfig("drift must be finite".into()));
        }
        for i in 0..width {
            if (self.correlation[i][i] - 1.0).abs() > 1e-12 {
                return Err(Error::NotPositiveSemidefinite);
            }
            for j in 0..width {
                if (self.correlation[i][j] - self.correlation[j][i]).abs() > 1e-12 {
                    return Err(Error::NotPositiveSemidefinite);
                }
            }
        }
        Ok(())
    }
}

/// Lower-triangular Cholesky factor of a symmetric PSD matrix. Pivots may
/// touch zero (semidefinite case); negative pivots beyond tolerance reject
/// the matrix.
fn cholesky(matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = matrix.len();
    let mut l = vec![vec![0.0; n]; n];
    for k in 0..n {
        let mut d = matrix[k][k];
        for j in 0..k {
            d -= l[k][j] * l[k][j];
        }
        if d < -1e-10 {
            return Err(Error::NotPositiveSemidefinite);
        }
        l[k][k] = d.max(0.0).sqrt();
        for i in (k + 1)..n {
            if l[k][k] == 0.0 {
                l[i][k] = 0.0;
                continue;
            }
            let mut v = matrix[i][k];
            for j in 0..k {
                v -= l[i][j] * l[k][j];
            }
            l[i][k] = v / l[k][k];
        }
    }
    Ok(l)
}

/// Market move generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MarketModel {
    /// Euler-discretized geometric Brownian motion in simple returns:
    /// `x_n^k = mu^k dt + sigma^k sqrt(dt) Z_n^k` with correlated standard
    /// normals from a seeded generator.
    Gbm { params: GbmParams, seed: u64 },
    /// Replay an explicit sequence of return vectors.
    Deterministic { path: Vec<ReturnVector> },
    /// Maximum volatility within bounds: every security alternates between
    /// `+magnitude` and `-magnitude`, with adjacent securities out of phase.
    Alternating { magnitude: f64 },
}

impl MarketModel {
    pub fn player(&self, config: &GameConfig) -> Result<MarketPlayer> {
        let width = config.total_securities();
        let kind = match self {
            MarketModel::Gbm { params, seed } => {
                params.validate(width)?;
                let chol = cholesky(&params.correlation)?;
                let dt = config.dt();
                PlayerKind::Gbm {
                    drift: params.mu.iter().map(|m| m * dt).collect(),
                    diffusion: params.sigma.iter().map(|s| s * dt.sqrt()).collect(),
                    chol,
                    rng: ChaCha8Rng::seed_from_u64(*seed),
                    normals: vec![0.0; width],
                    clamped: 0,
                }
            }
            MarketModel::Deterministic { path } => {
                for x in path {
                    check_width(x.len(), width)?;
                }
                PlayerKind::Deterministic {
                    path: path.clone(),
                    cursor: 0,
                }
            }
            MarketModel::Alternating { magnitude } => {
                if !(*magnitude > 0.0 && *magnitude < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "alternating magnitude must lie in (0, 1), got {magnitude}"
                    )));
                }
                PlayerKind::Alternating {
                    magnitude: *magnitude,
                }
            }
        };
        Ok(MarketPlayer { width, kind })
    }

    /// Generate the full return path this model would play against any
    /// opponents that it does not observe.
    pub fn generate(&self, config: &GameConfig) -> Result<Vec<ReturnVector>> {
        let mut player = self.player(config)?;
        let state = crate::protocol::new_game(*config);
        let idle = Weights::hold_index(config.total_securities());
        let mut path = Vec::with_capacity(config.num_rounds());
        for _ in 0..config.num_rounds() {
            path.push(player.next_move(&state, path.len() + 1, &idle, &idle)?);
        }
        Ok(path)
    }

    pub fn describe(&self) -> String {
        match self {
            MarketModel::Gbm { params, seed } => format!(
                "gbm mu=[{}] sigma=[{}] seed={seed}",
                join_f64(&params.mu),
                join_f64(&params.sigma)
            ),
            MarketModel::Deterministic { path } => format!("deterministic[{} rounds]", path.len()),
            MarketModel::Alternating { magnitude } => format!("alternating +/-{magnitude}"),
        }
    }
}

#[derive(Debug, Clone)]
enum PlayerKind {
    Gbm {
        drift: Vec<f64>,
        diffusion: Vec<f64>,
        chol: Vec<Vec<f64>>,
        rng: ChaCha8Rng,
        normals: Vec<f64>,
        clamped: u64,
    },
    Deterministic {
        path: Vec<ReturnVector>,
        cursor: usize,
    },
    Alternating {
        magnitude: f64,
    },
}

/// Per-play state for a [`MarketModel`].
#[derive(Debug, Clone)]
pub struct MarketPlayer {
    width: usize,
    kind: PlayerKind,
}

impl MarketPlayer {
    /// Number of returns clamped to the domain floor so far.
    pub fn clamp_count(&self) -> u64 {
        match &self.kind {
            PlayerKind::Gbm { clamped, .. } => *clamped,
            _ => 0,
        }
    }

    fn next_move(
        &mut self,
        _state: &GameState,
        round: usize,
        _investor_move: &Weights,
        _speculator_move: &Weights,
    ) -> Result<ReturnVector> {
        match &mut self.kind {
            PlayerKind::Gbm {
                drift,
                diffusion,
                chol,
                rng,
                normals,
                clamped,
            } => {
                for z in normals.iter_mut() {
                    *z = rng.sample(StandardNormal);
                }
                let mut returns = Vec::with_capacity(drift.len());
                for k in 0..drift.len() {
                    let mut shock = 0.0;
                    for j in 0..=k {
                        shock += chol[k][j] * normals[j];
                    }
                    let mut x = drift[k] + diffusion[k] * shock;
                    if x <= RETURN_FLOOR {
                        x = RETURN_FLOOR;
                        *clamped += 1;
                    }
                    returns.push(x);
                }
                ReturnVector::new(returns)
            }
            PlayerKind::Deterministic { path, cursor } => {
                let x = path.get(*cursor).cloned().ok_or(Error::StrategyExhausted {
                    strategy: "deterministic market".into(),
                    round,
                })?;
                *cursor += 1;
                Ok(x)
            }
            PlayerKind::Alternating { magnitude } => {
                let c = *magnitude;
                let returns = (0..self.width)
                    .map(|k| if (round + k) % 2 == 0 { c } else { -c })
                    .collect();
                ReturnVector::new(returns)
            }
        }
    }
}

impl MarketStrategy for MarketPlayer {
    fn propose(
        &mut self,
        state: &GameState,
        investor_move: &Weights,
        speculator_move: &Weights,
    ) -> Result<ReturnVector> {
        self.next_move(state, state.round() + 1, investor_move, speculator_move)
    }
}

// ---------------------------------------------------------------------------
// Speculator
// ---------------------------------------------------------------------------

/// The blend witness move: `epsilon` of capital in Investor's portfolio and
/// `1 - epsilon` in the index, so the induced per-round return is exactly
/// `epsilon * s_n + (1 - epsilon) * m_n`.
pub fn blend_move(epsilon: f64, g: &Weights) -> Result<Weights> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange {
            value: epsilon,
            low: 0.0,
            high: 1.0,
        });
    }
    let mut h: Vec<f64> = g.as_slice().iter().map(|w| epsilon * w).collect();
    h[0] += 1.0 - epsilon;
    Weights::new(h)
}

/// The short-blend witness move: `-epsilon` of capital in Investor's
/// portfolio and `1 + epsilon` in the index, inducing the per-round return
/// `-epsilon * s_n + (1 + epsilon) * m_n`. Requires `epsilon < 1/3` so the
/// move cannot bankrupt Speculator while per-round returns stay small; the
/// engine still detects a nonpositive gross return instead of assuming it.
pub fn short_blend_move(epsilon: f64, g: &Weights) -> Result<Weights> {
    if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
        return Err(Error::EpsilonOutOfRange {
            value: epsilon,
            low: 0.0,
            high: 1.0 / 3.0,
        });
    }
    let mut h: Vec<f64> = g.as_slice().iter().map(|w| -epsilon * w).collect();
    h[0] += 1.0 + epsilon;
    Weights::new(h)
}

/// Speculator policy tree. `Split` runs independent child accounts with
/// fixed capital fractions; its ledger is their weighted sum at every round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpeculatorPolicy {
    HoldIndex,
    Blend { epsilon: f64 },
    ShortBlend { epsilon: f64 },
    Split(Vec<(f64, SpeculatorPolicy)>),
}

impl SpeculatorPolicy {
    /// Combine child policies with positive capital fractions summing to 1.
    pub fn split(children: Vec<(f64, SpeculatorPolicy)>) -> Result<Self> {
        let sum: f64 = children.iter().map(|(w, _)| *w).sum();
        if children.is_empty()
            || children.iter().any(|(w, _)| !(*w > 0.0))
            || (sum - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidSplit { sum });
        }
        for (_, child) in &children {
            child.validate()?;
        }
        Ok(SpeculatorPolicy::Split(children))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpeculatorPolicy::HoldIndex => Ok(()),
            SpeculatorPolicy::Blend { epsilon } => {
                if *epsilon > 0.0 && *epsilon < 1.0 {
                    Ok(())
                } else {
                    Err(Error::EpsilonOutOfRange {
                        value: *epsilon,
                        low: 0.0,
                        high: 1.0,
                    })
                }
            }
            SpeculatorPolicy::ShortBlend { epsilon } => {
                if *epsilon > 0.0 && *epsilon < 1.0 / 3.0 {
                    Ok(())
                } else {
                    Err(Error::EpsilonOutOfRange {
                        value: *epsilon,
                        low: 0.0,
                        high: 1.0 / 3.0,
                    })
                }
            }
            SpeculatorPolicy::Split(children) => {
                let sum: f64 = children.iter().map(|(w, _)| *w).sum();
                if children.is_empty()
                    || children.iter().any(|(w, _)| !(*w > 0.0))
                    || (sum - 1.0).abs() > 1e-12
                {
                    return Err(Error::InvalidSplit { sum });
                }
                children.iter().try_for_each(|(_, c)| c.validate())
            }
        }
    }

    pub fn ledger(&self) -> Result<PolicyLedger> {
        self.validate()?;
        Ok(PolicyLedger::build(self))
    }

    pub fn describe(&self) -> String {
        match self {
            SpeculatorPolicy::HoldIndex => "hold-index".into(),
            SpeculatorPolicy::Blend { epsilon } => format!("blend(eps={epsilon})"),
            SpeculatorPolicy::ShortBlend { epsilon } => format!("short-blend(eps={epsilon})"),
            SpeculatorPolicy::Split(children) => {
                let parts: Vec<String> = children
                    .iter()
                    .map(|(w, c)| format!("{w}*{}", c.describe()))
                    .collect();
                format!("split[{}]", parts.join(" + "))
            }
        }
    }
}

/// Capital ledger of one speculator policy, evolved directly from the
/// per-round pair `(s_n, m_n)` through the exact induced-return identities.
/// A split ledger is recomputed as the weighted sum of its independently
/// managed children every round.
#[derive(Debug, Clone)]
pub struct PolicyLedger {
    policy: SpeculatorPolicy,
    capital: f64,
    children: Vec<(f64, PolicyLedger)>,
    guard_violations: u64,
    frozen: bool,
}

impl PolicyLedger {
    fn build(policy: &SpeculatorPolicy) -> Self {
        let children = match policy {
            SpeculatorPolicy::Split(children) => children
                .iter()
                .map(|(w, child)| (*w, PolicyLedger::build(child)))
                .collect(),
            _ => Vec::new(),
        };
        Self {
            policy: policy.clone(),
            capital: 1.0,
            children,
            guard_violations: 0,
            frozen: false,
        }
    }

    pub fn policy(&self) -> &SpeculatorPolicy {
        &self.policy
    }

    pub fn capital(&self) -> f64 {
        self.capital
    }

    /// Bankruptcy-guard trips (nonpositive short-blend gross return), summed
    /// over the whole policy tree. A tripped ledger is frozen, never clamped.
    pub fn guard_violations(&self) -> u64 {
        self.guard_violations
            + self
                .children
                .iter()
                .map(|(_, c)| c.guard_violations())
                .sum::<u64>()
    }

    /// Advance one round given Investor's and the index's simple returns.
    pub fn advance(&mut self, s: f64, m: f64) {
        match &self.policy {
            SpeculatorPolicy::HoldIndex => {
                self.capital *= 1.0 + m;
            }
            SpeculatorPolicy::Blend { epsilon } => {
                // epsilon*(1+s) + (1-epsilon)*(1+m) > 0 whenever s, m > -1.
                self.capital *= 1.0 + epsilon * s + (1.0 - epsilon) * m;
            }
            SpeculatorPolicy::ShortBlend { epsilon } => {
                let gross = 1.0 - epsilon * s + (1.0 + epsilon) * m;
                if gross <= 0.0 {
                    self.guard_violations += 1;
                    self.frozen = true;
                }
                if !self.frozen {
                    self.capital *= gross;
                }
            }
            SpeculatorPolicy::Split(_) => {
                let mut total = 0.0;
                for (weight, child) in &mut self.children {
                    child.advance(s, m);
                    total += *weight * child.capital();
                }
                self.capital = total;
            }
        }
    }

    /// Materialize the allocation this policy holds given Investor's move;
    /// a split is the capital-weighted mix of its children's allocations.
    pub fn move_weights(&self, g: &Weights) -> Result<Weights> {
        match &self.policy {
            SpeculatorPolicy::HoldIndex => Ok(Weights::hold_index(g.len())),
            SpeculatorPolicy::Blend { epsilon } => blend_move(*epsilon, g),
            SpeculatorPolicy::ShortBlend { epsilon } => short_blend_move(*epsilon, g),
            SpeculatorPolicy::Split(_) => {
                let total: f64 = self
                    .children
                    .iter()
                    .map(|(w, c)| w * c.capital())
                    .sum();
                if !(total > 0.0) {
                    // Exhausted account: any allocation grows zero capital.
                    return Ok(Weights::hold_index(g.len()));
                }
                let mut mix = vec![0.0; g.len()];
                for (weight, child) in &self.children {
                    let coeff = weight * child.capital() / total;
                    let h = child.move_weights(g)?;
                    for (acc, component) in mix.iter_mut().zip(h.as_slice()) {
                        *acc += coeff * component;
                    }
                }
                Weights::new(mix)
            }
        }
    }
}

/// Adapter that plays a [`SpeculatorPolicy`] inside the protocol engine,
/// catching its ledger up from the recorded history before each move.
#[derive(Debug, Clone)]
pub struct PolicySpeculator {
    ledger: PolicyLedger,
    cursor: usize,
}

impl PolicySpeculator {
    pub fn new(policy: &SpeculatorPolicy) -> Result<Self> {
        Ok(Self {
            ledger: policy.ledger()?,
            cursor: 0,
        })
    }

    pub fn ledger(&self) -> &PolicyLedger {
        &self.ledger
    }
}

impl SpeculatorStrategy for PolicySpeculator {
    fn propose(&mut self, state: &GameState, investor_move: &Weights) -> Result<Weights> {
        while self.cursor < state.history().len() {
            let (g, x) = state.history().round(self.cursor);
            let s: f64 = g.iter().zip(x).map(|(w, r)| w * r).sum();
            self.ledger.advance(s, x[0]);
            self.cursor += 1;
        }
        self.ledger.move_weights(investor_move)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(values: &[f64]) -> Weights {
        Weights::new(values.to_vec()).unwrap()
    }

    fn assert_close(a: f64, b: f64, rel: f64) {
        let scale = a.abs().max(b.abs()).max(1e-300);
        assert!((a - b).abs() / scale <= rel, "expected {a} ~ {b}");
    }

    #[test]
    fn blend_move_mixes_with_index() {
        let h = blend_move(0.5, &w(&[0.0, 1.0])).unwrap();
        assert_eq!(h.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn blending_the_index_with_itself_is_identity() {
        let h = blend_move(0.1, &w(&[1.0, 0.0])).unwrap();
        assert_eq!(h.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn blend_return_vanishes_on_zero_returns() {
        let x = ReturnVector::new(vec![0.0, 0.0, 0.0]).unwrap();
        let h = blend_move(0.37, &w(&[0.2, 0.5, 0.3])).unwrap();
        assert_eq!(h.portfolio_return(&x), 0.0);
    }

    #[test]
    fn blend_move_rejects_bad_epsilon() {
        assert!(blend_move(0.0, &w(&[1.0, 0.0])).is_err());
        assert!(blend_move(1.0, &w(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn short_blend_move_shorts_the_portfolio() {
        let h = short_blend_move(0.1, &w(&[0.0, 1.0])).unwrap();
        assert_close(h.as_slice()[0], 1.1, 1e-15);
        assert_close(h.as_slice()[1], -0.1, 1e-15);
        assert!(short_blend_move(1.0 / 3.0, &w(&[0.0, 1.0])).is_err());
    }

    #[test]
    fn short_blend_of_index_is_index() {
        let h = short_blend_move(0.2, &w(&[1.0, 0.0])).unwrap();
        assert_eq!(h.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn short_blend_guard_inequality_at_extremes() {
        // s = 1, m = -1/2: return is -eps + (1+eps)(-1/2) > -1 for eps < 1/3.
        for epsilon in [0.05, 0.2, 0.32] {
            let induced = -epsilon * 1.0 + (1.0 + epsilon) * (-0.5);
            assert!(induced > -1.0);
        }
    }

    #[test]
    fn blend_ledger_tracks_induced_returns() {
        let mut ledger = SpeculatorPolicy::Blend { epsilon: 0.25 }.ledger().unwrap();
        ledger.advance(0.02, -0.01);
        let expected = 1.0 + 0.25 * 0.02 + 0.75 * (-0.01);
        assert_close(ledger.capital(), expected, 1e-15);
    }

    #[test]
    fn short_ledger_guard_freezes_not_clamps() {
        let mut ledger = SpeculatorPolicy::ShortBlend { epsilon: 0.3 }
            .ledger()
            .unwrap();
        // m = -0.9 with s = 0.9: gross = 1 - 0.27 - 1.17 < 0.
        ledger.advance(0.9, -0.9);
        assert_eq!(ledger.guard_violations(), 1);
        let frozen = ledger.capital();
        ledger.advance(0.0, 0.1);
        assert_eq!(ledger.capital(), frozen);
    }

    #[test]
    fn singleton_split_matches_child() {
        let child = SpeculatorPolicy::Blend { epsilon: 0.1 };
        let split = SpeculatorPolicy::split(vec![(1.0, child.clone())]).unwrap();
        let mut a = split.ledger().unwrap();
        let mut b = child.ledger().unwrap();
        for (s, m) in [(0.01, 0.003), (-0.02, 0.01), (0.005, -0.004)] {
            a.advance(s, m);
            b.advance(s, m);
        }
        assert_eq!(a.capital(), b.capital());
    }

    #[test]
    fn split_ledger_is_weighted_sum_of_children() {
        let blend = SpeculatorPolicy::Blend { epsilon: 0.2 };
        let short = SpeculatorPolicy::ShortBlend { epsilon: 0.2 };
        let split =
            SpeculatorPolicy::split(vec![(0.5, blend.clone()), (0.5, short.clone())]).unwrap();
        let mut combined = split.ledger().unwrap();
        let mut b = blend.ledger().unwrap();
        let mut s = short.ledger().unwrap();
        for (si, mi) in [(0.01, 0.005), (-0.03, 0.01), (0.02, 0.02), (0.0, -0.01)] {
            combined.advance(si, mi);
            b.advance(si, mi);
            s.advance(si, mi);
            let expected = 0.5 * b.capital() + 0.5 * s.capital();
            assert_eq!(combined.capital(), expected);
        }
    }

    #[test]
    fn half_split_halves_the_level() {
        // If one child reaches (2/alpha) M and the other stays nonnegative,
        // the equal split reaches (1/alpha) M.
        let alpha = 0.1f64;
        let child_1 = 2.0 / alpha;
        let child_2 = 0.0f64;
        let combined = 0.5 * child_1 + 0.5 * child_2;
        assert!(combined >= 1.0 / alpha);
    }

    #[test]
    fn split_validation() {
        assert!(SpeculatorPolicy::split(vec![]).is_err());
        assert!(SpeculatorPolicy::split(vec![
            (0.7, SpeculatorPolicy::HoldIndex),
            (0.2, SpeculatorPolicy::HoldIndex)
        ])
        .is_err());
        assert!(SpeculatorPolicy::split(vec![
            (-0.5, SpeculatorPolicy::HoldIndex),
            (1.5, SpeculatorPolicy::HoldIndex)
        ])
        .is_err());
    }

    #[test]
    fn zero_volatility_gbm_is_pure_drift() {
        let config = GameConfig::new(1, 5, 0.01).unwrap();
        let model = MarketModel::Gbm {
            params: GbmParams::with_uniform_correlation(vec![0.05, 0.05], vec![0.0, 0.0], 0.0),
            seed: 7,
        };
        let path = model.generate(&config).unwrap();
        let expected = 0.05 * config.dt();
        for x in &path {
            assert_eq!(x.as_slice(), &[expected, expected]);
        }
    }

    #[test]
    fn fixed_seed_reproduces_the_path() {
        let config = GameConfig::new(2, 50, 0.001).unwrap();
        let params = GbmParams::with_uniform_correlation(
            vec![0.05, 0.08, 0.02],
            vec![0.2, 0.3, 0.1],
            0.4,
        );
        let model = MarketModel::Gbm {
            params,
            seed: 42,
        };
        let a = model.generate(&config).unwrap();
        let b = model.generate(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let config = GameConfig::new(1, 10, 0.001).unwrap();
        let params = GbmParams::with_uniform_correlation(vec![0.05, 0.05], vec![0.2, 0.2], 0.0);
        let a = MarketModel::Gbm {
            params: params.clone(),
            seed: 1,
        }
        .generate(&config)
        .unwrap();
        let b = MarketModel::Gbm { params, seed: 2 }.generate(&config).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn non_psd_correlation_is_rejected() {
        let config = GameConfig::new(1, 5, 0.01).unwrap();
        let model = MarketModel::Gbm {
            params: GbmParams::with_uniform_correlation(vec![0.0, 0.0], vec![0.1, 0.1], 1.5),
            seed: 0,
        };
        assert!(matches!(
            model.player(&config),
            Err(Error::NotPositiveSemidefinite)
        ));
    }

    #[test]
    fn cholesky_two_by_two() {
        let rho = 0.5f64;
        let l = cholesky(&[vec![1.0, rho], vec![rho, 1.0]]).unwrap();
        assert_close(l[0][0], 1.0, 1e-15);
        assert_close(l[1][0], rho, 1e-15);
        assert_close(l[1][1], (1.0 - rho * rho).sqrt(), 1e-15);
    }

    #[test]
    fn correlated_shocks_have_expected_sample_correlation() {
        let config = GameConfig::new(1, 20_000, 1.0).unwrap();
        let rho = 0.7;
        let model = MarketModel::Gbm {
            params: GbmParams::with_uniform_correlation(vec![0.0, 0.0], vec![0.02, 0.02], rho),
            seed: 11,
        };
        let path = model.generate(&config).unwrap();
        let (mut xy, mut xx, mut yy) = (0.0, 0.0, 0.0);
        for x in &path {
            let [a, b] = [x.as_slice()[0], x.as_slice()[1]];
            xy += a * b;
            xx += a * a;
            yy += b * b;
        }
        let sample_rho = xy / (xx.sqrt() * yy.sqrt());
        assert!((sample_rho - rho).abs() < 0.02, "sample rho {sample_rho}");
    }

    #[test]
    fn alternating_market_flips_signs_per_security() {
        let config = GameConfig::new(1, 4, 1.0).unwrap();
        let model = MarketModel::Alternating { magnitude: 0.01 };
        let path = model.generate(&config).unwrap();
        assert_eq!(path[0].as_slice(), &[-0.01, 0.01]);
        assert_eq!(path[1].as_slice(), &[0.01, -0.01]);
        assert_eq!(path[2].as_slice(), &[-0.01, 0.01]);
    }

    #[test]
    fn deterministic_market_replays_and_exhausts() {
        let config = GameConfig::new(1, 3, 1.0).unwrap();
        let rows = vec![
            ReturnVector::new(vec![0.01, 0.02]).unwrap(),
            ReturnVector::new(vec![-0.01, 0.0]).unwrap(),
        ];
        let model = MarketModel::Deterministic { path: rows.clone() };
        let mut player = model.player(&config).unwrap();
        let state = crate::protocol::new_game(config);
        let idle = Weights::hold_index(2);
        assert_eq!(player.next_move(&state, 1, &idle, &idle).unwrap(), rows[0]);
        assert_eq!(player.next_move(&state, 2, &idle, &idle).unwrap(), rows[1]);
        assert!(matches!(
            player.next_move(&state, 3, &idle, &idle),
            Err(Error::StrategyExhausted { .. })
        ));
    }

    #[test]
    fn buy_and_hold_drifts_with_prices() {
        let config = GameConfig::new(1, 3, 1.0).unwrap();
        let policy = InvestorPolicy::BuyAndHold(w(&[0.5, 0.5]));
        let mut player = policy.player(&config);
        let mut state = crate::protocol::new_game(config);
        let e0 = Weights::hold_index(2);

        let g1 = player.propose(&state).unwrap();
        assert_eq!(g1.as_slice(), &[0.5, 0.5]);
        state
            .step(g1, &e0, ReturnVector::new(vec![0.1, 0.0]).unwrap())
            .unwrap();

        let g2 = player.propose(&state).unwrap();
        assert_close(g2.as_slice()[0], 0.55 / 1.05, 1e-15);
        assert_close(g2.as_slice()[1], 0.5 / 1.05, 1e-15);
    }

    #[test]
    fn schedule_covers_rounds_or_errors() {
        let config = GameConfig::new(1, 2, 1.0).unwrap();
        let policy = InvestorPolicy::Schedule(vec![w(&[1.0, 0.0])]);
        let mut player = policy.player(&config);
        let mut state = crate::protocol::new_game(config);
        let e0 = Weights::hold_index(2);
        let g1 = player.propose(&state).unwrap();
        state
            .step(g1, &e0, ReturnVector::new(vec![0.0, 0.0]).unwrap())
            .unwrap();
        assert!(matches!(
            player.propose(&state),
            Err(Error::StrategyExhausted { .. })
        ));
    }
}
