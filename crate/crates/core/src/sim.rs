//! The play harness: runs one full game while tracking the witness ledgers,
//! the restriction monitor, and the moment accumulator in a single pass,
//! plus the batch driver that fans independent seeded plays out over a
//! thread pool.
//!
//! Monte Carlo batches are embarrassingly parallel: every play owns its
//! state and results are collected in input order, so parallel and
//! sequential execution produce identical output.

use crate::error::{Error, Result};
use crate::moments::{MomentAccumulator, MomentSummary};
use crate::protocol::{
    new_game, GameConfig, InvestorStrategy, MarketStrategy, RestrictionFindings,
    RestrictionMonitor, RestrictionThresholds, ReturnVector, Weights,
};
use crate::strategies::{InvestorPolicy, MarketModel, PolicyLedger, SpeculatorPolicy};

/// One full play to run: who plays, what to track.
#[derive(Debug, Clone)]
pub struct PlaySpec {
    pub config: GameConfig,
    pub investor: InvestorPolicy,
    pub market: MarketModel,
    /// Witness blend fractions; for each one a blend and a short-blend
    /// ledger are tracked. Every entry must lie in (0, 1/3) so both proof
    /// chains apply.
    pub epsilons: Vec<f64>,
    /// Optional extra speculator ledger (typically an equal split of a
    /// blend and a short-blend account).
    pub split: Option<SpeculatorPolicy>,
    pub thresholds: RestrictionThresholds,
}

impl PlaySpec {
    pub fn new(config: GameConfig, investor: InvestorPolicy, market: MarketModel) -> Self {
        Self {
            config,
            investor,
            market,
            epsilons: vec![0.1],
            split: None,
            thresholds: RestrictionThresholds::default(),
        }
    }

    pub fn with_epsilons(mut self, epsilons: Vec<f64>) -> Self {
        self.epsilons = epsilons;
        self
    }

    pub fn with_split(mut self, split: SpeculatorPolicy) -> Self {
        self.split = Some(split);
        self
    }
}

/// Terminal state of the two witness ledgers tracked for one epsilon.
#[derive(Debug, Clone, Copy)]
pub struct WitnessPair {
    pub epsilon: f64,
    /// Terminal capital of the blend(epsilon) account.
    pub blend_capital: f64,
    /// Terminal capital of the short-blend(epsilon) account.
    pub short_capital: f64,
    /// Rounds on which the short-blend gross return was nonpositive.
    pub short_guard_violations: u64,
}

/// Everything observable at the end of one play.
#[derive(Debug, Clone)]
pub struct PlayOutcome {
    pub config: GameConfig,
    /// Terminal Investor ledger.
    pub investor_capital: f64,
    /// Terminal index ledger.
    pub index_capital: f64,
    pub summary: MomentSummary,
    pub witnesses: Vec<WitnessPair>,
    pub split_capital: Option<f64>,
    pub split_guard_violations: u64,
    pub restriction: RestrictionFindings,
    /// Stochastic-market returns clamped to the domain floor.
    pub clamp_count: u64,
    /// The played return path, retained on request.
    pub returns: Option<Vec<ReturnVector>>,
}

impl PlayOutcome {
    /// Witness pair tracked for `epsilon`.
    pub fn witness(&self, epsilon: f64) -> Result<&WitnessPair> {
        self.witnesses
            .iter()
            .find(|w| w.epsilon == epsilon)
            .ok_or_else(|| Error::MissingLedger(format!("blend/short pair at epsilon {epsilon}")))
    }

    /// `ln(H_N / M_N)` for the blend witness at `epsilon`.
    pub fn blend_log_wealth_ratio(&self, epsilon: f64) -> Result<f64> {
        Ok((self.witness(epsilon)?.blend_capital / self.index_capital).ln())
    }

    /// `ln(H_N / M_N)` for the short-blend witness at `epsilon`.
    pub fn short_log_wealth_ratio(&self, epsilon: f64) -> Result<f64> {
        Ok((self.witness(epsilon)?.short_capital / self.index_capital).ln())
    }
}

/// Run one play: Investor, the protocol speculator (held at the index, so
/// its ledger replicates `M`), and Market move in order each round; the
/// witness ledgers advance on the exact induced-return identities.
pub fn run_play(spec: &PlaySpec, keep_path: bool) -> Result<PlayOutcome> {
    for &epsilon in &spec.epsilons {
        if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
            return Err(Error::EpsilonOutOfRange {
                value: epsilon,
                low: 0.0,
                high: 1.0 / 3.0,
            });
        }
    }

    let config = spec.config;
    let mut investor = spec.investor.player(&config);
    let mut market = spec.market.player(&config)?;
    let mut ledgers: Vec<(PolicyLedger, PolicyLedger)> = spec
        .epsilons
        .iter()
        .map(|&epsilon| {
            Ok((
                SpeculatorPolicy::Blend { epsilon }.ledger()?,
                SpeculatorPolicy::ShortBlend { epsilon }.ledger()?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut split = spec.split.as_ref().map(|p| p.ledger()).transpose()?;

    let mut state = new_game(config);
    let mut acc = MomentAccumulator::new(config.dt())?;
    let mut monitor = RestrictionMonitor::new(spec.thresholds, config.dt());
    let protocol_speculator = Weights::hold_index(config.total_securities());

    while !state.is_finished() {
        let g = investor.propose(&state)?;
        let x = market.propose(&state, &g, &protocol_speculator)?;
        let outcome = state.step(g, &protocol_speculator, x)?;
        let (s, m) = (outcome.investor_return, outcome.index_return);
        acc.update(s, m)?;
        monitor.update(s, m);
        for (blend, short) in &mut ledgers {
            blend.advance(s, m);
            short.advance(s, m);
        }
        if let Some(ledger) = &mut split {
            ledger.advance(s, m);
        }
    }

    let witnesses = spec
        .epsilons
        .iter()
        .zip(&ledgers)
        .map(|(&epsilon, (blend, short))| WitnessPair {
            epsilon,
            blend_capital: blend.capital(),
            short_capital: short.capital(),
            short_guard_violations: short.guard_violations(),
        })
        .collect();

    let returns = keep_path.then(|| {
        state
            .history()
            .rounds()
            .map(|(_, x)| ReturnVector::new(x.to_vec()).expect("history returns are valid"))
            .collect()
    });

    Ok(PlayOutcome {
        config,
        investor_capital: state.investor_capital(),
        index_capital: state.index_capital(),
        summary: acc.summarize()?,
        witnesses,
        split_capital: split.as_ref().map(|l| l.capital()),
        split_guard_violations: split.as_ref().map_or(0, |l| l.guard_violations()),
        restriction: monitor.findings(),
        clamp_count: market.clamp_count(),
        returns,
    })
}

/// Seeds for a batch of independent trials.
pub fn trial_seeds(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}

/// Run one job per seed, in input order. Uses the global thread pool when
/// the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn run_many<T, F>(seeds: &[u64], job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    seeds.par_iter().map(|&seed| job(seed)).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_many<T, F>(seeds: &[u64], job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    run_many_sequential(seeds, job)
}

/// Sequential reference driver; always available, used by the benchmarks as
/// the baseline and by callers that need to stay single threaded.
pub fn run_many_sequential<T, F>(seeds: &[u64], job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    seeds.iter().map(|&seed| job(seed)).collect()
}

/// Cap the global thread pool. A `None` or zero cap leaves the default.
/// Calling after the pool exists is a no-op.
#[cfg(feature = "parallel")]
pub fn init_thread_cap(max_threads: Option<usize>) {
    if let Some(n) = max_threads {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn init_thread_cap(_max_threads: Option<usize>) {}
