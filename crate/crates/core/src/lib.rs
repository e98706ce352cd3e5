//! A deterministic game engine for capital asset pricing in game-theoretic
//! form: Investor, Speculator, and Market alternate moves over N rounds
//! while three capital ledgers compound. Streaming statistics over the play
//! produce the empirical pricing residual `mu_s - mu_m + sigma_m^2 -
//! sigma_sm` and the growth residual `lambda_s - lambda_m + sigma_{s-m}^2/2`,
//! and explicit third-order error bounds make both falsifiable on any finite
//! path: either a concrete witness speculator multiplies its capital by
//! `1/alpha` relative to the index, or the residual obeys its bound.
//!
//! Modules:
//! - [`protocol`]: the game state machine, capital ledgers, and restriction
//!   monitor.
//! - [`moments`]: mergeable compensated accumulators for all per-unit-time
//!   path statistics.
//! - [`strategies`]: investor policies, market models (seeded geometric
//!   Brownian motion, deterministic replay, adversarial alternation), and
//!   the blend / short-blend / split witness policies.
//! - [`bounds`]: the gamma/Gamma Taylor envelopes, the residual bounds they
//!   induce, witness verdicts, and the growth-residual sandwich.
//! - [`ingest`]: CSV return series loading, saving, and replay.
//! - [`sim`]: the single-pass play harness and the parallel batch driver.
//! - [`report`]: JSON and text reports.
//!
//! Batch runs are data parallel via `rayon` (feature `parallel`, enabled by
//! default); disabling the feature falls back to sequential execution with
//! identical results.

pub mod bounds;
pub mod error;
pub mod ingest;
pub mod moments;
pub mod protocol;
pub mod report;
pub mod sim;
pub mod strategies;

pub use bounds::{
    big_gamma, epsilon_grid, gamma, optimize_lower_bound, optimize_upper_bound,
    prop1_lower_bound, prop1_lower_envelope, prop1_upper_bound, prop1_upper_envelope,
    prop2_sandwich, verify_witness_lower, verify_witness_upper, OptimizedBound, SandwichGaps,
    WitnessCheck,
};
pub use error::{Error, Result};
pub use ingest::ReturnSeries;
pub use moments::{MomentAccumulator, MomentSummary};
pub use protocol::{
    new_game, run_game, GameConfig, GameState, RestrictionFindings, RestrictionMonitor,
    RestrictionThresholds, ReturnVector, Weights,
};
pub use report::{PredictionReport, RunReport};
pub use sim::{run_many, run_many_sequential, run_play, trial_seeds, PlayOutcome, PlaySpec};
pub use strategies::{
    blend_move, short_blend_move, GbmParams, InvestorPolicy, MarketModel, PolicyLedger,
    SpeculatorPolicy,
};
