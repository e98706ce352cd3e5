use thiserror::Error;

/// Errors produced by the game engine, statistics, and data loading.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game config: {0}")]
    InvalidConfig(String),

    #[error("weights must sum to 1 within 1e-12, got sum {sum}")]
    InvalidWeights { sum: f64 },

    #[error("weight component {index} is not finite: {value}")]
    NonFiniteWeight { index: usize, value: f64 },

    #[error("return component {index} is {value}; simple returns must be finite and > -1")]
    InvalidReturn { index: usize, value: f64 },

    #[error("expected {expected} securities, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("game already finished after {rounds} rounds")]
    GameFinished { rounds: usize },

    #[error("investor bankrupt at round {round}: portfolio gross return {gross} <= 0")]
    InvestorBankrupt { round: usize, gross: f64 },

    #[error("speculator gross return {gross} < 0 at round {round}; capital must stay nonnegative")]
    SpeculatorNegative { round: usize, gross: f64 },

    #[error("strategy `{strategy}` produced no move for round {round}")]
    StrategyExhausted { strategy: String, round: usize },

    #[error("per-round return {value} outside the domain (-1, inf)")]
    ReturnOutOfDomain { value: f64 },

    #[error("accumulator is empty; at least one round is required")]
    EmptyAccumulator,

    #[error("cannot merge accumulators with different round durations: {left} vs {right}")]
    DtMismatch { left: f64, right: f64 },

    #[error("epsilon {value} outside ({low}, {high})")]
    EpsilonOutOfRange { value: f64, low: f64, high: f64 },

    #[error("alpha must be positive, got {0}")]
    AlphaOutOfRange(f64),

    #[error("gamma is undefined for x <= -1, got {0}")]
    GammaOutOfDomain(f64),

    #[error("correlation matrix is not symmetric positive semidefinite")]
    NotPositiveSemidefinite,

    #[error("split weights must be positive and sum to 1, got sum {sum}")]
    InvalidSplit { sum: f64 },

    #[error("speculator ledger `{0}` was not tracked for this play")]
    MissingLedger(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Csv {
        path: String,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
