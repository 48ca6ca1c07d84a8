use thiserror::Error;

/// Errors raised by the scheduling library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("negative power {0} is outside the rate law's domain")]
    NegativePower(f64),

    #[error("negative rate {0} has no inverse power")]
    NegativeRate(f64),

    #[error("negative energy budget {0}")]
    NegativeBudget(f64),

    #[error("slot {slot}: power {power} over tau needs {needed} J but battery holds {available} J")]
    InfeasibleEnergy {
        slot: usize,
        power: f64,
        needed: f64,
        available: f64,
    },

    #[error("slot {slot}: rate {rate} exceeds queue length {queue}")]
    InfeasibleRate { slot: usize, rate: f64, queue: f64 },

    #[error("slot {slot} is outside the horizon of {horizon} slots")]
    SlotOutOfRange { slot: usize, horizon: usize },

    #[error("interference data (rho, g11, g21) is required for the ISR-constrained problem")]
    MissingInterferenceData,

    #[error("invalid scenario: {0}")]
    InvalidConfig(String),

    #[error("oracle refuses horizon {slots}: at most {max_slots} slots are enumerable")]
    OracleRefused { slots: usize, max_slots: usize },

    #[error("unknown numerical example {0} (expected 1 or 2)")]
    UnknownExample(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
