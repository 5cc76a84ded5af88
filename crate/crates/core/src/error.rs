use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite or out-of-domain input: {0}")]
    Domain(String),

    #[error("closed form requires the oscillatory band, got beta = {beta}")]
    Regime { beta: f64 },

    #[error("packet is not normalizable: {0}")]
    NonNormalizable(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("line cannot survive a single plane (g_tilde = {g_tilde} <= -2)")]
    ImmediateDeath { g_tilde: f64 },

    /// The partition function ceased to exist at plane `n_star + 1`.
    #[error("line destroyed after plane {n_star}")]
    LineDead { n_star: usize },

    /// The partition function exists but the end-point density at plane `n`
    /// cannot be normalized (q_n <= q_{n-1}).
    #[error("end-point density at plane {n} is not normalizable")]
    Unnormalizable { n: usize },

    #[error("tuned compensation needs chi in (0, 1), got {chi}")]
    NoCompensation { chi: f64 },

    #[error("grid too narrow at step {step}: boundary/peak = {ratio:e}, try half_width >= {suggested_half_width}")]
    GridLeak {
        step: usize,
        ratio: f64,
        suggested_half_width: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {value}")))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {value}")))
    }
}
