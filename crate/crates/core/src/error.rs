use thiserror::Error;

/// Errors shared across the market model and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {value} violates {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("invalid price {0}: prices must be positive and finite")]
    InvalidPrice(f64),

    #[error("invalid allocation: {reason} (total={total}, small={small}, floor={floor})")]
    InvalidAllocation {
        reason: &'static str,
        total: f64,
        small: f64,
        floor: f64,
    },

    #[error("invalid floor {floor}: must lie in [0, {total}]")]
    InvalidFloor { floor: f64, total: f64 },

    #[error("no macro capacity: mobile users cannot be served")]
    NoMacroCapacity,

    #[error("degenerate per-user rates (small-cell {rate_small}, macro {rate_macro})")]
    DegenerateRates { rate_small: f64, rate_macro: f64 },

    #[error("best-response iteration did not converge after {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: usize, last_step: f64 },

    #[error("first-order check failed for SP {sp}: residual {residual:e} exceeds tolerance {tolerance:e}")]
    KktViolation {
        sp: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("inconsistent equilibrium: {0}")]
    InconsistentResult(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
