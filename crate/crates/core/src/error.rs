use thiserror::Error;

/// Errors raised while constructing or evaluating a family member.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PfCmeError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The peak mass `m^r` does not fit the working precision.
    #[error("capacity error: m^r = {m}^{r} exceeds the {scalar} limit (ln(m^r) = {log_mass:.3} > {limit:.3})")]
    Capacity {
        m: usize,
        r: u32,
        scalar: &'static str,
        log_mass: f64,
        limit: f64,
    },

    /// A non-finite value appeared in an intermediate result.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Grid doubling did not reproduce a quadrature result.
    #[error("quadrature did not converge: {what} changed by {change:.3e} under grid doubling (limit {limit:.1e})")]
    Convergence {
        what: &'static str,
        change: f64,
        limit: f64,
    },
}

pub type Result<T> = std::result::Result<T, PfCmeError>;
