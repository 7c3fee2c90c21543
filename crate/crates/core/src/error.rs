use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    /// The energy has imaginary status where a real value is required.
    #[error("energy is imaginary for this state (radicand {radicand:e})")]
    ImaginaryEnergy { radicand: f64 },

    /// A square root in the termination condition has a negative argument.
    #[error("complex branch: {what} = {value:e} < 0")]
    ComplexBranch { what: &'static str, value: f64 },

    #[error("integration failure at x = {at}: {reason}")]
    Integration { at: f64, reason: String },

    #[error("pole in mu(r) + E - V(r) near r = {r}")]
    Pole { r: f64 },

    #[error("degenerate function: norm integral is {norm:e}")]
    DegenerateNorm { norm: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("parameter error: {0}")]
    Parameter(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: impl num_traits::ToPrimitive) -> Self {
        Error::Domain {
            what,
            value: value.to_f64().unwrap_or(f64::NAN),
        }
    }
}
