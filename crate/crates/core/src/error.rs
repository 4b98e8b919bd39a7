use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: expected {expected}, found {found}")]
    Syntax {
        offset: usize,
        expected: String,
        found: String,
    },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: &'static str },

    #[error("center hypothesis violated: {0}")]
    CenterHypothesisViolated(String),

    #[error("energy {energy} outside the admissible window (0, {ceiling})")]
    EnergyOutOfRange { energy: f64, ceiling: f64 },

    #[error("quadrature did not converge (estimate {estimate:e}, tolerance {tolerance:e})")]
    QuadratureNonConvergence { estimate: f64, tolerance: f64 },

    #[error("branch inversion failed for r = {r}")]
    InversionFailure { r: f64 },

    #[error("ODE integration failed: {0}")]
    IntegrationFailure(&'static str),

    #[error("V' vanishes at x = {x}, away from the origin")]
    DegenerateCritical { x: f64 },

    #[error("guard violated at x = {x}: W = {w:e}")]
    GuardViolation { x: f64, w: f64 },

    #[error("system is not conservative: f({x}) = {f}")]
    NotConservative { x: f64, f: f64 },

    #[error("function is not even: f({x}) != f({neg_x})", neg_x = -x)]
    NotEven { x: f64 },

    #[error("function is not positive: f({x}) = {value}")]
    NotPositive { x: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

impl Error {
    pub(crate) fn domain(subexpr: impl Into<String>, reason: &'static str) -> Self {
        Error::Domain {
            subexpr: subexpr.into(),
            reason,
        }
    }

    /// True for errors caused by malformed expression text.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Syntax { .. } | Error::UnknownIdentifier { .. })
    }

    /// True for violations of the modelling hypotheses: no center at the
    /// origin, or a coefficient that is required to be even and positive
    /// but is not.
    pub fn is_hypothesis_error(&self) -> bool {
        matches!(
            self,
            Error::CenterHypothesisViolated(_)
                | Error::NotEven { .. }
                | Error::NotPositive { .. }
                | Error::NotConservative { .. }
        )
    }
}
