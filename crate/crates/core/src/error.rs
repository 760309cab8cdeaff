use thiserror::Error;

/// Errors raised by the simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its declared range.
    #[error("invalid {name}: {requirement} (got {value})")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    /// Structural validation failure (shapes, normalisation, grids).
    #[error("{0}")]
    Validation(String),

    /// The squeezed closed forms are only stated for `t > 2a`.
    #[error("closed-form kernel requires t > 2a = {bound} (got t = {t}); use the exact temperature mode")]
    ClosedFormDomain { t: f64, bound: f64 },

    /// A closed form was requested for a temperature mode it does not cover.
    #[error("{what} requires temperature mode {required}")]
    WrongTemperatureMode {
        what: &'static str,
        required: &'static str,
    },

    #[error("quadrature did not converge: error estimate {achieved:.3e} above tolerance {requested:.3e} after {evaluations} evaluations")]
    Quadrature {
        achieved: f64,
        requested: f64,
        evaluations: usize,
    },

    #[error("integrand evaluated to a non-finite value at x = {at}")]
    NonFiniteIntegrand { at: f64 },

    /// Fock-space or population truncation lost more weight than allowed.
    #[error("truncation defect {defect:.3e} exceeds tolerance {tolerance:.3e}{}", hint(*.required))]
    Truncation {
        defect: f64,
        tolerance: f64,
        required: Option<usize>,
    },

    #[error("composite dimension {dimension} exceeds the configured cap {cap}")]
    DimensionCap { dimension: usize, cap: usize },

    /// Separation constant outside the range giving a real exponent.
    #[error("separation constant {alpha} exceeds omega^2/(4 A1) = {bound}; the exponent B would be complex")]
    ComplexExponent { alpha: f64, bound: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn hint(required: Option<usize>) -> String {
    match required {
        Some(n) => format!(" (n_max >= {n} required)"),
        None => String::new(),
    }
}

impl Error {
    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::NonFiniteIntegrand { .. }
                | Error::Truncation { .. } | Error::DimensionCap { .. }
        )
    }

    pub(crate) fn invalid(name: &'static str, requirement: &'static str, value: f64) -> Self {
        Error::InvalidParameter {
            name,
            requirement,
            value,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
