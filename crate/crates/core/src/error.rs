use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument is outside its documented domain.
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// Two inputs that must describe the same grid or length do not.
    LengthMismatch { expected: usize, found: usize },
    /// Objects built for different grids were combined.
    GridMismatch,
    /// Energy sits exactly on a grid point where the requested quantity
    /// does not exist (the response collapses to a single point).
    OnGrid { energy: f64 },
    /// The requested tail is identically zero to working precision.
    DegenerateTail,
    /// The window kind has no closed form for the requested quantity.
    NoClosedForm,
    /// A filter configuration leaves no room for a target interval.
    EmptyTarget,
    /// Input list was empty where at least one element is required.
    Empty(&'static str),
    /// Post-selection kept nothing.
    EmptyPostSelection,
    /// The LP solver stopped without reaching its tolerance.
    SolverFailure { iterations: usize },
    /// Fewer fitting points than the polynomial degree being fitted.
    TooFewSamples { samples: usize, degree: usize },
    /// Degree search hit its cap without a certified fit.
    NoFitFound { max_degree: usize },
    /// A resource cap of the brute-force oracle was exceeded.
    ResourceCap { what: &'static str, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfRange {
                name,
                value,
                expected,
            } => write!(f, "{name} = {value} is out of range (expected {expected})"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::GridMismatch => f.write_str("inputs were built for different grids"),
            Error::OnGrid { energy } => write!(f, "energy {energy} lies on a grid point"),
            Error::DegenerateTail => f.write_str("tail probabilities vanish to working precision"),
            Error::NoClosedForm => f.write_str("window kind has no closed form"),
            Error::EmptyTarget => f.write_str("target energy interval is empty"),
            Error::Empty(what) => write!(f, "empty {what}"),
            Error::EmptyPostSelection => f.write_str("post-selection kept zero probability"),
            Error::SolverFailure { iterations } => {
                write!(
                    f,
                    "LP solver did not converge after {iterations} iterations"
                )
            }
            Error::TooFewSamples { samples, degree } => write!(
                f,
                "{samples} fitting points are fewer than the degree {degree}"
            ),
            Error::NoFitFound { max_degree } => {
                write!(f, "no certified polynomial up to degree {max_degree}")
            }
            Error::ResourceCap { what, limit } => write!(f, "{what} exceeds the cap of {limit}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn out_of_range(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::OutOfRange {
        name,
        value,
        expected,
    }
}
