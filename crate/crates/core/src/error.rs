use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gamma function has a pole at {0}")]
    GammaPole(String),

    #[error("incomplete gamma function is undefined at z = 0 for Re(a) <= 0")]
    IncompleteGammaOrigin,

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("pole of the resummation function at X = {0}")]
    ResummationPole(String),

    #[error("x = {x} lies outside the sector |arg z| < {limit} required by {what}")]
    SectorViolation {
        what: &'static str,
        x: String,
        limit: String,
    },

    #[error("|z| = {0} is too small for an asymptotic evaluation")]
    TooClose(String),

    #[error("x = {0} is a branch point of x^mu; continuation cannot pass through it")]
    BranchPoint(String),

    #[error("step of size {step} exceeds a third of the estimated convergence radius {radius}")]
    StepTooLarge { step: String, radius: String },

    #[error("solution blew up near x = {0}; a singularity is too close to the path")]
    SingularityProximity(String),

    #[error("Pade system of order [{l}/{m}] is singular")]
    SingularPadeSystem { l: usize, m: usize },

    #[error("no roots of the pole equation in the requested window")]
    NoRootsInWindow,

    #[error("the h-residue functional is only defined for mu = 1")]
    HResidueRequiresMuOne,

    #[error("contour sum is not stabilising under node doubling (difference {0})")]
    NonAnalytic(String),

    #[error("infeasible Borel bound: {0}")]
    InfeasibleBound(String),

    #[error("reference data: {0}")]
    Reference(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
