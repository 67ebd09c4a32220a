use thiserror::Error;

/// Errors raised by the numerical routines and the experiment front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{context}: no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        context: String,
        iterations: usize,
        residual: f64,
    },

    #[error("no Brezis-Haraux evaluator for operator `{0}` (needs a closed form or a graph sampler)")]
    NoEvaluator(String),

    #[error("no conjugate oracle for function `{0}`")]
    NoConjugate(String),

    #[error("iterates diverged beyond norm {norm:.3e}: the infimum is -infinity")]
    Unbounded { norm: f64 },

    #[error("step size {step:.3e} too large: backtracking failed")]
    StepTooLarge { step: f64 },

    #[error("starting point is at distance {distance:.3e} from the initial set")]
    InfeasibleStart { distance: f64 },

    #[error("schedule `{name}` is not positive at t = {t}")]
    NonPositiveSchedule { name: String, t: f64 },

    #[error("operation not supported for set shape `{0}`")]
    UnsupportedSetShape(String),

    #[error("forcing term has mean {mean:.3e}, expected zero")]
    NonZeroMeanForcing { mean: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("step {step} (t = {t}): {source}")]
    AtStep {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_step(self, step: usize, t: f64) -> Self {
        Error::AtStep {
            step,
            t,
            source: Box::new(self),
        }
    }

    /// The innermost error, with step annotations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_) | Error::InvalidParameter(_) | Error::NonZeroMeanForcing { .. } => 2,
            Error::Io(_) => 4,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
