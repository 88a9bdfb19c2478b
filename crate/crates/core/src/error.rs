use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("speed bound violated: v_max/c = {ratio} must be < 1")]
    Superluminal { ratio: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("retarded-time solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("observer coincides with the charge at the retarded time")]
    ObserverOnCharge,

    #[error("charge passes within {distance:e} of the observer on the integration interval")]
    ChargeCrossesObserver { distance: f64 },

    #[error("grid axis {axis} has {nodes} nodes; at least 5 are required")]
    GridTooSmall { axis: usize, nodes: usize },

    #[error("grid node {index} coincides with the source point")]
    NodeOnSource { index: usize },

    #[error("values change sign inside the fit window")]
    SignChange,

    #[error("degenerate fit input: {0}")]
    DegenerateInput(String),

    #[error("Richardson extrapolation diverged")]
    ExtrapolationDiverged,

    #[error("{0}")]
    Parse(String),

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("too few rows: {found} (need at least {needed})")]
    TooFewRows { found: usize, needed: usize },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
