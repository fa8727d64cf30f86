use std::fmt;

/// Standing assumptions a configuration can violate. Used to name the broken
/// constraint in diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// Every integrand admits a Busemann subgradient at every point of `C`.
    A1,
    /// A uniform bound `L` on the speed of every oracle output.
    A2,
    /// Oracle outputs are a deterministic (hence measurable) function of the inputs.
    A3,
    /// Step-size conditions for the experiment in question.
    Par,
    /// Feasibility of the starting point and of the constraint set.
    Feasibility,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Assumption::A1 => "(A1) subdifferentiability",
            Assumption::A2 => "(A2) speed bound",
            Assumption::A3 => "(A3) oracle determinism",
            Assumption::Par => "(Par) step-size conditions",
            Assumption::Feasibility => "feasibility",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point or direction belongs to a different space: {0}")]
    SpaceMismatch(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid configuration, violates {assumption}: {message}")]
    Config { assumption: Assumption, message: String },

    /// Supplied data does not satisfy the hypotheses of the check it was fed to.
    #[error("input does not satisfy the hypotheses: {0}")]
    Input(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn config(assumption: Assumption, msg: impl Into<String>) -> Self {
        Error::Config {
            assumption,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
