use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// Variants fall into two families: input problems (malformed text, letters
/// out of range, data that violates a precondition) and resource problems
/// (a guard or budget was hit before the computation could finish). The CLI
/// maps the first family to exit code 2 and the second to exit code 3.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("not self-similar: {0}")]
    NotSelfSimilar(String),

    #[error("state explosion: more than {bound} states reachable")]
    StateExplosion { bound: usize },

    #[error("evaluation budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for guard and budget failures, false for bad input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::StateExplosion { .. } | Error::BudgetExhausted { .. } | Error::SizeGuard(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
