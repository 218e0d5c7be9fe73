use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{}", describe_parse(*.component, .error))]
    Parse {
        component: Option<usize>,
        error: ParseError,
    },
    /// Malformed input: bad grid, shape mismatch, out-of-range parameter.
    #[error("{0}")]
    Invalid(String),
    /// The operation is not defined for the object it was given.
    #[error("{0}")]
    Unsupported(String),
    /// An analytic path was requested on an object without equations.
    #[error("{0}")]
    MissingExpr(String),
    #[error("internal error: {0}")]
    Internal(String),
}

fn describe_parse(component: Option<usize>, error: &ParseError) -> String {
    match component {
        Some(i) => format!("component {}: {error}", i + 1),
        None => error.to_string(),
    }
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::Invalid(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Error {
        Error::Unsupported(msg.into())
    }

    pub fn missing_expr(msg: impl Into<String>) -> Error {
        Error::MissingExpr(msg.into())
    }

    /// Whether the caller is at fault (as opposed to a bug here).
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }

    pub fn parse_error(&self) -> Option<&ParseError> {
        match self {
            Error::Parse { error, .. } => Some(error),
            _ => None,
        }
    }
}

impl From<ParseError> for Error {
    fn from(error: ParseError) -> Self {
        Error::Parse {
            component: None,
            error,
        }
    }
}
