use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("guard exceeded: {what} is {size}, limit {limit}{hint}")]
    Guard {
        what: &'static str,
        size: usize,
        limit: usize,
        hint: &'static str,
    },
    #[error(transparent)]
    Library(#[from] hitrun::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Exit status for an invariant failure.
pub const INVARIANT_FAILURE: u8 = 3;

impl CliError {
    /// 2 invalid config, 3 invariant failure, 4 guard exceeded, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        use hitrun::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Guard { .. } => 4,
            CliError::Library(e) => match e {
                E::GuardExceeded { .. } => 4,
                E::SizeMismatch { .. }
                | E::IndexOutOfRange { .. }
                | E::NotAPermutation { .. }
                | E::InvalidParameter(_)
                | E::EmptyTuple
                | E::GroupMismatch
                | E::CaseSelection { .. }
                | E::Parse(_) => 2,
                E::NotSymmetric { .. }
                | E::NotStochastic { .. }
                | E::NotConverged { .. }
                | E::NotLumpable { .. }
                | E::WordMismatch { .. }
                | E::CurveMismatch(_)
                | E::Json(_) => INVARIANT_FAILURE,
            },
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        let guard = hitrun::Error::GuardExceeded {
            what: "states",
            size: 2,
            limit: 1,
        };
        assert_eq!(CliError::from(guard).exit_code(), 4);
        let lump = hitrun::Error::NotLumpable { residual: 1.0 };
        assert_eq!(CliError::from(lump).exit_code(), 3);
        assert_eq!(
            CliError::from(hitrun::Error::InvalidParameter("n".into())).exit_code(),
            2
        );
    }
}
