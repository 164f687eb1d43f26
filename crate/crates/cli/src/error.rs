use cone_ends::Error;
use std::fmt;

/// Failure of a run, classified by exit code: 2 validation or domain,
/// 3 I/O or parse, 4 invariant violation found mid-run.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("error[{code}]: {message}")]
    Validation { code: String, message: String },
    #[error("error[{code}]: {message}")]
    Io { code: String, message: String },
    #[error("error[{code}]: {message}")]
    Invariant { code: String, message: String },
}

impl CliError {
    pub fn validation(code: &str, message: impl fmt::Display) -> Self {
        CliError::Validation { code: code.into(), message: message.to_string() }
    }

    pub fn io(code: &str, message: impl fmt::Display) -> Self {
        CliError::Io { code: code.into(), message: message.to_string() }
    }

    pub fn invariant(code: &str, message: impl fmt::Display) -> Self {
        CliError::Invariant { code: code.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Invariant { .. } => 4,
        }
    }

    pub fn code(&self) -> &str {
        match self {
            CliError::Validation { code, .. } | CliError::Io { code, .. } | CliError::Invariant { code, .. } => code,
        }
    }
}

/// Module-qualified code of a library error.
pub fn library_code(e: &Error) -> &'static str {
    match e {
        Error::DegenerateAxis => "geom/degenerate-axis",
        Error::SingularMatrix(_) => "geom/singular-matrix",
        Error::OutOfDomain(_) => "geom/out-of-domain",
        Error::NotPositiveDefinite { .. } => "fields/not-positive-definite",
        Error::SingularMorphism { .. } => "fields/singular-morphism",
        Error::NotSelfAdjoint { .. } => "fields/not-self-adjoint",
        Error::AtlasMismatch(_) => "fields/atlas-mismatch",
        Error::InvalidAtlas(_) => "fields/invalid-atlas",
        Error::InvalidSignature(_) => "fields/invalid-signature",
        Error::InvalidDifferential(_) => "infinity/invalid-differential",
        Error::RejectedDatum(_) => "infinity/rejected-datum",
        Error::SingularLeaf { .. } => "family/singular-leaf",
        Error::OutOfRange { .. } => "foliation/out-of-range",
        Error::NoConvergence { .. } => "foliation/no-convergence",
        Error::RejectedInput(_) => "foliation/rejected-input",
        Error::SingularPush => "foliation/singular-push",
        Error::InvalidWord(_) => "grafting/invalid-word",
        Error::InvalidRepresentation(_) => "grafting/invalid-representation",
        Error::InvalidMulticurve(_) => "grafting/invalid-multicurve",
        Error::CriticalPoint(_) => "schwarzian/critical-point",
        Error::InvalidGerm(_) => "schwarzian/invalid-germ",
        Error::Domain(_) => "domain",
        Error::Parse(_) => "parse",
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = library_code(&e);
        match e {
            Error::Parse(_) => CliError::io(code, e),
            Error::NoConvergence { .. } | Error::SingularLeaf { .. } => CliError::invariant(code, e),
            _ => CliError::validation(code, e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        let code = |e: Error| CliError::from(e).exit_code();
        assert_eq!(code(Error::InvalidDifferential("x".into())), 2);
        assert_eq!(code(Error::OutOfRange { k: -2.0, lo: -1.0, hi: 0.0 }), 2);
        assert_eq!(code(Error::Parse("x".into())), 3);
        assert_eq!(code(Error::NoConvergence { chart: "c".into(), history: vec![] }), 4);
        let e = CliError::from(Error::InvalidDifferential("pole".into()));
        assert_eq!(e.code(), "infinity/invalid-differential");
        assert!(e.to_string().starts_with("error[infinity/invalid-differential]"));
    }
}
