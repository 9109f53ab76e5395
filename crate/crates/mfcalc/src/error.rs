use std::fmt;

/// Library-wide error type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    BadRing(String),
    BadRingMap(String),
    RingMismatch,
    UnknownVariable(String),
    UngradedRing,
    Parse(String),
    DimensionMismatch(String),
    PotentialMismatch(String),
    Validation(String),
    /// Pushforward basis does not span: rewriting an element failed.
    NotFiniteOverTarget(String),
    /// No eligible c·(u − g) entry when eliminating a variable.
    SupportViolated(String),
    /// eliminate_variable refused: the potential involves the variable.
    PotentialInvolvesVariable(String),
    CertificateFailed(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BadRing(m) => write!(f, "bad ring: {m}"),
            Error::BadRingMap(m) => write!(f, "bad ring map: {m}"),
            Error::RingMismatch => write!(f, "ring mismatch"),
            Error::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            Error::UngradedRing => write!(f, "operation requires a graded ring"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            Error::PotentialMismatch(m) => write!(f, "potential mismatch: {m}"),
            Error::Validation(m) => write!(f, "validation failed: {m}"),
            Error::NotFiniteOverTarget(m) => write!(f, "not finite over target: {m}"),
            Error::SupportViolated(m) => write!(f, "support condition violated: {m}"),
            Error::PotentialInvolvesVariable(v) => {
                write!(f, "refused: potential involves `{v}`")
            }
            Error::CertificateFailed(m) => write!(f, "certificate verification failed: {m}"),
        }
    }
}

impl std::error::Error for Error {}
