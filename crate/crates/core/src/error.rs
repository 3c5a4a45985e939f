use std::fmt;

/// Which hypothesis of the `g·ℓ + h` construction failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    HIsZero,
    GDividesH,
    GNotSquareFreeSupported,
    HNotSquareFreeSupported,
    GNotHomogeneous,
    HNotHomogeneous,
    DegreeMismatch,
    GReducible,
    EllLength,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Hypothesis::HIsZero => "h must be nonzero",
            Hypothesis::GDividesH => "g must not divide h",
            Hypothesis::GNotSquareFreeSupported => "g must be square-free supported",
            Hypothesis::HNotSquareFreeSupported => "h must be square-free supported",
            Hypothesis::GNotHomogeneous => "g must be homogeneous",
            Hypothesis::HNotHomogeneous => "h must be homogeneous",
            Hypothesis::DegreeMismatch => "deg(h) must equal deg(g) + 1",
            Hypothesis::GReducible => "g must be irreducible",
            Hypothesis::EllLength => "ell must have one coefficient per variable",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} outside 1..=4")]
    DegreeOutOfRange(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalar is not an element of this field")]
    FieldMismatch,
    #[error("operands live in different polynomial rings")]
    ContextMismatch,
    #[error("zero polynomial where a nonzero one is required")]
    ZeroInput,
    #[error("variable index {index} out of range ({len} variables)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("polynomial is not divisible")]
    NotDivisible,
    #[error("variable name `{0}` already in use")]
    NameCollision(String),
    #[error("exponent would exceed 2^16 - 1")]
    ExponentOverflow,
    #[error("not square-free supported (offending monomial {0})")]
    NotSquareFreeSupported(String),
    #[error("polynomial is zero or constant")]
    ZeroOrConstant,
    #[error("leading polynomial of the degree-one presentation is zero")]
    ZeroLeading,
    #[error("multiplier lies in a minimal prime of the ideal")]
    MultiplierInMinimalPrime,
    #[error("no regularity certificate found at stage {stage} within e_max = {e_max}")]
    CertificateSearchExhausted { stage: usize, e_max: u32 },
    #[error("point is not on the hypersurface")]
    PointNotOnHypersurface,
    #[error("point is not on the variety")]
    PointNotOnVariety,
    #[error("search budget exceeded")]
    BudgetExceeded,
    #[error("not F-split at e = {e} (f^(q-1) lies in the bracket power)")]
    NotSplit { e: u32 },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown variable `{name}` at line {line}, column {column}")]
    UnknownVariable { name: String, line: usize, column: usize },
    #[error("bad field header: {0}")]
    BadFieldSpec(String),
    #[error("matroid has no bases")]
    EmptyBases,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(Hypothesis),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed report data: {0}")]
    Decode(String),
    #[error("field of order {0} is too large for exhaustive search")]
    FieldTooLarge(u128),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
