use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in cyclotomic field")]
    DivisionByZero,
    #[error("cyclotomic order {order} exceeds the bound {bound}")]
    OrderTooLarge { order: u64, bound: u64 },
    #[error("square root of non-positive integer {0}")]
    NonPositiveSqrt(i64),
    #[error("cannot parse genus symbol {input:?}: {reason}")]
    SymbolParse { input: String, reason: String },
    #[error("inconsistent genus symbol {symbol}: {reason}")]
    InconsistentSymbol { symbol: String, reason: String },
    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),
    #[error("invalid discriminant form data: {0}")]
    InvalidForm(String),
    #[error("group of order {order} exceeds the enumeration bound {bound}")]
    OrderBoundExceeded { order: u64, bound: u64 },
    #[error("level {level} exceeds the coset enumeration bound {bound}")]
    LevelBoundExceeded { level: u64, bound: u64 },
    #[error("representation requires even signature, found {0}")]
    OddSignature(u8),
    #[error("{a} is not coprime to the level {level}")]
    NotCoprime { a: i64, level: u64 },
    #[error("matrix has determinant {0}, expected 1")]
    NotSl2(i64),
    #[error("no closed form available: {0}")]
    NoClosedForm(String),
    #[error("no fundamental form for p = {p}, square class {square_class}, signature {signature}")]
    NoFundamentalForm {
        p: u64,
        square_class: &'static str,
        signature: u8,
    },
    #[error("element is not in the required subset: {0}")]
    NotInSubset(String),
    #[error("subgroup is not isotropic")]
    NotIsotropic,
    #[error("cusp ({a}, {c}) does not have order {level}")]
    BadCusp { a: i64, c: i64, level: u64 },
    #[error("precision {0} exceeds the enumeration bound")]
    PrecisionTooLarge(u64),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "division_by_zero",
            Error::OrderTooLarge { .. } => "cyclo_order_overflow",
            Error::NonPositiveSqrt(_) => "non_positive_sqrt",
            Error::SymbolParse { .. } => "parse_error",
            Error::InconsistentSymbol { .. } => "inconsistent_symbol",
            Error::InvalidGram(_) => "invalid_gram",
            Error::InvalidForm(_) => "invalid_form",
            Error::OrderBoundExceeded { .. } => "order_bound_exceeded",
            Error::LevelBoundExceeded { .. } => "level_bound_exceeded",
            Error::OddSignature(_) => "odd_signature",
            Error::NotCoprime { .. } => "not_coprime",
            Error::NotSl2(_) => "not_sl2",
            Error::NoClosedForm(_) => "no_closed_form",
            Error::NoFundamentalForm { .. } => "no_fundamental_form",
            Error::NotInSubset(_) => "not_in_subset",
            Error::NotIsotropic => "not_isotropic",
            Error::BadCusp { .. } => "bad_cusp",
            Error::PrecisionTooLarge(_) => "precision_too_large",
            Error::Internal(_) => "internal_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
