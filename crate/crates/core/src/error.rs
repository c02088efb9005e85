use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0:?} is reducible over F3")]
    ReducibleModulus(Vec<u8>),
    #[error("modulus {0:?} is not a monic polynomial of the requested degree")]
    MalformedModulus(Vec<u8>),
    #[error("no default modulus for r = {0}; supply one explicitly")]
    UnsupportedDegree(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid generator: {0}")]
    InvalidGenSpec(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("subgroup product is not a group: {0}")]
    NotAProductGroup(String),
    #[error("index exceeds limit {limit}")]
    IndexOverflow { limit: u64 },
    #[error("group order {order} exceeds enumeration cap {cap}; use claimed-value verification")]
    CapExceeded { order: String, cap: String },
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown lemma clause {0}")]
    UnknownLemma(String),
    #[error("claim mismatch: {0}")]
    ClaimMismatch(String),
    #[error("refusing to run at this scale: {0}")]
    ScaleRefused(String),
    #[error("ball radius {have} too small, need {need}")]
    RadiusTooSmall { have: usize, need: usize },
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
