use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("invalid vertex `{0}`")]
    InvalidVertex(String),
    #[error("vertex {0} is not in the transversal")]
    NotInTransversal(String),
    #[error("not a transversal: {0}")]
    NotTransversal(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown generator symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid group definition: {0}")]
    InvalidGroup(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("permutation error: {0}")]
    InvalidPerm(String),
    #[error("element is not in the ambient group")]
    NotInGroup,
    #[error("generator {0} moves vertex {1}")]
    MovesVertex(usize, String),
    #[error("supports overlap: {0} and {1} are not orthogonal")]
    Overlap(String, String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("certificate has unresolved vertices")]
    Uncertified,
    #[error("vertex {0} is not in the certified support")]
    NotInSupport(String),
    #[error("homomorphism error: {0}")]
    Hom(String),
    #[error("not a subdirect product")]
    NotSubdirect,
    #[error("order cap exceeded ({0})")]
    OrderCap(usize),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
