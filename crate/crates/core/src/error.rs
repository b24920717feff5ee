use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("unknown symbol `{0}` for this alphabet")]
    Alphabet(String),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("undeclared generator `{0}`")]
    UndeclaredGenerator(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Coset enumeration needed more live cosets than allowed.
    #[error("coset enumeration overflow: more than {budget} live cosets (increase the budget or shrink the instance)")]
    Overflow { budget: usize },

    /// An element-set computation was refused because the group is larger than the guard.
    #[error("group order exceeds the guard of {guard} elements")]
    Guard { guard: usize },

    #[error("group is not {0}-Engel within the cap")]
    NotEngel(usize),

    #[error("relator index {index} out of range ({count} relators)")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("invalid lifting data: {0}")]
    InvalidLifting(String),

    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),

    /// A structural assertion failed; `witness` holds a minimal counterexample trace.
    #[error("check `{check}` failed: {witness}")]
    CheckFailed { check: String, witness: String },

    #[error("oracle returned an undecided verdict; partial result: {0:?}")]
    PartialResult(Vec<usize>),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
