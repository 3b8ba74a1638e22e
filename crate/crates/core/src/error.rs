use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("table is not {expected}x{expected}: {detail}")]
    DimensionMismatch { expected: usize, detail: String },
    #[error("entry {value} at ({row}, {col}) is outside 0..{order}")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("magma is not a left quasigroup")]
    NotLeftQuasigroup,
    #[error("magma is not a quasigroup")]
    NotQuasigroup,
    #[error("no square root of {0} found within the order of its left translation")]
    NoSquareRoot(usize),
    #[error("magma is not a rumple")]
    NotRumple,
    #[error("magma is not a latin rumple")]
    NotLatinRumple,
    #[error("magma is not a both-sided rumple")]
    NotBothSided,
    #[error("magma is not a rack")]
    NotRack,
    #[error("table is not a group: {0}")]
    NotAGroup(String),
    #[error("group closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("first group is not a subgroup of the second")]
    NotSubgroup,
    #[error("permutations have mismatched degrees ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("solution is not left nondegenerate")]
    NotLeftNondegenerate,
    #[error("solution is not a birack")]
    NotBirack,
    #[error("matrix is not compatible with the group factors: {0}")]
    IncompatibleMatrix(String),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("size bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("prime {p} does not divide {n}")]
    CharMismatch { n: usize, p: usize },
    #[error("circulant matrix is singular (coefficient sum vanishes mod p)")]
    SingularB,
    #[error("invalid extension datum: {0}")]
    InvalidExtension(String),
    #[error("endomorphisms violate [phi, psi] = phi^2")]
    RumpConditionFails,
    #[error("base magma must be a nontrivial affine latin rumple")]
    BaseNotAffineLatin,
    #[error("search node cap of {0} exceeded")]
    NodeCapExceeded(u64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
