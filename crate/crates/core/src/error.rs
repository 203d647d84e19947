use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CascadeError {
    #[error("top index must be at least 1")]
    ZeroTopIndex,
    #[error("term {position}: index {index} breaks the contiguous run (expected {expected})")]
    NonContiguousIndex { position: usize, index: u64, expected: u64 },
    #[error("term {position}: value is below its index")]
    ValueBelowIndex { position: usize },
    #[error("term {position}: values must be strictly decreasing")]
    NotDecreasing { position: usize },
    #[error("shifting index {index} by {delta} drops below 1")]
    IndexUnderflow { index: u64, delta: i64 },
    #[error("rank r={r} is too small (need r >= 2)")]
    RankTooSmall { r: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("elements must be positive integers")]
    ZeroElement,
    #[error("duplicate element {0}")]
    DuplicateElement(u32),
    #[error("set has size {found}, family member size is {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("element does not fit in 32 bits")]
    ElementOverflow,
    #[error("rank out of range")]
    RankOutOfRange,
    #[error("shadow of a family of 0-sets is undefined")]
    EmptyMembers,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("member sizes incompatible: |A| members have size {a}, |B| members have size {b} (need a = b + 1)")]
    RankMismatch { a: usize, b: usize },
    #[error("k={k} out of range for r={r}")]
    BadThreshold { k: usize, r: usize },
    #[error("k=1 admits unboundedly many sets; the construction is only defined for k >= 2")]
    UnboundedConstruction,
    #[error(transparent)]
    Cascade(#[from] CascadeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IncidenceError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("configuration fails the cover condition: {violations} members of A contain fewer than {k} members of B")]
    CoverFailure { k: usize, violations: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("sets have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("this analysis requires k=3, hypergraph has k={0}")]
    WrongK(usize),
    #[error("configuration has no vertices")]
    NoVertices,
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
    #[error("core set has size {found}, expected r-k={expected}")]
    CoreSize { expected: usize, found: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path length must be at least {min}, got {got}")]
    LengthTooSmall { min: usize, got: usize },
    #[error("straight paths are only defined for 1 <= i <= k-1 (i={i}, k={k})")]
    LengthTooLarge { i: usize, k: usize },
    #[error("path space L_{length} has {estimate} elements, above the cap of {cap}")]
    TooLarge { length: usize, estimate: u128, cap: u128 },
    #[error("hypergraph has no edges")]
    Empty,
    #[error("not a valid path: {0}")]
    InvalidPath(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("exact answers are only known for k <= 2 (got k={0})")]
    KTooLarge(usize),
    #[error("k={0} is out of range for this bound")]
    BadK(usize),
    #[error("b must be at least 1")]
    ZeroB,
    #[error("cascade has top index {found}, expected k-1={expected}")]
    WrongTopIndex { expected: u64, found: u64 },
    #[error(transparent)]
    Cascade(#[from] CascadeError),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Family(#[from] FamilyError),
}
