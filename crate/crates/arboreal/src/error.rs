use thiserror::Error;

/// Errors across the crate. Domain errors signal rejected inputs; integrity
/// errors signal that a verified mathematical invariant failed to hold, which
/// means either corrupted data or a bug.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("depth {depth} outside supported range 1..={max}")]
    DepthOutOfRange { depth: u32, max: u32 },

    #[error("depth mismatch: {left} vs {right}")]
    DepthMismatch { left: u32, right: u32 },

    #[error("node level {level} exceeds limit {limit}")]
    LevelOutOfRange { level: u32, limit: u32 },

    #[error("path {path:#x} does not fit in level {level}")]
    PathOutOfRange { path: u64, level: u32 },

    #[error("invalid word character {0:?} (expected 'a' or 'b')")]
    BadWordCharacter(char),

    #[error("restriction level {m} outside 1..={depth}")]
    RestrictionOutOfRange { m: u32, depth: u32 },

    #[error("period r must be at least 1")]
    ZeroPeriod,

    #[error("generator index {i} outside 1..={r}")]
    GeneratorIndexOutOfRange { i: u32, r: u32 },

    #[error("closure exceeded cap {cap} ({partial} elements reached)")]
    ClosureCapExceeded { cap: u64, partial: u64 },

    #[error("exhaustive enumeration limited to depth {max}, got {depth}")]
    EnumerationTooDeep { depth: u32, max: u32 },

    #[error("formula requires n >= 2, got {n}")]
    OrderFormulaDomain { n: u32 },

    #[error("invalid serialized automorphism: {0}")]
    BadSerialization(String),

    #[error("{p} is not an odd prime within the supported bound")]
    BadCharacteristic { p: u64 },

    #[error("field degree {k} outside supported range 1..={max}")]
    BadFieldDegree { k: u32, max: u32 },

    #[error("element has {got} coefficients, context expects {expected}")]
    BadCoefficientCount { got: usize, expected: usize },

    #[error("division by zero in F_q")]
    DivisionByZero,

    #[error("2-power root tower of height {requested} unavailable (2-adic valuation of q-1 is {available})")]
    TowerUnavailable { requested: u32, available: u32 },

    #[error("c = {c} does not have exact period {r} under z^2 + c mod {p}")]
    NotPostCriticallyPeriodic { p: u64, c: u64, r: u32 },

    #[error("modulus {p} exceeds the search cap {max}")]
    SearchModulusTooLarge { p: u64, max: u64 },

    #[error("period cap exceeded: r = {r} > {max}")]
    PeriodTooLarge { r: u32, max: u32 },

    #[error("base point {x0} lies in the forward critical orbit")]
    BasePointInCriticalOrbit { x0: u64 },

    #[error("residue {value} is not a valid element mod {p}")]
    BadResidue { value: u64, p: u64 },

    #[error("field degree would exceed cap {max} while splitting the preimage tree")]
    SplittingFieldTooLarge { max: u32 },

    #[error("node-wise residues of the automorphism are not pairwise consistent")]
    NotResidueConsistent,

    #[error("square class of zero is undefined")]
    ZeroSquareClass,

    #[error("discriminant value D_{index} vanishes; base point collides with the critical orbit")]
    VanishingDiscriminant { index: usize },

    #[error("cofactor {cofactor} resists factorization (trial division bound and large-prime check exhausted)")]
    UnfactoredCofactor { cofactor: String },

    #[error("no rational post-critically finite parameter exists with period {r}")]
    UnsupportedRationalPeriod { r: u32 },

    #[error("rational parameter {c} does not have exact period {r} over Q")]
    RationalPeriodMismatch { c: String, r: u32 },

    #[error("integrity failure: {0}")]
    Integrity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
