use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // --- parsing and system structure ---
    #[error("malformed system document: {0}")]
    Json(String),
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
    #[error("duplicate exponent {exponent:?} in polynomial {poly}")]
    DuplicateExponent { poly: usize, exponent: Vec<i64> },
    #[error("zero coefficient in polynomial {poly}")]
    ZeroCoefficient { poly: usize },
    #[error("exponent of length {found} in polynomial {poly}, expected {expected}")]
    ExponentLength {
        poly: usize,
        found: usize,
        expected: usize,
    },
    #[error("system is not square: {polys} polynomials in {n} variables")]
    NonSquare { n: usize, polys: usize },
    #[error("polynomial {poly} is zero")]
    ZeroPolynomial { poly: usize },
    #[error("equation {equation} has no constant term")]
    MissingConstant { equation: usize },
    #[error("equation {equation} is a binomial (l_{equation} = 0); call eliminate_binomials first")]
    Binomial { equation: usize },
    #[error("shared monomial {exponent:?} between equations {first} and {second}")]
    SharedMonomial {
        exponent: Vec<i64>,
        first: usize,
        second: usize,
    },
    #[error("invalid mixed structure: {0}")]
    InvalidStructure(String),

    // --- binomial elimination ---
    #[error("system has no binomial equation")]
    NoBinomial,
    #[error("system has no positive solutions (binomial {equation} forces a non-positive value)")]
    NoPositiveSolutions { equation: usize },
    #[error("cannot eliminate the last variable")]
    LastVariable,
    #[error("binomial {equation} has an irrational positive root")]
    IrrationalRoot { equation: usize },

    // --- lattices ---
    #[error("exponent vectors have rank {rank} < {expected} (infinite index)")]
    RankDeficient { rank: usize, expected: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    // --- gale ---
    #[error("empty relation basis: Gale duality needs l >= 1")]
    EmptyRelations,
    #[error("point lies on the arrangement: {0}")]
    OnArrangement(String),
    #[error("zero coordinate x_{0}")]
    ZeroCoordinate(usize),
    #[error("{count} sign choices exceed the cap of {cap}")]
    TooManySignSystems { count: usize, cap: usize },
    #[error("relation exponent does not fit in i64")]
    ExponentOverflow,

    // --- bounds ---
    #[error("parts sum to {sum}, expected {l}")]
    PartSum { sum: u64, l: u64 },
    #[error("n = {0} < 2: the Descartes bound applies")]
    UseDescartes(usize),
    #[error("block {0} is empty: eliminate binomials first")]
    EmptyBlock(usize),
    #[error("k = {k} outside 0..={l}")]
    IndexRange { k: usize, l: usize },

    // --- jacobian ---
    #[error("denominator did not cancel: {0}")]
    NonCancellation(String),
    #[error("relation exponents are singular: {0}")]
    SingularAlpha(String),
    #[error("budget exceeded: {0}")]
    Budget(String),

    // --- solver ---
    #[error("count mismatch: {0}")]
    CountMismatch(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
