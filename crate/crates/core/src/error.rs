use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// A region or terminal set is empty, or top and bottom coincide.
    Degenerate(&'static str),
    /// Lexicographic integer capacities no longer fit the 128-bit accumulator.
    CapacityOverflow,
    /// Exact rational arithmetic left the supported range.
    ArithmeticOverflow,
    /// The brute-force oracle refuses problems above its edge limit.
    TooLarge { edges: usize, limit: usize },
    /// Probability masses of a distribution do not add up to one.
    MassMismatch,
    /// Two distributions that must share a quantum do not.
    QuantumMismatch { left: u64, right: u64 },
    /// Points of different dimensions, or a dimension outside `2..=MAX_DIM`.
    Dimension(usize),
    /// A level or law violates the subcritical hypothesis.
    Supercritical(&'static str),
    /// A cluster exploration hit its vertex budget.
    BudgetExceeded { budget: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::Degenerate(what) => write!(f, "degenerate geometry: {what}"),
            Error::CapacityOverflow => {
                write!(f, "capacity overflow: lexicographic capacities exceed 128 bits")
            }
            Error::ArithmeticOverflow => write!(f, "exact arithmetic overflow"),
            Error::TooLarge { edges, limit } => {
                write!(f, "problem has {edges} edges, oracle limit is {limit}")
            }
            Error::MassMismatch => write!(f, "probability masses do not sum to one"),
            Error::QuantumMismatch { left, right } => {
                write!(f, "quantum mismatch: {left} vs {right}")
            }
            Error::Dimension(d) => write!(f, "unsupported or mismatched dimension {d}"),
            Error::Supercritical(what) => write!(f, "supercritical: {what}"),
            Error::BudgetExceeded { budget } => {
                write!(f, "cluster exploration exceeded its budget of {budget} vertices")
            }
        }
    }
}

impl core::error::Error for Error {}
