use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The modular base must be at least 1.
    ZeroModulus,
    EmptyPosition,
    /// Heap sizes whose total does not fit in a `u64`.
    HeapOverflow,
    /// Two positions (or a position and a move) with different heap counts.
    LengthMismatch { left: usize, right: usize },
    WrongHeapCount { expected: usize, found: usize },
    /// The multi-heap formula only covers odd moduli.
    EvenModulus(u64),
    CoordinateOutOfRange { x: u64, limit: u64 },
    /// The solver would need more status cells than it is allowed.
    BudgetExceeded { cells: u128, budget: u64 },
    DuplicateCoordinate(u64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroModulus => write!(f, "modulus m must be positive"),
            Error::EmptyPosition => write!(f, "a position needs at least one heap"),
            Error::HeapOverflow => write!(f, "total heap size overflows u64"),
            Error::LengthMismatch { left, right } => {
                write!(f, "incomparable positions: {left} heaps vs {right} heaps")
            }
            Error::WrongHeapCount { expected, found } => {
                write!(f, "expected {expected} heaps, found {found}")
            }
            Error::EvenModulus(m) => {
                write!(f, "no closed form for even m = {m} with this many heaps")
            }
            Error::CoordinateOutOfRange { x, limit } => {
                write!(f, "coordinate {x} outside the P-position range [0, {limit})")
            }
            Error::BudgetExceeded { cells, budget } => {
                write!(f, "solver needs {cells} cells, budget is {budget}")
            }
            Error::DuplicateCoordinate(x) => {
                write!(f, "first coordinate {x} appears more than once")
            }
        }
    }
}

impl core::error::Error for Error {}
