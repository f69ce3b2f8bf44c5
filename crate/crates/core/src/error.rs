use core::fmt;

/// Every failure the library can report.
///
/// Variants are grouped by the module that raises them; callers that need to
/// classify failures (the CLI maps them onto exit codes) can use [`Error::name`].
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    // laurent
    DivisionByZero,
    NotOrdinary,
    OffCircle { modulus: f64 },
    ZeroPolynomial,

    // polymat
    DimensionMismatch { expected: usize, found: usize },
    BadArity { expected: usize, found: usize },
    SingularScale,
    BadOffset { offset: usize, n: usize },

    // cuntz
    BadBand { band: usize, n: usize },
    ModeUnsupported,

    // liftfactor
    NotSl,
    InconsistentQuotient { column: usize },
    NonTerminating { iterations: usize },
    NonUnitPivot { column: usize },

    // gridfun
    DegenerateRow { row: usize, point: usize },
    GridNotDivisible { m: usize, n: usize },
    GridMismatch,

    // filterbank
    LengthMismatch { length: usize, n: usize },
    BandArityMismatch { expected: usize, found: usize },
    ResidualNotInvertible,
}

impl Error {
    /// Stable identifier of the error class.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::NotOrdinary => "NotOrdinary",
            Error::OffCircle { .. } => "OffCircle",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BadArity { .. } => "BadArity",
            Error::SingularScale => "SingularScale",
            Error::BadOffset { .. } => "BadOffset",
            Error::BadBand { .. } => "BadBand",
            Error::ModeUnsupported => "ModeUnsupported",
            Error::NotSl => "NotSL",
            Error::InconsistentQuotient { .. } => "InconsistentQuotient",
            Error::NonTerminating { .. } => "NonTerminating",
            Error::NonUnitPivot { .. } => "NonUnitPivot",
            Error::DegenerateRow { .. } => "DegenerateRow",
            Error::GridNotDivisible { .. } => "GridNotDivisible",
            Error::GridMismatch => "GridMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::BandArityMismatch { .. } => "BandArityMismatch",
            Error::ResidualNotInvertible => "ResidualNotInvertible",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by the zero polynomial"),
            Error::NotOrdinary => write!(f, "operand has negative exponents"),
            Error::OffCircle { modulus } => {
                write!(f, "evaluation point has modulus {modulus}, expected 1")
            }
            Error::ZeroPolynomial => write!(f, "operation undefined for the zero polynomial"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::BadArity { expected, found } => {
                write!(f, "expected {expected} parameters, found {found}")
            }
            Error::SingularScale => write!(f, "diagonal scale must be nonzero"),
            Error::BadOffset { offset, n } => {
                write!(f, "diagonal offset {offset} invalid for {n} bands")
            }
            Error::BadBand { band, n } => write!(f, "band {band} out of range for {n} bands"),
            Error::ModeUnsupported => write!(f, "operation requires the monomial representation"),
            Error::NotSl => write!(f, "determinant is not identically 1"),
            Error::InconsistentQuotient { column } => {
                write!(f, "quotient fails to reduce column {column}")
            }
            Error::NonTerminating { iterations } => {
                write!(f, "degree failed to decrease after {iterations} iterations")
            }
            Error::NonUnitPivot { column } => {
                write!(f, "pivot in column {column} is not a monomial")
            }
            Error::DegenerateRow { row, point } => {
                write!(f, "row {row} vanishes at grid point {point}")
            }
            Error::GridNotDivisible { m, n } => {
                write!(f, "grid size {m} is not divisible by band count {n}")
            }
            Error::GridMismatch => write!(f, "grid functions sampled on different grids"),
            Error::LengthMismatch { length, n } => {
                write!(f, "signal length {length} is not a multiple of {n}")
            }
            Error::BandArityMismatch { expected, found } => {
                write!(f, "expected {expected} bands, found {found}")
            }
            Error::ResidualNotInvertible => {
                write!(f, "residual is not a monomial diagonal matrix")
            }
        }
    }
}

impl core::error::Error for Error {}
