use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    EmptyVector,
    NegativeEntry {
        index: usize,
        value: f64,
    },
    NonFinite {
        index: usize,
    },
    RaggedMatrix {
        row: usize,
    },
    ZeroVector,
    NotInterior,
    InvalidParameter(&'static str),
    NoClosedForm(&'static str),
    /// `member` is 0-based; the message counts from 1 like words do.
    NotHomogeneous {
        member: usize,
    },
    EmptyFamily,
    IndexOutOfRange {
        index: usize,
        len: usize,
    },
    EmptyWord,
    CollapsedOrbit,
    BoundaryEigenvector,
    UnknownActivation,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::EmptyVector => f.write_str("vector has no coordinates"),
            Error::NegativeEntry { index, value } => {
                write!(f, "entry {index} is negative ({value})")
            }
            Error::NonFinite { index } => write!(f, "entry {index} is not finite"),
            Error::RaggedMatrix { row } => write!(f, "matrix row {row} has the wrong length"),
            Error::ZeroVector => f.write_str("vector is zero"),
            Error::NotInterior => f.write_str("point is not in the interior of the cone"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::NoClosedForm(what) => write!(f, "no closed-form asymptotic map for {what}"),
            Error::NotHomogeneous { member } => {
                write!(f, "family member {} is not 1-homogeneous", member + 1)
            }
            Error::EmptyFamily => f.write_str("family has no maps"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::EmptyWord => f.write_str("word is empty"),
            Error::CollapsedOrbit => f.write_str("orbit collapsed to the zero vector"),
            Error::BoundaryEigenvector => f.write_str(
                "eigenvector of the candidate product lies on the boundary; \
                 perturb the family with perturb_interior or choose an interior-mapping family",
            ),
            Error::UnknownActivation => f.write_str("unknown activation name"),
        }
    }
}

impl core::error::Error for Error {}
