use thiserror::Error;

/// Errors raised by complex construction and the resistance computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("simplex {simplex} has non-positive weight {weight}")]
    NonPositiveWeight { simplex: String, weight: f64 },

    #[error("malformed facet {0}")]
    MalformedFacet(String),

    #[error("complex has no simplices")]
    EmptyComplex,

    #[error("dimension {p} out of range (valid: {min}..={max})")]
    DimOutOfRange { p: usize, min: usize, max: usize },

    #[error("basis side mismatch: {from} cannot be converted to {to}")]
    SideMismatch { from: String, to: String },

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: String, found: String },

    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("Gram matrix is not diagonal with positive entries")]
    NonDiagonalGram,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("simplex {0} not found in complex")]
    SimplexNotFound(String),

    #[error("vertex {0} not found in complex")]
    VertexNotFound(u64),

    #[error("chain is not a boundary (relative residual {residual:.3e})")]
    NotABoundary { residual: f64 },

    #[error("chain is not a cycle (relative residual {residual:.3e})")]
    NotACycle { residual: f64 },

    #[error("vertices {0} and {1} lie in different connected components")]
    Disconnected(u64, u64),

    #[error("vertex effective resistance requires unit vertex weights")]
    NonUnitVertexWeights,

    #[error("Hodge Laplacian in dimension {0} is singular")]
    SingularHodgeLaplacian(usize),

    #[error("boundary current is infeasible (relative residual {residual:.3e})")]
    InfeasibleBoundaryCurrent { residual: f64 },

    #[error("harmonic kernel of the extended complex has dimension {0}, expected 1")]
    DegenerateKernel(usize),

    #[error("not a current generator: {0}")]
    NotAGenerator(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::MalformedFacet(_) => "MalformedFacet",
            Error::EmptyComplex => "EmptyComplex",
            Error::DimOutOfRange { .. } => "DimOutOfRange",
            Error::SideMismatch { .. } => "SideMismatch",
            Error::BasisMismatch { .. } => "BasisMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::NonFinite => "NonFinite",
            Error::NonDiagonalGram => "NonDiagonalGram",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::SimplexNotFound(_) => "SimplexNotFound",
            Error::VertexNotFound(_) => "VertexNotFound",
            Error::NotABoundary { .. } => "NotABoundary",
            Error::NotACycle { .. } => "NotACycle",
            Error::Disconnected(..) => "Disconnected",
            Error::NonUnitVertexWeights => "NonUnitVertexWeights",
            Error::SingularHodgeLaplacian(_) => "SingularHodgeLaplacian",
            Error::InfeasibleBoundaryCurrent { .. } => "InfeasibleBoundaryCurrent",
            Error::DegenerateKernel(_) => "DegenerateKernel",
            Error::NotAGenerator(_) => "NotAGenerator",
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "IOErr",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
