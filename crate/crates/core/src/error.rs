use thiserror::Error;

/// Errors raised by the geometry, tessellation, shear and diagnostic layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate quadruple: two of the four points coincide")]
    DegenerateQuadruple,
    #[error("degenerate triple: two of the three points coincide")]
    DegenerateTriple,
    #[error("source and target triples have opposite cyclic orientation")]
    OrientationMismatch,
    #[error("degenerate axis: geodesic endpoints coincide")]
    DegenerateAxis,
    #[error("matrix determinant must be positive")]
    NonPositiveDeterminant,
    #[error("horocycle scale must be positive")]
    NonPositiveScale,
    #[error("geodesic does not end at the horocycle base point")]
    NotBasedAtTip,
    #[error("not a Farey vertex: {0}")]
    InvalidVertex(String),
    #[error("vertices {0} and {1} are not Farey neighbours (non-unimodular/unreduced edge)")]
    NotNeighbors(String, String),
    #[error("depth {depth} exceeds the guard {guard}")]
    DepthLimit { depth: u32, guard: u32 },
    #[error("triangle {0} is not part of the tessellation")]
    UnknownTriangle(String),
    #[error("dual graph is not a tree: {0}")]
    NotATree(String),
    #[error("images of {0} are not in cyclic order")]
    OrderViolation(String),
    #[error("no image recorded for vertex {0}")]
    MissingVertexImage(String),
    #[error("numeric consistency failure: {0}")]
    ConsistencyFailure(String),
    #[error("fan window at tip {0} exceeds the developed depth")]
    WindowExceedsDepth(String),
    #[error("map is not an integer unimodular automorphism of the tessellation")]
    NotFareyAutomorphism,
    #[error("shear function is not supported on the fan at infinity: {0}")]
    NotSingleFan(String),
    #[error("map is not increasing at the sampled points")]
    NonMonotone,
    #[error("developed map does not cover the sampled vertex {0}")]
    InsufficientDepth(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse number {0:?}")]
    NumberParse(String),
}

impl Error {
    /// True for failures that indicate a numeric or convention problem rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::ConsistencyFailure(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
