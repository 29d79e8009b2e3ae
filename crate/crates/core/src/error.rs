use thiserror::Error;

/// Errors raised while building or analysing formations.
///
/// Variants split into two families: input validation problems (bad graphs,
/// coincident points, malformed documents) and numerical failures (non-finite
/// matrices, eigensolver breakdown). [`Error::is_validation`] tells them apart.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("edge {edge} duplicates edge {first} ({from} -> {to})")]
    DuplicateEdge {
        edge: usize,
        first: usize,
        from: usize,
        to: usize,
    },
    #[error("edge {edge} references vertex {vertex}, but the graph has {n} vertices")]
    VertexIdOutOfRange {
        edge: usize,
        vertex: usize,
        n: usize,
    },
    #[error("vertex {0} is out of range")]
    NoSuchVertex(usize),

    #[error("ambient dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("expected a vector of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("configuration has {points} points but the graph has {vertices} vertices")]
    VertexCountMismatch { vertices: usize, points: usize },
    #[error("non-finite coordinate in configuration")]
    NonFiniteCoordinate,
    #[error("vector norm {0:e} is below the minimum separation")]
    ZeroVector(f64),
    #[error("endpoints of edge {edge:?} coincide (distance {distance:e})")]
    CoincidentPoints { edge: Option<usize>, distance: f64 },
    #[error("all points of the configuration coincide")]
    DegenerateConfiguration,
    #[error("vertex {0} has no out-going edges")]
    NoOutEdges(usize),
    #[error("target dimension {requested} is not larger than current dimension {current}")]
    DimensionNotLarger { current: usize, requested: usize },
    #[error("a new vertex needs at least two targets, got {0}")]
    TooFewTargets(usize),
    #[error("out-going bearings of the new vertex are collinear")]
    CollinearOutEdges,
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("desired bearing for edge {edge} has norm {norm}, expected 1")]
    NonUnitDesiredBearing { edge: usize, norm: f64 },
    #[error("expected {expected} desired bearings, got {found}")]
    BearingCountMismatch { expected: usize, found: usize },
    #[error("graph is not acyclic")]
    NotAcyclic,

    #[error("matrix contains non-finite entries")]
    NonFiniteEntries,
    #[error("matrix of dimension {0} exceeds the eigensolver cap of {1}")]
    MatrixTooLarge(usize, usize),
    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,
    #[error("basis columns are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("matrix shapes do not conform: {0}")]
    ShapeMismatch(String),

    #[error("step size must be positive and not exceed the horizon (dt = {dt}, t_end = {t_end})")]
    StepSizeInvalid { dt: f64, t_end: f64 },

    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    /// True for errors caused by invalid input rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NonFiniteEntries
                | Error::MatrixTooLarge(..)
                | Error::ConvergenceFailure
                | Error::NotOrthonormal(_)
                | Error::ShapeMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
