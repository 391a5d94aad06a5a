use thiserror::Error;

/// Errors raised by geometry construction, integration and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("point {index} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("vertices do not span a full-dimensional polytope")]
    LowerDimensional,

    #[error("facets and incidence must be supplied for dimension {dim}")]
    MissingFacets { dim: usize },

    #[error("facet {facet}: normal is not primitive (gcd of entries is {gcd})")]
    NonPrimitiveNormal { facet: usize, gcd: i64 },

    #[error("facet {facet}: normal direction is not integral")]
    NonIntegerNormal { facet: usize },

    #[error("vertex {vertex} violates facet {facet}")]
    VertexViolatesFacet { vertex: usize, facet: usize },

    #[error("facet {facet}: supplied incidence disagrees with saturation test")]
    IncidenceMismatch { facet: usize },

    #[error("vertex {vertex} saturates facets of rank < dim; not a vertex")]
    NotAVertex { vertex: usize },

    #[error("facet {facet} is not supported by a hyperplane's worth of vertices")]
    DegenerateFacet { facet: usize },

    #[error("facet list does not close up: region unbounded or facets missing")]
    Unbounded,

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("function is not positive at vertex {vertex} (value {value})")]
    NotPositive { vertex: usize, value: f64 },

    #[error("origin is not interior to the polytope (facet {facet} has offset {offset})")]
    NotProper { facet: usize, offset: String },

    #[error("Reeb vector is not interior to the Reeb cone (dual ray {ray} pairs to {value})")]
    OutsideReebCone { ray: usize, value: f64 },

    #[error("direction is not tangent to the charge slice (first coordinate {0})")]
    NotSliceTangent(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("adaptive quadrature budget exhausted (error estimate {estimate:e}, target {target:e})")]
    QuadratureBudget { estimate: f64, target: f64 },

    #[error("no admissible root found: {0}")]
    NoAdmissibleRoot(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    /// Solver non-convergence, as opposed to a violated precondition.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::QuadratureBudget { .. } | Error::NoAdmissibleRoot(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
