use thiserror::Error;

/// Errors produced across the library. Geometric validation problems are
/// reported through `ValidationReport` and `ConditionReport` instead of
/// this type; only hard failures become errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rule parse error: {0}")]
    Parse(String),

    #[error("unknown rule {0:?}")]
    UnknownRule(String),

    #[error("unknown prototile id {0}")]
    UnknownPrototile(usize),

    #[error("degenerate tile: {0}")]
    DegenerateTile(String),

    #[error("intersection condition violated: {0}")]
    IntersectionCondition(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("root selector out of range: {0}")]
    SelectorOutOfRange(String),

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("degenerate triangle")]
    DegenerateTriangle,

    #[error("singular barycentric system: {0}")]
    SingularSystem(String),

    #[error("embedding failure: {0}")]
    EmbeddingFailure(String),

    #[error("radius iteration did not converge: residual {residual:e} after {iterations} sweeps")]
    NonConvergence {
        residual: f64,
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("layout inconsistency: {0}")]
    Layout(String),

    #[error("unmatched corner vertex: {0}")]
    UnmatchedCorner(String),

    #[error("coincident marked corners")]
    CoincidentCorners,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
