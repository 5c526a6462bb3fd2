use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("degree must be at least 1")]
    ZeroDegree,

    #[error("orientation index {index} out of range for a graph with {edges} edges")]
    OrientationOutOfRange { index: BigUint, edges: usize },

    #[error("object built for {expected} edges applied to a graph with {found} edges")]
    EdgeCountMismatch { expected: usize, found: usize },

    #[error("object built for {expected} vertices applied to a graph with {found} vertices")]
    VertexCountMismatch { expected: usize, found: usize },

    #[error("graph has no bipartition")]
    MissingBipartition,

    #[error("graph is not regular")]
    NotRegular,

    #[error("function is not a circulation (nonzero net flow at vertex {vertex})")]
    NotCirculation { vertex: usize },

    #[error("edge set is not a perfect matching: {0}")]
    NotPerfectMatching(String),

    #[error("invalid expansion parameters: {0}")]
    InvalidParams(String),

    #[error("invalid expanded vertex {code}: {reason}")]
    InvalidVertex { code: String, reason: String },

    #[error("materialization refused: {total} vertices exceeds the limit of {limit}")]
    MaterializationRefused { total: String, limit: u64 },

    #[error("rejection sampler gave up after {attempts} attempts")]
    SamplerExhausted { attempts: usize },

    #[error("potential step {step} on edge ({u}, {v}) is outside {{-1, 0, 1}}")]
    PotentialStepOutOfRange { u: usize, v: usize, step: i64 },

    #[error("not an edge: {0}")]
    NotAnEdge(String),

    #[error("tower level {level} unavailable: {reason}")]
    LevelUnavailable { level: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
