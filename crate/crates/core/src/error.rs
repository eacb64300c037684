use thiserror::Error;

/// Errors raised by graph construction, exploration and the embedding
/// recursions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("vertex `{0}` already present")]
    DuplicateVertex(String),
    #[error("edge `{0}` already present")]
    DuplicateEdge(String),
    #[error("label `{0}` is used both as a vertex and as an edge")]
    LabelClash(String),
    #[error("blocks do not partition the vertex set: {0}")]
    NotAPartition(String),
    #[error("vertex sets overlap at `{0}`")]
    Overlap(String),
    #[error("graph is disconnected: `{unreached}` is not reachable from `{root}`")]
    Disconnected { root: String, unreached: String },
    #[error("neighbour function is not symmetric: `{0}` lists `{1}` but not vice versa")]
    Asymmetric(String, String),
    #[error("component structure at stage {stage} is not stable across the explored horizon (vertex `{vertex}`)")]
    HorizonUnstable { stage: usize, vertex: String },
    #[error("vertex cap of {cap} exceeded")]
    VertexCap { cap: usize },
    #[error("addresses `{0}` and `{1}` are not strictly comparable in the tree order")]
    Incomparable(String, String),
    #[error("avoid set violates the routing bound: {0}")]
    AvoidBound(String),
    #[error("capacity exhausted: {0}")]
    Capacity(String),
    #[error("malformed uncontraction step {stage}: {reason}")]
    MalformedStep { stage: usize, reason: String },
    #[error("stage {requested} is beyond the available horizon {available}")]
    Horizon { requested: usize, available: usize },
    #[error("end prefix does not match the explored graph: {0}")]
    UnknownEnd(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
