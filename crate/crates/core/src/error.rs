use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("edge {edge}: vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange {
        edge: usize,
        vertex: usize,
        n: usize,
    },

    #[error("edge {edge}: {what} is empty")]
    EmptyEdge { edge: usize, what: &'static str },

    #[error("edge {edge}: vertex {vertex} listed twice")]
    DuplicateVertex { edge: usize, vertex: usize },

    #[error("arc {arc}: radio arcs need exactly one origin not contained in the destination")]
    NotRadio { arc: usize },

    #[error("hyper-graph has no edges")]
    NoEdges,

    #[error("vertex {0} has no incident edge")]
    ZeroDegree(usize),

    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),

    #[error("structure is disconnected; components: {0:?}")]
    Disconnected(Vec<Vec<usize>>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state space of size {size} exceeds the dense cap of {cap}")]
    TooLarge { size: usize, cap: usize },

    #[error("empty target set")]
    EmptyTarget,

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by an infeasible query rather than bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Disconnected(_))
    }
}
