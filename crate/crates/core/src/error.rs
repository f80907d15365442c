use thiserror::Error;

pub type Result<T> = std::result::Result<T, KerovError>;

#[derive(Error, Debug)]
pub enum KerovError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("enumeration of {family} exceeds vertex budget {budget} at level {level} (estimate {estimate}); raise KEROVLAB_VERTEX_BUDGET")]
    VertexBudget { family: String, level: u32, estimate: usize, budget: usize },

    #[error("level {level} is on the truncated rim of a depth-{depth} graph")]
    Truncated { level: u32, depth: u32 },

    #[error("vertex not in graph")]
    NotInGraph,

    #[error("multiplicity function has a pole on edge {edge}: factor {factor} vanishes")]
    Pole { edge: String, factor: String },

    #[error("multiplicity function is not UD-self-dual (witness quadrangle through {nu})")]
    NotSelfDual { nu: String },

    #[error("gauge factor is path-dependent at {vertex}: {path_a} vs {path_b}")]
    PathDependent { vertex: String, path_a: String, path_b: String },

    #[error("degenerate data: q^2 vanishes on {boxes:?}; pass allow_degenerate to restrict the graph")]
    Degenerate { boxes: Vec<String> },

    #[error("operation needs parameter t outside {{0, -1, -2, ...}}, got {t}")]
    BadT { t: String },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("requested tolerance {eps} needs truncation level {needed} but graph depth is {depth}")]
    DepthInsufficient { eps: f64, needed: u32, depth: u32 },

    #[error("exact arithmetic required: {0}")]
    NotExact(String),

    #[error("graph is not Heisenberg: {0}")]
    NotHeisenberg(String),

    #[error("simulation hit the depth cap at level {level}")]
    CapReached { level: u32 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Other(String),
}
