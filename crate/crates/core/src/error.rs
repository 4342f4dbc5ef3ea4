use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("entity {0} is not a sub-entity of the given cell")]
    EntityNotOnCell(String),

    #[error("invalid entity: {0}")]
    InvalidEntity(String),

    #[error("breakpoints must be strictly increasing with at least two values per axis: {0}")]
    BadBreakpoints(String),

    #[error("family {family} requires order k >= {min}, got {k}")]
    InadmissibleOrder { family: String, min: i64, k: i64 },

    #[error("field does not lie in the shape space of {0}")]
    NotInShapeSpace(String),

    #[error("local DOF matrix of {family} is singular (rank {rank} of {dim})")]
    SingularLocalMatrix { family: String, rank: usize, dim: usize },

    #[error("neighbouring cells disagree on shared DOF {key}")]
    InconsistentSharedDof { key: String },

    #[error("operator {op} maps {src} outside of {dst}: {detail}")]
    OperatorImageNotContained { op: String, src: String, dst: String, detail: String },

    #[error("face {0} lies on the boundary and has no jump")]
    BoundaryFace(usize),

    #[error("kind mismatch: {0}")]
    KindMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
