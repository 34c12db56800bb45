//! Error types shared across the toolkit.

use crate::assembly::PartId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Mesh file could not be parsed.
    #[error("parse error in {path}: {reason}")]
    Parse { path: String, reason: String },

    /// A boundary edge was found; the mesh does not bound a solid.
    #[error("mesh is not watertight: {reason}")]
    NotWatertight { reason: String },

    /// Zero-area face, repeated vertex index, or non-positive volume.
    #[error("degenerate geometry: {reason}")]
    DegenerateGeometry { reason: String },

    /// Two parts overlap in volume, which valid assemblies never do.
    #[error("parts {a} and {b} interpenetrate")]
    Interpenetration { a: PartId, b: PartId },

    /// An operation that needs a feasible removal direction got a locked cone.
    #[error("freedom cone is locked; no feasible removal direction")]
    LockedCone,

    /// Reorientation found no flat face to rest the assembly on.
    #[error("no stable resting pose: {reason}")]
    UnstablePose { reason: String },

    /// Subassembly identification deadlocked: nothing can be removed.
    #[error("degenerate state: no removable subassembly or single part")]
    DegenerateState,

    /// The planner reached a state admitting no valid removal.
    #[error("planning failed at state {{{stuck}}}: {reason}")]
    PlanFailure { stuck: String, reason: String },

    /// Manifest or plan-file schema problems.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Exhaustive schedule search refused an oversized instance.
    #[error("instance too large for exhaustive search: {jobs} jobs > {limit}")]
    TooLarge { jobs: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 geometry, 3 input, 4 planning.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotWatertight { .. }
            | Error::DegenerateGeometry { .. }
            | Error::Interpenetration { .. }
            | Error::LockedCone
            | Error::UnstablePose { .. } => 2,
            Error::Parse { .. } | Error::InvalidInput(_) | Error::Io(_) | Error::TooLarge { .. } => 3,
            Error::PlanFailure { .. } | Error::DegenerateState => 4,
        }
    }
}
