use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid elastic constants: {0}")]
    InvalidConstants(String),

    #[error("invalid boundary: {0}")]
    InvalidBoundary(String),

    #[error("invalid scan geometry: {0}")]
    InvalidGeometry(String),

    #[error("scan geometry does not cover {0}")]
    GeometryCoverage(String),

    #[error("relative_error: truth field has zero norm on the mask")]
    ZeroTruthNorm,

    #[error("no rays intersect the boundary")]
    NoIntersectingRays,

    #[error("all singular values below cutoff; system carries no information")]
    AllSingularBelowCutoff,

    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("FEM solve failed: {0}")]
    FemSolve(String),

    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("pipeline stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Tag an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
