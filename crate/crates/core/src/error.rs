use std::path::PathBuf;

use crate::mesh_core::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(ValidationReport),

    #[error("half-edge {half_edge} has no matching edge in neighbor triangle {neighbor}")]
    CorruptAdjacency { half_edge: usize, neighbor: usize },

    #[error("vertex {0} is not referenced by any triangle")]
    IsolatedVertex(usize),

    #[error("vertex {vertex} has no frontier edge")]
    NoFrontierAtVertex { vertex: usize },

    #[error("no frontier edge reachable from seed triangle {seed}")]
    NoFrontierReachable { seed: usize },

    #[error("boundary walk from seed triangle {seed} did not close after {steps} steps")]
    WalkOverflow { seed: usize, steps: usize },

    #[error("barrier-edge tip {vertex} has no internal edge")]
    NoInternalEdge { vertex: usize },

    #[error("barrier edge {vertex}-{neighbor} not found around vertex {vertex}")]
    BarrierNotFound { vertex: usize, neighbor: usize },

    #[error("no internal edge separates the two visits of vertex {vertex}")]
    NoSeparatingEdge { vertex: usize },

    #[error("reparation still splitting after {rounds} rounds (limit {limit})")]
    Divergence { rounds: usize, limit: usize },

    #[error("reservation of {requested} slots at offset {offset} exceeds capacity {capacity}")]
    CapacityExhausted {
        offset: usize,
        requested: usize,
        capacity: usize,
    },

    #[error("reservation counter overflow")]
    CounterOverflow,

    #[error("{count} kernel invocations failed; first: {first}")]
    Kernel { count: usize, first: Box<Error> },

    #[error("{phase} phase: {source}")]
    Phase {
        phase: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn in_phase(self, phase: &'static str) -> Self {
        Error::Phase {
            phase,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
