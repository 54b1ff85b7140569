use alloc::boxed::Box;
use alloc::string::String;

use crate::manifold::ManifoldKind;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// `log_p(q)` is undefined because `q` is (numerically) in the cut locus of `p`.
    #[error("point lies in the cut locus (geodesic distance {distance})")]
    CutLocus { distance: f64 },

    /// A graph operation hit the cut locus along a specific edge.
    #[error("edge ({from} -> {to}) of channel {channel} hits the cut locus{}", step_suffix(*step))]
    EdgeCutLocus {
        from: usize,
        to: usize,
        channel: usize,
        step: Option<usize>,
    },

    /// Time integration hit the cut locus along an edge.
    #[error("diffusion hit the cut locus on edge ({from} -> {to}) at time {time}")]
    FlowCutLocus { from: usize, to: usize, time: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("manifold kind mismatch: expected {expected:?}, found {found:?}")]
    KindMismatch {
        expected: ManifoldKind,
        found: ManifoldKind,
    },

    #[error("tangent vectors are based at different points")]
    BaseMismatch,

    #[error("invalid manifold: {0}")]
    InvalidManifold(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("invalid tangent vector: {0}")]
    InvalidTangent(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("embedding capacity exceeded: {needed} slots needed, {available} available")]
    CapacityExceeded { needed: usize, available: usize },

    #[error("node degree {degree} exceeds embedding capacity {capacity}")]
    DegreeOverflow { degree: usize, capacity: usize },

    #[error("vertex {vertex} has a zero-length normal")]
    ZeroNormal { vertex: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("loss evaluated to a non-finite value")]
    NonFiniteLoss,

    /// An error raised while processing one sample of a dataset.
    #[error("sample {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate direction in tangent layer (|Y| below threshold)")]
    DegenerateDirection,
}

impl Error {
    pub(crate) fn in_sample(self, index: usize) -> Self {
        match self {
            e @ Error::Sample { .. } => e,
            e => Error::Sample {
                index,
                source: Box::new(e),
            },
        }
    }
}

fn step_suffix(step: Option<usize>) -> String {
    match step {
        Some(s) => alloc::format!(" at step {s}"),
        None => String::new(),
    }
}

impl Error {
    /// True for failures caused by the geometry of the data (cut locus,
    /// non-convergence) rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        if let Error::Sample { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::CutLocus { .. }
                | Error::EdgeCutLocus { .. }
                | Error::FlowCutLocus { .. }
                | Error::NonConvergence { .. }
                | Error::NonFiniteLoss
                | Error::DegenerateDirection
        )
    }
}
