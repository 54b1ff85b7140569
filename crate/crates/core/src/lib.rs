//! Graph neural network layers for graphs whose node features live on a
//! Riemannian manifold: Euclidean space, the sphere, the Lorentz model of
//! hyperbolic space, and SPD matrices with the affine-invariant metric.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and the
//! verification suites live in the companion `mgcn` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod datagen;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod layers;
pub mod linalg;
pub mod manifold;
pub mod train;

pub use error::{Error, Result};
pub use graph::{FeatureGraph, FeatureMap, TangentField};
pub use manifold::{Isometry, ManifoldKind, ManifoldPoint, TangentVector};
