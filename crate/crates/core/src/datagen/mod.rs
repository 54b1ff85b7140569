//! Data generators: random graph families, manifold embeddings of abstract
//! graphs, and triangle meshes turned into sphere-valued graphs.

mod embed;
mod mesh;
mod synthetic;

pub use embed::{
    embed_degree_hyperbolic, embed_onehot_hyperbolic, embed_onehot_spd, spd_capacity,
    DegreeEmbedding,
};
pub use mesh::{
    deformed_icosphere, make_icosphere, mesh_dataset, mesh_to_graph, parse_obj, write_obj,
    MeshClass, MeshGraph, NormalWeighting, TriangleMesh,
};
pub use synthetic::{
    gen_synthetic, synthetic_dataset, Embedding, Family, Hyper, SyntheticGraph, SyntheticSpec,
};

/// Independent per-sample seed derived from a master seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
