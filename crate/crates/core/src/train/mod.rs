//! Parameter layout, gradients, ADAM, dataset splits, metrics and the
//! training loop.

mod adam;
mod data;
mod descriptor;
mod metrics;
mod model;
mod params;
mod trainer;

pub use adam::{adam_step, update_average, AdamConfig, AdamState};
pub use data::{balanced_batches, class_counts, stratified_split, Split};
pub use descriptor::{BlockKind, InvariantSpec, LayerSpec, ModelDescriptor, ParamBlock, Selection};
pub use metrics::{accuracy, confusion_matrix, macro_f1, Evaluation};
pub use model::{
    fd_gradient, forward, forward_cached, full_fd_gradient, predict, richardson_ratio,
    sample_gradient, sample_loss, ForwardCache, PreparedGraph,
};
pub use params::ModelParams;
pub use trainer::{evaluate, train, train_with_callback, EpochRecord, TrainConfig, TrainOutcome};
