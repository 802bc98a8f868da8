//! Minimal feed-forward network engine.
//!
//! Networks are described by an [`MlpSpec`] and carried around as flat
//! parameter vectors in a fixed canonical order (per layer: weight matrix
//! row-major `[out][in]`, then biases). Everything here is a pure function
//! over `(spec, params, input)`, which keeps the engine trivially safe to
//! use from concurrent runs and makes gradient checking exact.

mod adam;
mod mlp;
mod params;

pub use adam::AdamState;
pub use mlp::{ForwardTrace, GradScratch, HiddenActivation, MlpSpec, OutputActivation};
pub use params::{read_param_vector, write_param_vector};
