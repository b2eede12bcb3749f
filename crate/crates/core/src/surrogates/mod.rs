//! Gaussian radial basis interpolants for objective approximation and a
//! probabilistic neural network for rank classification.

mod pnn;
mod rbf;

pub use pnn::{pnn_fit, pnn_predict, PnnModel, SigmaPolicy};
pub use rbf::{rbf_fit, rbf_predict, RbfModel, RbfSet, WidthPolicy};
