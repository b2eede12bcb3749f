//! Quality indicators: exact hypervolume for two and three objectives, a
//! Monte Carlo estimate, hypervolume improvement, and IGD.

mod hypervolume;
mod igd;

pub use hypervolume::{hv_improvement, hypervolume, mc_hypervolume, ReferencePointPolicy};
pub use igd::{igd, ReferenceFront};
