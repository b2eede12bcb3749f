//! Surrogate-assisted evolutionary optimization for expensive
//! multi-objective problems.
//!
//! The optimizer ([`optimizer::run`]) alternates three infill strategies
//! ([`strategies`]) built on RBF and PNN models ([`surrogates`]) and the
//! sorting and variation primitives in [`kernel`]. [`problems`] holds the
//! DTLZ/ZDT benchmarks and the external-process evaluator; [`harness`] runs
//! seeded multi-run experiments and compares them.
//!
//! ```
//! use clmea::optimizer::{run, Observers, RunConfig};
//! use clmea::problems::ProblemSpec;
//! use clmea::strategies::StrategyParams;
//!
//! let mut p = ProblemSpec::zdt(2, 6)?;
//! let config = RunConfig {
//!     n_init: Some(15),
//!     max_fes: 24,
//!     strategy: StrategyParams { np: 10, max_gen1: 4, max_gen2: 2, ..Default::default() },
//!     ..Default::default()
//! };
//! let result = run(&mut p, &config, &Observers::default()).map_err(|e| e.error)?;
//! assert_eq!(result.archive.len(), 24);
//! # Ok::<(), clmea::Error>(())
//! ```

pub mod error;
pub mod harness;
pub mod indicators;
pub mod kernel;
pub mod optimizer;
pub mod problems;
pub mod strategies;
pub mod surrogates;

pub use error::{Error, FitError, Result};
