//! DTLZ and ZDT benchmarks, their analytic Pareto fronts, and the
//! external-process evaluator.

mod benchmarks;
mod external;
mod fronts;

pub use benchmarks::{Family, ProblemSpec};
pub use external::{external_evaluate, ExternalEvaluator, ExternalEvaluatorSpec, Sense};
pub use fronts::{pareto_front_reference, zdt6_min_f1};

use crate::error::Result;
use crate::kernel::BoundsBox;

/// Something that turns decision vectors into objective vectors, one real
/// (expensive) evaluation per call.
pub trait Evaluator {
    fn num_objectives(&self) -> usize;

    fn bounds(&self) -> &BoundsBox;

    fn dim(&self) -> usize {
        self.bounds().dim()
    }

    /// `fe_index` is the 1-based ordinal of this evaluation; it is carried
    /// into errors and into the external protocol.
    fn evaluate(&mut self, x: &[f64], fe_index: usize) -> Result<Vec<f64>>;
}

impl<E: Evaluator + ?Sized> Evaluator for &mut E {
    fn num_objectives(&self) -> usize {
        (**self).num_objectives()
    }

    fn bounds(&self) -> &BoundsBox {
        (**self).bounds()
    }

    fn evaluate(&mut self, x: &[f64], fe_index: usize) -> Result<Vec<f64>> {
        (**self).evaluate(x, fe_index)
    }
}
