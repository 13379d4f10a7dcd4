use crate::series::{SeriesError, TruncSeries};

use super::{Form, InverseSolver, Inversion};

/// Solves for one coefficient at a time using the form's own triangular
/// structure.
pub struct TriangularSolver;

/// Iterates `Z ↦ Z + A - F(Z)` from `Z = A` until two iterates agree.
///
/// Each step fixes at least the lowest wrong coefficient, so `N + 1`
/// iterations always suffice at order `N`. In practice the count is often
/// close to `log₂ N` for `σ`, but not always, and `ψ` converges linearly.
pub struct FixedPointSolver;

impl InverseSolver for TriangularSolver {
    fn name(&self) -> &'static str {
        "triangular"
    }

    fn description(&self) -> &'static str {
        "coefficient-by-coefficient solve along the triangular structure"
    }

    fn invert(&self, form: &dyn Form, target: &TruncSeries) -> Result<Inversion, SeriesError> {
        Ok(Inversion { series: form.solve(target)?, iterations: 1 })
    }
}

impl InverseSolver for FixedPointSolver {
    fn name(&self) -> &'static str {
        "fixed-point"
    }

    fn description(&self) -> &'static str {
        "fixed-point iteration Z ↦ Z + A − F(Z), stopped when two iterates agree"
    }

    fn invert(&self, form: &dyn Form, target: &TruncSeries) -> Result<Inversion, SeriesError> {
        let budget = target.order() + 1;
        let mut z = target.clone();
        for step in 1..=budget {
            let next = z.add(target)?.sub(&form.apply(&z)?)?;
            if next == z {
                return Ok(Inversion { series: z, iterations: step });
            }
            z = next;
        }
        Err(SeriesError::NonConvergence(budget))
    }
}
