//! The p-homogeneous form `σ`, its `p = 2` variants `σ̃` and `ψ`, and the
//! solvers that invert them on `1 + X·F_p[[X]]`.
//!
//! Every form and every solver is a trait object registered under a name,
//! so callers (and the command line) pick an evaluation path at runtime.
//! All registered forms are triangular with unit diagonal: coefficient `n`
//! of `F(Z)` is `z_n` plus a function of `z_0, …, z_{n-1}`. That is what
//! makes each of them a bijection on `1 + X·F_p[[X]]`.

mod sigma;
mod solve;
mod variants;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use sigma::{sigma_digit, sigma_gf2, sigma_lift, SigmaAuto, SigmaDigit, SigmaGf2, SigmaLift};
pub use solve::{FixedPointSolver, TriangularSolver};
pub use variants::{psi_gf2, sigma_tilde_gf2, Psi, SigmaTilde};

use crate::ring::PrimeModulus;
use crate::series::{SeriesError, TruncSeries};

/// A triangular form on `F_p[[X]]`.
pub trait Form: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn supports(&self, p: PrimeModulus) -> bool;

    /// Evaluates the form; the result has the order of the input.
    fn apply(&self, a: &TruncSeries) -> Result<TruncSeries, SeriesError>;

    /// Finds `Z` with `Z(0) = 1` and `F(Z) = target` one coefficient at a
    /// time. The default re-evaluates the form on growing prefixes, which is
    /// slow but needs nothing beyond `apply`.
    fn solve(&self, target: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        let ring = target.ring();
        let n = target.order();
        let mut z = vec![0u32; n];
        z[0] = 1;
        for k in 1..n {
            let prefix = TruncSeries::from_raw(ring, z[..=k].to_vec());
            let lower = self.apply(&prefix)?.coeff(k);
            z[k] = ring.sub(target.coeff(k), lower);
        }
        Ok(TruncSeries::from_raw(ring, z))
    }
}

/// A strategy for inverting a [`Form`].
pub trait InverseSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn invert(&self, form: &dyn Form, target: &TruncSeries) -> Result<Inversion, SeriesError>;
}

/// Result of an inversion, with the iteration count for iterative solvers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inversion {
    pub series: TruncSeries,
    pub iterations: usize,
}

/// Name-keyed registry of trait objects.
pub struct Registry<T: ?Sized> {
    entries: BTreeMap<&'static str, Arc<T>>,
    default: &'static str,
}

impl<T: ?Sized> Registry<T> {
    pub fn get(&self, name: &str) -> Option<Arc<T>> {
        self.entries.get(name).cloned()
    }

    pub fn default_entry(&self) -> Arc<T> {
        self.entries[self.default].clone()
    }

    pub fn default_name(&self) -> &'static str {
        self.default
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Arc<T>)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }
}

pub type FormRegistry = Registry<dyn Form>;
pub type SolverRegistry = Registry<dyn InverseSolver>;

impl<T: ?Sized> Registry<T> {
    pub fn empty(default: &'static str) -> Self {
        Registry { entries: BTreeMap::new(), default }
    }

    pub fn register(&mut self, name: &'static str, entry: Arc<T>) {
        self.entries.insert(name, entry);
    }
}

/// Every built-in form, keyed by name; `sigma` is the default.
pub fn builtin_forms() -> FormRegistry {
    let mut reg = Registry::empty("sigma");
    let forms: [Arc<dyn Form>; 6] = [
        Arc::new(SigmaAuto),
        Arc::new(SigmaDigit),
        Arc::new(SigmaLift),
        Arc::new(SigmaGf2),
        Arc::new(SigmaTilde),
        Arc::new(Psi),
    ];
    for f in forms {
        reg.register(f.name(), f);
    }
    reg
}

/// Every built-in inverse solver; `triangular` is the default.
pub fn builtin_solvers() -> SolverRegistry {
    let mut reg = Registry::empty("triangular");
    let solvers: [Arc<dyn InverseSolver>; 2] = [Arc::new(TriangularSolver), Arc::new(FixedPointSolver)];
    for s in solvers {
        reg.register(s.name(), s);
    }
    reg
}

/// Checks that `form` can be applied to `a`.
pub(crate) fn check_input(form: &dyn Form, a: &TruncSeries) -> Result<(), SeriesError> {
    a.require_field()?;
    if !form.supports(a.prime()) {
        return Err(SeriesError::WrongModulus { expected: 2, got: a.prime().get() });
    }
    Ok(())
}

/// Inverts `form` at `target` with `solver` and confirms `F(result) = target`.
pub fn invert_with(
    form: &dyn Form,
    solver: &dyn InverseSolver,
    target: &TruncSeries,
) -> Result<Inversion, SeriesError> {
    check_input(form, target)?;
    if !target.has_unit_constant() {
        return Err(SeriesError::BadConstantTerm(target.constant_term()));
    }
    let out = solver.invert(form, target)?;
    let image = form.apply(&out.series)?;
    if let Some(k) = image.first_difference(target) {
        return Err(SeriesError::RoundTrip(k));
    }
    Ok(out)
}

fn invert_default(form: &dyn Form, target: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    invert_with(form, &TriangularSolver, target).map(|inv| inv.series)
}

/// `σ(A)`: the reduction mod `p` of `(Ã^{⧢p} - α̃_0^p)/p + α̃_0^p`.
pub fn sigma(a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    SigmaAuto.apply(a)
}

/// The unique `Z ∈ 1 + X·F_p[[X]]` with `σ(Z) = A`.
pub fn sigma_inv(a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    invert_default(&SigmaAuto, a)
}

pub fn sigma_tilde(a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    SigmaTilde.apply(a)
}

pub fn sigma_tilde_inv(a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    invert_default(&SigmaTilde, a)
}

pub fn psi(a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    Psi.apply(a)
}

pub fn psi_inv(a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    invert_default(&Psi, a)
}

/// `σ^n(A)` for any integer `n`; negative powers go through [`sigma_inv`].
pub fn iterate_sigma(a: &TruncSeries, n: i64) -> Result<TruncSeries, SeriesError> {
    let mut cur = a.clone();
    if n < 0 && !a.has_unit_constant() {
        return Err(SeriesError::BadConstantTerm(a.constant_term()));
    }
    for _ in 0..n.unsigned_abs() {
        cur = if n > 0 { sigma(&cur)? } else { sigma_inv(&cur)? };
    }
    Ok(cur)
}
