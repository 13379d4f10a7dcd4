//! `p`-kernels of one-variable series: decimations, closure under them,
//! polynomial relations, and a rough rational/algebraic triage.

use std::collections::VecDeque;

use thiserror::Error;

use crate::forms;
use crate::fraction::{reconstruct, FractionError, PolyFraction};
use crate::linalg::eliminator;
use crate::ring::{PrimeModulus, Ring};
use crate::series::{SeriesError, TruncSeries};

/// Kernel decisions are never taken on fewer coefficients than this.
pub const TRUST_FLOOR: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("shift {k} must be below p^f = {limit}")]
    BadShift { k: usize, limit: usize },
    #[error("no coefficients left after decimation")]
    OrderExhausted,
    #[error("kernel of {0} did not saturate; bound check is inconclusive")]
    Unsaturated(&'static str),
    #[error("operation requires p = {expected}, got p = {got}")]
    WrongModulus { expected: u32, got: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Fraction(#[from] FractionError),
}

/// `Σ_n α_{k + n·p^f} X^n`.
pub fn section(a: &TruncSeries, k: usize, f: u32) -> Result<TruncSeries, KernelError> {
    let step = (a.prime().get() as usize).pow(f);
    if k >= step {
        return Err(KernelError::BadShift { k, limit: step });
    }
    if k >= a.order() {
        return Err(KernelError::OrderExhausted);
    }
    let order = (a.order() - k).div_ceil(step);
    Ok(TruncSeries::from_fn(a.ring(), order, |n| a.coeff(k + n * step)))
}

/// Why a closure computation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureStop {
    /// Every decimation of every basis element is in the span.
    Closed,
    /// More independent elements than the cap allows.
    CapExceeded,
    /// Some decimation was too short to decide independence.
    OrderExhausted,
}

/// A spanning set of the decimation closure of a series.
#[derive(Debug, Clone)]
pub struct KernelBasis {
    pub basis: Vec<TruncSeries>,
    pub dim: usize,
    pub saturated: bool,
    pub stop: ClosureStop,
    /// Length of the common prefix on which independence was decided.
    pub common_order: usize,
}

/// Breadth-first closure of `{A}` under `S ↦ section(S, r, 1)`.
///
/// Independence is tested on the longest prefix known for every element
/// involved. When a shorter element forces a shorter prefix the basis is
/// re-checked on it; if it degenerates there, or the prefix would drop
/// below [`TRUST_FLOOR`], the element is left undecided and the result is
/// marked unsaturated.
pub fn kernel_closure(a: &TruncSeries, dim_cap: usize) -> KernelBasis {
    let p = a.prime();
    let pu = p.get() as usize;
    let mut basis: Vec<TruncSeries> = Vec::new();
    let mut common = a.order();
    let mut stop = ClosureStop::Closed;
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(cand) = queue.pop_front() {
        let len = common.min(cand.order());
        if len < TRUST_FLOOR {
            stop = ClosureStop::OrderExhausted;
            continue;
        }
        let mut elim = eliminator(p, len);
        let mut degenerate = false;
        for b in &basis {
            if !elim.insert(&b.coeffs()[..len]) {
                degenerate = true;
                break;
            }
        }
        if degenerate {
            stop = ClosureStop::OrderExhausted;
            continue;
        }
        if !elim.insert(&cand.coeffs()[..len]) {
            continue;
        }
        if basis.len() == dim_cap {
            stop = ClosureStop::CapExceeded;
            break;
        }
        common = len;
        for r in 0..pu {
            if let Ok(s) = section(&cand, r, 1) {
                queue.push_back(s);
            } else {
                stop = ClosureStop::OrderExhausted;
            }
        }
        basis.push(cand);
    }
    let dim = basis.len();
    KernelBasis { basis, dim, saturated: stop == ClosureStop::Closed, stop, common_order: common }
}

/// A polynomial `P(X, y) = Σ c·X^i·y^j` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub prime: PrimeModulus,
    /// `(i, j, c)` for the monomial `c·X^i·y^j`.
    pub terms: Vec<(usize, usize, u32)>,
}

impl Relation {
    pub fn new(prime: PrimeModulus, terms: Vec<(usize, usize, u32)>) -> Self {
        let p = prime.get();
        let terms = terms.into_iter().map(|(i, j, c)| (i, j, c % p)).filter(|t| t.2 != 0).collect();
        Relation { prime, terms }
    }

    pub fn y_degree(&self) -> usize {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }

    /// `P(X, z)` truncated to the order of `z`.
    pub fn evaluate(&self, z: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        z.require_field()?;
        let ring = z.ring();
        let n = z.order();
        let mut powers = vec![TruncSeries::one(ring, n)];
        for _ in 0..self.y_degree() {
            let next = powers.last().expect("non-empty").cauchy_mul(z)?;
            powers.push(next);
        }
        let mut acc = vec![0u32; n];
        for &(i, j, c) in &self.terms {
            for (slot, &v) in acc.iter_mut().skip(i).zip(powers[j].coeffs()) {
                *slot = ring.add(*slot, ring.mul(c, v));
            }
        }
        Ok(TruncSeries::from_raw(ring, acc))
    }
}

/// Whether `P(X, z) = 0` to the full order of `z`.
pub fn verify_poly_relation(z: &TruncSeries, rel: &Relation) -> Result<bool, SeriesError> {
    Ok(rel.evaluate(z)?.is_zero())
}

/// Kernel dimensions of `A` and `σ(A)` against `dim 𝒦(σA) ≤ 1 + C(1 + dim 𝒦(A), 2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBoundReport {
    pub dim_source: usize,
    pub dim_image: usize,
    pub image_saturated: bool,
    pub bound: usize,
    pub holds: bool,
}

pub fn kernel_bound_check(a: &TruncSeries, cap: usize) -> Result<KernelBoundReport, KernelError> {
    if a.prime().get() != 2 {
        return Err(KernelError::WrongModulus { expected: 2, got: a.prime().get() });
    }
    let ka = kernel_closure(a, cap);
    if !ka.saturated {
        return Err(KernelError::Unsaturated("the source"));
    }
    let image = forms::sigma(a)?;
    let ks = kernel_closure(&image, cap);
    let d = ka.dim;
    let bound = 1 + (d + 1) * d / 2;
    Ok(KernelBoundReport {
        dim_source: d,
        dim_image: ks.dim,
        image_saturated: ks.saturated,
        bound,
        holds: ks.dim <= bound,
    })
}

/// Outcome of [`classify`]. None of these are proofs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    RationalCandidate(RationalEvidence),
    AlgebraicCandidate { kernel_dim: usize },
    Unknown { kernel_dim: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalEvidence {
    /// Coefficients repeat with this preperiod and period.
    Periodic { preperiod: usize, period: usize },
    /// A fraction within the degree cap reproduces every known coefficient.
    Fraction(PolyFraction),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifyCaps {
    pub kernel_dim: usize,
    pub degree: usize,
}

impl Default for ClassifyCaps {
    fn default() -> Self {
        ClassifyCaps { kernel_dim: 64, degree: 64 }
    }
}

/// Smallest period `T` such that the sequence is periodic from some `s` on,
/// with `s + T ≤ N/4` so the repetition covers most of the prefix. Sparse
/// series have long zero runs; a weaker rule reads those as polynomials.
pub fn ultimate_period(s: &TruncSeries) -> Option<(usize, usize)> {
    let c = s.coeffs();
    let n = c.len();
    for period in 1..=n / 4 {
        let last_break = (0..n - period).rev().find(|&i| c[i] != c[i + period]);
        let start = last_break.map_or(0, |i| i + 1);
        if start + period <= n / 4 {
            return Some((start, period));
        }
    }
    None
}

pub fn classify(a: &TruncSeries, caps: ClassifyCaps) -> Result<Classification, KernelError> {
    a.require_field()?;
    if let Some((preperiod, period)) = ultimate_period(a) {
        return Ok(Classification::RationalCandidate(RationalEvidence::Periodic { preperiod, period }));
    }
    let degree = caps.degree.min(a.order().saturating_sub(1) / 2);
    if let Some(f) = reconstruct(a, degree)? {
        return Ok(Classification::RationalCandidate(RationalEvidence::Fraction(f)));
    }
    let k = kernel_closure(a, caps.kernel_dim);
    Ok(if k.saturated {
        Classification::AlgebraicCandidate { kernel_dim: k.dim }
    } else {
        Classification::Unknown { kernel_dim: k.dim }
    })
}

/// `Σ_n tm(n + s) X^n` reduced mod `p`.
pub fn thue_morse_series(ring: Ring, shift: usize, order: usize) -> TruncSeries {
    TruncSeries::from_fn(ring, order, |n| crate::digits::tm((n + shift) as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2ring() -> Ring {
        Ring::field(PrimeModulus::two())
    }

    fn lacunary_minus_one(order: usize) -> TruncSeries {
        TruncSeries::from_fn(f2ring(), order, |n| (n + 1).is_power_of_two() as u32)
    }

    #[test]
    fn sections() {
        let a = TruncSeries::from_fn(f2ring(), 20, |n| (n % 3 == 0) as u32);
        assert_eq!(section(&a, 0, 0).unwrap(), a);
        let ones = TruncSeries::from_fn(f2ring(), 20, |_| 1);
        assert!(section(&ones, 3, 2).unwrap().coeffs().iter().all(|&c| c == 1));
        let lac = lacunary_minus_one(64);
        // indices 2n+1 = 2^m - 1 <=> n = 2^{m-1} - 1
        assert_eq!(section(&lac, 1, 1).unwrap(), lacunary_minus_one(32));
        assert_eq!(section(&a, 4, 2).unwrap_err(), KernelError::BadShift { k: 4, limit: 4 });
    }

    #[test]
    fn section_composition() {
        let p = PrimeModulus::new(3).unwrap();
        let a = TruncSeries::from_fn(Ring::field(p), 200, |n| (n * n + 7 * n) as u32);
        for k1 in 0..3 {
            for k2 in 0..3 {
                let lhs = section(&section(&a, k1, 1).unwrap(), k2, 1).unwrap();
                let rhs = section(&a, k1 + 3 * k2, 2).unwrap();
                assert!(lhs.agrees_with(&rhs));
            }
        }
    }

    #[test]
    fn closure_examples() {
        let ones = TruncSeries::from_fn(f2ring(), 256, |_| 1);
        let k = kernel_closure(&ones, 8);
        assert_eq!((k.dim, k.saturated), (1, true));
        let tm = thue_morse_series(f2ring(), 0, 1024);
        let k = kernel_closure(&tm, 8);
        assert_eq!((k.dim, k.saturated), (2, true));
    }

    #[test]
    fn relation_for_lacunary() {
        let two = PrimeModulus::two();
        let y = lacunary_minus_one(512);
        let rel = Relation::new(two, vec![(0, 0, 1), (0, 1, 1), (1, 2, 1)]);
        assert!(verify_poly_relation(&y, &rel).unwrap());
        let one = TruncSeries::one(f2ring(), 10);
        let rel = Relation::new(two, vec![(0, 1, 1), (0, 0, 1)]);
        assert!(verify_poly_relation(&one, &rel).unwrap());
    }

    #[test]
    fn periodicity_detection() {
        let a = TruncSeries::from_fn(f2ring(), 64, |n| (n % 3 != 2) as u32);
        assert_eq!(ultimate_period(&a), Some((0, 3)));
        let lac = TruncSeries::from_fn(f2ring(), 64, |n| n.is_power_of_two() as u32);
        assert_eq!(ultimate_period(&lac), None);
        // coefficient n is 1 iff n has bits only in even positions; below
        // 4096 the last such n is 1365, leaving a long zero tail
        let cube_root = TruncSeries::from_fn(f2ring(), 4096, |n| (n & 0xAAA == 0) as u32);
        assert_eq!(ultimate_period(&cube_root), None);
    }

    #[test]
    fn classification() {
        let a = TruncSeries::from_fn(f2ring(), 256, |n| (n % 3 != 2) as u32);
        assert!(matches!(classify(&a, ClassifyCaps::default()).unwrap(), Classification::RationalCandidate(_)));
        let lac = lacunary_minus_one(4096);
        assert!(matches!(
            classify(&lac, ClassifyCaps::default()).unwrap(),
            Classification::AlgebraicCandidate { .. }
        ));
    }

    #[test]
    fn bound_examples() {
        let one = TruncSeries::one(f2ring(), 256);
        let r = kernel_bound_check(&one, 16).unwrap();
        assert_eq!((r.dim_source, r.dim_image), (1, 1));
        assert!(r.holds);
        let ones = TruncSeries::from_fn(f2ring(), 256, |_| 1);
        let r = kernel_bound_check(&ones, 16).unwrap();
        assert!(r.dim_image <= 2 && r.holds);
        assert!(kernel_bound_check(&lacunary_minus_one(1024), 16).unwrap().holds);
    }
}
