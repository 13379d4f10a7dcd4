//! Reduced rational fractions `f/g` with `g(0) = 1`, their expansions, and
//! recovery of fractions from truncated series.

use std::fmt;

use thiserror::Error;

use crate::forms;
use crate::poly::{FpPoly, PolyError};
use crate::ring::{PrimeModulus, Ring};
use crate::series::{SeriesError, TruncSeries};

/// Largest certification order we are willing to evaluate.
pub const MAX_CERTIFICATION_ORDER: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FractionError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("denominator vanishes at 0 after reduction; not a power series")]
    PoleAtZero,
    #[error("the zero fraction has no degree or complexity")]
    ZeroFraction,
    #[error("order {order} is too small for degree cap {cap} (need at least {need})")]
    OrderTooSmall { order: usize, cap: usize, need: usize },
    #[error("certification would need {0} coefficients")]
    CertificationTooLarge(u128),
}

/// `f/g` in lowest terms with `g(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyFraction {
    num: FpPoly,
    den: FpPoly,
}

impl PolyFraction {
    /// Reduces `num/den`. Common powers of `X` cancel; a remaining pole at
    /// `X = 0` is an error.
    pub fn new(num: FpPoly, den: FpPoly) -> Result<Self, FractionError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZeroPoly.into());
        }
        let prime = den.prime();
        if num.is_zero() {
            return Ok(PolyFraction { num, den: FpPoly::one(prime) });
        }
        let g = num.gcd(&den)?;
        let (mut num, mut den) = (num.div_exact(&g)?, den.div_exact(&g)?);
        let shift = den.valuation().min(num.valuation());
        if shift > 0 {
            num = num.shift_down(shift);
            den = den.shift_down(shift);
        }
        let d0 = den.constant_term();
        if d0 == 0 {
            return Err(FractionError::PoleAtZero);
        }
        let inv = Ring::field(prime).inv(d0).expect("non-zero");
        Ok(PolyFraction { num: num.scale(inv), den: den.scale(inv) })
    }

    pub fn from_poly(num: FpPoly) -> Self {
        let den = FpPoly::one(num.prime());
        PolyFraction { num, den }
    }

    pub fn one(prime: PrimeModulus) -> Self {
        Self::from_poly(FpPoly::one(prime))
    }

    pub fn num(&self) -> &FpPoly {
        &self.num
    }

    pub fn den(&self) -> &FpPoly {
        &self.den
    }

    pub fn prime(&self) -> PrimeModulus {
        self.den.prime()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_term(&self) -> u32 {
        self.num.constant_term()
    }

    /// `max(deg f, deg g)`.
    pub fn degree(&self) -> Result<usize, FractionError> {
        if self.is_zero() {
            return Err(FractionError::ZeroFraction);
        }
        Ok(self.num.degree_or_zero().max(self.den.degree_or_zero()))
    }

    /// `max(1 + deg f, deg g)`, the rank of the Hankel matrix of the expansion.
    pub fn complexity(&self) -> Result<usize, FractionError> {
        if self.is_zero() {
            return Err(FractionError::ZeroFraction);
        }
        Ok((1 + self.num.degree_or_zero()).max(self.den.degree_or_zero()))
    }

    /// The first `order` coefficients of `f · g^{-1}`.
    pub fn expand(&self, order: usize) -> TruncSeries {
        let ring = Ring::field(self.prime());
        let order = order.max(1);
        let p = ring.p() as u64;
        let g = self.den.coeffs();
        let mut out: Vec<u32> = Vec::with_capacity(order);
        for n in 0..order {
            let mut s = self.num.coeff(n) as u64;
            for (i, &gi) in g.iter().enumerate().skip(1).take(n) {
                if gi != 0 {
                    s += (p - gi as u64) * out[n - i] as u64;
                }
            }
            out.push((s % p) as u32);
        }
        TruncSeries::from_raw(ring, out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, FractionError> {
        let num = self.num.mul(&other.den)?.add(&other.num.mul(&self.den)?)?;
        Self::new(num, self.den.mul(&other.den)?)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FractionError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PolyFraction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FractionError> {
        Self::new(self.num.mul(&other.num)?, self.den.mul(&other.den)?)
    }

    pub fn div(&self, other: &Self) -> Result<Self, FractionError> {
        if other.is_zero() {
            return Err(PolyError::DivisionByZeroPoly.into());
        }
        Self::new(self.num.mul(&other.den)?, self.den.mul(&other.num)?)
    }

    pub fn pow(&self, e: i64) -> Result<Self, FractionError> {
        let base = if e < 0 { Self::one(self.prime()).div(self)? } else { self.clone() };
        let k = e.unsigned_abs();
        Self::new(base.num.pow(k), base.den.pow(k))
    }
}

impl fmt::Display for PolyFraction {
    /// `1+X+X^3`, `1/(1+X)`, `(1+X)/(1-2X)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.is_compound() {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        write!(f, "/({})", self.den)
    }
}

/// Recovers `f/g` with `deg f, deg g ≤ cap` from a truncation.
///
/// Runs the extended Euclidean algorithm on `(X^N, S)` until the remainder
/// has degree at most `cap`, then reduces the candidate and re-expands it
/// to the full order; anything that does not reproduce every known
/// coefficient is rejected. `Ok(None)` means no fraction within the cap.
pub fn reconstruct(s: &TruncSeries, cap: usize) -> Result<Option<PolyFraction>, FractionError> {
    s.require_field()?;
    let n = s.order();
    let need = 2 * cap + 1;
    if n < need {
        return Err(FractionError::OrderTooSmall { order: n, cap, need });
    }
    let prime = s.prime();
    let mut r0 = FpPoly::monomial(prime, 1, n);
    let mut r1 = FpPoly::from_series_prefix(s, n);
    let mut t0 = FpPoly::zero(prime);
    let mut t1 = FpPoly::one(prime);
    while r1.degree().is_some_and(|d| d > cap) {
        let (q, r) = r0.divmod(&r1)?;
        let t = t0.sub(&q.mul(&t1)?)?;
        (r0, r1) = (r1, r);
        (t0, t1) = (t1, t);
    }
    if t1.degree().is_some_and(|d| d > cap) {
        return Ok(None);
    }
    let candidate = match PolyFraction::new(r1, t1) {
        Ok(c) => c,
        Err(FractionError::PoleAtZero) => return Ok(None),
        Err(e) => return Err(e),
    };
    if candidate.num.degree().unwrap_or(0) > cap || candidate.den.degree().unwrap_or(0) > cap {
        return Ok(None);
    }
    Ok(candidate.expand(n).agrees_with(s).then_some(candidate))
}

/// `C(n, k)` saturating in `u128`.
fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Upper bound on `max(deg f, deg g)` for `σ` of a fraction of degree `d`.
///
/// The rank of the Hankel matrix of `f/g` is at most `d + 1`, the rank for
/// `σ(f/g)` is at most `1 + C(d + 1 + p - 1, p)`, and the degree is at most
/// the rank.
pub fn sigma_degree_bound(p: PrimeModulus, d: usize) -> u128 {
    1 + binomial(d as u128 + p.get() as u128, p.get() as u128)
}

/// Number of coefficients that certify `σ(A) = B` for fractions `A`, `B`:
/// two fractions of degrees `D₁`, `D₂` agreeing to order `D₁ + D₂ + 1`
/// are equal.
pub fn sigma_certification_order(p: PrimeModulus, deg_a: usize, deg_b: usize) -> Result<usize, FractionError> {
    let m = 1 + sigma_degree_bound(p, deg_a) + deg_b as u128;
    if m > MAX_CERTIFICATION_ORDER as u128 {
        return Err(FractionError::CertificationTooLarge(m));
    }
    Ok(m as usize)
}

/// A fraction together with the number of coefficients that certified it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certified {
    pub fraction: PolyFraction,
    pub order_checked: usize,
}

fn frac_degree_or_zero(a: &PolyFraction) -> usize {
    a.degree().unwrap_or(0)
}

/// Decides `σ(A) = B` exactly by comparing expansions to
/// [`sigma_certification_order`].
pub fn certify_sigma_identity(a: &PolyFraction, b: &PolyFraction) -> Result<bool, FractionError> {
    Ok(certify_sigma_identity_at(a, b)?.is_some())
}

/// Like [`certify_sigma_identity`], returning the order used on success.
pub fn certify_sigma_identity_at(a: &PolyFraction, b: &PolyFraction) -> Result<Option<usize>, FractionError> {
    if a.prime() != b.prime() {
        return Err(PolyError::ModulusMismatch(a.prime().get(), b.prime().get()).into());
    }
    let m = sigma_certification_order(a.prime(), frac_degree_or_zero(a), frac_degree_or_zero(b))?;
    let image = forms::sigma(&a.expand(m))?;
    Ok(image.agrees_with(&b.expand(m)).then_some(m))
}

/// Finds and certifies `σ^{-1}(A)` among fractions of degree at most `cap`.
pub fn sigma_inv_rational(a: &PolyFraction, cap: usize) -> Result<Option<Certified>, FractionError> {
    if a.constant_term() != 1 {
        return Err(SeriesError::BadConstantTerm(a.constant_term()).into());
    }
    let order = 2 * cap + 16;
    let z = forms::sigma_inv(&a.expand(order))?;
    let Some(candidate) = reconstruct(&z, cap)? else {
        return Ok(None);
    };
    Ok(certify_sigma_identity_at(&candidate, a)?.map(|m| Certified { fraction: candidate, order_checked: m }))
}

/// `σ(A)` as a fraction: expand far enough for the degree bound to pin the
/// result down, reconstruct, and certify.
pub fn sigma_rational(a: &PolyFraction) -> Result<Certified, FractionError> {
    let bound = sigma_degree_bound(a.prime(), frac_degree_or_zero(a));
    if bound > (MAX_CERTIFICATION_ORDER / 2) as u128 {
        return Err(FractionError::CertificationTooLarge(bound));
    }
    let bound = bound as usize;
    let image = forms::sigma(&a.expand(2 * bound + 2))?;
    let b = reconstruct(&image, bound)?.expect("σ of a fraction is a fraction within the degree bound");
    let m = certify_sigma_identity_at(a, &b)?.expect("reconstruction within the bound is exact");
    Ok(Certified { fraction: b, order_checked: m })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> PrimeModulus {
        PrimeModulus::two()
    }

    fn frac(p: PrimeModulus, num: &[i64], den: &[i64]) -> PolyFraction {
        PolyFraction::new(FpPoly::from_i64s(p, num), FpPoly::from_i64s(p, den)).unwrap()
    }

    #[test]
    fn normalization() {
        let f = frac(two(), &[0, 1, 1], &[0, 1, 0, 1]);
        // (X + X^2) / (X + X^3) = 1 / (1 + X)
        assert_eq!(f, frac(two(), &[1], &[1, 1]));
        let p5 = PrimeModulus::new(5).unwrap();
        let g = frac(p5, &[2], &[2, 4]);
        assert_eq!(g.den().constant_term(), 1);
        assert_eq!(g.to_string(), "1/(1+2X)");
        assert_eq!(
            PolyFraction::new(FpPoly::one(two()), FpPoly::x(two())),
            Err(FractionError::PoleAtZero)
        );
    }

    #[test]
    fn expansions() {
        assert_eq!(frac(two(), &[1], &[1]).expand(4).coeffs(), &[1, 0, 0, 0]);
        assert_eq!(frac(two(), &[1], &[1, 1]).expand(5).coeffs(), &[1, 1, 1, 1, 1]);
        let f = frac(two(), &[1, 1, 1], &[1, 0, 1]);
        assert_eq!(f.expand(8).coeffs(), &[1, 1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn degree_and_complexity() {
        let f = frac(two(), &[1], &[1, 1]);
        assert_eq!((f.degree().unwrap(), f.complexity().unwrap()), (1, 1));
        let g = frac(two(), &[1, 1, 0, 1], &[1, 0, 0, 0, 1]);
        assert_eq!((g.degree().unwrap(), g.complexity().unwrap()), (4, 4));
        let h = frac(two(), &[1, 1, 1, 1], &[1]);
        assert_eq!((h.degree().unwrap(), h.complexity().unwrap()), (3, 4));
        assert_eq!(PolyFraction::from_poly(FpPoly::zero(two())).degree(), Err(FractionError::ZeroFraction));
    }

    #[test]
    fn reconstruct_roundtrip_and_rejection() {
        let f = frac(two(), &[1], &[1, 1]);
        assert_eq!(reconstruct(&f.expand(32), 8).unwrap(), Some(f));
        let lacunary = TruncSeries::from_fn(Ring::field(two()), 64, |n| n.is_power_of_two() as u32);
        assert_eq!(reconstruct(&lacunary, 8).unwrap(), None);
        assert!(matches!(reconstruct(&lacunary, 40), Err(FractionError::OrderTooSmall { .. })));
    }

    #[test]
    fn reconstruct_over_f5() {
        let p = PrimeModulus::new(5).unwrap();
        let f = frac(p, &[1, -2, 0, -2], &[1, 0, 0, 0, -1, 2]);
        assert_eq!(reconstruct(&f.expand(40), 8).unwrap(), Some(f.clone()));
        assert_eq!(f.to_string(), "(1-2X-2X^3)/(1-X^4+2X^5)");
    }

    #[test]
    fn certification_examples() {
        let one = PolyFraction::one(two());
        assert!(certify_sigma_identity(&one, &one).unwrap());
        let inv = frac(two(), &[1], &[1, 1]);
        let onepx = frac(two(), &[1, 1], &[1]);
        assert!(certify_sigma_identity(&inv, &onepx).unwrap());
        let cube = frac(two(), &[1, 1, 1, 1], &[1]);
        assert!(!certify_sigma_identity(&onepx, &cube).unwrap());
        assert_eq!(sigma_certification_order(two(), 1, 1).unwrap(), 2 + 3 + 1);
    }

    #[test]
    fn preimage_pipeline() {
        let got = sigma_inv_rational(&frac(two(), &[1, 1], &[1]), 4).unwrap().unwrap();
        assert_eq!(got.fraction, frac(two(), &[1], &[1, 1]));
        let p3 = PrimeModulus::new(3).unwrap();
        let got = sigma_inv_rational(&frac(p3, &[1, 1], &[1]), 4).unwrap().unwrap();
        assert_eq!(got.fraction, frac(p3, &[1], &[1, -1]));
    }

    #[test]
    fn forward_sigma_of_fraction() {
        let got = sigma_rational(&frac(two(), &[1], &[1, 1])).unwrap();
        assert_eq!(got.fraction, frac(two(), &[1, 1], &[1]));
    }
}
