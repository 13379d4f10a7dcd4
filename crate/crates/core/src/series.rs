//! Truncated one-variable power series and the shuffle product.

use std::fmt;

use thiserror::Error;

use crate::digits::{carry_free_convolve, DigitWeights, FactorialUnits};
use crate::ring::{PrimeModulus, Ring, RingError, RingKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("series live over different rings ({0:?} vs {1:?})")]
    RingMismatch(Ring, Ring),
    #[error("constant term {0} is not invertible")]
    NonInvertibleConstantTerm(u32),
    #[error("constant term must be 1, found {0}")]
    BadConstantTerm(u32),
    #[error("operation requires p = {expected}, got p = {got}")]
    WrongModulus { expected: u32, got: u32 },
    #[error("operation requires coefficients in F_p")]
    NotField,
    #[error("series order must be at least 1")]
    EmptyOrder,
    #[error("fixed-point iteration did not settle within {0} iterations")]
    NonConvergence(usize),
    #[error("round trip failed at coefficient {0}")]
    RoundTrip(usize),
}

/// `α_0 + α_1 X + … + α_{N-1} X^{N-1} + O(X^N)` over `F_p` or `Z/p²`.
///
/// The order `N` is the number of known coefficients and is always at
/// least 1. Binary operations return the smaller of the two orders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncSeries {
    ring: Ring,
    coeffs: Vec<u32>,
}

impl TruncSeries {
    /// Builds a series from residues, reducing them into the ring.
    pub fn new(ring: Ring, mut coeffs: Vec<u32>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::EmptyOrder);
        }
        let m = ring.modulus();
        coeffs.iter_mut().for_each(|c| *c %= m);
        Ok(TruncSeries { ring, coeffs })
    }

    /// Internal constructor for already-reduced, non-empty coefficient vectors.
    pub(crate) fn from_raw(ring: Ring, coeffs: Vec<u32>) -> Self {
        debug_assert!(!coeffs.is_empty());
        debug_assert!(coeffs.iter().all(|&c| c < ring.modulus()));
        TruncSeries { ring, coeffs }
    }

    pub fn from_i64s(ring: Ring, values: &[i64]) -> Result<Self, SeriesError> {
        Self::new(ring, values.iter().map(|&v| ring.from_i64(v)).collect())
    }

    /// Series over `F_p` with the given residues.
    pub fn over_field(p: PrimeModulus, values: &[i64]) -> Result<Self, SeriesError> {
        Self::from_i64s(Ring::field(p), values)
    }

    pub fn from_fn(ring: Ring, order: usize, f: impl FnMut(usize) -> u32) -> Self {
        let order = order.max(1);
        let m = ring.modulus();
        let mut f = f;
        TruncSeries { ring, coeffs: (0..order).map(|n| f(n) % m).collect() }
    }

    pub fn zero(ring: Ring, order: usize) -> Self {
        Self::from_fn(ring, order, |_| 0)
    }

    pub fn constant(ring: Ring, c: u32, order: usize) -> Self {
        Self::from_fn(ring, order, |n| if n == 0 { c } else { 0 })
    }

    pub fn one(ring: Ring, order: usize) -> Self {
        Self::constant(ring, 1, order)
    }

    /// `c·X^e + O(X^order)`.
    pub fn monomial(ring: Ring, c: u32, e: usize, order: usize) -> Self {
        Self::from_fn(ring, order, |n| if n == e { c } else { 0 })
    }

    #[inline]
    pub fn ring(&self) -> Ring {
        self.ring
    }

    #[inline]
    pub fn prime(&self) -> PrimeModulus {
        self.ring.prime
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn coeff(&self, n: usize) -> u32 {
        self.coeffs[n]
    }

    /// Coefficient `n`, or `None` past the known order.
    pub fn get(&self, n: usize) -> Option<u32> {
        self.coeffs.get(n).copied()
    }

    #[inline]
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u32> {
        self.coeffs
    }

    pub fn constant_term(&self) -> u32 {
        self.coeffs[0]
    }

    /// Membership in `1 + X·K[[X]]`.
    pub fn has_unit_constant(&self) -> bool {
        self.coeffs[0] == 1
    }

    /// Membership in the ideal `X·K[[X]]`.
    pub fn in_ideal(&self) -> bool {
        self.coeffs[0] == 0
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Largest index with a non-zero coefficient.
    pub fn last_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.clamp(1, self.order());
        TruncSeries { ring: self.ring, coeffs: self.coeffs[..order].to_vec() }
    }

    /// Extends a polynomial-valued series with zeros. Only meaningful when
    /// the caller knows the missing coefficients vanish.
    pub fn pad_zeros(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        if order > coeffs.len() {
            coeffs.resize(order, 0);
        }
        TruncSeries { ring: self.ring, coeffs }
    }

    /// First index where the two series differ, within the common order.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        self.coeffs.iter().zip(&other.coeffs).position(|(a, b)| a != b)
    }

    /// Equality on the common order.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.ring == other.ring && self.first_difference(other).is_none()
    }

    fn check_same(&self, other: &Self) -> Result<usize, SeriesError> {
        if self.ring != other.ring {
            return Err(SeriesError::RingMismatch(self.ring, other.ring));
        }
        Ok(self.order().min(other.order()))
    }

    pub(crate) fn require_field(&self) -> Result<(), SeriesError> {
        if self.ring.is_field() {
            Ok(())
        } else {
            Err(SeriesError::NotField)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check_same(other)?;
        let r = self.ring;
        Ok(Self::from_raw(r, (0..n).map(|i| r.add(self.coeffs[i], other.coeffs[i])).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check_same(other)?;
        let r = self.ring;
        Ok(Self::from_raw(r, (0..n).map(|i| r.sub(self.coeffs[i], other.coeffs[i])).collect()))
    }

    pub fn neg(&self) -> Self {
        let r = self.ring;
        Self::from_raw(r, self.coeffs.iter().map(|&c| r.neg(c)).collect())
    }

    pub fn scale(&self, c: u32) -> Self {
        let r = self.ring;
        let c = c % r.modulus();
        Self::from_raw(r, self.coeffs.iter().map(|&a| r.mul(a, c)).collect())
    }

    /// `X^k · self`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        Self::from_fn(self.ring, n, |i| if i >= k { self.coeffs[i - k] } else { 0 })
    }

    /// The usual (Cauchy) product.
    pub fn cauchy_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check_same(other)?;
        let m = self.ring.modulus() as u64;
        let mut acc = vec![0u64; n];
        // keep the accumulator well below overflow: p⁴ · N < 2^64 for our ranges,
        // but reduce periodically anyway for very long inputs
        for (i, &a) in self.coeffs[..n].iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = a as u64;
            for (slot, &b) in acc[i..].iter_mut().zip(&other.coeffs[..n - i]) {
                *slot += a * b as u64;
            }
            if i % 4096 == 4095 {
                acc.iter_mut().for_each(|x| *x %= m);
            }
        }
        Ok(Self::from_raw(self.ring, acc.into_iter().map(|x| (x % m) as u32).collect()))
    }

    pub fn cauchy_square(&self) -> Self {
        self.cauchy_mul(self).expect("same ring")
    }

    pub fn cauchy_pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.ring, self.order());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.cauchy_mul(&base).expect("same ring");
            }
            e >>= 1;
            if e > 0 {
                base = base.cauchy_square();
            }
        }
        acc
    }

    /// Multiplicative inverse in the power-series ring.
    pub fn cauchy_inv(&self) -> Result<Self, SeriesError> {
        let r = self.ring;
        let inv0 = r
            .inv(self.coeffs[0])
            .ok_or(SeriesError::NonInvertibleConstantTerm(self.coeffs[0]))?;
        let n = self.order();
        let mut out = vec![0u32; n];
        out[0] = inv0;
        let m = r.modulus() as u64;
        for k in 1..n {
            let mut s = 0u64;
            for i in 1..=k {
                s += self.coeffs[i] as u64 * out[k - i] as u64;
            }
            out[k] = r.mul(r.neg((s % m) as u32), inv0);
        }
        Ok(Self::from_raw(r, out))
    }

    /// The shuffle product `Σ_n (Σ_{i+j=n} C(n,i) α_i β_j) X^n`.
    pub fn shuffle_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        let n = self.check_same(other)?;
        Ok(match self.ring.kind {
            RingKind::Field => self.shuffle_field(other, n),
            RingKind::Lift => self.shuffle_lift(other, n),
        })
    }

    fn shuffle_field(&self, other: &Self, n: usize) -> Self {
        let r = self.ring;
        let w = DigitWeights::new(r.prime, n);
        let a: Vec<u32> = (0..n).map(|i| r.mul(self.coeffs[i], w.inverse[i])).collect();
        let b: Vec<u32> = (0..n).map(|i| r.mul(other.coeffs[i], w.inverse[i])).collect();
        let c = carry_free_convolve(&a, &b, r.prime, r.modulus(), n);
        Self::from_raw(r, c.into_iter().enumerate().map(|(i, x)| r.mul(x, w.weight[i])).collect())
    }

    fn shuffle_lift(&self, other: &Self, n: usize) -> Self {
        let r = self.ring;
        let p = r.prime;
        let f = FactorialUnits::new(p, n);
        let m = r.modulus() as u64;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = 0u64;
            for i in 0..=k {
                let (a, b) = (self.coeffs[i], other.coeffs[k - i]);
                if a == 0 || b == 0 {
                    continue;
                }
                let c = f.binom_mod_p2(k, i, p);
                s += c as u64 * r.mul(a, b) as u64;
            }
            out.push((s % m) as u32);
        }
        Self::from_raw(r, out)
    }

    /// `self^{⧢k}` by binary exponentiation.
    pub fn shuffle_pow(&self, mut k: u64) -> Self {
        let mut acc = Self::one(self.ring, self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.shuffle_mul(&base).expect("same ring");
            }
            k >>= 1;
            if k > 0 {
                base = base.shuffle_mul(&base).expect("same ring");
            }
        }
        acc
    }

    /// Inverse for the shuffle product.
    ///
    /// Writing `A = α_0 (1 - a)` with `a` in the ideal, the inverse is
    /// `α_0^{-1} Σ_k a^{⧢k}`, summed by the doubling recursion
    /// `B ← B + B⧢C`, `C ← C⧢C`.
    pub fn shuffle_inv(&self) -> Result<Self, SeriesError> {
        let r = self.ring;
        let a0 = self.coeffs[0];
        let inv0 = r.inv(a0).ok_or(SeriesError::NonInvertibleConstantTerm(a0))?;
        let n = self.order();
        let normalized = self.scale(inv0);
        let mut c = Self::one(r, n).sub(&normalized).expect("same ring");
        let mut b = Self::one(r, n);
        let steps = usize::BITS - (n.max(1) - 1).leading_zeros() + 1;
        for _ in 0..steps {
            if c.is_zero() {
                break;
            }
            b = b.add(&b.shuffle_mul(&c).expect("same ring")).expect("same ring");
            c = c.shuffle_mul(&c).expect("same ring");
        }
        Ok(b.scale(inv0))
    }

    /// `A(X)^p = Σ α_n X^{np}` over `F_p`, truncated to the input order.
    pub fn frobenius(&self) -> Result<Self, SeriesError> {
        self.require_field()?;
        let p = self.ring.p() as usize;
        let n = self.order();
        Ok(Self::from_fn(self.ring, n, |i| if i % p == 0 { self.coeffs[i / p] } else { 0 }))
    }

    /// Canonical lift to `Z/p²` with representatives in `[0, p)`.
    pub fn lift(&self) -> Self {
        TruncSeries { ring: Ring::lift(self.ring.prime), coeffs: self.coeffs.clone() }
    }

    /// Reduction modulo `p`.
    pub fn reduce(&self) -> Self {
        let p = self.ring.p();
        TruncSeries {
            ring: Ring::field(self.ring.prime),
            coeffs: self.coeffs.iter().map(|&c| c % p).collect(),
        }
    }

    /// Evaluates the coefficients as a polynomial in the ring (for debugging
    /// and tests on polynomial-valued series).
    pub fn map(&self, mut f: impl FnMut(usize, u32) -> u32) -> Self {
        let r = self.ring;
        let m = r.modulus();
        Self::from_raw(r, self.coeffs.iter().enumerate().map(|(i, &c)| f(i, c) % m).collect())
    }
}

impl fmt::Display for TruncSeries {
    /// `1+X+2X^3+O(X^8)` with symmetric representatives.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (n, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            write_term(f, self.ring.signed(c), n, wrote)?;
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, "+O(X^{})", self.order())
    }
}

/// Writes `c·X^n` in the compact grammar (`+2X^3`, `-X`, `1`).
pub(crate) fn write_term(f: &mut impl fmt::Write, c: i64, n: usize, leading_sign: bool) -> fmt::Result {
    let sign = if c < 0 { "-" } else if leading_sign { "+" } else { "" };
    let mag = c.unsigned_abs();
    f.write_str(sign)?;
    match (n, mag) {
        (0, m) => write!(f, "{m}"),
        (_, 1) => write_power(f, n),
        (_, m) => {
            write!(f, "{m}")?;
            write_power(f, n)
        }
    }
}

fn write_power(f: &mut impl fmt::Write, n: usize) -> fmt::Result {
    if n == 1 {
        f.write_str("X")
    } else {
        write!(f, "X^{n}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> PrimeModulus {
        PrimeModulus::two()
    }

    fn f2(values: &[i64]) -> TruncSeries {
        TruncSeries::over_field(two(), values).unwrap()
    }

    #[test]
    fn cauchy_examples() {
        let a = f2(&[1, 1, 0, 0, 0]);
        assert_eq!(a.cauchy_mul(&a).unwrap(), f2(&[1, 0, 1, 0, 0]));
        let b = f2(&[1, 1, 1, 0, 0]);
        assert_eq!(a.cauchy_mul(&b).unwrap(), f2(&[1, 0, 0, 1, 0]));
    }

    #[test]
    fn shuffle_examples() {
        let a = f2(&[1, 1, 0, 0]);
        assert_eq!(a.shuffle_mul(&a).unwrap(), f2(&[1, 0, 0, 0]));
        let x = f2(&[0, 1, 0, 0]);
        let x2 = f2(&[0, 0, 1, 0]);
        assert_eq!(x.shuffle_mul(&x2).unwrap(), f2(&[0, 0, 0, 1]));
    }

    #[test]
    fn field_shuffle_matches_lift_reduction() {
        for p in [2u32, 3, 5, 7] {
            let pm = PrimeModulus::new(p).unwrap();
            let a = TruncSeries::from_fn(Ring::field(pm), 60, |i| (i * i + 3) as u32);
            let b = TruncSeries::from_fn(Ring::field(pm), 60, |i| (5 * i + 1) as u32);
            let fast = a.shuffle_mul(&b).unwrap();
            let slow = a.lift().shuffle_mul(&b.lift()).unwrap().reduce();
            assert_eq!(fast, slow, "p={p}");
        }
    }

    #[test]
    fn shuffle_inverse_of_one_minus_x_over_f3_is_factorials() {
        let p = PrimeModulus::new(3).unwrap();
        let a = TruncSeries::over_field(p, &[1, -1, 0, 0, 0, 0]).unwrap();
        let inv = a.shuffle_inv().unwrap();
        // n! mod 3: 1, 1, 2, 0, 0, 0
        assert_eq!(inv.coeffs(), &[1, 1, 2, 0, 0, 0]);
    }

    #[test]
    fn shuffle_inverse_roundtrip_lift() {
        let p = PrimeModulus::new(5).unwrap();
        let a = TruncSeries::from_fn(Ring::lift(p), 40, |i| (3 * i * i + 2) as u32);
        let inv = a.shuffle_inv().unwrap();
        assert_eq!(a.shuffle_mul(&inv).unwrap(), TruncSeries::one(Ring::lift(p), 40));
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(f2(&[1, 1, 0, 0]).frobenius().unwrap(), f2(&[1, 0, 1, 0]));
        let p = PrimeModulus::new(3).unwrap();
        let a = TruncSeries::over_field(p, &[1, 2, 0, 0, 0]).unwrap();
        assert_eq!(a.frobenius().unwrap().coeffs(), &[1, 0, 0, 2, 0]);
    }

    #[test]
    fn cauchy_inverse() {
        let a = f2(&[1, 1, 0, 0, 0, 0]);
        assert_eq!(a.cauchy_inv().unwrap(), f2(&[1, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn display() {
        let p = PrimeModulus::new(5).unwrap();
        let a = TruncSeries::over_field(p, &[1, 4, 0, 2]).unwrap();
        assert_eq!(a.to_string(), "1-X+2X^3+O(X^4)");
    }
}
