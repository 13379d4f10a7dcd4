//! Dense polynomials over `F_p`.

use std::fmt;

use thiserror::Error;

use crate::ring::{PrimeModulus, Ring};
use crate::series::{write_term, TruncSeries};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("polynomials over different primes ({0} vs {1})")]
    ModulusMismatch(u32, u32),
}

/// A polynomial over `F_p`, coefficients in increasing degree, no trailing
/// zeros. The zero polynomial has no coefficients and no degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    prime: PrimeModulus,
    coeffs: Vec<u32>,
}

impl FpPoly {
    pub fn new(prime: PrimeModulus, mut coeffs: Vec<u32>) -> Self {
        let p = prime.get();
        coeffs.iter_mut().for_each(|c| *c %= p);
        let mut out = FpPoly { prime, coeffs };
        out.trim();
        out
    }

    pub fn from_i64s(prime: PrimeModulus, values: &[i64]) -> Self {
        let ring = Ring::field(prime);
        Self::new(prime, values.iter().map(|&v| ring.from_i64(v)).collect())
    }

    pub fn zero(prime: PrimeModulus) -> Self {
        FpPoly { prime, coeffs: Vec::new() }
    }

    pub fn one(prime: PrimeModulus) -> Self {
        Self::constant(prime, 1)
    }

    pub fn constant(prime: PrimeModulus, c: u32) -> Self {
        Self::new(prime, vec![c])
    }

    pub fn x(prime: PrimeModulus) -> Self {
        Self::monomial(prime, 1, 1)
    }

    pub fn monomial(prime: PrimeModulus, c: u32, e: usize) -> Self {
        let mut coeffs = vec![0; e + 1];
        coeffs[e] = c;
        Self::new(prime, coeffs)
    }

    /// The first `len` coefficients of a series as a polynomial.
    pub fn from_series_prefix(s: &TruncSeries, len: usize) -> Self {
        let len = len.min(s.order());
        Self::new(s.prime(), s.coeffs()[..len].iter().map(|&c| c % s.prime().get()).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    fn ring(&self) -> Ring {
        Ring::field(self.prime)
    }

    #[inline]
    pub fn prime(&self) -> PrimeModulus {
        self.prime
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Coefficient of `X^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, with 0 standing in for the zero polynomial.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> u32 {
        self.coeff(0)
    }

    /// Largest `k` with `X^k` dividing `self` (0 for the zero polynomial).
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|&c| c != 0).unwrap_or(0)
    }

    /// Number of non-zero coefficients.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(PolyError::ModulusMismatch(self.prime.get(), other.prime.get()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let r = self.ring();
        let n = self.coeffs.len().max(other.coeffs.len());
        Ok(Self::new(self.prime, (0..n).map(|i| r.add(self.coeff(i), other.coeff(i))).collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let r = self.ring();
        let n = self.coeffs.len().max(other.coeffs.len());
        Ok(Self::new(self.prime, (0..n).map(|i| r.sub(self.coeff(i), other.coeff(i))).collect()))
    }

    pub fn neg(&self) -> Self {
        let r = self.ring();
        Self::new(self.prime, self.coeffs.iter().map(|&c| r.neg(c)).collect())
    }

    pub fn scale(&self, c: u32) -> Self {
        let r = self.ring();
        Self::new(self.prime, self.coeffs.iter().map(|&a| r.mul(a, c % r.p())).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.prime));
        }
        let p = self.prime.get() as u64;
        let mut acc = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] += a as u64 * b as u64;
            }
            if i % 1024 == 1023 {
                acc.iter_mut().for_each(|x| *x %= p);
            }
        }
        Ok(Self::new(self.prime, acc.into_iter().map(|x| (x % p) as u32).collect()))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(self.prime);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same prime");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same prime");
            }
        }
        acc
    }

    /// `X^k · self`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0; k];
        coeffs.extend_from_slice(&self.coeffs);
        FpPoly { prime: self.prime, coeffs }
    }

    /// `self / X^k`, dropping the low coefficients.
    pub fn shift_down(&self, k: usize) -> Self {
        Self::new(self.prime, self.coeffs.iter().skip(k).copied().collect())
    }

    pub fn divmod(&self, divisor: &Self) -> Result<(Self, Self), PolyError> {
        self.check(divisor)?;
        let dd = divisor.degree().ok_or(PolyError::DivisionByZeroPoly)?;
        let r = self.ring();
        let lead_inv = r.inv(divisor.leading()).expect("non-zero in a field");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(self.prime), self.clone()));
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = r.mul(rem[i + dd], lead_inv);
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = r.sub(rem[i + j], r.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Self::new(self.prime, quot), Self::new(self.prime, rem)))
    }

    /// Monic scaling (the zero polynomial stays zero).
    pub fn monic(&self) -> Self {
        match self.ring().inv(self.leading()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divmod(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Exact quotient; panics in debug builds if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, PolyError> {
        let (q, r) = self.divmod(divisor)?;
        debug_assert!(r.is_zero(), "inexact division");
        Ok(q)
    }

    /// The polynomial as a series of the given order (truncating or padding).
    pub fn to_series(&self, order: usize) -> TruncSeries {
        TruncSeries::from_fn(Ring::field(self.prime), order, |i| self.coeff(i))
    }

    pub fn eval(&self, x: u32) -> u32 {
        let r = self.ring();
        self.coeffs.iter().rev().fold(0, |acc, &c| r.add(r.mul(acc, x), c))
    }

    /// Whether the compact printed form needs parentheses when used as a
    /// factor (more than one term, or a negative leading sign).
    pub(crate) fn is_compound(&self) -> bool {
        self.weight() > 1
    }
}

impl fmt::Display for FpPoly {
    /// `1-2X+X^3` with symmetric representatives; `0` for zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let r = self.ring();
        let mut wrote = false;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                write_term(f, r.signed(c), i, wrote)?;
                wrote = true;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2(values: &[i64]) -> FpPoly {
        FpPoly::from_i64s(PrimeModulus::two(), values)
    }

    #[test]
    fn gcd_and_division() {
        assert_eq!(f2(&[1, 1]).gcd(&f2(&[1, 0, 1])).unwrap(), f2(&[1, 1]));
        let (q, r) = f2(&[0, 0, 0, 1]).divmod(&f2(&[1, 1])).unwrap();
        assert_eq!(q, f2(&[1, 1, 1]));
        assert_eq!(r, f2(&[1]));
        assert_eq!(f2(&[1, 1]).mul(&f2(&[1, 1, 1])).unwrap(), f2(&[1, 0, 0, 1]));
        assert_eq!(f2(&[1]).divmod(&FpPoly::zero(PrimeModulus::two())), Err(PolyError::DivisionByZeroPoly));
    }

    #[test]
    fn divmod_identity_over_f5() {
        let p = PrimeModulus::new(5).unwrap();
        let a = FpPoly::from_i64s(p, &[3, 1, 4, 1, 5, 9, 2, 6]);
        let b = FpPoly::from_i64s(p, &[2, 7, 1, 8]);
        let (q, r) = a.divmod(&b).unwrap();
        assert!(r.degree().unwrap_or(0) < 3);
        assert_eq!(q.mul(&b).unwrap().add(&r).unwrap(), a);
    }

    #[test]
    fn display_uses_symmetric_coefficients() {
        let p = PrimeModulus::new(5).unwrap();
        assert_eq!(FpPoly::from_i64s(p, &[1, -2, 0, -2]).to_string(), "1-2X-2X^3");
        assert_eq!(FpPoly::zero(p).to_string(), "0");
        assert_eq!(f2(&[0, 1, 1]).to_string(), "X+X^2");
    }
}
