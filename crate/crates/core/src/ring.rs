//! Prime fields `F_p` and the lift ring `Z/p²`.
//!
//! Scalars are stored as `u32` residues. Every prime we accept is at most
//! 251, so `p² < 2^16` and products of two residues fit in a `u32`; sums of
//! many products are accumulated in `u64` by the kernels that need them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Largest prime accepted as a modulus.
pub const MAX_PRIME: u32 = 251;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("prime {0} is outside the supported range 2..={MAX_PRIME}")]
    OutOfRange(u32),
    #[error("{value} is not divisible by {p}")]
    NotDivisible { value: u32, p: u32 },
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u32, u32),
}

/// A prime `p` with `2 <= p <= 251`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u32) -> Result<Self, RingError> {
        if !(2..=MAX_PRIME).contains(&p) {
            return Err(RingError::OutOfRange(p));
        }
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    /// `p = 2`, which is always valid.
    pub const fn two() -> Self {
        PrimeModulus(2)
    }

    #[inline]
    pub const fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn square(self) -> u32 {
        self.0 * self.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Which of the two coefficient rings a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingKind {
    /// The prime field `F_p`.
    Field,
    /// The lift ring `Z/p²`.
    Lift,
}

/// A coefficient ring: `F_p` or `Z/p²` for a given prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ring {
    pub prime: PrimeModulus,
    pub kind: RingKind,
}

impl Ring {
    pub const fn field(prime: PrimeModulus) -> Self {
        Ring { prime, kind: RingKind::Field }
    }

    pub const fn lift(prime: PrimeModulus) -> Self {
        Ring { prime, kind: RingKind::Lift }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.prime.get()
    }

    /// Size of the ring: `p` or `p²`.
    #[inline]
    pub fn modulus(&self) -> u32 {
        match self.kind {
            RingKind::Field => self.prime.get(),
            RingKind::Lift => self.prime.square(),
        }
    }

    pub fn is_field(&self) -> bool {
        self.kind == RingKind::Field
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        let m = self.modulus();
        if s >= m {
            s - m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.modulus() - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.modulus() - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a * b) % self.modulus()
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u32 {
        (x % self.modulus() as u64) as u32
    }

    pub fn from_i64(&self, x: i64) -> u32 {
        x.rem_euclid(self.modulus() as i64) as u32
    }

    pub fn pow(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.modulus();
        base %= self.modulus();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` when `a` is not a unit (divisible by `p`).
    pub fn inv(&self, a: u32) -> Option<u32> {
        let m = self.modulus() as i64;
        let (mut r0, mut r1) = (m, (a as i64).rem_euclid(m));
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        (r0 == 1).then(|| t0.rem_euclid(m) as u32)
    }

    /// Symmetric representative in `(-m/2, m/2]`, used for printing.
    pub fn signed(&self, a: u32) -> i64 {
        let m = self.modulus() as i64;
        let a = a as i64;
        if a > m / 2 {
            a - m
        } else {
            a
        }
    }
}

/// An element of `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    modulus: PrimeModulus,
}

impl FpScalar {
    pub fn new(value: i64, modulus: PrimeModulus) -> Self {
        let value = value.rem_euclid(modulus.get() as i64) as u32;
        FpScalar { value, modulus }
    }

    pub fn zero(modulus: PrimeModulus) -> Self {
        FpScalar { value: 0, modulus }
    }

    pub fn one(modulus: PrimeModulus) -> Self {
        FpScalar { value: 1, modulus }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Self> {
        Ring::field(self.modulus)
            .inv(self.value)
            .map(|value| FpScalar { value, modulus: self.modulus })
    }

    pub fn pow(self, e: u64) -> Self {
        let value = Ring::field(self.modulus).pow(self.value, e);
        FpScalar { value, modulus: self.modulus }
    }

    /// Canonical lift to `Z/p²` with representative in `[0, p)`.
    pub fn lift(self) -> LiftScalar {
        LiftScalar { value: self.value, modulus: self.modulus }
    }

    pub fn try_add(self, other: Self) -> Result<Self, RingError> {
        check(self.modulus, other.modulus)?;
        Ok(self + other)
    }
}

/// An element of `Z/p²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LiftScalar {
    value: u32,
    modulus: PrimeModulus,
}

impl LiftScalar {
    pub fn new(value: i64, modulus: PrimeModulus) -> Self {
        let value = value.rem_euclid(modulus.square() as i64) as u32;
        LiftScalar { value, modulus }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    /// Reduction mod `p`, a ring homomorphism onto `F_p`.
    pub fn reduce(self) -> FpScalar {
        FpScalar::new(self.value as i64, self.modulus)
    }

    pub fn inv(self) -> Option<Self> {
        Ring::lift(self.modulus)
            .inv(self.value)
            .map(|value| LiftScalar { value, modulus: self.modulus })
    }
}

fn check(a: PrimeModulus, b: PrimeModulus) -> Result<(), RingError> {
    if a == b {
        Ok(())
    } else {
        Err(RingError::ModulusMismatch(a.get(), b.get()))
    }
}

macro_rules! scalar_ops {
    ($ty:ident, $ring:ident) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: $ty) -> $ty {
                assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
                let value = Ring::$ring(self.modulus).add(self.value, rhs.value);
                $ty { value, modulus: self.modulus }
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: $ty) -> $ty {
                assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
                let value = Ring::$ring(self.modulus).sub(self.value, rhs.value);
                $ty { value, modulus: self.modulus }
            }
        }
        impl Mul for $ty {
            type Output = $ty;
            fn mul(self, rhs: $ty) -> $ty {
                assert_eq!(self.modulus, rhs.modulus, "modulus mismatch");
                let value = Ring::$ring(self.modulus).mul(self.value, rhs.value);
                $ty { value, modulus: self.modulus }
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                let value = Ring::$ring(self.modulus).neg(self.value);
                $ty { value, modulus: self.modulus }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.value)
            }
        }
    };
}

scalar_ops!(FpScalar, field);
scalar_ops!(LiftScalar, lift);

/// Extracts `x / p mod p` from a lift-ring element divisible by `p`.
pub fn div_by_p(x: LiftScalar) -> Result<FpScalar, RingError> {
    let p = x.modulus.get();
    if !x.value.is_multiple_of(p) {
        return Err(RingError::NotDivisible { value: x.value, p });
    }
    Ok(FpScalar::new((x.value / p) as i64, x.modulus))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_out_of_range() {
        assert_eq!(PrimeModulus::new(4), Err(RingError::NotPrime(4)));
        assert_eq!(PrimeModulus::new(1), Err(RingError::OutOfRange(1)));
        assert_eq!(PrimeModulus::new(257), Err(RingError::OutOfRange(257)));
        assert!(PrimeModulus::new(251).is_ok());
        assert!(PrimeModulus::new(249).is_err());
    }

    #[test]
    fn field_inverse() {
        let p = PrimeModulus::new(7).unwrap();
        for a in 1..7 {
            let x = FpScalar::new(a, p);
            assert_eq!(x * x.inv().unwrap(), FpScalar::one(p));
        }
        assert!(FpScalar::zero(p).inv().is_none());
    }

    #[test]
    fn lift_units_and_reduction() {
        let p = PrimeModulus::new(5).unwrap();
        assert!(LiftScalar::new(10, p).inv().is_none());
        let u = LiftScalar::new(7, p);
        assert_eq!((u * u.inv().unwrap()).value(), 1);
        let (a, b) = (LiftScalar::new(13, p), LiftScalar::new(22, p));
        assert_eq!((a * b).reduce(), a.reduce() * b.reduce());
        assert_eq!((a + b).reduce(), a.reduce() + b.reduce());
    }

    #[test]
    fn div_by_p_examples() {
        let two = PrimeModulus::two();
        let five = PrimeModulus::new(5).unwrap();
        assert_eq!(div_by_p(LiftScalar::new(0, two)).unwrap().value(), 0);
        assert_eq!(div_by_p(LiftScalar::new(2, two)).unwrap().value(), 1);
        assert_eq!(div_by_p(LiftScalar::new(15, five)).unwrap().value(), 3);
        assert_eq!(
            div_by_p(LiftScalar::new(7, five)),
            Err(RingError::NotDivisible { value: 7, p: 5 })
        );
    }

    #[test]
    fn signed_representatives() {
        let r = Ring::field(PrimeModulus::new(5).unwrap());
        assert_eq!(r.signed(3), -2);
        assert_eq!(r.signed(2), 2);
        assert_eq!(r.signed(4), -1);
    }
}
