//! Base-`p` digit combinatorics.
//!
//! Binomial coefficients modulo `p` are governed by base-`p` digits: by
//! Kummer, the `p`-adic valuation of `C(i+j, i)` is the number of carries
//! when adding `i` and `j` in base `p`, and by Lucas, when there is no carry
//! `C(i+j, i) ≡ Π C(n_k, i_k) (mod p)` digit by digit.
//!
//! The same structure makes the shuffle product over `F_p` a *carry-free*
//! convolution after rescaling coefficient `n` by the product of its digit
//! factorials; [`carry_free_convolve`] is that kernel.

use crate::ring::{FpScalar, PrimeModulus, Ring};

/// Binary digit sum (the integral Thue–Morse function).
#[inline]
pub fn tm(n: u64) -> u32 {
    n.count_ones()
}

/// Sum of base-`p` digits of `n`.
pub fn digit_sum(mut n: u64, p: u32) -> u64 {
    let p = p as u64;
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// Number of carries when adding `i` and `j` in base `p`.
pub fn carry_count(mut i: u64, mut j: u64, p: PrimeModulus) -> u32 {
    let p = p.get() as u64;
    let (mut carry, mut count) = (0, 0);
    while i > 0 || j > 0 || carry > 0 {
        let s = i % p + j % p + carry;
        carry = u64::from(s >= p);
        count += carry as u32;
        i /= p;
        j /= p;
    }
    count
}

/// `C(i+j, i) mod p` by Lucas' theorem.
pub fn binom_mod_p(mut i: u64, mut j: u64, p: PrimeModulus) -> FpScalar {
    let pu = p.get() as u64;
    if pu == 2 {
        return FpScalar::new(i64::from(i & j == 0), p);
    }
    let ring = Ring::field(p);
    let fact = small_factorials(p);
    let mut acc = 1u32;
    while i > 0 || j > 0 {
        let (a, b) = ((i % pu) as usize, (j % pu) as usize);
        if a + b >= pu as usize {
            return FpScalar::zero(p);
        }
        // C(a+b, a) = (a+b)! / (a! b!), all factors are units since a+b < p
        let num = fact[a + b];
        let den = ring.mul(fact[a], fact[b]);
        acc = ring.mul(acc, ring.mul(num, ring.inv(den).expect("unit")));
        i /= pu;
        j /= pu;
    }
    FpScalar::new(acc as i64, p)
}

/// `0!, 1!, …, (p-1)!` modulo `p`.
fn small_factorials(p: PrimeModulus) -> Vec<u32> {
    let ring = Ring::field(p);
    let mut out = Vec::with_capacity(p.get() as usize);
    let mut acc = 1u32;
    out.push(1);
    for k in 1..p.get() {
        acc = ring.mul(acc, k);
        out.push(acc);
    }
    out
}

/// Digit-factorial weights `w(n) = Π_k (n_k)! mod p` and their inverses for
/// `n < len`. Every weight is a unit because each digit is `< p`.
#[derive(Debug, Clone)]
pub struct DigitWeights {
    pub weight: Vec<u32>,
    pub inverse: Vec<u32>,
}

impl DigitWeights {
    pub fn new(p: PrimeModulus, len: usize) -> Self {
        let ring = Ring::field(p);
        let pu = p.get() as usize;
        let fact = small_factorials(p);
        let fact_inv: Vec<u32> = fact.iter().map(|&f| ring.inv(f).expect("unit")).collect();
        let mut weight = Vec::with_capacity(len);
        let mut inverse = Vec::with_capacity(len);
        for n in 0..len {
            if n < pu {
                weight.push(fact[n]);
                inverse.push(fact_inv[n]);
            } else {
                weight.push(ring.mul(weight[n / pu], fact[n % pu]));
                inverse.push(ring.mul(inverse[n / pu], fact_inv[n % pu]));
            }
        }
        DigitWeights { weight, inverse }
    }
}

/// Unit parts and valuations of factorials: `n! = p^{val[n]} · unit[n]`
/// with `unit[n]` taken modulo `p²`.
#[derive(Debug, Clone)]
pub struct FactorialUnits {
    pub unit: Vec<u32>,
    pub unit_inv: Vec<u32>,
    pub val: Vec<u32>,
}

impl FactorialUnits {
    pub fn new(p: PrimeModulus, len: usize) -> Self {
        let lift = Ring::lift(p);
        let pu = p.get() as usize;
        let mut unit = Vec::with_capacity(len.max(1));
        let mut val = Vec::with_capacity(len.max(1));
        unit.push(1);
        val.push(0);
        for n in 1..len {
            let mut m = n;
            let mut v = 0;
            while m % pu == 0 {
                m /= pu;
                v += 1;
            }
            unit.push(lift.mul(unit[n - 1], (m % (pu * pu)) as u32));
            val.push(val[n - 1] + v);
        }
        let unit_inv = unit.iter().map(|&u| lift.inv(u).expect("unit")).collect();
        FactorialUnits { unit, unit_inv, val }
    }

    /// `C(n, i) mod p²`.
    pub fn binom_mod_p2(&self, n: usize, i: usize, p: PrimeModulus) -> u32 {
        let lift = Ring::lift(p);
        let v = self.val[n] - self.val[i] - self.val[n - i];
        if v >= 2 {
            return 0;
        }
        let u = lift.mul(self.unit[n], lift.mul(self.unit_inv[i], self.unit_inv[n - i]));
        if v == 1 {
            lift.mul(u, p.get())
        } else {
            u
        }
    }
}

/// Iterates over every `i` whose base-`p` digits are all at most those of
/// `n`, in decreasing order, ending with 0. These are exactly the `i` for
/// which `i + (n - i)` has no carries.
#[derive(Debug, Clone)]
pub struct DigitSubmasks {
    n: u64,
    p: u64,
    current: Option<u64>,
}

impl DigitSubmasks {
    pub fn new(n: u64, p: PrimeModulus) -> Self {
        DigitSubmasks { n, p: p.get() as u64, current: Some(n) }
    }
}

impl Iterator for DigitSubmasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.current?;
        if self.p == 2 {
            self.current = (cur != 0).then(|| (cur - 1) & self.n);
            return Some(cur);
        }
        if cur == 0 {
            self.current = None;
            return Some(0);
        }
        // decrement the lowest non-zero digit, restore the lower digits of n
        let mut place = 1u64;
        let mut c = cur;
        while c % self.p == 0 {
            c /= self.p;
            place *= self.p;
        }
        self.current = Some(cur - place + self.n % place);
        Some(cur)
    }
}

/// Carry-free product: `out[n] = Σ_{i ≤_digit n} a[i]·b[n-i] mod m` for
/// `n < out_len`, i.e. multiplication in `⊗_k (Z/m)[y_k]/(y_k^p)`.
///
/// Inputs are residues below `m ≤ p²`; the work is `Σ_n Π_k (n_k + 1)`,
/// which is `N^{log_p(p(p+1)/2)}` for `N = p^L`.
pub fn carry_free_convolve(a: &[u32], b: &[u32], p: PrimeModulus, m: u32, out_len: usize) -> Vec<u32> {
    let pu = p.get() as usize;
    let mut block = 1usize;
    while block < out_len {
        block *= pu;
    }
    let mut acc = vec![0u64; out_len];
    let a = &a[..a.len().min(out_len)];
    let b = &b[..b.len().min(out_len)];
    block_product(a, b, &mut acc, block, pu);
    acc.into_iter().map(|x| (x % m as u64) as u32).collect()
}

fn block_product(a: &[u32], b: &[u32], out: &mut [u64], size: usize, p: usize) {
    if a.is_empty() || b.is_empty() || out.is_empty() {
        return;
    }
    if size == 1 {
        out[0] += a[0] as u64 * b[0] as u64;
        return;
    }
    if size == p {
        for (d, &x) in a.iter().enumerate().take(p) {
            if x == 0 {
                continue;
            }
            let x = x as u64;
            for (e, &y) in b.iter().enumerate().take(p - d) {
                if d + e < out.len() {
                    out[d + e] += x * y as u64;
                }
            }
        }
        return;
    }
    let sub = size / p;
    let chunk = |s: &[u32], d: usize| -> (usize, usize) {
        let lo = (d * sub).min(s.len());
        let hi = ((d + 1) * sub).min(s.len());
        (lo, hi)
    };
    for d in 0..p {
        let (alo, ahi) = chunk(a, d);
        if alo == ahi {
            break;
        }
        for e in 0..p - d {
            let (blo, bhi) = chunk(b, e);
            if blo == bhi {
                break;
            }
            let olo = (d + e) * sub;
            if olo >= out.len() {
                break;
            }
            let ohi = ((d + e + 1) * sub).min(out.len());
            block_product(&a[alo..ahi], &b[blo..bhi], &mut out[olo..ohi], sub, p);
        }
    }
}
