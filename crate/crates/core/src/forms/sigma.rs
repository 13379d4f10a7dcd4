//! Three evaluation paths for `σ`.
//!
//! * lift: the definition, an honest `p`-fold shuffle power in `Z/p²`.
//! * digit: rescale `α_n` by the inverse digit-factorial weight `w(n)`, take
//!   the `p`-th power in the carry-free ring `⊗_k (Z/p²)[y_k]/(y_k^p)` and
//!   divide by `p`. Tuples with carries have multinomials divisible by `p`
//!   and can be dropped; non-constant tuples come in cyclic orbits of size
//!   `p`, which is where the division by `p` happens. The only constant
//!   tuples that survive sit at `n = p^{k+1}` and contribute
//!   `c_k·α_{p^k}` with `c_k = U(p^{k+1})·U(p^k)^{-p}`, `U(m)` being the
//!   unit part of `m!`.
//! * gf2: for `p = 2` the above is
//!   `α_0 + Σ α_{2^k} X^{2^{k+1}} + Σ_{i<j, i&j=0} α_iα_j X^{i+j}`.

use crate::bits::BitSeries;
use crate::digits::{carry_free_convolve, DigitSubmasks, DigitWeights};
use crate::ring::{div_by_p, LiftScalar, PrimeModulus, Ring};
use crate::series::{SeriesError, TruncSeries};

use super::{check_input, Form};

pub struct SigmaLift;
pub struct SigmaDigit;
pub struct SigmaGf2;
/// `gf2` at `p = 2`, `digit` otherwise.
pub struct SigmaAuto;

impl Form for SigmaLift {
    fn name(&self) -> &'static str {
        "sigma-lift"
    }

    fn description(&self) -> &'static str {
        "σ by the p-fold shuffle power of the canonical lift in Z/p² (quadratic time, reference path)"
    }

    fn supports(&self, _p: PrimeModulus) -> bool {
        true
    }

    fn apply(&self, a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        check_input(self, a)?;
        sigma_lift(a)
    }
}

impl Form for SigmaDigit {
    fn name(&self) -> &'static str {
        "sigma-digit"
    }

    fn description(&self) -> &'static str {
        "σ via a carry-free p-th power of digit-factorial rescaled coefficients (any p)"
    }

    fn supports(&self, _p: PrimeModulus) -> bool {
        true
    }

    fn apply(&self, a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        check_input(self, a)?;
        sigma_digit(a)
    }

    fn solve(&self, target: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        Ok(solve_digit(target))
    }
}

impl Form for SigmaGf2 {
    fn name(&self) -> &'static str {
        "sigma-gf2"
    }

    fn description(&self) -> &'static str {
        "σ over F_2 from the explicit quadratic formula with disjoint-bit pairs (p = 2 only)"
    }

    fn supports(&self, p: PrimeModulus) -> bool {
        p.get() == 2
    }

    fn apply(&self, a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        check_input(self, a)?;
        Ok(sigma_gf2(a))
    }

    fn solve(&self, target: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        Ok(solve_gf2(target, true))
    }
}

impl Form for SigmaAuto {
    fn name(&self) -> &'static str {
        "sigma"
    }

    fn description(&self) -> &'static str {
        "σ by the fastest available path (sigma-gf2 for p = 2, sigma-digit otherwise)"
    }

    fn supports(&self, _p: PrimeModulus) -> bool {
        true
    }

    fn apply(&self, a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        check_input(self, a)?;
        if a.prime().get() == 2 {
            Ok(sigma_gf2(a))
        } else {
            sigma_digit(a)
        }
    }

    fn solve(&self, target: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        if target.prime().get() == 2 {
            Ok(solve_gf2(target, true))
        } else {
            Ok(solve_digit(target))
        }
    }
}

/// `σ` straight from the definition.
pub fn sigma_lift(a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    a.require_field()?;
    let field = a.ring();
    let p = field.prime;
    let power = a.lift().shuffle_pow(p.get() as u64);
    let mut out = Vec::with_capacity(a.order());
    out.push(field.pow(a.constant_term(), p.get() as u64));
    for &c in &power.coeffs()[1..] {
        out.push(div_by_p(LiftScalar::new(c as i64, p))?.value());
    }
    Ok(TruncSeries::from_raw(field, out))
}

/// `σ` by the carry-free digit path.
pub fn sigma_digit(a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
    a.require_field()?;
    let field = a.ring();
    let p = field.prime;
    let pu = p.get();
    let n = a.order();
    let w = DigitWeights::new(p, n);
    let beta: Vec<u32> = (0..n).map(|i| field.mul(a.coeff(i), w.inverse[i])).collect();
    let power = carry_free_power(&beta, p, n);
    let mut out = Vec::with_capacity(n);
    out.push(field.pow(a.constant_term(), pu as u64));
    for (&v, &weight) in power.iter().zip(&w.weight).skip(1) {
        if !v.is_multiple_of(pu) {
            return Err(crate::ring::RingError::NotDivisible { value: v, p: pu }.into());
        }
        out.push(field.mul(v / pu, weight));
    }
    for (source, target, c) in diagonal_terms(p, n) {
        out[target] = field.add(out[target], field.mul(c, a.coeff(source)));
    }
    Ok(TruncSeries::from_raw(field, out))
}

/// `σ` over `F_2` by the explicit formula.
pub fn sigma_gf2(a: &TruncSeries) -> TruncSeries {
    let bits = BitSeries::from_series(a);
    let n = a.order();
    let mut out = vec![0u32; n];
    out[0] = a.constant_term();
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = disjoint_pairs_parity(&bits, k);
    }
    for (source, target, _) in diagonal_terms(PrimeModulus::two(), n) {
        out[target] ^= bits.get(source) as u32;
    }
    TruncSeries::from_raw(a.ring(), out)
}

/// Parity of `#{ {i, j} : i < j, i & j = 0, i + j = n, α_i = α_j = 1 }`.
pub(super) fn disjoint_pairs_parity(bits: &BitSeries, n: usize) -> u32 {
    // ordered pairs (i, n-i) with i a submask of n; i = n-i is impossible for n > 0
    let mut ordered = 0u32;
    let mut i = n;
    loop {
        if bits.get(i) && bits.get(n - i) {
            ordered += 1;
        }
        if i == 0 {
            break;
        }
        i = (i - 1) & n;
    }
    (ordered / 2) & 1
}

/// `(source, target, c)` for the diagonal contributions `c·α_{p^k}` at
/// `X^{p^{k+1}}` below `order`.
fn diagonal_terms(p: PrimeModulus, order: usize) -> Vec<(usize, usize, u32)> {
    let pu = p.get() as usize;
    let field = Ring::field(p);
    let mut out = Vec::new();
    let mut src = 1usize;
    while src * pu < order {
        let c = if pu == 2 {
            1
        } else {
            let big = factorial_unit(src * pu, p) % p.get();
            let small = factorial_unit(src, p) % p.get();
            let small_p_inv = field.inv(field.pow(small, pu as u64)).expect("unit");
            field.mul(big, small_p_inv)
        };
        out.push((src, src * pu, c));
        src *= pu;
    }
    out
}

/// Unit part of `m!` modulo `p²`.
fn factorial_unit(m: usize, p: PrimeModulus) -> u32 {
    let lift = Ring::lift(p);
    let pu = p.get() as usize;
    let mut acc = 1u32;
    for mut j in 1..=m {
        while j % pu == 0 {
            j /= pu;
        }
        acc = lift.mul(acc, (j % (pu * pu)) as u32);
    }
    acc
}

/// `β^p` in the carry-free ring over `Z/p²`.
fn carry_free_power(beta: &[u32], p: PrimeModulus, n: usize) -> Vec<u32> {
    let m = p.square();
    let mut e = p.get();
    let mut acc: Option<Vec<u32>> = None;
    let mut base = beta.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => carry_free_convolve(&a, &base, p, m, n),
            });
        }
        e >>= 1;
        if e > 0 {
            base = carry_free_convolve(&base, &base, p, m, n);
        }
    }
    acc.expect("p >= 2")
}

/// Coefficient-by-coefficient inverse along the digit path.
///
/// With `β̃ = Z/w` and relaxed powers `Q_k = β̃^k`, coefficient `n` of `Q_k`
/// is `k·β̃_n + T_{k,n}` where `T_{k,n}` only involves earlier
/// coefficients; `σ(Z)_n = z_n + w(n)·T_{p,n}/p + diag_n`.
pub(super) fn solve_digit(target: &TruncSeries) -> TruncSeries {
    let field = target.ring();
    let p = field.prime;
    let pu = p.get() as usize;
    let m = p.square() as u64;
    let n = target.order();
    let w = DigitWeights::new(p, n);
    let diag = diagonal_terms(p, n);
    let mut z = vec![0u32; n];
    let mut beta = vec![0u32; n];
    // q[i * pu + (k - 1)] = Q_{k, i} mod p²
    let mut q = vec![0u32; n * pu];
    z[0] = 1;
    beta[0] = 1;
    q[..pu].fill(1);
    let mut acc = vec![0u64; pu + 1];
    let mut t = vec![0u64; pu + 1];
    for idx in 1..n {
        acc.fill(0);
        for i in DigitSubmasks::new(idx as u64, p) {
            let i = i as usize;
            if i == 0 || i == idx {
                continue;
            }
            let b = beta[idx - i] as u64;
            if b == 0 {
                continue;
            }
            let row = &q[i * pu..(i + 1) * pu];
            for k in 2..=pu {
                acc[k] += row[k - 2] as u64 * b;
            }
        }
        t[1] = 0;
        for k in 2..=pu {
            t[k] = (t[k - 1] + acc[k]) % m;
        }
        let tp = t[pu] as u32;
        debug_assert_eq!(tp % p.get(), 0);
        let mut zn = field.sub(target.coeff(idx), field.mul(w.weight[idx], tp / p.get()));
        if let Some(&(src, _, c)) = diag.iter().find(|d| d.1 == idx) {
            zn = field.sub(zn, field.mul(c, z[src]));
        }
        z[idx] = zn;
        beta[idx] = field.mul(zn, w.inverse[idx]);
        let bn = beta[idx] as u64;
        for k in 1..=pu {
            q[idx * pu + k - 1] = ((k as u64 * bn + t[k]) % m) as u32;
        }
    }
    TruncSeries::from_raw(field, z)
}

/// Coefficient-by-coefficient inverse over `F_2`, with or without the
/// diagonal `α_{2^k} X^{2^{k+1}}` terms (`σ` and `σ̃` respectively).
pub(super) fn solve_gf2(target: &TruncSeries, with_diagonal: bool) -> TruncSeries {
    let n = target.order();
    let mut bits = BitSeries::zeros(n);
    bits.set(0, true);
    for k in 1..n {
        let mut zk = target.coeff(k) ^ disjoint_pairs_parity(&bits, k);
        if with_diagonal && k >= 2 && k.is_power_of_two() {
            zk ^= bits.get(k / 2) as u32;
        }
        bits.set(k, zk == 1);
    }
    bits.to_series()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_constants() {
        // c_0 = p! / (1!)^p / p = (p-1)! = -1 mod p (Wilson)
        for p in [3u32, 5, 7, 11] {
            let pm = PrimeModulus::new(p).unwrap();
            let d = diagonal_terms(pm, (p * p + 1) as usize);
            assert_eq!(d[0], (1, p as usize, p - 1));
            assert_eq!(d.len(), 2);
        }
    }

    #[test]
    fn digit_path_matches_lift_path() {
        for p in [2u32, 3, 5, 7, 11, 13] {
            let pm = PrimeModulus::new(p).unwrap();
            for seed in 0..4usize {
                let a = TruncSeries::from_fn(Ring::field(pm), 3 * p as usize * p as usize + 5, |i| {
                    ((i * 31 + seed * 7 + i * i * seed) % 17) as u32
                });
                assert_eq!(sigma_digit(&a).unwrap(), sigma_lift(&a).unwrap(), "p={p} seed={seed}");
            }
        }
    }

    #[test]
    fn digit_solver_roundtrip() {
        for p in [2u32, 3, 5, 7] {
            let pm = PrimeModulus::new(p).unwrap();
            let a = TruncSeries::from_fn(Ring::field(pm), 120, |i| if i == 0 { 1 } else { (i * i % 13) as u32 });
            let z = solve_digit(&a);
            assert_eq!(sigma_digit(&z).unwrap(), a, "p={p}");
        }
    }
}
