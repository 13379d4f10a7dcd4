//! The `p = 2` companions of `σ`.
//!
//! `σ̃(A) = Σ_{i≤j} C(i+j, i) α_iα_j X^{i+j}` differs from `σ` only by the
//! diagonal terms `α_{2^k} X^{2^{k+1}}` (since `C(2i, i)` is odd only for
//! `i = 0`). `ψ(A) = Σ_{i≤j} α_iα_j X^{i+j}` drops the binomials entirely.

use crate::bits::{BitSeries, MirroredBits};
use crate::ring::PrimeModulus;
use crate::series::{SeriesError, TruncSeries};

use super::sigma::{disjoint_pairs_parity, solve_gf2};
use super::{check_input, Form};

pub struct SigmaTilde;
pub struct Psi;

impl Form for SigmaTilde {
    fn name(&self) -> &'static str {
        "sigma-tilde"
    }

    fn description(&self) -> &'static str {
        "σ̃(A) = Σ_{i≤j} C(i+j,i) α_i α_j X^{i+j} over F_2"
    }

    fn supports(&self, p: PrimeModulus) -> bool {
        p.get() == 2
    }

    fn apply(&self, a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        check_input(self, a)?;
        Ok(sigma_tilde_gf2(a))
    }

    fn solve(&self, target: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        Ok(solve_gf2(target, false))
    }
}

impl Form for Psi {
    fn name(&self) -> &'static str {
        "psi"
    }

    fn description(&self) -> &'static str {
        "ψ(A) = Σ_{i≤j} α_i α_j X^{i+j} over F_2"
    }

    fn supports(&self, p: PrimeModulus) -> bool {
        p.get() == 2
    }

    fn apply(&self, a: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        check_input(self, a)?;
        Ok(psi_gf2(a))
    }

    fn solve(&self, target: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        Ok(solve_psi(target))
    }
}

pub fn sigma_tilde_gf2(a: &TruncSeries) -> TruncSeries {
    let bits = BitSeries::from_series(a);
    let n = a.order();
    let mut out = vec![0u32; n];
    out[0] = a.constant_term();
    for (k, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = disjoint_pairs_parity(&bits, k);
    }
    TruncSeries::from_raw(a.ring(), out)
}

pub fn psi_gf2(a: &TruncSeries) -> TruncSeries {
    let bits = MirroredBits::from_series(a);
    let n = a.order();
    let out = (0..n).map(|k| unordered_parity(&bits, k, 0)).collect();
    TruncSeries::from_raw(a.ring(), out)
}

/// Parity of `Σ_{lo ≤ i ≤ j, i+j = n} z_i z_j` given the ordered count.
fn unordered_parity(bits: &MirroredBits, n: usize, lo: usize) -> u32 {
    if n < 2 * lo {
        return 0;
    }
    let ordered = bits.pair_count(n, lo, n - lo);
    let middle = u32::from(n.is_multiple_of(2) && bits.get(n / 2));
    ((ordered + middle) / 2) & 1
}

fn solve_psi(target: &TruncSeries) -> TruncSeries {
    let n = target.order();
    let mut bits = MirroredBits::new(n);
    bits.set(0);
    for k in 1..n {
        // ψ(Z)_k = z_k + Σ_{1 ≤ i ≤ j, i+j = k} z_i z_j
        if target.coeff(k) ^ unordered_parity(&bits, k, 1) == 1 {
            bits.set(k);
        }
    }
    bits.to_series()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::binom_mod_p;

    fn f2(values: &[i64], order: usize) -> TruncSeries {
        let mut v = values.to_vec();
        v.resize(order, 0);
        TruncSeries::over_field(PrimeModulus::two(), &v).unwrap()
    }

    fn naive(a: &TruncSeries, binomial: bool) -> TruncSeries {
        let n = a.order();
        let mut out = vec![0u32; n];
        for i in 0..n {
            for j in i..n - i {
                let c = if binomial { binom_mod_p(i as u64, j as u64, PrimeModulus::two()).value() } else { 1 };
                out[i + j] ^= c & a.coeff(i) & a.coeff(j);
            }
        }
        TruncSeries::from_raw(a.ring(), out)
    }

    #[test]
    fn small_examples() {
        assert_eq!(psi_gf2(&f2(&[1, 1], 5)), f2(&[1, 1, 1], 5));
        // C(2,1) = 2 kills the (1,1) term
        assert_eq!(sigma_tilde_gf2(&f2(&[1, 1], 5)), f2(&[1, 1], 5));
    }

    #[test]
    fn tilde_of_geometric_is_power_of_two_indicator() {
        let ones = TruncSeries::from_fn(crate::ring::Ring::field(PrimeModulus::two()), 200, |_| 1);
        let s = sigma_tilde_gf2(&ones);
        for n in 0usize..200 {
            let expect = u32::from(n == 0 || n.is_power_of_two());
            assert_eq!(s.coeff(n), expect, "n={n}");
        }
    }

    #[test]
    fn against_naive_double_sum() {
        for seed in 0..10usize {
            let a = TruncSeries::from_fn(crate::ring::Ring::field(PrimeModulus::two()), 150, |i| {
                ((i * 7 + seed * i * i + seed) % 5 < 2) as u32
            });
            assert_eq!(psi_gf2(&a), naive(&a, false));
            assert_eq!(sigma_tilde_gf2(&a), naive(&a, true));
        }
    }

    #[test]
    fn psi_solver_roundtrip() {
        let target = f2(&[1, 1], 512);
        let z = solve_psi(&target);
        assert_eq!(psi_gf2(&z), target);
    }
}
