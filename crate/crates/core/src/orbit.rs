//! Dynamics of `σ` on `1 + X·F_2[[X]]`.

use std::collections::HashMap;

use crate::forms::{iterate_sigma, sigma_gf2};
use crate::fraction::{sigma_inv_rational, sigma_rational, PolyFraction};
use crate::poly::FpPoly;
use crate::ring::{PrimeModulus, Ring};
use crate::series::{SeriesError, TruncSeries};

/// Whether some `α_{2^k}` is non-zero within the known coefficients.
pub fn power_of_two_monomial_present(a: &TruncSeries) -> bool {
    (0..usize::BITS).map(|k| 1usize << k).take_while(|&i| i < a.order()).any(|i| a.coeff(i) != 0)
}

pub fn poly_has_power_of_two_monomial(p: &FpPoly) -> bool {
    p.coeffs().iter().enumerate().any(|(i, &c)| c != 0 && i.is_power_of_two())
}

/// `σ` of a polynomial over `F_2`, computed without truncation.
pub fn sigma_poly(p: &FpPoly) -> FpPoly {
    let len = 2 * p.degree_or_zero() + 1;
    FpPoly::from_series_prefix(&sigma_gf2(&p.to_series(len)), len)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitStatus {
    /// `σ^c(start) = start` with `c` minimal.
    Finite(usize),
    /// The start has a monomial `X^{2^k}`, so the orbit is infinite.
    InfiniteCertified,
    /// No return within this many iterations; nothing is claimed.
    Exhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord {
    pub start: FpPoly,
    pub status: OrbitStatus,
    pub trace: Vec<FpPoly>,
}

/// Iterates `σ` exactly on a polynomial with constant term 1 until it
/// returns to the start.
pub fn orbit_cardinality(start: &FpPoly, budget: usize) -> Result<OrbitRecord, SeriesError> {
    if start.prime().get() != 2 {
        return Err(SeriesError::WrongModulus { expected: 2, got: start.prime().get() });
    }
    if start.constant_term() != 1 {
        return Err(SeriesError::BadConstantTerm(start.constant_term()));
    }
    let mut trace = vec![start.clone()];
    if poly_has_power_of_two_monomial(start) {
        return Ok(OrbitRecord { start: start.clone(), status: OrbitStatus::InfiniteCertified, trace });
    }
    let mut seen: HashMap<FpPoly, usize> = HashMap::from([(start.clone(), 0)]);
    let mut cur = start.clone();
    for step in 1..=budget {
        cur = sigma_poly(&cur);
        if cur == *start {
            return Ok(OrbitRecord { start: start.clone(), status: OrbitStatus::Finite(step), trace });
        }
        // σ is a bijection, so the orbit cannot enter a cycle that misses the start
        debug_assert!(!seen.contains_key(&cur), "σ failed to be injective");
        seen.insert(cur.clone(), step);
        trace.push(cur.clone());
    }
    Ok(OrbitRecord { start: start.clone(), status: OrbitStatus::Exhausted(budget), trace })
}

/// `P_A = Σ_k α_{2^k} t^k`, one coefficient per power of two below the order.
pub fn aux_series(a: &TruncSeries) -> TruncSeries {
    let len = (0..usize::BITS).take_while(|&k| (1usize << k) < a.order()).count().max(1);
    TruncSeries::from_fn(Ring::field(PrimeModulus::two()), len, |k| {
        a.get(1 << k).map_or(0, |c| c & 1)
    })
}

/// Checks `P_{σ^k A} = (1+t)^k · P_A`.
pub fn aux_series_law_check(a: &TruncSeries, k: i64) -> Result<bool, SeriesError> {
    let image = iterate_sigma(a, k)?;
    let lhs = aux_series(&image);
    let pa = aux_series(a);
    let ring = pa.ring();
    let one_plus_t = TruncSeries::from_fn(ring, pa.order(), |i| (i <= 1) as u32);
    let factor = one_plus_t.cauchy_pow(k.unsigned_abs());
    let factor = if k < 0 { factor.cauchy_inv()? } else { factor };
    Ok(lhs.agrees_with(&factor.cauchy_mul(&pa)?))
}

/// One line of a degree-growth table.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthStep {
    pub n: i64,
    pub fraction: Option<PolyFraction>,
    pub degree: Option<usize>,
    /// `ln(degree) / |n|`, absent for `n = 0` and failed steps.
    pub log_ratio: Option<f64>,
}

/// Certified `σ^n(A)` for `n` in `range`, walking outwards from 0 in both
/// directions; a failed reconstruction ends the table on that side.
pub fn degree_growth(a: &PolyFraction, lo: i64, hi: i64, cap: usize) -> Vec<GrowthStep> {
    let mut rows = Vec::new();
    let make = |n: i64, f: Option<PolyFraction>| {
        let degree = f.as_ref().and_then(|f| f.degree().ok());
        let log_ratio = match degree {
            Some(d) if n != 0 && d > 0 => Some((d as f64).ln() / n.unsigned_abs() as f64),
            Some(_) if n != 0 => Some(0.0),
            _ => None,
        };
        GrowthStep { n, fraction: f, degree, log_ratio }
    };
    if lo <= 0 && 0 <= hi {
        rows.push(make(0, Some(a.clone())));
    }
    let mut cur = Some(a.clone());
    for n in 1..=hi.max(0) {
        cur = cur.and_then(|f| sigma_rational(&f).ok().map(|c| c.fraction));
        let failed = cur.is_none();
        if n >= lo {
            rows.push(make(n, cur.clone()));
        }
        if failed {
            break;
        }
    }
    let mut cur = Some(a.clone());
    let mut backward = Vec::new();
    for n in (lo.min(0)..0).rev() {
        cur = cur.and_then(|f| sigma_inv_rational(&f, cap).ok().flatten().map(|c| c.fraction));
        let failed = cur.is_none();
        if n <= hi {
            backward.push(make(n, cur.clone()));
        }
        if failed {
            break;
        }
    }
    backward.reverse();
    backward.extend(rows);
    backward
}

/// `σ^{-n}(σ^n(A))` round trip, used by property tests.
pub fn sigma_roundtrip(a: &TruncSeries, n: i64) -> Result<bool, SeriesError> {
    let there = iterate_sigma(a, n)?;
    let back = iterate_sigma(&there, -n)?;
    Ok(back == *a)
}

/// The 16 polynomials `1 + c_3X^3 + c_5X^5 + c_6X^6 + c_7X^7` over `F_2`.
pub fn small_orbit_starts() -> Vec<FpPoly> {
    (0u32..16)
        .map(|mask| {
            let mut coeffs = vec![1, 0, 0, 0, 0, 0, 0, 0];
            for (bit, idx) in [3usize, 5, 6, 7].iter().enumerate() {
                coeffs[*idx] = (mask >> bit) & 1;
            }
            FpPoly::new(PrimeModulus::two(), coeffs)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> PrimeModulus {
        PrimeModulus::two()
    }

    fn f2poly(c: &[i64]) -> FpPoly {
        FpPoly::from_i64s(two(), c)
    }

    /// Independent `σ` for polynomials: the double sum with binomial parity
    /// from Pascal's triangle.
    fn naive_sigma_poly(p: &FpPoly) -> FpPoly {
        let d = p.degree_or_zero();
        let n = 2 * d + 1;
        let mut pascal = vec![vec![0u8; n + 1]; n + 1];
        for i in 0..=n {
            pascal[i][0] = 1;
            for j in 1..=i {
                pascal[i][j] = (pascal[i - 1][j - 1] + if j < i { pascal[i - 1][j] } else { 0 }) % 4;
            }
        }
        // lift to Z/4, square with binomials, divide by 2
        let mut sq = vec![0u32; n];
        for i in 0..=d {
            for j in 0..=d {
                sq[i + j] += pascal[i + j][i] as u32 * p.coeff(i) * p.coeff(j);
            }
        }
        let mut out: Vec<u32> = sq.iter().map(|&v| (v % 4) / 2).collect();
        out[0] = p.coeff(0);
        FpPoly::new(two(), out)
    }

    fn naive_orbit(p: &FpPoly, budget: usize) -> Option<usize> {
        let mut cur = p.clone();
        for step in 1..=budget {
            cur = naive_sigma_poly(&cur);
            if cur == *p {
                return Some(step);
            }
        }
        None
    }

    #[test]
    fn examples() {
        assert!(power_of_two_monomial_present(&f2poly(&[1, 1]).to_series(8)));
        assert!(!power_of_two_monomial_present(&f2poly(&[1, 0, 0, 1]).to_series(8)));
        assert!(power_of_two_monomial_present(&f2poly(&[1, 0, 0, 1, 1]).to_series(8)));
        let r = orbit_cardinality(&f2poly(&[1, 0, 0, 1]), 10).unwrap();
        assert_eq!(r.status, OrbitStatus::Finite(1));
        let r = orbit_cardinality(&f2poly(&[1, 1]), 10).unwrap();
        assert_eq!(r.status, OrbitStatus::InfiniteCertified);
    }

    #[test]
    fn small_orbits_match_naive_iteration() {
        for start in small_orbit_starts() {
            let r = orbit_cardinality(&start, 1 << 12).unwrap();
            let OrbitStatus::Finite(c) = r.status else { panic!("{start}: {:?}", r.status) };
            assert!(c.is_power_of_two());
            assert_eq!(naive_orbit(&start, 1 << 12), Some(c), "{start}");
        }
    }

    #[test]
    fn aux_series_examples() {
        let a = f2poly(&[1, 1]).to_series(16);
        assert_eq!(aux_series(&a).coeffs(), &[1, 0, 0, 0]);
        let b = f2poly(&[1, 1, 1]).to_series(16);
        assert_eq!(aux_series(&b).coeffs(), &[1, 1, 0, 0]);
        assert!(aux_series_law_check(&a, 1).unwrap());
        assert!(aux_series_law_check(&a, 0).unwrap());
        assert!(aux_series_law_check(&b, -3).unwrap());
    }

    #[test]
    fn growth_table() {
        let a = PolyFraction::from_poly(f2poly(&[1, 1]));
        let rows = degree_growth(&a, -2, 0, 16);
        assert_eq!(rows[0].n, -2);
        assert_eq!(rows[0].degree, Some(2));
        let b = PolyFraction::new(f2poly(&[1]), f2poly(&[1, 1, 0, 1])).unwrap();
        let rows = degree_growth(&b, 0, 2, 16);
        assert_eq!(rows[2].degree, Some(8));
        assert_eq!(rows[2].fraction.as_ref().unwrap().to_string(), "(1+X+X^2+X^3+X^4+X^6+X^8)/(1+X^4+X^6)");
    }
}
