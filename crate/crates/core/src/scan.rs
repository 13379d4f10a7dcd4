//! Systematic searches for rational preimages.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fraction::{sigma_inv_rational, PolyFraction};
use crate::poly::FpPoly;
use crate::ring::PrimeModulus;

/// Deterministic source of scan inputs, all with constant term 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// Every polynomial of degree at most `max_degree`.
    Polynomials { p: PrimeModulus, max_degree: usize },
    /// Every reduced `f/g` with `deg f, deg g ≤ max_degree`, listed once.
    Fractions { p: PrimeModulus, max_degree: usize },
    /// `count` random fractions from a seed.
    Random { p: PrimeModulus, max_degree: usize, count: usize, seed: u64 },
    Empty,
}

/// Polynomials `1 + c_1X + … + c_dX^d`, counting in base `p`.
fn unit_polys(p: PrimeModulus, d: usize) -> impl Iterator<Item = FpPoly> {
    let pu = p.get() as u64;
    let total = pu.pow(d as u32);
    (0..total).map(move |mut code| {
        let mut coeffs = vec![1u32];
        for _ in 0..d {
            coeffs.push((code % pu) as u32);
            code /= pu;
        }
        FpPoly::new(p, coeffs)
    })
}

impl Generator {
    pub fn items(&self) -> Vec<PolyFraction> {
        match *self {
            Generator::Polynomials { p, max_degree } => unit_polys(p, max_degree).map(PolyFraction::from_poly).collect(),
            Generator::Fractions { p, max_degree } => {
                let polys: Vec<FpPoly> = unit_polys(p, max_degree).collect();
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for f in &polys {
                    for g in &polys {
                        let q = PolyFraction::new(f.clone(), g.clone()).expect("unit denominators");
                        if seen.insert(q.to_string()) {
                            out.push(q);
                        }
                    }
                }
                out
            }
            Generator::Random { p, max_degree, count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let draw = |rng: &mut ChaCha8Rng| {
                    let d = rng.gen_range(0..=max_degree);
                    let mut c: Vec<u32> = (0..=d).map(|_| rng.gen_range(0..p.get())).collect();
                    c[0] = 1;
                    FpPoly::new(p, c)
                };
                (0..count)
                    .map(|_| {
                        let f = draw(&mut rng);
                        let g = draw(&mut rng);
                        PolyFraction::new(f, g).expect("unit denominators")
                    })
                    .collect()
            }
            Generator::Empty => Vec::new(),
        }
    }
}

/// Whether `σ^{-1}(P) = Q/(1+X)^a` with `a ≤ 2^k`, `deg Q < 2^k`, where
/// `2^k` is the least power of two at least `deg P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeCheck {
    pub power_of_two: usize,
    pub denominator_exponent: Option<usize>,
    pub numerator_degree: usize,
    pub conforms: bool,
}

pub fn preimage_shape(p: &FpPoly, preimage: &PolyFraction) -> ShapeCheck {
    let bound = p.degree_or_zero().max(1).next_power_of_two();
    let den = preimage.den();
    let d = den.degree_or_zero();
    let one_plus_x = FpPoly::new(p.prime(), vec![1, 1]);
    let exponent = (one_plus_x.pow(d as u64) == *den).then_some(d);
    let numerator_degree = preimage.num().degree_or_zero();
    let conforms = exponent.is_some_and(|a| a <= bound) && numerator_degree < bound && preimage.num().constant_term() == 1;
    ShapeCheck { power_of_two: bound, denominator_exponent: exponent, numerator_degree, conforms }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ScanOutcome {
    Certified { fraction: String, cap: usize, order_checked: usize },
    /// No fraction within any cap of the schedule; a candidate for further
    /// study, not a counterexample.
    NotFound { max_cap: usize },
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRecord {
    pub index: usize,
    pub input: String,
    #[serde(flatten)]
    pub outcome: ScanOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeCheck>,
}

/// Tries each degree cap of `schedule` in turn.
pub fn scan_item(index: usize, a: &PolyFraction, schedule: &[usize]) -> ScanRecord {
    let mut outcome = ScanOutcome::NotFound { max_cap: schedule.iter().copied().max().unwrap_or(0) };
    let mut shape = None;
    for &cap in schedule {
        match sigma_inv_rational(a, cap) {
            Ok(Some(c)) => {
                if a.is_polynomial() && a.prime().get() == 2 {
                    shape = Some(preimage_shape(a.num(), &c.fraction));
                }
                outcome = ScanOutcome::Certified { fraction: c.fraction.to_string(), cap, order_checked: c.order_checked };
                break;
            }
            Ok(None) => {}
            Err(e) => {
                outcome = ScanOutcome::Error { message: e.to_string() };
                break;
            }
        }
    }
    ScanRecord { index, input: a.to_string(), outcome, shape }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_four_polynomials_over_f2_conform() {
        let items = Generator::Polynomials { p: PrimeModulus::two(), max_degree: 4 }.items();
        assert_eq!(items.len(), 16);
        for (i, a) in items.iter().enumerate() {
            let r = scan_item(i, a, &[8, 16]);
            assert!(matches!(r.outcome, ScanOutcome::Certified { .. }), "{r:?}");
            assert!(r.shape.unwrap().conforms, "{}", r.input);
        }
    }

    #[test]
    fn small_fractions_over_f3_reproduce_the_table() {
        let p = PrimeModulus::new(3).unwrap();
        let items = Generator::Fractions { p, max_degree: 2 }.items();
        let records: Vec<ScanRecord> = items.iter().enumerate().map(|(i, a)| scan_item(i, a, &[16, 32])).collect();
        let lookup = |input: &str| {
            records.iter().find(|r| r.input == input).map(|r| match &r.outcome {
                ScanOutcome::Certified { fraction, .. } => fraction.clone(),
                other => format!("{other:?}"),
            })
        };
        assert_eq!(lookup("1+X").unwrap(), "1/(1-X)");
        assert_eq!(lookup("1/(1+X)").unwrap(), "(1-X+X^2)/(1-X^2+X^3)");
        assert_eq!(lookup("(1+X)/(1-X)").unwrap(), "(1-X-X^2)/(1-X^2+X^3)");
    }

    #[test]
    fn empty_generator() {
        assert!(Generator::Empty.items().is_empty());
    }
}
