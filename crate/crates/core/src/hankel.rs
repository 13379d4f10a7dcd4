//! Recursive closure and Hankel rank of NC series.

use std::collections::VecDeque;

use thiserror::Error;

use crate::kernel::ClosureStop;
use crate::linalg::eliminator;
use crate::nc::{geometric, NCSeries, NcError, Word};
use crate::ring::Ring;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HankelError {
    #[error(transparent)]
    Nc(#[from] NcError),
    #[error("closure of {0} did not saturate")]
    Unsaturated(&'static str),
    #[error("block {rows}+{cols} needs order above {need}, series has {order}")]
    OrderExhausted { rows: usize, cols: usize, need: usize, order: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureElement {
    /// The element is `ρ(shift)A`.
    pub shift: Word,
    pub series: NCSeries,
    /// Words below this length are known for the element.
    pub trusted_order: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureBasis {
    pub elements: Vec<ClosureElement>,
    pub dim: usize,
    pub saturated: bool,
    pub stop: ClosureStop,
    /// Independence was decided on the words of length below this.
    pub compared_below: usize,
}

/// Closure of `{A}` under the shifts `ρ(x_s)`.
///
/// With `N = A.order` the shifts `ρ(T)A`, `|T| ≤ d + 1` where
/// `d = ⌊(N-1)/2⌋`, all know the words of length below `N - 1 - d`; that
/// common prefix decides independence. The basis is saturated when every
/// element has `|T| ≤ d` and all its children are dependent. Otherwise `dim`
/// is only a lower bound.
pub fn recursive_closure(a: &NCSeries, dim_cap: usize) -> ClosureBasis {
    let n = a.order();
    let depth = (n - 1) / 2;
    let h = n - 1 - depth;
    let words = Word::all_below(a.vars(), h);
    let mut elim = eliminator(a.ring().prime, words.len());
    let mut elements = Vec::new();
    let mut stop = ClosureStop::Closed;
    let mut queue = VecDeque::from([Word::EMPTY]);
    if h == 0 {
        queue.clear();
        stop = ClosureStop::OrderExhausted;
    }
    while let Some(t) = queue.pop_front() {
        let s = a.rho_shift(t).expect("shift depth is bounded by the order");
        if !elim.insert(&s.prefix_vector(&words)) {
            continue;
        }
        if elements.len() == dim_cap {
            stop = ClosureStop::CapExceeded;
            break;
        }
        if t.len() > depth {
            stop = ClosureStop::OrderExhausted;
        } else {
            queue.extend((0..a.vars() as u8).map(|x| Word::letter(x).concat(t)));
        }
        elements.push(ClosureElement { shift: t, trusted_order: s.order(), series: s });
    }
    ClosureBasis { dim: elements.len(), saturated: stop == ClosureStop::Closed, stop, elements, compared_below: h }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HankelSnapshot {
    pub rows: Vec<Word>,
    pub cols: Vec<Word>,
    /// `matrix[i][j] = (A, rows[i]·cols[j])`.
    pub matrix: Vec<Vec<u32>>,
    pub rank: usize,
}

/// The Hankel block on row words of length `≤ d_r` and column words of
/// length `≤ d_c`; its rank bounds the complexity from below.
pub fn hankel_rank(a: &NCSeries, d_r: usize, d_c: usize) -> Result<HankelSnapshot, HankelError> {
    if d_r + d_c >= a.order() {
        return Err(HankelError::OrderExhausted { rows: d_r, cols: d_c, need: d_r + d_c, order: a.order() });
    }
    let rows = Word::all_below(a.vars(), d_r + 1);
    let cols = Word::all_below(a.vars(), d_c + 1);
    let matrix: Vec<Vec<u32>> = rows.iter().map(|&r| cols.iter().map(|&c| a.coeff(r.concat(c))).collect()).collect();
    let mut elim = eliminator(a.ring().prime, cols.len());
    for row in &matrix {
        elim.insert(row);
    }
    Ok(HankelSnapshot { rank: elim.rank(), rows, cols, matrix })
}

/// Ranks of the balanced blocks `(d, d)` for `d = 0..=⌊(N-1)/2⌋`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub ranks: Vec<usize>,
    pub rank: usize,
    /// The last two ranks agree. This is a heuristic: the complexity is the
    /// rank of the infinite matrix and a finite block can stall.
    pub stabilized: bool,
}

pub fn stabilized_hankel_rank(a: &NCSeries) -> Result<RankProfile, HankelError> {
    let dmax = (a.order() - 1) / 2;
    let ranks = (0..=dmax).map(|d| hankel_rank(a, d, d).map(|s| s.rank)).collect::<Result<Vec<_>, _>>()?;
    let rank = *ranks.last().expect("at least one block");
    let stabilized = ranks.len() >= 2 && ranks[ranks.len() - 2] == rank;
    Ok(RankProfile { ranks, rank, stabilized })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductBoundReport {
    pub dim_left: usize,
    pub dim_right: usize,
    pub dim_product: usize,
    pub product_saturated: bool,
    pub bound: usize,
    pub holds: bool,
}

/// Checks `dim closure(A ⧢ B) ≤ dim Ā · dim B̄`. An unsaturated product
/// closure still gives a valid lower bound, so a violation is real either way.
pub fn closure_product_bound_check(a: &NCSeries, b: &NCSeries, cap: usize) -> Result<ProductBoundReport, HankelError> {
    let ca = recursive_closure(a, cap);
    if !ca.saturated {
        return Err(HankelError::Unsaturated("left factor"));
    }
    let cb = recursive_closure(b, cap);
    if !cb.saturated {
        return Err(HankelError::Unsaturated("right factor"));
    }
    let bound = ca.dim * cb.dim;
    let cp = recursive_closure(&a.shuffle(b)?, bound.max(cap));
    Ok(ProductBoundReport {
        dim_left: ca.dim,
        dim_right: cb.dim,
        dim_product: cp.dim,
        product_saturated: cp.saturated,
        bound,
        holds: cp.dim <= bound,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaBoundReport {
    pub dim_source: usize,
    pub dim_image: usize,
    pub image_saturated: bool,
    pub bound: usize,
    pub holds: bool,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Checks `dim closure(σ(A)) ≤ 1 + C(dim Ā + p - 1, p)`.
pub fn sigma_complexity_bound_check(a: &NCSeries, cap: usize) -> Result<SigmaBoundReport, HankelError> {
    let ca = recursive_closure(a, cap);
    if !ca.saturated {
        return Err(HankelError::Unsaturated("source"));
    }
    let p = a.ring().p() as usize;
    let bound = 1 + binomial(ca.dim + p - 1, p);
    let ci = recursive_closure(&a.sigma()?, bound.max(cap));
    Ok(SigmaBoundReport {
        dim_source: ca.dim,
        dim_image: ci.dim,
        image_saturated: ci.saturated,
        bound,
        holds: ci.dim <= bound,
    })
}

/// A small rational NC series: a scaled geometric progression plus a sparse
/// polynomial of degree at most 2.
pub fn random_rational_shaped<R: rand::Rng>(k: usize, order: usize, ring: Ring, rng: &mut R) -> Result<NCSeries, NcError> {
    let p = ring.p();
    let lambda: Vec<u32> = (0..k).map(|_| rng.gen_range(0..p)).collect();
    let mut s = geometric(&lambda, order, ring)?.scale(rng.gen_range(0..p));
    for w in Word::all_below(k, 3.min(order)) {
        if rng.gen_bool(0.3) {
            s.add_to(w, rng.gen_range(1..p));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraction::PolyFraction;
    use crate::nc::NcLimits;
    use crate::poly::FpPoly;
    use crate::ring::PrimeModulus;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(p: u32) -> Ring {
        Ring::field(PrimeModulus::new(p).unwrap())
    }

    fn mono(k: usize, order: usize, ring: Ring, word: &[u8]) -> NCSeries {
        let mut s = NCSeries::zero(k, order, ring).unwrap();
        s.set(Word::from_letters(word), 1);
        s
    }

    #[test]
    fn closure_examples() {
        let f2 = field(2);
        let g = geometric(&[1, 1], 8, f2).unwrap();
        let c = recursive_closure(&g, 4);
        assert_eq!((c.dim, c.saturated), (1, true));
        let c = recursive_closure(&mono(2, 8, f2, &[0]), 4);
        assert_eq!((c.dim, c.saturated), (2, true));
        assert_eq!(c.elements[1].series, NCSeries::one(2, 7, f2).unwrap());
        let c = recursive_closure(&g.add(&mono(2, 8, f2, &[0, 1, 1])).unwrap(), 2);
        assert_eq!(c.stop, ClosureStop::CapExceeded);
    }

    #[test]
    fn closure_of_polynomials_is_spanned_by_suffix_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for p in [2, 3] {
            let r = field(p);
            for _ in 0..20 {
                let mut a = NCSeries::zero(2, 8, r).unwrap();
                for w in Word::all_below(2, 3) {
                    if rng.gen_bool(0.5) {
                        a.set(w, rng.gen_range(1..p));
                    }
                }
                // ρ(T)A ≠ 0 only when T is a suffix of a support word
                let mut suffixes = std::collections::BTreeSet::new();
                for (w, _) in a.terms() {
                    let letters: Vec<u8> = w.letters().collect();
                    for i in 0..=letters.len() {
                        suffixes.insert(Word::from_letters(&letters[i..]));
                    }
                }
                let c = recursive_closure(&a, 16);
                assert!(c.saturated);
                assert!(c.dim <= suffixes.len() + 1);
            }
        }
    }

    #[test]
    fn hankel_examples() {
        let f2 = field(2);
        let g = geometric(&[1, 1], 8, f2).unwrap();
        assert_eq!(hankel_rank(&g, 3, 3).unwrap().rank, 1);
        assert_eq!(hankel_rank(&mono(2, 8, f2, &[0]), 1, 1).unwrap().rank, 2);
        assert!(matches!(hankel_rank(&g, 4, 4), Err(HankelError::OrderExhausted { .. })));
    }

    #[test]
    fn hankel_rank_matches_closure_when_saturated() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut checked = 0;
        for p in [2, 3] {
            for _ in 0..40 {
                let a = random_rational_shaped(2, 8, field(p), &mut rng).unwrap();
                let c = recursive_closure(&a, 32);
                let h = stabilized_hankel_rank(&a).unwrap();
                if c.saturated && h.stabilized {
                    assert_eq!(c.dim, h.rank, "{a}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 40);
    }

    #[test]
    fn one_variable_rank_is_the_complexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in [2, 3, 5] {
            let pm = PrimeModulus::new(p).unwrap();
            for _ in 0..10 {
                let num: Vec<u32> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..p)).collect();
                let mut den: Vec<u32> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..p)).collect();
                den[0] = 1;
                let Ok(f) = PolyFraction::new(FpPoly::new(pm, num), FpPoly::new(pm, den)) else { continue };
                if f.is_zero() {
                    continue;
                }
                let a = NCSeries::from_one_variable(&f.expand(25), NcLimits::extended()).unwrap();
                let h = stabilized_hankel_rank(&a).unwrap();
                assert!(h.stabilized);
                assert_eq!(h.rank, f.complexity().unwrap(), "{f}");
            }
        }
    }

    #[test]
    fn bound_examples() {
        let f2 = field(2);
        let g = geometric(&[1], 8, f2).unwrap();
        let r = closure_product_bound_check(&g, &g, 8).unwrap();
        assert_eq!((r.dim_product, r.bound, r.holds), (1, 1, true));
        let r = closure_product_bound_check(&mono(2, 8, f2, &[0]), &mono(2, 8, f2, &[1]), 8).unwrap();
        assert!(r.holds && r.bound == 4);
        let r = sigma_complexity_bound_check(&NCSeries::one(2, 8, f2).unwrap(), 8).unwrap();
        assert_eq!((r.dim_source, r.dim_image, r.bound), (1, 1, 2));
        let r = sigma_complexity_bound_check(&geometric(&[1, 1], 8, f2).unwrap(), 8).unwrap();
        assert_eq!((r.dim_source, r.bound), (1, 2));
        assert!(r.holds && r.image_saturated);
    }
}
