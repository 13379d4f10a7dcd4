use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::ring::{div_by_p, LiftScalar, Ring};
use crate::series::TruncSeries;

use super::word::{Word, MAX_WORD_LEN};
use super::{NcError, NcLimits};

/// A series in `k` non-commuting variables, known for all words of length
/// below `order`. Only non-zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCSeries {
    k: usize,
    order: usize,
    ring: Ring,
    coeffs: BTreeMap<Word, u32>,
}

type Expansion = Rc<Vec<(Word, u32)>>;

impl NCSeries {
    /// The zero series, checked against the default limits.
    pub fn zero(k: usize, order: usize, ring: Ring) -> Result<Self, NcError> {
        Self::zero_with_limits(k, order, ring, NcLimits::default())
    }

    pub fn zero_with_limits(k: usize, order: usize, ring: Ring, limits: NcLimits) -> Result<Self, NcError> {
        limits.check(k, order)?;
        Ok(NCSeries { k, order, ring, coeffs: BTreeMap::new() })
    }

    pub fn one(k: usize, order: usize, ring: Ring) -> Result<Self, NcError> {
        let mut s = Self::zero(k, order, ring)?;
        s.set(Word::EMPTY, 1);
        Ok(s)
    }

    /// A one-variable series seen as an NC series in `x1`.
    pub fn from_one_variable(s: &TruncSeries, limits: NcLimits) -> Result<Self, NcError> {
        let mut out = Self::zero_with_limits(1, s.order(), s.ring(), limits)?;
        let mut w = Word::EMPTY;
        for (i, &c) in s.coeffs().iter().enumerate() {
            if i > 0 {
                w = w.push(0);
            }
            out.set(w, c);
        }
        Ok(out)
    }

    /// Same shape, no coefficients.
    pub fn empty_like(&self) -> Self {
        NCSeries { k: self.k, order: self.order, ring: self.ring, coeffs: BTreeMap::new() }
    }

    fn with_order(&self, order: usize) -> Self {
        NCSeries { k: self.k, order, ring: self.ring, coeffs: BTreeMap::new() }
    }

    #[inline]
    pub fn vars(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn coeff(&self, w: Word) -> u32 {
        self.coeffs.get(&w).copied().unwrap_or(0)
    }

    /// Sets a coefficient; words at or beyond the order are ignored.
    pub fn set(&mut self, w: Word, c: u32) {
        if w.len() >= self.order {
            return;
        }
        let c = c % self.ring.modulus();
        if c == 0 {
            self.coeffs.remove(&w);
        } else {
            self.coeffs.insert(w, c);
        }
    }

    pub fn add_to(&mut self, w: Word, c: u32) {
        let cur = self.coeff(w);
        self.set(w, self.ring.add(cur, c % self.ring.modulus()));
    }

    pub fn terms(&self) -> impl Iterator<Item = (Word, u32)> + '_ {
        self.coeffs.iter().map(|(w, c)| (*w, *c))
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn constant_term(&self) -> u32 {
        self.coeff(Word::EMPTY)
    }

    pub fn has_unit_constant(&self) -> bool {
        self.constant_term() == 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut out = self.with_order(order.min(self.order));
        for (w, c) in self.terms() {
            out.set(w, c);
        }
        out
    }

    fn check(&self, other: &Self) -> Result<usize, NcError> {
        if self.k != other.k || self.ring != other.ring {
            return Err(NcError::ShapeMismatch);
        }
        Ok(self.order.min(other.order))
    }

    /// Equality on the common order.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = self.order.min(other.order);
        self.k == other.k && self.ring == other.ring && self.truncate(n).coeffs == other.truncate(n).coeffs
    }

    pub fn add(&self, other: &Self) -> Result<Self, NcError> {
        let n = self.check(other)?;
        let mut out = self.truncate(n);
        for (w, c) in other.terms() {
            out.add_to(w, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NcError> {
        self.add(&other.scale(self.ring.modulus() - 1))
    }

    pub fn scale(&self, c: u32) -> Self {
        let mut out = self.empty_like();
        for (w, a) in self.terms() {
            out.set(w, self.ring.mul(a, c % self.ring.modulus()));
        }
        out
    }

    /// Concatenation product.
    pub fn concat_mul(&self, other: &Self) -> Result<Self, NcError> {
        let n = self.check(other)?;
        let mut out = self.with_order(n);
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                if u.len() + v.len() < n {
                    out.add_to(u.concat(v), self.ring.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// Canonical lift to `Z/p²`.
    pub fn lift(&self) -> Self {
        NCSeries { ring: Ring::lift(self.ring.prime), ..self.clone() }
    }

    /// Reduction modulo `p`.
    pub fn reduce(&self) -> Self {
        let mut out = NCSeries { ring: Ring::field(self.ring.prime), ..self.empty_like() };
        for (w, c) in self.terms() {
            out.set(w, c);
        }
        out
    }

    /// The shuffle product, by the recursive law
    /// `(u·x_s) ⧢ (v·x_t) = (u ⧢ v·x_t)·x_s + (u·x_s ⧢ v)·x_t`
    /// memoized on word pairs for the duration of the call.
    pub fn shuffle(&self, other: &Self) -> Result<Self, NcError> {
        let n = self.check(other)?;
        let mut memo = HashMap::new();
        let m = self.ring.modulus();
        let mut out = self.with_order(n);
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                if u.len() + v.len() >= n {
                    continue;
                }
                let ab = self.ring.mul(a, b);
                for &(w, c) in shuffle_words(u, v, m, &mut memo).iter() {
                    out.add_to(w, self.ring.mul(ab, c));
                }
            }
        }
        Ok(out)
    }

    pub fn shuffle_pow(&self, mut e: u64) -> Self {
        let mut acc = self.with_order(self.order);
        acc.set(Word::EMPTY, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.shuffle(&base).expect("same shape");
            }
            e >>= 1;
            if e > 0 {
                base = base.shuffle(&base).expect("same shape");
            }
        }
        acc
    }

    /// Shuffle inverse by the doubling recursion on `A = α(1 - a)`.
    pub fn shuffle_inv(&self) -> Result<Self, NcError> {
        let r = self.ring;
        let a0 = self.constant_term();
        let inv0 = r.inv(a0).ok_or(NcError::NonInvertibleConstantTerm(a0))?;
        let mut one = self.empty_like();
        one.set(Word::EMPTY, 1);
        let mut c = one.sub(&self.scale(inv0))?;
        let mut b = one;
        let steps = usize::BITS - self.order.max(1).leading_zeros() + 1;
        for _ in 0..steps {
            if c.is_zero() {
                break;
            }
            b = b.add(&b.shuffle(&c)?)?;
            c = c.shuffle(&c)?;
        }
        Ok(b.scale(inv0))
    }

    /// `σ(A)`: lift, take the `p`-th shuffle power, remove `α̃^p`, divide by
    /// `p`, and put `α^p` back as the constant term.
    pub fn sigma(&self) -> Result<Self, NcError> {
        if !self.ring.is_field() {
            return Err(NcError::NotField);
        }
        let p = self.ring.prime;
        let power = self.lift().shuffle_pow(p.get() as u64);
        let mut out = self.empty_like();
        out.set(Word::EMPTY, self.ring.pow(self.constant_term(), p.get() as u64));
        for (w, c) in power.terms() {
            if !w.is_empty() {
                out.set(w, div_by_p(LiftScalar::new(c as i64, p))?.value());
            }
        }
        Ok(out)
    }

    /// `σ^{-1}(A)` on `1 + 𝔪` by `Z ↦ Z + A - σ(Z)`; each step fixes at least
    /// one more degree, so `order + 1` steps suffice.
    pub fn sigma_inv(&self) -> Result<Self, NcError> {
        if !self.has_unit_constant() {
            return Err(NcError::BadConstantTerm(self.constant_term()));
        }
        let budget = self.order + 1;
        let mut z = self.clone();
        for _ in 0..budget {
            let next = z.add(self)?.sub(&z.sigma()?)?;
            if next == z {
                if z.sigma()? != *self {
                    return Err(NcError::RoundTrip);
                }
                return Ok(z);
            }
            z = next;
        }
        Err(NcError::NonConvergence(budget))
    }

    /// Identifies every variable with `X`.
    pub fn abelianize(&self) -> TruncSeries {
        let r = self.ring;
        let mut coeffs = vec![0u32; self.order.max(1)];
        for (w, c) in self.terms() {
            coeffs[w.len()] = r.add(coeffs[w.len()], c);
        }
        TruncSeries::from_raw(r, coeffs)
    }

    /// `ρ(T)A = Σ (A, X·T) X`.
    pub fn rho_shift(&self, t: Word) -> Result<Self, NcError> {
        if t.len() >= self.order {
            return Err(NcError::OrderExhausted { word: t.len(), order: self.order });
        }
        let mut out = self.with_order(self.order - t.len());
        for (w, c) in self.terms() {
            if w.len() < t.len() {
                continue;
            }
            let head_len = w.len() - t.len();
            let (head, tail) = split_at(w, head_len);
            if tail == t {
                out.set(head, c);
            }
        }
        Ok(out)
    }

    /// Coefficient vector on the words of length below `order`, in the
    /// order of [`Word::all_below`].
    pub fn prefix_vector(&self, words: &[Word]) -> Vec<u32> {
        words.iter().map(|&w| self.coeff(w) % self.ring.p()).collect()
    }
}

/// `(w[..i], w[i..])`.
pub(crate) fn split_at(w: Word, i: usize) -> (Word, Word) {
    let letters: Vec<u8> = w.letters().collect();
    (Word::from_letters(&letters[..i]), Word::from_letters(&letters[i..]))
}

fn shuffle_words(u: Word, v: Word, m: u32, memo: &mut HashMap<(Word, Word), Expansion>) -> Expansion {
    if u.is_empty() {
        return Rc::new(vec![(v, 1)]);
    }
    if v.is_empty() {
        return Rc::new(vec![(u, 1)]);
    }
    if let Some(e) = memo.get(&(u, v)) {
        return e.clone();
    }
    let (u_head, s) = u.split_last().expect("non-empty");
    let (v_head, t) = v.split_last().expect("non-empty");
    let mut acc: HashMap<Word, u32> = HashMap::new();
    for (w, c) in shuffle_words(u_head, v, m, memo).iter() {
        let e = acc.entry(w.push(s)).or_default();
        *e = (*e + c) % m;
    }
    for (w, c) in shuffle_words(u, v_head, m, memo).iter() {
        let e = acc.entry(w.push(t)).or_default();
        *e = (*e + c) % m;
    }
    let mut out: Vec<(Word, u32)> = acc.into_iter().filter(|&(_, c)| c != 0).collect();
    out.sort_unstable();
    let out = Rc::new(out);
    memo.insert((u, v), out.clone());
    out
}

/// `1 / (1 - Σ λ_j X_j)`: the coefficient of `X_{i_1}…X_{i_d}` is `Π λ_{i_j}`.
pub fn geometric(lambda: &[u32], order: usize, ring: Ring) -> Result<NCSeries, NcError> {
    geometric_with_limits(lambda, order, ring, NcLimits::default())
}

pub fn geometric_with_limits(lambda: &[u32], order: usize, ring: Ring, limits: NcLimits) -> Result<NCSeries, NcError> {
    let k = lambda.len();
    let mut out = NCSeries::zero_with_limits(k, order, ring, limits)?;
    let mut layer = vec![(Word::EMPTY, 1u32)];
    for _ in 0..order {
        for &(w, c) in &layer {
            out.set(w, c);
        }
        layer = layer
            .iter()
            .flat_map(|&(w, c)| {
                lambda
                    .iter()
                    .enumerate()
                    .filter(move |(_, &l)| ring.mul(c, l) != 0)
                    .map(move |(s, &l)| (w.push(s as u8), ring.mul(c, l)))
            })
            .collect();
        if layer.is_empty() || layer[0].0.len() >= MAX_WORD_LEN {
            break;
        }
    }
    Ok(out)
}

impl fmt::Display for NCSeries {
    /// `1+x1+2*x1x2-x2x1+O(8)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (w, c) in self.terms() {
            let c = self.ring.signed(c);
            let sign = if c < 0 { "-" } else if wrote { "+" } else { "" };
            let mag = c.unsigned_abs();
            match (w.is_empty(), mag) {
                (true, _) => write!(f, "{sign}{mag}")?,
                (false, 1) => write!(f, "{sign}{w}")?,
                (false, _) => write!(f, "{sign}{mag}*{w}")?,
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        write!(f, "+O({})", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::sigma;
    use crate::ring::PrimeModulus;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(p: u32) -> Ring {
        Ring::field(PrimeModulus::new(p).unwrap())
    }

    fn w(s: &[u8]) -> Word {
        Word::from_letters(s)
    }

    fn series(k: usize, order: usize, ring: Ring, terms: &[(&[u8], u32)]) -> NCSeries {
        let mut s = NCSeries::zero(k, order, ring).unwrap();
        for &(word, c) in terms {
            s.add_to(w(word), c);
        }
        s
    }

    fn random(k: usize, order: usize, ring: Ring, rng: &mut ChaCha8Rng) -> NCSeries {
        let mut s = NCSeries::zero(k, order, ring).unwrap();
        for word in Word::all_below(k, order) {
            if rng.gen_bool(0.4) {
                s.set(word, rng.gen_range(0..ring.modulus()));
            }
        }
        s
    }

    /// Shuffle by listing every choice of positions for the left word.
    fn brute_shuffle(a: &NCSeries, b: &NCSeries) -> NCSeries {
        let r = a.ring();
        let mut out = a.empty_like();
        for (u, x) in a.terms() {
            for (v, y) in b.terms() {
                let n = u.len() + v.len();
                if n >= a.order() {
                    continue;
                }
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as usize != u.len() {
                        continue;
                    }
                    let (mut i, mut j) = (0, 0);
                    let mut word = Word::EMPTY;
                    for pos in 0..n {
                        if (mask >> pos) & 1 == 1 {
                            word = word.push(u.at(i));
                            i += 1;
                        } else {
                            word = word.push(v.at(j));
                            j += 1;
                        }
                    }
                    out.add_to(word, r.mul(x, y));
                }
            }
        }
        out
    }

    #[test]
    fn shuffle_examples() {
        let f2 = field(2);
        let x1 = series(2, 6, f2, &[(&[0], 1)]);
        let x2 = series(2, 6, f2, &[(&[1], 1)]);
        let f3 = field(3);
        let y1 = series(2, 6, f3, &[(&[0], 1)]);
        let y2 = series(2, 6, f3, &[(&[1], 1)]);
        assert_eq!(y1.shuffle(&y2).unwrap(), series(2, 6, f3, &[(&[0, 1], 1), (&[1, 0], 1)]));
        let x1x2 = series(2, 6, f2, &[(&[0, 1], 1)]);
        assert_eq!(x1x2.shuffle(&x1).unwrap(), series(2, 6, f2, &[(&[0, 1, 0], 1)]));
        let one = NCSeries::one(2, 6, f2).unwrap();
        assert_eq!(one.shuffle(&x2).unwrap(), x2);
        assert_eq!(x1.to_string(), "x1+O(6)");
    }

    #[test]
    fn shuffle_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in [2, 3, 5] {
            for _ in 0..10 {
                let a = random(2, 6, field(p), &mut rng);
                let b = random(2, 6, field(p), &mut rng);
                assert_eq!(a.shuffle(&b).unwrap(), brute_shuffle(&a, &b));
            }
            let a = random(3, 5, Ring::lift(PrimeModulus::new(p).unwrap()), &mut rng);
            let b = random(3, 5, Ring::lift(PrimeModulus::new(p).unwrap()), &mut rng);
            assert_eq!(a.shuffle(&b).unwrap(), brute_shuffle(&a, &b));
        }
    }

    #[test]
    fn shuffle_inverse_and_geometric() {
        let f2 = field(2);
        let a = series(2, 8, f2, &[(&[], 1), (&[0], 1), (&[1], 1)]);
        assert_eq!(a.shuffle_inv().unwrap(), a);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [2, 3, 5] {
            let r = field(p);
            for _ in 0..5 {
                let mut a = random(2, 7, r, &mut rng);
                a.set(Word::EMPTY, rng.gen_range(1..p));
                let inv = a.shuffle_inv().unwrap();
                assert_eq!(a.shuffle(&inv).unwrap(), NCSeries::one(2, 7, r).unwrap());
                let collapsed = NCSeries::one(2, 7, r).unwrap().scale(r.pow(a.constant_term(), p as u64));
                assert_eq!(a.shuffle_pow(p as u64), collapsed);
            }
            let lambda = [rng.gen_range(0..p), rng.gen_range(0..p)];
            let mu = [rng.gen_range(0..p), rng.gen_range(0..p)];
            let sum = [r.add(lambda[0], mu[0]), r.add(lambda[1], mu[1])];
            let g = |l: &[u32]| geometric(l, 8, r).unwrap();
            assert_eq!(g(&lambda).shuffle(&g(&mu)).unwrap(), g(&sum));
            let neg = [r.neg(lambda[0]), r.neg(lambda[1])];
            assert_eq!(g(&lambda).shuffle_inv().unwrap(), g(&neg));
        }
        assert_eq!(geometric(&[0, 0], 5, f2).unwrap(), NCSeries::one(2, 5, f2).unwrap());
        assert_eq!(geometric(&[1], 6, f2).unwrap().abelianize().coeffs(), &[1; 6]);
    }

    #[test]
    fn sigma_examples() {
        let f2 = field(2);
        let a = series(2, 4, f2, &[(&[], 1), (&[0], 1), (&[1], 1)]);
        let expect = series(2, 4, f2, &[(&[], 1), (&[0], 1), (&[1], 1), (&[0, 0], 1), (&[0, 1], 1), (&[1, 0], 1), (&[1, 1], 1)]);
        assert_eq!(a.sigma().unwrap(), expect);
        assert_eq!(NCSeries::one(2, 5, f2).unwrap().sigma().unwrap(), NCSeries::one(2, 5, f2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [2, 3, 5] {
            let r = field(p);
            for _ in 0..5 {
                let a = random(1, 10, r, &mut rng);
                assert_eq!(a.sigma().unwrap().abelianize(), sigma(&a.abelianize()).unwrap());
                let mut b = random(2, 6, r, &mut rng);
                b.set(Word::EMPTY, 1);
                let z = b.sigma_inv().unwrap();
                assert_eq!(z.sigma().unwrap(), b);
                assert_eq!(b.sigma().unwrap().sigma_inv().unwrap(), b);
            }
        }
    }

    #[test]
    fn abelianize_and_shift() {
        let f2 = field(2);
        assert_eq!(series(2, 4, f2, &[(&[0], 1)]).abelianize().coeffs(), &[0, 1, 0, 0]);
        assert!(series(2, 4, f2, &[(&[0, 1], 1), (&[1, 0], 1)]).abelianize().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = field(3);
        for _ in 0..10 {
            let a = random(2, 6, r, &mut rng);
            let b = random(2, 6, r, &mut rng);
            let lhs = a.shuffle(&b).unwrap().abelianize();
            assert_eq!(lhs, a.abelianize().shuffle_mul(&b.abelianize()).unwrap());
        }
        let a = series(2, 4, f2, &[(&[1, 0], 1)]);
        assert_eq!(a.rho_shift(w(&[0])).unwrap(), series(2, 3, f2, &[(&[1], 1)]));
        assert_eq!(a.rho_shift(Word::EMPTY).unwrap(), a);
        assert!(a.rho_shift(w(&[0, 0, 0, 0])).is_err());
        for _ in 0..10 {
            let a = random(2, 7, r, &mut rng);
            let t = w(&[rng.gen_range(0..2), rng.gen_range(0..2)]);
            let t2 = w(&[rng.gen_range(0..2)]);
            let lhs = a.rho_shift(t2).unwrap().rho_shift(t).unwrap();
            assert_eq!(lhs, a.rho_shift(t.concat(t2)).unwrap());
        }
    }

    #[test]
    fn limits_are_enforced() {
        let f2 = field(2);
        assert!(matches!(NCSeries::zero(5, 4, f2), Err(NcError::LimitExceeded { .. })));
        assert!(matches!(NCSeries::zero(2, 11, f2), Err(NcError::LimitExceeded { .. })));
        assert!(NCSeries::zero_with_limits(1, 30, f2, NcLimits::extended()).is_ok());
    }
}
