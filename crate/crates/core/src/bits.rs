//! Bit-packed series over `F_2`.

use crate::ring::{PrimeModulus, Ring};
use crate::series::TruncSeries;

/// A fixed-length bit vector; bit `i` is coefficient `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSeries {
    words: Vec<u64>,
    len: usize,
}

impl BitSeries {
    pub fn zeros(len: usize) -> Self {
        // one spare word so unaligned windows never index past the end
        BitSeries { words: vec![0; len / 64 + 2], len }
    }

    pub fn from_series(s: &TruncSeries) -> Self {
        debug_assert_eq!(s.prime().get(), 2);
        let mut out = Self::zeros(s.order());
        for (i, &c) in s.coeffs().iter().enumerate() {
            if c & 1 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    pub fn to_series(&self) -> TruncSeries {
        TruncSeries::from_fn(Ring::field(PrimeModulus::two()), self.len, |i| self.get(i) as u32)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        let mask = 1u64 << (i & 63);
        if v {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    /// The 64 bits starting at bit `start` (zero-filled past the storage).
    #[inline]
    fn window(&self, start: usize) -> u64 {
        let (w, b) = (start >> 6, start & 63);
        let lo = self.words.get(w).copied().unwrap_or(0);
        if b == 0 {
            return lo;
        }
        let hi = self.words.get(w + 1).copied().unwrap_or(0);
        (lo >> b) | (hi << (64 - b))
    }

    /// `Σ_{t < count} self[a + t] · other[b + t]`, counted over the integers.
    pub fn and_count(&self, a: usize, other: &BitSeries, b: usize, count: usize) -> u32 {
        let mut total = 0;
        let mut t = 0;
        while t < count {
            let take = (count - t).min(64);
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            total += (self.window(a + t) & other.window(b + t) & mask).count_ones();
            t += take;
        }
        total
    }
}

/// A bit series kept together with its mirror image, so that the
/// convolution sums `Σ_i z_i z_{n-i}` become a single windowed AND.
#[derive(Debug, Clone)]
pub struct MirroredBits {
    forward: BitSeries,
    backward: BitSeries,
}

impl MirroredBits {
    pub fn new(len: usize) -> Self {
        MirroredBits { forward: BitSeries::zeros(len), backward: BitSeries::zeros(len) }
    }

    pub fn from_series(s: &TruncSeries) -> Self {
        let mut out = Self::new(s.order());
        for (i, &c) in s.coeffs().iter().enumerate() {
            if c & 1 == 1 {
                out.set(i);
            }
        }
        out
    }

    pub fn set(&mut self, i: usize) {
        let len = self.forward.len();
        self.forward.set(i, true);
        self.backward.set(len - 1 - i, true);
    }

    pub fn get(&self, i: usize) -> bool {
        self.forward.get(i)
    }

    /// `#{ i ∈ [lo, hi] : z_i = z_{n-i} = 1 }`, requires `hi ≤ n`.
    pub fn pair_count(&self, n: usize, lo: usize, hi: usize) -> u32 {
        if lo > hi {
            return 0;
        }
        // z_{n-i} sits at backward[len-1-n+i]
        let len = self.forward.len();
        self.forward.and_count(lo, &self.backward, len - 1 - n + lo, hi - lo + 1)
    }

    pub fn to_series(&self) -> TruncSeries {
        self.forward.to_series()
    }
}
