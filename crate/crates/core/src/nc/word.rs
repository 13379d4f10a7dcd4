use std::cmp::Ordering;
use std::fmt;

/// Most letters a packed word can hold.
pub const MAX_WORD_LEN: usize = 32;

/// A word over at most four letters, packed two bits per letter; letter `i`
/// of the word sits at bits `2i..2i+2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Word {
    len: u8,
    bits: u64,
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, bits: 0 };

    pub fn letter(s: u8) -> Self {
        debug_assert!(s < 4);
        Word { len: 1, bits: s as u64 }
    }

    pub fn from_letters(letters: &[u8]) -> Self {
        debug_assert!(letters.len() <= MAX_WORD_LEN);
        letters.iter().fold(Word::EMPTY, |w, &s| w.push(s))
    }

    #[inline]
    pub fn len(self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn at(self, i: usize) -> u8 {
        ((self.bits >> (2 * i)) & 3) as u8
    }

    pub fn letters(self) -> impl Iterator<Item = u8> {
        (0..self.len()).map(move |i| self.at(i))
    }

    /// Appends a letter on the right.
    #[inline]
    pub fn push(self, s: u8) -> Self {
        Word { len: self.len + 1, bits: self.bits | ((s as u64) << (2 * self.len as u32)) }
    }

    /// `self · other`.
    #[inline]
    pub fn concat(self, other: Word) -> Self {
        if other.len == 0 {
            return self;
        }
        Word { len: self.len + other.len, bits: self.bits | (other.bits << (2 * self.len as u32)) }
    }

    /// Splits off the last letter.
    #[inline]
    pub fn split_last(self) -> Option<(Word, u8)> {
        if self.len == 0 {
            return None;
        }
        let n = self.len - 1;
        let last = self.at(n as usize);
        let mask = if n == 0 { 0 } else { (1u64 << (2 * n as u32)) - 1 };
        Some((Word { len: n, bits: self.bits & mask }, last))
    }

    /// Every word of length `len` over `k` letters, in lexicographic order.
    pub fn all_of_length(k: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word::EMPTY];
        for _ in 0..len {
            out = out.iter().flat_map(|w| (0..k as u8).map(move |s| w.push(s))).collect();
        }
        out
    }

    /// Every word of length below `order`, shortest first.
    pub fn all_below(k: usize, order: usize) -> Vec<Word> {
        (0..order).flat_map(|d| Word::all_of_length(k, d)).collect()
    }
}

impl Ord for Word {
    /// Shorter words first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| self.letters().cmp(other.letters()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    /// `x1x2x1`; the empty word prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for s in self.letters() {
            write!(f, "x{}", s + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing() {
        let w = Word::from_letters(&[0, 1, 3, 2]);
        assert_eq!(w.len(), 4);
        assert_eq!(w.letters().collect::<Vec<_>>(), vec![0, 1, 3, 2]);
        assert_eq!(w.to_string(), "x1x2x4x3");
        let (head, last) = w.split_last().unwrap();
        assert_eq!((head, last), (Word::from_letters(&[0, 1, 3]), 2));
        assert_eq!(head.push(last), w);
        assert_eq!(Word::from_letters(&[1]).concat(Word::from_letters(&[0, 0])), Word::from_letters(&[1, 0, 0]));
    }

    #[test]
    fn ordering_is_graded_lexicographic() {
        let mut ws = [Word::from_letters(&[1, 0]), Word::from_letters(&[0, 1]), Word::letter(1), Word::EMPTY];
        ws.sort();
        assert_eq!(ws.iter().map(|w| w.to_string()).collect::<Vec<_>>(), ["1", "x2", "x1x2", "x2x1"]);
        assert_eq!(Word::all_below(2, 3).len(), 7);
    }
}
