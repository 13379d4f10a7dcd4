//! Incremental row reduction over `F_p`, with a bit-packed variant for `p = 2`.

use crate::ring::{PrimeModulus, Ring};

/// Maintains a row-echelon basis and tells whether new vectors enlarge it.
pub trait Eliminator {
    /// Adds `v` (entries are residues mod `p`); returns `true` if it was
    /// independent of the rows already present.
    fn insert(&mut self, v: &[u32]) -> bool;

    /// Whether `v` lies in the current span, without adding it.
    fn contains(&self, v: &[u32]) -> bool;

    fn rank(&self) -> usize;
}

/// Picks the bit-packed eliminator for `p = 2`, the dense one otherwise.
pub fn eliminator(p: PrimeModulus, width: usize) -> Box<dyn Eliminator> {
    if p.get() == 2 {
        Box::new(BitEliminator::new(width))
    } else {
        Box::new(DenseEliminator::new(p, width))
    }
}

/// Rank of a matrix given by rows.
pub fn rank(p: PrimeModulus, rows: &[Vec<u32>]) -> usize {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut e = eliminator(p, width);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Dense elimination mod `p`: rows are kept reduced with a pivot column each.
#[derive(Debug, Clone)]
pub struct DenseEliminator {
    ring: Ring,
    width: usize,
    rows: Vec<(usize, Vec<u32>)>,
}

impl DenseEliminator {
    pub fn new(p: PrimeModulus, width: usize) -> Self {
        DenseEliminator { ring: Ring::field(p), width, rows: Vec::new() }
    }

    fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let r = self.ring;
        let mut w: Vec<u32> = (0..self.width).map(|i| v.get(i).copied().unwrap_or(0) % r.p()).collect();
        for (pivot, row) in &self.rows {
            let c = w[*pivot];
            if c == 0 {
                continue;
            }
            for (x, &y) in w.iter_mut().zip(row) {
                *x = r.sub(*x, r.mul(c, y));
            }
        }
        w
    }
}

impl Eliminator for DenseEliminator {
    fn insert(&mut self, v: &[u32]) -> bool {
        let mut w = self.reduce(v);
        let Some(pivot) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let r = self.ring;
        let inv = r.inv(w[pivot]).expect("non-zero");
        w.iter_mut().for_each(|x| *x = r.mul(*x, inv));
        // keep earlier rows free of the new pivot so later reductions stay single-pass
        for (_, row) in &mut self.rows {
            let c = row[pivot];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(&w) {
                    *x = r.sub(*x, r.mul(c, y));
                }
            }
        }
        self.rows.push((pivot, w));
        true
    }

    fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Elimination over `F_2` on packed `u64` words.
#[derive(Debug, Clone)]
pub struct BitEliminator {
    words: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl BitEliminator {
    pub fn new(width: usize) -> Self {
        BitEliminator { words: width.div_ceil(64), rows: Vec::new() }
    }

    fn pack(&self, v: &[u32]) -> Vec<u64> {
        let mut out = vec![0u64; self.words];
        for (i, &x) in v.iter().enumerate().take(self.words * 64) {
            if x & 1 == 1 {
                out[i >> 6] |= 1 << (i & 63);
            }
        }
        out
    }

    fn reduce(&self, mut w: Vec<u64>) -> Vec<u64> {
        for (pivot, row) in &self.rows {
            if (w[pivot >> 6] >> (pivot & 63)) & 1 == 1 {
                w.iter_mut().zip(row).for_each(|(x, y)| *x ^= y);
            }
        }
        w
    }
}

impl Eliminator for BitEliminator {
    fn insert(&mut self, v: &[u32]) -> bool {
        let w = self.reduce(self.pack(v));
        let Some(word) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let pivot = word * 64 + w[word].trailing_zeros() as usize;
        for (_, row) in &mut self.rows {
            if (row[pivot >> 6] >> (pivot & 63)) & 1 == 1 {
                row.iter_mut().zip(&w).for_each(|(x, y)| *x ^= y);
            }
        }
        self.rows.push((pivot, w));
        true
    }

    fn contains(&self, v: &[u32]) -> bool {
        self.reduce(self.pack(v)).iter().all(|&x| x == 0)
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_and_dense_agree_over_f2() {
        let two = PrimeModulus::two();
        let rows: Vec<Vec<u32>> = (0..40)
            .map(|r| (0..100).map(|c| ((r * 17 + c * c * 3 + r * c) % 5 == 0) as u32).collect())
            .collect();
        let mut bit = BitEliminator::new(100);
        let mut dense = DenseEliminator::new(two, 100);
        for row in &rows {
            assert_eq!(bit.insert(row), dense.insert(row));
        }
        assert_eq!(bit.rank(), dense.rank());
    }

    #[test]
    fn dense_rank_over_f3() {
        let p = PrimeModulus::new(3).unwrap();
        // third row = first + 2 * second
        let rows = vec![vec![1, 2, 0, 1], vec![0, 1, 1, 2], vec![1, 1, 2, 2]];
        assert_eq!(rank(p, &rows), 2);
        let mut e = DenseEliminator::new(p, 4);
        e.insert(&rows[0]);
        e.insert(&rows[1]);
        assert!(e.contains(&rows[2]));
        assert!(!e.contains(&[0, 0, 0, 1]));
    }
}
