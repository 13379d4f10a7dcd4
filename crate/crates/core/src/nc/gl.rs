use crate::linalg::rank;

use super::series::NCSeries;
use super::word::Word;
use super::NcError;

/// Linear change of variables `X_i ↦ Σ_j M[i][j] X_j`, applied letter by
/// letter to every word.
pub fn gl_change_of_vars(a: &NCSeries, m: &[Vec<u32>]) -> Result<NCSeries, NcError> {
    let k = a.vars();
    let ring = a.ring();
    if m.len() != k || m.iter().any(|row| row.len() != k) {
        return Err(NcError::MatrixShape(k));
    }
    let m: Vec<Vec<u32>> = m.iter().map(|row| row.iter().map(|&x| x % ring.p()).collect()).collect();
    if rank(ring.prime, &m) < k {
        return Err(NcError::SingularMatrix);
    }
    let mut out = a.empty_like();
    for (w, c) in a.terms() {
        let mut layer = vec![(Word::EMPTY, c)];
        for s in w.letters() {
            let row = &m[s as usize];
            layer = layer
                .iter()
                .flat_map(|&(u, c)| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, &x)| x != 0)
                        .map(move |(j, &x)| (u.push(j as u8), ring.mul(c, x)))
                })
                .collect();
        }
        for (u, c) in layer {
            out.add_to(u, c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{PrimeModulus, Ring};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(ring: Ring, rng: &mut ChaCha8Rng) -> NCSeries {
        let mut s = NCSeries::zero(2, 6, ring).unwrap();
        for w in Word::all_below(2, 6) {
            if rng.gen_bool(0.3) {
                s.set(w, rng.gen_range(0..ring.p()));
            }
        }
        s
    }

    #[test]
    fn permutation_and_identity() {
        let r = Ring::field(PrimeModulus::new(3).unwrap());
        let mut a = NCSeries::zero(2, 4, r).unwrap();
        a.set(Word::from_letters(&[0, 0, 1]), 2);
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(gl_change_of_vars(&a, &id).unwrap(), a);
        let swap = vec![vec![0, 1], vec![1, 0]];
        let b = gl_change_of_vars(&a, &swap).unwrap();
        assert_eq!(b.coeff(Word::from_letters(&[1, 1, 0])), 2);
        assert_eq!(b.support_size(), 1);
        assert_eq!(gl_change_of_vars(&a, &[vec![1, 1], vec![2, 2]]), Err(NcError::SingularMatrix));
    }

    #[test]
    fn action_is_a_shuffle_homomorphism_commuting_with_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [2, 3] {
            let r = Ring::field(PrimeModulus::new(p).unwrap());
            let mut done = 0;
            while done < 10 {
                let m: Vec<Vec<u32>> = (0..2).map(|_| (0..2).map(|_| rng.gen_range(0..p)).collect()).collect();
                if rank(r.prime, &m) < 2 {
                    continue;
                }
                done += 1;
                let a = random(r, &mut rng);
                let b = random(r, &mut rng);
                let g = |s: &NCSeries| gl_change_of_vars(s, &m).unwrap();
                assert_eq!(g(&a.shuffle(&b).unwrap()), g(&a).shuffle(&g(&b)).unwrap());
                assert_eq!(g(&a.sigma().unwrap()), g(&a).sigma().unwrap());
            }
        }
    }
}
