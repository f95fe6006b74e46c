//! Seeded random fixtures: Haar unitaries, diagonal phase gauges, random
//! Hermitian and general matrices. Used by the CLI's `random-conjugate`
//! family, the test suites and the benches.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::ComplexMatrix;

pub type FixtureRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Entries uniform in the unit square `[-1, 1] + i[-1, 1]`.
pub fn random_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let data = (0..n * n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    ComplexMatrix::new(n, data).expect("finite entries")
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n).hermitian_part()
}

/// Haar-distributed unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &cols {
                let p: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_columns(&cols).expect("square")
}

/// Diagonal unitary with independent uniform phases; the first entry is 1
/// when `gauge_fixed` is set.
pub fn random_phases(rng: &mut impl Rng, n: usize, gauge_fixed: bool) -> ComplexMatrix {
    let diag: Vec<Complex64> = (0..n)
        .map(|k| {
            if gauge_fixed && k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, rng.random_range(-PI..PI))
            }
        })
        .collect();
    ComplexMatrix::from_diag(&diag)
}

/// Point with coordinates uniform in `[-1, 1]`.
pub fn random_point(rng: &mut impl Rng, k: usize) -> Vec<Complex64> {
    (0..k).map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitaries_are_unitary_and_reproducible() {
        let u = random_unitary(&mut seeded_rng(1), 7);
        assert!((&u * &u.adjoint()).hs_distance(&ComplexMatrix::identity(7)) < 1e-13);
        assert_eq!(u, random_unitary(&mut seeded_rng(1), 7));
        let d = random_phases(&mut seeded_rng(2), 4, true);
        assert_eq!(d[(0, 0)], Complex64::new(1.0, 0.0));
        assert!(d.classify(1e-12).unitary);
    }
}
