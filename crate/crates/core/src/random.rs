//! Random instances for property suites and randomized experiments.

use rand::Rng;

use crate::gaussian::{GIMatrix, GIVector, GaussianInt, HermitianIntMatrix};

/// Gaussian integer with `|re|, |im| ≤ bound`.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> GaussianInt {
    GaussianInt::new(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
}

pub fn vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, bound: i64) -> GIVector {
    (0..dim).map(|_| gaussian(rng, bound)).collect()
}

/// Self-adjoint matrix with entries bounded by `bound` in both parts; the
/// diagonal is real.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, bound: i64) -> HermitianIntMatrix {
    let mut m = GIMatrix::zeros(dim);
    for r in 0..dim {
        m.set(r, r, GaussianInt::real(rng.gen_range(-bound..=bound)));
        for c in r + 1..dim {
            let z = gaussian(rng, bound);
            m.set(c, r, z.conj());
            m.set(r, c, z);
        }
    }
    HermitianIntMatrix::new(m).expect("constructed self-adjoint")
}
