use std::ops::Index;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::GaussianInt;
use crate::error::{Error, Result};

/// State vector over degree-of-freedom labels `0..D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GIVector(Vec<GaussianInt>);

impl GIVector {
    pub fn new(entries: Vec<GaussianInt>) -> Self {
        GIVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        GIVector(vec![GaussianInt::zero(); dim])
    }

    /// Unit vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = GIVector::zeros(dim);
        v.0[index] = GaussianInt::real(1);
        v
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        GIVector(pairs.iter().map(|&p| GaussianInt::from(p)).collect())
    }

    pub fn from_reals(values: &[i64]) -> Self {
        GIVector(values.iter().map(|&x| GaussianInt::real(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[GaussianInt] {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut [GaussianInt] {
        &mut self.0
    }

    pub fn into_entries(self) -> Vec<GaussianInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GaussianInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    pub fn add(&self, other: &GIVector) -> Result<GIVector> {
        other.check_dim(self.dim())?;
        Ok(GIVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &GIVector) -> Result<GIVector> {
        other.check_dim(self.dim())?;
        Ok(GIVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scale(&self, k: &GaussianInt) -> GIVector {
        GIVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn mul_i(&self) -> GIVector {
        GIVector(self.0.iter().map(GaussianInt::mul_i).collect())
    }

    pub fn conj(&self) -> GIVector {
        GIVector(self.0.iter().map(GaussianInt::conj).collect())
    }

    /// Sesquilinear product `Σ_α conj(self_α)·other_α`.
    pub fn inner(&self, other: &GIVector) -> Result<GaussianInt> {
        other.check_dim(self.dim())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| &a.conj() * b)
            .sum())
    }

    /// Bilinear product `Σ_α self_α·other_α` (no conjugation).
    pub fn dot(&self, other: &GIVector) -> Result<GaussianInt> {
        other.check_dim(self.dim())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn real_parts(&self) -> Vec<BigInt> {
        self.0.iter().map(|z| z.re.clone()).collect()
    }

    pub fn imag_parts(&self) -> Vec<BigInt> {
        self.0.iter().map(|z| z.im.clone()).collect()
    }

    /// Recombines `x + i·p`.
    pub fn from_parts(xs: &[BigInt], ps: &[BigInt]) -> Result<GIVector> {
        if xs.len() != ps.len() {
            return Err(Error::DimensionMismatch {
                expected: xs.len(),
                found: ps.len(),
            });
        }
        Ok(GIVector(
            xs.iter()
                .zip(ps)
                .map(|(x, p)| GaussianInt::new(x.clone(), p.clone()))
                .collect(),
        ))
    }

    pub fn to_complex64(&self) -> Vec<num_complex::Complex64> {
        self.0.iter().map(GaussianInt::to_complex64).collect()
    }
}

impl Index<usize> for GIVector {
    type Output = GaussianInt;
    fn index(&self, index: usize) -> &GaussianInt {
        &self.0[index]
    }
}

impl From<Vec<GaussianInt>> for GIVector {
    fn from(entries: Vec<GaussianInt>) -> Self {
        GIVector(entries)
    }
}

impl FromIterator<GaussianInt> for GIVector {
    fn from_iter<I: IntoIterator<Item = GaussianInt>>(iter: I) -> Self {
        GIVector(iter.into_iter().collect())
    }
}
