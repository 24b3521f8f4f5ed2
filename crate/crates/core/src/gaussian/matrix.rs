use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{GIVector, GaussianInt};
use crate::error::{Error, Result};

/// Dense square matrix of Gaussian integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<GaussianInt>>", into = "Vec<Vec<GaussianInt>>")]
pub struct GIMatrix {
    dim: usize,
    data: Vec<GaussianInt>,
}

impl GIMatrix {
    pub fn zeros(dim: usize) -> Self {
        GIMatrix {
            dim,
            data: vec![GaussianInt::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = GIMatrix::zeros(dim);
        for k in 0..dim {
            m.data[k * dim + k] = GaussianInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussianInt>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, entries) in rows.into_iter().enumerate() {
            if entries.len() != dim {
                return Err(Error::NotSquare {
                    row,
                    len: entries.len(),
                    expected: dim,
                });
            }
            data.extend(entries);
        }
        Ok(GIMatrix { dim, data })
    }

    /// Convenience constructor from `(re, im)` pairs.
    pub fn from_pairs(rows: &[&[(i64, i64)]]) -> Result<Self> {
        GIMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&p| GaussianInt::from(p)).collect())
                .collect(),
        )
    }

    /// Convenience constructor for real integer matrices.
    pub fn from_reals(rows: &[&[i64]]) -> Result<Self> {
        GIMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| GaussianInt::real(x)).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &GaussianInt {
        &self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: GaussianInt) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[GaussianInt] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<GaussianInt>> {
        self.data.chunks(self.dim.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn check_same_dim(&self, other: &GIMatrix) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            })
        }
    }

    /// Exact matrix-vector product.
    pub fn apply(&self, v: &GIVector) -> Result<GIVector> {
        v.check_dim(self.dim)?;
        Ok(self
            .data
            .chunks(self.dim)
            .map(|row| {
                row.iter()
                    .zip(v.iter())
                    .filter(|(h, _)| !h.is_zero())
                    .map(|(h, x)| h * x)
                    .sum()
            })
            .collect())
    }

    pub fn mul(&self, other: &GIMatrix) -> Result<GIMatrix> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut out = GIMatrix::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    let prod = a * other.get(k, c);
                    out.data[r * d + c] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &GIMatrix) -> Result<GIMatrix> {
        self.check_same_dim(other)?;
        Ok(GIMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &GIMatrix) -> Result<GIMatrix> {
        self.check_same_dim(other)?;
        Ok(GIMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, k: &GaussianInt) -> GIMatrix {
        GIMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * k).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> GIMatrix {
        let d = self.dim;
        let mut out = GIMatrix::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out.data[c * d + r] = self.get(r, c).conj();
            }
        }
        out
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &GIMatrix) -> Result<GIMatrix> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn pow(&self, exponent: u32) -> GIMatrix {
        let mut out = GIMatrix::identity(self.dim);
        for _ in 0..exponent {
            out = out.mul(self).expect("same dimension");
        }
        out
    }

    /// First `(row, col)` violating `entry(r,c) = conj(entry(c,r))`.
    pub fn self_adjoint_violation(&self) -> Option<(usize, usize)> {
        let d = self.dim;
        for r in 0..d {
            for c in r..d {
                if *self.get(r, c) != self.get(c, r).conj() {
                    return Some((r, c));
                }
            }
        }
        None
    }

    /// Kronecker product `self ⊗ other`, row-major over `(α_self, α_other)`.
    pub fn kron(&self, other: &GIMatrix) -> GIMatrix {
        let (a, b) = (self.dim, other.dim);
        let d = a * b;
        let mut out = GIMatrix::zeros(d);
        for r1 in 0..a {
            for c1 in 0..a {
                let x = self.get(r1, c1);
                if x.is_zero() {
                    continue;
                }
                for r2 in 0..b {
                    for c2 in 0..b {
                        out.data[(r1 * b + r2) * d + c1 * b + c2] = x * other.get(r2, c2);
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.data
                .chunks(self.dim)
                .map(|row| serde_json::Value::Array(row.iter().map(GaussianInt::to_json).collect()))
                .collect(),
        )
    }
}

impl TryFrom<Vec<Vec<GaussianInt>>> for GIMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<GaussianInt>>) -> Result<Self> {
        GIMatrix::from_rows(rows)
    }
}

impl From<GIMatrix> for Vec<Vec<GaussianInt>> {
    fn from(m: GIMatrix) -> Self {
        m.rows()
    }
}

/// Self-adjoint Gaussian-integer matrix: the Hamiltonian, or an observable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GIMatrix", into = "GIMatrix")]
pub struct HermitianIntMatrix(GIMatrix);

impl HermitianIntMatrix {
    pub fn new(inner: GIMatrix) -> Result<Self> {
        match inner.self_adjoint_violation() {
            None => Ok(HermitianIntMatrix(inner)),
            Some((row, col)) => Err(Error::NotSelfAdjoint { row, col }),
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianIntMatrix(GIMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianIntMatrix(GIMatrix::zeros(dim))
    }

    pub fn from_pairs(rows: &[&[(i64, i64)]]) -> Result<Self> {
        HermitianIntMatrix::new(GIMatrix::from_pairs(rows)?)
    }

    pub fn from_reals(rows: &[&[i64]]) -> Result<Self> {
        HermitianIntMatrix::new(GIMatrix::from_reals(rows)?)
    }

    pub fn matrix(&self) -> &GIMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> GIMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn apply(&self, v: &GIVector) -> Result<GIVector> {
        self.0.apply(v)
    }

    /// Integer powers of a self-adjoint matrix stay self-adjoint.
    pub fn pow(&self, exponent: u32) -> HermitianIntMatrix {
        HermitianIntMatrix(self.0.pow(exponent))
    }

    /// Real-integer linear combination; stays self-adjoint.
    pub fn real_combination(terms: &[(BigInt, &HermitianIntMatrix)]) -> Result<HermitianIntMatrix> {
        let dim = terms.first().map(|(_, m)| m.dim()).ok_or(Error::EmptyMatrix)?;
        let mut acc = GIMatrix::zeros(dim);
        for (k, m) in terms {
            acc = acc.add(&m.0.scale(&GaussianInt::real(k.clone())))?;
        }
        Ok(HermitianIntMatrix(acc))
    }

    /// Splits `H = hS + i·hA` into its real symmetric and real antisymmetric parts.
    pub fn split_sym_antisym(&self) -> (IntMatrix, IntMatrix) {
        let d = self.dim();
        let re = self.0.data.iter().map(|z| z.re.clone()).collect();
        let im = self.0.data.iter().map(|z| z.im.clone()).collect();
        (IntMatrix { dim: d, data: re }, IntMatrix { dim: d, data: im })
    }

    /// Inverse of [`split_sym_antisym`](Self::split_sym_antisym).
    pub fn from_split(h_sym: &IntMatrix, h_anti: &IntMatrix) -> Result<Self> {
        if h_sym.dim != h_anti.dim {
            return Err(Error::DimensionMismatch {
                expected: h_sym.dim,
                found: h_anti.dim,
            });
        }
        h_sym.check_symmetric()?;
        h_anti.check_antisymmetric()?;
        let data = h_sym
            .data
            .iter()
            .zip(&h_anti.data)
            .map(|(s, a)| GaussianInt::new(s.clone(), a.clone()))
            .collect();
        Ok(HermitianIntMatrix(GIMatrix {
            dim: h_sym.dim,
            data,
        }))
    }

    /// Kronecker sum `Σ_k 1⊗…⊗H_k⊗…⊗1` over the row-major product space.
    pub fn kronecker_sum(parts: &[HermitianIntMatrix]) -> Result<HermitianIntMatrix> {
        if parts.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let dims: Vec<usize> = parts.iter().map(|h| h.dim()).collect();
        let total: usize = dims.iter().product();
        let mut acc = GIMatrix::zeros(total);
        for (k, h) in parts.iter().enumerate() {
            let left: usize = dims[..k].iter().product();
            let right: usize = dims[k + 1..].iter().product();
            let term = GIMatrix::identity(left)
                .kron(h.matrix())
                .kron(&GIMatrix::identity(right));
            acc = acc.add(&term)?;
        }
        Ok(HermitianIntMatrix(acc))
    }
}

impl TryFrom<GIMatrix> for HermitianIntMatrix {
    type Error = Error;
    fn try_from(m: GIMatrix) -> Result<Self> {
        HermitianIntMatrix::new(m)
    }
}

impl From<HermitianIntMatrix> for GIMatrix {
    fn from(h: HermitianIntMatrix) -> Self {
        h.0
    }
}

/// Dense square matrix of real integers (the `hS`/`hA` split parts).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, entries) in rows.iter().enumerate() {
            if entries.len() != dim {
                return Err(Error::NotSquare {
                    row,
                    len: entries.len(),
                    expected: dim,
                });
            }
            data.extend(entries.iter().map(|&x| BigInt::from(x)));
        }
        Ok(IntMatrix { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        IntMatrix {
            dim,
            data: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.data[row * self.dim + col]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn check_symmetric(&self) -> Result<()> {
        for r in 0..self.dim {
            for c in r + 1..self.dim {
                if self.get(r, c) != self.get(c, r) {
                    return Err(Error::NotSymmetric { row: r, col: c });
                }
            }
        }
        Ok(())
    }

    pub fn check_antisymmetric(&self) -> Result<()> {
        for r in 0..self.dim {
            for c in r..self.dim {
                if *self.get(r, c) != -self.get(c, r) {
                    return Err(Error::NotAntisymmetric { row: r, col: c });
                }
            }
        }
        Ok(())
    }

    pub fn transpose(&self) -> IntMatrix {
        let d = self.dim;
        let mut data = vec![BigInt::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                data[c * d + r] = self.get(r, c).clone();
            }
        }
        IntMatrix { dim: d, data }
    }

    /// Exact product with a real integer vector.
    pub fn apply(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(self
            .data
            .chunks(self.dim)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(h, _)| !h.is_zero())
                    .map(|(h, x)| h * x)
                    .sum()
            })
            .collect())
    }
}
