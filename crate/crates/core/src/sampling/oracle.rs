//! Floating-point reference solution of the continuum Schrödinger equation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::HermitianIntMatrix;

const MAX_TERMS: usize = 64;

pub fn to_complex_matrix(h: &HermitianIntMatrix) -> DMatrix<Complex64> {
    let d = h.dim();
    DMatrix::from_fn(d, d, |r, c| h.matrix().get(r, c).to_complex64())
}

fn norm1(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(−iHt)` by scaling and squaring of a Taylor series.
pub fn propagator(h: &DMatrix<Complex64>, t: f64) -> Result<DMatrix<Complex64>> {
    if !t.is_finite() || h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let d = h.nrows();
    if h.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: h.ncols(),
        });
    }
    let a = h * Complex64::new(0.0, -t);
    let norm = norm1(&a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * Complex64::new(0.5f64.powi(squarings), 0.0);

    let mut sum = DMatrix::<Complex64>::identity(d, d);
    let mut term = DMatrix::<Complex64>::identity(d, d);
    let mut converged = false;
    let mut last = f64::INFINITY;
    for k in 1..=MAX_TERMS {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
        last = norm1(&term);
        if last <= 1e-18 * norm1(&sum).max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::OracleNotConverged {
            terms: MAX_TERMS,
            residual: last,
        });
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// `exp(−iHt)·ψ_0`.
pub fn continuum_oracle(h: &DMatrix<Complex64>, psi0: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
    if psi0.len() != h.nrows() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: psi0.len(),
        });
    }
    Ok(propagator(h, t)? * psi0)
}

/// Eigenpairs of a self-adjoint matrix, eigenvalues ascending.
pub fn eigenmodes(h: &DMatrix<Complex64>) -> Vec<(f64, DVector<Complex64>)> {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let mut modes: Vec<(f64, DVector<Complex64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&e, v)| (e, v.into_owned()))
        .collect();
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));
    modes
}
