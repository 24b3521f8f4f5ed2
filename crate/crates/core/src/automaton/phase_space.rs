use num_bigint::BigInt;

use super::Trajectory;
use crate::error::{Error, Result};
use crate::gaussian::{GIVector, IntMatrix};

/// Real-integer phase-space form of a trajectory, `ψ_n = x_n + i·p_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseTrajectory {
    pub xs: Vec<Vec<BigInt>>,
    pub ps: Vec<Vec<BigInt>>,
}

impl PhaseTrajectory {
    pub fn from_trajectory(traj: &Trajectory) -> PhaseTrajectory {
        PhaseTrajectory {
            xs: traj.states().iter().map(GIVector::real_parts).collect(),
            ps: traj.states().iter().map(GIVector::imag_parts).collect(),
        }
    }

    pub fn to_trajectory(&self) -> Result<Trajectory> {
        let states = self
            .xs
            .iter()
            .zip(&self.ps)
            .map(|(x, p)| GIVector::from_parts(x, p))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(states)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}

fn add3(a: &[BigInt], b: &[BigInt], c: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((a, b), c)| a + b + c)
        .collect()
}

/// Coupled-oscillator form of the two-step rule:
///
/// ```text
/// x_{n+1} = x_{n−1} + hS·p_n + hA·x_n
/// p_{n+1} = p_{n−1} − hS·x_n + hA·p_n
/// ```
#[allow(clippy::too_many_arguments)]
pub fn evolve_phase_space(
    x0: &[BigInt],
    p0: &[BigInt],
    x1: &[BigInt],
    p1: &[BigInt],
    h_sym: &IntMatrix,
    h_anti: &IntMatrix,
    steps: usize,
) -> Result<PhaseTrajectory> {
    h_sym.check_symmetric()?;
    h_anti.check_antisymmetric()?;
    let d = h_sym.dim();
    if h_anti.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: h_anti.dim(),
        });
    }
    for v in [x0, p0, x1, p1] {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
    }
    let mut xs = vec![x0.to_vec(), x1.to_vec()];
    let mut ps = vec![p0.to_vec(), p1.to_vec()];
    for n in 1..=steps {
        let sp = h_sym.apply(&ps[n])?;
        let ax = h_anti.apply(&xs[n])?;
        let sx: Vec<BigInt> = h_sym.apply(&xs[n])?.into_iter().map(|v| -v).collect();
        let ap = h_anti.apply(&ps[n])?;
        let x_next = add3(&xs[n - 1], &sp, &ax);
        let p_next = add3(&ps[n - 1], &sx, &ap);
        xs.push(x_next);
        ps.push(p_next);
    }
    Ok(PhaseTrajectory { xs, ps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn period_four_integer_orbit() {
        let s = IntMatrix::from_rows(&[&[2]]).unwrap();
        let a = IntMatrix::zeros(1);
        let run = evolve_phase_space(&ints(&[1]), &ints(&[0]), &ints(&[0]), &ints(&[-1]), &s, &a, 6)
            .unwrap();
        let x: Vec<i64> = vec![1, 0, -1, 0, 1, 0, -1, 0];
        let p: Vec<i64> = vec![0, -1, 0, 1, 0, -1, 0, 1];
        assert_eq!(run.xs, x.iter().map(|&v| ints(&[v])).collect::<Vec<_>>());
        assert_eq!(run.ps, p.iter().map(|&v| ints(&[v])).collect::<Vec<_>>());
    }

    #[test]
    fn frozen_without_couplings() {
        let z = IntMatrix::zeros(2);
        let run = evolve_phase_space(
            &ints(&[1, 2]),
            &ints(&[3, 4]),
            &ints(&[5, 6]),
            &ints(&[7, 8]),
            &z,
            &z,
            4,
        )
        .unwrap();
        for n in 0..run.len() {
            let even = n % 2 == 0;
            assert_eq!(run.xs[n], if even { ints(&[1, 2]) } else { ints(&[5, 6]) });
            assert_eq!(run.ps[n], if even { ints(&[3, 4]) } else { ints(&[7, 8]) });
        }
    }

    #[test]
    fn rejects_asymmetric_parts() {
        let bad = IntMatrix::from_rows(&[&[0, 1], &[2, 0]]).unwrap();
        let z = IntMatrix::zeros(2);
        let v = ints(&[0, 0]);
        assert!(matches!(
            evolve_phase_space(&v, &v, &v, &v, &bad, &z, 1),
            Err(Error::NotSymmetric { .. })
        ));
        let sym = IntMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert!(matches!(
            evolve_phase_space(&v, &v, &v, &v, &z, &sym, 1),
            Err(Error::NotAntisymmetric { .. })
        ));
    }
}
