//! Single-automaton dynamics.
//!
//! The state obeys the two-step rule `ψ_{n+1} = ψ_{n−1} − i·H·ψ_n`, the
//! discrete Schrödinger equation `ψ̇_n = −i·H·ψ_n` with the symmetric
//! difference `ψ̇_n = ψ_{n+1} − ψ_{n−1}`. The rule is exactly invertible, so
//! every trajectory can be run backwards bit for bit.
//!
//! Two initial slices are always explicit inputs; no half-step seeding is
//! constructed.

mod action;
mod phase_space;
mod trajectory;

pub use action::{
    action_evaluate, discrete_variation, verify_stationarity, ActionValue, ConjugateAction,
    StationarityReport, StationarityViolation, Variation, VariationPart, VariationSpec,
    DEFAULT_DELTAS,
};
pub use phase_space::{evolve_phase_space, PhaseTrajectory};
pub use trajectory::Trajectory;

use crate::error::{Error, Result};
use crate::gaussian::{GIVector, HermitianIntMatrix};

/// `ψ_{n+1} = ψ_{n−1} − i·H·ψ_n`.
pub fn step_forward(
    psi_prev: &GIVector,
    psi_curr: &GIVector,
    h: &HermitianIntMatrix,
) -> Result<GIVector> {
    psi_prev.check_dim(h.dim())?;
    let kick = h.apply(psi_curr)?;
    Ok(psi_prev
        .iter()
        .zip(kick.iter())
        .map(|(p, k)| p + &k.mul_neg_i())
        .collect())
}

/// `ψ_{n−1} = ψ_{n+1} + i·H·ψ_n`, the exact inverse of [`step_forward`].
pub fn step_backward(
    psi_next: &GIVector,
    psi_curr: &GIVector,
    h: &HermitianIntMatrix,
) -> Result<GIVector> {
    psi_next.check_dim(h.dim())?;
    let kick = h.apply(psi_curr)?;
    Ok(psi_next
        .iter()
        .zip(kick.iter())
        .map(|(p, k)| p + &k.mul_i())
        .collect())
}

/// Iterates [`step_forward`] `steps` times from `(seed0, seed1)`; the
/// result has `steps + 2` slices.
pub fn evolve(
    seed0: &GIVector,
    seed1: &GIVector,
    h: &HermitianIntMatrix,
    steps: usize,
) -> Result<Trajectory> {
    seed0.check_dim(h.dim())?;
    seed1.check_dim(h.dim())?;
    let mut states = Vec::with_capacity(steps + 2);
    states.push(seed0.clone());
    states.push(seed1.clone());
    for n in 1..=steps {
        let next = step_forward(&states[n - 1], &states[n], h)?;
        states.push(next);
    }
    Trajectory::new(states)
}

/// Runs the recurrence backwards from the last two slices of `traj`,
/// returning the reconstructed first two slices.
pub fn rewind(traj: &Trajectory, h: &HermitianIntMatrix) -> Result<(GIVector, GIVector)> {
    let n = traj.last_clock();
    let mut next = traj.state(n).clone();
    let mut curr = traj.state(n - 1).clone();
    for _ in 1..n {
        let prev = step_backward(&next, &curr, h)?;
        next = curr;
        curr = prev;
    }
    Ok((curr, next))
}

/// Residual `ψ_{n+1} − ψ_{n−1} + i·H·ψ_n` of the equation of motion at an
/// interior site; zero exactly when the site obeys the rule.
pub fn equation_residual(traj: &Trajectory, h: &HermitianIntMatrix, n: usize) -> Result<GIVector> {
    traj.state(0).check_dim(h.dim())?;
    let dot = traj.dot(n)?;
    dot.add(&h.apply(traj.state(n))?.mul_i())
}

/// First interior site where the equation of motion fails, if any.
pub fn first_violation(traj: &Trajectory, h: &HermitianIntMatrix) -> Result<Option<usize>> {
    for n in 1..traj.last_clock() {
        if !equation_residual(traj, h, n)?.is_zero() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Errors with [`Error::NotASolution`] unless `traj` obeys the rule everywhere.
pub fn require_solution(traj: &Trajectory, h: &HermitianIntMatrix) -> Result<()> {
    match first_violation(traj, h)? {
        None => Ok(()),
        Some(site) => Err(Error::NotASolution { site }),
    }
}
