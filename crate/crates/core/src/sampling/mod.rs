//! Bridge between discrete trajectories and bandlimited continuum signals.
//!
//! A trajectory sampled at spacing `l` is read as the samples `ψ(n·l)` of a
//! function whose spectrum lies in `[−π/l, π/l]`, reconstructed by the
//! Whittaker–Shannon sum `ψ(t) = Σ_n ψ_n sinc(π(t − n·l)/l)`. Shifts by one
//! clock step become shifts by `l` in time, and the symmetrized conserved
//! quantity becomes `Re ψ*(t) cosh(l d/dt) ψ(t)`.
//!
//! The reconstruction is floating point. Integer samples are cast to `f64`,
//! so the map is invertible only up to round-off; sample points themselves
//! are reproduced exactly because every other sinc term is an exact zero.
//! The infinite sum is truncated to `2W + 1` terms around `t`; away from
//! sample points the truncation error falls off like `1/W`.

mod convergence;
mod dispersion;
mod oracle;

pub use convergence::{
    convergence_study, evolve_float, fit_power_law, phase_rate_check, single_mode_signal,
    ConvergenceReport, PhaseRateCheck, ScaleResult,
};
pub use dispersion::{dispersion_theta, empirical_phase_advance, DispersionPoint, Regime};
pub use oracle::{continuum_oracle, eigenmodes, propagator, to_complex_matrix};

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::automaton::Trajectory;
use crate::error::{Error, Result};

/// Physical time per clock step; fixes the band limit `π/l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretenessScale(f64);

impl DiscretenessScale {
    pub fn new(l: f64) -> Result<Self> {
        if l.is_finite() && l > 0.0 {
            Ok(DiscretenessScale(l))
        } else {
            Err(Error::InvalidScale(l))
        }
    }

    pub fn l(&self) -> f64 {
        self.0
    }

    pub fn band_limit(&self) -> f64 {
        PI / self.0
    }
}

/// `sin(πx)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let k = x.round();
    let r = x - k;
    let s = (PI * r).sin();
    if k.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

pub(crate) fn cos_pi(x: f64) -> f64 {
    let k = x.round();
    let r = x - k;
    let c = (PI * r).cos();
    if k.rem_euclid(2.0) == 0.0 {
        c
    } else {
        -c
    }
}

/// Normalized sinc `sin(πx)/(πx)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        sin_pi(x) / (PI * x)
    }
}

/// Second derivative of [`sinc`] with respect to `x`.
pub fn sinc_second_derivative(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        let p2 = PI * PI;
        return -p2 / 3.0 + p2 * p2 * x2 / 10.0 - p2 * p2 * p2 * x2 * x2 / 168.0;
    }
    let s = sin_pi(x);
    let c = cos_pi(x);
    -PI * s / x - 2.0 * c / (x * x) + 2.0 * s / (PI * x * x * x)
}

/// Which expression of the continuum conserved quantity to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QOrder {
    /// `Re ψ*(t)·[ψ(t+l) + ψ(t−l)]/2` through the reconstruction.
    ExactCosh,
    /// `|ψ(t)|² + (l²/2) Re ψ*(t)·ψ''(t)`.
    OrderL2,
}

/// Output of a reconstruction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub values: Vec<Complex64>,
    /// `t` lies more than half a step outside the sampled clock range.
    pub extrapolated: bool,
}

/// Bandlimited signal represented by its samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumSignal {
    samples: Vec<Vec<Complex64>>,
    scale: DiscretenessScale,
    window: usize,
}

impl ContinuumSignal {
    pub fn from_samples(
        samples: Vec<Vec<Complex64>>,
        scale: DiscretenessScale,
        window: usize,
    ) -> Result<Self> {
        if window == 0 {
            return Err(Error::InvalidWindow);
        }
        let dim = samples.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return Err(Error::TrajectoryTooShort {
                len: samples.len(),
                min: 1,
            });
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(ContinuumSignal {
            samples,
            scale,
            window,
        })
    }

    pub fn from_trajectory(traj: &Trajectory, scale: DiscretenessScale, window: usize) -> Result<Self> {
        ContinuumSignal::from_samples(
            traj.states().iter().map(|s| s.to_complex64()).collect(),
            scale,
            window,
        )
    }

    pub fn scale(&self) -> DiscretenessScale {
        self.scale
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    pub fn samples(&self) -> &[Vec<Complex64>] {
        &self.samples
    }

    /// Position in units of clock steps; snapped onto the grid when within
    /// a few ulps of an integer so that sample times such as `n·l` computed
    /// in floating point land exactly on their sample.
    fn position(&self, t: f64) -> f64 {
        let x = t / self.scale.l();
        let k = x.round();
        if (x - k).abs() <= 8.0 * f64::EPSILON * x.abs().max(1.0) {
            k
        } else {
            x
        }
    }

    fn terms(&self, x: f64) -> std::ops::RangeInclusive<usize> {
        let last = self.samples.len() as f64 - 1.0;
        let w = self.window as f64;
        let center = x.round();
        let lo = (center - w).max(0.0);
        let hi = (center + w).min(last);
        if lo > hi {
            // empty range
            #[allow(clippy::reversed_empty_ranges)]
            return 1..=0;
        }
        lo as usize..=hi as usize
    }

    fn is_extrapolated(&self, x: f64) -> bool {
        let last = self.samples.len() as f64 - 1.0;
        x < -0.5 || x > last + 0.5
    }

    fn kernel_sum(&self, x: f64, kernel: fn(f64) -> f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for m in self.terms(x) {
            let w = kernel(x - m as f64);
            if w == 0.0 {
                continue;
            }
            for (acc, s) in out.iter_mut().zip(&self.samples[m]) {
                *acc += s * w;
            }
        }
        out
    }

    /// Truncated Whittaker–Shannon sum at time `t`.
    pub fn evaluate(&self, t: f64) -> Reconstruction {
        let x = self.position(t);
        Reconstruction {
            values: self.kernel_sum(x, sinc),
            extrapolated: self.is_extrapolated(x),
        }
    }

    /// Second time derivative of the truncated reconstruction.
    pub fn second_derivative(&self, t: f64) -> Vec<Complex64> {
        let x = self.position(t);
        let l2 = self.scale.l() * self.scale.l();
        self.kernel_sum(x, sinc_second_derivative)
            .into_iter()
            .map(|v| v / l2)
            .collect()
    }
}

/// Reconstructs the continuum signal of `traj` at time `t`.
pub fn reconstruct(
    traj: &Trajectory,
    scale: DiscretenessScale,
    t: f64,
    window: usize,
) -> Result<Reconstruction> {
    Ok(ContinuumSignal::from_trajectory(traj, scale, window)?.evaluate(t))
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Residuals of the shift rule `ψ_{n±1} ↦ ψ(t ± l)` at `t = n·l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftResidual {
    pub forward: f64,
    pub backward: f64,
}

impl ShiftResidual {
    pub fn max(&self) -> f64 {
        self.forward.max(self.backward)
    }
}

pub fn shift_map_check(
    traj: &Trajectory,
    scale: DiscretenessScale,
    n: usize,
    window: usize,
) -> Result<ShiftResidual> {
    if n == 0 || n >= traj.last_clock() {
        return Err(Error::ClockOutOfRange {
            index: n,
            lo: 1,
            hi: traj.last_clock().saturating_sub(1),
        });
    }
    let signal = ContinuumSignal::from_trajectory(traj, scale, window)?;
    let t = n as f64 * scale.l();
    let ahead = signal.evaluate(t + scale.l()).values;
    let behind = signal.evaluate(t - scale.l()).values;
    Ok(ShiftResidual {
        forward: max_abs_diff(&ahead, &signal.samples[n + 1]),
        backward: max_abs_diff(&behind, &signal.samples[n - 1]),
    })
}

/// Continuum image of the symmetrized conserved quantity at time `t`.
pub fn continuum_q(signal: &ContinuumSignal, t: f64, order: QOrder) -> f64 {
    let l = signal.scale.l();
    let psi = signal.evaluate(t).values;
    match order {
        QOrder::ExactCosh => {
            let ahead = signal.evaluate(t + l).values;
            let behind = signal.evaluate(t - l).values;
            psi.iter()
                .zip(ahead.iter().zip(&behind))
                .map(|(p, (a, b))| (p.conj() * (a + b)).re / 2.0)
                .sum()
        }
        QOrder::OrderL2 => {
            let dd = signal.second_derivative(t);
            psi.iter()
                .zip(&dd)
                .map(|(p, d)| p.norm_sqr() + 0.5 * l * l * (p.conj() * d).re)
                .sum()
        }
    }
}

/// Writes `t,alpha,re,im` rows for every time of `grid`; floats carry 17
/// significant digits.
pub fn write_reconstruction_csv<W: Write>(signal: &ContinuumSignal, grid: &[f64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::InvalidLiteral(e.to_string());
    w.write_record(["t", "alpha", "re", "im"]).map_err(io)?;
    for &t in grid {
        let r = signal.evaluate(t);
        for (alpha, z) in r.values.iter().enumerate() {
            w.write_record([
                format_float(t),
                alpha.to_string(),
                format_float(z.re),
                format_float(z.im),
            ])
            .map_err(io)?;
        }
    }
    w.flush().map_err(|e| Error::InvalidLiteral(e.to_string()))
}

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
