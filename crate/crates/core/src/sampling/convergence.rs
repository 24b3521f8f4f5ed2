//! Continuum-limit studies on the floating-point side.
//!
//! The integer engine cannot be compared with a continuum solution directly:
//! the Hamiltonian has to be scaled with `l`, which leaves the integers. The
//! studies here therefore run the same two-step recurrence in `f64`. Every
//! exactness claim stays with the integer engine.
//!
//! Normalization: the step `ψ_{n+1} − ψ_{n−1} = −i·(lH)·ψ_n` approximates
//! `2l·ψ'(t)`, so the CA with Hamiltonian `l·H` tends to `ψ' = −i(H/2)ψ`.
//! The oracle is therefore evaluated with `H/2`, and the second seed is
//! `ψ_1 = exp(−i(H/2)l)·ψ_0`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::oracle::{continuum_oracle, eigenmodes, to_complex_matrix};
use super::{dispersion_theta, empirical_phase_advance, format_float, ContinuumSignal, DiscretenessScale};
use crate::error::{Error, Result};
use crate::gaussian::HermitianIntMatrix;

/// Float run of `ψ_{n+1} = ψ_{n−1} − i·K·ψ_n`; returns `steps + 2` slices.
pub fn evolve_float(
    k: &DMatrix<Complex64>,
    seed0: &DVector<Complex64>,
    seed1: &DVector<Complex64>,
    steps: usize,
) -> Vec<DVector<Complex64>> {
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = Vec::with_capacity(steps + 2);
    out.push(seed0.clone());
    out.push(seed1.clone());
    for n in 1..=steps {
        let next = &out[n - 1] + (k * &out[n]) * minus_i;
        out.push(next);
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`; points with `y ≤ 0` are
/// skipped. `None` with fewer than two usable points.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = usable.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = usable.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (den > 0.0).then(|| num / den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleResult {
    pub l: f64,
    pub steps: usize,
    /// Euclidean distance to the oracle at the target time.
    pub error: Option<f64>,
    /// Why the scale was left out of the fit.
    pub excluded: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub time: f64,
    pub window: usize,
    /// Largest `|E|` over the spectrum of `H`.
    pub max_energy: f64,
    pub rows: Vec<ScaleResult>,
    pub fitted_order: Option<f64>,
}

impl ConvergenceReport {
    /// Writes `l,error,fitted_order` rows for the scales that entered the fit.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::InvalidLiteral(e.to_string());
        w.write_record(["l", "error", "fitted_order"]).map_err(io)?;
        let order = self.fitted_order.map(format_float).unwrap_or_default();
        for row in &self.rows {
            if let Some(err) = row.error {
                w.write_record([format_float(row.l), format_float(err), order.clone()])
                    .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::InvalidLiteral(e.to_string()))
    }
}

/// Compares the CA with Hamiltonian `l·H` against `exp(−i(H/2)t)·ψ_0` at
/// time `time` for each scale, and fits the error to a power of `l`.
///
/// Scales at which some mode has `|E|·l > 2` are excluded and noted.
pub fn convergence_study(
    h: &HermitianIntMatrix,
    psi0: &DVector<Complex64>,
    time: f64,
    scales: &[f64],
    window: usize,
) -> Result<ConvergenceReport> {
    if window == 0 {
        return Err(Error::InvalidWindow);
    }
    if psi0.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi0.len(),
        });
    }
    if !(time.is_finite() && time >= 0.0) {
        return Err(Error::NonFiniteInput);
    }
    let hc = to_complex_matrix(h);
    let half = &hc * Complex64::new(0.5, 0.0);
    let max_energy = eigenmodes(&hc)
        .iter()
        .map(|(e, _)| e.abs())
        .fold(0.0, f64::max);
    let target = continuum_oracle(&half, psi0, time)?;

    let mut rows = Vec::with_capacity(scales.len());
    for &l in scales {
        let scale = DiscretenessScale::new(l)?;
        let steps = (time / l).ceil() as usize + window;
        if max_energy * l > 2.0 {
            rows.push(ScaleResult {
                l,
                steps,
                error: None,
                excluded: Some(format!(
                    "max |E|·l = {} exceeds 2: growing mode",
                    max_energy * l
                )),
            });
            continue;
        }
        let k = &hc * Complex64::new(l, 0.0);
        let seed1 = continuum_oracle(&half, psi0, l)?;
        let run = evolve_float(&k, psi0, &seed1, steps);
        let samples = run.iter().map(|v| v.iter().copied().collect()).collect();
        let signal = ContinuumSignal::from_samples(samples, scale, window)?;
        let approx = signal.evaluate(time).values;
        let error = approx
            .iter()
            .zip(target.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        rows.push(ScaleResult {
            l,
            steps,
            error: Some(error),
            excluded: None,
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.error.map(|e| (r.l, e)))
        .collect();
    Ok(ConvergenceReport {
        time,
        window,
        max_energy,
        rows,
        fitted_order: fit_power_law(&points),
    })
}

/// Phase drift per unit time of a single mode, measured against predicted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRateCheck {
    pub energy: f64,
    pub l: f64,
    /// `|θ_measured/l − E/2|` from the float run.
    pub empirical: f64,
    /// `|arcsin(E·l/2)/l − E/2|`.
    pub predicted: f64,
}

/// Runs the 1×1 CA with Hamiltonian `E·l`, seeded with the continuum second
/// slice, and measures its phase rate over `steps` steps.
pub fn phase_rate_check(energy: f64, l: f64, steps: usize) -> Result<PhaseRateCheck> {
    DiscretenessScale::new(l)?;
    let k = DMatrix::from_element(1, 1, Complex64::new(energy * l, 0.0));
    let seed0 = DVector::from_element(1, Complex64::new(1.0, 0.0));
    let seed1 = DVector::from_element(1, Complex64::from_polar(1.0, -energy * l / 2.0));
    let run = evolve_float(&k, &seed0, &seed1, steps);
    let series: Vec<Complex64> = run.iter().map(|v| v[0]).collect();
    let rate = empirical_phase_advance(&series) / l;
    let predicted = dispersion_theta(energy * l).theta / l;
    Ok(PhaseRateCheck {
        energy,
        l,
        empirical: (rate - energy / 2.0).abs(),
        predicted: (predicted - energy / 2.0).abs(),
    })
}

/// Single-mode signal `ψ_n = e^{−iθn}` produced by the float recurrence with
/// Hamiltonian `E·l` seeded on its own discrete plane wave; `2W + 1` samples.
/// Returns the signal and the time of its central sample.
pub fn single_mode_signal(energy: f64, l: f64, window: usize) -> Result<(ContinuumSignal, f64)> {
    let scale = DiscretenessScale::new(l)?;
    let theta = dispersion_theta(energy * l).theta;
    let k = DMatrix::from_element(1, 1, Complex64::new(energy * l, 0.0));
    let seed0 = DVector::from_element(1, Complex64::new(1.0, 0.0));
    let seed1 = DVector::from_element(1, Complex64::from_polar(1.0, -theta));
    let run = evolve_float(&k, &seed0, &seed1, 2 * window - 1);
    let samples = run.into_iter().map(|v| vec![v[0]]).collect();
    let signal = ContinuumSignal::from_samples(samples, scale, window)?;
    Ok((signal, window as f64 * l))
}
