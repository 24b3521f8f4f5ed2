use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `|E| ≤ 2`: unit-modulus eigenvalues of the two-step map.
    Oscillatory,
    /// `|E| > 2`: one eigenvalue grows, the band-limit premise fails.
    Growing,
}

/// Plane-wave solution `ψ_n ∝ λ^n` of `ψ_{n+1} − ψ_{n−1} = −iEψ_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub energy: f64,
    /// Phase advance per step, `λ = |λ|·e^{−iθ}`.
    pub theta: f64,
    pub regime: Regime,
    /// `|λ|` of the dominant root; `1` when oscillatory.
    pub growth: f64,
}

/// `θ = arcsin(E/2)` in the oscillatory regime; for `|E| > 2` the dominant
/// root of `λ − 1/λ = −iE` has modulus `(|E| + √(E² − 4))/2`.
pub fn dispersion_theta(energy: f64) -> DispersionPoint {
    let half = energy / 2.0;
    if half.abs() <= 1.0 {
        DispersionPoint {
            energy,
            theta: half.asin(),
            regime: Regime::Oscillatory,
            growth: 1.0,
        }
    } else {
        DispersionPoint {
            energy,
            theta: FRAC_PI_2.copysign(energy),
            regime: Regime::Growing,
            growth: (energy.abs() + (energy * energy - 4.0).sqrt()) / 2.0,
        }
    }
}

/// Least-squares phase advance per step of a scalar sequence, with the
/// convention `ψ_{n+1} ≈ e^{−iθ} ψ_n`. Phases are unwrapped step by step,
/// so `|θ|` must stay below `π`.
pub fn empirical_phase_advance(series: &[Complex64]) -> f64 {
    let n = series.len();
    if n < 2 {
        return 0.0;
    }
    let mut phase = Vec::with_capacity(n);
    let mut acc = 0.0;
    phase.push(0.0);
    for w in series.windows(2) {
        acc += (w[1] * w[0].conj()).arg();
        phase.push(acc);
    }
    let mean_k = (n as f64 - 1.0) / 2.0;
    let mean_p = phase.iter().sum::<f64>() / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, p) in phase.iter().enumerate() {
        let dk = k as f64 - mean_k;
        num += dk * (p - mean_p);
        den += dk * dk;
    }
    -num / den
}
