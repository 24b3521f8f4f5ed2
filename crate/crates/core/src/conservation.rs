//! Discrete conservation laws.
//!
//! For every self-adjoint `G` with `[G, H] = 0` the two-point correlation
//! `q_G(n) = ψ_n*Gψ_{n−1} + ψ_{n−1}*Gψ_n` takes the same real integer value
//! at every clock along a solution. `G = 1` gives `q_1 = 2 Re ψ_n*ψ_{n−1}`,
//! which stands in for the norm; the squared norm itself is not conserved.

use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::automaton::{first_violation, Trajectory};
use crate::error::{Error, Result};
use crate::gaussian::{GIVector, GaussianInt, HermitianIntMatrix};

fn check_clock(n: usize, lo: usize, hi: usize) -> Result<()> {
    if n < lo || n > hi {
        Err(Error::ClockOutOfRange { index: n, lo, hi })
    } else {
        Ok(())
    }
}

/// `q_G(n)` for `1 ≤ n ≤ N`.
pub fn two_point_invariant(traj: &Trajectory, g: &HermitianIntMatrix, n: usize) -> Result<GaussianInt> {
    traj.state(0).check_dim(g.dim())?;
    check_clock(n, 1, traj.last_clock())?;
    let a = traj.state(n);
    let b = traj.state(n - 1);
    Ok(a.inner(&g.apply(b)?)? + b.inner(&g.apply(a)?)?)
}

/// `q_1(n) = 2 Re ψ_n*ψ_{n−1}`.
pub fn norm_like_invariant(traj: &Trajectory, n: usize) -> Result<BigInt> {
    check_clock(n, 1, traj.last_clock())?;
    let z = traj.state(n).inner(traj.state(n - 1))?;
    Ok(z.re * 2)
}

/// Exact value `numerator / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfInteger {
    pub numerator: BigInt,
}

impl HalfInteger {
    pub fn is_integer(&self) -> bool {
        (&self.numerator % 2u8).is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64().unwrap_or(f64::NAN) / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", &self.numerator / 2)
        } else {
            write!(f, "{}/2", self.numerator)
        }
    }
}

/// `(1/2) Re ψ_n*(ψ_{n+1} + ψ_{n−1})` at an interior clock.
pub fn symmetrized_q(traj: &Trajectory, n: usize) -> Result<HalfInteger> {
    check_clock(n, 1, traj.last_clock().saturating_sub(1))?;
    let sum = traj.state(n + 1).add(traj.state(n - 1))?;
    Ok(HalfInteger {
        numerator: traj.state(n).inner(&sum)?.re,
    })
}

/// `ψ_n*Gψ̇_n + ψ̇_n*Gψ_n`, which vanishes on solutions for commuting `G`.
pub fn conservation_bilinear(traj: &Trajectory, g: &HermitianIntMatrix, n: usize) -> Result<GaussianInt> {
    traj.state(0).check_dim(g.dim())?;
    let dot = traj.dot(n)?;
    let psi = traj.state(n);
    Ok(psi.inner(&g.apply(&dot)?)? + dot.inner(&g.apply(psi)?)?)
}

/// Values of `q_G` at clocks `1..=N`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservedQuantity {
    pub label: String,
    /// Entry `k` holds `q_G(k + 1)`.
    pub values_by_n: Vec<GaussianInt>,
}

impl ConservedQuantity {
    pub fn along(traj: &Trajectory, g: &HermitianIntMatrix, label: impl Into<String>) -> Result<Self> {
        traj.state(0).check_dim(g.dim())?;
        let applied: Vec<GIVector> = traj
            .states()
            .iter()
            .map(|s| g.apply(s))
            .collect::<Result<_>>()?;
        let values_by_n = (1..traj.len())
            .map(|n| {
                Ok(traj.state(n).inner(&applied[n - 1])? + traj.state(n - 1).inner(&applied[n])?)
            })
            .collect::<Result<_>>()?;
        Ok(ConservedQuantity {
            label: label.into(),
            values_by_n,
        })
    }

    pub fn is_constant(&self) -> bool {
        self.values_by_n.windows(2).all(|w| w[0] == w[1])
    }

    /// Clock of the first value differing from `q_G(1)`.
    pub fn first_change(&self) -> Option<usize> {
        let first = self.values_by_n.first()?;
        self.values_by_n
            .iter()
            .position(|v| v != first)
            .map(|k| k + 1)
    }
}

/// Polynomial commutant basis `{1, H, H², H³}` with labels.
pub fn default_observables(h: &HermitianIntMatrix) -> Vec<(String, HermitianIntMatrix)> {
    vec![
        ("identity".to_string(), HermitianIntMatrix::identity(h.dim())),
        ("H".to_string(), h.clone()),
        ("H^2".to_string(), h.pow(2)),
        ("H^3".to_string(), h.pow(3)),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub label: String,
    pub commutes: bool,
    /// `q_G` identical at every clock and the bilinear zero at every interior clock.
    pub conserved: bool,
    /// The conserved value when `conserved`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<GaussianInt>,
    /// Full `q_G(1..=N)` series when not conserved.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub drift: Vec<GaussianInt>,
    /// First interior clock where the bilinear did not vanish.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bilinear_violation: Option<usize>,
    #[serde(skip)]
    pub values: ConservedQuantity,
}

impl AuditEntry {
    /// A check passes when the observable commutes and is conserved, or when
    /// it does not commute (drift is informational).
    pub fn passed(&self) -> bool {
        !self.commutes || self.conserved
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    /// `q_1` vanishes: adjacent slices are orthogonal. Permitted but flagged.
    pub q1_zero: bool,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(AuditEntry::passed)
    }

    /// Writes `label,n,re,im` rows of every `q_G` series.
    pub fn write_values_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::InvalidLiteral(e.to_string());
        w.write_record(["label", "n", "re", "im"]).map_err(io)?;
        for entry in &self.entries {
            for (k, v) in entry.values.values_by_n.iter().enumerate() {
                w.write_record([
                    entry.label.clone(),
                    (k + 1).to_string(),
                    v.re.to_string(),
                    v.im.to_string(),
                ])
                .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::InvalidLiteral(e.to_string()))
    }
}

/// Audits each observable along a solution trajectory.
///
/// Fails with [`Error::NotASolution`] when `traj` does not obey the
/// equations of motion for `h`.
pub fn audit_conservation(
    traj: &Trajectory,
    h: &HermitianIntMatrix,
    observables: &[(String, HermitianIntMatrix)],
) -> Result<AuditReport> {
    traj.state(0).check_dim(h.dim())?;
    if let Some(site) = first_violation(traj, h)? {
        return Err(Error::NotASolution { site });
    }
    let q1 = norm_like_invariant(traj, 1)?;
    let mut entries = Vec::with_capacity(observables.len());
    for (label, g) in observables {
        if g.dim() != h.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: g.dim(),
            });
        }
        let commutes = g.matrix().commutator(h.matrix())?.is_zero();
        let values = ConservedQuantity::along(traj, g, label.clone())?;
        let mut bilinear_violation = None;
        for n in 1..traj.last_clock() {
            if !conservation_bilinear(traj, g, n)?.is_zero() {
                bilinear_violation = Some(n);
                break;
            }
        }
        let conserved = values.is_constant() && bilinear_violation.is_none();
        entries.push(AuditEntry {
            label: label.clone(),
            commutes,
            conserved,
            value: conserved.then(|| values.values_by_n[0].clone()),
            drift: if conserved {
                Vec::new()
            } else {
                values.values_by_n.clone()
            },
            bilinear_violation,
            values,
        });
    }
    Ok(AuditReport {
        q1_zero: q1.is_zero(),
        entries,
    })
}
