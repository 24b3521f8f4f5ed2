//! Action evaluation and the integer-valued variational principle.
//!
//! Two forms of the action appear here:
//!
//! * [`action_evaluate`] sums the site-local density
//!   `(1/2i)(ψ_n*ψ̇_n − ψ̇_n*ψ_n) + ψ_n*Hψ_n` over interior sites
//!   `1..=N−1`. The density vanishes site by site on solutions.
//! * [`ConjugateAction`] treats `ψ` and `ψ*` as independent variables and
//!   writes the kinetic part over links,
//!   `−i Σ_{k=0}^{N−1} (χ_k·ψ_{k+1} − χ_{k+1}·ψ_k)` with `χ = ψ*`. On an
//!   unbounded clock this equals the site-density form after a shift of
//!   summation index; on a finite trajectory with fixed end slices it is the
//!   form whose variation at every interior site reproduces the equations of
//!   motion. Stationarity is checked against it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::gaussian::{GIVector, GaussianInt, HermitianIntMatrix};

/// Variation amplitudes used by [`verify_stationarity`] unless overridden.
pub const DEFAULT_DELTAS: [i64; 3] = [1, 2, 3];

/// Value of the action; real for self-adjoint `H` on conjugate-consistent
/// trajectories.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionValue(pub GaussianInt);

impl ActionValue {
    pub fn value(&self) -> &GaussianInt {
        &self.0
    }

    pub fn is_real(&self) -> bool {
        self.0.is_real()
    }
}

/// Sum of the action density over interior sites, end slices held fixed.
pub fn action_evaluate(traj: &Trajectory, h: &HermitianIntMatrix) -> Result<ActionValue> {
    traj.require_len(3)?;
    traj.state(0).check_dim(h.dim())?;
    let mut total = GaussianInt::zero();
    for n in 1..traj.last_clock() {
        let psi = traj.state(n);
        let dot = traj.dot(n)?;
        // (1/2i)(z − z̄) = Im z for z = ψ*·ψ̇
        let z = psi.inner(&dot)?;
        total.re += z.im;
        total += psi.inner(&h.apply(psi)?)?;
    }
    Ok(ActionValue(total))
}

/// Which real component of which independent variable is varied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationPart {
    PsiRe,
    PsiIm,
    ConjRe,
    ConjIm,
}

impl VariationPart {
    pub const ALL: [VariationPart; 4] = [
        VariationPart::PsiRe,
        VariationPart::PsiIm,
        VariationPart::ConjRe,
        VariationPart::ConjIm,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariationSpec {
    pub site: usize,
    pub dof: usize,
    pub part: VariationPart,
    pub delta: i64,
}

/// Result of the symmetric integer difference quotient
/// `[g(f+δ) − g(f−δ)] / 2δ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variation {
    /// `δ = 0`: the variation is defined to vanish, nothing is divided.
    ZeroDelta,
    /// Reduced quotient; `denominator` is positive and `1` whenever the
    /// quotient is a Gaussian integer.
    Value {
        numerator: GaussianInt,
        denominator: BigInt,
    },
}

impl Variation {
    pub fn is_zero(&self) -> bool {
        match self {
            Variation::ZeroDelta => true,
            Variation::Value { numerator, .. } => numerator.is_zero(),
        }
    }

    /// The quotient when it is a Gaussian integer.
    pub fn exact(&self) -> Option<GaussianInt> {
        match self {
            Variation::ZeroDelta => Some(GaussianInt::zero()),
            Variation::Value {
                numerator,
                denominator,
            } if denominator.is_one() => Some(numerator.clone()),
            Variation::Value { .. } => None,
        }
    }
}

/// Discrete variation of `g` at `f` with integer step `delta`.
pub fn discrete_variation<G>(mut g: G, f: &BigInt, delta: &BigInt) -> Variation
where
    G: FnMut(&BigInt) -> GaussianInt,
{
    if delta.is_zero() {
        return Variation::ZeroDelta;
    }
    let diff = g(&(f + delta)) - g(&(f - delta));
    let mut den: BigInt = delta * 2;
    let mut num = diff;
    if den.is_negative() {
        den = -den;
        num = -num;
    }
    let common = num.re.gcd(&num.im).gcd(&den);
    if !common.is_zero() && !common.is_one() {
        num = GaussianInt::new(&num.re / &common, &num.im / &common);
        den /= &common;
    }
    if num.is_zero() {
        den = BigInt::one();
    }
    Variation::Value {
        numerator: num,
        denominator: den,
    }
}

/// `vᵀ·H` as a vector.
fn row_times(v: &GIVector, h: &HermitianIntMatrix) -> GIVector {
    let m = h.matrix();
    (0..h.dim())
        .map(|b| {
            v.iter()
                .enumerate()
                .filter(|(a, _)| !m.get(*a, b).is_zero())
                .map(|(a, x)| x * m.get(a, b))
                .sum()
        })
        .collect()
}

/// Action with `ψ` and `χ = ψ*` as independent Gaussian-integer fields.
#[derive(Clone, Debug)]
pub struct ConjugateAction<'h> {
    psi: Vec<GIVector>,
    chi: Vec<GIVector>,
    h: &'h HermitianIntMatrix,
    /// `H·ψ_k` per site.
    h_psi: Vec<GIVector>,
    /// `χ_kᵀ·H` per site.
    chi_h: Vec<GIVector>,
}

impl<'h> ConjugateAction<'h> {
    pub fn from_trajectory(traj: &Trajectory, h: &'h HermitianIntMatrix) -> Result<Self> {
        traj.require_len(3)?;
        traj.state(0).check_dim(h.dim())?;
        let psi = traj.states().to_vec();
        let chi: Vec<GIVector> = psi.iter().map(GIVector::conj).collect();
        let h_psi = psi.iter().map(|v| h.apply(v)).collect::<Result<_>>()?;
        let chi_h = chi.iter().map(|v| row_times(v, h)).collect();
        Ok(ConjugateAction {
            psi,
            chi,
            h,
            h_psi,
            chi_h,
        })
    }

    fn last(&self) -> usize {
        self.psi.len() - 1
    }

    /// Returns a copy with the designated real component set to `value`.
    pub fn with_component(&self, site: usize, dof: usize, part: VariationPart, value: &BigInt) -> Self {
        let mut out = self.clone();
        let slot = match part {
            VariationPart::PsiRe | VariationPart::PsiIm => &mut out.psi[site].entries_mut()[dof],
            VariationPart::ConjRe | VariationPart::ConjIm => &mut out.chi[site].entries_mut()[dof],
        };
        match part {
            VariationPart::PsiRe | VariationPart::ConjRe => slot.re = value.clone(),
            VariationPart::PsiIm | VariationPart::ConjIm => slot.im = value.clone(),
        }
        out.h_psi[site] = self.h.apply(&out.psi[site]).expect("uniform dim");
        out.chi_h[site] = row_times(&out.chi[site], self.h);
        out
    }

    pub fn component(&self, site: usize, dof: usize, part: VariationPart) -> BigInt {
        match part {
            VariationPart::PsiRe => self.psi[site][dof].re.clone(),
            VariationPart::PsiIm => self.psi[site][dof].im.clone(),
            VariationPart::ConjRe => self.chi[site][dof].re.clone(),
            VariationPart::ConjIm => self.chi[site][dof].im.clone(),
        }
    }

    /// Full action: links `0..N` plus the potential at interior sites.
    pub fn full(&self) -> GaussianInt {
        let mut kinetic = GaussianInt::zero();
        for k in 0..self.last() {
            kinetic += self.chi[k].dot(&self.psi[k + 1]).expect("uniform dim");
            kinetic -= self.chi[k + 1].dot(&self.psi[k]).expect("uniform dim");
        }
        let mut total = kinetic.mul_neg_i();
        for k in 1..self.last() {
            let hpsi = self.h.apply(&self.psi[k]).expect("uniform dim");
            total += self.chi[k].dot(&hpsi).expect("uniform dim");
        }
        total
    }

    /// Coefficients of the terms that contain `ψ_site^dof` or `χ_site^dof`.
    fn local_terms(&self, site: usize, dof: usize) -> LocalTerms {
        let psi0 = self.psi[site][dof].clone();
        let chi0 = self.chi[site][dof].clone();
        let mut chi_link = GaussianInt::zero();
        let mut psi_link = GaussianInt::zero();
        if site > 0 {
            chi_link += &self.chi[site - 1][dof];
            psi_link -= &self.psi[site - 1][dof];
        }
        if site < self.last() {
            chi_link -= &self.chi[site + 1][dof];
            psi_link += &self.psi[site + 1][dof];
        }
        let mut psi_coef = chi_link.mul_neg_i();
        let mut chi_coef = psi_link.mul_neg_i();
        let mut diag = GaussianInt::zero();
        if site > 0 && site < self.last() {
            diag = self.h.matrix().get(dof, dof).clone();
            psi_coef += &self.chi_h[site][dof] - &(&chi0 * &diag);
            chi_coef += &self.h_psi[site][dof] - &(&diag * &psi0);
        }
        LocalTerms {
            psi0,
            chi0,
            psi_coef,
            chi_coef,
            diag,
        }
    }

    /// Sum of the action terms that contain `ψ_site^dof` or `χ_site^dof`,
    /// with the designated component replaced by `value`. Differs from
    /// [`full`](Self::full) by terms independent of that component.
    pub fn local(&self, site: usize, dof: usize, part: VariationPart, value: &BigInt) -> GaussianInt {
        self.local_terms(site, dof).eval(part, value)
    }

    /// Discrete variation of the action with respect to one component.
    pub fn variation(&self, spec: &VariationSpec) -> Variation {
        self.local_terms(spec.site, spec.dof).variation(spec.part, spec.delta)
    }
}

/// `S_local = a·ψ + χ·(b + d·ψ)` for one site and degree of freedom.
struct LocalTerms {
    psi0: GaussianInt,
    chi0: GaussianInt,
    psi_coef: GaussianInt,
    chi_coef: GaussianInt,
    diag: GaussianInt,
}

impl LocalTerms {
    fn eval(&self, part: VariationPart, value: &BigInt) -> GaussianInt {
        let mut psi = self.psi0.clone();
        let mut chi = self.chi0.clone();
        match part {
            VariationPart::PsiRe => psi.re = value.clone(),
            VariationPart::PsiIm => psi.im = value.clone(),
            VariationPart::ConjRe => chi.re = value.clone(),
            VariationPart::ConjIm => chi.im = value.clone(),
        }
        let inner = &self.chi_coef + &(&self.diag * &psi);
        &(&self.psi_coef * &psi) + &(&chi * &inner)
    }

    fn variation(&self, part: VariationPart, delta: i64) -> Variation {
        let f = match part {
            VariationPart::PsiRe => &self.psi0.re,
            VariationPart::PsiIm => &self.psi0.im,
            VariationPart::ConjRe => &self.chi0.re,
            VariationPart::ConjIm => &self.chi0.im,
        };
        discrete_variation(|x| self.eval(part, x), f, &BigInt::from(delta))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StationarityViolation {
    pub site: usize,
    pub dof: usize,
    pub part: VariationPart,
    pub delta: i64,
    pub variation: Variation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StationarityReport {
    /// Number of `(site, dof, part, delta)` variations evaluated.
    pub checked: usize,
    pub violations: Vec<StationarityViolation>,
}

impl StationarityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Distinct violating sites in ascending order.
    pub fn sites(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.violations.iter().map(|v| v.site).collect();
        s.dedup();
        s
    }
}

/// Varies every real component of `ψ` and `ψ*` at every interior site by
/// each of `deltas` and records the variations that do not vanish.
pub fn verify_stationarity(
    traj: &Trajectory,
    h: &HermitianIntMatrix,
    deltas: &[i64],
) -> Result<StationarityReport> {
    let action = ConjugateAction::from_trajectory(traj, h)?;
    if deltas.contains(&0) {
        return Err(Error::InvalidLiteral(
            "variation deltas must be nonzero".into(),
        ));
    }
    let mut report = StationarityReport {
        checked: 0,
        violations: Vec::new(),
    };
    for site in 1..traj.last_clock() {
        for dof in 0..traj.dim() {
            let terms = action.local_terms(site, dof);
            for part in VariationPart::ALL {
                for &delta in deltas {
                    let variation = terms.variation(part, delta);
                    report.checked += 1;
                    if !variation.is_zero() {
                        report.violations.push(StationarityViolation {
                            site,
                            dof,
                            part,
                            delta,
                            variation,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::evolve;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn square(f: &BigInt) -> GaussianInt {
        GaussianInt::real(f * f)
    }

    #[test]
    fn quadratic_variation_matches_derivative() {
        let v = discrete_variation(square, &big(3), &big(1));
        assert_eq!(v.exact(), Some(GaussianInt::real(6)));
        let v = discrete_variation(square, &big(3), &big(2));
        assert_eq!(v.exact(), Some(GaussianInt::real(6)));
        let v = discrete_variation(square, &big(3), &big(-2));
        assert_eq!(v.exact(), Some(GaussianInt::real(6)));
    }

    #[test]
    fn constant_has_zero_variation() {
        for d in 1..5 {
            assert!(discrete_variation(|_| GaussianInt::new(4, -9), &big(11), &big(d)).is_zero());
        }
    }

    #[test]
    fn zero_delta_is_reported_distinctly() {
        assert_eq!(
            discrete_variation(square, &big(3), &big(0)),
            Variation::ZeroDelta
        );
    }

    #[test]
    fn non_integral_quotient_is_kept_exact() {
        // step function: quotient 1/2
        let g = |f: &BigInt| GaussianInt::real(if *f > big(0) { 1 } else { 0 });
        let v = discrete_variation(g, &big(0), &big(1));
        assert_eq!(
            v,
            Variation::Value {
                numerator: GaussianInt::real(1),
                denominator: big(2)
            }
        );
        assert_eq!(v.exact(), None);
    }

    #[test]
    fn action_on_constant_non_solution() {
        let h = HermitianIntMatrix::from_reals(&[&[1]]).unwrap();
        let t = Trajectory::new(vec![GIVector::from_reals(&[1]); 3]).unwrap();
        assert_eq!(action_evaluate(&t, &h).unwrap().0, GaussianInt::real(1));
    }

    #[test]
    fn action_vanishes_on_solution() {
        let h = HermitianIntMatrix::from_pairs(&[&[(1, 0), (2, 1)], &[(2, -1), (-1, 0)]]).unwrap();
        let t = evolve(
            &GIVector::from_pairs(&[(1, 0), (0, 2)]),
            &GIVector::from_pairs(&[(3, -1), (1, 1)]),
            &h,
            12,
        )
        .unwrap();
        let s = action_evaluate(&t, &h).unwrap();
        assert!(s.is_real());
        assert_eq!(s.0, GaussianInt::zero());
    }

    #[test]
    fn action_needs_three_slices() {
        let h = HermitianIntMatrix::identity(1);
        let t = Trajectory::new(vec![GIVector::from_reals(&[1]); 2]).unwrap();
        assert!(matches!(
            action_evaluate(&t, &h),
            Err(Error::TrajectoryTooShort { len: 2, min: 3 })
        ));
    }

    #[test]
    fn local_and_full_variations_agree() {
        let h = HermitianIntMatrix::from_pairs(&[&[(2, 0), (1, -1)], &[(1, 1), (0, 0)]]).unwrap();
        let t = Trajectory::new(vec![
            GIVector::from_pairs(&[(1, 2), (0, -1)]),
            GIVector::from_pairs(&[(3, 0), (2, 2)]),
            GIVector::from_pairs(&[(-1, 1), (4, 0)]),
            GIVector::from_pairs(&[(0, 0), (1, -3)]),
        ])
        .unwrap();
        let action = ConjugateAction::from_trajectory(&t, &h).unwrap();
        for site in 1..3 {
            for dof in 0..2 {
                for part in VariationPart::ALL {
                    let f = action.component(site, dof, part);
                    let full = discrete_variation(
                        |x| action.with_component(site, dof, part, x).full(),
                        &f,
                        &big(2),
                    );
                    let local = action.variation(&VariationSpec {
                        site,
                        dof,
                        part,
                        delta: 2,
                    });
                    assert_eq!(full, local, "site {site} dof {dof} {part:?}");
                }
            }
        }
    }

    #[test]
    fn stationarity_on_solution_and_zero() {
        let h = HermitianIntMatrix::from_reals(&[&[0, 1], &[1, 0]]).unwrap();
        let t = evolve(
            &GIVector::from_reals(&[1, 0]),
            &GIVector::from_reals(&[1, 0]),
            &h,
            5,
        )
        .unwrap();
        let r = verify_stationarity(&t, &h, &DEFAULT_DELTAS).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked, 5 * 2 * 4 * 3);

        let zero = Trajectory::new(vec![GIVector::zeros(2); 4]).unwrap();
        assert!(verify_stationarity(&zero, &h, &DEFAULT_DELTAS).unwrap().passed());
    }

    #[test]
    fn stationarity_names_corrupted_site() {
        let h = HermitianIntMatrix::from_pairs(&[&[(1, 0), (1, 1)], &[(1, -1), (2, 0)]]).unwrap();
        let t = evolve(
            &GIVector::from_reals(&[1, 0]),
            &GIVector::from_reals(&[0, 1]),
            &h,
            6,
        )
        .unwrap();
        let bad = t.with_entry(3, 0, &t.state(3)[0] + &GaussianInt::real(1));
        let r = verify_stationarity(&bad, &h, &DEFAULT_DELTAS).unwrap();
        assert!(!r.passed());
        assert!(r.sites().contains(&3));
        assert!(r.sites().iter().all(|s| (2..=4).contains(s)));
    }
}
