//! Composite automata with one clock per part.
//!
//! A field over `m` parts carries clocks `(n_1, …, n_m)` and degree-of-freedom
//! indices `(α_1, …, α_m)`. Its equation of motion at an interior lattice
//! point is
//!
//! ```text
//! Σ_k [Ψ(…n_k+1…) − Ψ(…n_k−1…)] = −i·(Σ_k H_(k) + I)·Ψ(n)
//! ```
//!
//! where `H_(k)` acts on index `α_k` only and `I` couples the parts. Without
//! interaction, products of single-automaton solutions solve it exactly.
//!
//! Both clock points and multi-indices are flattened row-major, so the last
//! axis varies fastest. Clocks on every axis start at `0`.

use std::io::Write;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::automaton::{evolve, require_solution, Trajectory};
use crate::error::{Error, Result};
use crate::gaussian::{GIVector, GaussianInt, HermitianIntMatrix};

fn row_major(coords: &[usize], shape: &[usize]) -> usize {
    coords
        .iter()
        .zip(shape)
        .fold(0, |acc, (&c, &s)| acc * s + c)
}

fn unflatten(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for (slot, &s) in out.iter_mut().zip(shape).rev() {
        *slot = flat % s;
        flat /= s;
    }
    out
}

/// Kronecker product of vectors in row-major order.
pub fn tensor_product(parts: &[&GIVector]) -> GIVector {
    let mut acc = vec![GaussianInt::from(1)];
    for v in parts {
        acc = acc
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect();
    }
    GIVector::new(acc)
}

/// Exact wave field on a product clock box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiWave {
    dims: Vec<usize>,
    clock_box: Vec<usize>,
    values: Vec<GaussianInt>,
}

impl MultiWave {
    /// Zero field; `clock_box[k]` is the number of clocks on axis `k`.
    pub fn zeros(dims: Vec<usize>, clock_box: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::EmptyMatrix);
        }
        if clock_box.len() != dims.len() {
            return Err(Error::PartCountMismatch {
                expected: dims.len(),
                found: clock_box.len(),
            });
        }
        if let Some(axis) = clock_box.iter().position(|&len| len == 0) {
            return Err(Error::ClockBoxTooSmall { axis, len: 0, min: 1 });
        }
        let size = dims.iter().product::<usize>() * clock_box.iter().product::<usize>();
        Ok(MultiWave {
            dims,
            clock_box,
            values: vec![GaussianInt::default(); size],
        })
    }

    /// Outer product of the factors over the box spanned by their clocks.
    pub fn product(factors: &[Trajectory]) -> Result<Self> {
        let dims = factors.iter().map(|t| t.dim()).collect();
        let clock_box = factors.iter().map(|t| t.len()).collect();
        let mut wave = MultiWave::zeros(dims, clock_box)?;
        for p in 0..wave.points() {
            let clocks = unflatten(p, &wave.clock_box);
            let slices: Vec<&GIVector> = factors
                .iter()
                .zip(&clocks)
                .map(|(t, &n)| t.state(n))
                .collect();
            wave.set_slice_at(p, tensor_product(&slices).entries());
        }
        Ok(wave)
    }

    pub fn parts(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn clock_box(&self) -> &[usize] {
        &self.clock_box
    }

    /// Dimension of the flattened multi-index space.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of lattice points in the clock box.
    pub fn points(&self) -> usize {
        self.clock_box.iter().product()
    }

    fn check_coords(&self, coords: &[usize], shape: &[usize]) -> Result<()> {
        if coords.len() != shape.len() {
            return Err(Error::PartCountMismatch {
                expected: shape.len(),
                found: coords.len(),
            });
        }
        for (&c, &s) in coords.iter().zip(shape) {
            if c >= s {
                return Err(Error::ClockOutOfRange {
                    index: c,
                    lo: 0,
                    hi: s - 1,
                });
            }
        }
        Ok(())
    }

    fn offset(&self, clocks: &[usize]) -> Result<usize> {
        self.check_coords(clocks, &self.clock_box)?;
        Ok(row_major(clocks, &self.clock_box) * self.total_dim())
    }

    pub fn get(&self, clocks: &[usize], indices: &[usize]) -> Result<&GaussianInt> {
        let base = self.offset(clocks)?;
        self.check_coords(indices, &self.dims)?;
        Ok(&self.values[base + row_major(indices, &self.dims)])
    }

    pub fn set(&mut self, clocks: &[usize], indices: &[usize], value: GaussianInt) -> Result<()> {
        let base = self.offset(clocks)?;
        self.check_coords(indices, &self.dims)?;
        let at = base + row_major(indices, &self.dims);
        self.values[at] = value;
        Ok(())
    }

    /// Flattened multi-index vector at fixed clocks.
    pub fn slice(&self, clocks: &[usize]) -> Result<GIVector> {
        let base = self.offset(clocks)?;
        Ok(GIVector::new(self.values[base..base + self.total_dim()].to_vec()))
    }

    pub fn set_slice(&mut self, clocks: &[usize], slice: &GIVector) -> Result<()> {
        let base = self.offset(clocks)?;
        slice.check_dim(self.total_dim())?;
        self.values[base..base + slice.dim()].clone_from_slice(slice.entries());
        Ok(())
    }

    fn set_slice_at(&mut self, point: usize, entries: &[GaussianInt]) {
        let d = self.total_dim();
        self.values[point * d..(point + 1) * d].clone_from_slice(entries);
    }

    fn slice_at(&self, point: usize) -> &[GaussianInt] {
        let d = self.total_dim();
        &self.values[point * d..(point + 1) * d]
    }

    /// Bipartite slice at fixed clocks as a `D_1 × D_2` matrix.
    pub fn slice_matrix(&self, clocks: &[usize]) -> Result<Vec<Vec<GaussianInt>>> {
        if self.parts() != 2 {
            return Err(Error::PartCountMismatch {
                expected: 2,
                found: self.parts(),
            });
        }
        let flat = self.slice(clocks)?;
        Ok(flat
            .entries()
            .chunks(self.dims[1])
            .map(|row| row.to_vec())
            .collect())
    }

    fn check_same_shape(&self, other: &MultiWave) -> Result<()> {
        if self.dims != other.dims || self.clock_box != other.clock_box {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                found: other.values.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiWave) -> Result<MultiWave> {
        self.check_same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(MultiWave { values, ..self.clone() })
    }

    pub fn sub(&self, other: &MultiWave) -> Result<MultiWave> {
        self.check_same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(MultiWave { values, ..self.clone() })
    }

    pub fn scale(&self, k: &GaussianInt) -> MultiWave {
        let values = self.values.iter().map(|v| k * v).collect();
        MultiWave { values, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryRecord {
    clocks: Vec<usize>,
    indices: Vec<usize>,
    value: GaussianInt,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiWaveRecord {
    parts: usize,
    dims: Vec<usize>,
    clock_box: Vec<usize>,
    values: Vec<EntryRecord>,
}

impl Serialize for MultiWave {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.total_dim();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(flat, value)| EntryRecord {
                clocks: unflatten(flat / d, &self.clock_box),
                indices: unflatten(flat % d, &self.dims),
                value: value.clone(),
            })
            .collect();
        MultiWaveRecord {
            parts: self.parts(),
            dims: self.dims.clone(),
            clock_box: self.clock_box.clone(),
            values,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiWave {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rec = MultiWaveRecord::deserialize(deserializer)?;
        if rec.parts != rec.dims.len() {
            return Err(D::Error::custom(format!(
                "parts = {} but {} dims given",
                rec.parts,
                rec.dims.len()
            )));
        }
        let mut wave = MultiWave::zeros(rec.dims, rec.clock_box).map_err(D::Error::custom)?;
        let mut seen = vec![false; wave.values.len()];
        for e in rec.values {
            let base = wave.offset(&e.clocks).map_err(D::Error::custom)?;
            wave.check_coords(&e.indices, &wave.dims).map_err(D::Error::custom)?;
            let at = base + row_major(&e.indices, &wave.dims);
            if std::mem::replace(&mut seen[at], true) {
                return Err(D::Error::custom(format!(
                    "duplicate entry at clocks {:?} indices {:?}",
                    e.clocks, e.indices
                )));
            }
            wave.values[at] = e.value;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            let d = wave.total_dim();
            return Err(D::Error::custom(format!(
                "missing entry at clocks {:?} indices {:?}",
                unflatten(missing / d, &wave.clock_box),
                unflatten(missing % d, &wave.dims)
            )));
        }
        Ok(wave)
    }
}

/// Self-adjoint coupling on the flattened product space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionTensor {
    dims: Vec<usize>,
    matrix: HermitianIntMatrix,
}

impl InteractionTensor {
    pub fn new(dims: Vec<usize>, matrix: HermitianIntMatrix) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || matrix.dim() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: matrix.dim(),
            });
        }
        Ok(InteractionTensor { dims, matrix })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let total = dims.iter().product();
        InteractionTensor {
            dims,
            matrix: HermitianIntMatrix::zeros(total),
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &HermitianIntMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.matrix().is_zero()
    }
}

/// `Σ_k H_(k) + I` on the flattened product space.
pub fn total_hamiltonian(
    hs: &[HermitianIntMatrix],
    interaction: &InteractionTensor,
) -> Result<HermitianIntMatrix> {
    let dims: Vec<usize> = hs.iter().map(|h| h.dim()).collect();
    if dims != interaction.dims {
        return Err(Error::PartCountMismatch {
            expected: interaction.dims.len(),
            found: dims.len(),
        });
    }
    let sum = HermitianIntMatrix::kronecker_sum(hs)?;
    HermitianIntMatrix::new(sum.matrix().add(interaction.matrix.matrix())?)
}

/// Nonzero residual entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub clocks: Vec<usize>,
    pub indices: Vec<usize>,
    pub value: GaussianInt,
}

/// Residual of the many-time equation at every interior lattice point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualField {
    dims: Vec<usize>,
    clock_box: Vec<usize>,
    /// Interior clock points with their flattened residual vectors.
    points: Vec<(Vec<usize>, GIVector)>,
}

impl ResidualField {
    pub fn points(&self) -> &[(Vec<usize>, GIVector)] {
        &self.points
    }

    pub fn at(&self, clocks: &[usize]) -> Option<&GIVector> {
        self.points.iter().find(|(c, _)| c == clocks).map(|(_, v)| v)
    }

    pub fn is_zero(&self) -> bool {
        self.points.iter().all(|(_, v)| v.is_zero())
    }

    pub fn nonzero(&self) -> Vec<ResidualEntry> {
        self.points
            .iter()
            .flat_map(|(clocks, v)| {
                v.iter().enumerate().filter(|(_, z)| !z.is_zero()).map(|(a, z)| ResidualEntry {
                    clocks: clocks.clone(),
                    indices: unflatten(a, &self.dims),
                    value: z.clone(),
                })
            })
            .collect()
    }

    pub fn first_nonzero(&self) -> Option<ResidualEntry> {
        self.nonzero().into_iter().next()
    }

    /// Writes `n1..nm,a1..am,re,im` rows for every interior entry.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::InvalidLiteral(e.to_string());
        let m = self.dims.len();
        let mut header: Vec<String> = (1..=m).map(|k| format!("n{k}")).collect();
        header.extend((1..=m).map(|k| format!("a{k}")));
        header.extend(["re".to_string(), "im".to_string()]);
        w.write_record(&header).map_err(io)?;
        for (clocks, v) in &self.points {
            for (a, z) in v.iter().enumerate() {
                let mut row: Vec<String> = clocks.iter().map(|c| c.to_string()).collect();
                row.extend(unflatten(a, &self.dims).iter().map(|i| i.to_string()));
                row.push(z.re.to_string());
                row.push(z.im.to_string());
                w.write_record(&row).map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::InvalidLiteral(e.to_string()))
    }

    pub fn clock_box(&self) -> &[usize] {
        &self.clock_box
    }
}

/// `Σ_k [Ψ(n+e_k) − Ψ(n−e_k)] + i·(Σ_k H_(k) + I)·Ψ(n)` at every interior
/// point of the box. Every axis needs at least three clocks.
pub fn many_time_residual(
    psi: &MultiWave,
    hs: &[HermitianIntMatrix],
    interaction: &InteractionTensor,
) -> Result<ResidualField> {
    if hs.len() != psi.parts() {
        return Err(Error::PartCountMismatch {
            expected: psi.parts(),
            found: hs.len(),
        });
    }
    for (k, (h, &d)) in hs.iter().zip(&psi.dims).enumerate() {
        if h.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: hs[k].dim(),
            });
        }
    }
    for (axis, &len) in psi.clock_box.iter().enumerate() {
        if len < 3 {
            return Err(Error::ClockBoxTooSmall { axis, len, min: 3 });
        }
    }
    let total = total_hamiltonian(hs, interaction)?;
    let interior: Vec<usize> = psi.clock_box.iter().map(|&len| len - 2).collect();
    let count: usize = interior.iter().product();
    let mut points = Vec::with_capacity(count);
    for p in 0..count {
        let clocks: Vec<usize> = unflatten(p, &interior).iter().map(|c| c + 1).collect();
        let here = row_major(&clocks, &psi.clock_box);
        let mut acc = total.apply(&GIVector::new(psi.slice_at(here).to_vec()))?.mul_i();
        let mut stride = 1;
        for axis in (0..psi.parts()).rev() {
            let fwd = psi.slice_at(here + stride);
            let bwd = psi.slice_at(here - stride);
            for ((a, f), b) in acc.entries_mut().iter_mut().zip(fwd).zip(bwd) {
                *a += f - b;
            }
            stride *= psi.clock_box[axis];
        }
        points.push((clocks, acc));
    }
    Ok(ResidualField {
        dims: psi.dims.clone(),
        clock_box: psi.clock_box.clone(),
        points,
    })
}

/// Independently evolved parts of a non-interacting composite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizedState {
    pub factors: Vec<Trajectory>,
}

impl FactorizedState {
    pub fn to_wave(&self) -> Result<MultiWave> {
        MultiWave::product(&self.factors)
    }
}

/// Seeds and Hamiltonian of one part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartSpec {
    pub seed0: GIVector,
    pub seed1: GIVector,
    pub h: HermitianIntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizedRun {
    pub state: FactorizedState,
    pub wave: MultiWave,
    /// Many-time residual of the product field, checked to be zero.
    pub residual: ResidualField,
}

/// Evolves each part on its own clock and assembles the product field.
/// Fails with [`Error::NotASolution`] if the product does not solve the
/// non-interacting many-time equations.
pub fn evolve_factorized(parts: &[PartSpec], steps: &[usize]) -> Result<FactorizedRun> {
    if parts.len() != steps.len() {
        return Err(Error::PartCountMismatch {
            expected: parts.len(),
            found: steps.len(),
        });
    }
    if parts.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if let Some(axis) = steps.iter().position(|&s| s == 0) {
        return Err(Error::ClockBoxTooSmall { axis, len: 2, min: 3 });
    }
    let factors = parts
        .iter()
        .zip(steps)
        .map(|(p, &s)| evolve(&p.seed0, &p.seed1, &p.h, s))
        .collect::<Result<Vec<_>>>()?;
    let state = FactorizedState { factors };
    let wave = state.to_wave()?;
    let hs: Vec<HermitianIntMatrix> = parts.iter().map(|p| p.h.clone()).collect();
    let residual = many_time_residual(&wave, &hs, &InteractionTensor::zeros(wave.dims.clone()))?;
    if let Some(bad) = residual.points.iter().position(|(_, v)| !v.is_zero()) {
        return Err(Error::NotASolution { site: bad });
    }
    Ok(FactorizedRun { state, wave, residual })
}

/// Single-clock evolution of the flattened composite with Hamiltonian
/// `Σ_k H_(k) + I`, from two flattened seed slices.
pub fn evolve_synchronized(
    seed0: &GIVector,
    seed1: &GIVector,
    hs: &[HermitianIntMatrix],
    interaction: &InteractionTensor,
    steps: usize,
) -> Result<Trajectory> {
    let total = total_hamiltonian(hs, interaction)?;
    evolve(seed0, seed1, &total, steps)
}

/// One interior clock of [`leibniz_failure_demo`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeibnizRow {
    pub n: usize,
    /// `A_{n+1}B_{n+1} − A_{n−1}B_{n−1}`.
    pub product_dot: GaussianInt,
    /// `Ȧ_n·(B_{n+1}+B_{n−1})/2 + (A_{n+1}+A_{n−1})/2·Ḃ_n`.
    pub symmetric_rule: GaussianInt,
    /// `Ȧ_n·B_n + A_n·Ḃ_n`.
    pub naive_rule: GaussianInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeibnizDemo {
    pub rows: Vec<LeibnizRow>,
    /// The symmetric rule equals the product dot at every row.
    pub identity_holds: bool,
    /// First clock where the naive rule differs from the product dot.
    pub naive_failure: Option<usize>,
}

/// Compares the discrete derivative of a product against the symmetric
/// product rule and the naive Leibniz rule.
pub fn leibniz_failure_demo(a: &[GaussianInt], b: &[GaussianInt]) -> Result<LeibnizDemo> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.len() < 3 {
        return Err(Error::SequenceTooShort { len: a.len(), min: 3 });
    }
    let two = GaussianInt::from(2);
    let rows: Vec<LeibnizRow> = (1..a.len() - 1)
        .map(|n| {
            let a_dot = &a[n + 1] - &a[n - 1];
            let b_dot = &b[n + 1] - &b[n - 1];
            let product_dot = &(&a[n + 1] * &b[n + 1]) - &(&a[n - 1] * &b[n - 1]);
            let doubled = &(&a_dot * &(&b[n + 1] + &b[n - 1])) + &(&(&a[n + 1] + &a[n - 1]) * &b_dot);
            // the doubled rule is 2(A₊B₊ − A₋B₋), so halving is exact
            let symmetric_rule = GaussianInt::new(&doubled.re / 2, &doubled.im / 2);
            debug_assert_eq!(&symmetric_rule * &two, doubled);
            let naive_rule = &(&a_dot * &b[n]) + &(&a[n] * &b_dot);
            LeibnizRow {
                n,
                product_dot,
                symmetric_rule,
                naive_rule,
            }
        })
        .collect();
    let identity_holds = rows.iter().all(|r| r.product_dot == r.symmetric_rule);
    let naive_failure = rows.iter().find(|r| r.naive_rule != r.product_dot).map(|r| r.n);
    Ok(LeibnizDemo {
        rows,
        identity_holds,
        naive_failure,
    })
}

/// Antisymmetrized two-part field `ψ⊗φ − φ⊗ψ`.
///
/// Both parts must be two-level solutions of the same `h` with the same
/// number of slices, so that both terms solve the many-time equations with
/// `H_(1) = H_(2) = h`. At equal clocks the `(0, 1)` entry is
/// `ψ^0 φ^1 − ψ^1 φ^0`.
pub fn bell_state(psi: &Trajectory, phi: &Trajectory, h: &HermitianIntMatrix) -> Result<MultiWave> {
    for t in [psi, phi] {
        if t.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: t.dim(),
            });
        }
    }
    if psi.len() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: phi.len(),
        });
    }
    require_solution(psi, h)?;
    require_solution(phi, h)?;
    let forward = MultiWave::product(&[psi.clone(), phi.clone()])?;
    let backward = MultiWave::product(&[phi.clone(), psi.clone()])?;
    forward.sub(&backward)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Witness {
    /// All 2×2 minors vanish: rank at most one over the fraction field.
    Factorizable,
    /// A nonzero minor on rows `rows` and columns `cols`.
    Entangled {
        rows: (usize, usize),
        cols: (usize, usize),
        minor: GaussianInt,
    },
}

impl Witness {
    pub fn is_entangled(&self) -> bool {
        matches!(self, Witness::Entangled { .. })
    }

    /// Recomputes the certificate minor on `slice`.
    pub fn verify(&self, slice: &[Vec<GaussianInt>]) -> bool {
        match self {
            Witness::Factorizable => factorizability_witness(slice)
                .map(|w| w == Witness::Factorizable)
                .unwrap_or(false),
            Witness::Entangled { rows, cols, minor } => {
                let ok = rows.0 < rows.1
                    && rows.1 < slice.len()
                    && cols.0 < cols.1
                    && slice.iter().all(|r| cols.1 < r.len());
                ok && !minor.is_zero() && &minor_2x2(slice, *rows, *cols) == minor
            }
        }
    }
}

fn minor_2x2(s: &[Vec<GaussianInt>], rows: (usize, usize), cols: (usize, usize)) -> GaussianInt {
    &(&s[rows.0][cols.0] * &s[rows.1][cols.1]) - &(&s[rows.0][cols.1] * &s[rows.1][cols.0])
}

/// Exact rank-one test on a bipartite slice via its 2×2 minors.
pub fn factorizability_witness(slice: &[Vec<GaussianInt>]) -> Result<Witness> {
    let width = slice.first().map_or(0, |r| r.len());
    if let Some(bad) = slice.iter().find(|r| r.len() != width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            found: bad.len(),
        });
    }
    for r0 in 0..slice.len() {
        for r1 in r0 + 1..slice.len() {
            for c0 in 0..width {
                for c1 in c0 + 1..width {
                    let minor = minor_2x2(slice, (r0, r1), (c0, c1));
                    if !minor.is_zero() {
                        return Ok(Witness::Entangled {
                            rows: (r0, r1),
                            cols: (c0, c1),
                            minor,
                        });
                    }
                }
            }
        }
    }
    Ok(Witness::Factorizable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conservation::two_point_invariant;

    fn gi(re: i64, im: i64) -> GaussianInt {
        GaussianInt::from((re, im))
    }

    fn reals(v: &[i64]) -> Vec<GaussianInt> {
        v.iter().map(|&x| GaussianInt::from(x)).collect()
    }

    fn h(rows: &[&[i64]]) -> HermitianIntMatrix {
        HermitianIntMatrix::from_reals(rows).unwrap()
    }

    fn pauli_x() -> HermitianIntMatrix {
        h(&[&[0, 1], &[1, 0]])
    }

    fn part(s0: &[i64], s1: &[i64], ham: HermitianIntMatrix) -> PartSpec {
        PartSpec {
            seed0: GIVector::from_reals(s0),
            seed1: GIVector::from_reals(s1),
            h: ham,
        }
    }

    #[test]
    fn product_of_period_four_orbits() {
        let p = PartSpec {
            seed0: GIVector::from_reals(&[1]),
            seed1: GIVector::from_pairs(&[(0, -1)]),
            h: h(&[&[2]]),
        };
        let run = evolve_factorized(&[p.clone(), p], &[6, 6]).unwrap();
        assert!(run.residual.is_zero());
        // orbit 1, −i, −1, i, 1, …
        assert_eq!(run.wave.get(&[2, 4], &[0, 0]).unwrap(), &gi(-1, 0));
        assert_eq!(run.wave.get(&[1, 3], &[0, 0]).unwrap(), &gi(1, 0));
        assert_eq!(run.wave.get(&[3, 7], &[0, 0]).unwrap(), &gi(-1, 0));
    }

    #[test]
    fn constant_part_copies_other_axis() {
        let a = part(&[3], &[3], h(&[&[0]]));
        let b = part(&[1, 0], &[0, 1], pauli_x());
        let run = evolve_factorized(&[a, b.clone()], &[3, 4]).unwrap();
        let single = evolve(&b.seed0, &b.seed1, &b.h, 4).unwrap();
        for n1 in 0..5 {
            for n2 in 0..6 {
                let expected = single.state(n2).scale(&gi(3, 0));
                assert_eq!(run.wave.slice(&[n1, n2]).unwrap(), expected);
            }
        }
    }

    #[test]
    fn single_part_matches_single_automaton() {
        let p = part(&[1, 0], &[0, 1], pauli_x());
        let run = evolve_factorized(std::slice::from_ref(&p), &[5]).unwrap();
        let single = evolve(&p.seed0, &p.seed1, &p.h, 5).unwrap();
        for n in 0..7 {
            assert_eq!(&run.wave.slice(&[n]).unwrap(), single.state(n));
        }
    }

    #[test]
    fn zero_steps_rejected() {
        let p = part(&[1], &[0], h(&[&[2]]));
        assert!(matches!(
            evolve_factorized(&[p], &[0]),
            Err(Error::ClockBoxTooSmall { .. })
        ));
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let wave = MultiWave::zeros(vec![2, 2], vec![4, 4]).unwrap();
        let hs = [pauli_x(), pauli_x()];
        let r = many_time_residual(&wave, &hs, &InteractionTensor::zeros(vec![2, 2])).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.points().len(), 4);
    }

    #[test]
    fn interaction_breaks_product_solution() {
        let p = part(&[1, 0], &[0, 1], pauli_x());
        let run = evolve_factorized(&[p.clone(), p], &[3, 3]).unwrap();
        let coupling = h(&[&[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let i = InteractionTensor::new(vec![2, 2], coupling).unwrap();
        let r = many_time_residual(&run.wave, &[pauli_x(), pauli_x()], &i).unwrap();
        // at clocks (1,1) the slice is (0,1)⊗(0,1), untouched by the coupling
        assert!(r.at(&[1, 1]).unwrap().is_zero());
        // at clocks (2,2) the slice is (1−i)²·e00 = −2i·e00, so entry 00 picks up i·(−2i)
        let bad = r.at(&[2, 2]).unwrap();
        assert_eq!(bad.entries()[0], gi(2, 0));
        assert!(!r.is_zero());
    }

    #[test]
    fn residual_rejects_thin_boxes() {
        let wave = MultiWave::zeros(vec![1, 1], vec![4, 2]).unwrap();
        let r = many_time_residual(&wave, &[h(&[&[0]]), h(&[&[0]])], &InteractionTensor::zeros(vec![1, 1]));
        assert_eq!(r, Err(Error::ClockBoxTooSmall { axis: 1, len: 2, min: 3 }));
    }

    #[test]
    fn residual_rejects_mismatched_parts() {
        let wave = MultiWave::zeros(vec![2, 2], vec![3, 3]).unwrap();
        let r = many_time_residual(&wave, &[pauli_x()], &InteractionTensor::zeros(vec![2, 2]));
        assert!(matches!(r, Err(Error::PartCountMismatch { .. })));
    }

    #[test]
    fn synchronized_run_is_not_the_factor_product() {
        let e0 = GIVector::from_reals(&[1, 0]);
        let hs = [pauli_x(), pauli_x()];
        let s0 = tensor_product(&[&e0, &e0]);
        let sync = evolve_synchronized(&s0, &s0, &hs, &InteractionTensor::zeros(vec![2, 2]), 1).unwrap();
        let single = evolve(&e0, &e0, &pauli_x(), 1).unwrap();
        let product = tensor_product(&[single.state(2), single.state(2)]);
        assert_eq!(sync.state(2), &GIVector::from_pairs(&[(1, 0), (0, -1), (0, -1), (0, 0)]));
        assert_eq!(product, GIVector::from_pairs(&[(1, 0), (0, -1), (0, -1), (-1, 0)]));
        assert_ne!(sync.state(2).entries()[3], product.entries()[3]);
    }

    #[test]
    fn synchronized_free_parts_alternate() {
        let s0 = GIVector::from_pairs(&[(1, 2), (0, 0), (3, 0), (0, -1)]);
        let s1 = GIVector::from_reals(&[5, 6, 7, 8]);
        let hs = [h(&[&[0, 0], &[0, 0]]), h(&[&[0, 0], &[0, 0]])];
        let t = evolve_synchronized(&s0, &s1, &hs, &InteractionTensor::zeros(vec![2, 2]), 4).unwrap();
        assert_eq!(t.state(4), &s0);
        assert_eq!(t.state(5), &s1);
    }

    #[test]
    fn synchronized_single_part_matches_evolve() {
        let s0 = GIVector::from_reals(&[1, 0]);
        let s1 = GIVector::from_reals(&[1, 1]);
        let t = evolve_synchronized(&s0, &s1, &[pauli_x()], &InteractionTensor::zeros(vec![2]), 6).unwrap();
        assert_eq!(t, evolve(&s0, &s1, &pauli_x(), 6).unwrap());
    }

    #[test]
    fn synchronized_two_point_invariant_is_constant() {
        let hs = [pauli_x(), h(&[&[1, 0], &[0, -1]])];
        let s0 = GIVector::from_pairs(&[(1, 0), (0, 1), (2, 0), (0, 0)]);
        let s1 = GIVector::from_pairs(&[(0, 0), (1, 1), (0, -1), (1, 0)]);
        let zero = InteractionTensor::zeros(vec![2, 2]);
        let t = evolve_synchronized(&s0, &s1, &hs, &zero, 30).unwrap();
        let g = total_hamiltonian(&hs, &zero).unwrap();
        let q: Vec<GaussianInt> = (1..t.len())
            .map(|n| two_point_invariant(&t, &g, n).unwrap())
            .collect();
        assert!(q.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn leibniz_linear_sequences_coincide() {
        let a = reals(&[0, 1, 2, 3]);
        let d = leibniz_failure_demo(&a, &a).unwrap();
        let r = &d.rows[0];
        assert_eq!(r.n, 1);
        assert_eq!(r.product_dot, gi(4, 0));
        assert_eq!(r.symmetric_rule, gi(4, 0));
        assert_eq!(r.naive_rule, gi(4, 0));
        assert!(d.identity_holds);
    }

    #[test]
    fn leibniz_fails_on_geometric_sequence() {
        let a = reals(&[1, 2, 4, 8]);
        let d = leibniz_failure_demo(&a, &a).unwrap();
        assert_eq!(d.rows[0].product_dot, gi(15, 0));
        assert_eq!(d.rows[0].naive_rule, gi(12, 0));
        assert!(d.identity_holds);
        assert_eq!(d.naive_failure, Some(1));
    }

    #[test]
    fn leibniz_holds_with_constant_factor() {
        let a = vec![gi(2, 1); 5];
        let b = vec![gi(1, 0), gi(0, 3), gi(-2, 2), gi(7, 0), gi(1, 1)];
        let d = leibniz_failure_demo(&a, &b).unwrap();
        for r in &d.rows {
            let b_dot = &b[r.n + 1] - &b[r.n - 1];
            assert_eq!(r.product_dot, &a[0] * &b_dot);
            assert_eq!(r.naive_rule, r.product_dot);
        }
        assert_eq!(d.naive_failure, None);
    }

    #[test]
    fn leibniz_rejects_short_sequences() {
        assert_eq!(
            leibniz_failure_demo(&reals(&[1, 2]), &reals(&[1, 2])),
            Err(Error::SequenceTooShort { len: 2, min: 3 })
        );
    }

    #[test]
    fn bell_state_solves_and_is_entangled() {
        let ham = pauli_x();
        let e0 = GIVector::from_reals(&[1, 0]);
        let e1 = GIVector::from_reals(&[0, 1]);
        let psi = evolve(&e0, &e0, &ham, 4).unwrap();
        let phi = evolve(&e1, &e1, &ham, 4).unwrap();
        let bell = bell_state(&psi, &phi, &ham).unwrap();
        let r = many_time_residual(&bell, &[ham.clone(), ham], &InteractionTensor::zeros(vec![2, 2])).unwrap();
        assert!(r.is_zero());
        let slice = bell.slice_matrix(&[2, 2]).unwrap();
        let w = factorizability_witness(&slice).unwrap();
        assert!(w.is_entangled());
        assert!(w.verify(&slice));
    }

    #[test]
    fn bell_state_of_identical_parts_is_antisymmetric() {
        let ham = pauli_x();
        let psi = evolve(&GIVector::from_reals(&[1, 2]), &GIVector::from_pairs(&[(0, 1), (1, 0)]), &ham, 3).unwrap();
        let bell = bell_state(&psi, &psi, &ham).unwrap();
        for n in 0..psi.len() {
            let s = bell.slice_matrix(&[n, n]).unwrap();
            assert!(s[0][0].is_zero() && s[1][1].is_zero());
            assert_eq!(s[0][1], -s[1][0].clone());
        }
    }

    #[test]
    fn frozen_bell_slice_is_canonical() {
        let zero = h(&[&[0, 0], &[0, 0]]);
        let e0 = GIVector::from_reals(&[1, 0]);
        let e1 = GIVector::from_reals(&[0, 1]);
        let psi = evolve(&e0, &e0, &zero, 2).unwrap();
        let phi = evolve(&e1, &e1, &zero, 2).unwrap();
        let bell = bell_state(&psi, &phi, &zero).unwrap();
        let s = bell.slice_matrix(&[1, 3]).unwrap();
        assert_eq!(s, vec![reals(&[0, 1]), reals(&[-1, 0])]);
    }

    #[test]
    fn bell_state_needs_two_levels() {
        let ham = h(&[&[1]]);
        let t = evolve(&GIVector::from_reals(&[1]), &GIVector::from_reals(&[0]), &ham, 2).unwrap();
        assert!(matches!(bell_state(&t, &t, &ham), Err(Error::DimensionMismatch { expected: 2, .. })));
    }

    #[test]
    fn witness_examples() {
        let bell = factorizability_witness(&[reals(&[0, 1]), reals(&[-1, 0])]).unwrap();
        assert_eq!(bell, Witness::Entangled { rows: (0, 1), cols: (0, 1), minor: gi(1, 0) });
        assert_eq!(factorizability_witness(&[reals(&[1, 1]), reals(&[1, 1])]).unwrap(), Witness::Factorizable);
        let diag = factorizability_witness(&[reals(&[2, 0]), reals(&[0, 3])]).unwrap();
        assert!(matches!(diag, Witness::Entangled { ref minor, .. } if *minor == gi(6, 0)));
    }

    #[test]
    fn witness_certificate_is_checked() {
        let slice = vec![reals(&[2, 0]), reals(&[0, 3])];
        let forged = Witness::Entangled { rows: (0, 1), cols: (0, 1), minor: gi(5, 0) };
        assert!(!forged.verify(&slice));
        assert!(!Witness::Factorizable.verify(&slice));
    }

    #[test]
    fn linearity_of_residual() {
        let p = part(&[1, 0], &[0, 1], pauli_x());
        let q = part(&[2, -1], &[1, 1], pauli_x());
        let a = evolve_factorized(&[p.clone(), q.clone()], &[2, 2]).unwrap().wave;
        let mut b = evolve_factorized(&[q, p], &[2, 2]).unwrap().wave;
        b.set(&[1, 2], &[1, 0], gi(9, -4)).unwrap();
        let hs = [pauli_x(), pauli_x()];
        let zero = InteractionTensor::zeros(vec![2, 2]);
        let (ka, kb) = (gi(2, 1), gi(-1, 3));
        let combined = a.scale(&ka).add(&b.scale(&kb)).unwrap();
        let lhs = many_time_residual(&combined, &hs, &zero).unwrap();
        let ra = many_time_residual(&a, &hs, &zero).unwrap();
        let rb = many_time_residual(&b, &hs, &zero).unwrap();
        for ((c, l), ((_, x), (_, y))) in lhs.points().iter().zip(ra.points().iter().zip(rb.points())) {
            assert_eq!(l, &x.scale(&ka).add(&y.scale(&kb)).unwrap(), "clocks {c:?}");
        }
    }

    #[test]
    fn json_round_trip_and_gaps() {
        let p = part(&[1, 0], &[0, 1], pauli_x());
        let wave = evolve_factorized(&[p.clone(), p], &[1, 1]).unwrap().wave;
        let text = serde_json::to_string(&wave).unwrap();
        let back: MultiWave = serde_json::from_str(&text).unwrap();
        assert_eq!(back, wave);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["parts"], 2);
        assert_eq!(v["values"][1]["indices"], serde_json::json!([0, 1]));
        v["values"].as_array_mut().unwrap().pop();
        assert!(serde_json::from_value::<MultiWave>(v).is_err());
    }

    #[test]
    fn residual_csv_layout() {
        let wave = MultiWave::zeros(vec![1, 2], vec![3, 3]).unwrap();
        let r = many_time_residual(&wave, &[h(&[&[0]]), pauli_x()], &InteractionTensor::zeros(vec![1, 2])).unwrap();
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "n1,n2,a1,a2,re,im\n1,1,0,0,0,0\n1,1,0,1,0,0\n");
    }
}
