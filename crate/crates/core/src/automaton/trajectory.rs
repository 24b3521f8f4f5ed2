use std::io::{Read, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GIVector, GaussianInt};

/// Clock-indexed sequence of state vectors `ψ_0 … ψ_N`, all of dimension `D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TrajectoryRecord", into = "TrajectoryRecord")]
pub struct Trajectory {
    dim: usize,
    states: Vec<GIVector>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryRecord {
    dim: usize,
    states: Vec<GIVector>,
}

impl TryFrom<TrajectoryRecord> for Trajectory {
    type Error = Error;
    fn try_from(r: TrajectoryRecord) -> Result<Self> {
        let t = Trajectory::new(r.states)?;
        if t.dim != r.dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                found: t.dim,
            });
        }
        Ok(t)
    }
}

impl From<Trajectory> for TrajectoryRecord {
    fn from(t: Trajectory) -> Self {
        TrajectoryRecord {
            dim: t.dim,
            states: t.states,
        }
    }
}

impl Trajectory {
    /// Needs at least two slices, all of the same non-zero dimension.
    pub fn new(states: Vec<GIVector>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::TrajectoryTooShort {
                len: states.len(),
                min: 2,
            });
        }
        let dim = states[0].dim();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for s in &states[1..] {
            s.check_dim(dim)?;
        }
        Ok(Trajectory { dim, states })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of slices, `N + 1`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index `N` of the final slice.
    pub fn last_clock(&self) -> usize {
        self.states.len() - 1
    }

    pub fn states(&self) -> &[GIVector] {
        &self.states
    }

    pub fn state(&self, n: usize) -> &GIVector {
        &self.states[n]
    }

    pub fn into_states(self) -> Vec<GIVector> {
        self.states
    }

    /// Replaces one entry; used to build corrupted test trajectories.
    pub fn with_entry(&self, n: usize, alpha: usize, value: GaussianInt) -> Trajectory {
        let mut out = self.clone();
        out.states[n].entries_mut()[alpha] = value;
        out
    }

    pub fn require_len(&self, min: usize) -> Result<()> {
        if self.len() < min {
            Err(Error::TrajectoryTooShort {
                len: self.len(),
                min,
            })
        } else {
            Ok(())
        }
    }

    /// Symmetric difference `ψ̇_n = ψ_{n+1} − ψ_{n−1}` at an interior site.
    pub fn dot(&self, n: usize) -> Result<GIVector> {
        if n == 0 || n >= self.last_clock() {
            return Err(Error::ClockOutOfRange {
                index: n,
                lo: 1,
                hi: self.last_clock().saturating_sub(1),
            });
        }
        self.states[n + 1].sub(&self.states[n - 1])
    }

    /// Writes `n,alpha,re,im` rows with exact decimal integers.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::InvalidLiteral(e.to_string());
        w.write_record(["n", "alpha", "re", "im"]).map_err(io)?;
        for (n, state) in self.states.iter().enumerate() {
            for (alpha, z) in state.iter().enumerate() {
                w.write_record([
                    n.to_string(),
                    alpha.to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                ])
                .map_err(io)?;
            }
        }
        w.flush()
            .map_err(|e| Error::InvalidLiteral(e.to_string()))?;
        Ok(())
    }

    /// Parses the CSV written by [`write_csv`](Self::write_csv). Rows must
    /// cover every `(n, alpha)` exactly once.
    pub fn read_csv<R: Read>(reader: R) -> Result<Trajectory> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut cells: Vec<(usize, usize, GaussianInt)> = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::InvalidLiteral(e.to_string()))?;
            if record.len() != 4 {
                return Err(Error::InvalidLiteral(format!(
                    "row {}: expected 4 columns, found {}",
                    line + 1,
                    record.len()
                )));
            }
            let int = |i: usize| {
                BigInt::from_str(&record[i]).map_err(|_| {
                    Error::InvalidLiteral(format!("row {}: bad integer {:?}", line + 1, &record[i]))
                })
            };
            let idx = |i: usize| {
                record[i].parse::<usize>().map_err(|_| {
                    Error::InvalidLiteral(format!("row {}: bad index {:?}", line + 1, &record[i]))
                })
            };
            cells.push((idx(0)?, idx(1)?, GaussianInt::new(int(2)?, int(3)?)));
        }
        let len = cells.iter().map(|c| c.0 + 1).max().unwrap_or(0);
        let dim = cells.iter().map(|c| c.1 + 1).max().unwrap_or(0);
        let mut grid: Vec<Vec<Option<GaussianInt>>> = vec![vec![None; dim]; len];
        for (n, alpha, z) in cells {
            if grid[n][alpha].replace(z).is_some() {
                return Err(Error::InvalidLiteral(format!(
                    "duplicate entry for n={n}, alpha={alpha}"
                )));
            }
        }
        let states = grid
            .into_iter()
            .enumerate()
            .map(|(n, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(alpha, z)| {
                        z.ok_or_else(|| {
                            Error::InvalidLiteral(format!("missing entry n={n}, alpha={alpha}"))
                        })
                    })
                    .collect::<Result<GIVector>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(states)
    }
}
