//! Experiment configuration: strict JSON schema plus kind-specific checks.

use std::fmt;
use std::path::{Path, PathBuf};

use hamca::{Error as CoreError, GIMatrix, GIVector, GaussianInt, HermitianIntMatrix};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Evolve,
    Audit,
    Reconstruct,
    Converge,
    Multi,
    Bell,
    Leibniz,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Evolve => "evolve",
            Kind::Audit => "audit",
            Kind::Reconstruct => "reconstruct",
            Kind::Converge => "converge",
            Kind::Multi => "multi",
            Kind::Bell => "bell",
            Kind::Leibniz => "leibniz",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// Random instance in place of explicit literals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub dim: usize,
    pub max_entry: i64,
}

/// Either one count for every part or one count per part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Steps {
    Uniform(usize),
    PerPart(Vec<usize>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Kind,
    #[serde(default)]
    hamiltonians: Option<Vec<Value>>,
    #[serde(default)]
    seeds: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    steps: Option<Steps>,
    #[serde(default)]
    scale_l: Option<f64>,
    #[serde(default)]
    scales: Option<Vec<f64>>,
    #[serde(default)]
    observables: Option<Vec<Value>>,
    #[serde(default)]
    interaction: Option<Value>,
    #[serde(default)]
    output: Option<OutputSpec>,
    #[serde(default)]
    random: Option<RandomSpec>,
    #[serde(default)]
    window: Option<usize>,
    #[serde(default)]
    time: Option<f64>,
    #[serde(default)]
    t_grid: Option<Vec<f64>>,
    #[serde(default)]
    sequences: Option<Vec<Vec<Value>>>,
    #[serde(default)]
    clocks: Option<Vec<usize>>,
}

/// A validated experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub hamiltonians: Vec<HermitianIntMatrix>,
    /// Seed vectors per part: two slices for automaton runs, one initial
    /// state for `converge`.
    pub seeds: Vec<Vec<GIVector>>,
    /// Steps per part, already expanded.
    pub steps: Vec<usize>,
    pub scale_l: Option<f64>,
    pub scales: Vec<f64>,
    pub observables: Option<Vec<HermitianIntMatrix>>,
    pub interaction: Option<HermitianIntMatrix>,
    pub output: OutputSpec,
    pub random: Option<RandomSpec>,
    pub window: usize,
    pub time: Option<f64>,
    pub t_grid: Option<Vec<f64>>,
    pub sequences: Vec<Vec<GaussianInt>>,
    pub clocks: Option<Vec<usize>>,
    /// The configuration as written, echoed into reports.
    pub source: Value,
}

pub const DEFAULT_WINDOW: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}", .issues.iter().map(Issue::to_string).collect::<Vec<_>>().join("\n"))]
    Invalid { issues: Vec<Issue> },
}

impl ConfigError {
    pub fn issues(&self) -> &[Issue] {
        match self {
            ConfigError::Invalid { issues } => issues,
            ConfigError::Io { .. } => &[],
        }
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let single = |path: &str, reason: String| ConfigError::Invalid {
        issues: vec![Issue {
            path: path.into(),
            reason,
        }],
    };
    let source: Value = serde_json::from_str(text).map_err(|e| single("$", format!("not valid JSON: {e}")))?;
    let raw: RawConfig = serde_json::from_value(source.clone()).map_err(|e| single("$", e.to_string()))?;
    Validator::default().finish(raw, source)
}

#[derive(Default)]
struct Validator {
    issues: Vec<Issue>,
}

impl Validator {
    fn push(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.issues.push(Issue {
            path: path.into(),
            reason: reason.into(),
        });
    }

    fn matrix(&mut self, path: &str, literal: &Value) -> Option<HermitianIntMatrix> {
        let m: GIMatrix = match serde_json::from_value(literal.clone()) {
            Ok(m) => m,
            Err(e) => {
                self.push(path, e.to_string());
                return None;
            }
        };
        match HermitianIntMatrix::new(m) {
            Ok(h) => Some(h),
            Err(e) => {
                self.push(path, e.to_string());
                None
            }
        }
    }

    fn vector(&mut self, path: &str, literal: &Value) -> Option<GIVector> {
        match serde_json::from_value::<GIVector>(literal.clone()) {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(path, e.to_string());
                None
            }
        }
    }

    fn require<T>(&mut self, kind: Kind, field: &str, value: &Option<T>) {
        if value.is_none() {
            self.push(field, format!("required for kind {kind}"));
        }
    }

    fn forbid<T>(&mut self, kind: Kind, field: &str, value: &Option<T>) {
        if value.is_some() {
            self.push(field, format!("not used by kind {kind}"));
        }
    }

    fn finish(mut self, raw: RawConfig, source: Value) -> Result<ExperimentConfig, ConfigError> {
        let kind = raw.kind;
        let hamiltonians: Vec<HermitianIntMatrix> = raw
            .hamiltonians
            .iter()
            .flatten()
            .enumerate()
            .filter_map(|(k, lit)| self.matrix(&format!("hamiltonians[{k}]"), lit))
            .collect();
        let seeds: Vec<Vec<GIVector>> = raw
            .seeds
            .iter()
            .flatten()
            .enumerate()
            .map(|(p, group)| {
                group
                    .iter()
                    .enumerate()
                    .filter_map(|(k, lit)| self.vector(&format!("seeds[{p}][{k}]"), lit))
                    .collect()
            })
            .collect();
        let observables = raw.observables.as_ref().map(|list| {
            list.iter()
                .enumerate()
                .filter_map(|(k, lit)| self.matrix(&format!("observables[{k}]"), lit))
                .collect::<Vec<_>>()
        });
        let interaction = raw.interaction.as_ref().and_then(|lit| self.matrix("interaction", lit));
        let sequences: Vec<Vec<GaussianInt>> = raw
            .sequences
            .iter()
            .flatten()
            .enumerate()
            .map(|(s, seq)| {
                seq.iter()
                    .enumerate()
                    .filter_map(|(k, lit)| match GaussianInt::from_json(lit) {
                        Ok(z) => Some(z),
                        Err(e) => {
                            self.push(format!("sequences[{s}][{k}]"), e.to_string());
                            None
                        }
                    })
                    .collect()
            })
            .collect();

        if let Some(l) = raw.scale_l {
            if !(l.is_finite() && l > 0.0) {
                self.push("scale_l", CoreError::InvalidScale(l).to_string());
            }
        }
        for (k, &l) in raw.scales.iter().flatten().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                self.push(format!("scales[{k}]"), CoreError::InvalidScale(l).to_string());
            }
        }
        if raw.window == Some(0) {
            self.push("window", CoreError::InvalidWindow.to_string());
        }
        if let Some(t) = raw.time {
            if !(t.is_finite() && t >= 0.0) {
                self.push("time", "must be finite and non-negative");
            }
        }
        for (k, t) in raw.t_grid.iter().flatten().enumerate() {
            if !t.is_finite() {
                self.push(format!("t_grid[{k}]"), "must be finite");
            }
        }
        if let Some(r) = raw.random {
            if r.dim == 0 {
                self.push("random.dim", "must be at least 1");
            }
            if r.max_entry < 0 {
                self.push("random.max_entry", "must be non-negative");
            }
        }

        let parts = match kind {
            Kind::Multi => raw.hamiltonians.as_ref().map_or(0, Vec::len),
            Kind::Leibniz => 0,
            _ => 1,
        };
        let steps = match (&raw.steps, kind) {
            (_, Kind::Leibniz | Kind::Converge) => {
                self.forbid(kind, "steps", &raw.steps);
                Vec::new()
            }
            (None, _) => {
                self.push("steps", format!("required for kind {kind}"));
                Vec::new()
            }
            (Some(Steps::Uniform(n)), _) => vec![*n; parts],
            (Some(Steps::PerPart(list)), Kind::Multi) => {
                if list.len() != parts {
                    self.push("steps", format!("{} counts given for {parts} parts", list.len()));
                }
                list.clone()
            }
            (Some(Steps::PerPart(_)), _) => {
                self.push("steps", format!("kind {kind} takes a single count"));
                Vec::new()
            }
        };

        match kind {
            Kind::Evolve | Kind::Audit | Kind::Reconstruct => {
                if raw.random.is_some() {
                    self.forbid(kind, "hamiltonians", &raw.hamiltonians);
                    self.forbid(kind, "seeds", &raw.seeds);
                } else {
                    self.single_part(kind, &raw, &hamiltonians, &seeds, 2);
                }
                if kind != Kind::Audit {
                    self.forbid(kind, "observables", &raw.observables);
                }
                if kind == Kind::Reconstruct {
                    self.require(kind, "scale_l", &raw.scale_l);
                } else {
                    self.forbid(kind, "scale_l", &raw.scale_l);
                    self.forbid(kind, "t_grid", &raw.t_grid);
                    self.forbid(kind, "window", &raw.window);
                }
                if let (Some(obs), Some(h)) = (&observables, hamiltonians.first()) {
                    for (k, g) in obs.iter().enumerate() {
                        if g.dim() != h.dim() {
                            self.push(
                                format!("observables[{k}]"),
                                CoreError::DimensionMismatch {
                                    expected: h.dim(),
                                    found: g.dim(),
                                }
                                .to_string(),
                            );
                        }
                    }
                }
                for f in ["scales", "interaction", "time", "sequences", "clocks"] {
                    self.forbid_named(kind, f, &raw);
                }
            }
            Kind::Converge => {
                self.forbid(kind, "random", &raw.random);
                self.single_part(kind, &raw, &hamiltonians, &seeds, 1);
                self.require(kind, "scales", &raw.scales);
                if raw.scales.as_ref().is_some_and(|s| s.len() < 2) {
                    self.push("scales", "at least two scales are needed for a fit");
                }
                self.require(kind, "time", &raw.time);
                for f in ["observables", "interaction", "scale_l", "t_grid", "sequences", "clocks"] {
                    self.forbid_named(kind, f, &raw);
                }
            }
            Kind::Multi => {
                self.forbid(kind, "random", &raw.random);
                self.require(kind, "hamiltonians", &raw.hamiltonians);
                self.require(kind, "seeds", &raw.seeds);
                if parts == 0 {
                    self.push("hamiltonians", "at least one part is required");
                }
                self.seed_groups(&raw, &hamiltonians, &seeds, parts, 2);
                if let Some(i) = &interaction {
                    let total: usize = hamiltonians.iter().map(HermitianIntMatrix::dim).product();
                    if i.dim() != total {
                        self.push(
                            "interaction",
                            CoreError::DimensionMismatch {
                                expected: total,
                                found: i.dim(),
                            }
                            .to_string(),
                        );
                    }
                }
                if steps.contains(&0) {
                    self.push("steps", "every part needs at least one step so each clock axis has an interior");
                }
                for f in ["observables", "scale_l", "scales", "time", "t_grid", "sequences", "clocks", "window"] {
                    self.forbid_named(kind, f, &raw);
                }
            }
            Kind::Bell => {
                self.forbid(kind, "random", &raw.random);
                self.require(kind, "hamiltonians", &raw.hamiltonians);
                self.require(kind, "seeds", &raw.seeds);
                if raw.hamiltonians.as_ref().is_some_and(|h| h.len() != 1) {
                    self.push("hamiltonians", "kind bell takes one Hamiltonian shared by both parts");
                }
                if let Some(h) = hamiltonians.first() {
                    if h.dim() != 2 {
                        self.push(
                            "hamiltonians[0]",
                            CoreError::DimensionMismatch {
                                expected: 2,
                                found: h.dim(),
                            }
                            .to_string(),
                        );
                    }
                }
                let shared: Vec<HermitianIntMatrix> = hamiltonians.iter().cloned().cycle().take(2).collect();
                self.seed_groups(&raw, &shared, &seeds, 2, 2);
                if steps.first() == Some(&0) {
                    self.push("steps", "at least one step is needed for an interior clock");
                }
                if let (Some(c), Some(&s)) = (&raw.clocks, steps.first()) {
                    if c.len() != 2 {
                        self.push("clocks", format!("two clocks expected, found {}", c.len()));
                    }
                    for (k, &n) in c.iter().enumerate() {
                        if n > s + 1 {
                            self.push(format!("clocks[{k}]"), format!("clock {n} beyond last clock {}", s + 1));
                        }
                    }
                }
                for f in ["observables", "interaction", "scale_l", "scales", "time", "t_grid", "sequences", "window"] {
                    self.forbid_named(kind, f, &raw);
                }
            }
            Kind::Leibniz => {
                self.forbid(kind, "random", &raw.random);
                self.require(kind, "sequences", &raw.sequences);
                if let Some(seqs) = &raw.sequences {
                    if seqs.len() != 2 {
                        self.push("sequences", format!("two sequences expected, found {}", seqs.len()));
                    } else if seqs[0].len() != seqs[1].len() {
                        self.push("sequences[1]", format!("length {} differs from {}", seqs[1].len(), seqs[0].len()));
                    } else if seqs[0].len() < 3 {
                        self.push("sequences", "at least three entries per sequence are required");
                    }
                }
                for f in [
                    "hamiltonians",
                    "seeds",
                    "observables",
                    "interaction",
                    "scale_l",
                    "scales",
                    "time",
                    "t_grid",
                    "clocks",
                    "window",
                ] {
                    self.forbid_named(kind, f, &raw);
                }
            }
        }

        if !self.issues.is_empty() {
            return Err(ConfigError::Invalid { issues: self.issues });
        }
        Ok(ExperimentConfig {
            kind,
            hamiltonians,
            seeds,
            steps,
            scale_l: raw.scale_l,
            scales: raw.scales.unwrap_or_default(),
            observables,
            interaction,
            output: raw.output.unwrap_or(OutputSpec {
                path: None,
                format: None,
            }),
            random: raw.random,
            window: raw.window.unwrap_or(DEFAULT_WINDOW),
            time: raw.time,
            t_grid: raw.t_grid,
            sequences,
            clocks: raw.clocks,
            source,
        })
    }

    fn forbid_named(&mut self, kind: Kind, field: &str, raw: &RawConfig) {
        let present = match field {
            "hamiltonians" => raw.hamiltonians.is_some(),
            "seeds" => raw.seeds.is_some(),
            "observables" => raw.observables.is_some(),
            "interaction" => raw.interaction.is_some(),
            "scale_l" => raw.scale_l.is_some(),
            "scales" => raw.scales.is_some(),
            "time" => raw.time.is_some(),
            "t_grid" => raw.t_grid.is_some(),
            "sequences" => raw.sequences.is_some(),
            "clocks" => raw.clocks.is_some(),
            "window" => raw.window.is_some(),
            _ => false,
        };
        if present {
            self.push(field, format!("not used by kind {kind}"));
        }
    }

    /// One Hamiltonian with one group of `per_part` seeds.
    fn single_part(
        &mut self,
        kind: Kind,
        raw: &RawConfig,
        hamiltonians: &[HermitianIntMatrix],
        seeds: &[Vec<GIVector>],
        per_part: usize,
    ) {
        self.require(kind, "hamiltonians", &raw.hamiltonians);
        self.require(kind, "seeds", &raw.seeds);
        if raw.hamiltonians.as_ref().is_some_and(|h| h.len() != 1) {
            self.push("hamiltonians", format!("kind {kind} takes exactly one Hamiltonian"));
        }
        self.seed_groups(raw, hamiltonians, seeds, 1, per_part);
    }

    fn seed_groups(
        &mut self,
        raw: &RawConfig,
        hamiltonians: &[HermitianIntMatrix],
        seeds: &[Vec<GIVector>],
        parts: usize,
        per_part: usize,
    ) {
        let Some(groups) = &raw.seeds else { return };
        if groups.len() != parts {
            self.push("seeds", format!("{parts} seed groups expected, found {}", groups.len()));
            return;
        }
        for (p, group) in groups.iter().enumerate() {
            if group.len() != per_part {
                self.push(format!("seeds[{p}]"), format!("{per_part} vectors expected, found {}", group.len()));
            }
        }
        if hamiltonians.len() != parts || seeds.iter().map(Vec::len).sum::<usize>() != parts * per_part {
            return;
        }
        for (p, (h, group)) in hamiltonians.iter().zip(seeds).enumerate() {
            for (k, v) in group.iter().enumerate() {
                if v.dim() != h.dim() {
                    self.push(
                        format!("seeds[{p}][{k}]"),
                        CoreError::DimensionMismatch {
                            expected: h.dim(),
                            found: v.dim(),
                        }
                        .to_string(),
                    );
                }
            }
        }
    }
}
