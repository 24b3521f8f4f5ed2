//! Experiment orchestration. `run` is a pure function of the configuration
//! and the seed; the binary only adds file output and timing.

use hamca::automaton::{
    action_evaluate, evolve, first_violation, rewind, verify_stationarity, Trajectory, DEFAULT_DELTAS,
};
use hamca::conservation::{audit_conservation, default_observables, symmetrized_q};
use hamca::multipartite::{
    bell_state, evolve_factorized, evolve_synchronized, factorizability_witness, leibniz_failure_demo,
    many_time_residual, tensor_product, InteractionTensor, MultiWave, PartSpec,
};
use hamca::sampling::{
    continuum_q, convergence_study, dispersion_theta, eigenmodes, shift_map_check, to_complex_matrix,
    write_reconstruction_csv, ContinuumSignal, DiscretenessScale, QOrder, Regime,
};
use hamca::{random, Error as CoreError, GIVector, GaussianInt, HermitianIntMatrix};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Format, Kind};
use crate::report::{float_value, Artifact, Check, RunReport};

/// Relative tolerance for float reproductions of exact quantities.
pub const FLOAT_TOL: f64 = 1e-12;
/// Smallest fitted order accepted by `converge`.
pub const MIN_ORDER: f64 = 1.7;

/// A library error tagged with the operation that raised it.
#[derive(Debug, thiserror::Error)]
#[error("{operation} failed: {source}")]
pub struct RunError {
    pub operation: &'static str,
    #[source]
    pub source: CoreError,
}

trait Context<T> {
    fn op(self, operation: &'static str) -> Result<T, RunError>;
}

impl<T> Context<T> for Result<T, CoreError> {
    fn op(self, operation: &'static str) -> Result<T, RunError> {
        self.map_err(|source| RunError { operation, source })
    }
}

pub type RunOutput = (RunReport, Vec<Artifact>);

pub fn run(config: &ExperimentConfig, seed: u64, format: Format) -> Result<RunOutput, RunError> {
    let mut out = Outputs::new(format);
    match config.kind {
        Kind::Evolve => run_evolve(config, seed, &mut out)?,
        Kind::Audit => run_audit(config, seed, &mut out)?,
        Kind::Reconstruct => run_reconstruct(config, seed, &mut out)?,
        Kind::Converge => run_converge(config, &mut out)?,
        Kind::Multi => run_multi(config, &mut out)?,
        Kind::Bell => run_bell(config, &mut out)?,
        Kind::Leibniz => run_leibniz(config, &mut out)?,
    }
    let names = out.artifacts.iter().map(|a| a.name.clone()).collect();
    let report = RunReport::new(config.kind, config.source.clone(), seed, out.checks, names);
    Ok((report, out.artifacts))
}

struct Outputs {
    format: Format,
    checks: Vec<Check>,
    artifacts: Vec<Artifact>,
}

impl Outputs {
    fn new(format: Format) -> Self {
        Outputs {
            format,
            checks: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    fn json<T: Serialize>(&mut self, stem: &str, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("artifact serializes");
        bytes.push(b'\n');
        self.artifacts.push(Artifact {
            name: format!("{stem}.json"),
            bytes,
        });
    }

    fn csv(
        &mut self,
        name: &str,
        write: impl FnOnce(&mut Vec<u8>) -> hamca::Result<()>,
    ) -> Result<(), RunError> {
        let mut bytes = Vec::new();
        write(&mut bytes).op("csv export")?;
        self.artifacts.push(Artifact {
            name: name.to_string(),
            bytes,
        });
        Ok(())
    }

    fn trajectory(&mut self, stem: &str, traj: &Trajectory) -> Result<(), RunError> {
        match self.format {
            Format::Json => {
                self.json(stem, traj);
                Ok(())
            }
            Format::Csv => self.csv(&format!("{stem}.csv"), |w| traj.write_csv(w)),
        }
    }
}

/// The single-part instance: literals from the config, or a random draw.
fn instance(config: &ExperimentConfig, seed: u64) -> (HermitianIntMatrix, GIVector, GIVector) {
    match config.random {
        Some(spec) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random::hermitian(&mut rng, spec.dim, spec.max_entry);
            let bound = spec.max_entry.max(1);
            let s0 = random::vector(&mut rng, spec.dim, bound);
            let s1 = random::vector(&mut rng, spec.dim, bound);
            (h, s0, s1)
        }
        None => (
            config.hamiltonians[0].clone(),
            config.seeds[0][0].clone(),
            config.seeds[0][1].clone(),
        ),
    }
}

fn single_run(config: &ExperimentConfig, seed: u64, out: &mut Outputs) -> Result<(HermitianIntMatrix, Trajectory), RunError> {
    let (h, s0, s1) = instance(config, seed);
    let traj = evolve(&s0, &s1, &h, config.steps[0]).op("evolve")?;
    let violation = first_violation(&traj, &h).op("equation residual")?;
    out.push(Check::verdict(
        "equation_of_motion",
        violation.is_none(),
        json!({ "first_violation": violation, "interior_sites": traj.last_clock() - 1 }),
    ));
    let (r0, r1) = rewind(&traj, &h).op("rewind")?;
    let first = [(0, &r0, &s0), (1, &r1, &s1)]
        .into_iter()
        .find(|(_, got, want)| got != want)
        .map(|(n, _, _)| n);
    out.push(Check::verdict("reversibility", first.is_none(), json!({ "first_violation": first })));
    if config.random.is_some() {
        out.json("instance", &json!({ "hamiltonian": h.matrix(), "seeds": [&s0, &s1] }));
    }
    out.trajectory("trajectory", &traj)?;
    Ok((h, traj))
}

fn run_evolve(config: &ExperimentConfig, seed: u64, out: &mut Outputs) -> Result<(), RunError> {
    single_run(config, seed, out).map(|_| ())
}

fn run_audit(config: &ExperimentConfig, seed: u64, out: &mut Outputs) -> Result<(), RunError> {
    let (h, traj) = single_run(config, seed, out)?;
    let observables = match &config.observables {
        Some(list) => list
            .iter()
            .enumerate()
            .map(|(k, g)| (format!("observables[{k}]"), g.clone()))
            .collect(),
        None => default_observables(&h),
    };
    let audit = audit_conservation(&traj, &h, &observables).op("audit_conservation")?;
    for entry in &audit.entries {
        let detail = serde_json::to_value(entry).expect("entry serializes");
        let name = format!("conserved:{}", entry.label);
        out.push(if entry.commutes {
            Check::verdict(name, entry.conserved, detail)
        } else {
            Check::info(name, detail)
        });
    }
    out.push(Check::info("q1_zero", json!({ "q1_zero": audit.q1_zero })));

    if traj.len() < 3 {
        let detail = json!({ "skipped": "no interior clock" });
        out.push(Check::verdict("action_zero", true, detail.clone()));
        out.push(Check::verdict("stationarity", true, detail));
    } else {
        let action = action_evaluate(&traj, &h).op("action_evaluate")?;
        out.push(Check::verdict(
            "action_zero",
            action.value() == &GaussianInt::from(0),
            json!({ "action": action.value() }),
        ));
        let stat = verify_stationarity(&traj, &h, &DEFAULT_DELTAS).op("verify_stationarity")?;
        out.push(Check::verdict(
            "stationarity",
            stat.passed(),
            json!({
                "variations_checked": stat.checked,
                "violations": stat.violations.len(),
                "first_violation": stat.violations.first().map(|v| v.site),
            }),
        ));
    }
    match out.format {
        Format::Json => out.json("audit", &audit),
        Format::Csv => out.csv("audit_values.csv", |w| audit.write_values_csv(w))?,
    }
    Ok(())
}

fn run_reconstruct(config: &ExperimentConfig, seed: u64, out: &mut Outputs) -> Result<(), RunError> {
    let (h, traj) = single_run(config, seed, out)?;
    let scale = DiscretenessScale::new(config.scale_l.expect("validated")).op("discreteness scale")?;
    let l = scale.l();
    let signal = ContinuumSignal::from_trajectory(&traj, scale, config.window).op("reconstruct")?;
    let magnitude = traj
        .states()
        .iter()
        .flat_map(|s| s.to_complex64())
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    let tol = FLOAT_TOL * magnitude;

    let mut worst = (0.0, None);
    for (n, sample) in signal.samples().iter().enumerate() {
        let got = signal.evaluate(n as f64 * l).values;
        let err = got.iter().zip(sample).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if err > worst.0 {
            worst = (err, Some(n));
        }
    }
    out.push(Check::verdict(
        "sample_fidelity",
        worst.0 <= tol,
        json!({ "max_residual": float_value(worst.0), "at": worst.1, "tolerance": float_value(tol) }),
    ));

    let mut shift_worst = (0.0, None);
    let mut q_worst = (0.0, None);
    for n in 1..traj.last_clock() {
        let r = shift_map_check(&traj, scale, n, config.window).op("shift_map_check")?.max();
        if r > shift_worst.0 || (r > tol && shift_worst.1.is_none()) {
            shift_worst = (r, Some(n));
        }
        let exact = symmetrized_q(&traj, n).op("symmetrized_q")?.to_f64();
        let cont = continuum_q(&signal, n as f64 * l, QOrder::ExactCosh);
        let err = (cont - exact).abs() / exact.abs().max(1.0);
        if err > q_worst.0 {
            q_worst = (err, Some(n));
        }
    }
    out.push(Check::verdict(
        "shift_map",
        shift_worst.0 <= tol,
        json!({ "max_residual": float_value(shift_worst.0), "at": shift_worst.1, "tolerance": float_value(tol) }),
    ));
    out.push(Check::verdict(
        "continuum_q",
        q_worst.0 <= FLOAT_TOL * 1e2,
        json!({
            "max_relative_error": float_value(q_worst.0),
            "at": q_worst.1,
            "tolerance": float_value(FLOAT_TOL * 1e2),
        }),
    ));

    let modes: Vec<Value> = eigenmodes(&to_complex_matrix(&h))
        .into_iter()
        .map(|(e, _)| {
            let p = dispersion_theta(e);
            json!({
                "energy": float_value(p.energy),
                "theta": float_value(p.theta),
                "regime": p.regime,
                "growth": float_value(p.growth),
            })
        })
        .collect();
    let growing = eigenmodes(&to_complex_matrix(&h))
        .iter()
        .any(|(e, _)| dispersion_theta(*e).regime == Regime::Growing);
    out.push(Check::info(
        "regime",
        json!({ "regime": if growing { Regime::Growing } else { Regime::Oscillatory }, "modes": modes }),
    ));

    let grid = match &config.t_grid {
        Some(g) => g.clone(),
        None => (0..=2 * traj.last_clock()).map(|k| k as f64 * l / 2.0).collect(),
    };
    out.csv("reconstruction.csv", |w| write_reconstruction_csv(&signal, &grid, w))
}

fn run_converge(config: &ExperimentConfig, out: &mut Outputs) -> Result<(), RunError> {
    let h = &config.hamiltonians[0];
    let psi0 = DVector::from_vec(config.seeds[0][0].to_complex64());
    let time = config.time.expect("validated");
    let report = convergence_study(h, &psi0, time, &config.scales, config.window).op("convergence_study")?;
    let passed = report.fitted_order.is_some_and(|p| p >= MIN_ORDER);
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "l": float_value(r.l),
                "steps": r.steps,
                "error": r.error.map(float_value),
                "excluded": r.excluded,
            })
        })
        .collect();
    out.push(Check::verdict(
        "fitted_order",
        passed,
        json!({
            "fitted_order": report.fitted_order.map(float_value),
            "minimum": float_value(MIN_ORDER),
            "max_energy": float_value(report.max_energy),
            "rows": rows,
        }),
    ));
    out.csv("convergence.csv", |w| report.write_csv(w))?;
    out.json(
        "convergence",
        &json!({
            "time": float_value(report.time),
            "window": report.window,
            "max_energy": float_value(report.max_energy),
            "fitted_order": report.fitted_order.map(float_value),
            "rows": rows,
        }),
    );
    Ok(())
}

fn run_multi(config: &ExperimentConfig, out: &mut Outputs) -> Result<(), RunError> {
    let parts: Vec<PartSpec> = config
        .hamiltonians
        .iter()
        .zip(&config.seeds)
        .map(|(h, s)| PartSpec {
            seed0: s[0].clone(),
            seed1: s[1].clone(),
            h: h.clone(),
        })
        .collect();
    let wave = match evolve_factorized(&parts, &config.steps) {
        Ok(run) => {
            out.push(Check::verdict(
                "factorized_residual",
                true,
                json!({ "interior_points": run.residual.points().len(), "first_violation": null }),
            ));
            out.csv("residual.csv", |w| run.residual.write_csv(w))?;
            run.wave
        }
        Err(CoreError::NotASolution { site }) => {
            out.push(Check::verdict(
                "factorized_residual",
                false,
                json!({ "first_violation": site }),
            ));
            return Ok(());
        }
        Err(e) => return Err(e).op("evolve_factorized"),
    };
    out.json("wave", &wave);

    let hs: Vec<HermitianIntMatrix> = parts.iter().map(|p| p.h.clone()).collect();
    let interaction = match &config.interaction {
        Some(m) => InteractionTensor::new(wave.dims().to_vec(), m.clone()).op("interaction")?,
        None => InteractionTensor::zeros(wave.dims().to_vec()),
    };
    if !interaction.is_zero() {
        let field = many_time_residual(&wave, &hs, &interaction).op("many_time_residual")?;
        out.push(Check::info(
            "interaction_residual",
            json!({ "vanishes": field.is_zero(), "first_nonzero": field.first_nonzero() }),
        ));
    }

    let seed0 = tensor_product(&parts.iter().map(|p| &p.seed0).collect::<Vec<_>>());
    let seed1 = tensor_product(&parts.iter().map(|p| &p.seed1).collect::<Vec<_>>());
    let common = config.steps.iter().copied().min().unwrap_or(0);
    let sync = evolve_synchronized(&seed0, &seed1, &hs, &interaction, common).op("evolve_synchronized")?;
    let mut divergence = None;
    for n in 0..sync.len() {
        let diagonal = wave.slice(&vec![n; wave.parts()]).op("slice")?;
        if &diagonal != sync.state(n) {
            divergence = Some(json!({ "n": n, "synchronized": sync.state(n), "product": diagonal }));
            break;
        }
    }
    out.push(Check::info(
        "synchronized_comparison",
        json!({ "diverges": divergence.is_some(), "first_divergence": divergence }),
    ));
    Ok(())
}

fn run_bell(config: &ExperimentConfig, out: &mut Outputs) -> Result<(), RunError> {
    let h = &config.hamiltonians[0];
    let steps = config.steps[0];
    let psi = evolve(&config.seeds[0][0], &config.seeds[0][1], h, steps).op("evolve")?;
    let phi = evolve(&config.seeds[1][0], &config.seeds[1][1], h, steps).op("evolve")?;
    let bell = bell_state(&psi, &phi, h).op("bell_state")?;
    let hs = [h.clone(), h.clone()];
    let zero = InteractionTensor::zeros(vec![2, 2]);
    let field = many_time_residual(&bell, &hs, &zero).op("many_time_residual")?;
    out.push(Check::verdict(
        "bell_residual",
        field.is_zero(),
        json!({ "interior_points": field.points().len(), "first_violation": field.first_nonzero() }),
    ));

    let clocks = config.clocks.clone().unwrap_or_else(|| vec![1, 1]);
    let slice = bell.slice_matrix(&clocks).op("slice_matrix")?;
    let witness = factorizability_witness(&slice).op("factorizability_witness")?;
    let certified = witness.is_entangled() && witness.verify(&slice);
    out.push(Check::verdict(
        "bell_entangled",
        certified,
        json!({ "clocks": clocks, "slice": slice, "witness": witness }),
    ));

    let product = MultiWave::product(&[psi, phi]).op("product")?;
    let mut entangled_at = None;
    let last = steps + 1;
    'outer: for a in 0..=last {
        for b in 0..=last {
            let s = product.slice_matrix(&[a, b]).op("slice_matrix")?;
            if factorizability_witness(&s).op("factorizability_witness")?.is_entangled() {
                entangled_at = Some([a, b]);
                break 'outer;
            }
        }
    }
    out.push(Check::verdict(
        "product_factorizable",
        entangled_at.is_none(),
        json!({ "slices_checked": (last + 1) * (last + 1), "first_violation": entangled_at }),
    ));
    out.json("bell_wave", &bell);
    out.json("witness", &json!({ "clocks": clocks, "witness": witness }));
    Ok(())
}

fn run_leibniz(config: &ExperimentConfig, out: &mut Outputs) -> Result<(), RunError> {
    let demo = leibniz_failure_demo(&config.sequences[0], &config.sequences[1]).op("leibniz_failure_demo")?;
    let first_bad = demo
        .rows
        .iter()
        .find(|r| r.product_dot != r.symmetric_rule)
        .map(|r| r.n);
    out.push(Check::verdict(
        "symmetric_rule",
        demo.identity_holds,
        json!({ "rows": demo.rows.len(), "first_violation": first_bad }),
    ));
    out.push(Check::info("naive_rule", json!({ "first_failure": demo.naive_failure })));
    out.json("leibniz", &demo);
    Ok(())
}
