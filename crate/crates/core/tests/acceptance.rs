//! Acceptance gate: ten criteria, one line each, nonzero exit on any failure.

use std::time::Instant;

use hamca::automaton::{
    action_evaluate, evolve, evolve_phase_space, rewind, verify_stationarity,
    PhaseTrajectory, Trajectory, DEFAULT_DELTAS,
};
use hamca::conservation::{default_observables, symmetrized_q, ConservedQuantity};
use hamca::multipartite::{
    bell_state, evolve_factorized, evolve_synchronized, factorizability_witness, leibniz_failure_demo,
    many_time_residual, tensor_product, InteractionTensor, PartSpec, Witness,
};
use hamca::random;
use hamca::sampling::{
    continuum_q, convergence_study, dispersion_theta, eigenmodes, empirical_phase_advance, evolve_float,
    fit_power_law, phase_rate_check, single_mode_signal, to_complex_matrix, ContinuumSignal,
    DiscretenessScale, QOrder,
};
use hamca::{GIVector, GaussianInt, HermitianIntMatrix};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INSTANCES: usize = 100;
const MAX_DIM: usize = 6;
const ENTRY_BOUND: i64 = 3;
const STEPS: usize = 500;

const SAMPLING_TOL: f64 = 1e-12;
const CONTINUUM_Q_TOL: f64 = 1e-10;
const COSH_Q_INSTANCES: usize = 50;
const SLOPE_TARGET: f64 = 4.0;
const SLOPE_TOL: f64 = 0.3;
const DISPERSION_TOL: f64 = 1e-9;
const MIN_ORDER: f64 = 1.7;
const CONVERGENCE_SCALES: [f64; 4] = [0.4, 0.2, 0.1, 0.05];

struct Instance {
    h: HermitianIntMatrix,
    traj: Trajectory,
}

fn instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_101);
    (0..INSTANCES)
        .map(|_| {
            let dim = rng.gen_range(1..=MAX_DIM);
            let h = random::hermitian(&mut rng, dim, ENTRY_BOUND);
            let s0 = random::vector(&mut rng, dim, ENTRY_BOUND);
            let s1 = random::vector(&mut rng, dim, ENTRY_BOUND);
            let traj = evolve(&s0, &s1, &h, STEPS).expect("evolve");
            Instance { h, traj }
        })
        .collect()
}

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion<'a> = Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome + 'a>;

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn exact_conservation(set: &[Instance]) -> Outcome {
    let mut checked = 0;
    for (k, inst) in set.iter().enumerate() {
        for (label, g) in default_observables(&inst.h) {
            let q = ConservedQuantity::along(&inst.traj, &g, label.clone()).expect("q_G");
            checked += 1;
            if let Some(n) = q.first_change() {
                return outcome(false, format!("instance {k}, G = {label}: q_G changes at n = {n}"));
            }
        }
    }
    outcome(true, format!("{checked} (instance, G) pairs constant over {STEPS} steps, bit-exact"))
}

fn action_principle(set: &[Instance], rng: &mut ChaCha8Rng) -> Outcome {
    let mut checked = 0;
    for (k, inst) in set.iter().enumerate() {
        let action = action_evaluate(&inst.traj, &inst.h).expect("action");
        if !action.value().re.eq(&0.into()) || !action.value().im.eq(&0.into()) {
            return outcome(false, format!("instance {k}: action {} on a solution", action.value()));
        }
        let report = verify_stationarity(&inst.traj, &inst.h, &DEFAULT_DELTAS).expect("stationarity");
        checked += report.checked;
        if !report.passed() {
            return outcome(false, format!("instance {k}: stationarity violated at sites {:?}", report.sites()));
        }
        let site = rng.gen_range(1..inst.traj.last_clock());
        let dof = rng.gen_range(0..inst.traj.dim());
        let bumped = &inst.traj.state(site).entries()[dof] + &GaussianInt::from(1);
        let corrupted = inst.traj.with_entry(site, dof, bumped);
        let report = verify_stationarity(&corrupted, &inst.h, &DEFAULT_DELTAS).expect("stationarity");
        if report.passed() {
            return outcome(false, format!("instance {k}: +1 at site {site}, dof {dof} undetected"));
        }
    }
    outcome(true, format!("action 0 on all solutions; {checked} variations vanish; every +1 corruption detected"))
}

fn reversibility_and_superposition(set: &[Instance], rng: &mut ChaCha8Rng) -> Outcome {
    for (k, inst) in set.iter().enumerate() {
        let (s0, s1) = rewind(&inst.traj, &inst.h).expect("rewind");
        if &s0 != inst.traj.state(0) || &s1 != inst.traj.state(1) {
            return outcome(false, format!("instance {k}: rewind does not reproduce the seeds"));
        }
        let d = inst.h.dim();
        let (a, b) = (random::gaussian(rng, 5), random::gaussian(rng, 5));
        let other = evolve(
            &random::vector(rng, d, ENTRY_BOUND),
            &random::vector(rng, d, ENTRY_BOUND),
            &inst.h,
            STEPS,
        )
        .expect("evolve");
        let mix = |x: &GIVector, y: &GIVector| x.scale(&a).add(&y.scale(&b)).expect("dims");
        let combined = evolve(
            &mix(inst.traj.state(0), other.state(0)),
            &mix(inst.traj.state(1), other.state(1)),
            &inst.h,
            STEPS,
        )
        .expect("evolve");
        for n in 0..combined.len() {
            if combined.state(n) != &mix(inst.traj.state(n), other.state(n)) {
                return outcome(false, format!("instance {k}: superposition fails at n = {n}"));
            }
        }
    }
    outcome(true, format!("{INSTANCES} rewinds exact; superposition exact over {STEPS} steps"))
}

fn phase_space_equivalence(set: &[Instance]) -> Outcome {
    for (k, inst) in set.iter().enumerate() {
        let (hs, ha) = inst.h.split_sym_antisym();
        let s = &inst.traj;
        let (x0, p0) = (s.state(0).real_parts(), s.state(0).imag_parts());
        let (x1, p1) = (s.state(1).real_parts(), s.state(1).imag_parts());
        let phase = evolve_phase_space(&x0, &p0, &x1, &p1, &hs, &ha, STEPS).expect("phase space");
        if phase != PhaseTrajectory::from_trajectory(s) {
            return outcome(false, format!("instance {k}: phase-space run differs"));
        }
    }
    outcome(true, format!("{INSTANCES} instances agree entrywise over {STEPS} steps"))
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sampling_fidelity(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for _ in 0..20 {
        let dim = rng.gen_range(1..=4);
        let h = random::hermitian(rng, dim, ENTRY_BOUND);
        let traj = evolve(
            &random::vector(rng, dim, ENTRY_BOUND),
            &random::vector(rng, dim, ENTRY_BOUND),
            &h,
            40,
        )
        .expect("evolve");
        for &l in &[1.0, 0.3, 0.1, 0.01, 1e-3] {
            for w in [1, 2, 3, 7, 20, 100] {
                let scale = DiscretenessScale::new(l).expect("scale");
                let signal = ContinuumSignal::from_trajectory(&traj, scale, w).expect("signal");
                for n in 0..traj.len() {
                    let sample = &signal.samples()[n];
                    let got = signal.evaluate(n as f64 * l).values;
                    let diff: Vec<Complex64> = got.iter().zip(sample).map(|(a, b)| a - b).collect();
                    let rel = max_norm(&diff) / max_norm(sample).max(f64::MIN_POSITIVE);
                    worst = worst.max(if max_norm(sample) == 0.0 { max_norm(&diff) } else { rel });
                    count += 1;
                }
            }
        }
    }
    outcome(
        worst <= SAMPLING_TOL,
        format!("{count} sample points, worst relative error {worst:.3e} (tol {SAMPLING_TOL:.0e})"),
    )
}

fn spectral_radius(h: &HermitianIntMatrix) -> f64 {
    eigenmodes(&to_complex_matrix(h))
        .iter()
        .map(|(e, _)| e.abs())
        .fold(0.0, f64::max)
}

/// Compared on oscillatory instances only: with `|E| > 2` the samples grow
/// geometrically and the band-limited reading no longer applies.
fn finite_l_corrections(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut accepted = 0;
    while accepted < COSH_Q_INSTANCES {
        let dim = rng.gen_range(1..=4);
        let h = random::hermitian(rng, dim, 1);
        if spectral_radius(&h) > 2.0 {
            continue;
        }
        accepted += 1;
        let traj = evolve(
            &random::vector(rng, dim, ENTRY_BOUND),
            &random::vector(rng, dim, ENTRY_BOUND),
            &h,
            200,
        )
        .expect("evolve");
        for &l in &[1.0, 0.25, 0.01] {
            let scale = DiscretenessScale::new(l).expect("scale");
            let signal = ContinuumSignal::from_trajectory(&traj, scale, 8).expect("signal");
            for n in 1..traj.last_clock() {
                let discrete = symmetrized_q(&traj, n).expect("Q").to_f64();
                let cont = continuum_q(&signal, n as f64 * l, QOrder::ExactCosh);
                worst = worst.max((cont - discrete).abs() / discrete.abs().max(1.0));
            }
        }
    }
    let mut points = Vec::new();
    for k in 0..=5 {
        let l = 0.1 * 10f64.powf(k as f64 / 5.0);
        let (signal, t) = single_mode_signal(1.0, l, 100_000).expect("signal");
        let gap = continuum_q(&signal, t, QOrder::ExactCosh) - continuum_q(&signal, t, QOrder::OrderL2);
        points.push((l, gap.abs()));
    }
    let slope = fit_power_law(&points).unwrap_or(f64::NAN);
    let passed = worst <= CONTINUUM_Q_TOL && (slope - SLOPE_TARGET).abs() <= SLOPE_TOL;
    outcome(
        passed,
        format!(
            "cosh Q vs discrete Q on {accepted} oscillatory instances, worst {worst:.3e} (tol {CONTINUUM_Q_TOL:.0e}); slope {slope:.4} (target {SLOPE_TARGET} ± {SLOPE_TOL})"
        ),
    )
}

fn dispersion_and_limit(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut modes = 0;
    for _ in 0..20 {
        let dim = rng.gen_range(1..=4);
        let h = random::hermitian(rng, dim, ENTRY_BOUND);
        let hc = to_complex_matrix(&h);
        let spectrum = eigenmodes(&hc);
        let max_e = spectrum.iter().map(|(e, _)| e.abs()).fold(0.0, f64::max);
        let l = if max_e > 0.0 { 1.9 / max_e } else { 1.0 };
        let k = &hc * Complex64::new(l, 0.0);
        for (e, v) in &spectrum {
            let theta = dispersion_theta(e * l).theta;
            let run = evolve_float(&k, v, &(v * Complex64::from_polar(1.0, -theta)), 400);
            let series: Vec<Complex64> = run.iter().map(|psi| v.dotc(psi)).collect();
            worst = worst.max((empirical_phase_advance(&series) - theta).abs());
            modes += 1;
        }
    }
    for &(e, l) in &[(1.0, 0.1), (1.0, 0.05), (1.5, 0.2), (-2.0, 0.3)] {
        let check = phase_rate_check(e, l, 20_000).expect("phase rate");
        worst = worst.max((check.empirical - check.predicted).abs());
    }
    let hamiltonians = [
        HermitianIntMatrix::from_reals(&[&[1, 1], &[1, -1]]).expect("H"),
        HermitianIntMatrix::from_pairs(&[&[(0, 0), (0, -1)], &[(0, 1), (0, 0)]]).expect("H"),
        HermitianIntMatrix::from_reals(&[&[1, 1, 0], &[1, 0, 1], &[0, 1, -1]]).expect("H"),
    ];
    let mut orders = Vec::new();
    for h in &hamiltonians {
        let d = h.dim();
        let psi0 = DVector::from_fn(d, |r, _| Complex64::new(1.0 / (r + 1) as f64, 0.3 * r as f64));
        let report = convergence_study(h, &psi0, 2.0, &CONVERGENCE_SCALES, 16).expect("convergence");
        let excluded = report.rows.iter().any(|r| r.excluded.is_some());
        orders.push(if excluded { f64::NAN } else { report.fitted_order.unwrap_or(f64::NAN) });
    }
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let passed = worst <= DISPERSION_TOL && orders.iter().all(|o| *o >= MIN_ORDER);
    outcome(
        passed,
        format!(
            "{modes} eigenmodes, worst phase error {worst:.3e} (tol {DISPERSION_TOL:.0e}); orders {orders:.3?}, min {min_order:.3} (≥ {MIN_ORDER})"
        ),
    )
}

fn many_time_factorization(rng: &mut ChaCha8Rng) -> Outcome {
    let mut fields = 0;
    for _ in 0..40 {
        let m = rng.gen_range(1..=3);
        let parts: Vec<PartSpec> = (0..m)
            .map(|_| {
                let d = rng.gen_range(1..=3);
                PartSpec {
                    seed0: random::vector(rng, d, ENTRY_BOUND),
                    seed1: random::vector(rng, d, ENTRY_BOUND),
                    h: random::hermitian(rng, d, ENTRY_BOUND),
                }
            })
            .collect();
        let steps: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=4)).collect();
        let run = match evolve_factorized(&parts, &steps) {
            Ok(run) => run,
            Err(e) => return outcome(false, format!("factorized run rejected: {e}")),
        };
        let hs: Vec<HermitianIntMatrix> = parts.iter().map(|p| p.h.clone()).collect();
        let zero = InteractionTensor::zeros(run.wave.dims().to_vec());
        if !many_time_residual(&run.wave, &hs, &zero).expect("residual").is_zero() {
            return outcome(false, format!("nonzero residual for m = {m}, box {:?}", run.wave.clock_box()));
        }
        fields += 1;
    }
    let x = HermitianIntMatrix::from_reals(&[&[0, 1], &[1, 0]]).expect("H");
    let part = PartSpec {
        seed0: GIVector::from_reals(&[1, 0]),
        seed1: GIVector::from_reals(&[0, 1]),
        h: x.clone(),
    };
    let run = evolve_factorized(&[part.clone(), part], &[3, 3]).expect("run");
    let coupling = HermitianIntMatrix::from_reals(&[&[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]])
        .expect("I");
    let i = InteractionTensor::new(vec![2, 2], coupling).expect("I");
    let coupled = many_time_residual(&run.wave, &[x.clone(), x], &i).expect("residual");
    let witness = coupled.first_nonzero();
    let passed = witness.is_some();
    let shown = witness
        .map(|e| format!("residual {} at clocks {:?}, indices {:?}", e.value, e.clocks, e.indices))
        .unwrap_or_else(|| "no nonzero residual with I ≠ 0".into());
    outcome(passed, format!("{fields} product fields with zero residual; coupled: {shown}"))
}

fn leibniz_and_synchronization(rng: &mut ChaCha8Rng) -> Outcome {
    let mut failures_seen = 0;
    for trial in 0..200 {
        let len = rng.gen_range(3..=20);
        let a: Vec<GaussianInt> = (0..len).map(|_| random::gaussian(rng, 9)).collect();
        let b: Vec<GaussianInt> = (0..len).map(|_| random::gaussian(rng, 9)).collect();
        let demo = leibniz_failure_demo(&a, &b).expect("demo");
        if !demo.identity_holds {
            return outcome(false, format!("symmetric product rule fails on trial {trial}"));
        }
        failures_seen += usize::from(demo.naive_failure.is_some());
    }
    let x = HermitianIntMatrix::from_reals(&[&[0, 1], &[1, 0]]).expect("H");
    let e0 = GIVector::from_reals(&[1, 0]);
    let seed = tensor_product(&[&e0, &e0]);
    let zero = InteractionTensor::zeros(vec![2, 2]);
    let sync = evolve_synchronized(&seed, &seed, &[x.clone(), x.clone()], &zero, 1).expect("sync");
    let single = evolve(&e0, &e0, &x, 1).expect("single");
    let product = tensor_product(&[single.state(2), single.state(2)]);
    let (s, p) = (&sync.state(2).entries()[3], &product.entries()[3]);
    let passed = s != p;
    outcome(
        passed,
        format!(
            "identity exact on 200 random pairs (naive rule failed on {failures_seen}); n = 2 entry 11: synchronized {s} vs product {p}"
        ),
    )
}

fn bell_states(rng: &mut ChaCha8Rng) -> Outcome {
    let mut certified = 0;
    for _ in 0..30 {
        let h = random::hermitian(rng, 2, ENTRY_BOUND);
        let steps = rng.gen_range(1..=4);
        let psi = evolve(&random::vector(rng, 2, 3), &random::vector(rng, 2, 3), &h, steps).expect("psi");
        let phi = evolve(&random::vector(rng, 2, 3), &random::vector(rng, 2, 3), &h, steps).expect("phi");
        let bell = bell_state(&psi, &phi, &h).expect("bell");
        let residual = many_time_residual(&bell, &[h.clone(), h.clone()], &InteractionTensor::zeros(vec![2, 2]))
            .expect("residual");
        if !residual.is_zero() {
            return outcome(false, "Bell field has nonzero residual");
        }
        for n1 in 0..psi.len() {
            for n2 in 0..psi.len() {
                let slice = bell.slice_matrix(&[n1, n2]).expect("slice");
                let w = factorizability_witness(&slice).expect("witness");
                if !w.verify(&slice) {
                    return outcome(false, format!("unverifiable certificate at clocks ({n1}, {n2})"));
                }
                certified += usize::from(w.is_entangled());
            }
        }
    }
    let zero = HermitianIntMatrix::zeros(2);
    let (e0, e1) = (GIVector::from_reals(&[1, 0]), GIVector::from_reals(&[0, 1]));
    let psi = evolve(&e0, &e0, &zero, 1).expect("psi");
    let phi = evolve(&e1, &e1, &zero, 1).expect("phi");
    let canonical = bell_state(&psi, &phi, &zero).expect("bell");
    let slice = canonical.slice_matrix(&[1, 1]).expect("slice");
    let canonical_minor = match factorizability_witness(&slice).expect("witness") {
        Witness::Entangled { minor, .. } => minor,
        Witness::Factorizable => return outcome(false, "canonical Bell slice declared factorizable"),
    };
    let mut products = 0;
    for _ in 0..500 {
        let (d1, d2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let a = random::vector(rng, d1, 5);
        let b = random::vector(rng, d2, 5);
        let flat = tensor_product(&[&a, &b]);
        let slice: Vec<Vec<GaussianInt>> = flat.entries().chunks(d2).map(|r| r.to_vec()).collect();
        if factorizability_witness(&slice).expect("witness") != Witness::Factorizable {
            return outcome(false, format!("outer product declared entangled: {a:?} ⊗ {b:?}"));
        }
        products += 1;
    }
    outcome(
        certified > 0,
        format!(
            "Bell residuals zero; {certified} entangled slices certified (canonical minor {canonical_minor}); {products} outer products factorizable"
        ),
    )
}

fn main() {
    let start = Instant::now();
    let set = instances();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("exact conservation", Box::new(|_| exact_conservation(&set))),
        ("action principle", Box::new(|r| action_principle(&set, r))),
        ("reversibility and superposition", Box::new(|r| reversibility_and_superposition(&set, r))),
        ("phase-space equivalence", Box::new(|_| phase_space_equivalence(&set))),
        ("sampling fidelity", Box::new(sampling_fidelity)),
        ("finite-l corrections", Box::new(finite_l_corrections)),
        ("dispersion and continuum limit", Box::new(dispersion_and_limit)),
        ("many-time factorization", Box::new(many_time_factorization)),
        ("Leibniz failure and synchronized evolution", Box::new(leibniz_and_synchronization)),
        ("Bell state", Box::new(bell_states)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let result = check(&mut rng);
        let verdict = if result.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!result.passed);
        println!(
            "[{verdict}] criterion {:>2}: {name}: {} ({:.1}s)",
            k + 1,
            result.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 10 passed in {:.1}s", 10 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
