//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use ggqd_core::objective::Direction;
use ggqd_core::pauli::CorrelationData;
use ggqd_core::qstate::random_su2;
use ggqd_core::{
    brute_force_oracle, generate_state, ggqd, local_unitary_conjugate, maximize_objective,
    objective_f, pauli_decompose, reconstruct_density, reduced_over_a, trace_cc, DensityMatrix,
    MeasurementDirections, Method, SolverConfig, StateFamily, StateFamilySpec,
};
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bell_formula(c3: f64) -> f64 {
    (1.0 + c3 * c3 - f64::max(1.0, c3 * c3)) / 4.0
}

fn bell_grid() -> Vec<f64> {
    (0..=40).map(|i| -1.0 + 0.05 * i as f64).collect()
}

fn bell_state(c3: f64) -> DensityMatrix {
    let rho = generate_state(&StateFamilySpec::bell_mixture(c3)).expect("C3 in range");
    assert_eq!(rho.is_physical(), c3 == 0.0);
    rho
}

fn random_state(seed: u64) -> DensityMatrix {
    generate_state(&StateFamilySpec::random(seed)).unwrap()
}

fn criterion_1() -> Outcome {
    let cfg = SolverConfig::default();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for c3 in bell_grid() {
        let r = ggqd(&bell_state(c3), &cfg, Method::Fast).unwrap();
        worst = worst.max((r.ggqd - bell_formula(c3)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-6 && secs < 5.0,
        format!("41 points, max |err| = {worst:.2e} (tol 1e-6), {secs:.3} s (limit 5 s)"),
    )
}

fn criterion_2() -> Outcome {
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (c3, expected) in [(1.0, 0.25), (0.5, 0.0625), (0.0, 0.0)] {
        let got = ggqd(&bell_state(c3), &cfg, Method::Fast).unwrap().ggqd;
        worst = worst.max((got - expected).abs());
        parts.push(format!("C3={c3}: {got:.12}"));
    }
    outcome(
        worst <= 1e-9,
        format!("{} | max |err| = {worst:.2e} (tol 1e-9)", parts.join(", ")),
    )
}

fn criterion_3() -> Outcome {
    let worst = bell_grid()
        .into_iter()
        .map(|c3| (trace_cc(&pauli_decompose(&bell_state(c3))) - 0.25 * (c3 * c3 + 2.0)).abs())
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-12,
        format!("max |Tr(CC') - (C3^2+2)/4| = {worst:.2e} (tol 1e-12)"),
    )
}

fn criterion_4() -> Outcome {
    let cfg = SolverConfig::default();
    let mut worst_gap: f64 = 0.0;
    let mut worst_below: f64 = 0.0;
    let mut slowest: f64 = 0.0;
    for seed in 0..200 {
        let rho = random_state(seed);
        assert!(rho.is_physical());
        let corr = pauli_decompose(&rho);
        let fast = maximize_objective(&corr, &cfg).f_max;
        let t = Instant::now();
        let oracle = brute_force_oracle(&corr, &cfg).f_max;
        slowest = slowest.max(t.elapsed().as_secs_f64());
        worst_gap = worst_gap.max((fast - oracle).abs());
        worst_below = worst_below.max(oracle - fast);
    }
    outcome(
        worst_gap <= 5e-4 && worst_below <= 1e-9 && slowest <= 2.0,
        format!(
            "200 states, max |fast-oracle| = {worst_gap:.2e} (tol 5e-4), \
             max (oracle-fast) = {worst_below:.2e} (tol 1e-9), slowest oracle {slowest:.3} s (limit 2 s)"
        ),
    )
}

fn criterion_5() -> Outcome {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let rho = random_state(10_000 + k);
        let (u, v) = (random_su2(&mut rng), random_su2(&mut rng));
        let moved = local_unitary_conjugate(&rho, &u, &v).unwrap();
        let d0 = ggqd(&rho, &cfg, Method::Fast).unwrap().ggqd;
        let d1 = ggqd(&moved, &cfg, Method::Fast).unwrap().ggqd;
        worst = worst.max((d0 - d1).abs());
    }
    outcome(
        worst <= 1e-6,
        format!("100 triples, max |dGGQD| = {worst:.2e} (tol 1e-6)"),
    )
}

fn random_classical(rng: &mut ChaCha20Rng) -> DensityMatrix {
    let w: Vec<f64> = (0..4)
        .map(|_| -rng.random::<f64>().max(1e-300).ln())
        .collect();
    let total: f64 = w.iter().sum();
    let mut spec = StateFamilySpec::new(StateFamily::ClassicalClassical);
    for (name, wi) in ["p00", "p01", "p10", "p11"].into_iter().zip(&w) {
        spec = spec.with(name, wi / total);
    }
    generate_state(&spec).unwrap()
}

fn criterion_6() -> Outcome {
    let cfg = SolverConfig::default();
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut worst: f64 = f64::NEG_INFINITY;
    for k in 0..50 {
        let mut rho = random_classical(&mut rng);
        if k % 2 == 1 {
            let (u, v) = (random_su2(&mut rng), random_su2(&mut rng));
            rho = local_unitary_conjugate(&rho, &u, &v).unwrap();
        }
        worst = worst.max(ggqd(&rho, &cfg, Method::Fast).unwrap().ggqd);
    }
    outcome(
        worst <= 1e-8,
        format!("50 states (25 rotated), max GGQD = {worst:.2e} (tol 1e-8)"),
    )
}

fn criterion_7() -> Outcome {
    let cfg = SolverConfig::default();
    let rho = generate_state(&StateFamilySpec::new(StateFamily::BellPhiPlus)).unwrap();
    let fast = ggqd(&rho, &cfg, Method::Fast).unwrap().ggqd;
    let oracle = ggqd(&rho, &cfg, Method::Oracle).unwrap().ggqd;
    outcome(
        (fast - 0.5).abs() <= 1e-6 && (oracle - 0.5).abs() <= 1e-6,
        format!("fast {fast:.12}, oracle {oracle:.12} (target 0.5 +- 1e-6)"),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let grid: Vec<Direction> = (0..50)
        .flat_map(|i| {
            (0..50)
                .map(move |j| Direction::from_angles(TAU * i as f64 / 50.0, PI * j as f64 / 49.0))
        })
        .collect();
    let mut worst_excess: f64 = f64::NEG_INFINITY;
    let mut worst_gap: f64 = 0.0;
    for seed in 0..100 {
        let corr = pauli_decompose(&random_state(20_000 + seed));
        let b = Direction::from_angles(rng.random_range(0.0..TAU), rng.random_range(0.0..=PI));
        let exact = reduced_over_a(&corr, &b).value;
        let grid_max = grid
            .iter()
            .map(|a| objective_f(&corr, &MeasurementDirections { a: *a, b }))
            .fold(f64::NEG_INFINITY, f64::max);
        worst_excess = worst_excess.max(grid_max - exact);
        worst_gap = worst_gap.max(exact - grid_max);
    }
    outcome(
        worst_excess <= 1e-12 && worst_gap <= 3e-3,
        format!("100 states, max (grid - exact) = {worst_excess:.2e} (tol 1e-12), max gap = {worst_gap:.2e} (tol 3e-3)"),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let corr = CorrelationData::new(
            Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
            Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
            Matrix3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
        );
        worst = worst.max(pauli_decompose(&reconstruct_density(&corr)).max_abs_diff(&corr));
    }
    outcome(
        worst <= 1e-12,
        format!("100 tuples, max elementwise error = {worst:.2e} (tol 1e-12)"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 Bell-mixture closed form", criterion_1),
        ("2 Bell-mixture spot values", criterion_2),
        ("3 Tr(CC') on Bell mixture", criterion_3),
        ("4 oracle equivalence", criterion_4),
        ("5 local-unitary invariance", criterion_5),
        ("6 zero discord on classical states", criterion_6),
        ("7 Bell state |Phi+>", criterion_7),
        ("8 a-reduction exactness", criterion_8),
        ("9 Pauli round trip", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {name}: {}", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
