mod common;

use common::*;
use rand::Rng;
use slab_transport::analysis::data_norm_bound;
use slab_transport::prelude::*;
use slab_transport::solver::iteration_step;

/// Small random instance with polynomial data.
fn random_problem(seed: u64) -> (DiscreteSystem, EvenField, ProblemData) {
    let mut rng = rng(seed);
    let n = rng.random_range(1..=8);
    let j = rng.random_range(1..=16);
    let degree = rng.random_range(0..=1);
    let grid = random_grid(n, degree, &mut rng);
    let mesh = random_mesh(j, &mut rng);
    let sys = assemble_system(&grid, &mesh, &random_cross_sections(&mut rng)).unwrap();
    let (a, b, c): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let data = ProblemData::from_source(
        move |z, mu| a + b * z * mu + c * mu * mu,
        move |mu| b * mu,
        move |mu| a * (1.0 + mu),
    );
    let load = sys.assemble_load(&data);
    (sys, load, data)
}

#[test]
fn contraction_against_direct_solution() {
    for seed in 0..10 {
        let (sys, load, _) = random_problem(100 + seed);
        let u_h = direct_solve(&sys, &load);
        let norm_uh = a_norm(&sys, &u_h).unwrap();
        let c = sys.contraction_bound();
        for precond in [Preconditioner::Dsa, Preconditioner::None] {
            let mut u = sys.zero_field();
            let mut err = norm_uh;
            for k in 0..20 {
                let step = iteration_step(&sys, &load, &u, precond);
                let e_half = a_norm(&sys, &u_h.sub(&step.half)).unwrap();
                let e_next = a_norm(&sys, &u_h.sub(&step.next)).unwrap();
                // Beyond this the direct solve itself is the error floor.
                if err < 1e-9 * norm_uh {
                    break;
                }
                assert!(
                    e_next <= (c + 1e-12) * err,
                    "seed {seed} {precond:?} k={k}: {e_next} > {c} * {err}"
                );
                assert!(e_next <= e_half * (1.0 + 1e-12), "seed {seed} k={k}: projection increased the error");
                u = step.next;
                err = e_next;
            }
        }
    }
}

#[test]
fn contraction_of_error_recurrence() {
    // Zero load turns the iteration into the error map itself, free of any
    // reference solution, so every one of the 20 steps is checked.
    for seed in 0..10 {
        let (sys, _, _) = random_problem(200 + seed);
        let zero = sys.zero_field();
        let c = sys.contraction_bound();
        let mut rng = rng(seed);
        let mut e = random_field(&sys, &mut rng);
        for k in 0..20 {
            let before = a_norm(&sys, &e).unwrap();
            let step = iteration_step(&sys, &zero, &e, Preconditioner::Dsa);
            let half = a_norm(&sys, &step.half).unwrap();
            let after = a_norm(&sys, &step.next).unwrap();
            assert!(after <= (c + 1e-12) * before, "seed {seed} k={k}");
            assert!(after <= half * (1.0 + 1e-12), "seed {seed} k={k}");
            // Renormalize so roundoff never dominates.
            e = step.next.scaled(1.0 / after);
        }
    }
}

#[test]
fn dsa_error_is_a_orthogonal_to_constants() {
    for seed in 0..6 {
        let (sys, _, _) = random_problem(300 + seed);
        let zero = sys.zero_field();
        let mut rng = rng(seed);
        let mut e = random_field(&sys, &mut rng);
        for _ in 0..10 {
            let step = iteration_step(&sys, &zero, &e, Preconditioner::Dsa);
            e = step.next;
            let ne = a_norm(&sys, &e).unwrap();
            if ne <= 1e-12 * a_norm(&sys, &step.half).unwrap() {
                break;
            }
            for _ in 0..5 {
                let pw = sys.prolong(&random_nodal(&sys, &mut rng));
                let lhs = sys.a_form(&e, &pw).abs();
                assert!(lhs <= 1e-10 * ne * a_norm(&sys, &pw).unwrap(), "seed {seed}: {lhs}");
            }
            e = e.scaled(1.0 / ne);
        }
    }
}

#[test]
fn half_step_smooths_the_error() {
    for seed in 0..10 {
        let (sys, _, _) = random_problem(400 + seed);
        let zero = sys.zero_field();
        let c = sys.contraction_bound();
        let mut rng = rng(seed);
        let mut e = random_field(&sys, &mut rng);
        for _ in 0..5 {
            let step = iteration_step(&sys, &zero, &e, Preconditioner::Dsa);
            let before = norm_decomposition(&sys, &e);
            let after = norm_decomposition(&sys, &step.half);
            assert!(
                after.smoothed() <= 0.25 * c * c * before.projected * (1.0 + 1e-10) + 1e-14 * before.total(),
                "seed {seed}: {} > c²/4 · {}",
                after.smoothed(),
                before.projected
            );
            let ne = a_norm(&sys, &step.next).unwrap();
            e = step.next.scaled(1.0 / ne);
        }
    }
}

#[test]
fn norm_decomposition_sums_to_b() {
    let mut rng = rng(17);
    for seed in 0..10 {
        let (sys, _, _) = random_problem(500 + seed);
        let e = random_field(&sys, &mut rng);
        let d = norm_decomposition(&sys, &e);
        let b = sys.b_form(&e, &e);
        assert!((d.total() - b).abs() <= 1e-12 * b, "{} vs {b}", d.total());
        assert!(d.projected >= 0.0 && d.fluctuation >= -1e-14 * b && d.boundary >= 0.0 && d.streaming >= 0.0);

        let w = random_nodal(&sys, &mut rng);
        let flat = norm_decomposition(&sys, &sys.prolong(&w));
        assert!(flat.fluctuation.abs() <= 1e-13 * flat.total());
    }
    let grid = AngularGrid::uniform(3, 2).unwrap();
    let mesh = SpatialMesh::uniform(5, 1.0).unwrap();
    let sys = assemble_system(&grid, &mesh, &CrossSections::new(2.0, 1.0)).unwrap();
    let mut e = random_field(&sys, &mut rng);
    for n in 0..3 {
        for j in 0..6 {
            e.set(n, 0, j, 0.0);
        }
    }
    assert!(norm_decomposition(&sys, &e).projected.abs() <= 1e-28);
}

#[test]
fn a_priori_bound_holds() {
    for seed in 0..10 {
        let (sys, load, data) = random_problem(600 + seed);
        let u_h = direct_solve(&sys, &load);
        let bound = data_norm_bound(&sys, &data);
        let norm = a_norm(&sys, &u_h).unwrap();
        assert!(norm <= bound * (1.0 + 1e-8), "seed {seed}: {norm} > {bound}");
    }
}

#[test]
fn iteration_reaches_direct_solution() {
    for seed in 0..5 {
        let (sys, load, _) = random_problem(700 + seed);
        let u_h = direct_solve(&sys, &load);
        let cfg = SolverConfig {
            tolerance: 1e-12,
            ..SolverConfig::default()
        };
        let (u, report) = source_iteration(&sys, &load, &cfg, sys.zero_field()).unwrap();
        assert!(report.converged);
        let err = a_norm(&sys, &u_h.sub(&u)).unwrap();
        assert!(err <= 1e-9 * a_norm(&sys, &u_h).unwrap().max(1.0), "seed {seed}: {err}");
        assert!(report.increments.iter().all(|&d| d > 0.0 || report.increments.len() == 1));
    }
}

#[test]
fn plain_source_iteration_is_slow_but_contracts() {
    let case = ManufacturedCase::new();
    let cfg = SolverConfig {
        tolerance: 1e-300,
        max_iterations: 60,
        preconditioner: Preconditioner::None,
    };
    let run = run_manufactured(&case, 16, 32, 0, &cfg).unwrap();
    let c = run.report.contraction_bound;
    assert!((c - 2.5 / 2.51).abs() < 1e-3);
    // Leakage through the thin slab keeps the plain rate near 0.81.
    let late = &run.report.rates[20..];
    for &r in late {
        assert!(r <= c + 1e-12, "rate {r} above {c}");
    }
    let plain = late.iter().copied().fold(f64::INFINITY, f64::min);
    let dsa = run_manufactured(&case, 16, 32, 0, &SolverConfig::default()).unwrap();
    let fast = dsa.report.max_rate().unwrap();
    assert!(plain > 0.75 && fast < 0.25, "plain {plain}, dsa {fast}");
}

#[test]
fn dsa_correction_of_zero_and_pure_absorber() {
    let mut rng = rng(8);
    let grid = AngularGrid::uniform(4, 1).unwrap();
    let mesh = SpatialMesh::uniform(6, 1.0).unwrap();
    let sys = assemble_system(&grid, &mesh, &CrossSections::new(1.0, 0.5)).unwrap();
    assert_eq!(sys.dsa_correction(&sys.zero_field()), sys.zero_field());
    let absorber = assemble_system(&grid, &mesh, &CrossSections::new(1.0, 0.0)).unwrap();
    let d = random_field(&absorber, &mut rng);
    assert_eq!(absorber.dsa_correction(&d), absorber.zero_field());
}
