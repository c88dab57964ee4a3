//! Acceptance criteria, one line each.
//!
//! Runs as a plain binary so every criterion reports even when an earlier
//! one fails. Criteria listed in `KNOWN_GAPS` still run at full strictness
//! and print FAIL when they miss; they only stop failing the process
//! unless `ACCEPTANCE_STRICT` is set.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use nalgebra::DMatrix;
use rand::Rng;
use slab_transport::cli::config::jump_cross_sections;
use slab_transport::prelude::*;
use slab_transport::solver::iteration_step;

type Outcome = Result<String, String>;

const KNOWN_GAPS: &[&str] = &["angular-refinement", "spatial-refinement"];

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fmt_list(xs: &[f64], digits: usize) -> String {
    let parts: Vec<String> = xs
        .iter()
        .map(|x| if digits == 0 { format!("{x:.2}") } else { format!("{x:.digits$e}") })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn angular_refinement() -> Outcome {
    let published = [1.61e-4, 8.07e-5, 4.04e-5, 2.04e-5];
    let rows = convergence_study(
        &ManufacturedCase::new(),
        &StudyConfig {
            sweep: Sweep::AngularCells,
            levels: vec![512, 1024, 2048, 4096],
            fixed: 256,
            degree: 0,
            solver: SolverConfig::default(),
        },
    )
    .map_err(|e| e.to_string())?;
    let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let rates: Vec<f64> = rows.iter().filter_map(|r| r.rate).collect();
    let errors_ok = errors
        .iter()
        .zip(published)
        .all(|(&e, p)| e <= 1.5 * p && e >= p / 1.5);
    let rates_ok = rates.iter().all(|r| (r - 0.99).abs() <= 0.1);
    check(
        errors_ok && rates_ok,
        format!("errors {} rates {}", fmt_list(&errors, 2), fmt_list(&rates, 0)),
    )
}

fn spatial_refinement() -> Outcome {
    let rows = convergence_study(
        &ManufacturedCase::new(),
        &StudyConfig {
            sweep: Sweep::SpatialElements,
            levels: vec![16, 32, 64],
            fixed: 8192,
            degree: 0,
            solver: SolverConfig::default(),
        },
    )
    .map_err(|e| e.to_string())?;
    let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let rates: Vec<f64> = rows.iter().filter_map(|r| r.rate).collect();
    let ok = rates.len() == 2 && (rates[0] - 1.98).abs() <= 0.15 && (rates[1] - 1.96).abs() <= 0.15;
    check(ok, format!("errors {} rates {}", fmt_list(&errors, 2), fmt_list(&rates, 0)))
}

fn dsa_efficiency() -> Outcome {
    let run = run_manufactured(&ManufacturedCase::new(), 512, 256, 0, &SolverConfig::default())
        .map_err(|e| e.to_string())?;
    let r = &run.report;
    let max = r.max_rate().unwrap_or(f64::NAN);
    check(
        r.converged && r.iterations <= 17 && max <= 0.25,
        format!("{} iterations, max increment ratio {max:.4}", r.iterations),
    )
}

fn spectrum_bound() -> Outcome {
    let xs = jump_cross_sections();
    let mut summary = Vec::new();
    let mut ok = true;
    for j in [16, 64, 512] {
        let mesh = SpatialMesh::uniform(j, 1.0).map_err(|e| e.to_string())?;
        let mut prev = f64::NEG_INFINITY;
        let mut last = 0.0;
        for n in (1..=8).map(|p| 1usize << p) {
            let grid = AngularGrid::uniform(n, 0).map_err(|e| e.to_string())?;
            let sys = assemble_system(&grid, &mesh, &xs).map_err(|e| e.to_string())?;
            let s = error_propagation_spectrum(&sys).map_err(|e| e.to_string())?;
            let (lo, hi) = (s.min_eigenvalue(), s.max_eigenvalue());
            if lo < -1e-10 || hi > 0.2247 + 1e-3 || hi < prev - 1e-10 || s.max_imaginary_part() > 1e-8 {
                ok = false;
                summary.push(format!("J={j} N={n}: [{lo:.3e}, {hi:.6}]"));
            }
            prev = hi;
            last = hi;
        }
        summary.push(format!("J={j} max {last:.6}"));
    }
    check(ok, summary.join(", "))
}

/// Small random instance with polynomial data.
fn random_problem(seed: u64) -> (DiscreteSystem, EvenField) {
    let mut rng = rng(seed);
    let n = rng.random_range(1..=8);
    let j = rng.random_range(1..=16);
    let grid = random_grid(n, 0, &mut rng);
    let mesh = random_mesh(j, &mut rng);
    let sys = assemble_system(&grid, &mesh, &random_cross_sections(&mut rng)).unwrap();
    let (a, b): (f64, f64) = (rng.random(), rng.random());
    let data = ProblemData::from_source(move |z, mu| a + b * z * mu * mu, move |mu| b * mu, move |_| a);
    let load = sys.assemble_load(&data);
    (sys, load)
}

fn contraction() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    for seed in 0..10 {
        let (sys, load) = random_problem(1000 + seed);
        let u_h = direct_solve(&sys, &load);
        let norm_uh = a_norm(&sys, &u_h).unwrap();
        let c = sys.contraction_bound();
        let mut u = sys.zero_field();
        let mut err = norm_uh;
        for k in 0..=20 {
            // Below this the direct solve's own roundoff dominates.
            if err < 1e-9 * norm_uh {
                break;
            }
            let step = iteration_step(&sys, &load, &u, Preconditioner::Dsa);
            let e_half = a_norm(&sys, &u_h.sub(&step.half)).unwrap();
            let e_next = a_norm(&sys, &u_h.sub(&step.next)).unwrap();
            if e_next > (c + 1e-12) * err || e_next > e_half {
                return Err(format!("seed {seed} k={k}: {e_next:.3e} vs c·{err:.3e}, half {e_half:.3e}"));
            }
            worst = worst.max(e_next / err / c);
            steps += 1;
            u = step.next;
            err = e_next;
        }
    }
    Ok(format!("{steps} steps checked, worst ratio/c {worst:.3}"))
}

fn a_orthogonality() -> Outcome {
    // With zero load the step map acts on the error itself, so e^k is
    // available exactly rather than through a reference solve.
    let mut worst: f64 = 0.0;
    for seed in 0..6 {
        let (sys, _) = random_problem(2000 + seed);
        let zero = sys.zero_field();
        let mut rng = rng(seed);
        let mut e = random_field(&sys, &mut rng);
        for k in 0..20 {
            let step = iteration_step(&sys, &zero, &e, Preconditioner::Dsa);
            e = step.next;
            let ne = a_norm(&sys, &e).unwrap();
            // With one angular cell of degree 0 the correction removes the
            // whole error; what is left is cancellation noise.
            if ne <= 1e-12 * a_norm(&sys, &step.half).unwrap() {
                break;
            }
            for _ in 0..5 {
                let pw = sys.prolong(&random_nodal(&sys, &mut rng));
                let ratio = sys.a_form(&e, &pw).abs() / (ne * a_norm(&sys, &pw).unwrap());
                if ratio > 1e-10 {
                    return Err(format!("seed {seed} k={k}: ratio {ratio:.3e}"));
                }
                worst = worst.max(ratio);
            }
            e = e.scaled(1.0 / ne);
        }
    }
    Ok(format!("worst |a(e, Pw)|/(‖e‖‖Pw‖) = {worst:.2e}"))
}

fn diffusion_limit() -> Outcome {
    let mut counts = Vec::new();
    for inv in [1.0, 10.0, 100.0, 1000.0] {
        let case = ManufacturedCase::diffusion_scaled(1.0 / inv);
        let grid = AngularGrid::uniform(512, 0).unwrap();
        let mesh = SpatialMesh::uniform(256, 1.0).unwrap();
        let sys = assemble_system(&grid, &mesh, &case.cross_sections).map_err(|e| e.to_string())?;
        let load = sys.assemble_load(&case.data);
        let (_, r) =
            source_iteration(&sys, &load, &SolverConfig::default(), sys.zero_field()).map_err(|e| e.to_string())?;
        if !r.converged || r.iterations > 20 {
            return Err(format!("1/δ = {inv}: {} iterations, converged {}", r.iterations, r.converged));
        }
        counts.push(format!("1/δ={inv}: {}", r.iterations));
    }
    Ok(counts.join(", "))
}

fn assembly_oracles() -> Outcome {
    // One angular cell: mass 1, μ² mass 1/3, inflow 1/4, moment √2.
    let m = angular_matrices(&AngularGrid::uniform(1, 0).unwrap());
    let c = m.cell(0);
    let rel = |got: f64, want: f64| ((got - want) / want).abs();
    let angular = rel(c.mass[(0, 0)], 1.0)
        .max(rel(c.mu2[(0, 0)], 1.0 / 3.0))
        .max(rel(c.inflow[(0, 0)], 0.25))
        .max(rel(c.moments[0], 2f64.sqrt()));

    // Single element, σ_t = 1, σ_s = 0.
    let grid = AngularGrid::uniform(1, 0).unwrap();
    let mesh = SpatialMesh::uniform(1, 1.0).unwrap();
    let sys = assemble_system(&grid, &mesh, &CrossSections::new(1.0, 0.0)).unwrap();
    let hand = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5])
        + DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]) / 3.0
        + DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]) / 6.0;
    let block = relative_diff(&sys.block(0).to_dense(), &hand);

    // Diffusion matrix against direct assembly with D = 1/(3σ_t).
    let mut dsa: f64 = 0.0;
    let mut rng = rng(77);
    for (n, j) in [(1, 1), (4, 5), (16, 12)] {
        let grid = AngularGrid::uniform(n, 0).unwrap();
        let mesh = random_mesh(j, &mut rng);
        let st: Vec<f64> = (0..j).map(|_| rng.random_range(0.5..10.0)).collect();
        let sa: Vec<f64> = st.iter().map(|t| rng.random_range(0.01..1.0) * t).collect();
        let ss: Vec<f64> = st.iter().zip(&sa).map(|(t, a)| t - a).collect();
        let xs = CrossSections::new(
            Coefficient::per_element(&mesh, st.clone()).unwrap(),
            Coefficient::per_element(&mesh, ss).unwrap(),
        );
        let sys = assemble_system(&grid, &mesh, &xs).unwrap();
        let nodes = mesh.num_nodes();
        let mut oracle = DMatrix::zeros(nodes, nodes);
        for e in 0..j {
            let h = mesh.element_length(e);
            let d = 1.0 / (3.0 * st[e]);
            for (p, q, s, w) in [(0, 0, 1.0, 2.0), (1, 1, 1.0, 2.0), (0, 1, -1.0, 1.0), (1, 0, -1.0, 1.0)] {
                oracle[(e + p, e + q)] += 2.0 * (d / h * s + sa[e] * h / 6.0 * w);
            }
        }
        oracle[(0, 0)] += 1.0;
        oracle[(nodes - 1, nodes - 1)] += 1.0;
        dsa = dsa.max(relative_diff(&sys.dsa_matrix().to_dense(), &oracle));
    }
    check(
        angular <= 1e-12 && block <= 1e-12 && dsa <= 1e-12,
        format!("angular {angular:.1e}, block {block:.1e}, diffusion {dsa:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("angular-refinement", angular_refinement),
        ("spatial-refinement", spatial_refinement),
        ("dsa-efficiency", dsa_efficiency),
        ("spectrum-bound", spectrum_bound),
        ("contraction", contraction),
        ("dsa-a-orthogonality", a_orthogonality),
        ("diffusion-limit", diffusion_limit),
        ("assembly-oracles", assembly_oracles),
    ];
    let strict = std::env::var_os("ACCEPTANCE_STRICT").is_some();
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut fatal = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let gap = KNOWN_GAPS.contains(&name);
        match outcome {
            Ok(detail) => println!("PASS {name:<20} {detail} ({secs:.1}s)"),
            Err(detail) => {
                let tag = if gap { " [known gap]" } else { "" };
                println!("FAIL {name:<20} {detail} ({secs:.1}s){tag}");
                if strict || !gap {
                    fatal += 1;
                }
            }
        }
    }
    if fatal > 0 {
        eprintln!("{fatal} acceptance criteria failed");
        std::process::exit(1);
    }
}
