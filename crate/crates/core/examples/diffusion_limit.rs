//! Iteration counts as the problem approaches the diffusion limit.
//!
//! Scattering grows like 1/δ while absorption and source shrink like δ.
//! Plain source iteration stalls, the accelerated one does not.
//!
//! ```text
//! cargo run --release --example diffusion_limit -- [N] [J]
//! ```

use slab_transport::prelude::*;

pub struct LimitRow {
    pub inverse_delta: f64,
    pub dsa_iterations: usize,
    pub dsa_converged: bool,
    pub plain_iterations: usize,
    pub plain_converged: bool,
}

fn iterations(case: &ManufacturedCase, n: usize, j: usize, cfg: &SolverConfig) -> slab_transport::Result<IterationReport> {
    let grid = AngularGrid::uniform(n, 0)?;
    let mesh = SpatialMesh::uniform(j, 1.0)?;
    let sys = assemble_system(&grid, &mesh, &case.cross_sections)?;
    let load = sys.assemble_load(&case.data);
    Ok(source_iteration(&sys, &load, cfg, sys.zero_field())?.1)
}

pub fn run(n: usize, j: usize, inverse_deltas: &[f64], plain_budget: usize) -> slab_transport::Result<Vec<LimitRow>> {
    let dsa = SolverConfig::default();
    let plain = SolverConfig {
        preconditioner: Preconditioner::None,
        max_iterations: plain_budget,
        ..dsa
    };
    inverse_deltas
        .iter()
        .map(|&inv| {
            let case = ManufacturedCase::diffusion_scaled(1.0 / inv);
            let d = iterations(&case, n, j, &dsa)?;
            let p = iterations(&case, n, j, &plain)?;
            Ok(LimitRow {
                inverse_delta: inv,
                dsa_iterations: d.iterations,
                dsa_converged: d.converged,
                plain_iterations: p.iterations,
                plain_converged: p.converged,
            })
        })
        .collect()
}

fn arg(i: usize, default: usize) -> usize {
    std::env::args().nth(i).map_or(default, |s| s.parse().expect("integer argument"))
}

fn main() {
    let (n, j) = (arg(1, 32), arg(2, 64));
    println!("N = {n}, J = {j}");
    println!("{:>6}  {:>6}  {:>8}", "1/δ", "DSA", "plain");
    for r in run(n, j, &[1.0, 10.0, 100.0, 1000.0], 2000).unwrap() {
        let mark = |it: usize, ok: bool| if ok { it.to_string() } else { format!(">{it}") };
        println!(
            "{:>6}  {:>6}  {:>8}",
            r.inverse_delta,
            mark(r.dsa_iterations, r.dsa_converged),
            mark(r.plain_iterations, r.plain_converged)
        );
    }
}
