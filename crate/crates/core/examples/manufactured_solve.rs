//! Solve the manufactured problem once and compare with the exact solution.
//!
//! ```text
//! cargo run --release --example manufactured_solve -- [N] [J] [L]
//! ```

use slab_transport::prelude::*;

pub struct SolveSummary {
    pub iterations: usize,
    pub converged: bool,
    pub max_rate: f64,
    pub error: f64,
    /// Largest nodal deviation of the scalar flux from the exact one.
    pub scalar_error: f64,
}

pub fn run(n: usize, j: usize, degree: usize) -> slab_transport::Result<SolveSummary> {
    let case = ManufacturedCase::new();
    let run = run_manufactured(&case, n, j, degree, &SolverConfig::default())?;
    let scalar = run.system.scalar_flux(&run.even);
    let scalar_error = run
        .system
        .mesh()
        .nodes()
        .iter()
        .zip(&scalar)
        .map(|(&z, s)| (s - ManufacturedCase::scalar(z)).abs())
        .fold(0.0, f64::max);
    Ok(SolveSummary {
        iterations: run.report.iterations,
        converged: run.report.converged,
        max_rate: run.report.max_rate().unwrap_or(0.0),
        error: run.error,
        scalar_error,
    })
}

fn arg(i: usize, default: usize) -> usize {
    std::env::args().nth(i).map_or(default, |s| s.parse().expect("integer argument"))
}

fn main() {
    let (n, j, degree) = (arg(1, 512), arg(2, 256), arg(3, 0));
    let s = run(n, j, degree).unwrap();
    println!("N = {n}, J = {j}, L = {degree}");
    println!("iterations     {} (converged: {})", s.iterations, s.converged);
    println!("max rate       {:.4}", s.max_rate);
    println!("L2 error       {:.4e}", s.error);
    println!("scalar error   {:.4e}", s.scalar_error);
}
