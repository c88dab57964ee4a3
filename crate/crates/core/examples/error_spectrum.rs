//! Eigenvalues of the accelerated error propagation for the jump problem.
//!
//! ```text
//! cargo run --release --example error_spectrum -- [J] [max N]
//! ```

use slab_transport::cli::config::jump_cross_sections;
use slab_transport::prelude::*;

pub struct SpectrumRow {
    pub angular_cells: usize,
    pub max: f64,
    pub min: f64,
    pub imaginary: f64,
}

pub fn run(j: usize, max_n: usize) -> slab_transport::Result<Vec<SpectrumRow>> {
    let mesh = SpatialMesh::uniform(j, 1.0)?;
    let xs = jump_cross_sections();
    let mut rows = Vec::new();
    let mut n = 2;
    while n <= max_n {
        let grid = AngularGrid::uniform(n, 0)?;
        let sys = assemble_system(&grid, &mesh, &xs)?;
        let s = error_propagation_spectrum(&sys)?;
        rows.push(SpectrumRow {
            angular_cells: n,
            max: s.max_eigenvalue(),
            min: s.min_eigenvalue(),
            imaginary: s.max_imaginary_part(),
        });
        n *= 2;
    }
    Ok(rows)
}

fn arg(i: usize, default: usize) -> usize {
    std::env::args().nth(i).map_or(default, |s| s.parse().expect("integer argument"))
}

fn main() {
    let (j, max_n) = (arg(1, 64), arg(2, 64));
    println!("J = {j}");
    println!("{:>5}  {:>10}  {:>10}  {:>9}", "N", "max", "min", "|imag|");
    for r in run(j, max_n).unwrap() {
        println!(
            "{:>5}  {:>10.6}  {:>10.3e}  {:>9.1e}",
            r.angular_cells, r.max, r.min, r.imaginary
        );
    }
}
