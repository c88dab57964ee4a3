//! Refinement study of the manufactured problem in angle and in space.
//!
//! ```text
//! cargo run --release --example convergence_table -- [quick]
//! ```

use slab_transport::analysis::StudyRow;
use slab_transport::prelude::*;

pub fn run(sweep: Sweep, levels: &[usize], fixed: usize) -> slab_transport::Result<Vec<StudyRow>> {
    let cfg = StudyConfig {
        sweep,
        levels: levels.to_vec(),
        fixed,
        degree: 0,
        solver: SolverConfig::default(),
    };
    convergence_study(&ManufacturedCase::new(), &cfg)
}

fn print(title: &str, head: &str, rows: &[StudyRow]) {
    println!("{title}");
    println!("{head:>6}  {:>11}  {:>6}  {:>5}", "error", "rate", "iters");
    for r in rows {
        let rate = r.rate.map_or(String::from("-"), |x| format!("{x:.2}"));
        println!("{:>6}  {:>11.3e}  {rate:>6}  {:>5}", r.level, r.error, r.iterations);
    }
    println!();
}

fn main() {
    let quick = std::env::args().any(|a| a == "quick");
    let (angular, fixed_j, spatial, fixed_n) = if quick {
        (vec![32, 64, 128], 64, vec![8, 16, 32], 512)
    } else {
        (vec![512, 1024, 2048, 4096, 8192], 256, vec![16, 32, 64, 128, 256], 8192)
    };
    let rows = run(Sweep::AngularCells, &angular, fixed_j).unwrap();
    print(&format!("angular refinement, J = {fixed_j}"), "N", &rows);
    let rows = run(Sweep::SpatialElements, &spatial, fixed_n).unwrap();
    print(&format!("spatial refinement, N = {fixed_n}"), "J", &rows);
}
