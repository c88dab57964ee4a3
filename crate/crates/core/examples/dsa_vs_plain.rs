//! Increment history of plain and accelerated source iteration side by side.
//!
//! ```text
//! cargo run --release --example dsa_vs_plain -- [N] [J]
//! ```

use slab_transport::prelude::*;

pub struct Histories {
    pub contraction_bound: f64,
    pub dsa: IterationReport,
    pub plain: IterationReport,
}

pub fn run(n: usize, j: usize, budget: usize) -> slab_transport::Result<Histories> {
    let case = ManufacturedCase::new();
    let dsa = SolverConfig {
        max_iterations: budget,
        ..SolverConfig::default()
    };
    let plain = SolverConfig {
        preconditioner: Preconditioner::None,
        ..dsa
    };
    let d = run_manufactured(&case, n, j, 0, &dsa)?.report;
    let p = run_manufactured(&case, n, j, 0, &plain)?.report;
    Ok(Histories {
        contraction_bound: d.contraction_bound,
        dsa: d,
        plain: p,
    })
}

fn arg(i: usize, default: usize) -> usize {
    std::env::args().nth(i).map_or(default, |s| s.parse().expect("integer argument"))
}

fn main() {
    let (n, j) = (arg(1, 64), arg(2, 64));
    let h = run(n, j, 200).unwrap();
    println!("N = {n}, J = {j}, c = {:.4}", h.contraction_bound);
    println!("{:>4}  {:>11}  {:>11}", "k", "DSA", "plain");
    let rows = h.dsa.increments.len().max(h.plain.increments.len());
    for k in 0..rows {
        let show = |r: &IterationReport| r.increments.get(k).map_or(String::new(), |x| format!("{x:.3e}"));
        if k < 20 || k % 10 == 9 {
            println!("{:>4}  {:>11}  {:>11}", k + 1, show(&h.dsa), show(&h.plain));
        }
    }
    println!(
        "iterations: DSA {} ({}), plain {} ({})",
        h.dsa.iterations,
        if h.dsa.converged { "converged" } else { "stopped" },
        h.plain.iterations,
        if h.plain.converged { "converged" } else { "stopped" }
    );
}
