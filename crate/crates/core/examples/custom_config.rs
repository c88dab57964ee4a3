//! Solve a problem described in the same text format the `rte` binary reads.
//!
//! ```text
//! cargo run --release --example custom_config -- [path/to/problem.conf]
//! ```

use slab_transport::cli::config::RunConfig;
use slab_transport::prelude::*;

const SLAB: &str = "
# Shielded slab: a strongly scattering layer behind a thin absorber.
length = 2
angular_cells = 16
elements = 80
sigma_t = if(z < 0.25, 5, 1.2)
sigma_s = if(z < 0.25, 0.5, 1)
source = 0
inflow_left = 1
";

pub struct Profile {
    pub nodes: Vec<f64>,
    pub scalar_flux: Vec<f64>,
    pub report: IterationReport,
}

pub fn run(text: &str) -> Result<Profile, Box<dyn std::error::Error>> {
    let cfg = RunConfig::parse(text)?;
    let grid = AngularGrid::uniform(cfg.angular_cells, cfg.degree)?;
    let mesh = SpatialMesh::uniform(cfg.elements, cfg.problem.length())?;
    let sys = assemble_system(&grid, &mesh, &cfg.problem.cross_sections())?;
    let load = sys.assemble_load(&cfg.problem.data());
    let (u, report) = source_iteration(&sys, &load, &cfg.solver, sys.zero_field())?;
    Ok(Profile {
        nodes: mesh.nodes().to_vec(),
        scalar_flux: sys.scalar_flux(&u),
        report,
    })
}

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable config"),
        None => SLAB.to_string(),
    };
    let p = run(&text).unwrap();
    println!("{} iterations, converged: {}", p.report.iterations, p.report.converged);
    let stride = (p.nodes.len() / 16).max(1);
    for (z, s) in p.nodes.iter().zip(&p.scalar_flux).step_by(stride) {
        println!("{z:6.3}  {s:.6e}");
    }
}
