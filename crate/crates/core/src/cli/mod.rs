//! Command implementations behind the `rte` binary.
//!
//! Every command writes CSV files with a header row, `\n` line endings and
//! floats in `{:.11e}` format (12 significant digits), so identical
//! configurations give byte-identical output.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 configuration error,
//! 3 cross-section (model) violation, 4 iteration budget exhausted.

pub mod config;
pub mod expr;

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{ConfigError, Preset, Problem, RunConfig};

use crate::analysis::{
    convergence_study, error_propagation_spectrum, l2_error, recover_odd, ManufacturedCase,
    StudyConfig, Sweep,
};
use crate::angular::AngularGrid;
use crate::assembly::DiscreteSystem;
use crate::solver::source_iteration;
use crate::spatial::SpatialMesh;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("model error: {0}")]
    Model(crate::Error),
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("{0}")]
    Internal(crate::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Internal(_) => 1,
            CliError::Config(_) => 2,
            CliError::Model(_) => 3,
            CliError::NotConverged(_) => 4,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error as E;
        match e {
            E::CrossSections(_) | E::Precondition(_) => CliError::Model(e),
            E::InvalidAngularGrid(_) | E::InvalidMesh(_) | E::InvalidCoefficient(_) => {
                CliError::Config(ConfigError {
                    line: None,
                    message: e.to_string(),
                })
            }
            other => CliError::Internal(other),
        }
    }
}

/// Files written by a command and a human-readable summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Fixed CSV float format.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// Caps the global rayon pool at `RTE_THREADS` when the variable is set.
pub fn configure_threads() -> Result<Option<usize>, CliError> {
    let Ok(raw) = std::env::var("RTE_THREADS") else {
        return Ok(None);
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => {
            return Err(CliError::Config(ConfigError {
                line: None,
                message: format!("RTE_THREADS must be a positive integer, got '{raw}'"),
            }))
        }
    };
    // A pool built earlier in the process wins; that is fine for the binary.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn build_system(cfg: &RunConfig, n: usize, j: usize) -> Result<DiscreteSystem, CliError> {
    let grid = AngularGrid::uniform(n, cfg.degree)?;
    let mesh = SpatialMesh::uniform(j, cfg.problem.length())?;
    Ok(DiscreteSystem::assemble(
        &grid,
        &mesh,
        &cfg.problem.cross_sections(),
        cfg.gamma,
    )?)
}

/// Solves on `angular_cells × elements`; writes `solution.csv`,
/// `iterations.csv` and `summary.txt`.
pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let system = build_system(cfg, cfg.angular_cells, cfg.elements)?;
    let load = system.assemble_load(&cfg.problem.data());
    let (u, report) = source_iteration(&system, &load, &cfg.solver, system.zero_field())?;

    let mut solution = String::from("z,scalar_flux\n");
    for (z, s) in system.mesh().nodes().iter().zip(system.scalar_flux(&u)) {
        writeln!(solution, "{},{}", format_float(*z), format_float(s)).unwrap();
    }
    let mut iterations = String::from("k,increment,rate\n");
    for (k, inc) in report.increments.iter().enumerate() {
        let rate = k
            .checked_sub(1)
            .map(|i| format_float(report.rates[i]))
            .unwrap_or_default();
        writeln!(iterations, "{},{},{rate}", k + 1, format_float(*inc)).unwrap();
    }

    let mut summary = String::new();
    writeln!(summary, "problem = {}", cfg.preset.name()).unwrap();
    writeln!(summary, "angular_cells = {}", cfg.angular_cells).unwrap();
    writeln!(summary, "elements = {}", cfg.elements).unwrap();
    writeln!(summary, "iterations = {}", report.iterations).unwrap();
    writeln!(summary, "converged = {}", report.converged).unwrap();
    if let Some(inc) = report.final_increment() {
        writeln!(summary, "final_increment = {}", format_float(inc)).unwrap();
    }
    if let Some(rate) = report.max_rate() {
        writeln!(summary, "max_rate = {}", format_float(rate)).unwrap();
    }
    writeln!(summary, "contraction_bound = {}", format_float(report.contraction_bound)).unwrap();
    if let Problem::Manufactured = cfg.problem {
        let case = ManufacturedCase::new();
        let odd = recover_odd(&system, &u, &case.data.q_odd);
        let err = l2_error(system.grid(), system.mesh(), &u, &odd, ManufacturedCase::exact);
        writeln!(summary, "l2_error = {}", format_float(err)).unwrap();
    }

    let files = vec![
        write_file(out, "solution.csv", &solution)?,
        write_file(out, "iterations.csv", &iterations)?,
        write_file(out, "summary.txt", &summary)?,
    ];
    if !report.converged {
        return Err(CliError::NotConverged(format!(
            "{} iterations, last increment {:e} > {:e}",
            report.iterations,
            report.final_increment().unwrap_or(f64::NAN),
            cfg.solver.tolerance
        )));
    }
    Ok(Outcome { files, summary })
}

/// Manufactured-solution refinement study; writes `convergence.csv`.
pub fn cmd_convergence(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    if !matches!(cfg.problem, Problem::Manufactured) {
        return Err(CliError::Config(ConfigError {
            line: None,
            message: "convergence studies need the manufactured preset".into(),
        }));
    }
    let study = StudyConfig {
        sweep: cfg.sweep,
        levels: cfg.levels.clone(),
        fixed: match cfg.sweep {
            Sweep::AngularCells => cfg.elements,
            Sweep::SpatialElements => cfg.angular_cells,
        },
        degree: cfg.degree,
        solver: cfg.solver,
    };
    let rows = convergence_study(&ManufacturedCase::new(), &study)?;

    let mut csv = String::from("level,error,rate\n");
    let mut summary = String::new();
    writeln!(
        summary,
        "{:>8} {:>8} {:>14} {:>8} {:>6}",
        "N", "J", "error", "rate", "iters"
    )
    .unwrap();
    for row in &rows {
        let rate = row.rate.map(format_float).unwrap_or_default();
        writeln!(csv, "{},{},{rate}", row.level, format_float(row.error)).unwrap();
        writeln!(
            summary,
            "{:>8} {:>8} {:>14.3e} {:>8} {:>6}",
            row.angular_cells,
            row.elements,
            row.error,
            row.rate.map(|r| format!("{r:.2}")).unwrap_or_default(),
            row.iterations
        )
        .unwrap();
    }
    let files = vec![write_file(out, "convergence.csv", &csv)?];
    if let Some(row) = rows.iter().find(|r| !r.converged) {
        return Err(CliError::NotConverged(format!(
            "level {} used all {} iterations",
            row.level, row.iterations
        )));
    }
    Ok(Outcome { files, summary })
}

/// `(J, N)` pairs in first-occurrence order with duplicates removed.
pub fn spectrum_pairs(elements: &[usize], angular_cells: &[usize]) -> Vec<(usize, usize)> {
    let mut seen = HashSet::new();
    elements
        .iter()
        .flat_map(|&j| angular_cells.iter().map(move |&n| (j, n)))
        .filter(|p| seen.insert(*p))
        .collect()
}

/// Error-propagation spectra over all `(J, N)` pairs; writes `spectrum.csv`.
pub fn cmd_spectrum(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let mut csv = String::from("J,N,index,value\n");
    let mut summary = String::new();
    writeln!(summary, "{:>6} {:>6} {:>14} {:>14}", "J", "N", "min", "max").unwrap();
    for (j, n) in spectrum_pairs(&cfg.spectrum_elements, &cfg.spectrum_angular_cells) {
        let system = build_system(cfg, n, j)?;
        let spectrum = error_propagation_spectrum(&system).map_err(|e| {
            CliError::Model(crate::Error::Precondition(format!("J = {j}, N = {n}: {e}")))
        })?;
        for (i, v) in spectrum.eigenvalues.iter().enumerate() {
            writeln!(csv, "{j},{n},{i},{}", format_float(*v)).unwrap();
        }
        writeln!(
            summary,
            "{j:>6} {n:>6} {:>14.6e} {:>14.6e}",
            spectrum.min_eigenvalue(),
            spectrum.max_eigenvalue()
        )
        .unwrap();
    }
    let files = vec![write_file(out, "spectrum.csv", &csv)?];
    Ok(Outcome { files, summary })
}
