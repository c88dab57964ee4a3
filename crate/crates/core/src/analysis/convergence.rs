//! Mesh-refinement studies against the manufactured solution.

use rayon::prelude::*;

use super::error::l2_error;
use super::manufactured::{ManufacturedCase, MANUFACTURED_LENGTH};
use super::recovery::recover_odd;
use crate::angular::AngularGrid;
use crate::assembly::{DiscreteSystem, EvenField, OddField, DEFAULT_GAMMA};
use crate::error::{Error, Result};
use crate::solver::{source_iteration, IterationReport, SolverConfig};
use crate::spatial::SpatialMesh;

/// Which discretization parameter a study refines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Refine the number of angular cells `N` at fixed `J`.
    AngularCells,
    /// Refine the number of spatial elements `J` at fixed `N`.
    SpatialElements,
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub sweep: Sweep,
    /// Ascending values of the refined parameter.
    pub levels: Vec<usize>,
    /// Value of the parameter held fixed.
    pub fixed: usize,
    pub degree: usize,
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub level: usize,
    pub angular_cells: usize,
    pub elements: usize,
    pub error: f64,
    /// Observed order against the previous row.
    pub rate: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub max_increment_ratio: Option<f64>,
}

/// Solution of the manufactured problem on one discretization.
#[derive(Debug, Clone)]
pub struct ManufacturedRun {
    pub system: DiscreteSystem,
    pub even: EvenField,
    pub odd: OddField,
    pub report: IterationReport,
    pub error: f64,
}

pub fn run_manufactured(
    case: &ManufacturedCase,
    angular_cells: usize,
    elements: usize,
    degree: usize,
    solver: &SolverConfig,
) -> Result<ManufacturedRun> {
    let grid = AngularGrid::uniform(angular_cells, degree)?;
    let mesh = SpatialMesh::uniform(elements, MANUFACTURED_LENGTH)?;
    let system = DiscreteSystem::assemble(&grid, &mesh, &case.cross_sections, DEFAULT_GAMMA)?;
    let load = system.assemble_load(&case.data);
    let (even, report) = source_iteration(&system, &load, solver, system.zero_field())?;
    let odd = recover_odd(&system, &even, &case.data.q_odd);
    let error = l2_error(&grid, &mesh, &even, &odd, ManufacturedCase::exact);
    Ok(ManufacturedRun {
        system,
        even,
        odd,
        report,
        error,
    })
}

/// Solves, recovers the odd part, and measures the L² error per level.
pub fn convergence_study(case: &ManufacturedCase, config: &StudyConfig) -> Result<Vec<StudyRow>> {
    if config.levels.is_empty() || config.levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(
            "study levels must be non-empty and strictly ascending".into(),
        ));
    }
    let runs = config
        .levels
        .par_iter()
        .map(|&level| {
            let (n, j) = match config.sweep {
                Sweep::AngularCells => (level, config.fixed),
                Sweep::SpatialElements => (config.fixed, level),
            };
            let run = run_manufactured(case, n, j, config.degree, &config.solver)?;
            Ok((level, n, j, run.error, run.report))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<StudyRow> = Vec::with_capacity(runs.len());
    for (level, n, j, error, report) in runs {
        let rate = rows.last().map(|prev| {
            (prev.error / error).ln() / (level as f64 / prev.level as f64).ln()
        });
        rows.push(StudyRow {
            level,
            angular_cells: n,
            elements: j,
            error,
            rate,
            iterations: report.iterations,
            converged: report.converged,
            max_increment_ratio: report.max_rate(),
        });
    }
    Ok(rows)
}
