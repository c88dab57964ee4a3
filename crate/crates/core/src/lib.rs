//! Even-parity finite element solver for radiative transfer in a slab.
//!
//! The angular variable is discretized by discontinuous Legendre polynomials
//! on a symmetric partition of `[-1, 1]`, the spatial variable by continuous
//! piecewise-linear elements. The resulting symmetric system is solved by a
//! source iteration whose half steps decouple into one banded solve per
//! angular cell, accelerated by a Galerkin diffusion correction.
//!
//! ```no_run
//! use slab_transport::prelude::*;
//!
//! let case = ManufacturedCase::new();
//! let run = run_manufactured(&case, 64, 32, 0, &SolverConfig::default()).unwrap();
//! println!("{} iterations, L2 error {:.3e}", run.report.iterations, run.error);
//! ```

pub mod analysis;
pub mod angular;
pub mod assembly;
pub mod banded;
pub mod cli;
pub mod error;
pub mod legendre;
pub mod quadrature;
pub mod solver;
pub mod spatial;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analysis::{
        convergence_study, error_propagation_spectrum, manufactured_data, norm_decomposition,
        recover_odd, run_manufactured, ManufacturedCase, StudyConfig, Sweep,
    };
    pub use crate::angular::{angular_matrices, AngularGrid, Parity};
    pub use crate::assembly::{assemble_load, assemble_system, DiscreteSystem, EvenField, OddField, ProblemData};
    pub use crate::solver::{a_norm, source_iteration, IterationReport, Preconditioner, SolverConfig};
    pub use crate::spatial::{validate_cross_sections, Coefficient, CrossSections, SpatialMesh};
}
