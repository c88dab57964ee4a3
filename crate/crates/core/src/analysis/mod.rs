//! Manufactured-solution studies, odd-part recovery, error norms and
//! spectral diagnostics of the iteration.

pub mod convergence;
pub mod diagnostics;
pub mod error;
pub mod manufactured;
pub mod recovery;
pub mod spectrum;

pub use convergence::{convergence_study, run_manufactured, ManufacturedRun, StudyConfig, StudyRow, Sweep};
pub use diagnostics::{norm_decomposition, NormDecomposition};
pub use error::{data_norm_bound, energy_error, l2_error};
pub use manufactured::{manufactured_data, ManufacturedCase};
pub use recovery::recover_odd;
pub use spectrum::{error_propagation_spectrum, propagation_matrices, SpectrumResult};
