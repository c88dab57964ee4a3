//! Spectrum of the preconditioned error propagation `P e^k ↦ P e^{k+1}`.
//!
//! `G` is not self-adjoint for the plain σ_s-weighted nodal inner product,
//! but `Z = M_σs (I − G₀)`, with `G₀` the unaccelerated propagation, is the
//! nodal matrix of the symmetric positive form `a(K R w, R w')`, and `Z G`
//! is the matrix of `a((I−Π)K R w, (I−Π)K R w')`. The spectrum therefore
//! solves the symmetric-definite problem `Z G x = λ Z x`.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::assembly::DiscreteSystem;
use crate::error::{Error, Result};
use crate::solver::{iteration_step, Preconditioner};
use crate::spatial::ELEMENT_QUADRATURE_POINTS;

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Error propagation over nodal scalar fluxes.
    pub matrix: DMatrix<f64>,
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    pub angular_cells: usize,
    pub elements: usize,
}

impl SpectrumResult {
    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Largest imaginary part among the eigenvalues of the unsymmetrized
    /// matrix, from a real Schur decomposition.
    pub fn max_imaginary_part(&self) -> f64 {
        self.matrix
            .clone()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }
}

/// Nodal propagation matrices `(G, G₀)` built column by column from one
/// zero-load sweep per nodal basis vector.
pub fn propagation_matrices(system: &DiscreteSystem) -> (DMatrix<f64>, DMatrix<f64>) {
    let nodes = system.mesh().num_nodes();
    let zero = system.zero_field();
    let columns: Vec<(Vec<f64>, Vec<f64>)> = (0..nodes)
        .into_par_iter()
        .map(|i| {
            let mut w = vec![0.0; nodes];
            w[i] = 1.0;
            let e = system.prolong(&w);
            let step = iteration_step(system, &zero, &e, Preconditioner::Dsa);
            (system.scalar_flux(&step.next), system.scalar_flux(&step.half))
        })
        .collect();
    let mut g = DMatrix::zeros(nodes, nodes);
    let mut g0 = DMatrix::zeros(nodes, nodes);
    for (i, (c, c0)) in columns.iter().enumerate() {
        g.column_mut(i).copy_from_slice(c);
        g0.column_mut(i).copy_from_slice(c0);
    }
    (g, g0)
}

/// Eigenvalues of the DSA error propagation operator. Requires `σ_s > 0`.
pub fn error_propagation_spectrum(system: &DiscreteSystem) -> Result<SpectrumResult> {
    let xs = system.cross_sections();
    if let Some((_, z, _)) = system
        .mesh()
        .quadrature(ELEMENT_QUADRATURE_POINTS)
        .into_iter()
        .find(|&(_, z, _)| !(xs.sigma_s(z) > 0.0))
    {
        return Err(Error::Precondition(format!(
            "spectrum needs σ_s > 0, found σ_s({z}) = {}",
            xs.sigma_s(z)
        )));
    }
    let (g, g0) = propagation_matrices(system);
    let nodes = g.nrows();
    let mass = system.mass_sigma_s().to_dense();
    let z = symmetrize(&(&mass * (DMatrix::identity(nodes, nodes) - g0)));
    let h = symmetrize(&(&z * &g));
    let chol = z.cholesky().ok_or(Error::NotPositiveDefinite {
        context: "spectrum weight",
        pivot: 0,
        value: f64::NAN,
    })?;
    let l = chol.l();
    let linv = l
        .clone()
        .solve_lower_triangular(&DMatrix::identity(nodes, nodes))
        .expect("triangular factor is invertible");
    let c = symmetrize(&(&linv * h * linv.transpose()));
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(SpectrumResult {
        matrix: g,
        eigenvalues,
        angular_cells: system.grid().num_cells(),
        elements: system.mesh().num_elements(),
    })
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}
