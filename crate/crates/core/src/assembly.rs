//! Discrete even-parity system: per-direction transport blocks, the isotropic
//! scattering operator, the load vector, and the diffusion correction.
//!
//! For `u = Σ c_{n,l,j} φ_j(z) Q⁺_{n,l}(μ)` the energy form is
//!
//! ```text
//! a(u, v) = 2⟨u, v⟩_inflow + (σ_t⁻¹ μ∂_z u, μ∂_z v) + (σ_t u, v) − (σ_s P u, v)
//!         = b(u, v) − k(u, v)
//! ```
//!
//! `b` is block diagonal over angular cells; `k` couples cells only through
//! the zeroth angular moment.

use std::sync::Arc;

use rayon::prelude::*;

use crate::angular::{angular_matrices, AngularGrid, AngularMatrices};
use crate::banded::{BandedCholesky, SymBanded};
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spatial::{
    element_matrices, validate_cross_sections, CrossSectionReport, CrossSections, MatrixKind,
    SpatialMesh, SymTridiagonal,
};

/// Smallest absorption accepted by [`assemble_system`].
pub const DEFAULT_GAMMA: f64 = 1e-12;

/// Angular Gauss points per cell beyond the degree `L` used for data integrals.
const LOAD_ANGULAR_EXTRA_POINTS: usize = 4;
const LOAD_SPATIAL_POINTS: usize = 5;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

pub type PhaseSpaceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type AngleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sources and inflow data of a slab problem.
#[derive(Clone)]
pub struct ProblemData {
    /// Even part `q⁺(z, μ)` of the source.
    pub q_even: PhaseSpaceFn,
    /// Odd part `q⁻(z, μ)` of the source.
    pub q_odd: PhaseSpaceFn,
    /// `g⁰(μ)` for `μ > 0`, entering at `z = 0`.
    pub inflow_left: AngleFn,
    /// `g^Z(μ)` for `μ < 0`, entering at `z = Z`.
    pub inflow_right: AngleFn,
}

impl std::fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ProblemData { .. }")
    }
}

impl ProblemData {
    pub fn zero() -> Self {
        Self {
            q_even: Arc::new(|_, _| 0.0),
            q_odd: Arc::new(|_, _| 0.0),
            inflow_left: Arc::new(|_| 0.0),
            inflow_right: Arc::new(|_| 0.0),
        }
    }

    /// Splits a full source `q(z, μ)` into its even and odd parts.
    pub fn from_source<Q, L, R>(q: Q, inflow_left: L, inflow_right: R) -> Self
    where
        Q: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        R: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let q = Arc::new(q);
        let qe = q.clone();
        Self {
            q_even: Arc::new(move |z, mu| 0.5 * (qe(z, mu) + qe(z, -mu))),
            q_odd: Arc::new(move |z, mu| 0.5 * (q(z, mu) - q(z, -mu))),
            inflow_left: Arc::new(inflow_left),
            inflow_right: Arc::new(inflow_right),
        }
    }

    /// Largest parity defect `|q⁺(z,μ) − q⁺(z,−μ)|`, `|q⁻(z,μ) + q⁻(z,−μ)|`
    /// over the given samples.
    pub fn parity_defect(&self, samples: &[(f64, f64)]) -> f64 {
        samples
            .iter()
            .map(|&(z, mu)| {
                let e = ((self.q_even)(z, mu) - (self.q_even)(z, -mu)).abs();
                let o = ((self.q_odd)(z, mu) + (self.q_odd)(z, -mu)).abs();
                e.max(o)
            })
            .fold(0.0, f64::max)
    }
}

/// Coefficients of an even-parity field, `c[(n, j, l)]` with `l` fastest.
///
/// The same layout carries dual vectors such as loads and operator images.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenField {
    cells: usize,
    nodes: usize,
    dofs: usize,
    coeffs: Vec<f64>,
}

impl EvenField {
    pub fn zeros(grid: &AngularGrid, mesh: &SpatialMesh) -> Self {
        Self::zeros_with(grid.num_cells(), mesh.num_nodes(), grid.even_dofs())
    }

    pub(crate) fn zeros_with(cells: usize, nodes: usize, dofs: usize) -> Self {
        Self {
            cells,
            nodes,
            dofs,
            coeffs: vec![0.0; cells * nodes * dofs],
        }
    }

    pub fn from_vec(grid: &AngularGrid, mesh: &SpatialMesh, coeffs: Vec<f64>) -> Result<Self> {
        let mut f = Self::zeros(grid, mesh);
        if coeffs.len() != f.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: f.coeffs.len(),
                found: coeffs.len(),
            });
        }
        f.coeffs = coeffs;
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_cells(&self) -> usize {
        self.cells
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn dofs_per_node(&self) -> usize {
        self.dofs
    }

    #[inline]
    pub fn index(&self, n: usize, l: usize, j: usize) -> usize {
        (n * self.nodes + j) * self.dofs + l
    }

    pub fn get(&self, n: usize, l: usize, j: usize) -> f64 {
        self.coeffs[self.index(n, l, j)]
    }

    pub fn set(&mut self, n: usize, l: usize, j: usize, v: f64) {
        let i = self.index(n, l, j);
        self.coeffs[i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn cell(&self, n: usize) -> &[f64] {
        let w = self.nodes * self.dofs;
        &self.coeffs[n * w..(n + 1) * w]
    }

    pub fn dot(&self, other: &EvenField) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_finite())
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: f64, other: &EvenField) {
        self.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a += alpha * b);
    }

    pub fn scaled(&self, alpha: f64) -> EvenField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    pub fn sub(&self, other: &EvenField) -> EvenField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn add(&self, other: &EvenField) -> EvenField {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    /// Point value `u_h(z, μ)`.
    pub fn eval(&self, grid: &AngularGrid, mesh: &SpatialMesh, z: f64, mu: f64) -> f64 {
        let n = grid.locate(mu);
        let j = mesh.locate(z);
        let (a, b) = mesh.element(j);
        let right = (z - a) / (b - a);
        let left = 1.0 - right;
        (0..self.dofs)
            .map(|l| {
                let c = left * self.get(n, l, j) + right * self.get(n, l, j + 1);
                c * grid.local_basis(n, l, mu.abs())
            })
            .sum()
    }
}

/// Coefficients of an odd-parity field: degree `L + 1` in μ, piecewise
/// constant in z. Layout `c[(n, j, l)]` with `j` an element index.
#[derive(Debug, Clone, PartialEq)]
pub struct OddField {
    cells: usize,
    elements: usize,
    dofs: usize,
    coeffs: Vec<f64>,
}

impl OddField {
    pub fn zeros(grid: &AngularGrid, mesh: &SpatialMesh) -> Self {
        let (cells, elements, dofs) = (grid.num_cells(), mesh.num_elements(), grid.odd_dofs());
        Self {
            cells,
            elements,
            dofs,
            coeffs: vec![0.0; cells * elements * dofs],
        }
    }

    #[inline]
    pub fn index(&self, n: usize, l: usize, j: usize) -> usize {
        (n * self.elements + j) * self.dofs + l
    }

    pub fn get(&self, n: usize, l: usize, j: usize) -> f64 {
        self.coeffs[self.index(n, l, j)]
    }

    pub fn set(&mut self, n: usize, l: usize, j: usize, v: f64) {
        let i = self.index(n, l, j);
        self.coeffs[i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn num_cells(&self) -> usize {
        self.cells
    }

    pub fn dofs_per_element(&self) -> usize {
        self.dofs
    }

    /// Coefficients of all cells, `elements * dofs` per cell.
    pub(crate) fn cells_mut(&mut self) -> rayon::slice::ChunksMut<'_, f64> {
        let w = self.elements * self.dofs;
        self.coeffs.par_chunks_mut(w)
    }

    /// Point value `φ_h⁻(z, μ)`.
    pub fn eval(&self, grid: &AngularGrid, mesh: &SpatialMesh, z: f64, mu: f64) -> f64 {
        let n = grid.locate(mu);
        let j = mesh.locate(z);
        let v: f64 = (0..self.dofs)
            .map(|l| self.get(n, l, j) * grid.local_basis(n, l, mu.abs()))
            .sum();
        if mu < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// Assembled operators of the even-parity problem on one discretization.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    grid: AngularGrid,
    mesh: SpatialMesh,
    xs: CrossSections,
    angular: AngularMatrices,
    report: CrossSectionReport,
    /// `∫ σ_t φ_i φ_k`
    mass_t: SymTridiagonal,
    /// `∫ σ_s φ_i φ_k`
    mass_s: SymTridiagonal,
    /// `∫ σ_t⁻¹ φ_i' φ_k'`
    stiffness: SymTridiagonal,
    blocks: Vec<SymBanded>,
    factors: Vec<BandedCholesky>,
    dsa_matrix: SymBanded,
    dsa_factor: BandedCholesky,
}

/// Validates (A1) with [`DEFAULT_GAMMA`] and assembles the system.
pub fn assemble_system(
    grid: &AngularGrid,
    mesh: &SpatialMesh,
    xs: &CrossSections,
) -> Result<DiscreteSystem> {
    DiscreteSystem::assemble(grid, mesh, xs, DEFAULT_GAMMA)
}

impl DiscreteSystem {
    pub fn assemble(
        grid: &AngularGrid,
        mesh: &SpatialMesh,
        xs: &CrossSections,
        gamma: f64,
    ) -> Result<Self> {
        let report = validate_cross_sections(xs, mesh, gamma)?;
        let angular = angular_matrices(grid);
        let mass_t = element_matrices(mesh, &|z| xs.sigma_t(z), MatrixKind::Mass)?;
        let mass_s = element_matrices(mesh, &|z| xs.sigma_s(z), MatrixKind::Mass)?;
        let stiffness = element_matrices(mesh, &|z| 1.0 / xs.sigma_t(z), MatrixKind::Stiffness)?;

        let blocks: Vec<SymBanded> = (0..grid.num_cells())
            .into_par_iter()
            .map(|n| transport_block(&angular, n, &mass_t, &stiffness))
            .collect();
        let factors = blocks
            .par_iter()
            .map(|b| b.cholesky("transport block"))
            .collect::<Result<Vec<_>>>()?;

        let dsa_matrix = galerkin_diffusion_matrix(&blocks, &angular, &mass_s);
        let dsa_factor = dsa_matrix.cholesky("diffusion correction")?;

        Ok(Self {
            grid: grid.clone(),
            mesh: mesh.clone(),
            xs: xs.clone(),
            angular,
            report,
            mass_t,
            mass_s,
            stiffness,
            blocks,
            factors,
            dsa_matrix,
            dsa_factor,
        })
    }

    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    pub fn mesh(&self) -> &SpatialMesh {
        &self.mesh
    }

    pub fn cross_sections(&self) -> &CrossSections {
        &self.xs
    }

    pub fn angular(&self) -> &AngularMatrices {
        &self.angular
    }

    pub fn cross_section_report(&self) -> CrossSectionReport {
        self.report
    }

    /// `c = max σ_s/σ_t`.
    pub fn contraction_bound(&self) -> f64 {
        self.report.contraction
    }

    pub fn block(&self, n: usize) -> &SymBanded {
        &self.blocks[n]
    }

    pub fn mass_sigma_t(&self) -> &SymTridiagonal {
        &self.mass_t
    }

    pub fn mass_sigma_s(&self) -> &SymTridiagonal {
        &self.mass_s
    }

    pub fn stiffness_inv_sigma_t(&self) -> &SymTridiagonal {
        &self.stiffness
    }

    /// `Pᵀ A P` over the nodal scalar space.
    pub fn dsa_matrix(&self) -> &SymBanded {
        &self.dsa_matrix
    }

    pub fn zero_field(&self) -> EvenField {
        EvenField::zeros(&self.grid, &self.mesh)
    }

    pub fn num_dofs(&self) -> usize {
        self.grid.num_cells() * self.grid.even_dofs() * self.mesh.num_nodes()
    }

    fn map_cells<F>(&self, u: &EvenField, f: F) -> EvenField
    where
        F: Fn(usize, &[f64], &mut [f64]) + Sync,
    {
        let mut out = self.zero_field();
        let w = self.mesh.num_nodes() * self.grid.even_dofs();
        out.as_mut_slice()
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(n, dst)| f(n, u.cell(n), dst));
        out
    }

    /// Image of `u` under the block-diagonal form `b`.
    pub fn apply_b(&self, u: &EvenField) -> EvenField {
        self.map_cells(u, |n, src, dst| self.blocks[n].apply_into(src, dst))
    }

    /// Nodal values of the angular average `P u`.
    pub fn scalar_flux(&self, u: &EvenField) -> Vec<f64> {
        let nodes = self.mesh.num_nodes();
        let dofs = self.grid.even_dofs();
        let mut s = vec![0.0; nodes];
        // Cell-ordered accumulation keeps the reduction deterministic.
        for n in 0..self.grid.num_cells() {
            let m = &self.angular.cell(n).moments;
            let c = u.cell(n);
            for (j, sj) in s.iter_mut().enumerate() {
                let base = j * dofs;
                let mut v = 0.0;
                for l in 0..dofs {
                    v += m[l] * c[base + l];
                }
                *sj += 0.5 * v;
            }
        }
        s
    }

    /// Image of `u` under the scattering form `k(u, v) = (σ_s P u, v)`.
    pub fn apply_k(&self, u: &EvenField) -> EvenField {
        let t = self.mass_s.apply(&self.scalar_flux(u));
        self.spread_moments(&t)
    }

    /// Dual vector `v ↦ ∫ t(z) ∫ v dμ dz` for a nodal load `t`.
    fn spread_moments(&self, t: &[f64]) -> EvenField {
        let dofs = self.grid.even_dofs();
        let mut out = self.zero_field();
        let w = self.mesh.num_nodes() * dofs;
        out.as_mut_slice()
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(n, dst)| {
                let m = &self.angular.cell(n).moments;
                for (j, tj) in t.iter().enumerate() {
                    for l in 0..dofs {
                        dst[j * dofs + l] = m[l] * tj;
                    }
                }
            });
        out
    }

    pub fn apply_a(&self, u: &EvenField) -> EvenField {
        let mut out = self.apply_b(u);
        out.axpy(-1.0, &self.apply_k(u));
        out
    }

    pub fn a_form(&self, u: &EvenField, v: &EvenField) -> f64 {
        self.apply_a(u).dot(v)
    }

    pub fn b_form(&self, u: &EvenField, v: &EvenField) -> f64 {
        self.apply_b(u).dot(v)
    }

    pub fn k_form(&self, u: &EvenField, v: &EvenField) -> f64 {
        let su = self.scalar_flux(u);
        let sv = self.scalar_flux(v);
        2.0 * self.mass_s.quadratic(&su, &sv)
    }

    /// Solves `b(w, v) = rhs(v)` for all `v`, one angular cell at a time.
    pub fn transport_solve(&self, rhs: &EvenField) -> EvenField {
        let mut out = rhs.clone();
        let w = self.mesh.num_nodes() * self.grid.even_dofs();
        out.as_mut_slice()
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(n, x)| self.factors[n].solve_in_place(x));
        out
    }

    /// The field `w(z)`, constant in μ.
    pub fn prolong(&self, w: &[f64]) -> EvenField {
        assert_eq!(w.len(), self.mesh.num_nodes());
        let mut out = self.zero_field();
        for n in 0..self.grid.num_cells() {
            for (j, wj) in w.iter().enumerate() {
                out.set(n, 0, j, SQRT_2 * wj);
            }
        }
        out
    }

    /// Transpose of [`prolong`](Self::prolong) applied to a dual vector.
    pub fn restrict(&self, r: &EvenField) -> Vec<f64> {
        let mut y = vec![0.0; self.mesh.num_nodes()];
        for n in 0..self.grid.num_cells() {
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += SQRT_2 * r.get(n, 0, j);
            }
        }
        y
    }

    /// Solves `(Pᵀ A P) y = rhs` on the nodal space.
    pub fn dsa_solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.dsa_factor.solve(rhs)
    }

    /// Galerkin projection onto μ-independent fields of the error equation
    /// `a(e, v) = k(delta, v)`.
    pub fn dsa_correction(&self, delta: &EvenField) -> EvenField {
        let rhs = self.restrict(&self.apply_k(delta));
        self.prolong(&self.dsa_solve(&rhs))
    }

    /// Load vector `ℓ(v) = (q⁺, v) + 2⟨g, v⟩_inflow + (q⁻, σ_t⁻¹ μ∂_z v)`.
    pub fn assemble_load(&self, data: &ProblemData) -> EvenField {
        assemble_load(&self.grid, &self.mesh, &self.xs, data)
    }
}

/// Transport block of angular cell `n` with `(l fast, j slow)` ordering.
fn transport_block(
    angular: &AngularMatrices,
    n: usize,
    mass_t: &SymTridiagonal,
    stiffness: &SymTridiagonal,
) -> SymBanded {
    let c = angular.cell(n);
    let d = c.mass.nrows();
    let nodes = mass_t.dim();
    let mut block = SymBanded::zeros(nodes * d, 2 * d - 1);
    for j in 0..nodes {
        for l in 0..d {
            for lp in 0..=l {
                let diag = c.mu2[(l, lp)] * stiffness.diag[j] + c.mass[(l, lp)] * mass_t.diag[j];
                block.add(j * d + l, j * d + lp, diag);
                if j + 1 < nodes {
                    let off_l = c.mu2[(l, lp)] * stiffness.off[j] + c.mass[(l, lp)] * mass_t.off[j];
                    block.add((j + 1) * d + l, j * d + lp, off_l);
                    if l != lp {
                        let off_lp =
                            c.mu2[(lp, l)] * stiffness.off[j] + c.mass[(lp, l)] * mass_t.off[j];
                        block.add((j + 1) * d + lp, j * d + l, off_lp);
                    }
                }
            }
        }
    }
    for j in [0, nodes - 1] {
        for l in 0..d {
            for lp in 0..=l {
                block.add(j * d + l, j * d + lp, 2.0 * c.inflow[(l, lp)]);
            }
        }
    }
    block
}

/// `Pᵀ (B − K) P` with `P w = √2 w` on the `l = 0` coefficients.
fn galerkin_diffusion_matrix(
    blocks: &[SymBanded],
    angular: &AngularMatrices,
    mass_s: &SymTridiagonal,
) -> SymBanded {
    let nodes = mass_s.dim();
    let mut m = SymBanded::zeros(nodes, 1);
    for block in blocks {
        let d = block.dim() / nodes;
        for j in 0..nodes {
            m.add(j, j, 2.0 * block.get(j * d, j * d));
            if j + 1 < nodes {
                m.add(j + 1, j, 2.0 * block.get((j + 1) * d, j * d));
            }
        }
    }
    // Pᵀ K P = (Σ_n √2 m_n0) · (½ Σ_n √2 m_n0) · M_σs
    let moment: f64 = angular.cells().iter().map(|c| SQRT_2 * c.moments[0]).sum();
    let factor = moment * 0.5 * moment;
    for j in 0..nodes {
        m.add(j, j, -factor * mass_s.diag[j]);
        if j + 1 < nodes {
            m.add(j + 1, j, -factor * mass_s.off[j]);
        }
    }
    m
}

/// Load vector of `data`, integrated with `L + 4` Gauss points per angular
/// cell and 5 per element.
pub fn assemble_load(
    grid: &AngularGrid,
    mesh: &SpatialMesh,
    xs: &CrossSections,
    data: &ProblemData,
) -> EvenField {
    let dofs = grid.even_dofs();
    let nodes = mesh.num_nodes();
    let mu_rule = GaussLegendre::new(grid.degree() + LOAD_ANGULAR_EXTRA_POINTS);
    let z_rule = GaussLegendre::new(LOAD_SPATIAL_POINTS);
    let z_points: Vec<(usize, f64, f64, f64)> = (0..mesh.num_elements())
        .flat_map(|j| {
            let (a, b) = mesh.element(j);
            z_rule
                .on_interval(a, b)
                .map(|(z, w)| (j, z, w, xs.sigma_t(z)))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut load = EvenField::zeros(grid, mesh);
    load.as_mut_slice()
        .par_chunks_mut(nodes * dofs)
        .enumerate()
        .for_each(|(n, dst)| {
            let (lo, hi) = grid.cell(n);
            let mu_pts: Vec<(f64, f64, Vec<f64>)> = mu_rule
                .on_interval(lo, hi)
                .map(|(mu, w)| {
                    let q = (0..dofs).map(|l| grid.local_basis(n, l, mu)).collect();
                    (mu, w, q)
                })
                .collect();
            for &(j, z, wz, st) in &z_points {
                let (a, b) = mesh.element(j);
                let h = b - a;
                let right = (z - a) / h;
                let left = 1.0 - right;
                for (mu, wm, q) in &mu_pts {
                    // Even integrands over [-1, 1] are twice the half range.
                    let w = 2.0 * wz * wm;
                    let qe = (data.q_even)(z, *mu);
                    let qo = (data.q_odd)(z, *mu) * mu / (st * h);
                    for l in 0..dofs {
                        dst[j * dofs + l] += w * q[l] * (qe * left - qo);
                        dst[(j + 1) * dofs + l] += w * q[l] * (qe * right + qo);
                    }
                }
            }
            for (mu, wm, q) in &mu_pts {
                let g0 = (data.inflow_left)(*mu);
                let gz = (data.inflow_right)(-*mu);
                for l in 0..dofs {
                    dst[l] += 2.0 * wm * mu * g0 * q[l];
                    dst[(nodes - 1) * dofs + l] += 2.0 * wm * mu * gz * q[l];
                }
            }
        });
    load
}
