//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the library's quadrature or assembly. Gauss rules come
//! from the Golub-Welsch eigenvalue construction, forms are integrated
//! pointwise from `basis_eval` and hat functions.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use slab_transport::angular::Parity;
use slab_transport::prelude::*;

/// Gauss-Legendre nodes and weights on `[-1, 1]` via Golub-Welsch.
pub fn gauss(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `(x, w)` pairs of an `n`-point rule mapped to `[a, b]`.
pub fn rule_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss(n);
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(&w).map(|(x, w)| (m + r * x, r * w)).collect()
}

pub fn integrate(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    rule_on(n, a, b).iter().map(|&(x, w)| w * f(x)).sum()
}

/// Hat function of node `i` and its derivative.
pub fn hat(mesh: &SpatialMesh, i: usize, z: f64) -> (f64, f64) {
    let nodes = mesh.nodes();
    if i > 0 && z >= nodes[i - 1] && z <= nodes[i] {
        let h = nodes[i] - nodes[i - 1];
        return ((z - nodes[i - 1]) / h, 1.0 / h);
    }
    if i + 1 < nodes.len() && z >= nodes[i] && z <= nodes[i + 1] {
        let h = nodes[i + 1] - nodes[i];
        return ((nodes[i + 1] - z) / h, -1.0 / h);
    }
    (0.0, 0.0)
}

/// Dense matrices of the forms `a`, `b`, `k` in the `EvenField` ordering.
pub struct DenseForms {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub k: DMatrix<f64>,
}

/// Unknown `(n, l, j)` in the `EvenField` layout.
pub fn dof(grid: &AngularGrid, mesh: &SpatialMesh, n: usize, l: usize, j: usize) -> usize {
    (n * mesh.num_nodes() + j) * grid.even_dofs() + l
}

/// Brute-force assembly by tensor quadrature on every angular cell (both
/// half ranges) and spatial element, element by element.
pub fn dense_forms(grid: &AngularGrid, mesh: &SpatialMesh, xs: &CrossSections) -> DenseForms {
    let dofs = grid.even_dofs();
    let size = grid.num_cells() * dofs * mesh.num_nodes();
    let mut b = DMatrix::zeros(size, size);
    let mut k = DMatrix::zeros(size, size);
    let q_mu = grid.degree() + 4;

    // Angular moments ∫_{-1}^1 Q⁺ dμ and the integrals entering b.
    let mut moments = vec![vec![0.0; dofs]; grid.num_cells()];
    for n in 0..grid.num_cells() {
        let (lo, hi) = grid.cell(n);
        for &(s_lo, s_hi) in &[(lo, hi), (-hi, -lo)] {
            for (mu, w) in rule_on(q_mu, s_lo, s_hi) {
                for l in 0..dofs {
                    moments[n][l] += w * grid.basis_eval(n, l, Parity::Even, mu);
                }
            }
        }
    }

    for e in 0..mesh.num_elements() {
        let (za, zb) = mesh.element(e);
        for (z, wz) in rule_on(6, za, zb) {
            let st = xs.sigma_t(z);
            let ss = xs.sigma_s(z);
            let local = [e, e + 1];
            for n in 0..grid.num_cells() {
                let (lo, hi) = grid.cell(n);
                for &(s_lo, s_hi) in &[(lo, hi), (-hi, -lo)] {
                    for (mu, wm) in rule_on(q_mu, s_lo, s_hi) {
                        for &i in &local {
                            let (hi_v, hi_d) = hat(mesh, i, z);
                            for &jn in &local {
                                let (hj_v, hj_d) = hat(mesh, jn, z);
                                for l in 0..dofs {
                                    let ql = grid.basis_eval(n, l, Parity::Even, mu);
                                    for lp in 0..dofs {
                                        let qp = grid.basis_eval(n, lp, Parity::Even, mu);
                                        let v = wz
                                            * wm
                                            * ql
                                            * qp
                                            * (mu * mu / st * hi_d * hj_d + st * hi_v * hj_v);
                                        b[(dof(grid, mesh, n, l, i), dof(grid, mesh, n, lp, jn))] += v;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            // k(u, v) = ∫ σ_s (½ ∫ u dμ)(∫ v dμ) dz
            for &i in &local {
                let (hi_v, _) = hat(mesh, i, z);
                for &jn in &local {
                    let (hj_v, _) = hat(mesh, jn, z);
                    let s = wz * ss * hi_v * hj_v * 0.5;
                    for n in 0..grid.num_cells() {
                        for np in 0..grid.num_cells() {
                            for l in 0..dofs {
                                for lp in 0..dofs {
                                    k[(dof(grid, mesh, n, l, i), dof(grid, mesh, np, lp, jn))] +=
                                        s * moments[n][l] * moments[np][lp];
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // 2⟨u, v⟩ over the inflow boundary: μ > 0 at z = 0, μ < 0 at z = Z.
    let last = mesh.num_nodes() - 1;
    for n in 0..grid.num_cells() {
        let (lo, hi) = grid.cell(n);
        for (node, s_lo, s_hi) in [(0, lo, hi), (last, -hi, -lo)] {
            for (mu, wm) in rule_on(q_mu, s_lo, s_hi) {
                for l in 0..dofs {
                    for lp in 0..dofs {
                        let v = 2.0
                            * wm
                            * mu.abs()
                            * grid.basis_eval(n, l, Parity::Even, mu)
                            * grid.basis_eval(n, lp, Parity::Even, mu);
                        b[(dof(grid, mesh, n, l, node), dof(grid, mesh, n, lp, node))] += v;
                    }
                }
            }
        }
    }
    let a = &b - &k;
    DenseForms { a, b, k }
}

/// Dense matrix of the library's `a` operator, column by column.
pub fn operator_matrix(system: &DiscreteSystem, apply: impl Fn(&EvenField) -> EvenField) -> DMatrix<f64> {
    let size = system.num_dofs();
    let mut m = DMatrix::zeros(size, size);
    let mut e = system.zero_field();
    for c in 0..size {
        e.as_mut_slice()[c] = 1.0;
        let col = apply(&e);
        m.set_column(c, &DVector::from_column_slice(col.as_slice()));
        e.as_mut_slice()[c] = 0.0;
    }
    m
}

/// `u_h` with `a(u_h, v) = ℓ(v)` by a dense Cholesky solve of the library's
/// own operator.
pub fn direct_solve(system: &DiscreteSystem, load: &EvenField) -> EvenField {
    let a = operator_matrix(system, |e| system.apply_a(e));
    let sym = (&a + a.transpose()) * 0.5;
    let x = sym
        .cholesky()
        .expect("a is positive definite")
        .solve(&DVector::from_column_slice(load.as_slice()));
    EvenField::from_vec(system.grid(), system.mesh(), x.as_slice().to_vec()).unwrap()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_field(system: &DiscreteSystem, rng: &mut StdRng) -> EvenField {
    let mut f = system.zero_field();
    f.as_mut_slice()
        .iter_mut()
        .for_each(|v| *v = rng.random_range(-1.0..1.0));
    f
}

pub fn random_nodal(system: &DiscreteSystem, rng: &mut StdRng) -> Vec<f64> {
    (0..system.mesh().num_nodes())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect()
}

/// Random piecewise-constant cross sections satisfying the absorption bound,
/// on a random number of pieces of `(0, 1)`.
pub fn random_cross_sections(rng: &mut StdRng) -> CrossSections {
    let pieces = rng.random_range(1..=4);
    let mut breaks: Vec<f64> = (0..pieces - 1).map(|_| rng.random_range(0.05..0.95)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut bp = vec![0.0];
    bp.extend(breaks);
    bp.push(1.0);
    let m = bp.len() - 1;
    let sa: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..2.0)).collect();
    let ss: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..20.0)).collect();
    CrossSections::from_absorption(
        Coefficient::piecewise(bp.clone(), sa).unwrap(),
        Coefficient::piecewise(bp, ss).unwrap(),
    )
}

/// Random nonuniform spatial mesh of `(0, 1)` with `j` elements.
pub fn random_mesh(j: usize, rng: &mut StdRng) -> SpatialMesh {
    let widths: Vec<f64> = (0..j).map(|_| rng.random_range(0.3..1.0)).collect();
    let total: f64 = widths.iter().sum();
    let mut nodes = vec![0.0];
    let mut acc = 0.0;
    for w in &widths[..j - 1] {
        acc += w / total;
        nodes.push(acc);
    }
    nodes.push(1.0);
    SpatialMesh::new(nodes).unwrap()
}

/// Random angular grid of `n` cells and degree `degree`.
pub fn random_grid(n: usize, degree: usize, rng: &mut StdRng) -> AngularGrid {
    let widths: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.0)).collect();
    let total: f64 = widths.iter().sum();
    let mut bp = vec![0.0];
    let mut acc = 0.0;
    for w in &widths[..n - 1] {
        acc += w / total;
        bp.push(acc);
    }
    bp.push(1.0);
    AngularGrid::new(bp, degree).unwrap()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Largest entrywise difference relative to the largest entry of `b`.
pub fn relative_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    max_abs_diff(a, b) / b.abs().max()
}
