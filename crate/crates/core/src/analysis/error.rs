//! Error and data norms evaluated by tensor Gauss quadrature.

use rayon::prelude::*;

use crate::angular::AngularGrid;
use crate::assembly::{DiscreteSystem, EvenField, OddField, ProblemData};
use crate::quadrature::GaussLegendre;
use crate::spatial::SpatialMesh;

/// Gauss points per angular cell and per element for error integrals.
pub const ERROR_QUADRATURE_POINTS: usize = 6;

/// `‖φ − (u_h + φ_h⁻)‖_{L²((0,Z)×(−1,1))}`.
pub fn l2_error<F>(
    grid: &AngularGrid,
    mesh: &SpatialMesh,
    u_h: &EvenField,
    odd_h: &OddField,
    exact: F,
) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let rule = GaussLegendre::new(ERROR_QUADRATURE_POINTS);
    let even = grid.even_dofs();
    let odd = grid.odd_dofs();
    let per_cell: Vec<f64> = (0..grid.num_cells())
        .into_par_iter()
        .map(|n| {
            let (lo, hi) = grid.cell(n);
            let mu_pts: Vec<(f64, f64, Vec<f64>)> = rule
                .on_interval(lo, hi)
                .map(|(mu, w)| (mu, w, (0..odd).map(|l| grid.local_basis(n, l, mu)).collect()))
                .collect();
            let mut sum = 0.0;
            for j in 0..mesh.num_elements() {
                let (a, b) = mesh.element(j);
                let odd_val: Vec<f64> = mu_pts
                    .iter()
                    .map(|(_, _, q)| (0..odd).map(|l| odd_h.get(n, l, j) * q[l]).sum())
                    .collect();
                for (z, wz) in rule.on_interval(a, b) {
                    let right = (z - a) / (b - a);
                    let left = 1.0 - right;
                    for ((mu, wm, q), po) in mu_pts.iter().zip(&odd_val) {
                        let pe: f64 = (0..even)
                            .map(|l| (left * u_h.get(n, l, j) + right * u_h.get(n, l, j + 1)) * q[l])
                            .sum();
                        let ep = exact(z, *mu) - pe - po;
                        let em = exact(z, -*mu) - pe + po;
                        sum += wz * wm * (ep * ep + em * em);
                    }
                }
            }
            sum
        })
        .collect();
    per_cell.iter().sum::<f64>().sqrt()
}

/// `(‖q⁺‖²_{1/σ_a} + ‖q⁻‖²_{1/σ_t} + 2‖g‖²_inflow)^{1/2}`, the a-priori
/// bound on the energy norm of the discrete solution.
pub fn data_norm_bound(system: &DiscreteSystem, data: &ProblemData) -> f64 {
    let grid = system.grid();
    let mesh = system.mesh();
    let xs = system.cross_sections();
    let rule = GaussLegendre::new(ERROR_QUADRATURE_POINTS);
    let per_cell: Vec<f64> = (0..grid.num_cells())
        .into_par_iter()
        .map(|n| {
            let (lo, hi) = grid.cell(n);
            let mut sum = 0.0;
            for (mu, wm) in rule.on_interval(lo, hi) {
                for j in 0..mesh.num_elements() {
                    let (a, b) = mesh.element(j);
                    for (z, wz) in rule.on_interval(a, b) {
                        let st = xs.sigma_t(z);
                        let sa = xs.sigma_a(z);
                        let qe = (data.q_even)(z, mu);
                        let qo = (data.q_odd)(z, mu);
                        sum += 2.0 * wz * wm * (qe * qe / sa + qo * qo / st);
                    }
                }
                let g0 = (data.inflow_left)(mu);
                let gz = (data.inflow_right)(-mu);
                sum += 2.0 * wm * mu * (g0 * g0 + gz * gz);
            }
            sum
        })
        .collect();
    per_cell.iter().sum::<f64>().sqrt()
}

/// Energy norm of `u − u_h` for an exact even field `u` given with its
/// z-derivative, by quadrature of the continuous form.
pub fn energy_error<U, D>(system: &DiscreteSystem, u_h: &EvenField, exact: U, exact_dz: D) -> f64
where
    U: Fn(f64, f64) -> f64 + Sync,
    D: Fn(f64, f64) -> f64 + Sync,
{
    let grid = system.grid();
    let mesh = system.mesh();
    let xs = system.cross_sections();
    let rule = GaussLegendre::new(ERROR_QUADRATURE_POINTS);
    let even = grid.even_dofs();
    let per_element: Vec<f64> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|j| {
            let (a, b) = mesh.element(j);
            let h = b - a;
            let mut sum = 0.0;
            for (z, wz) in rule.on_interval(a, b) {
                let right = (z - a) / h;
                let left = 1.0 - right;
                let (st, ss) = (xs.sigma_t(z), xs.sigma_s(z));
                let mut avg = 0.0;
                for n in 0..grid.num_cells() {
                    let (lo, hi) = grid.cell(n);
                    for (mu, wm) in rule.on_interval(lo, hi) {
                        let (mut v, mut dv) = (0.0, 0.0);
                        for l in 0..even {
                            let q = grid.local_basis(n, l, mu);
                            let (c0, c1) = (u_h.get(n, l, j), u_h.get(n, l, j + 1));
                            v += (left * c0 + right * c1) * q;
                            dv += (c1 - c0) / h * q;
                        }
                        let e = exact(z, mu) - v;
                        let de = exact_dz(z, mu) - dv;
                        sum += 2.0 * wz * wm * (mu * mu * de * de / st + st * e * e);
                        avg += wm * e;
                    }
                }
                // Scattering: (σ_s P e, e) = 2 ∫ σ_s (Pe)², with Pe = ∫_0^1 e dμ.
                sum -= 2.0 * wz * ss * avg * avg;
            }
            if j == 0 || j + 1 == mesh.num_elements() {
                for (zb, node) in [(a, j), (b, j + 1)] {
                    if node != 0 && node != mesh.num_elements() {
                        continue;
                    }
                    for n in 0..grid.num_cells() {
                        let (lo, hi) = grid.cell(n);
                        for (mu, wm) in rule.on_interval(lo, hi) {
                            let v: f64 = (0..even)
                                .map(|l| u_h.get(n, l, node) * grid.local_basis(n, l, mu))
                                .sum();
                            let e = exact(zb, mu) - v;
                            sum += 2.0 * wm * mu * e * e;
                        }
                    }
                }
            }
            sum
        })
        .collect();
    per_element.iter().sum::<f64>().max(0.0).sqrt()
}
