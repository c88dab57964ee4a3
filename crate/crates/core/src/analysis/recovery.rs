//! Odd-parity reconstruction `φ_h⁻` from the even solution.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::assembly::{DiscreteSystem, EvenField, OddField, PhaseSpaceFn};
use crate::quadrature::GaussLegendre;

const ANGULAR_EXTRA_POINTS: usize = 4;
const SPATIAL_POINTS: usize = 5;

/// L²-projection of `σ_t⁻¹ (q⁻ − μ ∂_z u_h)` onto fields of degree `L + 1`
/// in μ that are constant on every spatial element.
pub fn recover_odd(system: &DiscreteSystem, u_h: &EvenField, q_odd: &PhaseSpaceFn) -> OddField {
    let grid = system.grid();
    let mesh = system.mesh();
    let xs = system.cross_sections();
    let even = grid.even_dofs();
    let odd = grid.odd_dofs();
    let mu_rule = GaussLegendre::new(grid.degree() + ANGULAR_EXTRA_POINTS);
    let z_rule = GaussLegendre::new(SPATIAL_POINTS);

    let mut out = OddField::zeros(grid, mesh);
    out.cells_mut().enumerate().for_each(|(n, dst)| {
        let (lo, hi) = grid.cell(n);
        let gram = system.angular().cell(n).odd_mass.clone().cholesky().expect("odd Gram matrix is SPD");
        let mu_pts: Vec<(f64, f64, Vec<f64>)> = mu_rule
            .on_interval(lo, hi)
            .map(|(mu, w)| (mu, w, (0..odd).map(|l| grid.local_basis(n, l, mu)).collect()))
            .collect();
        for j in 0..mesh.num_elements() {
            let (a, b) = mesh.element(j);
            let h = b - a;
            let slope: Vec<f64> = (0..even)
                .map(|l| (u_h.get(n, l, j + 1) - u_h.get(n, l, j)) / h)
                .collect();
            let mut rhs = DVector::zeros(odd);
            for (z, wz) in z_rule.on_interval(a, b) {
                let st = xs.sigma_t(z);
                for (mu, wm, q) in &mu_pts {
                    let du: f64 = (0..even).map(|l| slope[l] * q[l]).sum();
                    let f = (q_odd(z, *mu) - mu * du) / st;
                    for l in 0..odd {
                        rhs[l] += 2.0 * wz * wm * f * q[l];
                    }
                }
            }
            let c = gram.solve(&(rhs / h));
            dst[j * odd..(j + 1) * odd].copy_from_slice(c.as_slice());
        }
    });
    out
}
