//! Decomposition of the transport energy `b(e, e)`.

use crate::assembly::{DiscreteSystem, EvenField};
use crate::spatial::SymTridiagonal;

/// The four non-negative parts of `b(e, e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormDecomposition {
    /// `‖P e‖²_{σ_t}`
    pub projected: f64,
    /// `‖(I − P) e‖²_{σ_t}`
    pub fluctuation: f64,
    /// `2 ‖e‖²` over the inflow boundary, as it enters `b`.
    pub boundary: f64,
    /// `‖μ ∂_z e‖²_{1/σ_t}`
    pub streaming: f64,
}

impl NormDecomposition {
    pub fn total(&self) -> f64 {
        self.projected + self.fluctuation + self.boundary + self.streaming
    }

    /// Everything except the angular average.
    pub fn smoothed(&self) -> f64 {
        self.fluctuation + self.boundary + self.streaming
    }
}

/// `Σ_n cᵀ (A_n ⊗ S) c` for per-cell angular matrices `A_n`.
fn kron_quadratic(
    system: &DiscreteSystem,
    e: &EvenField,
    angular: impl Fn(usize) -> nalgebra::DMatrix<f64>,
    spatial: &SymTridiagonal,
) -> f64 {
    let dofs = system.grid().even_dofs();
    let nodes = system.mesh().num_nodes();
    let mut total = 0.0;
    for n in 0..system.grid().num_cells() {
        let a = angular(n);
        for l in 0..dofs {
            for lp in 0..dofs {
                if a[(l, lp)] == 0.0 {
                    continue;
                }
                let x: Vec<f64> = (0..nodes).map(|j| e.get(n, l, j)).collect();
                let y: Vec<f64> = (0..nodes).map(|j| e.get(n, lp, j)).collect();
                total += a[(l, lp)] * spatial.quadratic(&y, &x);
            }
        }
    }
    total
}

pub fn norm_decomposition(system: &DiscreteSystem, e: &EvenField) -> NormDecomposition {
    let s = system.scalar_flux(e);
    let projected = 2.0 * system.mass_sigma_t().quadratic(&s, &s);
    let rest = e.sub(&system.prolong(&s));
    let ang = system.angular();
    let fluctuation = kron_quadratic(system, &rest, |n| ang.cell(n).mass.clone(), system.mass_sigma_t());
    let streaming = kron_quadratic(
        system,
        e,
        |n| ang.cell(n).mu2.clone(),
        system.stiffness_inv_sigma_t(),
    );
    let dofs = system.grid().even_dofs();
    let last = system.mesh().num_nodes() - 1;
    let mut boundary = 0.0;
    for n in 0..system.grid().num_cells() {
        let b = &ang.cell(n).inflow;
        for node in [0, last] {
            for l in 0..dofs {
                for lp in 0..dofs {
                    boundary += 2.0 * b[(l, lp)] * e.get(n, l, node) * e.get(n, lp, node);
                }
            }
        }
    }
    NormDecomposition {
        projected,
        fluctuation,
        boundary,
        streaming,
    }
}
