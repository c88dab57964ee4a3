//! Manufactured solution `φ(z, μ) = |μ| e^{−μ} e^{−z(1−z)}` on the unit slab
//! with `σ_a = 1/100` and `σ_s(z) = 2 + sin(πz)/2`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::assembly::ProblemData;
use crate::spatial::{Coefficient, CrossSections};

pub const MANUFACTURED_SIGMA_A: f64 = 0.01;
pub const MANUFACTURED_LENGTH: f64 = 1.0;

fn spatial_factor(z: f64) -> f64 {
    (-z * (1.0 - z)).exp()
}

fn spatial_factor_dz(z: f64) -> f64 {
    (2.0 * z - 1.0) * spatial_factor(z)
}

fn sigma_s(z: f64) -> f64 {
    2.0 + 0.5 * (PI * z).sin()
}

/// Closed-form evaluators and derived data of the manufactured problem.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub cross_sections: CrossSections,
    pub data: ProblemData,
}

/// `½ ∫_{-1}^{1} |μ| e^{−μ} dμ`
pub fn angular_average_factor() -> f64 {
    1.0 - (-1.0f64).exp()
}

impl ManufacturedCase {
    pub fn new() -> Self {
        let cross_sections = CrossSections::from_absorption(
            Coefficient::Constant(MANUFACTURED_SIGMA_A),
            Coefficient::function(sigma_s),
        );
        let data = ProblemData {
            q_even: Arc::new(|z, mu| {
                let st = MANUFACTURED_SIGMA_A + sigma_s(z);
                mu * Self::odd_dz(z, mu) + st * Self::even(z, mu) - sigma_s(z) * Self::scalar(z)
            }),
            q_odd: Arc::new(|z, mu| {
                let st = MANUFACTURED_SIGMA_A + sigma_s(z);
                mu * Self::even_dz(z, mu) + st * Self::odd(z, mu)
            }),
            inflow_left: Arc::new(|mu| Self::exact(0.0, mu)),
            inflow_right: Arc::new(|mu| Self::exact(MANUFACTURED_LENGTH, mu)),
        };
        Self {
            cross_sections,
            data,
        }
    }

    /// Diffusive scaling `σ_s/δ`, `δ σ_a`, `δ q` with unchanged inflow.
    ///
    /// The scaled problem no longer has [`Self::exact`] as its solution.
    pub fn diffusion_scaled(delta: f64) -> Self {
        let base = Self::new();
        let cross_sections = CrossSections::from_absorption(
            Coefficient::Constant(delta * MANUFACTURED_SIGMA_A),
            base.cross_sections.sigma_s.scaled(1.0 / delta),
        );
        let (qe, qo) = (base.data.q_even.clone(), base.data.q_odd.clone());
        let data = ProblemData {
            q_even: Arc::new(move |z, mu| delta * qe(z, mu)),
            q_odd: Arc::new(move |z, mu| delta * qo(z, mu)),
            ..base.data
        };
        Self {
            cross_sections,
            data,
        }
    }

    pub fn exact(z: f64, mu: f64) -> f64 {
        mu.abs() * (-mu).exp() * spatial_factor(z)
    }

    pub fn even(z: f64, mu: f64) -> f64 {
        mu.abs() * mu.cosh() * spatial_factor(z)
    }

    pub fn odd(z: f64, mu: f64) -> f64 {
        -mu.abs() * mu.sinh() * spatial_factor(z)
    }

    pub fn even_dz(z: f64, mu: f64) -> f64 {
        mu.abs() * mu.cosh() * spatial_factor_dz(z)
    }

    pub fn odd_dz(z: f64, mu: f64) -> f64 {
        -mu.abs() * mu.sinh() * spatial_factor_dz(z)
    }

    /// Angular average `Pφ(z)`.
    pub fn scalar(z: f64) -> f64 {
        angular_average_factor() * spatial_factor(z)
    }

    /// Strong residual `μ∂_zφ + σ_tφ − σ_s Pφ − q` at a point.
    pub fn residual(&self, z: f64, mu: f64) -> f64 {
        let phi_dz = Self::even_dz(z, mu) + Self::odd_dz(z, mu);
        let q = (self.data.q_even)(z, mu) + (self.data.q_odd)(z, mu);
        mu * phi_dz + self.cross_sections.sigma_t(z) * Self::exact(z, mu)
            - self.cross_sections.sigma_s(z) * Self::scalar(z)
            - q
    }
}

impl Default for ManufacturedCase {
    fn default() -> Self {
        Self::new()
    }
}

/// The manufactured problem: cross sections, data and exact evaluators.
pub fn manufactured_data() -> ManufacturedCase {
    ManufacturedCase::new()
}
