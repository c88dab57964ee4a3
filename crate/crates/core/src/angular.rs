//! Angular discretization: a partition of the half range `μ ∈ [0, 1]`,
//! reflected onto `[-1, 0]`, with a scaled Legendre basis on every cell.
//!
//! Cells are indexed from zero. The basis function of cell `n` and degree `l`
//! on `μ > 0` is
//!
//! ```text
//! Q_{n,l}(μ) = sqrt((2l+1)/2) · P_l(2(μ - μ_lo)/Δμ - 1)   for μ in cell n
//! ```
//!
//! and is extended evenly (`Q⁺`) or oddly (`Q⁻`) to `μ < 0`. With this
//! scaling the Gram matrix of a cell is `Δμ/2 · I` on the half range, so the
//! matrices below are always carried explicitly instead of assuming
//! orthonormality.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::legendre::legendre_eval;
use crate::quadrature::GaussLegendre;

/// Symmetry class of an angular basis function under `μ ↦ -μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Partition `0 = μ_0 < μ_1 < … < μ_N = 1` with a common polynomial degree.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    breakpoints: Vec<f64>,
    degree: usize,
}

impl AngularGrid {
    pub fn new(breakpoints: Vec<f64>, degree: usize) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidAngularGrid(
                "at least one cell is required".into(),
            ));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(Error::InvalidAngularGrid(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if let Some(i) = breakpoints
            .windows(2)
            .position(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(Error::InvalidAngularGrid(format!(
                "breakpoints not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self {
            breakpoints,
            degree,
        })
    }

    /// `n` cells of width `1/n`.
    pub fn uniform(n: usize, degree: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidAngularGrid(
                "at least one cell is required".into(),
            ));
        }
        let mut breakpoints: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        breakpoints[n] = 1.0;
        Self::new(breakpoints, degree)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn num_cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Polynomial degree `L` of the even basis. The odd basis uses `L + 1`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of even basis functions per cell, `L + 1`.
    pub fn even_dofs(&self) -> usize {
        self.degree + 1
    }

    /// Number of odd basis functions per cell, `L + 2`.
    pub fn odd_dofs(&self) -> usize {
        self.degree + 2
    }

    pub fn cell(&self, n: usize) -> (f64, f64) {
        (self.breakpoints[n], self.breakpoints[n + 1])
    }

    pub fn width(&self, n: usize) -> f64 {
        self.breakpoints[n + 1] - self.breakpoints[n]
    }

    pub fn midpoint(&self, n: usize) -> f64 {
        0.5 * (self.breakpoints[n + 1] + self.breakpoints[n])
    }

    /// Cell containing `|μ|`; cells are half-open except the last one.
    pub fn locate(&self, mu: f64) -> usize {
        let a = mu.abs();
        let idx = self.breakpoints.partition_point(|&b| b <= a);
        idx.saturating_sub(1).min(self.num_cells() - 1)
    }

    /// Basis function of cell `n` and degree `l` on the positive half range,
    /// evaluated at a point known to lie in the cell.
    pub(crate) fn local_basis(&self, n: usize, l: usize, mu_abs: f64) -> f64 {
        let (lo, _) = self.cell(n);
        let t = 2.0 * (mu_abs - lo) / self.width(n) - 1.0;
        (((2 * l + 1) as f64) / 2.0).sqrt() * legendre_eval(l, t)
    }

    /// Evaluates `Q^±_{n,l}(μ)`; zero outside cell `n` and its reflection.
    ///
    /// Panics when `n` or `l` is out of range for the requested parity.
    pub fn basis_eval(&self, n: usize, l: usize, parity: Parity, mu: f64) -> f64 {
        assert!(n < self.num_cells(), "cell index {n} out of range");
        let max_l = match parity {
            Parity::Even => self.degree,
            Parity::Odd => self.degree + 1,
        };
        assert!(l <= max_l, "degree {l} exceeds {max_l} for {parity:?} basis");
        if self.locate(mu) != n {
            return 0.0;
        }
        let value = self.local_basis(n, l, mu.abs());
        match parity {
            Parity::Odd if mu < 0.0 => -value,
            _ => value,
        }
    }

    /// Gauss rule with enough points for polynomial integrands of degree
    /// `2L + 2` on one cell.
    pub(crate) fn cell_rule(&self) -> GaussLegendre {
        GaussLegendre::new(self.degree + 2)
    }
}

/// Exact angular integrals of the even basis on every cell.
#[derive(Debug, Clone)]
pub struct CellMatrices {
    /// `∫_{-1}^{1} Q⁺_l Q⁺_l' dμ`
    pub mass: DMatrix<f64>,
    /// `∫_{-1}^{1} μ² Q⁺_l Q⁺_l' dμ`
    pub mu2: DMatrix<f64>,
    /// `∫_0^1 μ Q_l Q_l' dμ`, the inflow weight at one boundary.
    pub inflow: DMatrix<f64>,
    /// `∫_{-1}^{1} Q⁺_l dμ`
    pub moments: DVector<f64>,
    /// `∫_{-1}^{1} Q⁻_l Q⁻_l' dμ` for the odd basis of degree `L + 1`.
    pub odd_mass: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct AngularMatrices {
    cells: Vec<CellMatrices>,
}

impl AngularMatrices {
    pub fn cell(&self, n: usize) -> &CellMatrices {
        &self.cells[n]
    }

    pub fn cells(&self) -> &[CellMatrices] {
        &self.cells
    }
}

/// Assembles mass, μ²-weighted, inflow and moment integrals cell by cell with
/// an `L + 2` point Gauss rule (`L + 3` for the odd mass).
pub fn angular_matrices(grid: &AngularGrid) -> AngularMatrices {
    let dofs = grid.even_dofs();
    let rule = grid.cell_rule();
    let odd_rule = GaussLegendre::new(grid.degree() + 3);
    let cells = (0..grid.num_cells())
        .map(|n| {
            let (lo, hi) = grid.cell(n);
            let mut mass = DMatrix::zeros(dofs, dofs);
            let mut mu2 = DMatrix::zeros(dofs, dofs);
            let mut inflow = DMatrix::zeros(dofs, dofs);
            let mut moments = DVector::zeros(dofs);
            for (mu, w) in rule.on_interval(lo, hi) {
                let q: Vec<f64> = (0..dofs).map(|l| grid.local_basis(n, l, mu)).collect();
                for a in 0..dofs {
                    // Both half ranges contribute equally for even products.
                    moments[a] += 2.0 * w * q[a];
                    for b in 0..dofs {
                        let qq = w * q[a] * q[b];
                        mass[(a, b)] += 2.0 * qq;
                        mu2[(a, b)] += 2.0 * mu * mu * qq;
                        inflow[(a, b)] += mu * qq;
                    }
                }
            }
            let odd = grid.odd_dofs();
            let mut odd_mass = DMatrix::zeros(odd, odd);
            for (mu, w) in odd_rule.on_interval(lo, hi) {
                let q: Vec<f64> = (0..odd).map(|l| grid.local_basis(n, l, mu)).collect();
                for a in 0..odd {
                    for b in 0..odd {
                        odd_mass[(a, b)] += 2.0 * w * q[a] * q[b];
                    }
                }
            }
            CellMatrices {
                mass,
                mu2,
                inflow,
                moments,
                odd_mass,
            }
        })
        .collect();
    AngularMatrices { cells }
}
