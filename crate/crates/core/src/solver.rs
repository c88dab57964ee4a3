//! Source iteration with optional diffusion synthetic acceleration.
//!
//! One sweep computes the half step `b(u^{k+½}, v) = k(u^k, v) + ℓ(v)` by
//! independent per-cell solves, then (with DSA) adds the Galerkin projection
//! of the half-step error onto μ-independent fields. Both pieces contract
//! the error in the energy norm by at least `c = max σ_s/σ_t`.

use crate::assembly::{DiscreteSystem, EvenField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    Dsa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once `‖u^k − u^{k−1}‖_a ≤ tolerance`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub preconditioner: Preconditioner,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 500,
            preconditioner: Preconditioner::Dsa,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Precondition(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Precondition("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    /// `‖u^k − u^{k−1}‖_a` for `k = 1, 2, …`
    pub increments: Vec<f64>,
    /// Ratios of successive increments.
    pub rates: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `max σ_s/σ_t`, the proven per-iteration contraction.
    pub contraction_bound: f64,
}

impl IterationReport {
    pub fn final_increment(&self) -> Option<f64> {
        self.increments.last().copied()
    }

    pub fn max_rate(&self) -> Option<f64> {
        self.rates.iter().copied().reduce(f64::max)
    }

    /// `increment · rate / (1 − rate)` from the last observed rate; an
    /// a-posteriori error estimate, not used for stopping.
    pub fn error_estimate(&self) -> Option<f64> {
        let inc = self.final_increment()?;
        let rate = *self.rates.last()?;
        (rate < 1.0).then(|| inc * rate / (1.0 - rate))
    }
}

/// Half step and corrected iterate of one sweep.
#[derive(Debug, Clone)]
pub struct Step {
    pub half: EvenField,
    pub next: EvenField,
}

/// One sweep from `u`: transport solve, then the optional DSA update.
pub fn iteration_step(
    system: &DiscreteSystem,
    load: &EvenField,
    u: &EvenField,
    preconditioner: Preconditioner,
) -> Step {
    let mut rhs = system.apply_k(u);
    rhs.axpy(1.0, load);
    let half = system.transport_solve(&rhs);
    let next = match preconditioner {
        Preconditioner::None => half.clone(),
        Preconditioner::Dsa => half.add(&system.dsa_correction(&half.sub(u))),
    };
    Step { half, next }
}

/// Energy norm `a(u, u)^{1/2}`.
pub fn a_norm(system: &DiscreteSystem, u: &EvenField) -> Result<f64> {
    let e = system.a_form(u, u);
    let scale = u.dot(u);
    if e < -1e-13 * scale {
        return Err(Error::NegativeEnergy { value: e });
    }
    Ok(e.max(0.0).sqrt())
}

/// Runs the iteration from `initial` until the energy-norm increment drops
/// below the tolerance or the iteration budget is spent.
///
/// Running out of iterations is reported through `converged = false`.
pub fn source_iteration(
    system: &DiscreteSystem,
    load: &EvenField,
    config: &SolverConfig,
    initial: EvenField,
) -> Result<(EvenField, IterationReport)> {
    config.validate()?;
    let mut u = initial;
    let mut report = IterationReport {
        increments: Vec::new(),
        rates: Vec::new(),
        iterations: 0,
        converged: false,
        contraction_bound: system.contraction_bound(),
    };
    for _ in 0..config.max_iterations {
        let Step { next, .. } = iteration_step(system, load, &u, config.preconditioner);
        let increment = a_norm(system, &next.sub(&u))?;
        if let Some(&prev) = report.increments.last() {
            report.rates.push(if prev > 0.0 { increment / prev } else { 0.0 });
        }
        report.increments.push(increment);
        report.iterations += 1;
        u = next;
        if increment <= config.tolerance {
            report.converged = true;
            break;
        }
    }
    Ok((u, report))
}
