//! Spatial mesh of the slab `(0, Z)`, coefficient functions, and the
//! piecewise-linear mass and stiffness matrices.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Gauss points per element used for coefficient-weighted matrices.
pub const ELEMENT_QUADRATURE_POINTS: usize = 3;

/// Conforming mesh `0 = z_0 < z_1 < … < z_J = Z` with hat functions.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialMesh {
    nodes: Vec<f64>,
}

impl SpatialMesh {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh("at least one element is required".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidMesh("first node must be 0".into()));
        }
        if let Some(i) = nodes
            .windows(2)
            .position(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(Error::InvalidMesh(format!(
                "nodes not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self { nodes })
    }

    pub fn uniform(elements: usize, length: f64) -> Result<Self> {
        if elements == 0 {
            return Err(Error::InvalidMesh("at least one element is required".into()));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidMesh(format!("invalid slab length {length}")));
        }
        let mut nodes: Vec<f64> = (0..=elements)
            .map(|i| length * i as f64 / elements as f64)
            .collect();
        nodes[elements] = length;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn num_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Slab thickness `Z`.
    pub fn length(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn element(&self, j: usize) -> (f64, f64) {
        (self.nodes[j], self.nodes[j + 1])
    }

    pub fn element_length(&self, j: usize) -> f64 {
        self.nodes[j + 1] - self.nodes[j]
    }

    /// Element containing `z`; elements are half-open except the last one.
    pub fn locate(&self, z: f64) -> usize {
        let idx = self.nodes.partition_point(|&b| b <= z);
        idx.saturating_sub(1).min(self.num_elements() - 1)
    }

    /// Quadrature points `(element, z, weight)` of an `n`-point Gauss rule.
    pub(crate) fn quadrature(&self, points: usize) -> Vec<(usize, f64, f64)> {
        let rule = GaussLegendre::new(points);
        (0..self.num_elements())
            .flat_map(|j| {
                let (a, b) = self.element(j);
                rule.on_interval(a, b)
                    .map(move |(z, w)| (j, z, w))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

/// A spatially varying, μ-independent coefficient.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    /// Piecewise constant: `values[i]` on `[breakpoints[i], breakpoints[i+1])`.
    Piecewise {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            Self::Piecewise {
                breakpoints,
                values,
            } => f
                .debug_struct("Piecewise")
                .field("breakpoints", breakpoints)
                .field("values", values)
                .finish(),
            Self::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl Coefficient {
    pub fn function<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self::Function(Arc::new(f))
    }

    pub fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::InvalidCoefficient(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidCoefficient(
                "piecewise breakpoints must increase".into(),
            ));
        }
        Ok(Self::Piecewise {
            breakpoints,
            values,
        })
    }

    /// One value per element of `mesh`.
    pub fn per_element(mesh: &SpatialMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_elements() {
            return Err(Error::DimensionMismatch {
                expected: mesh.num_elements(),
                found: values.len(),
            });
        }
        Self::piecewise(mesh.nodes().to_vec(), values)
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Piecewise {
                breakpoints,
                values,
            } => {
                let idx = breakpoints.partition_point(|&b| b <= z);
                values[idx.saturating_sub(1).min(values.len() - 1)]
            }
            Self::Function(f) => f(z),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Constant(c) => *c == 0.0,
            Self::Piecewise { values, .. } => values.iter().all(|&v| v == 0.0),
            Self::Function(_) => false,
        }
    }

    /// `self + other`, kept piecewise or constant when both operands allow it.
    pub fn plus(&self, other: &Coefficient) -> Coefficient {
        match (self, other) {
            (Self::Constant(a), Self::Constant(b)) => Self::Constant(a + b),
            (
                Self::Piecewise {
                    breakpoints,
                    values,
                },
                Self::Constant(c),
            )
            | (
                Self::Constant(c),
                Self::Piecewise {
                    breakpoints,
                    values,
                },
            ) => Self::Piecewise {
                breakpoints: breakpoints.clone(),
                values: values.iter().map(|v| v + c).collect(),
            },
            _ => {
                let (a, b) = (self.clone(), other.clone());
                Self::function(move |z| a.eval(z) + b.eval(z))
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Coefficient {
        match self {
            Self::Constant(c) => Self::Constant(factor * c),
            Self::Piecewise {
                breakpoints,
                values,
            } => Self::Piecewise {
                breakpoints: breakpoints.clone(),
                values: values.iter().map(|v| factor * v).collect(),
            },
            Self::Function(f) => {
                let f = f.clone();
                Self::function(move |z| factor * f(z))
            }
        }
    }
}

impl From<f64> for Coefficient {
    fn from(c: f64) -> Self {
        Self::Constant(c)
    }
}

/// Total and scattering cross sections; absorption is `σ_t − σ_s`.
#[derive(Debug, Clone)]
pub struct CrossSections {
    pub sigma_t: Coefficient,
    pub sigma_s: Coefficient,
}

impl CrossSections {
    pub fn new(sigma_t: impl Into<Coefficient>, sigma_s: impl Into<Coefficient>) -> Self {
        Self {
            sigma_t: sigma_t.into(),
            sigma_s: sigma_s.into(),
        }
    }

    /// Builds `σ_t = σ_a + σ_s`.
    pub fn from_absorption(sigma_a: impl Into<Coefficient>, sigma_s: impl Into<Coefficient>) -> Self {
        let sigma_a = sigma_a.into();
        let sigma_s = sigma_s.into();
        Self {
            sigma_t: sigma_a.plus(&sigma_s),
            sigma_s,
        }
    }

    pub fn sigma_t(&self, z: f64) -> f64 {
        self.sigma_t.eval(z)
    }

    pub fn sigma_s(&self, z: f64) -> f64 {
        self.sigma_s.eval(z)
    }

    pub fn sigma_a(&self, z: f64) -> f64 {
        self.sigma_t.eval(z) - self.sigma_s.eval(z)
    }
}

/// Summary of a successful cross-section check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSectionReport {
    pub min_sigma_a: f64,
    pub min_sigma_t: f64,
    /// `max σ_s/σ_t`, the proven contraction factor of the source iteration.
    pub contraction: f64,
}

/// A sample point where the absorption requirement fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Offence {
    pub z: f64,
    pub sigma_t: f64,
    pub sigma_s: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error(
    "cross sections violate σ_s, σ_t ≥ 0 and σ_t − σ_s ≥ {gamma:e} at {} point(s), first at z = {}",
    offences.len(),
    offences.first().map_or(f64::NAN, |o| o.z)
)]
pub struct CrossSectionViolation {
    pub gamma: f64,
    pub offences: Vec<Offence>,
}

/// Samples the coefficients at every element quadrature point and checks
/// `σ_s, σ_t ≥ 0` and `σ_a ≥ gamma`.
pub fn validate_cross_sections(
    xs: &CrossSections,
    mesh: &SpatialMesh,
    gamma: f64,
) -> std::result::Result<CrossSectionReport, CrossSectionViolation> {
    let mut report = CrossSectionReport {
        min_sigma_a: f64::INFINITY,
        min_sigma_t: f64::INFINITY,
        contraction: 0.0,
    };
    let mut offences = Vec::new();
    for (_, z, _) in mesh.quadrature(ELEMENT_QUADRATURE_POINTS) {
        let st = xs.sigma_t(z);
        let ss = xs.sigma_s(z);
        let sa = st - ss;
        let ok = st.is_finite() && ss.is_finite() && st >= 0.0 && ss >= 0.0 && sa >= gamma;
        if !ok {
            offences.push(Offence {
                z,
                sigma_t: st,
                sigma_s: ss,
            });
            continue;
        }
        report.min_sigma_a = report.min_sigma_a.min(sa);
        report.min_sigma_t = report.min_sigma_t.min(st);
        report.contraction = report.contraction.max(ss / st);
    }
    if offences.is_empty() {
        Ok(report)
    } else {
        Err(CrossSectionViolation { gamma, offences })
    }
}

/// Symmetric tridiagonal matrix over the nodal hat basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples nodes `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y);
        y
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    pub fn quadratic(&self, x: &[f64], y: &[f64]) -> f64 {
        self.apply(x).iter().zip(y).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// `∫ w φ_i φ_k dz`
    Mass,
    /// `∫ w φ_i' φ_k' dz`
    Stiffness,
}

/// Weighted mass or stiffness matrix of the hat basis, with the weight
/// sampled at three Gauss points per element.
pub fn element_matrices(
    mesh: &SpatialMesh,
    weight: &dyn Fn(f64) -> f64,
    kind: MatrixKind,
) -> Result<SymTridiagonal> {
    let mut m = SymTridiagonal::zeros(mesh.num_nodes());
    let rule = GaussLegendre::new(ELEMENT_QUADRATURE_POINTS);
    for j in 0..mesh.num_elements() {
        let (a, b) = mesh.element(j);
        let h = b - a;
        let mut local = [0.0; 3]; // (0,0), (0,1), (1,1)
        for (z, w) in rule.on_interval(a, b) {
            let c = weight(z);
            if !c.is_finite() {
                return Err(Error::InvalidCoefficient(format!(
                    "non-finite weight {c} at z = {z}"
                )));
            }
            match kind {
                MatrixKind::Mass => {
                    let right = (z - a) / h;
                    let left = 1.0 - right;
                    local[0] += w * c * left * left;
                    local[1] += w * c * left * right;
                    local[2] += w * c * right * right;
                }
                MatrixKind::Stiffness => {
                    let g = w * c / (h * h);
                    local[0] += g;
                    local[1] -= g;
                    local[2] += g;
                }
            }
        }
        m.diag[j] += local[0];
        m.off[j] += local[1];
        m.diag[j + 1] += local[2];
    }
    Ok(m)
}
