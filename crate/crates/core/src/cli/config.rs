//! Run configuration: `key = value` lines, `#` comments, optional preset.
//!
//! ```text
//! # custom absorber with a jump in scattering
//! preset         = custom
//! angular_cells  = 32
//! elements       = 64
//! sigma_a        = 0.5
//! sigma_s        = if(z <= 0.5, 1, 4)
//! source         = 1
//! inflow_left    = mu
//! ```
//!
//! Keys, all optional:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `preset` | `custom`, `manufactured` or `jump-spectrum` | `custom` |
//! | `angular_cells`, `elements` | `N` and `J` for `solve`, fixed values for `convergence` | preset |
//! | `degree` | angular degree `L` | 0 |
//! | `length` | slab thickness `Z` (custom problems) | 1 |
//! | `sigma_t` or `sigma_a`, `sigma_s` | coefficients in `z` | required for custom |
//! | `source` | `q(z, mu)` | 0 |
//! | `inflow_left`, `inflow_right` | `g(mu)` at `z = 0` (`mu > 0`) and `z = Z` (`mu < 0`) | 0 |
//! | `gamma` | lower bound demanded of `σ_a` | `1e-12` |
//! | `tolerance`, `max_iterations`, `preconditioner` (`dsa`/`none`) | solver | `1e-10`, 500, `dsa` |
//! | `sweep` (`angular`/`spatial`), `levels` | convergence study | preset |
//! | `spectrum_angular_cells`, `spectrum_elements` | lists swept by `spectrum` | preset |
//! | `output` | output directory, overridden by `--out` | `.` |
//!
//! Coefficients accept an expression (see [`super::expr`]) or a bracketed
//! list `[v1, v2, …]` of values on equal subintervals of `(0, Z)`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use super::expr::Expr;
use crate::analysis::{ManufacturedCase, Sweep};
use crate::assembly::{ProblemData, DEFAULT_GAMMA};
use crate::solver::{Preconditioner, SolverConfig};
use crate::spatial::{Coefficient, CrossSections};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Custom,
    Manufactured,
    JumpSpectrum,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Custom => "custom",
            Preset::Manufactured => "manufactured",
            Preset::JumpSpectrum => "jump-spectrum",
        }
    }
}

/// The physical problem to solve.
#[derive(Debug, Clone)]
pub enum Problem {
    /// The manufactured problem with known exact solution on the unit slab.
    Manufactured,
    Custom {
        cross_sections: CrossSections,
        data: ProblemData,
        length: f64,
    },
}

impl Problem {
    pub fn cross_sections(&self) -> CrossSections {
        match self {
            Problem::Manufactured => ManufacturedCase::new().cross_sections,
            Problem::Custom { cross_sections, .. } => cross_sections.clone(),
        }
    }

    pub fn data(&self) -> ProblemData {
        match self {
            Problem::Manufactured => ManufacturedCase::new().data,
            Problem::Custom { data, .. } => data.clone(),
        }
    }

    pub fn length(&self) -> f64 {
        match self {
            Problem::Manufactured => crate::analysis::manufactured::MANUFACTURED_LENGTH,
            Problem::Custom { length, .. } => *length,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub preset: Preset,
    pub problem: Problem,
    pub angular_cells: usize,
    pub elements: usize,
    pub degree: usize,
    pub gamma: f64,
    pub solver: SolverConfig,
    pub sweep: Sweep,
    pub levels: Vec<usize>,
    pub spectrum_angular_cells: Vec<usize>,
    pub spectrum_elements: Vec<usize>,
    pub output: PathBuf,
}

const KEYS: &[&str] = &[
    "preset",
    "angular_cells",
    "elements",
    "degree",
    "length",
    "sigma_t",
    "sigma_a",
    "sigma_s",
    "source",
    "inflow_left",
    "inflow_right",
    "gamma",
    "tolerance",
    "max_iterations",
    "preconditioner",
    "sweep",
    "levels",
    "spectrum_angular_cells",
    "spectrum_elements",
    "output",
];

const PROBLEM_KEYS: &[&str] = &[
    "length",
    "sigma_t",
    "sigma_a",
    "sigma_s",
    "source",
    "inflow_left",
    "inflow_right",
];

fn powers_of_two(lo: usize, hi: usize) -> Vec<usize> {
    std::iter::successors(Some(lo), |&v| Some(v * 2))
        .take_while(|&v| v <= hi)
        .collect()
}

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        let base = RunConfig {
            preset,
            problem: Problem::Manufactured,
            angular_cells: 512,
            elements: 256,
            degree: 0,
            gamma: DEFAULT_GAMMA,
            solver: SolverConfig::default(),
            sweep: Sweep::AngularCells,
            levels: vec![512, 1024, 2048, 4096, 8192],
            spectrum_angular_cells: powers_of_two(2, 256),
            spectrum_elements: vec![16, 64, 512],
            output: PathBuf::from("."),
        };
        match preset {
            Preset::Manufactured => base,
            Preset::Custom => RunConfig {
                problem: Problem::Custom {
                    cross_sections: CrossSections::new(1.0, 0.0),
                    data: ProblemData::zero(),
                    length: 1.0,
                },
                angular_cells: 8,
                elements: 32,
                ..base
            },
            Preset::JumpSpectrum => RunConfig {
                problem: Problem::Custom {
                    cross_sections: jump_cross_sections(),
                    data: ProblemData::zero(),
                    length: 1.0,
                },
                angular_cells: 16,
                elements: 64,
                ..base
            },
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let entries = parse_entries(text)?;
        let get = |k: &str| entries.get(k).map(|(line, v)| (*line, v.as_str()));

        let preset = match get("preset") {
            None => Preset::Custom,
            Some((line, v)) => match v {
                "custom" => Preset::Custom,
                "manufactured" => Preset::Manufactured,
                "jump-spectrum" => Preset::JumpSpectrum,
                other => {
                    return Err(ConfigError::at(
                        line,
                        format!(
                            "unknown preset '{other}' (expected custom, manufactured or jump-spectrum)"
                        ),
                    ))
                }
            },
        };
        let mut cfg = Self::preset(preset);

        if let Some((line, v)) = get("angular_cells") {
            cfg.angular_cells = parse_count(line, "angular_cells", v)?;
        }
        if let Some((line, v)) = get("elements") {
            cfg.elements = parse_count(line, "elements", v)?;
        }
        if let Some((line, v)) = get("degree") {
            cfg.degree = v
                .parse()
                .map_err(|_| ConfigError::at(line, format!("degree must be an integer ≥ 0, got '{v}'")))?;
        }
        if let Some((line, v)) = get("gamma") {
            cfg.gamma = parse_positive(line, "gamma", v)?;
        }
        if let Some((line, v)) = get("tolerance") {
            cfg.solver.tolerance = parse_positive(line, "tolerance", v)?;
        }
        if let Some((line, v)) = get("max_iterations") {
            cfg.solver.max_iterations = parse_count(line, "max_iterations", v)?;
        }
        if let Some((line, v)) = get("preconditioner") {
            cfg.solver.preconditioner = match v {
                "dsa" => Preconditioner::Dsa,
                "none" => Preconditioner::None,
                other => {
                    return Err(ConfigError::at(
                        line,
                        format!("preconditioner must be dsa or none, got '{other}'"),
                    ))
                }
            };
        }
        if let Some((line, v)) = get("sweep") {
            cfg.sweep = match v {
                "angular" => Sweep::AngularCells,
                "spatial" => Sweep::SpatialElements,
                other => {
                    return Err(ConfigError::at(
                        line,
                        format!("sweep must be angular or spatial, got '{other}'"),
                    ))
                }
            };
            if get("levels").is_none() {
                cfg.levels = match cfg.sweep {
                    Sweep::AngularCells => vec![512, 1024, 2048, 4096, 8192],
                    Sweep::SpatialElements => vec![16, 32, 64, 128, 256],
                };
            }
        }
        if let Some((line, v)) = get("levels") {
            cfg.levels = parse_list(line, "levels", v)?;
            if cfg.levels.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ConfigError::at(line, "levels must be strictly ascending"));
            }
        }
        if let Some((line, v)) = get("spectrum_angular_cells") {
            cfg.spectrum_angular_cells = parse_list(line, "spectrum_angular_cells", v)?;
        }
        if let Some((line, v)) = get("spectrum_elements") {
            cfg.spectrum_elements = parse_list(line, "spectrum_elements", v)?;
        }
        if let Some((_, v)) = get("output") {
            cfg.output = PathBuf::from(v);
        }

        if preset == Preset::Manufactured {
            if let Some(k) = PROBLEM_KEYS.iter().find(|k| entries.contains_key(**k)) {
                let line = entries[*k].0;
                return Err(ConfigError::at(
                    line,
                    format!("'{k}' cannot be set with the manufactured preset"),
                ));
            }
        } else if PROBLEM_KEYS.iter().any(|k| entries.contains_key(*k)) {
            cfg.problem = custom_problem(&cfg, &get)?;
        } else if preset == Preset::Custom {
            return Err(ConfigError::new(
                "custom problems need sigma_s and one of sigma_t, sigma_a",
            ));
        }
        Ok(cfg)
    }
}

/// Jump coefficients with a strongly absorbing left half and a nearly
/// pure scatterer on the right.
pub fn jump_cross_sections() -> CrossSections {
    use std::f64::consts::PI;
    CrossSections::from_absorption(
        Coefficient::piecewise(vec![0.0, 0.5, 1.0], vec![10.01, 0.01]).expect("valid breakpoints"),
        Coefficient::function(|z| {
            let wave = (2.0 * PI * z).sin();
            if z <= 0.5 {
                2.0 + wave
            } else {
                102.0 + wave
            }
        }),
    )
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, (usize, String)>, ConfigError> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::at(line, format!("expected 'key = value', got '{content}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::at(line, format!("unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(ConfigError::at(line, format!("'{key}' has no value")));
        }
        if let Some((first, _)) = entries.insert(key.to_string(), (line, value.to_string())) {
            return Err(ConfigError::at(
                line,
                format!("'{key}' repeats the value given on line {first}"),
            ));
        }
    }
    Ok(entries)
}

fn parse_count(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    match v.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(ConfigError::at(line, format!("{key} must be an integer ≥ 1, got '{v}'"))),
    }
}

fn parse_positive(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(ConfigError::at(line, format!("{key} must be a positive number, got '{v}'"))),
    }
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<usize>, ConfigError> {
    let items: Vec<&str> = v.split(',').map(str::trim).collect();
    items
        .iter()
        .map(|s| parse_count(line, key, s))
        .collect::<Result<Vec<_>, _>>()
}

fn parse_expr(line: usize, key: &str, v: &str) -> Result<Expr, ConfigError> {
    Expr::parse(v).map_err(|e| ConfigError::at(line, format!("{key}: {e}")))
}

fn parse_coefficient(line: usize, key: &str, v: &str, length: f64) -> Result<Coefficient, ConfigError> {
    if let Some(inner) = v.strip_prefix('[') {
        let Some(inner) = inner.strip_suffix(']') else {
            return Err(ConfigError::at(line, format!("{key}: missing ']'")));
        };
        let values = inner
            .split(',')
            .map(|item| {
                let e = parse_expr(line, key, item)?;
                e.as_constant().ok_or_else(|| {
                    ConfigError::at(line, format!("{key}: list entries must be constants"))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let k = values.len();
        let mut breaks: Vec<f64> = (0..=k).map(|i| length * i as f64 / k as f64).collect();
        breaks[k] = length;
        return Coefficient::piecewise(breaks, values)
            .map_err(|e| ConfigError::at(line, format!("{key}: {e}")));
    }
    let e = parse_expr(line, key, v)?;
    if e.uses_mu() {
        return Err(ConfigError::at(line, format!("{key} may depend on z only")));
    }
    Ok(match e.as_constant() {
        Some(c) => Coefficient::Constant(c),
        None => Coefficient::function(move |z| e.eval(z, 0.0)),
    })
}

fn custom_problem<'a>(
    cfg: &RunConfig,
    get: &impl Fn(&str) -> Option<(usize, &'a str)>,
) -> Result<Problem, ConfigError> {
    let (default_xs, default_length) = match &cfg.problem {
        Problem::Custom {
            cross_sections,
            length,
            ..
        } => (cross_sections.clone(), *length),
        Problem::Manufactured => unreachable!("manufactured preset rejects problem keys"),
    };
    let length = match get("length") {
        Some((line, v)) => parse_positive(line, "length", v)?,
        None => default_length,
    };
    let sigma_s = get("sigma_s")
        .map(|(line, v)| parse_coefficient(line, "sigma_s", v, length))
        .transpose()?;
    let sigma_t = get("sigma_t")
        .map(|(line, v)| parse_coefficient(line, "sigma_t", v, length))
        .transpose()?;
    let sigma_a = get("sigma_a")
        .map(|(line, v)| parse_coefficient(line, "sigma_a", v, length))
        .transpose()?;
    let cross_sections = match (sigma_t, sigma_a, sigma_s) {
        (Some(_), Some(_), _) => {
            return Err(ConfigError::new("give either sigma_t or sigma_a, not both"))
        }
        (Some(t), None, Some(s)) => CrossSections::new(t, s),
        (None, Some(a), Some(s)) => CrossSections::from_absorption(a, s),
        (None, None, None) => default_xs,
        (_, _, None) => return Err(ConfigError::new("sigma_s is required with sigma_t or sigma_a")),
        (None, None, Some(_)) => {
            return Err(ConfigError::new("sigma_s needs one of sigma_t, sigma_a"))
        }
    };

    let source = get("source")
        .map(|(line, v)| parse_expr(line, "source", v))
        .transpose()?;
    let angle_only = |key: &str| -> Result<Option<Expr>, ConfigError> {
        let Some((line, v)) = get(key) else {
            return Ok(None);
        };
        let e = parse_expr(line, key, v)?;
        if e.uses_z() {
            return Err(ConfigError::at(line, format!("{key} may depend on mu only")));
        }
        Ok(Some(e))
    };
    let left = angle_only("inflow_left")?;
    let right = angle_only("inflow_right")?;
    let data = if source.is_none() && left.is_none() && right.is_none() {
        ProblemData::zero()
    } else {
        let q = source.map(Arc::new);
        let (l, r) = (left.map(Arc::new), right.map(Arc::new));
        ProblemData::from_source(
            move |z, mu| q.as_ref().map_or(0.0, |e| e.eval(z, mu)),
            move |mu| l.as_ref().map_or(0.0, |e| e.eval(0.0, mu)),
            move |mu| r.as_ref().map_or(0.0, |e| e.eval(0.0, mu)),
        )
    };
    Ok(Problem::Custom {
        cross_sections,
        data,
        length,
    })
}
