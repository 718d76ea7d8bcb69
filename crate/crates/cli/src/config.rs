//! Run configuration: a sectioned TOML file, validated before anything is computed.

use std::path::Path;

use layerspec_core::varform::Strategy;
use serde::{Deserialize, Serialize};

use crate::catalog::{lookup, CatalogEntry, Construction};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSection,
    #[serde(default)]
    pub layer: LayerSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub certify: CertifySection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub counterexample: CounterexampleSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// chart radius
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_samples: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSection {
    /// half-width
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// ODE and quadrature tolerance
    pub tol: f64,
    /// truncation radii for totals and hypothesis probes; doubling up to the chart radius when absent
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Vec<f64>>,
    /// radial sample count for `describe`
    pub curvature_samples: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { tol: 1e-10, truncation: None, curvature_samples: 33 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifySection {
    pub strategies: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    pub max_evaluations: usize,
    pub margin: f64,
}

impl Default for CertifySection {
    fn default() -> Self {
        Self {
            strategies: Strategy::ALL.iter().map(|s| s.as_str().to_string()).collect(),
            s0: None,
            max_evaluations: 200,
            margin: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub m: Vec<u32>,
    /// Dirichlet truncation radius S; min(chart radius, 100) when absent
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_end: Option<f64>,
    pub n_s: usize,
    pub n_u: usize,
    pub eigenvalues: usize,
    /// mesh levels, each halving h_s and h_u
    pub levels: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self { m: vec![0, 1, 2], s_end: None, n_s: 200, n_u: 16, eigenvalues: 4, levels: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleSection {
    /// truncation radii S in units of R
    pub s_factors: Vec<f64>,
    /// cell width along the meridian
    pub h: f64,
    pub n_u: usize,
    pub eigenvalues: usize,
}

impl Default for CounterexampleSection {
    fn default() -> Self {
        Self { s_factors: vec![10.0, 20.0, 40.0], h: 0.05, n_u: 16, eigenvalues: 3 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.resolve()
    }

    /// Defaults of the named surface with every key filled in.
    pub fn defaults_for(name: &str) -> Result<Self, ConfigError> {
        RunConfig {
            surface: SurfaceSection { name: name.into(), z0: None, x0: None, y0: None, radius: None, s_max: None, theta_samples: None },
            layer: LayerSection::default(),
            solver: SolverSection::default(),
            certify: CertifySection::default(),
            spectrum: SpectrumSection::default(),
            counterexample: CounterexampleSection::default(),
            output: OutputSection::default(),
        }
        .resolve()
    }

    pub fn entry(&self) -> CatalogEntry {
        lookup(&self.surface.name).expect("validated on load")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        self.certify.strategies.iter().map(|s| Strategy::parse(s).expect("validated on load")).collect()
    }

    /// Fills surface defaults and checks every value.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        let entry = lookup(&self.surface.name).ok_or_else(|| invalid(format!("unknown surface {:?}", self.surface.name)))?;
        let sf = &mut self.surface;
        for (key, slot) in [("z0", &mut sf.z0), ("x0", &mut sf.x0), ("y0", &mut sf.y0), ("radius", &mut sf.radius)] {
            match entry.parameter(key) {
                Some(p) => {
                    let v = *slot.get_or_insert(p.default);
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(invalid(format!("surface.{key} must be positive, got {v}")));
                    }
                }
                None if slot.is_some() => {
                    return Err(invalid(format!("surface.{key} does not apply to {}", entry.name)));
                }
                None => {}
            }
        }
        if entry.construction == Construction::None {
            if sf.s_max.is_some() || sf.theta_samples.is_some() || self.layer.a.is_some() {
                return Err(invalid(format!("{} has no chart; it takes no chart or layer keys", entry.name)));
            }
            return self.check_sections();
        }
        let s_max = *sf.s_max.get_or_insert(entry.s_max);
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(invalid(format!("surface.s_max must be positive, got {s_max}")));
        }
        match (entry.theta_samples, sf.theta_samples) {
            (Some(d), None) => sf.theta_samples = Some(d),
            (Some(_), Some(n)) if n < 4 => return Err(invalid("surface.theta_samples must be at least 4")),
            (None, Some(_)) => return Err(invalid(format!("surface.theta_samples does not apply to {}", entry.name))),
            _ => {}
        }
        let a = *self.layer.a.get_or_insert(entry.half_width);
        if !(a > 0.0 && a.is_finite()) {
            return Err(invalid(format!("layer.a must be positive, got {a}")));
        }
        if self.certify.s0.is_none() {
            self.certify.s0 = entry.certify_s0.map(|s| s.min(s_max));
        }
        if self.solver.truncation.is_none() {
            self.solver.truncation = Some(doubling_schedule(s_max));
        }
        if self.spectrum.s_end.is_none() && entry.construction != Construction::Graph {
            self.spectrum.s_end = Some(s_max.min(100.0));
        }
        let radii = self.solver.truncation.as_deref().unwrap_or(&[]);
        if radii.len() < 2 || radii.iter().any(|r| !(*r > 0.0) || *r > s_max) {
            return Err(invalid(format!("solver.truncation needs at least two radii in (0, {s_max}]")));
        }
        if let Some(s) = self.spectrum.s_end {
            if !(s > 0.0 && s <= s_max) {
                return Err(invalid(format!("spectrum.s_end must lie in (0, {s_max}]")));
            }
        }
        if let Some(s) = self.certify.s0 {
            if !(s > 0.0 && s.is_finite()) {
                return Err(invalid("certify.s0 must be positive"));
            }
        }
        self.check_sections()
    }

    fn check_sections(self) -> Result<Self, ConfigError> {
        let s = &self.solver;
        if !(s.tol > 0.0 && s.tol < 1e-2) {
            return Err(invalid(format!("solver.tol must lie in (0, 0.01), got {}", s.tol)));
        }
        if s.curvature_samples < 2 {
            return Err(invalid("solver.curvature_samples must be at least 2"));
        }
        let c = &self.certify;
        if c.strategies.is_empty() {
            return Err(invalid("certify.strategies is empty"));
        }
        if let Some(bad) = c.strategies.iter().find(|x| Strategy::parse(x).is_none()) {
            let known: Vec<_> = Strategy::ALL.iter().map(|s| s.as_str()).collect();
            return Err(invalid(format!("unknown strategy {bad:?}; expected one of {}", known.join(", "))));
        }
        if c.max_evaluations == 0 || !(c.margin >= 1.0) {
            return Err(invalid("certify.max_evaluations must be positive and certify.margin at least 1"));
        }
        let p = &self.spectrum;
        if p.m.is_empty() || p.n_s < 16 || p.n_u < 16 || p.eigenvalues == 0 || p.levels == 0 {
            return Err(invalid("spectrum needs m values, n_s ≥ 16, n_u ≥ 16, eigenvalues ≥ 1 and levels ≥ 1"));
        }
        let x = &self.counterexample;
        if x.s_factors.is_empty() || x.s_factors.iter().any(|f| !(*f > std::f64::consts::FRAC_PI_2)) {
            return Err(invalid("counterexample.s_factors must exceed π/2 (the cap)"));
        }
        if !(x.h > 0.0) || x.n_u < 16 || x.eigenvalues == 0 {
            return Err(invalid("counterexample needs h > 0, n_u ≥ 16 and eigenvalues ≥ 1"));
        }
        Ok(self)
    }
}

/// S, S/2, S/4, … down to about 1, in increasing order; ratio-based
/// extrapolation needs the constant doubling.
pub fn doubling_schedule(s_max: f64) -> Vec<f64> {
    let lo = 1.0f64.min(s_max / 1024.0);
    let mut out = vec![s_max];
    let mut s = s_max;
    while s * 0.5 >= lo && out.len() < 64 {
        s *= 0.5;
        out.push(s);
    }
    out.reverse();
    out
}
