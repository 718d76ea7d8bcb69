//! Layers of constant half-width a over a chart: metric, threshold, transverse modes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::surface::{ChartPoint, CurvatureSample, PolarChart};

const SAFETY: f64 = 1.05;

/// Layer {p(q) + u n(q) : |u| < a} over a chart.
#[derive(Clone)]
pub struct LayerSpec<T> {
    chart: PolarChart<T>,
    a: T,
    rho_m: T,
    omega1: bool,
}

impl<T: Real> std::fmt::Debug for LayerSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LayerSpec")
            .field("chart", &self.chart)
            .field("a", &self.a)
            .field("rho_m", &self.rho_m)
            .field("omega1", &self.omega1)
            .finish()
    }
}

impl<T: Real> LayerSpec<T> {
    /// Fails with a hypothesis violation unless a < ρ_m.
    pub fn new(chart: PolarChart<T>, a: T) -> Result<Self> {
        let layer = Self::forced(chart, a)?;
        if !layer.omega1 {
            return Err(Error::HypothesisViolation(format!(
                "half-width {} is not below the minimal curvature radius {}",
                layer.a, layer.rho_m
            )));
        }
        Ok(layer)
    }

    /// Builds the layer even if a ≥ ρ_m; the violation is recorded.
    pub fn forced(chart: PolarChart<T>, a: T) -> Result<Self> {
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::InvalidInput(format!("half-width must be positive, got {a}")));
        }
        let rho = rho_m(&chart)?;
        Ok(Self { chart, a, rho_m: rho, omega1: a < rho })
    }

    pub fn chart(&self) -> &PolarChart<T> {
        &self.chart
    }

    pub fn half_width(&self) -> T {
        self.a
    }

    pub fn width(&self) -> T {
        self.a + self.a
    }

    /// κ_n = nπ/d
    pub fn kappa(&self, n: usize) -> T {
        T::from_usize_lossy(n) * T::PI() / self.width()
    }

    /// κ₁²
    pub fn threshold(&self) -> T {
        self.kappa(1).powi(2)
    }

    pub fn rho_m(&self) -> T {
        self.rho_m
    }

    pub fn omega1_holds(&self) -> bool {
        self.omega1
    }
}

/// 1 − 2Mu + Ku²
pub fn det_factor<T: Real>(layer: &LayerSpec<T>, s: T, theta: T, u: T) -> Result<T> {
    let c = layer.chart.curvatures(s, theta)?;
    Ok(det_factor_at(&c, u))
}

#[inline]
pub fn det_factor_at<T: Real>(c: &CurvatureSample<T>, u: T) -> T {
    T::one() - T::lit(2.0) * c.mean * u + c.gauss * u * u
}

/// Layer metric in the chart basis (∂_s, ∂_θ, ∂_u).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerMetricSample<T> {
    pub g11: T,
    pub g12: T,
    pub g22: T,
    pub g33: T,
    pub det_factor: T,
    /// √det G = r·f
    pub weight: T,
}

pub fn layer_metric<T: Real>(layer: &LayerSpec<T>, s: T, theta: T, u: T) -> Result<LayerMetricSample<T>> {
    Ok(layer_metric_at(&layer.chart.sample(s, theta)?, u))
}

/// G = D (I − uS)² D with D = diag(1, r) and S the shape operator in the orthonormal frame.
pub fn layer_metric_at<T: Real>(p: &ChartPoint<T>, u: T) -> LayerMetricSample<T> {
    let [l, m, n] = p.shape;
    let (a11, a12, a22) = (T::one() - u * l, -u * m, T::one() - u * n);
    let e11 = a11 * a11 + a12 * a12;
    let e12 = a12 * (a11 + a22);
    let e22 = a12 * a12 + a22 * a22;
    let f = det_factor_at(&p.curvature, u);
    LayerMetricSample { g11: e11, g12: e12 * p.r, g22: e22 * p.r * p.r, g33: T::one(), det_factor: f, weight: p.r * f }
}

/// Estimated sup of the principal curvatures over the chart, times the safety factor.
pub fn curvature_sup<T: Real>(chart: &PolarChart<T>) -> Result<T> {
    if chart.is_planar() {
        return Ok(T::zero());
    }
    let s_max = chart.s_max();
    let nodes = chart.theta_rule().fine;
    let stride = (nodes.len() / 64).max(1);
    let mut sup = T::zero();
    for s in probe_grid(s_max, chart.breakpoints()) {
        for nd in nodes.iter().step_by(stride) {
            sup = sup.max(chart.sample_node(s, nd)?.curvature.max_abs_principal());
        }
    }
    Ok(sup * T::lit(SAFETY))
}

/// Dense near the pole, geometric further out, always hitting the pole and breakpoints.
fn probe_grid<T: Real>(s_max: T, breaks: Vec<T>) -> Vec<T> {
    let near = s_max.min(T::lit(64.0));
    let n = 2000usize;
    let mut out: Vec<T> = (0..=n).map(|i| near * T::from_usize_lossy(i) / T::from_usize_lossy(n)).collect();
    let mut s = near;
    while s < s_max {
        s = (s * T::lit(1.02)).min(s_max);
        out.push(s);
    }
    for b in breaks {
        let eps = b * T::lit(1e-9);
        out.extend([b - eps, b, b + eps].into_iter().filter(|x| *x >= T::zero() && *x <= s_max));
    }
    out
}

/// Minimal normal curvature radius; infinite for planar charts.
pub fn rho_m<T: Real>(chart: &PolarChart<T>) -> Result<T> {
    let sup = curvature_sup(chart)?;
    Ok(if sup > T::zero() { T::one() / sup } else { T::infinity() })
}

/// (C₋, C₊) = ((1 − a/ρ_m)², (1 + a/ρ_m)²)
pub fn c_bounds<T: Real>(layer: &LayerSpec<T>) -> Result<(T, T)> {
    if !layer.omega1 {
        return Err(Error::HypothesisViolation(format!(
            "a = {} ≥ ρ_m = {}; metric bounds unavailable",
            layer.a, layer.rho_m
        )));
    }
    let q = layer.a / layer.rho_m;
    Ok(((T::one() - q).powi(2), (T::one() + q).powi(2)))
}

/// Dirichlet eigenfunction of −∂²_u on (−a, a).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMode<T> {
    pub n: usize,
    pub kappa: T,
    pub half_width: T,
}

impl<T: Real> TransverseMode<T> {
    pub fn new(half_width: T, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("transverse modes start at n = 1".into()));
        }
        let kappa = T::from_usize_lossy(n) * T::PI() / (half_width + half_width);
        Ok(Self { n, kappa, half_width })
    }

    fn norm(&self) -> T {
        (T::one() / self.half_width).sqrt()
    }

    pub fn value(&self, u: T) -> T {
        let x = self.kappa * u;
        self.norm() * if self.n % 2 == 1 { x.cos() } else { x.sin() }
    }

    pub fn derivative(&self, u: T) -> T {
        let x = self.kappa * u;
        self.norm() * self.kappa * if self.n % 2 == 1 { -x.sin() } else { x.cos() }
    }
}

pub fn transverse_mode<T: Real>(layer: &LayerSpec<T>, n: usize) -> Result<TransverseMode<T>> {
    TransverseMode::new(layer.a, n)
}

/// (V₂, K − M²) with V₂ = (K − M²)/f².
pub fn effective_potential<T: Real>(layer: &LayerSpec<T>, s: T, theta: T, u: T) -> Result<(T, T)> {
    let c = layer.chart.curvatures(s, theta)?;
    let km = c.gauss - c.mean * c.mean;
    let f = det_factor_at(&c, u);
    Ok((km / (f * f), km))
}

/// Outcome of the sampled self-intersection scan. Never a proof of injectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionScan<T> {
    pub points: usize,
    pub min_det_factor: T,
    pub collision_detected: bool,
    /// closest pair of samples whose radial labels differ by more than 4a
    pub closest_far_pair: Option<T>,
}

/// Samples the two boundary faces u = ±a on [0, s_end] and looks for points
/// from radially distant samples that come closer than the layer width.
pub fn collision_scan<T: Real>(layer: &LayerSpec<T>, s_end: T, n_s: usize, n_theta: usize) -> Result<CollisionScan<T>> {
    let s_end = s_end.min(layer.chart.s_max());
    let a = layer.a;
    let mut pts: Vec<([T; 3], T)> = Vec::new();
    let mut min_f = T::infinity();
    let n_theta = if layer.chart.is_axisymmetric() { n_theta } else { n_theta.min(layer.chart.theta_rule().fine.len()) };
    for i in 0..=n_s {
        let s = s_end * T::from_usize_lossy(i) / T::from_usize_lossy(n_s.max(1));
        for j in 0..n_theta.max(1) {
            let th = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(n_theta.max(1));
            let p = layer.chart.sample(s, th)?;
            for u in [-a, a] {
                min_f = min_f.min(det_factor_at(&p.curvature, u));
                let q = [p.position[0] + u * p.normal[0], p.position[1] + u * p.normal[1], p.position[2] + u * p.normal[2]];
                pts.push((q, s));
            }
        }
    }
    let cell = (a + a).as_f64();
    let key = |q: &[T; 3]| -> (i64, i64, i64) {
        ((q[0].as_f64() / cell).floor() as i64, (q[1].as_f64() / cell).floor() as i64, (q[2].as_f64() / cell).floor() as i64)
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, (q, _)) in pts.iter().enumerate() {
        grid.entry(key(q)).or_default().push(i);
    }
    let mut closest: Option<T> = None;
    for (i, (q, s)) in pts.iter().enumerate() {
        let (kx, ky, kz) = key(q);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(list) = grid.get(&(kx + dx, ky + dy, kz + dz)) else { continue };
                    for &j in list {
                        if j <= i || (pts[j].1 - *s).abs() <= T::lit(4.0) * a {
                            continue;
                        }
                        let d = ((q[0] - pts[j].0[0]).powi(2) + (q[1] - pts[j].0[1]).powi(2) + (q[2] - pts[j].0[2]).powi(2)).sqrt();
                        closest = Some(closest.map_or(d, |c: T| c.min(d)));
                    }
                }
            }
        }
    }
    let collision = min_f <= T::zero() || closest.is_some_and(|d| d < a + a);
    Ok(CollisionScan { points: pts.len(), min_det_factor: min_f, collision_detected: collision, closest_far_pair: closest })
}
