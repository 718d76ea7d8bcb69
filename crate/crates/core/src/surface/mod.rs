//! Surfaces with a pole in geodesic polar coordinates (s, θ).

pub mod adaptive;
pub mod builtin;
pub mod fan;
pub mod graph;
pub mod hypotheses;
pub mod revolution;
pub mod totals;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::Real;

pub use fan::{geodesic_fan, streaming_totals, FanOptions, FanTotals, GeodesicFan};
pub use graph::{graph_curvatures, GraphJet, GraphSurface};
pub use hypotheses::{hypotheses_report, hypotheses_report_with, AnnulusSup, HypothesisReport, Verdict};
pub use revolution::{
    jacobi_field, revolution_curvatures, revolution_from_meridian, JacobiField, MeridianSpec, ProfileJet,
    ProfileSample, RadialHeight, RevolutionCurvatures, RevolutionProfile,
};
pub use totals::{
    cartesian_total_gauss, gauss_bonnet_residual, total_gauss, total_gauss_with, total_mean_sq, total_mean_sq_with,
    GaussBonnet, TotalCurvatureEstimate, TotalsOptions,
};

/// Principal and derived curvatures at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample<T> {
    pub gauss: T,
    pub mean: T,
    /// k1 ≥ k2
    pub k1: T,
    pub k2: T,
}

impl<T: Real> CurvatureSample<T> {
    pub fn zero() -> Self {
        Self { gauss: T::zero(), mean: T::zero(), k1: T::zero(), k2: T::zero() }
    }

    /// From the symmetric shape operator [[l, m], [m, n]] in an orthonormal frame.
    pub fn from_shape(l: T, m: T, n: T) -> Self {
        let half = T::lit(0.5);
        let mean = (l + n) * half;
        let gauss = l * n - m * m;
        let disc = (((l - n) * half).powi(2) + m * m).sqrt();
        Self { gauss, mean, k1: mean + disc, k2: mean - disc }
    }

    /// From K and M, with principal curvatures the roots of k² − 2Mk + K.
    pub fn from_gauss_mean(gauss: T, mean: T) -> Self {
        let disc = (mean * mean - gauss).max(T::zero()).sqrt();
        Self { gauss, mean, k1: mean + disc, k2: mean - disc }
    }

    pub fn max_abs_principal(&self) -> T {
        self.k1.abs().max(self.k2.abs())
    }
}

/// Everything a chart knows at one (s, θ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint<T> {
    pub s: T,
    pub theta: T,
    /// metric factor r(s, θ)
    pub r: T,
    /// ∂r/∂s
    pub dr: T,
    /// Shape operator [S_ss, S_sθ, S_θθ] in the orthonormal frame (e_s, e_θ/r).
    pub shape: [T; 3],
    pub curvature: CurvatureSample<T>,
    pub position: [T; 3],
    /// unit tangent ∂p/∂s
    pub tangent: [T; 3],
    /// unit normal along ∂p/∂s × ∂p/∂θ
    pub normal: [T; 3],
    /// (∂M/∂s, ∂M/∂θ)
    pub grad_mean: [T; 2],
}

impl<T: Real> ChartPoint<T> {
    /// |∇_g M|² = (∂_s M)² + r⁻²(∂_θ M)²
    pub fn grad_mean_sq(&self) -> T {
        let gt = if self.r > T::zero() { self.grad_mean[1] / self.r } else { T::zero() };
        self.grad_mean[0].powi(2) + gt * gt
    }

    pub(crate) fn flat_continuation(&self, s: T) -> Self {
        let ds = s - self.s;
        let mut position = self.position;
        for (p, t) in position.iter_mut().zip(self.tangent) {
            *p = *p + ds * t;
        }
        Self {
            s,
            theta: self.theta,
            r: self.r + self.dr * ds,
            dr: self.dr,
            shape: [T::zero(); 3],
            curvature: CurvatureSample::zero(),
            position,
            tangent: self.tangent,
            normal: self.normal,
            grad_mean: [T::zero(); 2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Revolution,
    GraphShot,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Revolution => "revolution",
            Provenance::GraphShot => "graph-shot",
        }
    }
}

/// A quadrature node in θ. `id` addresses stored data in the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaNode<T> {
    pub theta: T,
    pub weight: T,
    pub id: usize,
}

/// Fine θ rule plus a nested coarse rule for error estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRule<T> {
    pub fine: Vec<ThetaNode<T>>,
    pub coarse: Vec<ThetaNode<T>>,
}

impl<T: Real> ThetaRule<T> {
    /// One node carrying the full 2π, for θ-independent integrands.
    pub fn single() -> Self {
        let n = ThetaNode { theta: T::zero(), weight: T::TAU(), id: 0 };
        Self { fine: vec![n], coarse: vec![n] }
    }

    /// Periodic trapezoid with `n` fine nodes; the coarse rule uses every other node.
    pub fn uniform(n: usize) -> Self {
        let n = n.max(2) & !1;
        let h = T::TAU() / T::from_usize_lossy(n);
        let fine: Vec<ThetaNode<T>> =
            (0..n).map(|i| ThetaNode { theta: h * T::from_usize_lossy(i), weight: h, id: i }).collect();
        let coarse = fine.iter().step_by(2).map(|nd| ThetaNode { weight: h + h, ..*nd }).collect();
        Self { fine, coarse }
    }
}

#[derive(Clone)]
enum ChartKind<T> {
    Plane { s_max: T },
    Sphere { radius: T },
    Revolution(Arc<RevolutionProfile<T>>),
    Fan(Arc<GeodesicFan<T>>),
}

/// Geodesic polar chart around a pole.
#[derive(Clone)]
pub struct PolarChart<T> {
    kind: ChartKind<T>,
}

impl<T: Real> std::fmt::Debug for PolarChart<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PolarChart")
            .field("provenance", &self.provenance())
            .field("s_max", &self.s_max())
            .finish()
    }
}

/// Radial data of an axisymmetric chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisymSample<T> {
    pub r: T,
    pub dr: T,
    pub k_s: T,
    pub k_theta: T,
}

impl<T: Real> PolarChart<T> {
    pub fn plane(s_max: T) -> Self {
        Self { kind: ChartKind::Plane { s_max } }
    }

    /// Sphere of the given radius seen from a pole; valid for s < πR.
    pub fn sphere(radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidInput("sphere radius must be positive".into()));
        }
        Ok(Self { kind: ChartKind::Sphere { radius } })
    }

    pub fn from_profile(profile: RevolutionProfile<T>) -> Self {
        Self { kind: ChartKind::Revolution(Arc::new(profile)) }
    }

    pub fn from_fan(fan: GeodesicFan<T>) -> Self {
        Self { kind: ChartKind::Fan(Arc::new(fan)) }
    }

    pub fn provenance(&self) -> Provenance {
        match self.kind {
            ChartKind::Plane { .. } | ChartKind::Sphere { .. } => Provenance::Analytic,
            ChartKind::Revolution(_) => Provenance::Revolution,
            ChartKind::Fan(_) => Provenance::GraphShot,
        }
    }

    pub fn s_max(&self) -> T {
        match &self.kind {
            ChartKind::Plane { s_max } => *s_max,
            ChartKind::Sphere { radius } => T::PI() * *radius * (T::one() - T::lit(1e-9)),
            ChartKind::Revolution(p) => p.s_max(),
            ChartKind::Fan(f) => f.s_max(),
        }
    }

    pub fn is_axisymmetric(&self) -> bool {
        !matches!(self.kind, ChartKind::Fan(_))
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.kind, ChartKind::Plane { .. })
    }

    pub fn profile(&self) -> Option<&RevolutionProfile<T>> {
        match &self.kind {
            ChartKind::Revolution(p) => Some(p),
            _ => None,
        }
    }

    pub fn fan(&self) -> Option<&GeodesicFan<T>> {
        match &self.kind {
            ChartKind::Fan(f) => Some(f),
            _ => None,
        }
    }

    /// Arc lengths where curvature data are only piecewise smooth.
    pub fn breakpoints(&self) -> Vec<T> {
        match &self.kind {
            ChartKind::Revolution(p) => p.breakpoints().to_vec(),
            _ => Vec::new(),
        }
    }

    pub fn theta_rule(&self) -> ThetaRule<T> {
        match &self.kind {
            ChartKind::Fan(f) => f.theta_rule(),
            _ => ThetaRule::single(),
        }
    }

    /// r, ṙ, k_s, k_θ of an axisymmetric chart; `None` for fans.
    pub fn axisymmetric_sample(&self, s: T) -> Option<Result<AxisymSample<T>>> {
        match &self.kind {
            ChartKind::Plane { .. } => Some(Ok(AxisymSample { r: s, dr: T::one(), k_s: T::zero(), k_theta: T::zero() })),
            ChartKind::Sphere { radius } => {
                let k = T::one() / *radius;
                Some(Ok(AxisymSample { r: *radius * (s * k).sin(), dr: (s * k).cos(), k_s: k, k_theta: k }))
            }
            ChartKind::Revolution(p) => Some(p.sample(s).map(|q| AxisymSample {
                r: q.r,
                dr: q.dr,
                k_s: q.k_s,
                k_theta: q.k_theta,
            })),
            ChartKind::Fan(_) => None,
        }
    }

    /// Chart data at (s, θ) with 0 ≤ s ≤ s_max.
    pub fn sample(&self, s: T, theta: T) -> Result<ChartPoint<T>> {
        self.check_range(s)?;
        match &self.kind {
            ChartKind::Fan(f) => f.sample(s, theta),
            _ => Ok(self.axisymmetric_point(s, theta)),
        }
    }

    /// Like [`sample`](Self::sample) at a node of [`theta_rule`](Self::theta_rule).
    pub fn sample_node(&self, s: T, node: &ThetaNode<T>) -> Result<ChartPoint<T>> {
        self.check_range(s)?;
        match &self.kind {
            ChartKind::Fan(f) => f.sample_stored(s, node.id),
            _ => Ok(self.axisymmetric_point(s, node.theta)),
        }
    }

    /// Sample that continues the chart flatly beyond `cut` (≤ s_max): r grows
    /// linearly with the slope at `cut` and all curvatures vanish.
    pub fn sample_node_cut(&self, s: T, node: &ThetaNode<T>, cut: T) -> Result<ChartPoint<T>> {
        if s <= cut {
            self.sample_node(s, node)
        } else {
            Ok(self.sample_node(cut, node)?.flat_continuation(s))
        }
    }

    pub fn sample_cut(&self, s: T, theta: T, cut: T) -> Result<ChartPoint<T>> {
        if s <= cut {
            self.sample(s, theta)
        } else {
            Ok(self.sample(cut, theta)?.flat_continuation(s))
        }
    }

    pub fn r(&self, s: T, theta: T) -> Result<T> {
        Ok(self.sample(s, theta)?.r)
    }

    pub fn curvatures(&self, s: T, theta: T) -> Result<CurvatureSample<T>> {
        Ok(self.sample(s, theta)?.curvature)
    }

    pub fn point(&self, s: T, theta: T) -> Result<[T; 3]> {
        Ok(self.sample(s, theta)?.position)
    }

    fn check_range(&self, s: T) -> Result<()> {
        if !(s >= T::zero()) || !s.is_finite() {
            return Err(Error::InvalidInput(format!("arc length must be ≥ 0, got {s}")));
        }
        let smax = self.s_max();
        if s > smax * (T::one() + T::lit(1e-12)) {
            return Err(Error::Truncation(format!("s = {s} beyond chart radius {smax}")));
        }
        Ok(())
    }

    fn axisymmetric_point(&self, s: T, theta: T) -> ChartPoint<T> {
        let (c, sn) = (theta.cos(), theta.sin());
        let (r, z, dr, dz, ks, kt, dks, dkt) = match &self.kind {
            ChartKind::Plane { .. } => (s, T::zero(), T::one(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero()),
            ChartKind::Sphere { radius } => {
                let k = T::one() / *radius;
                let a = s * k;
                (*radius * a.sin(), *radius * (T::one() - a.cos()), a.cos(), a.sin(), k, k, T::zero(), T::zero())
            }
            ChartKind::Revolution(p) => {
                let q = p.sample(s).expect("range checked");
                (q.r, q.z, q.dr, q.dz, q.k_s, q.k_theta, q.dk_s, q.dk_theta)
            }
            ChartKind::Fan(_) => unreachable!("fan charts are not axisymmetric"),
        };
        let half = T::lit(0.5);
        ChartPoint {
            s,
            theta,
            r,
            dr,
            shape: [ks, T::zero(), kt],
            curvature: CurvatureSample::from_shape(ks, T::zero(), kt),
            position: [r * c, r * sn, z],
            tangent: [dr * c, dr * sn, dz],
            normal: [-dz * c, -dz * sn, dr],
            grad_mean: [(dks + dkt) * half, T::zero()],
        }
    }
}
