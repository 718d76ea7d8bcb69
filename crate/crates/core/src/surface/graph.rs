//! Graphs z = f(x, y) over the plane.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::surface::CurvatureSample;

/// f and its derivatives up to second order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GraphJet<T> {
    pub f: T,
    pub fx: T,
    pub fy: T,
    pub fxx: T,
    pub fxy: T,
    pub fyy: T,
}

type JetFn<T> = Arc<dyn Fn(T, T) -> GraphJet<T> + Send + Sync>;

#[derive(Clone)]
pub struct GraphSurface<T> {
    label: String,
    jet: JetFn<T>,
    pole: [T; 2],
}

impl<T: std::fmt::Debug> std::fmt::Debug for GraphSurface<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphSurface").field("label", &self.label).field("pole", &self.pole).finish()
    }
}

impl<T: Real> GraphSurface<T> {
    pub fn new(label: impl Into<String>, pole: [T; 2], jet: impl Fn(T, T) -> GraphJet<T> + Send + Sync + 'static) -> Self {
        Self { label: label.into(), jet: Arc::new(jet), pole }
    }

    pub fn plane() -> Self {
        Self::new("plane", [T::zero(); 2], |_, _| GraphJet::default())
    }

    /// z = x² − y²
    pub fn hyperbolic_paraboloid() -> Self {
        let two = T::lit(2.0);
        Self::new("hyperbolic paraboloid", [T::zero(); 2], move |x, y| GraphJet {
            f: x * x - y * y,
            fx: two * x,
            fy: -two * y,
            fxx: two,
            fxy: T::zero(),
            fyy: -two,
        })
    }

    /// z = x³ − 3xy²
    pub fn monkey_saddle() -> Self {
        let three = T::lit(3.0);
        let six = T::lit(6.0);
        Self::new("monkey saddle", [T::zero(); 2], move |x, y| GraphJet {
            f: x * x * x - three * x * y * y,
            fx: three * (x * x - y * y),
            fy: -six * x * y,
            fxx: six * x,
            fxy: -six * y,
            fyy: -six * x,
        })
    }

    /// z = (x/x₀)² + (y/y₀)², pole at an umbilic (the vertex when x₀ = y₀).
    pub fn elliptic_paraboloid(x0: T, y0: T) -> Result<Self> {
        if !(x0 > T::zero()) || !(y0 > T::zero()) {
            return Err(Error::InvalidInput("elliptic paraboloid needs x0, y0 > 0".into()));
        }
        let alpha = T::one() / (x0 * x0);
        let beta = T::one() / (y0 * y0);
        let two = T::lit(2.0);
        let pole = umbilic(alpha, beta);
        Ok(Self::new("elliptic paraboloid", pole, move |x, y| GraphJet {
            f: alpha * x * x + beta * y * y,
            fx: two * alpha * x,
            fy: two * beta * y,
            fxx: two * alpha,
            fxy: T::zero(),
            fyy: two * beta,
        }))
    }

    /// z = c(x² + y²)
    pub fn paraboloid(c: T) -> Self {
        let two = T::lit(2.0);
        Self::new("paraboloid of revolution", [T::zero(); 2], move |x, y| GraphJet {
            f: c * (x * x + y * y),
            fx: two * c * x,
            fy: two * c * y,
            fxx: two * c,
            fxy: T::zero(),
            fyy: two * c,
        })
    }

    /// Lower hemisphere z = R − √(R² − x² − y²), defined for x² + y² < R².
    pub fn hemisphere(radius: T) -> Self {
        Self::new("hemisphere", [T::zero(); 2], move |x, y| {
            let q = radius * radius - x * x - y * y;
            let w = q.sqrt();
            let w3 = q * w;
            GraphJet {
                f: radius - w,
                fx: x / w,
                fy: y / w,
                fxx: (radius * radius - y * y) / w3,
                fxy: x * y / w3,
                fyy: (radius * radius - x * x) / w3,
            }
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn pole(&self) -> [T; 2] {
        self.pole
    }

    pub fn jet(&self, x: T, y: T) -> GraphJet<T> {
        (self.jet)(x, y)
    }

    /// Induced metric I + ∇f∇fᵀ as [g11, g12, g22].
    pub fn metric(&self, x: T, y: T) -> [T; 3] {
        let j = self.jet(x, y);
        [T::one() + j.fx * j.fx, j.fx * j.fy, T::one() + j.fy * j.fy]
    }

    pub fn curvatures(&self, x: T, y: T) -> CurvatureSample<T> {
        curvatures_from_jet(&self.jet(x, y))
    }

    /// (∂M/∂x, ∂M/∂y) by central differences of the closed-form M.
    pub fn mean_gradient(&self, x: T, y: T) -> [T; 2] {
        let h = T::lit(1e-4) * (T::one() + x.abs().max(y.abs()));
        let m = |a: T, b: T| curvatures_from_jet(&self.jet(a, b)).mean;
        let two_h = h + h;
        [(m(x + h, y) - m(x - h, y)) / two_h, (m(x, y + h) - m(x, y - h)) / two_h]
    }

    /// A metric-orthonormal, positively oriented tangent frame at the pole (xy components).
    pub fn pole_frame(&self) -> ([T; 2], [T; 2]) {
        let [x, y] = self.pole;
        let g = self.metric(x, y);
        let e1n = g[0].sqrt();
        let e1 = [T::one() / e1n, T::zero()];
        (e1, orthogonal_unit(&g, e1))
    }
}

/// Unit vector g-orthogonal to the unit vector v, rotated counterclockwise from it.
pub(crate) fn orthogonal_unit<T: Real>(g: &[T; 3], v: [T; 2]) -> [T; 2] {
    let gv = [g[0] * v[0] + g[1] * v[1], g[1] * v[0] + g[2] * v[1]];
    let c = [-gv[1], gv[0]];
    let n2 = g[0] * c[0] * c[0] + T::lit(2.0) * g[1] * c[0] * c[1] + g[2] * c[1] * c[1];
    let n = n2.sqrt();
    [c[0] / n, c[1] / n]
}

pub(crate) fn curvatures_from_jet<T: Real>(j: &GraphJet<T>) -> CurvatureSample<T> {
    let w2 = T::one() + j.fx * j.fx + j.fy * j.fy;
    let w = w2.sqrt();
    let gauss = (j.fxx * j.fyy - j.fxy * j.fxy) / (w2 * w2);
    let mean = ((T::one() + j.fy * j.fy) * j.fxx - T::lit(2.0) * j.fx * j.fy * j.fxy + (T::one() + j.fx * j.fx) * j.fyy)
        / (T::lit(2.0) * w2 * w);
    CurvatureSample::from_gauss_mean(gauss, mean)
}

/// Closed-form (K, M, k1, k2) of a graph, upward normal.
pub fn graph_curvatures<T: Real>(surf: &GraphSurface<T>, x: T, y: T) -> Result<CurvatureSample<T>> {
    let j = surf.jet(x, y);
    let vals = [j.f, j.fx, j.fy, j.fxx, j.fxy, j.fyy];
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Evaluation(format!("height function not finite at ({x}, {y})")));
    }
    Ok(curvatures_from_jet(&j))
}

/// Umbilic of z = αx² + βy² on the axis of the smaller coefficient.
fn umbilic<T: Real>(alpha: T, beta: T) -> [T; 2] {
    let rel = (alpha - beta).abs() / alpha.max(beta);
    if rel <= T::lit(1e-14) {
        return [T::zero(); 2];
    }
    // along x the normal curvatures are 2α/W³ and 2β/W; they meet where W² = α/β
    if alpha > beta {
        let x = ((alpha - beta) / beta).sqrt() / (T::lit(2.0) * alpha);
        [x, T::zero()]
    } else {
        let y = ((beta - alpha) / alpha).sqrt() / (T::lit(2.0) * beta);
        [T::zero(), y]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_at_origin() {
        let c = graph_curvatures(&GraphSurface::<f64>::hyperbolic_paraboloid(), 0.0, 0.0).unwrap();
        assert_eq!((c.gauss, c.mean, c.k1, c.k2), (-4.0, 0.0, 2.0, -2.0));
    }

    #[test]
    fn hemisphere_apex() {
        let r = 2.0;
        let c = graph_curvatures(&GraphSurface::<f64>::hemisphere(r), 0.0, 0.0).unwrap();
        assert!((c.gauss - 0.25).abs() < 1e-15 && (c.mean - 0.5).abs() < 1e-15);
    }

    #[test]
    fn umbilic_pole() {
        let s = GraphSurface::<f64>::elliptic_paraboloid(1.0, 2.0).unwrap();
        let [x, y] = s.pole();
        let c = s.curvatures(x, y);
        assert!((c.k1 - c.k2).abs() < 1e-7, "{c:?}");
        assert!(x > 0.0 && y == 0.0);
        let s = GraphSurface::<f64>::elliptic_paraboloid(1.5, 1.0).unwrap();
        let [x, y] = s.pole();
        let c = s.curvatures(x, y);
        assert!((c.k1 - c.k2).abs() < 1e-7 && x == 0.0 && y > 0.0);
    }

    #[test]
    fn frame_is_orthonormal() {
        let s = GraphSurface::<f64>::elliptic_paraboloid(1.0, 2.0).unwrap();
        let (e1, e2) = s.pole_frame();
        let [x, y] = s.pole();
        let g = s.metric(x, y);
        let ip = |a: [f64; 2], b: [f64; 2]| g[0] * a[0] * b[0] + g[1] * (a[0] * b[1] + a[1] * b[0]) + g[2] * a[1] * b[1];
        assert!((ip(e1, e1) - 1.0).abs() < 1e-14);
        assert!((ip(e2, e2) - 1.0).abs() < 1e-14);
        assert!(ip(e1, e2).abs() < 1e-14);
        assert!(e1[0] * e2[1] - e1[1] * e2[0] > 0.0);
    }
}
