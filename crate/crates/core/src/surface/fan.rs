//! Geodesic polar charts of graphs by shooting geodesics from the pole.
//!
//! Each geodesic carries the Jacobi equation r̈ + K r = 0 along with it, so
//! r(s, θ) comes from the curvature directly rather than from differencing
//! neighbouring geodesics.

use crate::error::{Error, Result};
use crate::numkernel::ode::{integrate_ode_with, OdeOptions, OdeTrajectory};
use crate::real::Real;
use crate::surface::adaptive::{adaptive_theta, AdaptiveSettings};
use crate::surface::graph::{curvatures_from_jet, orthogonal_unit, GraphSurface};
use crate::surface::{ChartPoint, PolarChart, ThetaNode, ThetaRule};

#[derive(Debug, Clone, Copy)]
pub struct FanOptions<T> {
    pub s_max: T,
    /// ODE tolerance along each geodesic.
    pub tol: T,
    /// Relative tolerance of the adaptive θ panels.
    pub theta_tol: T,
    pub points_per_panel: usize,
    pub initial_panels: usize,
    pub max_geodesics: usize,
}

impl<T: Real> FanOptions<T> {
    pub fn new(s_max: T) -> Self {
        Self {
            s_max,
            tol: T::lit(1e-10),
            theta_tol: T::lit(1e-8),
            points_per_panel: 6,
            initial_panels: 8,
            max_geodesics: 20_000,
        }
    }
}

#[derive(Debug, Clone)]
struct Geodesic<T> {
    theta: T,
    traj: OdeTrajectory<T>,
}

/// Stored fan of geodesics with an adaptive θ rule.
#[derive(Debug, Clone)]
pub struct GeodesicFan<T> {
    surface: GraphSurface<T>,
    frame: ([T; 2], [T; 2]),
    s_max: T,
    tol: T,
    truncated_at: Option<T>,
    exhausted: bool,
    geodesics: Vec<Geodesic<T>>,
    rule: ThetaRule<T>,
}

/// Chart of `surf` from geodesics launched at its pole.
///
/// `theta_samples` is the number of initial θ nodes; panels are refined
/// adaptively from there.
pub fn geodesic_fan<T: Real>(surf: &GraphSurface<T>, theta_samples: usize, s_max: T, tol: T) -> Result<PolarChart<T>> {
    let mut opts = FanOptions::new(s_max);
    opts.tol = tol;
    opts.initial_panels = theta_samples.div_ceil(opts.points_per_panel).max(1);
    Ok(PolarChart::from_fan(GeodesicFan::build(surf, &opts)?))
}

impl<T: Real> GeodesicFan<T> {
    /// Shoots the fan; a conjugate point shrinks the chart and sets the warning flag.
    pub fn build(surf: &GraphSurface<T>, opts: &FanOptions<T>) -> Result<Self> {
        if !(opts.s_max > T::zero()) || !(opts.tol > T::zero()) {
            return Err(Error::InvalidInput("fan needs s_max > 0 and tol > 0".into()));
        }
        let frame = surf.pole_frame();
        let mut s_max = opts.s_max;
        let mut truncated_at = None;
        for _ in 0..8 {
            match Self::shoot_all(surf, frame, s_max, opts) {
                Ok((geodesics, rule, exhausted)) => {
                    return Ok(Self { surface: surf.clone(), frame, s_max, tol: opts.tol, truncated_at, exhausted, geodesics, rule })
                }
                Err(Error::ConjugatePoint(s)) => {
                    let s = T::lit(s);
                    truncated_at = Some(truncated_at.map_or(s, |t: T| t.min(s)));
                    s_max = s * T::lit(0.9);
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::ConjugatePoint(truncated_at.map_or(f64::NAN, |t| t.as_f64())))
    }

    #[allow(clippy::type_complexity)]
    fn shoot_all(
        surf: &GraphSurface<T>,
        frame: ([T; 2], [T; 2]),
        s_max: T,
        opts: &FanOptions<T>,
    ) -> Result<(Vec<Geodesic<T>>, ThetaRule<T>, bool)> {
        let monitors: Vec<T> = [0.125, 0.25, 0.5, 1.0].iter().map(|f| T::lit(*f) * s_max).collect();
        let mut shots: Vec<Geodesic<T>> = Vec::new();
        let settings = AdaptiveSettings {
            tol: opts.theta_tol,
            points: opts.points_per_panel,
            initial_panels: opts.initial_panels,
            max_evals: opts.max_geodesics,
        };
        let out = adaptive_theta(&settings, |theta| {
            let traj = shoot(surf, frame, theta, s_max, opts.tol)?;
            let mut v = Vec::with_capacity(2 * monitors.len());
            let mut y = [T::zero(); 6];
            for &sm in &monitors {
                traj.eval_into(sm, &mut y);
                v.push(y[4] / sm);
                v.push(y[5]);
            }
            shots.push(Geodesic { theta, traj });
            Ok(v)
        })?;
        let used = out.used();
        let mut remap = vec![usize::MAX; shots.len()];
        let mut kept = Vec::with_capacity(used.len());
        for (new, &old) in used.iter().enumerate() {
            remap[old] = new;
        }
        for (i, g) in shots.into_iter().enumerate() {
            if remap[i] != usize::MAX {
                kept.push(g);
            }
        }
        let conv = |nodes: &[(T, T, usize)]| -> Vec<ThetaNode<T>> {
            nodes.iter().map(|&(theta, weight, id)| ThetaNode { theta, weight, id: remap[id] }).collect()
        };
        let rule = ThetaRule { fine: conv(&out.fine), coarse: conv(&out.coarse) };
        Ok((kept, rule, out.exhausted))
    }

    pub fn surface(&self) -> &GraphSurface<T> {
        &self.surface
    }

    pub fn s_max(&self) -> T {
        self.s_max
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    /// Radius of a detected conjugate point, if the chart had to be shrunk.
    pub fn truncated_at(&self) -> Option<T> {
        self.truncated_at
    }

    /// True if the θ refinement stopped on its geodesic budget.
    pub fn budget_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn geodesic_count(&self) -> usize {
        self.geodesics.len()
    }

    pub fn theta_rule(&self) -> ThetaRule<T> {
        self.rule.clone()
    }

    pub fn pole_frame(&self) -> ([T; 2], [T; 2]) {
        self.frame
    }

    pub(crate) fn sample_stored(&self, s: T, id: usize) -> Result<ChartPoint<T>> {
        let g = self.geodesics.get(id).ok_or_else(|| Error::InvalidInput(format!("no stored geodesic {id}")))?;
        let mut y = [T::zero(); 6];
        g.traj.eval_into(s, &mut y);
        Ok(point_from_state(&self.surface, s, g.theta, &y))
    }

    /// Samples along a freshly shot geodesic.
    pub(crate) fn sample(&self, s: T, theta: T) -> Result<ChartPoint<T>> {
        if let Some(g) = self.geodesics.iter().position(|g| g.theta == theta) {
            return self.sample_stored(s, g);
        }
        if s == T::zero() {
            let traj = shoot(&self.surface, self.frame, theta, self.s_max * T::lit(1e-6), self.tol)?;
            return Ok(point_from_state(&self.surface, s, theta, traj.state(0)));
        }
        let traj = shoot(&self.surface, self.frame, theta, s, self.tol)?;
        Ok(point_from_state(&self.surface, s, theta, traj.final_state()))
    }
}

fn point_from_state<T: Real>(surf: &GraphSurface<T>, s: T, theta: T, y: &[T]) -> ChartPoint<T> {
    let (x, yy, vx, vy, r, rd) = (y[0], y[1], y[2], y[3], y[4], y[5]);
    let j = surf.jet(x, yy);
    let g = [T::one() + j.fx * j.fx, j.fx * j.fy, T::one() + j.fy * j.fy];
    let w = (T::one() + j.fx * j.fx + j.fy * j.fy).sqrt();
    // unit speed holds to the ODE tolerance; renormalise so the frame is orthonormal to rounding
    let speed = (g[0] * vx * vx + (g[1] + g[1]) * vx * vy + g[2] * vy * vy).sqrt();
    let (vx, vy) = (vx / speed, vy / speed);
    let v = [vx, vy];
    let u = orthogonal_unit(&g, v);
    let hess = |a: [T; 2], b: [T; 2]| j.fxx * a[0] * b[0] + j.fxy * (a[0] * b[1] + a[1] * b[0]) + j.fyy * a[1] * b[1];
    let shape = [hess(v, v) / w, hess(v, u) / w, hess(u, u) / w];
    let gm = surf.mean_gradient(x, yy);
    ChartPoint {
        s,
        theta,
        r,
        dr: rd,
        shape,
        curvature: curvatures_from_jet(&j),
        position: [x, yy, j.f],
        tangent: [vx, vy, j.fx * vx + j.fy * vy],
        normal: [-j.fx / w, -j.fy / w, T::one() / w],
        grad_mean: [gm[0] * v[0] + gm[1] * v[1], r * (gm[0] * u[0] + gm[1] * u[1])],
    }
}

fn initial_state<T: Real>(surf: &GraphSurface<T>, frame: ([T; 2], [T; 2]), theta: T) -> [T; 6] {
    let [x0, y0] = surf.pole();
    let (c, s) = (theta.cos(), theta.sin());
    let (e1, e2) = frame;
    [x0, y0, c * e1[0] + s * e2[0], c * e1[1] + s * e2[1], T::zero(), T::one()]
}

/// Geodesic equation of z = f(x, y) in arc length, with the Jacobi pair (r, ṙ).
#[inline]
fn geodesic_rhs<T: Real>(surf: &GraphSurface<T>, y: &[T], dy: &mut [T]) -> (T, crate::surface::graph::GraphJet<T>) {
    let j = surf.jet(y[0], y[1]);
    let w2 = T::one() + j.fx * j.fx + j.fy * j.fy;
    let q = y[2] * y[2] * j.fxx + T::lit(2.0) * y[2] * y[3] * j.fxy + y[3] * y[3] * j.fyy;
    let k = (j.fxx * j.fyy - j.fxy * j.fxy) / (w2 * w2);
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = -j.fx * q / w2;
    dy[3] = -j.fy * q / w2;
    dy[4] = y[5];
    dy[5] = -k * y[4];
    (k, j)
}

fn locate_zero<T: Real>(traj: &OdeTrajectory<T>, comp: usize) -> T {
    let steps = traj.abscissae();
    let mut lo = steps[steps.len().saturating_sub(2)];
    let mut hi = traj.end();
    for _ in 0..100 {
        let mid = (lo + hi) * T::lit(0.5);
        if traj.eval_component(mid, comp) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

pub(crate) fn shoot<T: Real>(
    surf: &GraphSurface<T>,
    frame: ([T; 2], [T; 2]),
    theta: T,
    s_max: T,
    tol: T,
) -> Result<OdeTrajectory<T>> {
    let y0 = initial_state(surf, frame, theta);
    let opts = OdeOptions::with_tol(tol);
    let traj = integrate_ode_with(
        |_s, y: &[T], dy: &mut [T]| {
            geodesic_rhs(surf, y, dy);
        },
        &y0,
        (T::zero(), s_max),
        &opts,
        |s, y| s > T::zero() && y[4] <= T::zero(),
    )?;
    if traj.final_state()[4] <= T::zero() {
        return Err(Error::ConjugatePoint(locate_zero(&traj, 4).as_f64()));
    }
    Ok(traj)
}

/// Accumulated ∫K r, ∫|K| r, ∫M² r, ∫|∇_g M|² r along geodesics, integrated over θ.
#[derive(Debug, Clone)]
pub struct FanTotals<T> {
    pub radii: Vec<T>,
    pub gauss: Vec<T>,
    pub abs_gauss: Vec<T>,
    pub mean_sq: Vec<T>,
    pub grad_mean_sq: Vec<T>,
    /// θ-quadrature error estimates, same layout.
    pub gauss_err: Vec<T>,
    pub abs_gauss_err: Vec<T>,
    pub mean_sq_err: Vec<T>,
    pub grad_mean_sq_err: Vec<T>,
    pub shots: usize,
    pub exhausted: bool,
}

/// Surface integrals over geodesic disks of the given radii, computed by
/// integrating the densities along each geodesic and adapting in θ.
pub fn streaming_totals<T: Real>(
    surf: &GraphSurface<T>,
    radii: &[T],
    tol: T,
    theta_tol: T,
    max_shots: usize,
) -> Result<FanTotals<T>> {
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    let s_end = *radii.last().ok_or_else(|| Error::InvalidInput("empty truncation schedule".into()))?;
    let frame = surf.pole_frame();
    let opts = OdeOptions::with_tol(tol);
    let settings = AdaptiveSettings { tol: theta_tol, points: 6, initial_panels: 8, max_evals: max_shots };
    let mut shots = 0usize;
    let out = adaptive_theta(&settings, |theta| {
        shots += 1;
        let s6 = initial_state(surf, frame, theta);
        let mut y0 = [T::zero(); 10];
        y0[..6].copy_from_slice(&s6);
        let traj = integrate_ode_with(
            |_s, y: &[T], dy: &mut [T]| {
                let (k, j) = geodesic_rhs(surf, &y[..6], &mut dy[..6]);
                let c = curvatures_from_jet(&j);
                let g = [T::one() + j.fx * j.fx, j.fx * j.fy, T::one() + j.fy * j.fy];
                let v = [y[2], y[3]];
                let u = orthogonal_unit(&g, v);
                let gm = surf.mean_gradient(y[0], y[1]);
                let ds = gm[0] * v[0] + gm[1] * v[1];
                let dt = gm[0] * u[0] + gm[1] * u[1];
                let r = y[4];
                dy[6] = k * r;
                dy[7] = k.abs() * r;
                dy[8] = c.mean * c.mean * r;
                dy[9] = (ds * ds + dt * dt) * r;
            },
            &y0,
            (T::zero(), s_end),
            &opts,
            |s, y| s > T::zero() && y[4] <= T::zero(),
        )?;
        if traj.final_state()[4] <= T::zero() {
            return Err(Error::ConjugatePoint(locate_zero(&traj, 4).as_f64()));
        }
        let mut v = Vec::with_capacity(4 * radii.len());
        let mut y = [T::zero(); 10];
        for &s in &radii {
            traj.eval_into(s, &mut y);
            v.extend_from_slice(&y[6..10]);
        }
        Ok(v)
    })?;
    let m = radii.len();
    let pick = |src: &[T], c: usize| -> Vec<T> { (0..m).map(|i| src[4 * i + c]).collect() };
    Ok(FanTotals {
        gauss: pick(&out.integral, 0),
        abs_gauss: pick(&out.integral, 1),
        mean_sq: pick(&out.integral, 2),
        grad_mean_sq: pick(&out.integral, 3),
        gauss_err: pick(&out.error, 0),
        abs_gauss_err: pick(&out.error, 1),
        mean_sq_err: pick(&out.error, 2),
        grad_mean_sq_err: pick(&out.error, 3),
        radii,
        shots,
        exhausted: out.exhausted,
    })
}
