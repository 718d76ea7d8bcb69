//! Surfaces of revolution in the canonical (arc-length) parametrization.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numkernel::ode::{integrate_ode_with, OdeOptions, OdeTrajectory};
use crate::real::Real;

pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Meridian curvature k_s(s) generating a profile.
#[derive(Clone)]
pub struct MeridianSpec<T> {
    k_s: ScalarFn<T>,
    dk_s: Option<ScalarFn<T>>,
    s_max: T,
    breakpoints: Vec<T>,
}

impl<T: Real> MeridianSpec<T> {
    pub fn new(k_s: impl Fn(T) -> T + Send + Sync + 'static, s_max: T) -> Self {
        Self { k_s: Arc::new(k_s), dk_s: None, s_max, breakpoints: Vec::new() }
    }

    /// Supplies dk_s/ds analytically (otherwise central differences are used).
    pub fn with_derivative(mut self, dk_s: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.dk_s = Some(Arc::new(dk_s));
        self
    }

    /// Arc lengths where k_s may jump.
    pub fn with_breakpoints(mut self, b: Vec<T>) -> Self {
        self.breakpoints = b;
        self
    }

    pub fn s_max(&self) -> T {
        self.s_max
    }

    pub fn k_s(&self, s: T) -> T {
        (self.k_s)(s)
    }

    pub fn dk_s(&self, s: T) -> T {
        match &self.dk_s {
            Some(d) => d(s),
            None => {
                let h = T::lit(1e-5) * s.abs().max(T::one());
                let lo = (s - h).max(T::zero());
                ((self.k_s)(s + h) - (self.k_s)(lo)) / (s + h - lo)
            }
        }
    }
}

/// Height z = h(ρ) of a graph of revolution: returns [h, h', h'', h'''].
#[derive(Clone)]
pub struct RadialHeight<T> {
    jet: Arc<dyn Fn(T) -> [T; 4] + Send + Sync>,
}

impl<T: Real> RadialHeight<T> {
    pub fn new(jet: impl Fn(T) -> [T; 4] + Send + Sync + 'static) -> Self {
        Self { jet: Arc::new(jet) }
    }

    pub fn eval(&self, rho: T) -> [T; 4] {
        (self.jet)(rho)
    }
}

/// Closed-form profile data at one arc length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet<T> {
    pub r: T,
    pub z: T,
    pub dr: T,
    pub dz: T,
    pub k_s: T,
    pub dk_s: T,
}

pub type ClosedProfile<T> = Arc<dyn Fn(T) -> ProfileJet<T> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample<T> {
    pub s: T,
    pub r: T,
    pub z: T,
    pub dr: T,
    pub dz: T,
    pub ddr: T,
    pub ddz: T,
    pub k_s: T,
    pub k_theta: T,
    pub dk_s: T,
    pub dk_theta: T,
}

#[derive(Clone)]
enum Source<T> {
    Closed(ClosedProfile<T>),
    Meridian { segments: Vec<OdeTrajectory<T>>, spec: MeridianSpec<T> },
    Height { segments: Vec<OdeTrajectory<T>>, height: RadialHeight<T> },
}

/// Profile curve (r(s), z(s)) with ṙ² + ż² = 1.
#[derive(Clone)]
pub struct RevolutionProfile<T> {
    source: Source<T>,
    s_max: T,
    breakpoints: Vec<T>,
}

impl<T: Real> std::fmt::Debug for RevolutionProfile<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RevolutionProfile").field("s_max", &self.s_max).field("breakpoints", &self.breakpoints).finish()
    }
}

const PROFILE_TOL: f64 = 1e-12;

impl<T: Real> RevolutionProfile<T> {
    /// Profile given in closed form.
    pub fn closed(
        f: impl Fn(T) -> ProfileJet<T> + Send + Sync + 'static,
        s_max: T,
        breakpoints: Vec<T>,
    ) -> Self {
        Self { source: Source::Closed(Arc::new(f)), s_max, breakpoints }
    }

    /// Graph of revolution z = h(ρ) with a smooth vertex at ρ = 0, parametrized by arc length.
    pub fn from_height(height: RadialHeight<T>, s_max: T, tol: T) -> Result<Self> {
        if !(s_max > T::zero()) {
            return Err(Error::InvalidInput("s_max must be positive".into()));
        }
        let h = height.clone();
        let b0 = height.eval(T::zero())[1].atan();
        let seg = integrate_segment(
            move |_s, y: &[T], dy: &mut [T]| {
                let c = y[2].cos();
                dy[0] = c;
                dy[1] = y[2].sin();
                dy[2] = h.eval(y[0])[2] * c * c * c;
            },
            [T::zero(), height.eval(T::zero())[0], b0],
            (T::zero(), s_max),
            tol,
        )?;
        Ok(Self { source: Source::Height { segments: vec![seg], height }, s_max, breakpoints: Vec::new() })
    }

    pub fn s_max(&self) -> T {
        self.s_max
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Profile data at s ∈ [0, s_max].
    pub fn sample(&self, s: T) -> Result<ProfileSample<T>> {
        if !(s >= T::zero()) || s > self.s_max * (T::one() + T::lit(1e-12)) {
            return Err(Error::Truncation(format!("s = {s} outside profile [0, {}]", self.s_max)));
        }
        let (r, z, dr, dz, ks, dks) = match &self.source {
            Source::Closed(f) => {
                let j = f(s);
                (j.r, j.z, j.dr, j.dz, j.k_s, j.dk_s)
            }
            Source::Meridian { segments, spec } => {
                let y = eval_segments(segments, s);
                (y[0], y[1], y[2].cos(), y[2].sin(), spec.k_s(s), spec.dk_s(s))
            }
            Source::Height { segments, height } => {
                let y = eval_segments(segments, s);
                let (c, sn) = (y[2].cos(), y[2].sin());
                let hj = height.eval(y[0]);
                let ks = hj[2] * c * c * c;
                let dks = hj[3] * c * c * c * c - T::lit(3.0) * hj[2] * c * c * sn * ks;
                (y[0], y[1], c, sn, ks, dks)
            }
        };
        let (kt, dkt) = if r > T::lit(1e-6) {
            let kt = dz / r;
            (kt, dr * (ks - kt) / r)
        } else {
            (ks, dks * T::lit(0.5))
        };
        Ok(ProfileSample { s, r, z, dr, dz, ddr: -dz * ks, ddz: dr * ks, k_s: ks, k_theta: kt, dk_s: dks, dk_theta: dkt })
    }
}

fn eval_segments<T: Real>(segments: &[OdeTrajectory<T>], s: T) -> [T; 3] {
    let k = segments.partition_point(|t| t.end() < s).min(segments.len() - 1);
    let mut y = [T::zero(); 3];
    segments[k].eval_into(s, &mut y);
    y
}

/// Integrates (r, z, b) over `span`, failing where r first returns to zero.
fn integrate_segment<T, F>(rhs: F, y0: [T; 3], span: (T, T), tol: T) -> Result<OdeTrajectory<T>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
{
    let opts = OdeOptions::with_tol(tol);
    let traj = integrate_ode_with(rhs, &y0, span, &opts, |s, y| s > span.0 && y[0] <= T::zero())?;
    if traj.final_state()[0] <= T::zero() && traj.end() > span.0 {
        let steps = traj.abscissae();
        let mut lo = steps[steps.len().saturating_sub(2)];
        let mut hi = traj.end();
        for _ in 0..100 {
            let mid = (lo + hi) * T::lit(0.5);
            if traj.eval_component(mid, 0) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Err(Error::InvalidSurface(hi.as_f64()));
    }
    Ok(traj)
}

/// Builds the profile r = ∫cos b, z = ∫sin b, b = ∫k_s from a meridian curvature.
pub fn revolution_from_meridian<T: Real>(spec: &MeridianSpec<T>, tol: T) -> Result<RevolutionProfile<T>> {
    if !(spec.s_max > T::zero()) {
        return Err(Error::InvalidInput("s_max must be positive".into()));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let tol = tol.min(T::lit(PROFILE_TOL).max(T::epsilon() * T::lit(100.0)));
    let mut cuts: Vec<T> = spec.breakpoints.iter().copied().filter(|b| *b > T::zero() && *b < spec.s_max).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    cuts.push(spec.s_max);
    let mut segments = Vec::with_capacity(cuts.len());
    let mut y0 = [T::zero(); 3];
    let mut a = T::zero();
    for b in cuts {
        let ks = spec.k_s.clone();
        let seg = integrate_segment(
            move |s, y: &[T], dy: &mut [T]| {
                dy[0] = y[2].cos();
                dy[1] = y[2].sin();
                dy[2] = ks(s);
            },
            y0,
            (a, b),
            tol,
        )?;
        let f = seg.final_state();
        y0 = [f[0], f[1], f[2]];
        a = b;
        segments.push(seg);
    }
    Ok(RevolutionProfile {
        source: Source::Meridian { segments, spec: spec.clone() },
        s_max: spec.s_max,
        breakpoints: spec.breakpoints.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevolutionCurvatures<T> {
    pub k_s: T,
    pub k_theta: T,
    pub gauss: T,
    pub mean: T,
    pub r: T,
}

/// k_s = ṙz̈ − r̈ż, k_θ = ż/r and the derived K, M.
pub fn revolution_curvatures<T: Real>(profile: &RevolutionProfile<T>, s: T) -> Result<RevolutionCurvatures<T>> {
    let p = profile.sample(s)?;
    if p.r == T::zero() {
        return Err(Error::PoleSingularity);
    }
    let k_s = p.dr * p.ddz - p.ddr * p.dz;
    let k_theta = p.dz / p.r;
    Ok(RevolutionCurvatures { k_s, k_theta, gauss: k_s * k_theta, mean: (k_s + k_theta) * T::lit(0.5), r: p.r })
}

/// Solution of r̈ + K r = 0, r(0) = 0, ṙ(0) = 1.
#[derive(Debug, Clone)]
pub struct JacobiField<T> {
    traj: OdeTrajectory<T>,
}

impl<T: Real> JacobiField<T> {
    pub fn r(&self, s: T) -> T {
        self.traj.eval_component(s, 0)
    }

    pub fn rdot(&self, s: T) -> T {
        self.traj.eval_component(s, 1)
    }

    pub fn s_max(&self) -> T {
        self.traj.end()
    }

    pub fn trajectory(&self) -> &OdeTrajectory<T> {
        &self.traj
    }
}

pub fn jacobi_field<T: Real>(k_along: impl Fn(T) -> T, s_max: T, tol: T) -> Result<JacobiField<T>> {
    if !(s_max > T::zero()) || !(tol > T::zero()) {
        return Err(Error::InvalidInput("s_max and tol must be positive".into()));
    }
    let opts = OdeOptions::with_tol(tol);
    let traj = integrate_ode_with(
        |s, y: &[T], dy: &mut [T]| {
            dy[0] = y[1];
            dy[1] = -k_along(s) * y[0];
        },
        &[T::zero(), T::one()],
        (T::zero(), s_max),
        &opts,
        |s, y| s > T::zero() && y[0] <= T::zero(),
    )?;
    if traj.final_state()[0] <= T::zero() {
        let steps = traj.abscissae();
        let mut lo = steps[steps.len() - 2];
        let mut hi = traj.end();
        for _ in 0..100 {
            let mid = (lo + hi) * T::lit(0.5);
            if traj.eval_component(mid, 0) > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Err(Error::ConjugatePoint(hi.as_f64()));
    }
    Ok(JacobiField { traj })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_closed_forms() {
        let tol = 1e-10;
        let flat = jacobi_field(|_| 0.0f64, 3.0, tol).unwrap();
        assert!((flat.r(2.5) - 2.5).abs() < 1e-12);
        let sph = jacobi_field(|_| 1.0, 3.0, tol).unwrap();
        assert!((sph.r(std::f64::consts::FRAC_PI_2) - 1.0).abs() < 10.0 * tol);
        let hyp = jacobi_field(|_| -1.0, 2.0, tol).unwrap();
        assert!((hyp.r(1.0) - 1f64.sinh()).abs() < 10.0 * tol * 1f64.sinh());
    }

    #[test]
    fn conjugate_point_on_sphere() {
        match jacobi_field(|_| 1.0f64, 4.0, 1e-10) {
            Err(Error::ConjugatePoint(s)) => assert!((s - std::f64::consts::PI).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn meridian_closed_forms() {
        let plane = revolution_from_meridian(&MeridianSpec::new(|_| 0.0f64, 5.0), 1e-10).unwrap();
        let p = plane.sample(4.0).unwrap();
        assert!((p.r - 4.0).abs() < 1e-12 && p.z.abs() < 1e-12);
        let rad = 2.0f64;
        let sph = revolution_from_meridian(&MeridianSpec::new(move |_| 1.0 / rad, 5.0), 1e-10).unwrap();
        for s in [0.5f64, 1.0, 3.0, 5.0] {
            assert!((sph.sample(s).unwrap().r - rad * (s / rad).sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn meridian_closing_up_is_rejected() {
        match revolution_from_meridian(&MeridianSpec::new(|_| 1.0f64, 4.0), 1e-10) {
            Err(Error::InvalidSurface(s)) => assert!((s - std::f64::consts::PI).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cylinder_curvatures() {
        let rad = 1.5f64;
        let cyl = RevolutionProfile::closed(
            move |s| ProfileJet { r: rad, z: s, dr: 0.0, dz: 1.0, k_s: 0.0, dk_s: 0.0 },
            10.0,
            vec![],
        );
        let c = revolution_curvatures(&cyl, 3.0).unwrap();
        assert_eq!(c.k_s, 0.0);
        assert!((c.k_theta - 1.0 / rad).abs() < 1e-15);
    }

    #[test]
    fn pole_is_singular() {
        let plane = revolution_from_meridian(&MeridianSpec::new(|_| 0.0f64, 5.0), 1e-10).unwrap();
        assert_eq!(revolution_curvatures(&plane, 0.0), Err(Error::PoleSingularity));
    }
}
