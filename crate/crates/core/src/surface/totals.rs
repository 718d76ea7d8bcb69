//! Total curvatures over growing geodesic disks, with tail extrapolation.

use crate::error::{Error, Result};
use crate::numkernel::quadrature::{geometric_breaks, merge_breaks, LegendreRule};
use crate::real::Real;
use crate::surface::adaptive::adaptive_interval;
use crate::surface::fan::streaming_totals;
use crate::surface::graph::{curvatures_from_jet, GraphSurface};
use crate::surface::{PolarChart, RevolutionProfile};

#[derive(Debug, Clone)]
pub struct TotalsOptions<T> {
    /// Relative tolerance of the radial quadrature (and ODE tolerance for fans).
    pub tol: T,
    pub theta_tol: T,
    pub max_shots: usize,
    /// A non-flattening sequence beyond this magnitude is reported as divergent.
    pub blowup: T,
    /// Successive-difference ratio at or above which the sequence is not treated as converging.
    pub ratio_limit: T,
    pub cross_check: bool,
}

impl<T: Real> Default for TotalsOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-9),
            theta_tol: T::lit(1e-7),
            max_shots: 20_000,
            blowup: T::lit(1e6),
            ratio_limit: T::lit(0.9),
            cross_check: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotalCurvatureEstimate<T> {
    pub value: T,
    pub truncation_radii: Vec<T>,
    pub partial_values: Vec<T>,
    pub extrapolated_tail: T,
    pub error_bound: T,
    pub divergent: bool,
    /// Set when the value is only the limit over geodesic disks, not an absolutely convergent integral.
    pub principal_value: bool,
    /// Extrapolated Cartesian integral for graph charts.
    pub cross_check: Option<T>,
}

/// Partial integrals of the four densities over disks of the given radii.
#[derive(Debug, Clone)]
pub(crate) struct Partials<T> {
    pub radii: Vec<T>,
    /// [K, |K|, M², |∇M|²] per radius
    pub values: Vec<[T; 4]>,
    pub errors: Vec<[T; 4]>,
}

pub(crate) fn partials<T: Real>(chart: &PolarChart<T>, radii: &[T], opts: &TotalsOptions<T>) -> Result<Partials<T>> {
    let mut radii = radii.to_vec();
    if radii.is_empty() {
        return Err(Error::InvalidInput("empty truncation schedule".into()));
    }
    if radii.iter().any(|r| !(*r > T::zero())) {
        return Err(Error::InvalidInput("truncation radii must be positive".into()));
    }
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    radii.dedup();
    let last = *radii.last().expect("non-empty");
    if last > chart.s_max() * (T::one() + T::lit(1e-12)) {
        return Err(Error::Truncation(format!("truncation radius {last} beyond chart radius {}", chart.s_max())));
    }
    if let Some(fan) = chart.fan() {
        let t = streaming_totals(fan.surface(), &radii, fan.tol().min(opts.tol), opts.theta_tol, opts.max_shots)?;
        let values = (0..radii.len()).map(|i| [t.gauss[i], t.abs_gauss[i], t.mean_sq[i], t.grad_mean_sq[i]]).collect();
        let errors = (0..radii.len())
            .map(|i| [t.gauss_err[i], t.abs_gauss_err[i], t.mean_sq_err[i], t.grad_mean_sq_err[i]])
            .collect();
        return Ok(Partials { radii, values, errors });
    }
    let first = (radii[0] / T::lit(8.0)).min(T::one());
    let geo = geometric_breaks(T::zero(), last, first, T::lit(2.0));
    let breaks = merge_breaks(&[&geo, &chart.breakpoints(), &radii]);
    let tau = T::TAU();
    let density = |s: T| -> Result<[T; 4]> {
        let p = chart.sample(s, T::zero())?;
        let c = p.curvature;
        Ok([c.gauss * p.r * tau, c.gauss.abs() * p.r * tau, c.mean * c.mean * p.r * tau, p.grad_mean_sq() * p.r * tau])
    };
    let mut values = Vec::with_capacity(radii.len());
    let mut errors = Vec::with_capacity(radii.len());
    let mut acc = [T::zero(); 4];
    let mut acc_err = [T::zero(); 4];
    let mut lo = T::zero();
    for &hi in &radii {
        let (v, e) = adaptive_interval(lo, hi, &breaks, opts.tol, 200_000, density)?;
        for c in 0..4 {
            acc[c] = acc[c] + v[c];
            acc_err[c] = acc_err[c] + e[c];
        }
        values.push(acc);
        errors.push(acc_err);
        lo = hi;
    }
    Ok(Partials { radii, values, errors })
}

/// Extrapolates a truncation sequence from its last three terms.
pub(crate) fn extrapolate<T: Real>(
    radii: &[T],
    partial: &[T],
    quad_err: &[T],
    opts: &TotalsOptions<T>,
    absolutely_convergent: bool,
) -> TotalCurvatureEstimate<T> {
    let n = partial.len();
    let last = partial[n - 1];
    let noise = quad_err[n - 1] * T::lit(3.0) + T::lit(1e-12) * (T::one() + last.abs());
    let mut est = TotalCurvatureEstimate {
        value: last,
        truncation_radii: radii.to_vec(),
        partial_values: partial.to_vec(),
        extrapolated_tail: T::zero(),
        error_bound: noise,
        divergent: false,
        principal_value: !absolutely_convergent,
        cross_check: None,
    };
    if n < 2 {
        return est;
    }
    let d_last = last - partial[n - 2];
    if d_last.abs() <= noise {
        est.error_bound = noise + d_last.abs();
        return est;
    }
    if n < 3 {
        est.error_bound = noise + d_last.abs() * T::lit(2.0);
        return est;
    }
    let d_prev = partial[n - 2] - partial[n - 3];
    let q = d_last / d_prev;
    if d_prev != T::zero() && q.abs() < opts.ratio_limit {
        let tail = d_last * q / (T::one() - q);
        est.value = last + tail;
        est.extrapolated_tail = tail;
        est.error_bound = d_last.abs() + tail.abs() * T::lit(0.5) + noise;
    } else {
        est.divergent = true;
        est.principal_value = true;
        est.error_bound = T::infinity();
    }
    if last.abs() > opts.blowup {
        est.divergent = true;
    }
    est
}

/// 𝒦 = ∫ K dΣ over the schedule's disks, extrapolated.
pub fn total_gauss<T: Real>(chart: &PolarChart<T>, schedule: &[T]) -> Result<TotalCurvatureEstimate<T>> {
    total_gauss_with(chart, schedule, &TotalsOptions::default())
}

pub fn total_gauss_with<T: Real>(
    chart: &PolarChart<T>,
    schedule: &[T],
    opts: &TotalsOptions<T>,
) -> Result<TotalCurvatureEstimate<T>> {
    let p = partials(chart, schedule, opts)?;
    Ok(gauss_from_partials(chart, &p, opts))
}

pub(crate) fn gauss_from_partials<T: Real>(
    chart: &PolarChart<T>,
    p: &Partials<T>,
    opts: &TotalsOptions<T>,
) -> TotalCurvatureEstimate<T> {
    let vals: Vec<T> = p.values.iter().map(|v| v[0]).collect();
    let errs: Vec<T> = p.errors.iter().map(|v| v[0]).collect();
    let abs: Vec<T> = p.values.iter().map(|v| v[1]).collect();
    let abs_err: Vec<T> = p.errors.iter().map(|v| v[1]).collect();
    let abs_est = extrapolate(&p.radii, &abs, &abs_err, opts, true);
    let mut est = extrapolate(&p.radii, &vals, &errs, opts, !abs_est.divergent);
    if est.divergent {
        // without absolute integrability the truncation sequence is the principal value itself
        est.value = *vals.last().expect("non-empty");
    }
    if opts.cross_check {
        if let Some(fan) = chart.fan() {
            est.cross_check = cartesian_total_gauss(fan.surface(), &p.radii, opts).ok();
        }
    }
    est
}

/// ℳ² = ∫ M² dΣ; divergence is a valid outcome.
pub fn total_mean_sq<T: Real>(chart: &PolarChart<T>, schedule: &[T]) -> Result<TotalCurvatureEstimate<T>> {
    total_mean_sq_with(chart, schedule, &TotalsOptions::default())
}

pub fn total_mean_sq_with<T: Real>(
    chart: &PolarChart<T>,
    schedule: &[T],
    opts: &TotalsOptions<T>,
) -> Result<TotalCurvatureEstimate<T>> {
    let p = partials(chart, schedule, opts)?;
    Ok(component_estimate(&p, 2, opts))
}

pub(crate) fn component_estimate<T: Real>(p: &Partials<T>, c: usize, opts: &TotalsOptions<T>) -> TotalCurvatureEstimate<T> {
    let vals: Vec<T> = p.values.iter().map(|v| v[c]).collect();
    let errs: Vec<T> = p.errors.iter().map(|v| v[c]).collect();
    let mut est = extrapolate(&p.radii, &vals, &errs, opts, true);
    est.principal_value = false;
    if est.divergent {
        est.value = T::infinity();
    }
    est
}

/// ∫∫ K W dx dy over Euclidean disks around the pole, extrapolated in the same way.
pub fn cartesian_total_gauss<T: Real>(surf: &GraphSurface<T>, radii: &[T], opts: &TotalsOptions<T>) -> Result<T> {
    let [x0, y0] = surf.pole();
    let phi_rule = LegendreRule::<T>::new(16)?;
    let panels = 8usize;
    let dphi = T::TAU() / T::from_usize_lossy(panels);
    let ring = |rho: T| -> Result<[T; 1]> {
        let mut acc = T::zero();
        for k in 0..panels {
            let a = dphi * T::from_usize_lossy(k);
            acc = acc
                + phi_rule.integrate(a, a + dphi, |phi| {
                    let j = surf.jet(x0 + rho * phi.cos(), y0 + rho * phi.sin());
                    let w = (T::one() + j.fx * j.fx + j.fy * j.fy).sqrt();
                    curvatures_from_jet(&j).gauss * w * rho
                });
        }
        Ok([acc])
    };
    let last = *radii.last().ok_or_else(|| Error::InvalidInput("empty schedule".into()))?;
    let geo = geometric_breaks(T::zero(), last, (radii[0] / T::lit(8.0)).min(T::one()), T::lit(2.0));
    let breaks = merge_breaks(&[&geo, radii]);
    let mut acc = T::zero();
    let mut lo = T::zero();
    let mut vals = Vec::new();
    let mut errs = Vec::new();
    let mut err = T::zero();
    for &hi in radii {
        let (v, e) = adaptive_interval(lo, hi, &breaks, opts.tol, 100_000, ring)?;
        acc = acc + v[0];
        err = err + e[0];
        vals.push(acc);
        errs.push(err);
        lo = hi;
    }
    Ok(extrapolate(radii, &vals, &errs, opts, true).value)
}

/// Gauss–Bonnet consistency of a profile at its truncation radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussBonnet<T> {
    /// 2π∫₀^S K r ds
    pub total: T,
    pub rdot_end: T,
    /// |𝒦 + 2πṙ(S) − 2π|
    pub residual: T,
}

/// Checks 𝒦(S) = 2π(1 − ṙ(S)) with 𝒦(S) computed by direct quadrature.
pub fn gauss_bonnet_residual<T: Real>(profile: &RevolutionProfile<T>) -> Result<GaussBonnet<T>> {
    let s_max = profile.s_max();
    let oscillation = |a: T, b: T| -> Result<T> {
        let n = 400usize;
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for i in 0..=n {
            let s = a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(n);
            let d = profile.sample(s)?.dr;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        Ok(hi - lo)
    };
    let outer = oscillation(s_max * T::lit(0.5), s_max)?;
    let inner = oscillation(s_max * T::lit(0.25), s_max * T::lit(0.5))?;
    if outer > T::lit(1e-9) && outer > T::lit(0.75) * inner {
        return Err(Error::NoLimit(format!(
            "ṙ oscillates with amplitude {outer} on [S/2, S] against {inner} on [S/4, S/2]"
        )));
    }
    let geo = geometric_breaks(T::zero(), s_max, (s_max / T::lit(64.0)).min(T::one()), T::lit(2.0));
    let breaks = merge_breaks(&[&geo, profile.breakpoints()]);
    let (v, _) = adaptive_interval(T::zero(), s_max, &breaks, T::lit(1e-11), 400_000, |s| {
        let q = profile.sample(s)?;
        Ok([q.k_s * q.dz])
    })?;
    let total = T::TAU() * v[0];
    let rdot_end = profile.sample(s_max)?.dr;
    Ok(GaussBonnet { total, rdot_end, residual: (total + T::TAU() * rdot_end - T::TAU()).abs() })
}
