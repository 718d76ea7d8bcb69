//! Variational trial functions and the shifted quadratic form Q̃.
//!
//! A negative Q̃[Ψ] for an admissible Ψ puts spectrum below κ₁².

pub mod certify;
pub mod form;
pub mod trial;

use crate::error::{Error, Result};
use crate::layer::LayerSpec;
use crate::numkernel::bessel::bessel_k_eval;
use crate::numkernel::quadrature::{geometric_breaks, merge_breaks};
use crate::real::Real;
use crate::surface::adaptive::adaptive_interval;
use crate::surface::ThetaRule;

pub use certify::{certify, Attempt, Certificate, CertifyOptions, Strategy, Verdict as CertificateVerdict};
pub use form::{evaluate_form, evaluate_form_with, polarization, FormEvaluation, FormOptions};
pub use trial::{Bump, Combination, Deformation, LogRamp, Macdonald, Trial, TrialCoefficients, TrialFamily, TrialFunction};

/// ψ_σ = φ_σ χ₁
pub fn gj_trial<T: Real>(_layer: &LayerSpec<T>, s0: T, sigma: T) -> Result<TrialFunction<T>> {
    TrialFunction::goldstone_jaffe(sigma, s0)
}

/// ∫₀^∞ |φ̇_σ|² s ds, computed in x = σs.
pub fn derphi_integral<T: Real>(s0: T, sigma: T) -> Result<T> {
    if !(s0 > T::zero()) || !(sigma > T::zero()) {
        return Err(Error::InvalidInput("derphi_integral needs s₀, σ > 0".into()));
    }
    let x0 = sigma * s0;
    let k0 = bessel_k_eval(0, x0)?.scaled;
    let end = x0 + T::lit(46.0);
    let breaks = geometric_breaks(x0, end, x0.max(T::lit(1e-3)) * T::lit(0.25), T::lit(1.5));
    let (v, _) = adaptive_interval(x0, end, &breaks, T::lit(1e-12), 100_000, |x| {
        let k1 = bessel_k_eval(1, x)?.scaled;
        let e = (-(x - x0) * T::lit(2.0)).exp();
        Ok([k1 * k1 * e * x])
    })?;
    Ok(v[0] / (k0 * k0))
}

/// ψ_σ + ε j u χ₁
pub fn deformed_trial<T: Real>(_layer: &LayerSpec<T>, sigma: T, s0: T, eps: T, bump: Bump<T>) -> Result<TrialFunction<T>> {
    TrialFunction::deformed(sigma, s0, eps, bump)
}

/// Sign of M on the support of a bump candidate: Some(±1) if constant and not identically zero.
fn mean_sign_on<T: Real>(layer: &LayerSpec<T>, bump: &Bump<T>) -> Result<Option<T>> {
    let chart = layer.chart();
    let (mut pos, mut neg) = (false, false);
    let n_s = 24;
    let thetas: Vec<T> = match bump.window {
        None if chart.is_axisymmetric() => vec![T::zero()],
        None => (0..64).map(|i| T::TAU() * T::from_usize_lossy(i) / T::lit(64.0)).collect(),
        Some((c, w)) => (1..24).map(|i| c - w + (w + w) * T::from_usize_lossy(i) / T::lit(24.0)).collect(),
    };
    let tiny = T::lit(1e-12);
    for i in 1..n_s {
        let s = bump.s_lo + (bump.s_hi - bump.s_lo) * T::from_usize_lossy(i) / T::from_usize_lossy(n_s);
        for &th in &thetas {
            let m = chart.sample(s, th)?.curvature.mean;
            pos |= m > tiny;
            neg |= m < -tiny;
        }
    }
    Ok(match (pos, neg) {
        (true, false) => Some(T::one()),
        (false, true) => Some(-T::one()),
        _ => None,
    })
}

/// Finds a bump inside s < s₀ on which M keeps one sign: the default annulus
/// [s₀/2, 3s₀/4] first, then other annuli, then angular sectors.
pub fn find_bump<T: Real>(layer: &LayerSpec<T>, s0: T) -> Result<Bump<T>> {
    let annuli = [(0.5, 0.75), (0.25, 0.5), (0.75, 0.95), (0.1, 0.25), (0.05, 0.1)];
    let mut candidates = Vec::new();
    for (lo, hi) in annuli {
        candidates.push(Bump::radial(s0 * T::lit(lo), s0 * T::lit(hi))?);
    }
    for (lo, hi) in annuli {
        for k in 0..8 {
            let c = T::PI() * T::from_usize_lossy(k) / T::lit(4.0);
            candidates.push(Bump::radial(s0 * T::lit(lo), s0 * T::lit(hi))?.with_window(c, T::PI() * T::lit(0.2)));
        }
    }
    for b in candidates {
        if mean_sign_on(layer, &b)?.is_some() {
            return Ok(b);
        }
    }
    Err(Error::Capability("no annulus or sector inside s < s₀ where M keeps one sign".into()))
}

/// Polarization value Q̃(Θ, ψ_σ) against the surface integral −(j, M)_g.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedTerm<T> {
    pub polarization: T,
    pub polarization_error: T,
    pub surface_integral: T,
}

pub fn mixed_term<T: Real>(layer: &LayerSpec<T>, sigma: T, s0: T, bump: Bump<T>) -> Result<MixedTerm<T>> {
    mixed_term_with(layer, sigma, s0, bump, &FormOptions::default())
}

pub fn mixed_term_with<T: Real>(layer: &LayerSpec<T>, sigma: T, s0: T, bump: Bump<T>, opts: &FormOptions<T>) -> Result<MixedTerm<T>> {
    if bump.s_hi > s0 {
        return Err(Error::InvalidInput(format!("bump support ends at {} beyond s₀ = {s0}", bump.s_hi)));
    }
    let psi = TrialFunction::goldstone_jaffe(sigma, s0)?;
    let theta = Deformation { bump };
    let (p, e) = polarization(layer, &theta, &psi, opts)?;
    Ok(MixedTerm { polarization: p, polarization_error: e, surface_integral: -bump_mean_pairing(layer, &bump)? })
}

/// (j, M)_g by an adaptive radial rule on each θ node.
pub fn bump_mean_pairing<T: Real>(layer: &LayerSpec<T>, bump: &Bump<T>) -> Result<T> {
    let chart = layer.chart();
    let rule = if chart.fan().is_some() {
        chart.theta_rule()
    } else if bump.window.is_none() {
        ThetaRule::single()
    } else {
        ThetaRule::uniform(256)
    };
    let mut total = T::zero();
    for node in &rule.fine {
        let (v, _) = adaptive_interval(bump.s_lo, bump.s_hi, &[], T::lit(1e-12), 10_000, |s| {
            let p = chart.sample_node(s, node)?;
            Ok([bump.eval(s, node.theta).0 * p.curvature.mean * p.r])
        })?;
        total = total + node.weight * v[0];
    }
    Ok(total)
}

/// (1 + M u) ψ_σ
pub fn thin_trial<T: Real>(_layer: &LayerSpec<T>, sigma: T, s0: T) -> Result<TrialFunction<T>> {
    TrialFunction::thin_layer(sigma, s0)
}

/// (φ_n + ε ϕ_n u) χ₁ with support [n, n³]; needs an axisymmetric chart reaching n³.
pub fn symmetric_log_trial<T: Real>(layer: &LayerSpec<T>, n: usize, eps: T) -> Result<TrialFunction<T>> {
    if !layer.chart().is_axisymmetric() {
        return Err(Error::Capability("symmetric-log trials need a surface of revolution".into()));
    }
    let t = TrialFunction::symmetric_log(n, eps)?;
    let b3 = t.support_end();
    if b3 > layer.chart().s_max() {
        return Err(Error::Truncation(format!("support end b₃ = {b3} beyond chart radius {}", layer.chart().s_max())));
    }
    Ok(t)
}

/// (φ_n, M ϕ_n)_g = 2π ∫ φ_n² M r / s ds
pub fn log_pairing<T: Real>(layer: &LayerSpec<T>, ramp: &LogRamp<T>) -> Result<T> {
    let chart = layer.chart();
    let breaks = merge_breaks(&[&geometric_breaks(ramp.b1, ramp.b3, ramp.b1 * T::lit(0.25), T::lit(1.5)), &[ramp.b2]]);
    let (v, _) = adaptive_interval(ramp.b1, ramp.b3, &breaks, T::lit(1e-12), 100_000, |s| {
        let p = chart.sample(s, T::zero())?;
        let (f, _) = ramp.eval(s);
        Ok([f * f * p.curvature.mean * p.r / s])
    })?;
    Ok(T::TAU() * v[0])
}

/// ε_n = (φ_n, M ϕ_n)_g⁻¹
pub fn epsilon_choice<T: Real>(layer: &LayerSpec<T>, n: usize) -> Result<T> {
    if !layer.chart().is_axisymmetric() {
        return Err(Error::Capability("ε_n is defined for surfaces of revolution".into()));
    }
    if n < 2 {
        return Err(Error::InvalidInput("n ≥ 2 required".into()));
    }
    let b1 = T::from_usize_lossy(n);
    let ramp = LogRamp::new(b1, b1 * b1, b1 * b1 * b1)?;
    if ramp.b3 > layer.chart().s_max() {
        return Err(Error::Truncation(format!("support end {} beyond chart radius {}", ramp.b3, layer.chart().s_max())));
    }
    let pairing = log_pairing(layer, &ramp)?;
    if pairing.abs() < T::lit(1e-12) {
        return Err(Error::DegeneratePairing(pairing.as_f64()));
    }
    Ok(T::one() / pairing)
}
