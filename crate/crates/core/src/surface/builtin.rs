//! Closed-form and ODE-built profiles of the standard example surfaces.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::surface::revolution::{revolution_from_meridian, MeridianSpec, ProfileJet, RadialHeight, RevolutionProfile};

/// Upper sheet z = z₀√(1 + ρ²) of the two-sheeted hyperboloid; ṙ → 1/√(1 + z₀²).
pub fn hyperboloid<T: Real>(z0: T, s_max: T, tol: T) -> Result<RevolutionProfile<T>> {
    if !(z0 > T::zero()) {
        return Err(Error::InvalidInput("hyperboloid needs z0 > 0".into()));
    }
    let h = RadialHeight::new(move |rho: T| {
        let q = T::one() + rho * rho;
        let sq = q.sqrt();
        [z0 * sq, z0 * rho / sq, z0 / (q * sq), -T::lit(3.0) * z0 * rho / (q * q * sq)]
    });
    RevolutionProfile::from_height(h, s_max, tol)
}

/// Paraboloid of revolution z = cρ².
pub fn paraboloid<T: Real>(c: T, s_max: T, tol: T) -> Result<RevolutionProfile<T>> {
    let h = RadialHeight::new(move |rho: T| [c * rho * rho, T::lit(2.0) * c * rho, T::lit(2.0) * c, T::zero()]);
    RevolutionProfile::from_height(h, s_max, tol)
}

/// Meridian curvature k_s(s) = s⁻² sin s²; the meridian angle tends to √(π/2).
pub fn oscillating_meridian<T: Real>(s_max: T, tol: T) -> Result<RevolutionProfile<T>> {
    let spec = MeridianSpec::new(
        |s: T| {
            let q = s * s;
            if q < T::lit(1e-4) {
                T::one() - q * q / T::lit(6.0)
            } else {
                q.sin() / q
            }
        },
        s_max,
    )
    .with_derivative(|s: T| {
        let q = s * s;
        if q < T::lit(1e-4) {
            -T::lit(2.0) * q * s / T::lit(3.0)
        } else {
            T::lit(2.0) * (q * q.cos() - q.sin()) / (q * s)
        }
    });
    revolution_from_meridian(&spec, tol)
}

/// Hemisphere of radius R (s ≤ πR/2) continued by the cylinder of radius R.
pub fn capped_cylinder<T: Real>(radius: T, s_max: T) -> Result<RevolutionProfile<T>> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let joint = T::FRAC_PI_2() * radius;
    let k = T::one() / radius;
    let f = move |s: T| {
        if s <= joint {
            let t = s * k;
            ProfileJet { r: radius * t.sin(), z: radius * (T::one() - t.cos()), dr: t.cos(), dz: t.sin(), k_s: k, dk_s: T::zero() }
        } else {
            ProfileJet { r: radius, z: radius + (s - joint), dr: T::zero(), dz: T::one(), k_s: T::zero(), dk_s: T::zero() }
        }
    };
    let breaks = if joint < s_max { vec![joint] } else { Vec::new() };
    Ok(RevolutionProfile::closed(f, s_max, breaks))
}
