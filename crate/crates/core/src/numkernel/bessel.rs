//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Power series with the logarithmic term for x ≤ 2; Steed's continued
//! fraction (Temme's variant) beyond.

use crate::error::{Error, Result};
use crate::real::Real;

const SWITCH: f64 = 2.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Both representations of K_ν(x) plus an underflow marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselValue<T> {
    /// e^x · K_ν(x), always representable.
    pub scaled: T,
    /// K_ν(x); zero when it underflows.
    pub value: T,
    pub underflow: bool,
}

fn check<T: Real>(order: u32, x: T) -> Result<()> {
    if order > 1 {
        return Err(Error::InvalidInput(format!("order {order} not supported (0 or 1)")));
    }
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs finite x > 0, got {x}")));
    }
    Ok(())
}

/// K_ν(x) for ν ∈ {0, 1}. Returns 0 where the value underflows; see
/// [`bessel_k_eval`] for the scaled form.
pub fn bessel_k<T: Real>(order: u32, x: T) -> Result<T> {
    Ok(bessel_k_eval(order, x)?.value)
}

/// e^x · K_ν(x) for ν ∈ {0, 1}.
pub fn bessel_k_scaled<T: Real>(order: u32, x: T) -> Result<T> {
    Ok(bessel_k_eval(order, x)?.scaled)
}

pub fn bessel_k_eval<T: Real>(order: u32, x: T) -> Result<BesselValue<T>> {
    check(order, x)?;
    if x <= T::lit(SWITCH) {
        let (k0, k1) = series(x);
        let value = if order == 0 { k0 } else { k1 };
        Ok(BesselValue { scaled: value * x.exp(), value, underflow: false })
    } else {
        let (k0s, k1s) = continued_fraction(x);
        let scaled = if order == 0 { k0s } else { k1s };
        let value = scaled * (-x).exp();
        let underflow = value == T::zero() || value < T::min_positive_value();
        Ok(BesselValue { scaled, value: if underflow { T::zero() } else { value }, underflow })
    }
}

/// (K₀, K₁) by ascending series.
fn series<T: Real>(x: T) -> (T, T) {
    let l = T::lit;
    let t = x * x * l(0.25);
    let lg = (x * l(0.5)).ln();
    let eps = T::epsilon() * l(0.25);
    // k-th terms: t^k/(k!)² and t^k/(k!(k+1)!)
    let mut a = T::one();
    let mut b = T::one();
    let mut harm = T::zero();
    let mut i0 = T::zero();
    let mut i1s = T::zero();
    let mut s0 = T::zero();
    let mut s1 = T::zero();
    let g = l(EULER_GAMMA);
    let mut k = 0usize;
    loop {
        let psi1 = harm - g;
        let kf = T::from_usize_lossy(k + 1);
        let psi2 = psi1 + T::one() / kf;
        i0 = i0 + a;
        i1s = i1s + b;
        s0 = s0 + psi1 * a;
        s1 = s1 + (psi1 + psi2) * b;
        if a.abs() <= eps * i0.abs() && k > 0 {
            break;
        }
        k += 1;
        let kf = T::from_usize_lossy(k);
        harm = harm + T::one() / kf;
        a = a * t / (kf * kf);
        b = b * t / (kf * (kf + T::one()));
        if k > 200 {
            break;
        }
    }
    let k0 = -lg * i0 + s0;
    let i1 = x * l(0.5) * i1s;
    let k1 = T::one() / x + lg * i1 - x * l(0.25) * s1;
    (k0, k1)
}

/// (e^x K₀, e^x K₁) by Steed's continued fraction for x > 2.
fn continued_fraction<T: Real>(x: T) -> (T, T) {
    let l = T::lit;
    let eps = T::epsilon();
    let a1 = l(0.25);
    let mut b = l(2.0) * (T::one() + x);
    let mut d = T::one() / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = T::zero();
    let mut q2 = T::one();
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = T::one() + q * delh;
    for i in 2..100_000usize {
        let fi = T::from_usize_lossy(i);
        a = a - l(2.0) * (fi - T::one());
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q = q + c * qnew;
        b = b + l(2.0);
        d = T::one() / (b + a * d);
        delh = (b * d - T::one()) * delh;
        h = h + delh;
        let dels = q * delh;
        s = s + dels;
        if (dels / s).abs() < eps {
            break;
        }
    }
    let k0s = (T::PI() / (l(2.0) * x)).sqrt() / s;
    let k1s = k0s * (x + l(0.5) - a1 * h) / x;
    (k0s, k1s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // values from standard tables
        let cases = [
            (0, 1.0, 0.421_024_438_240_708_3),
            (1, 1.0, 0.601_907_230_197_234_6),
            (0, 2.0, 0.113_893_872_749_533_4),
            (1, 2.0, 0.139_865_881_816_522_4),
            (0, 0.1, 2.427_069_024_702_017),
            (1, 0.1, 9.853_844_780_870_606),
            (0, 5.0, 0.003_691_098_334_042_594),
            (1, 5.0, 0.004_044_613_445_452_164),
        ];
        for (n, x, v) in cases {
            let got = bessel_k::<f64>(n, x).unwrap();
            assert!(((got - v) / v).abs() < 1e-12, "K{n}({x}) = {got}, want {v}");
        }
    }

    #[test]
    fn continuity_at_switch() {
        for n in 0..2 {
            let (k0, k1) = series(2.0f64);
            let (s0, s1) = continued_fraction(2.0f64);
            let e = 2.0f64.exp();
            let (a, b) = if n == 0 { (k0, s0 / e) } else { (k1, s1 / e) };
            assert!(((a - b) / a).abs() < 1e-13);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k::<f64>(0, 0.0).is_err());
        assert!(bessel_k::<f64>(1, -1.0).is_err());
        assert!(bessel_k::<f64>(2, 1.0).is_err());
    }

    #[test]
    fn underflow_flagged() {
        let v = bessel_k_eval::<f64>(0, 800.0).unwrap();
        assert!(v.underflow);
        assert_eq!(v.value, 0.0);
        assert!(v.scaled > 0.0);
        let v = bessel_k_eval::<f32>(1, 120.0).unwrap();
        assert!(v.underflow && v.scaled > 0.0);
    }
}
