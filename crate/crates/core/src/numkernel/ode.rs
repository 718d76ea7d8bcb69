//! Dormand–Prince 5(4) integrator with continuous output.

use crate::error::{Error, Result};
use crate::real::Real;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<T>,
    /// Largest permitted step.
    pub h_max: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> OdeOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        Self { rtol: tol, atol: tol, h_init: None, h_max: None, max_steps: 2_000_000 }
    }
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self::with_tol(T::lit(1e-10))
    }
}

/// Accepted steps of an integration plus the continuous extension.
#[derive(Debug, Clone)]
pub struct OdeTrajectory<T> {
    dim: usize,
    abscissae: Vec<T>,
    states: Vec<T>,
    // five coefficient blocks per step
    dense: Vec<T>,
}

impl<T: Real> OdeTrajectory<T> {
    pub const INTERPOLATION_ORDER: usize = 4;

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn abscissae(&self) -> &[T] {
        &self.abscissae
    }

    pub fn steps(&self) -> usize {
        self.abscissae.len() - 1
    }

    pub fn start(&self) -> T {
        self.abscissae[0]
    }

    pub fn end(&self) -> T {
        *self.abscissae.last().expect("non-empty trajectory")
    }

    pub fn state(&self, i: usize) -> &[T] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn final_state(&self) -> &[T] {
        self.state(self.abscissae.len() - 1)
    }

    /// Evaluates the continuous extension at `s`, clamped to the integrated span.
    pub fn eval_into(&self, s: T, out: &mut [T]) {
        let n = self.abscissae.len();
        if n == 1 || s <= self.abscissae[0] {
            out.copy_from_slice(self.state(0));
            return;
        }
        if s >= self.abscissae[n - 1] {
            out.copy_from_slice(self.state(n - 1));
            return;
        }
        let k = self.abscissae.partition_point(|&x| x <= s) - 1;
        if self.abscissae[k] == s {
            out.copy_from_slice(self.state(k));
            return;
        }
        let h = self.abscissae[k + 1] - self.abscissae[k];
        let th = (s - self.abscissae[k]) / h;
        let th1 = T::one() - th;
        let d = self.dim;
        let base = k * 5 * d;
        for i in 0..d {
            let r1 = self.dense[base + i];
            let r2 = self.dense[base + d + i];
            let r3 = self.dense[base + 2 * d + i];
            let r4 = self.dense[base + 3 * d + i];
            let r5 = self.dense[base + 4 * d + i];
            out[i] = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
        }
    }

    pub fn eval(&self, s: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        self.eval_into(s, &mut out);
        out
    }

    pub fn eval_component(&self, s: T, c: usize) -> T {
        let mut buf = [T::zero(); 16];
        if self.dim <= 16 {
            self.eval_into(s, &mut buf[..self.dim]);
            buf[c]
        } else {
            self.eval(s)[c]
        }
    }
}

// Dormand–Prince tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrates `y' = rhs(s, y)` over `span` with local error below `tol`.
pub fn integrate_ode<T, F>(rhs: F, initial: &[T], span: (T, T), tol: T) -> Result<OdeTrajectory<T>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
{
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    integrate_ode_with(rhs, initial, span, &OdeOptions::with_tol(tol), |_, _| false)
}

/// Like [`integrate_ode`] with explicit options and a stop predicate that is
/// checked after every accepted step; returning `true` ends the integration there.
pub fn integrate_ode_with<T, F, S>(
    mut rhs: F,
    initial: &[T],
    span: (T, T),
    opts: &OdeOptions<T>,
    mut stop: S,
) -> Result<OdeTrajectory<T>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
    S: FnMut(T, &[T]) -> bool,
{
    let (s0, s1) = span;
    if !(s1 > s0) || !s0.is_finite() || !s1.is_finite() {
        return Err(Error::InvalidInput("integration span must be finite and increasing".into()));
    }
    if !(opts.rtol > T::zero()) || !(opts.atol > T::zero()) {
        return Err(Error::InvalidInput("tolerances must be positive".into()));
    }
    let d = initial.len();
    if d == 0 {
        return Err(Error::InvalidInput("empty state".into()));
    }
    let l = T::lit;
    let mut traj = OdeTrajectory {
        dim: d,
        abscissae: vec![s0],
        states: initial.to_vec(),
        dense: Vec::new(),
    };
    let mut y = initial.to_vec();
    let mut k1 = vec![T::zero(); d];
    let mut k2 = vec![T::zero(); d];
    let mut k3 = vec![T::zero(); d];
    let mut k4 = vec![T::zero(); d];
    let mut k5 = vec![T::zero(); d];
    let mut k6 = vec![T::zero(); d];
    let mut k7 = vec![T::zero(); d];
    let mut tmp = vec![T::zero(); d];
    let mut ynew = vec![T::zero(); d];
    rhs(s0, &y, &mut k1);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(Error::IntegrationFailure { last_good: s0.as_f64(), reason: "non-finite derivative".into() });
    }
    let span_len = s1 - s0;
    let h_max = opts.h_max.unwrap_or(span_len).min(span_len);
    let mut h = match opts.h_init {
        Some(h) => h.min(h_max),
        None => {
            let sc = |i: usize| opts.atol + opts.rtol * y[i].abs();
            let d0 = (0..d).map(|i| (y[i] / sc(i)).powi(2)).sum::<T>().sqrt();
            let d1 = (0..d).map(|i| (k1[i] / sc(i)).powi(2)).sum::<T>().sqrt();
            let h0 = if d0 < l(1e-5) || d1 < l(1e-5) { l(1e-6) } else { l(0.01) * d0 / d1 };
            h0.min(h_max).max(l(1e-12) * span_len)
        }
    };
    let mut s = s0;
    let mut steps = 0usize;
    let h_floor = T::epsilon() * l(64.0);
    loop {
        if s >= s1 {
            break;
        }
        if steps >= opts.max_steps {
            return Err(Error::IntegrationFailure { last_good: s.as_f64(), reason: "step budget exhausted".into() });
        }
        let mut last = false;
        if s + h >= s1 || (s1 - s - h) < l(1e-3) * h {
            h = s1 - s;
            last = true;
        }
        if h <= h_floor * s.abs().max(T::one()) {
            return Err(Error::IntegrationFailure { last_good: s.as_f64(), reason: "step size underflow".into() });
        }
        for i in 0..d {
            tmp[i] = y[i] + h * l(A21) * k1[i];
        }
        rhs(s + l(C2) * h, &tmp, &mut k2);
        for i in 0..d {
            tmp[i] = y[i] + h * (l(A31) * k1[i] + l(A32) * k2[i]);
        }
        rhs(s + l(C3) * h, &tmp, &mut k3);
        for i in 0..d {
            tmp[i] = y[i] + h * (l(A41) * k1[i] + l(A42) * k2[i] + l(A43) * k3[i]);
        }
        rhs(s + l(C4) * h, &tmp, &mut k4);
        for i in 0..d {
            tmp[i] = y[i] + h * (l(A51) * k1[i] + l(A52) * k2[i] + l(A53) * k3[i] + l(A54) * k4[i]);
        }
        rhs(s + l(C5) * h, &tmp, &mut k5);
        for i in 0..d {
            tmp[i] = y[i]
                + h * (l(A61) * k1[i] + l(A62) * k2[i] + l(A63) * k3[i] + l(A64) * k4[i] + l(A65) * k5[i]);
        }
        let s_new = if last { s1 } else { s + h };
        rhs(s_new, &tmp, &mut k6);
        for i in 0..d {
            ynew[i] = y[i]
                + h * (l(A71) * k1[i] + l(A73) * k3[i] + l(A74) * k4[i] + l(A75) * k5[i] + l(A76) * k6[i]);
        }
        rhs(s_new, &ynew, &mut k7);
        let mut err = T::zero();
        let mut finite = true;
        for i in 0..d {
            let e = h
                * (l(E1) * k1[i] + l(E3) * k3[i] + l(E4) * k4[i] + l(E5) * k5[i] + l(E6) * k6[i]
                    + l(E7) * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err = err + (e / sc).powi(2);
            finite &= ynew[i].is_finite() && k7[i].is_finite();
        }
        err = (err / T::from_usize_lossy(d)).sqrt();
        steps += 1;
        if !finite || !err.is_finite() {
            h = h * l(0.25);
            continue;
        }
        if err <= T::one() {
            // continuous extension
            let base = traj.dense.len();
            traj.dense.resize(base + 5 * d, T::zero());
            let blk = &mut traj.dense[base..];
            for i in 0..d {
                let dy = ynew[i] - y[i];
                let r3 = h * k1[i] - dy;
                blk[i] = y[i];
                blk[d + i] = dy;
                blk[2 * d + i] = r3;
                blk[3 * d + i] = dy - h * k7[i] - r3;
                blk[4 * d + i] = h
                    * (l(D1) * k1[i] + l(D3) * k3[i] + l(D4) * k4[i] + l(D5) * k5[i] + l(D6) * k6[i]
                        + l(D7) * k7[i]);
            }
            s = s_new;
            y.copy_from_slice(&ynew);
            k1.copy_from_slice(&k7);
            traj.abscissae.push(s);
            traj.states.extend_from_slice(&y);
            if stop(s, &y) {
                break;
            }
            let fac = if err == T::zero() { l(5.0) } else { (l(0.9) * err.powf(l(-0.2))).min(l(5.0)).max(l(0.2)) };
            h = (h * fac).min(h_max);
        } else {
            let fac = (l(0.9) * err.powf(l(-0.2))).max(l(0.1));
            h = h * fac;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_solution() {
        let t = integrate_ode(|_, _, dy: &mut [f64]| dy[0] = 0.0, &[3.5], (0.0, 10.0), 1e-10).unwrap();
        for s in [0.0, 1.3, 7.7, 10.0] {
            assert_eq!(t.eval(s)[0], 3.5);
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let tol = 1e-10;
        let t = integrate_ode(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            &[0.0, 1.0],
            (0.0, 2.0),
            tol,
        )
        .unwrap();
        let v = t.eval(std::f64::consts::FRAC_PI_2);
        assert!((v[0] - 1.0).abs() <= 10.0 * tol);
    }

    #[test]
    fn exponential_growth() {
        let tol = 1e-10;
        let t = integrate_ode(|_, y: &[f64], dy: &mut [f64]| dy[0] = y[0], &[1.0], (0.0, 1.0), tol).unwrap();
        assert!((t.final_state()[0] - std::f64::consts::E).abs() <= 10.0 * tol);
    }

    #[test]
    fn nodes_are_exact() {
        let t = integrate_ode(|s, _, dy: &mut [f64]| dy[0] = s.cos(), &[0.0], (0.0, 5.0), 1e-8).unwrap();
        for i in 0..t.abscissae().len() {
            assert_eq!(t.eval(t.abscissae()[i])[0], t.state(i)[0]);
        }
    }

    #[test]
    fn blow_up_reports_last_good() {
        let r = integrate_ode(|_, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0], &[1.0], (0.0, 2.0), 1e-10);
        match r {
            Err(Error::IntegrationFailure { last_good, .. }) => assert!(last_good < 1.0 && last_good > 0.9),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn stop_predicate() {
        let t = integrate_ode_with(
            |_, _, dy: &mut [f64]| dy[0] = -1.0,
            &[1.0],
            (0.0, 5.0),
            &OdeOptions::with_tol(1e-10),
            |_, y| y[0] < 0.0,
        )
        .unwrap();
        assert!(t.end() < 5.0 && t.final_state()[0] < 0.0);
    }
}
