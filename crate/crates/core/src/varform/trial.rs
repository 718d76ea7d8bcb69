//! Trial functions of the form (A(s, θ) + B(s, θ) u) χ₁(u) with closed-form derivatives.

use crate::error::{Error, Result};
use crate::numkernel::bessel::bessel_k_eval;
use crate::real::Real;
use crate::surface::ChartPoint;

/// A, B and their (s, θ) derivatives at one chart point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialCoefficients<T> {
    pub a: T,
    pub a_s: T,
    pub a_t: T,
    pub b: T,
    pub b_s: T,
    pub b_t: T,
}

impl<T: Real> TrialCoefficients<T> {
    pub fn zero() -> Self {
        Self { a: T::zero(), a_s: T::zero(), a_t: T::zero(), b: T::zero(), b_s: T::zero(), b_t: T::zero() }
    }

    pub fn scale(self, c: T) -> Self {
        Self { a: self.a * c, a_s: self.a_s * c, a_t: self.a_t * c, b: self.b * c, b_s: self.b_s * c, b_t: self.b_t * c }
    }

    pub fn add(self, o: Self) -> Self {
        Self {
            a: self.a + o.a,
            a_s: self.a_s + o.a_s,
            a_t: self.a_t + o.a_t,
            b: self.b + o.b,
            b_s: self.b_s + o.b_s,
            b_t: self.b_t + o.b_t,
        }
    }
}

/// Anything the form evaluator can integrate.
pub trait Trial<T: Real> {
    fn coefficients(&self, p: &ChartPoint<T>) -> Result<TrialCoefficients<T>>;
    /// Radius beyond which the trial is zero or negligible.
    fn support_end(&self) -> T;
    /// Radii where derivatives jump, plus panel hints for tails.
    fn breaks(&self) -> Vec<T>;
    fn is_radial(&self) -> bool;
    /// True if the trial is compactly supported and must fit inside the chart.
    fn compact(&self) -> bool;
}

/// Smooth bump exp(−1/(1−t²)) on an annulus, optionally times the same profile on an arc of θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump<T> {
    pub s_lo: T,
    pub s_hi: T,
    /// (centre, half-width) of the angular window
    pub window: Option<(T, T)>,
    /// overall factor (a sign flip gives −j)
    pub amplitude: T,
}

fn bump1<T: Real>(t: T) -> (T, T) {
    if t.abs() >= T::one() {
        return (T::zero(), T::zero());
    }
    let q = T::one() - t * t;
    let v = (T::one() - T::one() / q).exp();
    (v, v * (-T::lit(2.0) * t / (q * q)))
}

impl<T: Real> Bump<T> {
    pub fn radial(s_lo: T, s_hi: T) -> Result<Self> {
        if !(s_lo > T::zero() && s_hi > s_lo) {
            return Err(Error::InvalidInput(format!("bump annulus [{s_lo}, {s_hi}] is empty or touches the pole")));
        }
        Ok(Self { s_lo, s_hi, window: None, amplitude: T::one() })
    }

    pub fn with_window(mut self, centre: T, half_width: T) -> Self {
        self.window = Some((centre, half_width));
        self
    }

    pub fn negated(mut self) -> Self {
        self.amplitude = -self.amplitude;
        self
    }

    /// (j, ∂_s j, ∂_θ j); peak value `amplitude`.
    fn panel_breaks(&self) -> Vec<T> {
        let h = (self.s_hi - self.s_lo) / T::lit(16.0);
        (0..=16).map(|i| self.s_lo + h * T::from_usize_lossy(i)).collect()
    }

    pub fn eval(&self, s: T, theta: T) -> (T, T, T) {
        let h = (self.s_hi - self.s_lo) * T::lit(0.5);
        let (rv, rd) = bump1((s - (self.s_lo + self.s_hi) * T::lit(0.5)) / h);
        let (wv, wd) = match self.window {
            None => (T::one(), T::zero()),
            Some((c, w)) => {
                let mut d = (theta - c) % T::TAU();
                if d > T::PI() {
                    d = d - T::TAU();
                } else if d < -T::PI() {
                    d = d + T::TAU();
                }
                let (v, dv) = bump1(d / w);
                (v, dv / w)
            }
        };
        let amp = self.amplitude;
        (amp * rv * wv, amp * rd / h * wv, amp * rv * wd)
    }
}

/// Radial profile φ_σ = min(1, K₀(σs)/K₀(σs₀)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Macdonald<T> {
    pub sigma: T,
    pub s0: T,
    k0_scaled_s0: T,
}

/// σs past which φ_σ/φ_σ(s₀) < e⁻⁴⁶
const TAIL_SPAN: f64 = 46.0;

impl<T: Real> Macdonald<T> {
    pub fn new(sigma: T, s0: T) -> Result<Self> {
        if !(sigma > T::zero()) || !(s0 > T::zero()) {
            return Err(Error::InvalidInput(format!("need σ > 0 and s₀ > 0, got σ = {sigma}, s₀ = {s0}")));
        }
        let k = bessel_k_eval(0, sigma * s0)?;
        Ok(Self { sigma, s0, k0_scaled_s0: k.scaled })
    }

    /// (φ, φ̇)
    pub fn eval(&self, s: T) -> (T, T) {
        if s <= self.s0 {
            return (T::one(), T::zero());
        }
        let x = self.sigma * s;
        let decay = (-(x - self.sigma * self.s0)).exp();
        if decay == T::zero() {
            return (T::zero(), T::zero());
        }
        let k0 = bessel_k_eval(0, x).expect("positive argument").scaled;
        let k1 = bessel_k_eval(1, x).expect("positive argument").scaled;
        let c = decay / self.k0_scaled_s0;
        (k0 * c, -self.sigma * k1 * c)
    }

    pub fn support_end(&self) -> T {
        self.s0 + T::lit(TAIL_SPAN) / self.sigma
    }

    fn breaks(&self) -> Vec<T> {
        let mut out = vec![self.s0];
        let step = T::lit(0.5) / self.sigma;
        let mut x = self.s0;
        let mut h = step.min(self.s0.max(T::lit(0.05)) * T::lit(0.5));
        let end = self.support_end();
        while x < end {
            x = (x + h).min(end);
            out.push(x);
            h = (h * T::lit(1.5)).min(step);
        }
        out
    }
}

/// Log ramps on [b₁, b₂] (up) and [b₂, b₃] (down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRamp<T> {
    pub b1: T,
    pub b2: T,
    pub b3: T,
}

impl<T: Real> LogRamp<T> {
    pub fn new(b1: T, b2: T, b3: T) -> Result<Self> {
        if !(b1 > T::zero() && b2 > b1 && b3 > b2) {
            return Err(Error::InvalidInput(format!("need 0 < b₁ < b₂ < b₃, got {b1}, {b2}, {b3}")));
        }
        Ok(Self { b1, b2, b3 })
    }

    /// (φ_n, φ̇_n)
    pub fn eval(&self, s: T) -> (T, T) {
        if s <= self.b1 || s >= self.b3 {
            (T::zero(), T::zero())
        } else if s <= self.b2 {
            let l = (self.b2 / self.b1).ln();
            ((s / self.b1).ln() / l, T::one() / (s * l))
        } else {
            let l = (self.b3 / self.b2).ln();
            (T::one() - (s / self.b2).ln() / l, -T::one() / (s * l))
        }
    }

    /// (ϕ_n, ϕ̇_n) with ϕ_n = φ_n / s
    pub fn eval_over_s(&self, s: T) -> (T, T) {
        let (v, d) = self.eval(s);
        (v / s, d / s - v / (s * s))
    }

    fn breaks(&self) -> Vec<T> {
        let mut out = Vec::new();
        for (lo, hi) in [(self.b1, self.b2), (self.b2, self.b3)] {
            let mut x = lo;
            while x < hi {
                out.push(x);
                x = x * T::lit(1.5);
            }
        }
        out.push(self.b3);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialFamily<T> {
    GoldstoneJaffe { sigma: T, s0: T },
    Deformed { sigma: T, s0: T, eps: T, bump: Bump<T> },
    ThinLayer { sigma: T, s0: T },
    SymmetricLog { n: usize, b1: T, b2: T, b3: T, eps: T },
}

impl<T: Real> TrialFamily<T> {
    pub fn name(&self) -> &'static str {
        match self {
            TrialFamily::GoldstoneJaffe { .. } => "goldstone-jaffe",
            TrialFamily::Deformed { .. } => "deformed",
            TrialFamily::ThinLayer { .. } => "thin-layer",
            TrialFamily::SymmetricLog { .. } => "symmetric-log",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape<T> {
    Gj(Macdonald<T>),
    Deformed(Macdonald<T>, T, Bump<T>),
    Thin(Macdonald<T>),
    Log(LogRamp<T>, T),
}

/// One member of the four trial families.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFunction<T> {
    family: TrialFamily<T>,
    shape: Shape<T>,
}

impl<T: Real> TrialFunction<T> {
    pub fn goldstone_jaffe(sigma: T, s0: T) -> Result<Self> {
        let m = Macdonald::new(sigma, s0)?;
        Ok(Self { family: TrialFamily::GoldstoneJaffe { sigma, s0 }, shape: Shape::Gj(m) })
    }

    /// ψ_σ + ε j u χ₁; the bump must sit inside s < s₀ where φ_σ = 1.
    pub fn deformed(sigma: T, s0: T, eps: T, bump: Bump<T>) -> Result<Self> {
        if bump.s_hi > s0 {
            return Err(Error::InvalidInput(format!("bump support ends at {} beyond s₀ = {s0}", bump.s_hi)));
        }
        let m = Macdonald::new(sigma, s0)?;
        Ok(Self { family: TrialFamily::Deformed { sigma, s0, eps, bump }, shape: Shape::Deformed(m, eps, bump) })
    }

    /// (1 + M u) ψ_σ
    pub fn thin_layer(sigma: T, s0: T) -> Result<Self> {
        let m = Macdonald::new(sigma, s0)?;
        Ok(Self { family: TrialFamily::ThinLayer { sigma, s0 }, shape: Shape::Thin(m) })
    }

    /// (φ_n + ε ϕ_n u) χ₁ with (b₁, b₂, b₃) = (n, n², n³).
    pub fn symmetric_log(n: usize, eps: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("symmetric-log trials need n ≥ 2".into()));
        }
        let b1 = T::from_usize_lossy(n);
        Self::symmetric_log_with(n, b1, b1 * b1, b1 * b1 * b1, eps)
    }

    pub fn symmetric_log_with(n: usize, b1: T, b2: T, b3: T, eps: T) -> Result<Self> {
        let r = LogRamp::new(b1, b2, b3)?;
        Ok(Self { family: TrialFamily::SymmetricLog { n, b1, b2, b3, eps }, shape: Shape::Log(r, eps) })
    }

    pub fn family(&self) -> &TrialFamily<T> {
        &self.family
    }

    /// Same trial with another ε (deformed and symmetric-log families).
    pub fn with_eps(&self, eps: T) -> Self {
        let mut out = self.clone();
        match (&mut out.family, &mut out.shape) {
            (TrialFamily::Deformed { eps: e, .. }, Shape::Deformed(_, e2, _)) | (TrialFamily::SymmetricLog { eps: e, .. }, Shape::Log(_, e2)) => {
                *e = eps;
                *e2 = eps;
            }
            _ => {}
        }
        out
    }

    /// Radial factor φ and φ̇ (φ_n for the log family).
    pub fn radial(&self, s: T) -> (T, T) {
        match &self.shape {
            Shape::Gj(m) | Shape::Deformed(m, _, _) | Shape::Thin(m) => m.eval(s),
            Shape::Log(r, _) => r.eval(s),
        }
    }

    /// Ψ(s, θ, u) at a chart point.
    pub fn value(&self, p: &ChartPoint<T>, u: T, half_width: T) -> Result<T> {
        let c = self.coefficients(p)?;
        let chi = crate::layer::TransverseMode::new(half_width, 1)?;
        Ok((c.a + c.b * u) * chi.value(u))
    }
}

impl<T: Real> Trial<T> for TrialFunction<T> {
    fn coefficients(&self, p: &ChartPoint<T>) -> Result<TrialCoefficients<T>> {
        let mut c = TrialCoefficients::zero();
        match &self.shape {
            Shape::Gj(m) => {
                (c.a, c.a_s) = m.eval(p.s);
            }
            Shape::Deformed(m, eps, bump) => {
                (c.a, c.a_s) = m.eval(p.s);
                let (j, js, jt) = bump.eval(p.s, p.theta);
                (c.b, c.b_s, c.b_t) = (*eps * j, *eps * js, *eps * jt);
            }
            Shape::Thin(m) => {
                let (f, fs) = m.eval(p.s);
                let mean = p.curvature.mean;
                if !p.grad_mean[0].is_finite() || !p.grad_mean[1].is_finite() {
                    return Err(Error::Capability("chart provides no mean-curvature derivatives".into()));
                }
                (c.a, c.a_s) = (f, fs);
                c.b = mean * f;
                c.b_s = p.grad_mean[0] * f + mean * fs;
                c.b_t = p.grad_mean[1] * f;
            }
            Shape::Log(r, eps) => {
                (c.a, c.a_s) = r.eval(p.s);
                let (v, d) = r.eval_over_s(p.s);
                (c.b, c.b_s) = (*eps * v, *eps * d);
            }
        }
        Ok(c)
    }

    fn support_end(&self) -> T {
        match &self.shape {
            Shape::Gj(m) | Shape::Deformed(m, _, _) | Shape::Thin(m) => m.support_end(),
            Shape::Log(r, _) => r.b3,
        }
    }

    fn breaks(&self) -> Vec<T> {
        match &self.shape {
            Shape::Gj(m) | Shape::Thin(m) => m.breaks(),
            Shape::Deformed(m, _, b) => {
                let mut v = m.breaks();
                v.extend(b.panel_breaks());
                v
            }
            Shape::Log(r, _) => r.breaks(),
        }
    }

    fn is_radial(&self) -> bool {
        match &self.shape {
            Shape::Deformed(_, eps, b) => b.window.is_none() || *eps == T::zero(),
            Shape::Thin(_) => false,
            _ => true,
        }
    }

    fn compact(&self) -> bool {
        matches!(self.shape, Shape::Log(..))
    }
}

/// Σ cᵢ Ψᵢ, used for polarization.
pub struct Combination<'a, T> {
    pub terms: Vec<(T, &'a dyn Trial<T>)>,
}

impl<'a, T: Real> Combination<'a, T> {
    pub fn new(terms: Vec<(T, &'a dyn Trial<T>)>) -> Self {
        Self { terms }
    }
}

impl<T: Real> Trial<T> for Combination<'_, T> {
    fn coefficients(&self, p: &ChartPoint<T>) -> Result<TrialCoefficients<T>> {
        let mut acc = TrialCoefficients::zero();
        for (c, t) in &self.terms {
            acc = acc.add(t.coefficients(p)?.scale(*c));
        }
        Ok(acc)
    }

    fn support_end(&self) -> T {
        self.terms.iter().fold(T::zero(), |m, (_, t)| m.max(t.support_end()))
    }

    fn breaks(&self) -> Vec<T> {
        self.terms.iter().flat_map(|(_, t)| t.breaks()).collect()
    }

    fn is_radial(&self) -> bool {
        self.terms.iter().all(|(_, t)| t.is_radial())
    }

    fn compact(&self) -> bool {
        self.terms.iter().all(|(_, t)| t.compact())
    }
}

/// Θ = j u χ₁ alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deformation<T> {
    pub bump: Bump<T>,
}

impl<T: Real> Trial<T> for Deformation<T> {
    fn coefficients(&self, p: &ChartPoint<T>) -> Result<TrialCoefficients<T>> {
        let (j, js, jt) = self.bump.eval(p.s, p.theta);
        Ok(TrialCoefficients { b: j, b_s: js, b_t: jt, ..TrialCoefficients::zero() })
    }

    fn support_end(&self) -> T {
        self.bump.s_hi
    }

    fn breaks(&self) -> Vec<T> {
        self.bump.panel_breaks()
    }

    fn is_radial(&self) -> bool {
        self.bump.window.is_none()
    }

    fn compact(&self) -> bool {
        true
    }
}
