//! The shifted quadratic form Q̃[Ψ] = Q[Ψ] − κ₁²‖Ψ‖²_G by nested quadrature.

use crate::error::{Error, Result};
use crate::layer::{LayerSpec, TransverseMode};
use crate::numkernel::quadrature::{merge_breaks, LegendreRule};
use crate::real::Real;
use crate::surface::{ChartPoint, ThetaNode, ThetaRule};
use crate::varform::trial::{Trial, TrialCoefficients};

#[derive(Debug, Clone, Copy)]
pub struct FormOptions<T> {
    pub points_per_panel: usize,
    pub u_points: usize,
    /// growth ratio of the radial panels
    pub panel_ratio: T,
    pub first_panel: T,
    /// θ nodes for non-radial trials on axisymmetric charts
    pub theta_nodes: usize,
    /// compare the chart cut S against S/2 when the trial reaches past the chart
    pub truncation_check: bool,
}

impl<T: Real> Default for FormOptions<T> {
    fn default() -> Self {
        Self {
            points_per_panel: 10,
            u_points: 16,
            panel_ratio: T::lit(1.5),
            first_panel: T::lit(0.05),
            theta_nodes: 64,
            truncation_check: true,
        }
    }
}

impl<T: Real> FormOptions<T> {
    /// Same rule with twice the resolution in every direction.
    pub fn refined(&self) -> Self {
        Self {
            points_per_panel: self.points_per_panel * 2,
            u_points: self.u_points * 2,
            panel_ratio: self.panel_ratio.sqrt(),
            first_panel: self.first_panel * T::lit(0.5),
            theta_nodes: self.theta_nodes * 2,
            truncation_check: self.truncation_check,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormEvaluation<T> {
    /// longitudinal part ∫ ψ,ᵢ G^{ij} ψ,ⱼ √G over the surface directions
    pub q1: T,
    /// ∫ |ψ,ᵤ|² √G
    pub q2: T,
    pub norm_sq: T,
    /// Q₂ − κ₁²‖Ψ‖²_G, integrated in u exactly so that large supports do not cancel
    pub shifted_transverse: T,
    pub q_tilde: T,
    pub error: T,
    pub s_error: T,
    pub theta_error: T,
    pub u_error: T,
    pub truncation_error: T,
    /// chart radius beyond which the chart was continued flatly
    pub cut: T,
    pub support: T,
}

/// Exact u-integration of the transverse part for ψ = (A + Bu)χ₁.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Moments<T> {
    /// (π² − 6)/(3κ₁²)
    pub c_thin: T,
}

impl<T: Real> Moments<T> {
    pub fn new(a: T) -> Self {
        let pi2 = T::PI() * T::PI();
        let kappa = T::PI() / (a + a);
        Self { c_thin: (pi2 - T::lit(6.0)) / (T::lit(3.0) * kappa * kappa) }
    }

    /// ∫ [(∂ᵤψ)² − κ₁²ψ²] f du per unit surface area, ψ = (A + Bu)χ₁.
    pub fn transverse(&self, c: &TrialCoefficients<T>, gauss: T, mean: T) -> T {
        c.a * c.a * gauss - T::lit(2.0) * c.a * c.b * mean + c.b * c.b * (T::one() + gauss * self.c_thin)
    }
}

struct Accum<T> {
    q1: T,
    q1_coarse_u: T,
    q2: T,
    norm: T,
    shifted: T,
}

impl<T: Real> Accum<T> {
    fn zero() -> Self {
        Self { q1: T::zero(), q1_coarse_u: T::zero(), q2: T::zero(), norm: T::zero(), shifted: T::zero() }
    }
    fn q_tilde(&self) -> T {
        self.q1 + self.shifted
    }
}

struct URule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    coarse_nodes: Vec<T>,
    coarse_weights: Vec<T>,
    chi: Vec<(T, T)>,
    chi_coarse: Vec<(T, T)>,
}

impl<T: Real> URule<T> {
    fn new(a: T, n: usize) -> Result<Self> {
        let mode = TransverseMode::new(a, 1)?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        LegendreRule::new(n)?.map_into(-a, a, &mut nodes, &mut weights);
        let mut coarse_nodes = Vec::new();
        let mut coarse_weights = Vec::new();
        LegendreRule::new((n / 2).max(1))?.map_into(-a, a, &mut coarse_nodes, &mut coarse_weights);
        let chi = nodes.iter().map(|&u| (mode.value(u), mode.derivative(u))).collect();
        let chi_coarse = coarse_nodes.iter().map(|&u| (mode.value(u), mode.derivative(u))).collect();
        Ok(Self { nodes, weights, coarse_nodes, coarse_weights, chi, chi_coarse })
    }
}

/// Q₁ density per unit (s, θ) measure, integrated over u with the given rule.
fn q1_density<T: Real>(p: &ChartPoint<T>, c: &TrialCoefficients<T>, nodes: &[T], weights: &[T], chi: &[(T, T)]) -> T {
    if p.r <= T::zero() {
        return T::zero();
    }
    let [l, m, n] = p.shape;
    let (k, h) = (p.curvature.gauss, p.curvature.mean);
    let mut acc = T::zero();
    for ((&u, &w), &(x, _)) in nodes.iter().zip(weights).zip(chi) {
        let vs = c.a_s + c.b_s * u;
        let vt = (c.a_t + c.b_t * u) / p.r;
        // adj(I − uS) v
        let w1 = (T::one() - u * n) * vs + u * m * vt;
        let w2 = u * m * vs + (T::one() - u * l) * vt;
        let f = T::one() - T::lit(2.0) * h * u + k * u * u;
        acc = acc + w * x * x * (w1 * w1 + w2 * w2) / f;
    }
    acc * p.r
}

/// (Q₂ density, norm density) by u quadrature.
fn q2_norm_density<T: Real>(p: &ChartPoint<T>, c: &TrialCoefficients<T>, nodes: &[T], weights: &[T], chi: &[(T, T)]) -> (T, T) {
    let (k, h) = (p.curvature.gauss, p.curvature.mean);
    let (mut q2, mut nm) = (T::zero(), T::zero());
    for ((&u, &w), &(x, dx)) in nodes.iter().zip(weights).zip(chi) {
        let f = T::one() - T::lit(2.0) * h * u + k * u * u;
        let ab = c.a + c.b * u;
        let du = c.b * x + ab * dx;
        q2 = q2 + w * du * du * f;
        nm = nm + w * ab * ab * x * x * f;
    }
    (q2 * p.r, nm * p.r)
}

fn theta_rule_for<T: Real>(layer: &LayerSpec<T>, trial: &(impl Trial<T> + ?Sized), opts: &FormOptions<T>) -> ThetaRule<T> {
    let chart = layer.chart();
    if chart.fan().is_some() {
        chart.theta_rule()
    } else if trial.is_radial() {
        ThetaRule::single()
    } else {
        ThetaRule::uniform(opts.theta_nodes)
    }
}

fn radial_breaks<T: Real>(layer: &LayerSpec<T>, trial: &(impl Trial<T> + ?Sized), end: T, cut: T, opts: &FormOptions<T>) -> Vec<T> {
    let first = opts.first_panel.min(end / T::lit(64.0));
    let mut geo = vec![T::zero()];
    let mut x = first;
    while x < end {
        geo.push(x);
        x = x * opts.panel_ratio;
    }
    geo.push(end);
    let chart_breaks: Vec<T> = layer.chart().breakpoints().into_iter().filter(|b| *b < cut).collect();
    let cut_list = if cut < end { vec![cut] } else { Vec::new() };
    let tb: Vec<T> = trial.breaks().into_iter().filter(|b| *b > T::zero() && *b < end).collect();
    merge_breaks(&[&geo, &chart_breaks, &cut_list, &tb])
}

/// Evaluates Q̃ and its parts with nested error estimates.
pub fn evaluate_form<T: Real>(layer: &LayerSpec<T>, trial: &(impl Trial<T> + ?Sized)) -> Result<FormEvaluation<T>> {
    evaluate_form_with(layer, trial, &FormOptions::default())
}

pub fn evaluate_form_with<T: Real>(
    layer: &LayerSpec<T>,
    trial: &(impl Trial<T> + ?Sized),
    opts: &FormOptions<T>,
) -> Result<FormEvaluation<T>> {
    let chart = layer.chart();
    let support = trial.support_end();
    let s_max = chart.s_max();
    if support > s_max && trial.compact() {
        return Err(Error::Truncation(format!("trial support ends at {support}, chart at {s_max}")));
    }
    let mut ev = evaluate_cut(layer, trial, opts, s_max.min(support), support)?;
    if support > s_max && opts.truncation_check {
        let half = evaluate_cut(layer, trial, opts, s_max * T::lit(0.5), support)?;
        ev.truncation_error = (ev.q_tilde - half.q_tilde).abs();
        ev.error = ev.error + ev.truncation_error;
    }
    Ok(ev)
}

fn evaluate_cut<T: Real>(
    layer: &LayerSpec<T>,
    trial: &(impl Trial<T> + ?Sized),
    opts: &FormOptions<T>,
    cut: T,
    support: T,
) -> Result<FormEvaluation<T>> {
    let chart = layer.chart();
    let moments = Moments::new(layer.half_width());
    let urule = URule::new(layer.half_width(), opts.u_points)?;
    let rule = theta_rule_for(layer, trial, opts);
    let breaks = radial_breaks(layer, trial, support, cut, opts);
    let fine_s = LegendreRule::<T>::new(opts.points_per_panel)?;
    let coarse_s = LegendreRule::<T>::new((opts.points_per_panel / 2).max(1))?;
    let mut s_fine = Vec::new();
    let mut w_fine = Vec::new();
    let mut s_coarse = Vec::new();
    let mut w_coarse = Vec::new();
    for w in breaks.windows(2) {
        fine_s.map_into(w[0], w[1], &mut s_fine, &mut w_fine);
        coarse_s.map_into(w[0], w[1], &mut s_coarse, &mut w_coarse);
    }

    let mut fine = Accum::zero();
    let mut coarse_s_acc = Accum::zero();
    let mut coarse_t_acc = Accum::zero();
    let mut check_cut = support > cut;

    let mut sweep = |node: &ThetaNode<T>, xs: &[T], ws: &[T], acc: &mut Accum<T>, full: bool| -> Result<()> {
        let at_cut = if support > cut { Some(chart.sample_node(cut, node)?) } else { None };
        if check_cut {
            if let Some(pc) = &at_cut {
                let c = trial.coefficients(pc)?;
                let amp = c.a.abs().max(T::lit(1e-300));
                if (c.b * layer.half_width()).abs() > T::lit(1e-8) * amp.max(T::one()) && c.b.abs() > T::lit(1e-12) {
                    return Err(Error::Truncation(format!(
                        "trial's u-linear part is {} at the chart cut {cut}; its support must end inside the chart",
                        c.b
                    )));
                }
            }
            check_cut = false;
        }
        for (&s, &w) in xs.iter().zip(ws) {
            let p = match &at_cut {
                Some(pc) if s > cut => pc.flat_continuation(s),
                _ => chart.sample_node(s, node)?,
            };
            let c = trial.coefficients(&p)?;
            if c.a == T::zero() && c.b == T::zero() && c.a_s == T::zero() && c.b_s == T::zero() && c.a_t == T::zero() && c.b_t == T::zero() {
                continue;
            }
            let wt = w * node.weight;
            let q1 = q1_density(&p, &c, &urule.nodes, &urule.weights, &urule.chi);
            let sh = moments.transverse(&c, p.curvature.gauss, p.curvature.mean) * p.r;
            if !(q1.is_finite() && sh.is_finite()) {
                return Err(Error::Evaluation(format!("non-finite integrand at s = {s}, θ = {}", node.theta)));
            }
            acc.q1 = acc.q1 + wt * q1;
            acc.shifted = acc.shifted + wt * sh;
            if full {
                let q1c = q1_density(&p, &c, &urule.coarse_nodes, &urule.coarse_weights, &urule.chi_coarse);
                let (q2, nm) = q2_norm_density(&p, &c, &urule.nodes, &urule.weights, &urule.chi);
                acc.q1_coarse_u = acc.q1_coarse_u + wt * q1c;
                acc.q2 = acc.q2 + wt * q2;
                acc.norm = acc.norm + wt * nm;
            }
        }
        Ok(())
    };

    for node in &rule.fine {
        sweep(node, &s_fine, &w_fine, &mut fine, true)?;
        sweep(node, &s_coarse, &w_coarse, &mut coarse_s_acc, false)?;
    }
    let single = rule.fine.len() == 1;
    if !single {
        for node in &rule.coarse {
            sweep(node, &s_fine, &w_fine, &mut coarse_t_acc, false)?;
        }
    }
    let q_tilde = fine.q_tilde();
    let s_error = (q_tilde - coarse_s_acc.q_tilde()).abs();
    let theta_error = if single { T::zero() } else { (q_tilde - coarse_t_acc.q_tilde()).abs() };
    let u_error = (fine.q1 - fine.q1_coarse_u).abs();
    let floor = T::epsilon() * T::lit(64.0) * (fine.q1.abs() + fine.shifted.abs());
    Ok(FormEvaluation {
        q1: fine.q1,
        q2: fine.q2,
        norm_sq: fine.norm,
        shifted_transverse: fine.shifted,
        q_tilde,
        error: s_error + theta_error + u_error + floor,
        s_error,
        theta_error,
        u_error,
        truncation_error: T::zero(),
        cut,
        support,
    })
}

/// Q̃(Ψ, Φ) = ¼(Q̃[Ψ + Φ] − Q̃[Ψ − Φ]) with the summed error estimate.
pub fn polarization<T: Real>(
    layer: &LayerSpec<T>,
    psi: &dyn Trial<T>,
    phi: &dyn Trial<T>,
    opts: &FormOptions<T>,
) -> Result<(T, T)> {
    use crate::varform::trial::Combination;
    let plus = evaluate_form_with(layer, &Combination::new(vec![(T::one(), psi), (T::one(), phi)]), opts)?;
    let minus = evaluate_form_with(layer, &Combination::new(vec![(T::one(), psi), (-T::one(), phi)]), opts)?;
    let q = T::lit(0.25);
    Ok(((plus.q_tilde - minus.q_tilde) * q, (plus.error + minus.error) * q))
}
