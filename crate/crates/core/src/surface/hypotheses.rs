//! Numerical evidence for decay and integrability of the curvatures.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::surface::totals::{component_estimate, partials, TotalCurvatureEstimate, TotalsOptions};
use crate::surface::PolarChart;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Undecided,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Undecided => "undecided",
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Sampled suprema on one annulus, already scaled by the safety factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSup<T> {
    pub inner: T,
    pub outer: T,
    pub sup_abs_gauss: T,
    pub sup_abs_mean: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport<T> {
    pub sigma0: Verdict,
    pub annuli: Vec<AnnulusSup<T>>,
    pub sigma1: Verdict,
    /// ∫|K| dΣ
    pub sigma1_estimate: TotalCurvatureEstimate<T>,
    pub sigma2: Verdict,
    /// ∫|∇_g M|² dΣ
    pub sigma2_estimate: TotalCurvatureEstimate<T>,
    /// C with ∫₀^{2π} r dθ ≤ C s on all sampled s
    pub growth_constant: T,
    /// (s, ∫ r dθ / s)
    pub growth_samples: Vec<(T, T)>,
    pub notes: Vec<String>,
}

const SAFETY: f64 = 1.05;

/// Decay of a sequence of annulus suprema.
fn decay_verdict<T: Real>(sups: &[T]) -> Verdict {
    let n = sups.len();
    let peak = sups.iter().fold(T::zero(), |a, b| a.max(*b));
    let last = sups[n - 1];
    if last <= T::lit(1e-12) * (T::one() + peak) {
        return Verdict::Pass;
    }
    if n < 2 {
        return Verdict::Undecided;
    }
    let q = last / sups[n - 2];
    let tail = &sups[n / 2..];
    let recent = sups[n.saturating_sub(3)..].iter().fold(T::zero(), |a, b| a.max(*b));
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] * T::lit(1.001));
    if monotone && q <= T::lit(0.9) {
        Verdict::Pass
    } else if q >= T::lit(0.98) && last >= T::lit(0.9) * recent {
        Verdict::Fail
    } else {
        Verdict::Undecided
    }
}

fn integrability_verdict<T: Real>(est: &TotalCurvatureEstimate<T>) -> Verdict {
    if est.divergent {
        Verdict::Fail
    } else if est.partial_values.len() < 3 {
        Verdict::Undecided
    } else {
        Verdict::Pass
    }
}

/// Checks decay of K, M (annulus suprema), integrability of |K| and |∇_g M|²,
/// and the linear growth constant of the geodesic circle length.
pub fn hypotheses_report<T: Real>(chart: &PolarChart<T>, probe_radii: &[T]) -> Result<HypothesisReport<T>> {
    hypotheses_report_with(chart, probe_radii, &TotalsOptions::default())
}

pub fn hypotheses_report_with<T: Real>(
    chart: &PolarChart<T>,
    probe_radii: &[T],
    opts: &TotalsOptions<T>,
) -> Result<HypothesisReport<T>> {
    let mut radii = probe_radii.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    radii.dedup();
    if radii.len() < 2 {
        return Err(Error::InvalidInput("need at least two probe radii".into()));
    }
    let safety = T::lit(SAFETY);
    let nodes = chart.theta_rule().fine;
    let stride = (nodes.len() / 48).max(1);
    let picked: Vec<_> = nodes.iter().step_by(stride).copied().collect();
    let per_annulus = if chart.is_axisymmetric() { 1000 } else { 64 };

    let mut annuli = Vec::new();
    for w in radii.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (mut sk, mut sm) = (T::zero(), T::zero());
        for i in 0..=per_annulus {
            let s = lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(per_annulus);
            for nd in &picked {
                let c = chart.sample_node(s, nd)?.curvature;
                sk = sk.max(c.gauss.abs());
                sm = sm.max(c.mean.abs());
            }
        }
        annuli.push(AnnulusSup { inner: lo, outer: hi, sup_abs_gauss: sk * safety, sup_abs_mean: sm * safety });
    }
    let vk = decay_verdict(&annuli.iter().map(|a| a.sup_abs_gauss).collect::<Vec<_>>());
    let vm = decay_verdict(&annuli.iter().map(|a| a.sup_abs_mean).collect::<Vec<_>>());
    let sigma0 = match (vk, vm) {
        (Verdict::Pass, Verdict::Pass) => Verdict::Pass,
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        _ => Verdict::Undecided,
    };

    let p = partials(chart, &radii, opts)?;
    let sigma1_estimate = component_estimate(&p, 1, opts);
    let sigma2_estimate = component_estimate(&p, 3, opts);
    let sigma1 = integrability_verdict(&sigma1_estimate);
    let sigma2 = integrability_verdict(&sigma2_estimate);

    let mut growth_samples = Vec::new();
    let s_end = *radii.last().expect("non-empty");
    let n_growth = 64usize;
    for i in 1..=n_growth {
        // geometric from s_end·2⁻¹⁰ up to s_end
        let s = s_end * T::lit(2.0).powf(T::lit(-10.0) * (T::one() - T::from_usize_lossy(i) / T::from_usize_lossy(n_growth)));
        let mut len = T::zero();
        for nd in &nodes {
            len = len + nd.weight * chart.sample_node(s, nd)?.r;
        }
        growth_samples.push((s, len / s));
    }
    let growth_constant = growth_samples.iter().fold(T::zero(), |a, (_, g)| a.max(*g)) * safety;

    let mut notes = vec![format!("suprema sampled on {} annuli with safety factor {SAFETY}", annuli.len())];
    if sigma0 == Verdict::Undecided {
        notes.push("annulus suprema do not decay monotonically; verdict left undecided".into());
    }
    if let Some(f) = chart.fan() {
        if let Some(s) = f.truncated_at() {
            notes.push(format!("conjugate point near s = {s}; chart truncated"));
        }
        notes.push("∇M from central differences of the graph's mean curvature".into());
    }
    Ok(HypothesisReport {
        sigma0,
        annuli,
        sigma1,
        sigma1_estimate,
        sigma2,
        sigma2_estimate,
        growth_constant,
        growth_samples,
        notes,
    })
}
