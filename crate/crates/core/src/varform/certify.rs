//! Sweeps over the trial families looking for a robustly negative Q̃.

use crate::error::{Error, Result};
use crate::layer::LayerSpec;
use crate::real::Real;
use crate::surface::totals::{total_gauss_with, TotalsOptions};
use crate::varform::form::{evaluate_form_with, polarization, FormEvaluation, FormOptions};
use crate::varform::trial::{Deformation, Trial, TrialFamily, TrialFunction};
use crate::varform::{epsilon_choice, find_bump};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    GoldstoneJaffe,
    Deformed,
    ThinLayer,
    SymmetricLog,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::GoldstoneJaffe, Strategy::Deformed, Strategy::ThinLayer, Strategy::SymmetricLog];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::GoldstoneJaffe => "goldstone-jaffe",
            Strategy::Deformed => "deformed",
            Strategy::ThinLayer => "thin-layer",
            Strategy::SymmetricLog => "symmetric-log",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Strategy::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    NotFound,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::NotFound => "not-found",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyOptions<T> {
    pub strategies: Vec<Strategy>,
    /// σ values for the Goldstone–Jaffe and deformed families, tried in order
    pub sigma_grid: Vec<T>,
    /// plateau radius s₀; defaults to the chart radius (capped at 10⁴)
    pub s0: Option<T>,
    pub thin_s0: Option<T>,
    pub thin_sigma_grid: Option<Vec<T>>,
    pub log_n: Vec<usize>,
    /// precomputed (𝒦, error); computed from the chart when absent
    pub total_gauss: Option<(T, T)>,
    pub form: FormOptions<T>,
    pub max_evaluations: usize,
    pub margin: T,
}

impl<T: Real> Default for CertifyOptions<T> {
    fn default() -> Self {
        Self {
            strategies: Strategy::ALL.to_vec(),
            sigma_grid: (0..15).map(|k| T::lit(10f64.powf(-1.0 - 0.5 * k as f64))).collect(),
            s0: None,
            thin_s0: None,
            thin_sigma_grid: None,
            log_n: (1..=10).map(|k| 1usize << k).collect(),
            total_gauss: None,
            form: FormOptions::default(),
            max_evaluations: 200,
            margin: T::lit(3.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attempt<T> {
    pub strategy: Strategy,
    pub family: TrialFamily<T>,
    pub evaluation: FormEvaluation<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<T> {
    pub verdict: Verdict,
    pub strategy: Option<Strategy>,
    /// certified trial, or the best one seen
    pub family: Option<TrialFamily<T>>,
    pub q_tilde: T,
    pub error: T,
    /// |Q̃| / error
    pub margin: T,
    pub attempts: Vec<Attempt<T>>,
    pub skipped: Vec<(Strategy, String)>,
    pub total_gauss: Option<(T, T)>,
}

impl<T: Real> Certificate<T> {
    fn is_certified(ev: &FormEvaluation<T>, margin: T) -> bool {
        ev.q_tilde + ev.error < T::zero() && ev.q_tilde.abs() >= margin * ev.error
    }
}

fn default_schedule<T: Real>(s_max: T) -> Vec<T> {
    let lo = T::one().min(s_max / T::lit(1024.0));
    let mut out = vec![s_max];
    let mut s = s_max;
    while s * T::lit(0.5) >= lo && out.len() < 40 {
        s = s * T::lit(0.5);
        out.push(s);
    }
    out.reverse();
    out
}

struct Search<'a, T: Real> {
    layer: &'a LayerSpec<T>,
    opts: &'a CertifyOptions<T>,
    attempts: Vec<Attempt<T>>,
    evaluations: usize,
}

impl<T: Real> Search<'_, T> {
    fn budget_left(&self) -> bool {
        self.evaluations < self.opts.max_evaluations
    }

    fn eval(&mut self, trial: &(impl Trial<T> + ?Sized)) -> Result<FormEvaluation<T>> {
        self.evaluations += 1;
        evaluate_form_with(self.layer, trial, &self.opts.form)
    }

    /// Records the attempt; returns true if it certifies.
    fn try_trial(&mut self, strategy: Strategy, trial: &TrialFunction<T>) -> Result<bool> {
        let ev = self.eval(trial)?;
        let ok = Certificate::is_certified(&ev, self.opts.margin);
        self.attempts.push(Attempt { strategy, family: trial.family().clone(), evaluation: ev });
        Ok(ok)
    }
}

/// Tries the enabled families in order and returns the first certificate.
pub fn certify<T: Real>(layer: &LayerSpec<T>, opts: &CertifyOptions<T>) -> Result<Certificate<T>> {
    if !layer.omega1_holds() {
        return Err(Error::HypothesisViolation(format!(
            "a = {} is not below ρ_m = {}",
            layer.half_width(),
            layer.rho_m()
        )));
    }
    let chart = layer.chart();
    let s_max = chart.s_max();
    let total = match opts.total_gauss {
        Some(t) => Some(t),
        None if opts.strategies.iter().any(|s| matches!(s, Strategy::GoldstoneJaffe | Strategy::Deformed)) => {
            let est = total_gauss_with(chart, &default_schedule(s_max), &TotalsOptions::default())?;
            if est.divergent {
                None
            } else {
                Some((est.value, est.error_bound))
            }
        }
        None => None,
    };
    let mut search = Search { layer, opts, attempts: Vec::new(), evaluations: 0 };
    let mut skipped: Vec<(Strategy, String)> = Vec::new();
    let s0 = opts.s0.unwrap_or_else(|| s_max.min(T::lit(1e4)));
    let mut winner: Option<(Strategy, usize)> = None;

    'outer: for &strategy in &opts.strategies {
        match strategy {
            Strategy::GoldstoneJaffe => {
                let Some((k, err)) = total else {
                    skipped.push((strategy, "total Gauss curvature has no limit".into()));
                    continue;
                };
                if k > err {
                    skipped.push((strategy, format!("total Gauss curvature {k} ± {err} is positive")));
                    continue;
                }
                for &sigma in &opts.sigma_grid {
                    if !search.budget_left() {
                        break 'outer;
                    }
                    let trial = TrialFunction::goldstone_jaffe(sigma, s0)?;
                    match search.try_trial(strategy, &trial) {
                        Ok(true) => {
                            winner = Some((strategy, search.attempts.len() - 1));
                            break 'outer;
                        }
                        Ok(false) => {}
                        Err(e) if matches!(e, Error::Truncation(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
            Strategy::Deformed => {
                let Some((k, err)) = total else {
                    skipped.push((strategy, "total Gauss curvature has no limit".into()));
                    continue;
                };
                if k.abs() > err.max(T::lit(1e-6)) {
                    skipped.push((strategy, format!("total Gauss curvature {k} ± {err} is not zero")));
                    continue;
                }
                let bump = match find_bump(layer, s0) {
                    Ok(b) => b,
                    Err(e) => {
                        skipped.push((strategy, e.to_string()));
                        continue;
                    }
                };
                let theta = Deformation { bump };
                let first = TrialFunction::goldstone_jaffe(opts.sigma_grid[0], s0)?;
                search.evaluations += 3;
                let q_theta = evaluate_form_with(layer, &theta, &opts.form)?.q_tilde;
                let (mixed, _) = polarization(layer, &theta, &first, &opts.form)?;
                if mixed == T::zero() || q_theta <= T::zero() {
                    skipped.push((strategy, "mixed term vanishes".into()));
                    continue;
                }
                let eps = -mixed / q_theta;
                for &sigma in &opts.sigma_grid {
                    if !search.budget_left() {
                        break 'outer;
                    }
                    let trial = TrialFunction::deformed(sigma, s0, eps, bump)?;
                    if search.try_trial(strategy, &trial)? {
                        winner = Some((strategy, search.attempts.len() - 1));
                        break 'outer;
                    }
                }
            }
            Strategy::ThinLayer => {
                let ts0 = opts.thin_s0.unwrap_or_else(|| T::lit(16.0).min(s_max / T::lit(8.0)));
                let sigma_min = T::lit(46.0) / (s_max - ts0);
                let grid: Vec<T> = match &opts.thin_sigma_grid {
                    Some(g) => g.clone(),
                    None => {
                        let mut g: Vec<T> = opts.sigma_grid.iter().copied().filter(|s| *s >= sigma_min).collect();
                        if sigma_min <= T::one() {
                            g.push(sigma_min);
                        }
                        g
                    }
                };
                if grid.is_empty() {
                    skipped.push((strategy, format!("chart radius {s_max} too small for the thin-layer tail")));
                    continue;
                }
                for sigma in grid {
                    if !search.budget_left() {
                        break 'outer;
                    }
                    let trial = TrialFunction::thin_layer(sigma, ts0)?;
                    match search.try_trial(strategy, &trial) {
                        Ok(true) => {
                            winner = Some((strategy, search.attempts.len() - 1));
                            break 'outer;
                        }
                        Ok(false) => {}
                        Err(Error::Truncation(msg)) => skipped.push((strategy, msg)),
                        Err(e) => return Err(e),
                    }
                }
            }
            Strategy::SymmetricLog => {
                if !chart.is_axisymmetric() {
                    skipped.push((strategy, "chart is not a surface of revolution".into()));
                    continue;
                }
                let mut tried = false;
                for &n in &opts.log_n {
                    let b3 = T::from_usize_lossy(n).powi(3);
                    if b3 > s_max {
                        break;
                    }
                    if !search.budget_left() {
                        break 'outer;
                    }
                    let eps = match epsilon_choice(layer, n) {
                        Ok(e) => e,
                        Err(Error::DegeneratePairing(p)) => {
                            skipped.push((strategy, format!("pairing (φ_n, Mϕ_n) = {p} is degenerate at n = {n}")));
                            break;
                        }
                        Err(e) => return Err(e),
                    };
                    tried = true;
                    let trial = TrialFunction::symmetric_log(n, eps)?;
                    if search.try_trial(strategy, &trial)? {
                        winner = Some((strategy, search.attempts.len() - 1));
                        break 'outer;
                    }
                }
                if !tried && !skipped.iter().any(|(s, _)| *s == strategy) {
                    skipped.push((strategy, format!("chart radius {s_max} below n³ for every n")));
                }
            }
        }
    }

    if search.attempts.is_empty() && winner.is_none() {
        let reasons: Vec<String> = skipped.iter().map(|(s, r)| format!("{}: {r}", s.as_str())).collect();
        return Err(Error::Capability(format!("no trial family applicable ({})", reasons.join("; "))));
    }
    let (verdict, strategy, pick) = match winner {
        Some((s, i)) => (Verdict::Certified, Some(s), i),
        None => {
            let i = search
                .attempts
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.evaluation.q_tilde.partial_cmp(&b.1.evaluation.q_tilde).expect("finite"))
                .map(|(i, _)| i)
                .expect("non-empty");
            (Verdict::NotFound, Some(search.attempts[i].strategy), i)
        }
    };
    let best = &search.attempts[pick];
    let ev = best.evaluation;
    Ok(Certificate {
        verdict,
        strategy,
        family: Some(best.family.clone()),
        q_tilde: ev.q_tilde,
        error: ev.error,
        margin: if ev.error > T::zero() { ev.q_tilde.abs() / ev.error } else { T::infinity() },
        attempts: search.attempts,
        skipped,
        total_gauss: total,
    })
}
