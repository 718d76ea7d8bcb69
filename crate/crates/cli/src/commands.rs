//! The subcommands: build the chart from a resolved config, compute, write reports.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use layerspec_core::layer::{c_bounds, collision_scan, LayerSpec};
use layerspec_core::spectrum::{
    assemble_partial_wave, counterexample_full, counterexample_radial, richardson, solve_spectrum, spherical_shell_ground,
    AxisymMesh, RadialEstimate,
};
use layerspec_core::surface::{
    builtin, gauss_bonnet_residual, geodesic_fan, hypotheses_report, total_gauss, total_mean_sq, GraphSurface, PolarChart,
    Provenance, TotalCurvatureEstimate, Verdict,
};
use layerspec_core::varform::{certify, CertifyOptions, Certificate, TrialFamily};
use layerspec_core::Error;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::catalog::{CatalogEntry, Construction};
use crate::config::RunConfig;
use crate::report::{fmt, Count, Num, Output, Table};
use crate::{Failure, Outcome};

fn capability(entry: &CatalogEntry) -> Failure {
    Failure::from(Error::Capability(format!("{} has no usable polar chart; it is documented but not computed", entry.name)))
}

/// Chart of the configured surface.
pub fn build_chart(cfg: &RunConfig) -> Result<PolarChart<f64>, Failure> {
    let entry = cfg.entry();
    let sf = &cfg.surface;
    let tol = cfg.solver.tol;
    let s_max = sf.s_max.unwrap_or(entry.s_max);
    let fan = |g: GraphSurface<f64>| geodesic_fan(&g, sf.theta_samples.unwrap_or(64), s_max, tol);
    let chart = match entry.name {
        "hyperbolic-paraboloid" => fan(GraphSurface::hyperbolic_paraboloid())?,
        "monkey-saddle" => fan(GraphSurface::monkey_saddle())?,
        "elliptic-paraboloid" => fan(GraphSurface::elliptic_paraboloid(sf.x0.unwrap_or(1.0), sf.y0.unwrap_or(1.0))?)?,
        "hyperboloid" => PolarChart::from_profile(builtin::hyperboloid(sf.z0.unwrap_or(1.0), s_max, tol)?),
        "ex-m" => PolarChart::from_profile(builtin::oscillating_meridian(s_max, tol)?),
        "capped-cylinder" => PolarChart::from_profile(builtin::capped_cylinder(sf.radius.unwrap_or(1.0), s_max)?),
        "plane" => PolarChart::plane(s_max),
        _ => return Err(capability(&entry)),
    };
    Ok(chart)
}

/// Layer of the configured half-width; a violated ⟨Ω1⟩ is an error.
pub fn build_layer(cfg: &RunConfig) -> Result<LayerSpec<f64>, Failure> {
    Ok(LayerSpec::new(build_chart(cfg)?, cfg.layer.a.expect("resolved"))?)
}

/// Configured truncation radii clipped to the chart (fans may stop early at a conjugate point).
fn schedule(cfg: &RunConfig, chart: &PolarChart<f64>) -> Vec<f64> {
    let s_max = chart.s_max();
    let mut out: Vec<f64> = cfg.solver.truncation.clone().unwrap_or_default().into_iter().filter(|r| *r < s_max).collect();
    out.push(s_max);
    out
}

/// Error attached to a chart sample: exact for closed forms, the ODE tolerance otherwise.
fn sampled(chart: &PolarChart<f64>, tol: f64, v: f64) -> Num {
    match chart.provenance() {
        Provenance::Analytic => Num::exact(v),
        _ => Num::est(v, tol * v.abs().max(1.0)),
    }
}

/// The curvature sup behind ρ_m carries a 5% safety factor; that margin is the reported error.
fn rho_num(rho: f64) -> Num {
    if rho.is_finite() {
        Num::est(rho, rho * 0.05)
    } else {
        Num::exact(rho)
    }
}

#[derive(Serialize)]
struct SurfaceInfo {
    name: &'static str,
    construction: Construction,
    provenance: &'static str,
}

impl SurfaceInfo {
    fn of(e: &CatalogEntry) -> Self {
        Self { name: e.name, construction: e.construction, provenance: e.provenance }
    }
}

#[derive(Serialize)]
struct ChartInfo {
    kind: &'static str,
    s_max: Num,
    axisymmetric: bool,
    geodesics: Option<Count>,
    /// a conjugate point stopped the fan early
    truncated_at: Option<Num>,
}

impl ChartInfo {
    fn of(chart: &PolarChart<f64>, tol: f64) -> Self {
        let fan = chart.fan();
        Self {
            kind: chart.provenance().as_str(),
            s_max: Num::exact(chart.s_max()),
            axisymmetric: chart.is_axisymmetric(),
            geodesics: fan.map(|f| f.geodesic_count().into()),
            truncated_at: fan.and_then(|f| f.truncated_at()).map(|s| Num::est(s, s * tol.sqrt())),
        }
    }
}

#[derive(Serialize)]
struct LayerInfo {
    half_width: Num,
    width: Num,
    threshold: Num,
    rho_m: Num,
    omega1: bool,
    c_minus: Option<Num>,
    c_plus: Option<Num>,
}

impl LayerInfo {
    fn of(layer: &LayerSpec<f64>) -> Self {
        let c = c_bounds(layer).ok();
        let q = layer.half_width() / layer.rho_m();
        // d(1 ± q)²/dq · q · 5%
        let err = |sign: f64| 2.0 * (1.0 + sign * q).abs() * q * 0.05;
        Self {
            half_width: Num::exact(layer.half_width()),
            width: Num::exact(layer.width()),
            threshold: Num::exact(layer.threshold()),
            rho_m: rho_num(layer.rho_m()),
            omega1: layer.omega1_holds(),
            c_minus: c.map(|c| Num::est(c.0, err(-1.0))),
            c_plus: c.map(|c| Num::est(c.1, err(1.0))),
        }
    }
}

pub(crate) fn describe(cfg: &RunConfig, out: &Output) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let entry = cfg.entry();
    let tol = cfg.solver.tol;
    let chart = build_chart(cfg)?;
    let layer = LayerSpec::forced(chart.clone(), cfg.layer.a.expect("resolved"))?;
    let s_max = chart.s_max();
    let n = cfg.solver.curvature_samples;
    let s_lo = (s_max / 100.0).min(1e-2);
    let radii: Vec<f64> = std::iter::once(0.0)
        .chain((0..n - 1).map(|i| s_lo * (s_max / s_lo).powf(i as f64 / (n - 2).max(1) as f64)))
        .collect();
    let thetas: Vec<f64> = if chart.is_axisymmetric() { vec![0.0] } else { (0..8).map(|k| k as f64 * TAU / 8.0).collect() };
    let mut table = Table::new("curvature", &["s", "theta", "r", "gauss", "mean", "k1", "k2"]);
    for &s in &radii {
        for &t in &thetas {
            let p = chart.sample(s.min(s_max), t)?;
            let c = p.curvature;
            table.push([s, t, p.r, c.gauss, c.mean, c.k1, c.k2].iter().map(|x| fmt(*x)).collect());
        }
    }

    #[derive(Serialize)]
    struct Describe {
        surface: SurfaceInfo,
        notes: &'static str,
        chart: ChartInfo,
        layer: LayerInfo,
        /// r(s, 0) at the chart radius
        r_end: Num,
        samples: Count,
    }
    let r_end = chart.r(s_max, 0.0)?;
    let res = Describe {
        surface: SurfaceInfo::of(&entry),
        notes: entry.notes,
        chart: ChartInfo::of(&chart, tol),
        layer: LayerInfo::of(&layer),
        r_end: sampled(&chart, tol, r_end),
        samples: table.rows.len().into(),
    };
    let files = out.write("describe", cfg, &res, &[table], start.elapsed())?;
    let summary = format!(
        "{}: {} chart to s = {}, threshold {:.6}, rho_m {:.6}, omega1 {}",
        entry.name,
        chart.provenance().as_str(),
        s_max,
        layer.threshold(),
        layer.rho_m(),
        if layer.omega1_holds() { "pass" } else { "fail" }
    );
    Ok(Outcome { summary, files })
}

#[derive(Serialize)]
struct VerdictOut {
    verdict: &'static str,
    pass: bool,
}

impl From<Verdict> for VerdictOut {
    fn from(v: Verdict) -> Self {
        Self { verdict: v.as_str(), pass: v.passed() }
    }
}

/// A divergent total is reported as its last partial integral with an unbounded error.
fn total_num(e: &TotalCurvatureEstimate<f64>) -> Num {
    if e.divergent {
        Num::est(*e.partial_values.last().unwrap_or(&e.value), f64::INFINITY)
    } else {
        Num::est(e.value, e.error_bound)
    }
}

pub(crate) fn check(cfg: &RunConfig, out: &Output) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let entry = cfg.entry();
    let chart = build_chart(cfg)?;
    let radii = schedule(cfg, &chart);
    let h = hypotheses_report(&chart, &radii)?;
    let layer = LayerSpec::forced(chart.clone(), cfg.layer.a.expect("resolved"))?;
    let scan_end = chart.s_max().min(64.0);
    let scan = collision_scan(&layer, scan_end, 256, if chart.is_axisymmetric() { 1 } else { 32 })?;

    #[derive(Serialize)]
    struct Integral {
        verdict: &'static str,
        pass: bool,
        estimate: Num,
    }
    #[derive(Serialize)]
    struct Omega1 {
        pass: bool,
        half_width: Num,
        rho_m: Num,
    }
    #[derive(Serialize)]
    struct Omega0 {
        /// sampled necessary condition only
        collision_detected: bool,
        scanned_to: Num,
        points: Count,
        min_det_factor: Num,
    }
    #[derive(Serialize)]
    struct Check {
        surface: SurfaceInfo,
        sigma0: VerdictOut,
        sigma1: Integral,
        sigma2: Integral,
        omega0: Omega0,
        omega1: Omega1,
        growth_constant: Num,
        layer: LayerInfo,
        notes: Vec<String>,
    }
    let res = Check {
        surface: SurfaceInfo::of(&entry),
        sigma0: h.sigma0.into(),
        sigma1: Integral { verdict: h.sigma1.as_str(), pass: h.sigma1.passed(), estimate: total_num(&h.sigma1_estimate) },
        sigma2: Integral { verdict: h.sigma2.as_str(), pass: h.sigma2.passed(), estimate: total_num(&h.sigma2_estimate) },
        omega0: Omega0 {
            collision_detected: scan.collision_detected,
            scanned_to: Num::exact(scan_end),
            points: scan.points.into(),
            min_det_factor: Num::est(scan.min_det_factor, cfg.solver.tol),
        },
        omega1: Omega1 { pass: layer.omega1_holds(), half_width: Num::exact(layer.half_width()), rho_m: rho_num(layer.rho_m()) },
        growth_constant: Num::est(h.growth_constant, h.growth_constant * 0.05 / 1.05),
        layer: LayerInfo::of(&layer),
        notes: h.notes.clone(),
    };
    let mut annuli = Table::new("annuli", &["inner", "outer", "sup_abs_gauss", "sup_abs_mean"]);
    for a in &h.annuli {
        annuli.push(vec![fmt(a.inner), fmt(a.outer), fmt(a.sup_abs_gauss), fmt(a.sup_abs_mean)]);
    }
    let mut growth = Table::new("growth", &["s", "circle_length_over_s"]);
    for (s, g) in &h.growth_samples {
        growth.push(vec![fmt(*s), fmt(*g)]);
    }
    let files = out.write("check", cfg, &res, &[annuli, growth], start.elapsed())?;
    let summary = format!(
        "{}: sigma0 {}, sigma1 {}, sigma2 {}, omega1 {}",
        entry.name,
        h.sigma0.as_str(),
        h.sigma1.as_str(),
        h.sigma2.as_str(),
        if layer.omega1_holds() { "pass" } else { "fail" }
    );
    Ok(Outcome { summary, files })
}

#[derive(Serialize)]
struct Extrapolation {
    divergent: bool,
    principal_value: bool,
    tail: Num,
    cross_check: Option<Num>,
}

impl Extrapolation {
    fn of(e: &TotalCurvatureEstimate<f64>) -> Self {
        Self {
            divergent: e.divergent,
            principal_value: e.principal_value,
            tail: Num::est(e.extrapolated_tail, e.error_bound),
            cross_check: e.cross_check.map(|c| Num::est(c, (c - e.value).abs().max(e.error_bound))),
        }
    }
}

pub(crate) fn totals(cfg: &RunConfig, out: &Output) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let entry = cfg.entry();
    let chart = build_chart(cfg)?;
    let radii = schedule(cfg, &chart);
    let k = total_gauss(&chart, &radii)?;
    let m = total_mean_sq(&chart, &radii)?;

    #[derive(Serialize)]
    struct GaussBonnetOut {
        total: Num,
        rdot_end: Num,
        residual: Num,
    }
    let tol = cfg.solver.tol;
    let (gauss_bonnet, gb_note) = match chart.profile().map(gauss_bonnet_residual) {
        Some(Ok(gb)) => (
            Some(GaussBonnetOut {
                total: Num::est(gb.total, 1e-11 * TAU),
                rdot_end: sampled(&chart, tol, gb.rdot_end),
                residual: Num::est(gb.residual, 1e-11 * TAU + TAU * tol),
            }),
            None,
        ),
        Some(Err(e)) => (None, Some(e.to_string())),
        None => (None, None),
    };

    #[derive(Serialize)]
    struct Totals {
        surface: SurfaceInfo,
        total_gauss: Num,
        total_mean_sq: Num,
        gauss: Extrapolation,
        mean_sq: Extrapolation,
        gauss_bonnet: Option<GaussBonnetOut>,
        gauss_bonnet_note: Option<String>,
    }
    let res = Totals {
        surface: SurfaceInfo::of(&entry),
        total_gauss: total_num(&k),
        total_mean_sq: total_num(&m),
        gauss: Extrapolation::of(&k),
        mean_sq: Extrapolation::of(&m),
        gauss_bonnet,
        gauss_bonnet_note: gb_note,
    };
    let mut table = Table::new("partials", &["radius", "gauss", "mean_sq"]);
    for (i, r) in k.truncation_radii.iter().enumerate() {
        table.push(vec![fmt(*r), fmt(k.partial_values[i]), fmt(m.partial_values[i])]);
    }
    let files = out.write("totals", cfg, &res, &[table], start.elapsed())?;
    let summary = format!(
        "{}: total Gauss curvature {:.6} ± {:.2e} ({:.4}π); total mean square {}",
        entry.name,
        k.value,
        k.error_bound,
        k.value / PI,
        if m.divergent { "divergent".to_string() } else { format!("{:.6}", m.value) }
    );
    Ok(Outcome { summary, files })
}

fn family_params(f: &TrialFamily<f64>) -> Map<String, Value> {
    let mut p = Map::new();
    let mut put = |k: &str, v: f64| {
        p.insert(k.into(), serde_json::to_value(Num::exact(v)).expect("number serializes"));
    };
    match f {
        TrialFamily::GoldstoneJaffe { sigma, s0 } | TrialFamily::ThinLayer { sigma, s0 } => {
            put("sigma", *sigma);
            put("s0", *s0);
        }
        TrialFamily::Deformed { sigma, s0, eps, bump } => {
            put("sigma", *sigma);
            put("s0", *s0);
            put("eps", *eps);
            put("bump_s_lo", bump.s_lo);
            put("bump_s_hi", bump.s_hi);
            put("bump_amplitude", bump.amplitude);
            if let Some((c, w)) = bump.window {
                put("bump_window_centre", c);
                put("bump_window_half_width", w);
            }
        }
        TrialFamily::SymmetricLog { n, b1, b2, b3, eps } => {
            put("n", *n as f64);
            put("b1", *b1);
            put("b2", *b2);
            put("b3", *b3);
            put("eps", *eps);
        }
    }
    p
}

fn params_string(f: &TrialFamily<f64>) -> String {
    family_params(f)
        .iter()
        .map(|(k, v)| format!("{k}={}", v["value"]))
        .collect::<Vec<_>>()
        .join(";")
}

pub(crate) fn certify_cmd(cfg: &RunConfig, out: &Output) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let entry = cfg.entry();
    let layer = build_layer(cfg)?;
    let opts = CertifyOptions {
        strategies: cfg.strategies(),
        s0: cfg.certify.s0,
        max_evaluations: cfg.certify.max_evaluations,
        margin: cfg.certify.margin,
        ..Default::default()
    };
    let c: Certificate<f64> = certify(&layer, &opts)?;

    #[derive(Serialize)]
    struct Family {
        name: &'static str,
        params: Map<String, Value>,
    }
    #[derive(Serialize)]
    struct Skipped {
        strategy: &'static str,
        reason: String,
    }
    #[derive(Serialize)]
    struct CertifyOut {
        surface: SurfaceInfo,
        verdict: &'static str,
        strategy: Option<&'static str>,
        family: Option<Family>,
        q_tilde: Num,
        /// |Q̃| / error of the reported trial
        margin: Num,
        required_margin: Num,
        threshold: Num,
        total_gauss: Option<Num>,
        attempts: Count,
        skipped: Vec<Skipped>,
    }
    let res = CertifyOut {
        surface: SurfaceInfo::of(&entry),
        verdict: c.verdict.as_str(),
        strategy: c.strategy.map(|s| s.as_str()),
        family: c.family.as_ref().map(|f| Family { name: f.name(), params: family_params(f) }),
        q_tilde: Num::est(c.q_tilde, c.error),
        margin: Num::exact(c.margin),
        required_margin: Num::exact(cfg.certify.margin),
        threshold: Num::exact(layer.threshold()),
        total_gauss: c.total_gauss.map(|(v, e)| Num::est(v, e)),
        attempts: c.attempts.len().into(),
        skipped: c.skipped.iter().map(|(s, r)| Skipped { strategy: s.as_str(), reason: r.clone() }).collect(),
    };
    let mut table = Table::new("attempts", &["strategy", "family", "params", "q1", "q2", "norm_sq", "q_tilde", "error"]);
    for a in &c.attempts {
        let e = &a.evaluation;
        table.push(vec![
            a.strategy.as_str().into(),
            a.family.name().into(),
            params_string(&a.family),
            fmt(e.q1),
            fmt(e.q2),
            fmt(e.norm_sq),
            fmt(e.q_tilde),
            fmt(e.error),
        ]);
    }
    let files = out.write("certify", cfg, &res, &[table], start.elapsed())?;
    let summary = format!(
        "{}: {} ({}), Q̃ = {:.6e} ± {:.2e}, margin {:.3}",
        entry.name,
        c.verdict.as_str(),
        c.family.as_ref().map_or("no trial", |f| f.name()),
        c.q_tilde,
        c.error,
        c.margin
    );
    Ok(Outcome { summary, files })
}

pub(crate) fn spectrum(cfg: &RunConfig, out: &Output) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let entry = cfg.entry();
    let layer = build_layer(cfg)?;
    let sp = &cfg.spectrum;
    let s_end = sp
        .s_end
        .ok_or_else(|| Failure::from(Error::Capability(format!("{} is not a surface of revolution; partial waves need one", entry.name))))?;
    let base = AxisymMesh::new(s_end, layer.half_width(), sp.n_s, sp.n_u)?;

    #[derive(Serialize)]
    struct Level {
        n_s: Count,
        n_u: Count,
        h_s: Num,
        h_u: Num,
        lowest: Num,
    }
    #[derive(Serialize)]
    struct Extrapolated {
        value: Num,
        order: Num,
    }
    #[derive(Serialize)]
    struct Wave {
        m: Count,
        /// error: change against the previous mesh level, or the solver residual on a single level
        eigenvalues: Vec<Num>,
        below_threshold: Vec<bool>,
        discrete_threshold: Num,
        n_s: Count,
        n_u: Count,
        h_s: Num,
        h_u: Num,
        levels: Vec<Level>,
        extrapolated: Option<Extrapolated>,
    }
    #[derive(Serialize)]
    struct SpectrumOut {
        surface: SurfaceInfo,
        threshold: Num,
        truncation: Num,
        waves: Vec<Wave>,
        bound_states: Count,
    }

    let mut table = Table::new(
        "eigenvalues",
        &["m", "index", "eigenvalue", "threshold", "below_threshold", "mesh_h_s", "mesh_h_u", "S"],
    );
    let mut waves = Vec::new();
    for &m in &sp.m {
        let mut mesh = base.clone();
        let mut runs = Vec::new();
        for level in 0..sp.levels {
            if level > 0 {
                mesh = mesh.refined();
            }
            runs.push(solve_spectrum(&assemble_partial_wave(&layer, m, &mesh)?, sp.eigenvalues)?);
        }
        let fine = runs.last().expect("at least one level");
        let prev = (runs.len() >= 2).then(|| &runs[runs.len() - 2]);
        let eigenvalues = fine
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let disc = prev.and_then(|p| p.eigenvalues.get(i)).map_or(0.0, |q| (v - q).abs());
                Num::est(*v, disc.max(fine.residuals[i]))
            })
            .collect();
        let lows: Vec<f64> = runs.iter().map(|r| r.eigenvalues[0]).collect();
        let extrapolated = richardson(&lows).map(|(v, p)| Extrapolated {
            value: Num::est(v, (v - lows[lows.len() - 1]).abs()),
            order: Num::est(p, 0.1 * p.abs()),
        });
        for (i, v) in fine.eigenvalues.iter().enumerate() {
            table.push(vec![
                m.to_string(),
                i.to_string(),
                fmt(*v),
                fmt(fine.threshold),
                fine.below_threshold[i].to_string(),
                fmt(fine.h_s),
                fmt(fine.h_u),
                fmt(fine.truncation),
            ]);
        }
        waves.push(Wave {
            m: m.into(),
            eigenvalues,
            below_threshold: fine.below_threshold.clone(),
            discrete_threshold: Num::exact(fine.discrete_threshold),
            n_s: fine.n_s.into(),
            n_u: fine.n_u.into(),
            h_s: Num::exact(fine.h_s),
            h_u: Num::exact(fine.h_u),
            levels: runs
                .iter()
                .map(|r| Level {
                    n_s: r.n_s.into(),
                    n_u: r.n_u.into(),
                    h_s: Num::exact(r.h_s),
                    h_u: Num::exact(r.h_u),
                    lowest: Num::est(r.eigenvalues[0], r.residuals[0]),
                })
                .collect(),
            extrapolated,
        });
    }
    let bound_states: usize = waves.iter().map(|w| w.below_threshold.iter().filter(|b| **b).count()).sum();
    let res = SpectrumOut {
        surface: SurfaceInfo::of(&entry),
        threshold: Num::exact(layer.threshold()),
        truncation: Num::exact(s_end),
        waves,
        bound_states: bound_states.into(),
    };
    let files = out.write("spectrum", cfg, &res, &[table], start.elapsed())?;
    let lows: Vec<String> = res.waves.iter().map(|w| format!("m={}: {:.6}", w.m.value, w.eigenvalues[0].value())).collect();
    let summary = format!(
        "{}: threshold {:.6}, lowest {}, {} below threshold",
        entry.name,
        layer.threshold(),
        lows.join(", "),
        bound_states
    );
    Ok(Outcome { summary, files })
}

fn radial_num(e: &RadialEstimate<f64>) -> Num {
    let last = e.levels.last().map_or(e.value, |l| l.1);
    Num::est(e.value, (e.value - last).abs())
}

pub(crate) fn counterexample(cfg: &RunConfig, out: &Output) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let entry = cfg.entry();
    if entry.name != "capped-cylinder" {
        return Err(Failure::Config(format!("counterexample runs on surface.name = \"capped-cylinder\", not {:?}", entry.name)));
    }
    let radius = cfg.surface.radius.expect("resolved");
    let a = cfg.layer.a.expect("resolved");
    if !(a < radius) {
        return Err(Error::HypothesisViolation(format!("half-width {a} must be below the radius {radius}")).into());
    }
    let x = &cfg.counterexample;
    let kappa2 = (PI / (2.0 * a)).powi(2);
    let eps1 = counterexample_radial(radius, a, 64)?;
    let lower = kappa2 - 1.0 / (4.0 * (radius - a).powi(2));
    let upper = kappa2 - 1.0 / (4.0 * (radius + a).powi(2));
    let shell = spherical_shell_ground(radius, a)?;

    #[derive(Serialize)]
    struct Sandwich {
        epsilon1: Num,
        lower: Num,
        upper: Num,
        inside: bool,
    }
    #[derive(Serialize)]
    struct Shell {
        ground: Num,
        threshold: Num,
        relative_error: Num,
    }
    #[derive(Serialize)]
    struct Run {
        s_end: Num,
        n_s: Count,
        n_u: Count,
        lowest: Num,
        epsilon1_discrete: Num,
        below_epsilon1: bool,
    }
    #[derive(Serialize)]
    struct Counter {
        surface: SurfaceInfo,
        radius: Num,
        half_width: Num,
        sandwich: Sandwich,
        shell: Shell,
        runs: Vec<Run>,
        nothing_below_epsilon1: bool,
    }
    let mut table = Table::new("lowest", &["S", "index", "eigenvalue", "epsilon1_discrete", "below_epsilon1", "mesh_h_s", "mesh_h_u"]);
    let mut runs = Vec::new();
    for f in &x.s_factors {
        let s_end = f * radius;
        let rep = counterexample_full(radius, a, s_end, x.h * radius, x.n_u, x.eigenvalues)?;
        let sp = &rep.spectrum;
        for (i, v) in sp.eigenvalues.iter().enumerate() {
            table.push(vec![
                fmt(s_end),
                i.to_string(),
                fmt(*v),
                fmt(rep.epsilon1_discrete),
                (*v < rep.epsilon1_discrete * (1.0 - 1e-9)).to_string(),
                fmt(sp.h_s),
                fmt(sp.h_u),
            ]);
        }
        runs.push(Run {
            s_end: Num::exact(s_end),
            n_s: sp.n_s.into(),
            n_u: sp.n_u.into(),
            lowest: Num::est(rep.lowest, sp.residuals[0]),
            epsilon1_discrete: Num::est(rep.epsilon1_discrete, 1e-12 * rep.epsilon1_discrete),
            below_epsilon1: rep.below_epsilon1,
        });
    }
    let nothing_below = runs.iter().all(|r| !r.below_epsilon1);
    let shell_oracle = kappa2;
    let shell_err = match radial_num(&shell) {
        Num::Estimate { error, .. } => error,
        Num::Exact { .. } => 0.0,
    };
    let res = Counter {
        surface: SurfaceInfo::of(&entry),
        radius: Num::exact(radius),
        half_width: Num::exact(a),
        sandwich: Sandwich {
            epsilon1: radial_num(&eps1),
            lower: Num::exact(lower),
            upper: Num::exact(upper),
            inside: eps1.value >= lower && eps1.value <= upper,
        },
        shell: Shell {
            ground: radial_num(&shell),
            threshold: Num::exact(shell_oracle),
            relative_error: Num::est((shell.value - shell_oracle) / shell_oracle, shell_err / shell_oracle),
        },
        runs,
        nothing_below_epsilon1: nothing_below,
    };
    let files = out.write("counterexample", cfg, &res, &[table], start.elapsed())?;
    let summary = format!(
        "capped cylinder R = {radius}, a = {a}: epsilon1 {:.6} in [{lower:.6}, {upper:.6}]: {}; {}",
        eps1.value,
        res.sandwich.inside,
        if nothing_below { "no eigenvalue below epsilon1" } else { "eigenvalue below epsilon1 found" }
    );
    Ok(Outcome { summary, files })
}
