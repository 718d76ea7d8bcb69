use std::f64::consts::{PI, TAU};

use layerspec_core::layer::LayerSpec;
use layerspec_core::surface::{builtin, geodesic_fan, graph::GraphSurface, PolarChart, ThetaRule};
use layerspec_core::varform::*;
use layerspec_core::Error;

/// Composite Simpson over [lo, hi] split at `breaks`, `n` (even) intervals per piece.
fn simpson(lo: f64, hi: f64, breaks: &[f64], n: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mut pts = vec![lo];
    pts.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    for w in pts.windows(2) {
        let h = (w[1] - w[0]) / n as f64;
        let mut acc = f(w[0]) + f(w[1]);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(w[0] + h * i as f64);
        }
        total += acc * h / 3.0;
    }
    total
}

/// Doubling breaks 0, 2⁻⁴, …, up to `hi`, plus extras.
fn pieces(hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = (-4..40).map(|k| 2f64.powi(k)).take_while(|x| *x < hi).collect();
    out.extend_from_slice(extra);
    out
}

fn hyperboloid_layer(a: f64) -> LayerSpec<f64> {
    LayerSpec::new(PolarChart::from_profile(builtin::hyperboloid(1.0, 1e6, 1e-12).unwrap()), a).unwrap()
}

fn ep_layer(a: f64) -> LayerSpec<f64> {
    let g = GraphSurface::elliptic_paraboloid(1.0, 1.0).unwrap();
    LayerSpec::new(geodesic_fan(&g, 64, 400.0, 1e-10).unwrap(), a).unwrap()
}

/// ∫ w(s, p) r ds dθ with a Simpson rule in s on each stored θ node.
fn surface_integral(layer: &LayerSpec<f64>, end: f64, extra: &[f64], f: impl Fn(f64, &layerspec_core::surface::ChartPoint<f64>) -> f64) -> f64 {
    let chart = layer.chart();
    let rule = if chart.is_axisymmetric() { ThetaRule::single() } else { chart.theta_rule() };
    let end = end.min(chart.s_max());
    let br = pieces(end, extra);
    rule.fine
        .iter()
        .map(|nd| nd.weight * simpson(0.0, end, &br, 1000, |s| {
            let p = chart.sample_node(s, nd).unwrap();
            f(s, &p) * p.r
        }))
        .sum()
}

const GJ_PARAMS: [(f64, f64); 3] = [(0.1, 1.0), (0.05, 2.0), (0.2, 0.5)];

#[test]
fn gj_transverse_identity_on_three_layers() {
    let plane = LayerSpec::new(PolarChart::plane(1e4), 0.2).unwrap();
    for (name, layer) in [("plane", plane), ("hyperboloid", hyperboloid_layer(0.3)), ("paraboloid", ep_layer(0.1))] {
        let k2 = layer.threshold();
        for (sigma, s0) in GJ_PARAMS {
            let trial = TrialFunction::goldstone_jaffe(sigma, s0).unwrap();
            let mac = Macdonald::new(sigma, s0).unwrap();
            let ev = evaluate_form(&layer, &trial).unwrap();
            let oracle = surface_integral(&layer, trial.support_end(), &[s0], |s, p| mac.eval(s).0.powi(2) * p.curvature.gauss);
            let lhs = ev.q2 - k2 * ev.norm_sq;
            let scale = if oracle.abs() > 0.0 { oracle.abs() } else { k2 * ev.norm_sq };
            let rel = (lhs - oracle).abs() / scale;
            assert!(rel <= 1e-5, "{name} σ={sigma} s₀={s0}: Q₂ − κ²N = {lhs}, (φ,Kφ) = {oracle}, rel {rel:e}");
            assert!((ev.shifted_transverse - lhs).abs() <= 1e-6 * scale.max(1e-12) + 1e-12);
        }
    }
}

fn thin_oracle(layer: &LayerSpec<f64>, sigma: f64, s0: f64, denominator: f64) -> f64 {
    let k2 = layer.threshold();
    let c = (PI * PI - 6.0) / (denominator * k2);
    let mac = Macdonald::new(sigma, s0).unwrap();
    surface_integral(layer, s0 + 46.0 / sigma, &[s0], |s, p| {
        let (k, m) = (p.curvature.gauss, p.curvature.mean);
        mac.eval(s).0.powi(2) * (k - m * m + c * m * m * k)
    })
}

#[test]
fn thin_layer_transverse_identity() {
    let layer = hyperboloid_layer(0.3);
    let k2 = layer.threshold();
    for (sigma, s0) in [(0.1, 1.0), (0.05, 3.0)] {
        let ev = evaluate_form(&layer, &TrialFunction::thin_layer(sigma, s0).unwrap()).unwrap();
        let lhs = ev.q2 - k2 * ev.norm_sq;
        let three = thin_oracle(&layer, sigma, s0, 3.0);
        let twelve = thin_oracle(&layer, sigma, s0, 12.0);
        let rel3 = (lhs - three).abs() / three.abs();
        let rel12 = (lhs - twelve).abs() / twelve.abs();
        assert!(rel3 <= 1e-5, "σ={sigma}: {lhs} vs {three} rel {rel3:e}");
        assert!(rel12 > 1e-3, "coefficient 12 should not fit: rel {rel12:e}");
    }
}

#[test]
fn mixed_term_matches_mean_pairing() {
    let s0 = 4.0;
    let bump = Bump::radial(2.0, 3.0).unwrap();
    for (name, layer) in [("hyperboloid", hyperboloid_layer(0.3)), ("paraboloid", ep_layer(0.1))] {
        let oracle = -surface_integral(&layer, 3.0, &[2.0], |s, p| bump.eval(s, 0.0).0 * p.curvature.mean);
        let m1 = mixed_term(&layer, 0.1, s0, bump).unwrap();
        let m2 = mixed_term(&layer, 0.01, s0, bump).unwrap();
        for m in [m1, m2] {
            let rel = (m.polarization - oracle).abs() / oracle.abs();
            assert!(rel <= 1e-4, "{name}: {} vs {oracle}", m.polarization);
            assert!((m.surface_integral - oracle).abs() <= 1e-8 * oracle.abs(), "{name}: {} vs {oracle}", m.surface_integral);
        }
        let diff = (m1.polarization - m2.polarization).abs();
        assert!(diff <= m1.polarization_error + m2.polarization_error + 1e-12 * oracle.abs(), "{name}: σ-dependence {diff:e}");
    }
}

#[test]
fn derphi_matches_quadrature_and_scales_like_inverse_log() {
    let s0 = 1.0;
    let mut products = Vec::new();
    for k in 2..=8 {
        let x0 = 10f64.powi(-k);
        let sigma = x0 / s0;
        let v = derphi_integral(s0, sigma).unwrap();
        if k <= 4 {
            let mac = Macdonald::new(sigma, s0).unwrap();
            let end = mac.support_end();
            let br: Vec<f64> = (0..60).map(|i| s0 * 1.5f64.powi(i)).take_while(|x| *x < end).collect();
            // right limit of φ̇ at the kink
            let o = simpson(s0, end, &br, 400, |s| mac.eval(s.max(s0 * (1.0 + 1e-14))).1.powi(2) * s);
            assert!((v - o).abs() <= 1e-7 * o, "σ={sigma}: {v} vs {o}");
        }
        products.push(v * x0.ln().abs());
    }
    let hi = products.iter().cloned().fold(f64::MIN, f64::max);
    let lo = products.iter().cloned().fold(f64::MAX, f64::min);
    assert!(hi / lo <= 3.0, "{products:?}");
}

#[test]
fn log_trial_on_plane_has_closed_form() {
    let layer = LayerSpec::new(PolarChart::plane(1e7), 0.25).unwrap();
    for n in [2usize, 5, 20] {
        let ev = evaluate_form(&layer, &TrialFunction::symmetric_log(n, 0.0).unwrap()).unwrap();
        let exact = 2.0 * TAU / (n as f64).ln();
        assert!((ev.q_tilde - exact).abs() <= 1e-8 * exact, "n={n}: {} vs {exact}", ev.q_tilde);
    }
    assert!(matches!(epsilon_choice(&layer, 4), Err(Error::DegeneratePairing(_))));
}

#[test]
fn epsilon_choice_is_reciprocal_pairing_and_decreasing() {
    let layer = hyperboloid_layer(0.3);
    let mut last = f64::INFINITY;
    for n in [2usize, 4, 8, 16, 32] {
        let e = epsilon_choice(&layer, n).unwrap();
        let b = n as f64;
        let ramp = LogRamp::new(b, b * b, b * b * b).unwrap();
        let oracle = TAU * simpson(b, b * b * b, &pieces(b * b * b, &[b * b]), 400, |s| {
            let p = layer.chart().sample(s, 0.0).unwrap();
            ramp.eval(s).0.powi(2) * p.curvature.mean * p.r / s
        });
        assert!((e * oracle - 1.0).abs() < 1e-7, "n={n}");
        assert!(e > 0.0 && e < last);
        last = e;
    }
}

#[test]
fn q_tilde_is_quadratic_in_the_trial() {
    let layer = hyperboloid_layer(0.3);
    let t = TrialFunction::symmetric_log(4, 0.3).unwrap();
    let q = evaluate_form(&layer, &t).unwrap().q_tilde;
    let scaled = Combination::new(vec![(-2.5, &t as &dyn Trial<f64>)]);
    let q2 = evaluate_form(&layer, &scaled).unwrap().q_tilde;
    assert!((q2 - 6.25 * q).abs() <= 1e-10 * q.abs());
}

#[test]
fn rotated_window_leaves_form_unchanged_on_revolution_surface() {
    let layer = hyperboloid_layer(0.3);
    let base = Bump::radial(1.0, 2.0).unwrap();
    let a = evaluate_form(&layer, &Deformation { bump: base.with_window(0.5, 0.8) }).unwrap();
    let b = evaluate_form(&layer, &Deformation { bump: base.with_window(2.1, 0.8) }).unwrap();
    assert!((a.q_tilde - b.q_tilde).abs() <= 1e-6 * a.q_tilde.abs() + a.error + b.error);
}

#[test]
fn compact_trial_past_chart_is_truncation() {
    let layer = LayerSpec::new(PolarChart::from_profile(builtin::hyperboloid(1.0, 100.0, 1e-12).unwrap()), 0.3).unwrap();
    assert!(matches!(evaluate_form(&layer, &TrialFunction::symmetric_log(8, 0.1).unwrap()), Err(Error::Truncation(_))));
    assert!(matches!(symmetric_log_trial(&layer, 8, 0.1), Err(Error::Truncation(_))));
}

#[test]
fn certificates() {
    let hyp = hyperboloid_layer(0.3);
    let log = CertifyOptions { strategies: vec![Strategy::SymmetricLog], ..Default::default() };
    // chart reaches 10⁶ so n ≤ 64 only: no certificate yet
    let c = certify(&hyp, &log).unwrap();
    assert_eq!(c.verdict, CertificateVerdict::NotFound);
    let far = LayerSpec::new(PolarChart::from_profile(builtin::hyperboloid(1.0, 2.1e9, 1e-12).unwrap()), 0.3).unwrap();
    let c = certify(&far, &log).unwrap();
    assert_eq!(c.verdict, CertificateVerdict::Certified);
    assert!(c.q_tilde + c.error < 0.0 && c.margin >= 3.0);
    assert!(matches!(c.family, Some(TrialFamily::SymmetricLog { .. })));

    let ep = ep_layer(0.05);
    let c = certify(&ep, &CertifyOptions { strategies: vec![Strategy::ThinLayer], ..Default::default() }).unwrap();
    assert_eq!(c.verdict, CertificateVerdict::Certified);
    assert_eq!(c.strategy, Some(Strategy::ThinLayer));

    let plane = LayerSpec::new(PolarChart::plane(1e4), 0.3).unwrap();
    let c = certify(&plane, &CertifyOptions::default()).unwrap();
    assert_eq!(c.verdict, CertificateVerdict::NotFound);
    assert!(c.q_tilde > 0.0);
}

#[test]
fn certify_rejects_wide_layers_and_inapplicable_families() {
    let sphere_like = PolarChart::from_profile(builtin::paraboloid(1.0, 50.0, 1e-12).unwrap());
    assert!(LayerSpec::new(sphere_like.clone(), 1.0).is_err());
    let forced = LayerSpec::forced(sphere_like, 1.0).unwrap();
    assert!(matches!(certify(&forced, &CertifyOptions::default()), Err(Error::HypothesisViolation(_))));

    let g = GraphSurface::hyperbolic_paraboloid();
    let layer = LayerSpec::new(geodesic_fan(&g, 64, 8.0, 1e-10).unwrap(), 0.1).unwrap();
    let opts = CertifyOptions { strategies: vec![Strategy::SymmetricLog], ..Default::default() };
    assert!(matches!(certify(&layer, &opts), Err(Error::Capability(_))));
}
