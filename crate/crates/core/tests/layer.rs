use std::sync::OnceLock;

use layerspec_core::layer::*;
use layerspec_core::numkernel::quadrature::LegendreRule;
use layerspec_core::surface::{builtin, geodesic_fan, graph::GraphSurface, PolarChart};
use layerspec_core::Error;
use proptest::prelude::*;

fn hyperboloid() -> &'static LayerSpec<f64> {
    static L: OnceLock<LayerSpec<f64>> = OnceLock::new();
    L.get_or_init(|| LayerSpec::new(PolarChart::from_profile(builtin::hyperboloid(1.0, 200.0, 1e-12).unwrap()), 0.3).unwrap())
}

fn saddle() -> &'static LayerSpec<f64> {
    static L: OnceLock<LayerSpec<f64>> = OnceLock::new();
    L.get_or_init(|| {
        let g = GraphSurface::hyperbolic_paraboloid();
        LayerSpec::new(geodesic_fan(&g, 32, 20.0, 1e-10).unwrap(), 0.2).unwrap()
    })
}

/// Eigenvalues of the 2×2 symmetric matrix [[a, b], [b, c]].
fn eig2(a: f64, b: f64, c: f64) -> (f64, f64) {
    let m = 0.5 * (a + c);
    let d = (0.25 * (a - c).powi(2) + b * b).sqrt();
    (m - d, m + d)
}

#[test]
fn threshold_and_modes() {
    let l = hyperboloid();
    let k = std::f64::consts::PI / 0.6;
    assert!((l.threshold() - k * k).abs() < 1e-12);
    let rule = LegendreRule::<f64>::new(40).unwrap();
    for n in 1..=4 {
        let m = transverse_mode(l, n).unwrap();
        assert!(m.value(0.3).abs() < 1e-14 && m.value(-0.3).abs() < 1e-14);
        let norm = rule.integrate(-0.3, 0.3, |u| m.value(u).powi(2));
        assert!((norm - 1.0).abs() < 1e-12);
        // −χ'' = κ²χ by central differences
        let (u, h) = (0.11, 1e-4);
        let d2 = (m.value(u + h) - 2.0 * m.value(u) + m.value(u - h)) / (h * h);
        assert!((d2 + m.kappa.powi(2) * m.value(u)).abs() < 1e-5 * m.kappa.powi(2));
        for j in 1..n {
            let o = transverse_mode(l, j).unwrap();
            assert!(rule.integrate(-0.3, 0.3, |u| m.value(u) * o.value(u)).abs() < 1e-12);
        }
    }
    assert!(TransverseMode::new(0.3, 0).is_err());
}

#[test]
fn minimal_curvature_radius() {
    // z = x² − y² has |k| ≤ 2 with equality at the pole
    let r = saddle().rho_m();
    assert!((r - 0.5 / 1.05).abs() < 1e-6, "{r}");
    assert_eq!(rho_m(&PolarChart::<f64>::plane(10.0)).unwrap(), f64::INFINITY);
    let sphere = PolarChart::sphere(2.0f64).unwrap();
    assert!((rho_m(&sphere).unwrap() - 2.0 / 1.05).abs() < 1e-9);
}

#[test]
fn wide_layer_rejected_or_recorded() {
    let chart = PolarChart::sphere(1.0f64).unwrap();
    assert!(matches!(LayerSpec::new(chart.clone(), 0.99), Err(Error::HypothesisViolation(_))));
    let forced = LayerSpec::forced(chart, 0.99).unwrap();
    assert!(!forced.omega1_holds());
    assert!(matches!(c_bounds(&forced), Err(Error::HypothesisViolation(_))));
    assert!(LayerSpec::new(PolarChart::<f64>::plane(1.0), -0.1).is_err());
}

#[test]
fn collision_scan_flags_folded_layer() {
    let plane = LayerSpec::new(PolarChart::<f64>::plane(20.0), 0.5).unwrap();
    let scan = collision_scan(&plane, 20.0, 80, 24).unwrap();
    assert!(!scan.collision_detected);
    assert!((scan.min_det_factor - 1.0).abs() < 1e-15);

    let cyl = PolarChart::from_profile(builtin::capped_cylinder(1.0f64, 20.0).unwrap());
    let ok = LayerSpec::new(cyl.clone(), 0.5).unwrap();
    assert!(!collision_scan(&ok, 20.0, 200, 48).unwrap().collision_detected);
    let folded = LayerSpec::forced(cyl, 1.2).unwrap();
    let scan = collision_scan(&folded, 20.0, 200, 48).unwrap();
    assert!(scan.collision_detected && scan.min_det_factor < 0.0);
}

fn check_point(l: &LayerSpec<f64>, s: f64, th: f64, t: f64) {
    let u = t * l.half_width();
    let g = layer_metric(l, s, th, u).unwrap();
    let p = l.chart().sample(s, th).unwrap();
    // det G = r² f²
    let det = g.g11 * g.g22 - g.g12 * g.g12;
    assert!((det.sqrt() - g.weight).abs() <= 1e-12 * g.weight.max(1e-300), "s={s} u={u}");
    assert!((g.det_factor - det_factor(l, s, th, u).unwrap()).abs() < 1e-15);
    // C₋ g ≤ G ≤ C₊ g in the orthonormal frame of g
    let (lo, hi) = eig2(g.g11, g.g12 / p.r, g.g22 / (p.r * p.r));
    let (cm, cp) = c_bounds(l).unwrap();
    assert!(lo >= cm * (1.0 - 1e-12) && hi <= cp * (1.0 + 1e-12), "{lo} {hi} vs [{cm}, {cp}]");
    let (v2, km) = effective_potential(l, s, th, u).unwrap();
    assert!(km <= 1e-12 && v2 <= 1e-12);
    assert!((v2 * g.det_factor.powi(2) - km).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_identities_revolution(s in 0.01f64..150.0, th in 0.0f64..6.28, t in -1.0f64..1.0) {
        check_point(hyperboloid(), s, th, t);
    }

    #[test]
    fn metric_identities_fan(s in 0.01f64..19.0, th in 0.0f64..6.28, t in -1.0f64..1.0) {
        check_point(saddle(), s, th, t);
    }
}
