use std::f64::consts::{PI, TAU};

use layerspec_core::surface::*;
use layerspec_core::Error;
use proptest::prelude::*;

fn doubling(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 2f64.powi(k)).collect()
}

#[test]
fn jacobi_examples() {
    let tol = 1e-10;
    let j = jacobi_field(|_| 0.0f64, 5.0, tol).unwrap();
    for s in [0.1, 1.0, 4.9] {
        assert!((j.r(s) - s).abs() < 1e-12);
    }
    let j = jacobi_field(|_| 1.0f64, 3.0, tol).unwrap();
    assert!((j.r(PI / 2.0) - 1.0).abs() < 10.0 * tol);
    let j = jacobi_field(|_| -1.0f64, 1.5, tol).unwrap();
    assert!((j.r(1.0) - 1.1752012).abs() < 1e-7);
    assert!(matches!(jacobi_field(|_| 1.0f64, 3.5, tol), Err(Error::ConjugatePoint(_))));
}

#[test]
fn meridian_examples() {
    let p = revolution_from_meridian(&MeridianSpec::new(|_| 0.0f64, 10.0), 1e-10).unwrap();
    let q = p.sample(7.0).unwrap();
    assert!((q.r - 7.0).abs() < 1e-12 && q.z.abs() < 1e-12);
    let rad = 3.0f64;
    let p = revolution_from_meridian(&MeridianSpec::new(move |_| 1.0 / rad, 9.0), 1e-10).unwrap();
    for s in [0.5f64, 2.0, 8.9] {
        assert!((p.sample(s).unwrap().r - rad * (s / rad).sin()).abs() < 1e-9);
    }
    let m = builtin::oscillating_meridian(48.0f64, 1e-12).unwrap();
    let b_inf = (PI / 2.0).sqrt();
    assert!((b_inf - 1.25331).abs() < 1e-5);
    assert!((m.sample(48.0).unwrap().dr - b_inf.cos()).abs() < 1e-4);
}

#[test]
fn revolution_curvature_examples() {
    let cyl = RevolutionProfile::closed(
        |s: f64| ProfileJet { r: 2.0, z: s, dr: 0.0, dz: 1.0, k_s: 0.0, dk_s: 0.0 },
        10.0,
        vec![],
    );
    let c = revolution_curvatures(&cyl, 3.0).unwrap();
    assert_eq!((c.k_s, c.k_theta), (0.0, 0.5));
    let sph = revolution_from_meridian(&MeridianSpec::new(|_| 0.5f64, 6.0), 1e-12).unwrap();
    for s in [0.3, 2.0, 5.5] {
        let c = revolution_curvatures(&sph, s).unwrap();
        assert!((c.k_s - 0.5).abs() < 1e-12 && (c.k_theta - 0.5).abs() < 1e-9);
    }
    let plane = RevolutionProfile::closed(
        |s: f64| ProfileJet { r: s, z: 0.0, dr: 1.0, dz: 0.0, k_s: 0.0, dk_s: 0.0 },
        10.0,
        vec![],
    );
    let c = revolution_curvatures(&plane, 4.0).unwrap();
    assert_eq!((c.gauss, c.mean, c.k_s, c.k_theta), (0.0, 0.0, 0.0, 0.0));
    assert!(matches!(revolution_curvatures(&plane, 0.0), Err(Error::PoleSingularity)));
}

#[test]
fn graph_curvature_examples() {
    let c = graph_curvatures(&GraphSurface::<f64>::plane(), 0.3, -1.2).unwrap();
    assert_eq!((c.gauss, c.mean, c.k1, c.k2), (0.0, 0.0, 0.0, 0.0));
    // z = x² − y² at the origin: second fundamental form diag(2, −2) with unit normal e_z
    let c = graph_curvatures(&GraphSurface::<f64>::hyperbolic_paraboloid(), 0.0, 0.0).unwrap();
    assert!((c.gauss + 4.0).abs() < 1e-14 && c.mean.abs() < 1e-14);
    assert!((c.k1 - 2.0).abs() < 1e-14 && (c.k2 + 2.0).abs() < 1e-14);
    let c = graph_curvatures(&GraphSurface::<f64>::hemisphere(2.0), 0.0, 0.0).unwrap();
    assert!((c.gauss - 0.25).abs() < 1e-14 && (c.mean.abs() - 0.5).abs() < 1e-14);
}

#[test]
fn flat_fan() {
    let chart = geodesic_fan(&GraphSurface::<f64>::plane(), 12, 10.0, 1e-10).unwrap();
    for th in [0.0, 1.0, 4.0] {
        let p = chart.sample(7.5, th).unwrap();
        assert!((p.r - 7.5).abs() < 1e-9);
        assert!((p.position[0] - 7.5 * th.cos()).abs() < 1e-9);
        assert!((p.position[1] - 7.5 * th.sin()).abs() < 1e-9);
    }
}

#[test]
fn fan_matches_profile_on_paraboloid() {
    let c = 0.5;
    let fan = geodesic_fan(&GraphSurface::<f64>::paraboloid(c), 24, 8.0, 1e-11).unwrap();
    let prof = PolarChart::from_profile(builtin::paraboloid(c, 8.0, 1e-12).unwrap());
    for s in [0.25, 1.0, 3.0, 7.9] {
        for th in [0.0, 0.7, 2.0, 5.5] {
            let a = fan.sample(s, th).unwrap();
            let b = prof.sample(s, th).unwrap();
            assert!((a.r - b.r).abs() <= 1e-6, "s={s} θ={th}: {} vs {}", a.r, b.r);
            assert!((a.curvature.mean - b.curvature.mean).abs() <= 1e-6);
        }
    }
}

#[test]
fn geodesics_have_unit_speed() {
    for g in [GraphSurface::<f64>::hyperbolic_paraboloid(), GraphSurface::monkey_saddle()] {
        let chart = geodesic_fan(&g, 24, 16.0, 1e-10).unwrap();
        for nd in chart.theta_rule().fine.iter().step_by(7) {
            for s in [0.5, 3.0, 9.0, 16.0] {
                let t = chart.sample_node(s, nd).unwrap().tangent;
                let n = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
                assert!((n - 1.0).abs() < 1e-8, "{n}");
            }
        }
    }
}

#[test]
fn jacobi_matches_angular_stretch() {
    for g in [GraphSurface::<f64>::hyperbolic_paraboloid(), GraphSurface::monkey_saddle(), GraphSurface::elliptic_paraboloid(1.0, 2.0).unwrap()] {
        let chart = geodesic_fan(&g, 24, 6.0, 1e-12).unwrap();
        let h = 1e-4;
        for th in [0.3, 1.9, 4.4] {
            for s in [0.5, 2.0, 6.0] {
                let a = chart.point(s, th + h).unwrap();
                let b = chart.point(s, th - h).unwrap();
                let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt() / (2.0 * h);
                let r = chart.r(s, th).unwrap();
                assert!(((d - r) / r).abs() < 1e-6, "{} s={s} θ={th}: {d} vs {r}", g.label());
            }
        }
    }
}

#[test]
fn reconstruction_round_trip() {
    let prof = builtin::hyperboloid(1.0f64, 31.0, 1e-12).unwrap();
    let p2 = prof.clone();
    let spec = MeridianSpec::new(move |s| p2.sample(s).unwrap().k_s, 30.0);
    let back = revolution_from_meridian(&spec, 1e-12).unwrap();
    let shift = prof.sample(0.0).unwrap().z - back.sample(0.0).unwrap().z;
    for s in [0.1, 1.0, 5.0, 17.0, 30.0] {
        let (a, b) = (prof.sample(s).unwrap(), back.sample(s).unwrap());
        assert!((a.r - b.r).abs() < 1e-8 && (a.z - b.z - shift).abs() < 1e-8, "s={s}");
    }
}

#[test]
fn totals_plane_and_saddles() {
    let plane = PolarChart::plane(64.0);
    let k = total_gauss(&plane, &doubling(0, 6)).unwrap();
    assert_eq!(k.value, 0.0);
    assert!(!k.divergent);
    let m = total_mean_sq(&plane, &doubling(0, 6)).unwrap();
    assert_eq!(m.value, 0.0);

    let chart = geodesic_fan(&GraphSurface::<f64>::hyperbolic_paraboloid(), 48, 1024.0, 1e-10).unwrap();
    let k = total_gauss(&chart, &doubling(0, 10)).unwrap();
    assert!((k.value + TAU).abs() < 0.01 * TAU, "{k:?}");
    assert!((k.cross_check.unwrap() + TAU).abs() < 0.01 * TAU);
    let n = k.partial_values.len();
    assert!(k.error_bound >= (k.partial_values[n - 1] - k.partial_values[n - 2]).abs());
}

#[test]
fn elliptic_paraboloid_mean_square_diverges() {
    let chart = geodesic_fan(&GraphSurface::<f64>::elliptic_paraboloid(1.0, 1.0).unwrap(), 24, 256.0, 1e-10).unwrap();
    let m = total_mean_sq(&chart, &doubling(0, 8)).unwrap();
    assert!(m.divergent);
}

#[test]
fn capped_cylinder_totals_and_hypotheses() {
    let chart = PolarChart::from_profile(builtin::capped_cylinder(1.0f64, 64.0).unwrap());
    let m = total_mean_sq(&chart, &doubling(2, 6)).unwrap();
    assert!(m.divergent);
    let h = hypotheses_report(&chart, &doubling(2, 6)).unwrap();
    assert_eq!(h.sigma0, Verdict::Fail);
}

#[test]
fn gauss_bonnet_examples() {
    let plane = RevolutionProfile::closed(
        |s: f64| ProfileJet { r: s, z: 0.0, dr: 1.0, dz: 0.0, k_s: 0.0, dk_s: 0.0 },
        10.0,
        vec![],
    );
    assert_eq!(gauss_bonnet_residual(&plane).unwrap().residual, 0.0);

    let hyp = builtin::hyperboloid(1.0f64, 4096.0, 1e-12).unwrap();
    let gb = gauss_bonnet_residual(&hyp).unwrap();
    assert!(gb.residual < 1e-3);
    let oracle = TAU * (1.0 - 0.5f64.sqrt());
    assert!((gb.total - oracle).abs() < 1e-3, "{} vs {oracle}", gb.total);
    let k = total_gauss(&PolarChart::from_profile(hyp), &doubling(0, 12)).unwrap();
    assert!((k.value - oracle).abs() < 1e-4);

    let m = builtin::oscillating_meridian(64.0f64, 1e-12).unwrap();
    let gb = gauss_bonnet_residual(&m).unwrap();
    assert!(gb.residual < 1e-3);
    assert!((gb.total / PI - 1.375).abs() < 0.01);
}

#[test]
fn gauss_bonnet_rejects_oscillating_slope() {
    // k_s = sin s: ṙ = cos(1 − cos s) oscillates forever
    let p = revolution_from_meridian(&MeridianSpec::new(|s: f64| s.sin(), 60.0), 1e-10).unwrap();
    assert!(matches!(gauss_bonnet_residual(&p), Err(Error::NoLimit(_))));
}

#[test]
fn oscillating_meridian_hypotheses() {
    let chart = PolarChart::from_profile(builtin::oscillating_meridian(64.0f64, 1e-12).unwrap());
    let radii = doubling(0, 6);
    let k = total_gauss(&chart, &radii).unwrap();
    let exact = TAU * (1.0 - (PI / 2.0).sqrt().cos());
    assert!(((k.value - exact) / exact).abs() < 0.01);
    let h = hypotheses_report(&chart, &radii).unwrap();
    assert_eq!(h.sigma1, Verdict::Pass);
    assert_eq!(h.sigma2, Verdict::Fail);
}

#[test]
fn plane_hypotheses() {
    let h = hypotheses_report(&PolarChart::plane(64.0f64), &doubling(0, 6)).unwrap();
    assert_eq!((h.sigma0, h.sigma1, h.sigma2), (Verdict::Pass, Verdict::Pass, Verdict::Pass));
    assert!(h.growth_constant >= TAU - 1e-12 && h.growth_constant <= TAU * 1.05 + 1e-12);
}

#[test]
fn growth_constant_bounds_circle_length() {
    let chart = geodesic_fan(&GraphSurface::<f64>::hyperbolic_paraboloid(), 24, 64.0, 1e-10).unwrap();
    let h = hypotheses_report(&chart, &doubling(0, 6)).unwrap();
    let rule = chart.theta_rule().fine;
    let mut rng = 0x2545f4914f6cdd1du64;
    for _ in 0..1000 {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        let s = 1e-3 + (rng >> 11) as f64 / (1u64 << 53) as f64 * 63.9;
        let len: f64 = rule.iter().map(|nd| nd.weight * chart.sample_node(s, nd).unwrap().r).sum();
        assert!(len <= h.growth_constant * s, "s={s}");
    }
}

fn check_identities(c: &CurvatureSample<f64>) {
    assert!((c.gauss - c.k1 * c.k2).abs() <= 1e-10 * (1.0 + c.gauss.abs()));
    assert!((c.mean - 0.5 * (c.k1 + c.k2)).abs() <= 1e-10 * (1.0 + c.mean.abs()));
    assert!(c.gauss - c.mean * c.mean <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_curvature_identities(x in -5.0f64..5.0, y in -5.0f64..5.0) {
        for g in [GraphSurface::hyperbolic_paraboloid(), GraphSurface::monkey_saddle(), GraphSurface::elliptic_paraboloid(1.0, 2.0).unwrap()] {
            check_identities(&graph_curvatures(&g, x, y).unwrap());
        }
    }

    #[test]
    fn revolution_curvature_identities(s in 1e-3f64..60.0) {
        for p in [builtin::hyperboloid(1.0, 64.0, 1e-12).unwrap(), builtin::oscillating_meridian(64.0, 1e-12).unwrap(), builtin::capped_cylinder(1.0, 64.0).unwrap()] {
            let c = revolution_curvatures(&p, s).unwrap();
            let q = p.sample(s).unwrap();
            prop_assert!((q.dr * q.dr + q.dz * q.dz - 1.0).abs() < 1e-10);
            check_identities(&CurvatureSample::from_gauss_mean(c.gauss, c.mean));
            check_identities(&PolarChart::from_profile(p).curvatures(s, 0.3).unwrap());
        }
    }

    #[test]
    fn fan_curvature_identities(s in 0.0f64..16.0, k in 0usize..1000) {
        let chart = geodesic_fan(&GraphSurface::<f64>::monkey_saddle(), 12, 16.0, 1e-10).unwrap();
        let rule = chart.theta_rule().fine;
        let p = chart.sample_node(s, &rule[k % rule.len()]).unwrap();
        check_identities(&p.curvature);
        let sh = CurvatureSample::from_shape(p.shape[0], p.shape[1], p.shape[2]);
        prop_assert!((sh.gauss - p.curvature.gauss).abs() < 1e-8 * (1.0 + p.curvature.gauss.abs()));
        prop_assert!((sh.mean - p.curvature.mean).abs() < 1e-8 * (1.0 + p.curvature.mean.abs()));
    }
}
