use layerspec_core::numkernel::bessel::{bessel_k, bessel_k_eval, bessel_k_scaled};
use layerspec_core::numkernel::eigen::{lowest_eigenpairs, Shift};
use layerspec_core::numkernel::ode::integrate_ode;
use layerspec_core::numkernel::quadrature::{gauss_legendre, geometric_breaks, uniform_breaks, LegendreRule};
use layerspec_core::numkernel::skyline::SkylineLdl;
use layerspec_core::numkernel::sparse::{CsrMatrix, SparseSymmetricPair};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn legendre_exact_for_polynomials() {
    for n in 1..=20 {
        let rule = LegendreRule::<f64>::new(n).unwrap();
        for deg in 0..2 * n {
            let exact = (2f64.powi(deg as i32 + 1) - (-1f64).powi(deg as i32 + 1)) / (deg as f64 + 1.0);
            let v = rule.integrate(-1.0, 2.0, |x| x.powi(deg as i32));
            assert!((v - exact).abs() <= 1e-12 * exact.abs().max(1.0), "n={n} deg={deg}");
        }
    }
}

#[test]
fn composite_grids() {
    let g = gauss_legendre::<f64>(8, &uniform_breaks(0.0, std::f64::consts::PI, 6)).unwrap();
    assert!((g.integrate(f64::sin) - 2.0).abs() < 1e-13);
    let br = geometric_breaks(0.0, 1000.0, 0.01, 1.5);
    assert_eq!(br[0], 0.0);
    assert_eq!(*br.last().unwrap(), 1000.0);
    let g = gauss_legendre::<f64>(10, &br).unwrap();
    assert!((g.integrate(|x| (-x).exp()) - 1.0).abs() < 1e-12);
}

#[test]
fn ode_matches_closed_forms() {
    // y'' = −y
    let traj = integrate_ode(|_, y: &[f64], d: &mut [f64]| {
        d[0] = y[1];
        d[1] = -y[0];
    }, &[0.0, 1.0], (0.0, 20.0), 1e-11)
    .unwrap();
    for &s in &[0.3, 5.5, 13.1, 20.0] {
        assert!((traj.eval_component(s, 0) - s.sin()).abs() < 1e-8, "s={s}");
    }
    // Jacobi equation on the unit sphere: r = sin s
    let traj = integrate_ode(|_, y: &[f64], d: &mut [f64]| {
        d[0] = y[1];
        d[1] = -y[0];
    }, &[0.0, 1.0], (0.0, 3.0), 1e-12)
    .unwrap();
    assert!((traj.final_state()[0] - 3f64.sin()).abs() < 1e-10);
}

/// K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt
fn bessel_integral(nu: f64, x: f64) -> f64 {
    let t_end = (2.0 * (750.0 / x).max(1.0)).acosh() + 1.0;
    let rule = LegendreRule::<f64>::new(20).unwrap();
    let n = 400;
    let h = t_end / n as f64;
    (0..n)
        .map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, |t| (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh()))
        .sum::<f64>()
}

#[test]
fn bessel_against_integral_representation() {
    for &x in &[1e-4, 0.05, 0.5, 1.9, 2.1, 8.0, 30.0, 200.0] {
        for nu in [0u32, 1] {
            let scaled = bessel_k_scaled(nu, x).unwrap();
            let oracle = bessel_integral(nu as f64, x);
            assert!((scaled - oracle).abs() <= 1e-12 * oracle, "K{nu}({x}): {scaled} vs {oracle}");
        }
    }
    // K₁ = −K₀′
    for &x in &[0.3f64, 3.0, 40.0] {
        let h = 1e-6 * x;
        let d = (bessel_k(0, x + h).unwrap() - bessel_k(0, x - h).unwrap()) / (2.0 * h);
        assert!((d + bessel_k(1, x).unwrap()).abs() < 1e-8 * bessel_k(1, x).unwrap(), "x={x}: {d} {}", bessel_k(1, x).unwrap());
    }
}

#[test]
fn bessel_underflow_and_domain() {
    let v = bessel_k_eval(0, 800.0f64).unwrap();
    assert!(v.underflow && v.value == 0.0 && v.scaled > 0.0);
    assert!(bessel_k(0, 0.0f64).is_err());
    assert!(bessel_k(0, -1.0f64).is_err());
    assert!(bessel_k(2, 1.0f64).is_err());
}

fn random_pair(n: usize, band: usize, seed: u64) -> (SparseSymmetricPair<f64>, DMatrix<f64>, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..(i + band + 1).min(n) {
            let v: f64 = rng.gen_range(-1.0..1.0);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
        a[(i, i)] += 2.0 * band as f64;
        b[(i, i)] = rng.gen_range(0.5..2.0);
        if i + 1 < n {
            let c: f64 = rng.gen_range(-0.1..0.1);
            b[(i, i + 1)] = c;
            b[(i + 1, i)] = c;
        }
    }
    let trip = |m: &DMatrix<f64>| -> Vec<(usize, usize, f64)> {
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] != 0.0 {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        t
    };
    let pair = SparseSymmetricPair::new(CsrMatrix::from_triplets(n, &trip(&a)).unwrap(), CsrMatrix::from_triplets(n, &trip(&b)).unwrap()).unwrap();
    (pair, a, b)
}

/// Full spectrum of the pencil by Cholesky reduction.
fn dense_pencil(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let l = b.clone().cholesky().unwrap().l();
    let li = l.clone().try_inverse().unwrap();
    let c = &li * a * li.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v
}

#[test]
fn sparse_matches_dense_pencil() {
    for (n, band, seed) in [(12, 2, 1), (50, 3, 2), (120, 5, 3), (200, 4, 4)] {
        let (pair, a, b) = random_pair(n, band, seed);
        let dense = dense_pencil(&a, &b);
        let k = 6.min(n - 1);
        let got = lowest_eigenpairs(&pair, k, Shift::Auto).unwrap();
        for (i, p) in got.iter().enumerate() {
            assert!((p.value - dense[i]).abs() <= 1e-10 * dense[i].abs().max(1.0), "n={n} i={i}: {} vs {}", p.value, dense[i]);
            assert!(p.residual <= 1e-9 * p.value.abs().max(1.0));
            let bv = pair.mass().apply(&p.vector);
            let nrm: f64 = p.vector.iter().zip(&bv).map(|(x, y)| x * y).sum();
            assert!((nrm - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn shift_above_wanted_values_is_lowered() {
    let (pair, a, b) = random_pair(80, 3, 9);
    let dense = dense_pencil(&a, &b);
    let got = lowest_eigenpairs(&pair, 4, Shift::At(dense[10])).unwrap();
    for i in 0..4 {
        assert!((got[i].value - dense[i]).abs() <= 1e-10 * dense[i].abs().max(1.0));
    }
}

#[test]
fn inertia_counts_eigenvalues_below_shift() {
    let (pair, a, b) = random_pair(60, 2, 5);
    let dense = dense_pencil(&a, &b);
    let shift = 0.5 * (dense[6] + dense[7]);
    let f = SkylineLdl::factor(pair.stiffness(), pair.mass(), shift).unwrap();
    assert_eq!(f.negative_pivots(), 7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn mass_scaling_halves_eigenvalues(seed in 0u64..1000, n in 20usize..80) {
        let (pair, _, _) = random_pair(n, 2, seed);
        let b2 = pair.mass().scaled(2.0);
        let pair2 = SparseSymmetricPair::new(pair.stiffness().clone(), b2).unwrap();
        let e1 = lowest_eigenpairs(&pair, 3, Shift::Auto).unwrap();
        let e2 = lowest_eigenpairs(&pair2, 3, Shift::Auto).unwrap();
        for (x, y) in e1.iter().zip(&e2) {
            prop_assert!((x.value - 2.0 * y.value).abs() <= 1e-10 * x.value.abs().max(1.0));
        }
    }

    #[test]
    fn rayleigh_quotient_bounded_below(seed in 0u64..1000) {
        let (pair, _, _) = random_pair(40, 3, seed);
        let low = lowest_eigenpairs(&pair, 1, Shift::Auto).unwrap()[0].value;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 77);
        let x: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        prop_assert!(pair.rayleigh(&x) >= low - 1e-9 * low.abs().max(1.0));
    }
}
