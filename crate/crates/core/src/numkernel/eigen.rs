//! Lowest eigenpairs of A v = λ B v by shift-invert Lanczos.
//!
//! The pencil is factored as LDLᵀ at a shift σ; Sylvester's law of inertia
//! on the pivots counts eigenvalues below σ, which is used both to place the
//! shift safely below the wanted eigenvalues and to confirm that none was
//! skipped.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numkernel::skyline::SkylineLdl;
use crate::numkernel::sparse::{CsrMatrix, SparseSymmetricPair};
use crate::numkernel::tridiag::tridiagonal_eigen;
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair<T> {
    pub value: T,
    /// Mass-normalized: vᵀBv = 1.
    pub vector: Vec<T>,
    /// ‖Av − λBv‖ / ‖Bv‖
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shift<T> {
    /// Locate a shift below the spectrum automatically.
    Auto,
    /// Start from the given shift; it is lowered if it lies above wanted eigenvalues.
    At(T),
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions<T> {
    /// Relative residual tolerance: residual ≤ tol·max(1, |λ|).
    pub tol: T,
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl<T: Real> Default for EigenOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-9), max_basis: 100, max_restarts: 40, seed: 0x5eed_1a7e }
    }
}

/// The `k` smallest eigenpairs in ascending order, with default options.
pub fn lowest_eigenpairs<T: Real>(pair: &SparseSymmetricPair<T>, k: usize, shift: Shift<T>) -> Result<Vec<EigenPair<T>>> {
    lowest_eigenpairs_with(pair, k, shift, &EigenOptions::default())
}

pub fn lowest_eigenpairs_with<T: Real>(
    pair: &SparseSymmetricPair<T>,
    k: usize,
    shift: Shift<T>,
    opts: &EigenOptions<T>,
) -> Result<Vec<EigenPair<T>>> {
    let n = pair.dim();
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!("need 1 ≤ k < dimension, got k = {k}, n = {n}")));
    }
    let a = pair.stiffness();
    let b = pair.mass();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let sigma_low = lower_bound(a, b)?;
    let mut locked: Vec<EigenPair<T>> = Vec::new();
    let (mut sigma, mut fac) = match shift {
        Shift::At(s) => match factor_with_retry(a, b, s) {
            Ok((s, f)) if f.negative_pivots() == 0 => (s, f),
            _ => factor_with_retry(a, b, sigma_low)?,
        },
        Shift::Auto => factor_with_retry(a, b, sigma_low)?,
    };

    let mut start: Vec<T> = random_vector(n, &mut rng);
    let mut want = k;
    for _ in 0..opts.max_restarts {
        let need = want.saturating_sub(locked.len()).max(1);
        let basis = opts.max_basis.min(n - locked.len()).max(need + 1).min(n - locked.len());
        let ritz = lanczos_run(a, b, &fac, sigma, &locked, &start, need, basis, opts.tol, &mut rng)?;
        let mut unconverged: Vec<(T, Vec<T>, T)> = Vec::new();
        for (value, vector, residual) in ritz {
            if residual <= opts.tol * value.abs().max(T::one()) {
                locked.push(EigenPair { value, vector, residual });
            } else {
                unconverged.push((value, vector, residual));
            }
        }
        locked.sort_by(|x, y| x.value.partial_cmp(&y.value).expect("finite"));

        if locked.len() >= want {
            // all eigenvalues up to the k-th must be accounted for
            let lk = locked[k - 1].value;
            let tau = lk + opts.tol.sqrt() * lk.abs().max(T::one());
            let (tau, f) = factor_with_retry(a, b, tau)?;
            let found = locked.iter().filter(|p| p.value < tau).count();
            if f.negative_pivots() <= found {
                locked.truncate(k);
                return Ok(locked);
            }
            want = f.negative_pivots().min(n - 1);
        }

        // next start vector and a shift closer to what remains
        start = if unconverged.is_empty() {
            random_vector(n, &mut rng)
        } else {
            let mut v = vec![T::zero(); n];
            for (_, x, _) in &unconverged {
                for (vi, xi) in v.iter_mut().zip(x) {
                    *vi = *vi + *xi;
                }
            }
            v
        };
        if let Some(target) = unconverged.iter().map(|u| u.0).reduce(T::min) {
            let spread = unconverged.iter().map(|u| u.0).fold(target, T::max) - target;
            let mut delta = (spread * T::lit(0.1))
                .max(unconverged[0].2 * T::lit(10.0))
                .max(T::lit(1e-8) * target.abs().max(T::one()));
            for _ in 0..30 {
                let cand = target - delta;
                if cand <= sigma {
                    break;
                }
                let below = locked.iter().filter(|p| p.value < cand).count();
                if let Ok(f) = SkylineLdl::factor(a, b, cand) {
                    if f.negative_pivots() == below {
                        sigma = cand;
                        fac = f;
                        break;
                    }
                }
                delta = delta * T::lit(4.0);
            }
        }
    }
    Err(Error::NoConvergence(format!("{} of {k} eigenpairs converged", locked.len().min(k))))
}

/// Shift with no eigenvalue below it, from Gershgorin discs and inertia checks.
fn lower_bound<T: Real>(a: &CsrMatrix<T>, b: &CsrMatrix<T>) -> Result<T> {
    let disc = |m: &CsrMatrix<T>| -> (T, T) {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..m.dim() {
            let (c, v) = m.row(i);
            let mut d = T::zero();
            let mut off = T::zero();
            for (j, x) in c.iter().zip(v) {
                if *j == i {
                    d = *x;
                } else {
                    off = off + x.abs();
                }
            }
            lo = lo.min(d - off);
            hi = hi.max(d + off);
        }
        (lo, hi)
    };
    let (amin, _) = disc(a);
    let (bmin, bmax) = disc(b);
    let mut sigma = if bmin > T::zero() {
        let lb = if amin < T::zero() { amin / bmin } else { amin / bmax };
        lb - T::lit(1e-3) * (lb.abs() + T::one())
    } else {
        -T::one()
    };
    for _ in 0..200 {
        if let Ok(f) = SkylineLdl::factor(a, b, sigma) {
            if f.negative_pivots() == 0 {
                return Ok(sigma);
            }
        }
        sigma = sigma - T::lit(2.0) * (sigma.abs() + T::one());
    }
    Err(Error::Factorization("no shift below the spectrum found".into()))
}

fn factor_with_retry<T: Real>(a: &CsrMatrix<T>, b: &CsrMatrix<T>, sigma: T) -> Result<(T, SkylineLdl<T>)> {
    let mut s = sigma;
    let mut last = None;
    for i in 0..4 {
        match SkylineLdl::factor(a, b, s) {
            Ok(f) => return Ok((s, f)),
            Err(e) => last = Some(e),
        }
        s = sigma - T::lit(1e-7) * T::from_usize_lossy(i + 1) * sigma.abs().max(T::one());
    }
    Err(last.expect("at least one attempt"))
}

fn random_vector<T: Real>(n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    (0..n).map(|_| T::lit(rng.gen::<f64>() - 0.5)).collect()
}

fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(a, b)| *a * *b).sum()
}

fn axpy<T: Real>(c: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = *yi + c * *xi;
    }
}

/// B-orthogonalizes `w` against `basis` (two passes); returns the B-norm.
fn b_orthogonalize<T: Real>(b: &CsrMatrix<T>, w: &mut [T], basis: &[&[T]], bw: &mut [T]) -> T {
    for _ in 0..2 {
        b.mul_vec(w, bw);
        let coeffs: Vec<T> = basis.iter().map(|q| dot(q, bw)).collect();
        for (q, c) in basis.iter().zip(coeffs) {
            axpy(-c, q, w);
        }
    }
    b.mul_vec(w, bw);
    dot(w, bw).max(T::zero()).sqrt()
}

#[allow(clippy::too_many_arguments)]
fn lanczos_run<T: Real>(
    a: &CsrMatrix<T>,
    b: &CsrMatrix<T>,
    fac: &SkylineLdl<T>,
    sigma: T,
    locked: &[EigenPair<T>],
    start: &[T],
    want: usize,
    max_basis: usize,
    tol: T,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(T, Vec<T>, T)>> {
    let n = a.dim();
    let mut bw = vec![T::zero(); n];
    let mut q0 = start.to_vec();
    let mut norm = {
        let lk: Vec<&[T]> = locked.iter().map(|p| p.vector.as_slice()).collect();
        b_orthogonalize(b, &mut q0, &lk, &mut bw)
    };
    let mut tries = 0;
    while !(norm > T::lit(1e-30)) {
        q0 = random_vector(n, rng);
        let lk: Vec<&[T]> = locked.iter().map(|p| p.vector.as_slice()).collect();
        norm = b_orthogonalize(b, &mut q0, &lk, &mut bw);
        tries += 1;
        if tries > 5 {
            return Err(Error::NoConvergence("cannot build a start vector".into()));
        }
    }
    q0.iter_mut().for_each(|x| *x = *x / norm);
    let mut qs: Vec<Vec<T>> = vec![q0];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let mut bq = vec![T::zero(); n];
    let mut next_check = want.max(4);
    loop {
        let j = qs.len() - 1;
        b.mul_vec(&qs[j], &mut bq);
        let mut w = bq.clone();
        fac.solve_in_place(&mut w);
        let aj = dot(&w, &bq);
        alpha.push(aj);
        let before = {
            b.mul_vec(&w, &mut bw);
            dot(&w, &bw).max(T::zero()).sqrt()
        };
        let bnorm = {
            let basis: Vec<&[T]> =
                locked.iter().map(|p| p.vector.as_slice()).chain(qs.iter().map(|q| q.as_slice())).collect();
            b_orthogonalize(b, &mut w, &basis, &mut bw)
        };
        let m = qs.len();
        let exhausted = m + locked.len() >= n || m >= max_basis;
        if m >= next_check || exhausted {
            next_check = m + (m / 8).max(4);
            let res = ritz_pairs(a, b, sigma, &qs, &alpha, &beta, want)?;
            let converged = res.iter().all(|r| r.2 <= tol * r.0.abs().max(T::one()));
            if converged || exhausted {
                return Ok(res);
            }
        }
        if bnorm <= T::lit(1e-10) * before.max(T::min_positive_value()) {
            // invariant subspace: continue with a fresh direction
            let mut v = random_vector(n, rng);
            let basis: Vec<&[T]> =
                locked.iter().map(|p| p.vector.as_slice()).chain(qs.iter().map(|q| q.as_slice())).collect();
            let nv = b_orthogonalize(b, &mut v, &basis, &mut bw);
            v.iter_mut().for_each(|x| *x = *x / nv);
            beta.push(T::zero());
            qs.push(v);
        } else {
            w.iter_mut().for_each(|x| *x = *x / bnorm);
            beta.push(bnorm);
            qs.push(w);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn ritz_pairs<T: Real>(
    a: &CsrMatrix<T>,
    b: &CsrMatrix<T>,
    sigma: T,
    qs: &[Vec<T>],
    alpha: &[T],
    beta: &[T],
    want: usize,
) -> Result<Vec<(T, Vec<T>, T)>> {
    let m = alpha.len();
    let n = a.dim();
    let (theta, y) = tridiagonal_eigen(alpha, &beta[..m - 1])?;
    let mut out = Vec::new();
    let mut ax = vec![T::zero(); n];
    let mut bx = vec![T::zero(); n];
    // largest θ first
    let mut taken = 0;
    for c in (0..m).rev() {
        if taken == want {
            break;
        }
        let th = theta[c];
        if !(th > T::zero()) {
            continue;
        }
        taken += 1;
        let lambda = sigma + T::one() / th;
        let mut x = vec![T::zero(); n];
        for (i, q) in qs.iter().enumerate().take(m) {
            axpy(y[i * m + c], q, &mut x);
        }
        b.mul_vec(&x, &mut bx);
        let nb = dot(&x, &bx).sqrt();
        x.iter_mut().for_each(|v| *v = *v / nb);
        bx.iter_mut().for_each(|v| *v = *v / nb);
        a.mul_vec(&x, &mut ax);
        let r: T = ax.iter().zip(&bx).map(|(p, q)| (*p - lambda * *q).powi(2)).sum::<T>().sqrt();
        let nbx = dot(&bx, &bx).sqrt();
        out.push((lambda, x, r / nbx));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn second_difference(n: usize, h: f64) -> SparseSymmetricPair<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 / (h * h)));
            if i + 1 < n {
                t.push((i, i + 1, -1.0 / (h * h)));
                t.push((i + 1, i, -1.0 / (h * h)));
            }
        }
        SparseSymmetricPair::new(CsrMatrix::from_triplets(n, &t).unwrap(), CsrMatrix::identity(n)).unwrap()
    }

    #[test]
    fn diagonal_pencil() {
        let a = CsrMatrix::<f64>::diagonal(&[1.0, 2.0, 3.0]);
        let pair = SparseSymmetricPair::new(a, CsrMatrix::identity(3)).unwrap();
        let e = lowest_eigenpairs(&pair, 1, Shift::Auto).unwrap();
        assert!((e[0].value - 1.0).abs() < 1e-12);
        let e = lowest_eigenpairs(&pair, 2, Shift::Auto).unwrap();
        assert!((e[1].value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn finite_difference_spectrum() {
        let n = 199;
        let h = 1.0 / (n + 1) as f64;
        let e = lowest_eigenpairs(&second_difference(n, h), 3, Shift::Auto).unwrap();
        for (k, p) in e.iter().enumerate() {
            let exact = 4.0 / (h * h) * (std::f64::consts::PI * (k + 1) as f64 * h / 2.0).sin().powi(2);
            assert!(((p.value - exact) / exact).abs() < 1e-11, "{} vs {}", p.value, exact);
            assert!(p.residual <= 1e-9 * exact);
        }
    }

    #[test]
    fn mass_scaling() {
        let n = 50;
        let base = second_difference(n, 0.1);
        let doubled =
            SparseSymmetricPair::new(base.stiffness().clone(), CsrMatrix::identity(n).scaled(2.0)).unwrap();
        let e1 = lowest_eigenpairs(&base, 2, Shift::Auto).unwrap();
        let e2 = lowest_eigenpairs(&doubled, 2, Shift::Auto).unwrap();
        for (x, y) in e1.iter().zip(&e2) {
            assert!((x.value / 2.0 - y.value).abs() < 1e-10 * x.value);
            let bn = doubled.mass().quadratic(&y.vector);
            assert!((bn - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_eigenvalues_found() {
        let a = CsrMatrix::diagonal(&[5.0, 1.0, 1.0, 1.0, 2.0, 7.0]);
        let pair = SparseSymmetricPair::new(a, CsrMatrix::identity(6)).unwrap();
        let e = lowest_eigenpairs(&pair, 4, Shift::Auto).unwrap();
        let v: Vec<f64> = e.iter().map(|p| p.value).collect();
        for (x, y) in v.iter().zip([1.0, 1.0, 1.0, 2.0]) {
            assert!((x - y).abs() < 1e-10, "{v:?}");
        }
    }

    #[test]
    fn invalid_k() {
        let pair = second_difference(5, 1.0);
        assert!(lowest_eigenpairs(&pair, 5, Shift::Auto).is_err());
        assert!(lowest_eigenpairs(&pair, 0, Shift::Auto).is_err());
    }
}
