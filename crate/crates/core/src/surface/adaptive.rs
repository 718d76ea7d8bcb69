//! Adaptive panel quadrature over θ ∈ [0, 2π) for vector-valued integrands.

use crate::error::Result;
use crate::numkernel::quadrature::LegendreRule;
use crate::real::Real;

#[derive(Debug, Clone, Copy)]
pub(crate) struct AdaptiveSettings<T> {
    pub tol: T,
    pub points: usize,
    pub initial_panels: usize,
    pub max_evals: usize,
}

/// (θ, weight, index of the evaluation in call order)
pub(crate) type Node<T> = (T, T, usize);

#[derive(Debug, Clone)]
pub(crate) struct AdaptiveOutcome<T> {
    pub fine: Vec<Node<T>>,
    pub coarse: Vec<Node<T>>,
    pub integral: Vec<T>,
    pub error: Vec<T>,
    pub exhausted: bool,
}

impl<T: Real> AdaptiveOutcome<T> {
    /// Evaluation indices that appear in either rule.
    pub fn used(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self.fine.iter().chain(&self.coarse).map(|n| n.2).collect();
        u.sort_unstable();
        u.dedup();
        u
    }
}

pub(crate) fn adaptive_theta<T, F>(settings: &AdaptiveSettings<T>, mut f: F) -> Result<AdaptiveOutcome<T>>
where
    T: Real,
    F: FnMut(T) -> Result<Vec<T>>,
{
    let rule = LegendreRule::<T>::new(settings.points)?;
    let mut values: Vec<Vec<T>> = Vec::new();
    let mut scale: Vec<T> = Vec::new();
    let mut eval_panel = |a: T, b: T, values: &mut Vec<Vec<T>>, scale: &mut Vec<T>| -> Result<Vec<Node<T>>> {
        let mut xs = Vec::new();
        let mut ws = Vec::new();
        rule.map_into(a, b, &mut xs, &mut ws);
        let mut out = Vec::with_capacity(xs.len());
        for (x, w) in xs.into_iter().zip(ws) {
            let v = f(x)?;
            if scale.is_empty() {
                scale.resize(v.len(), T::zero());
            }
            for (s, vi) in scale.iter_mut().zip(&v) {
                *s = s.max(vi.abs());
            }
            values.push(v);
            out.push((x, w, values.len() - 1));
        }
        Ok(out)
    };
    let integrate = |nodes: &[Node<T>], values: &[Vec<T>]| -> Vec<T> {
        let m = values[nodes[0].2].len();
        let mut acc = vec![T::zero(); m];
        for &(_, w, i) in nodes {
            for (a, v) in acc.iter_mut().zip(&values[i]) {
                *a = *a + w * *v;
            }
        }
        acc
    };

    let n0 = settings.initial_panels.max(1);
    let h0 = T::TAU() / T::from_usize_lossy(n0);
    let mut stack: Vec<(T, T, Vec<Node<T>>)> = Vec::new();
    for i in (0..n0).rev() {
        let a = h0 * T::from_usize_lossy(i);
        let b = if i + 1 == n0 { T::TAU() } else { h0 * T::from_usize_lossy(i + 1) };
        stack.push((a, b, Vec::new()));
    }
    // coarse nodes of the initial panels, evaluated left to right
    for item in stack.iter_mut().rev() {
        item.2 = eval_panel(item.0, item.1, &mut values, &mut scale)?;
    }

    let mut fine = Vec::new();
    let mut coarse = Vec::new();
    let mut error: Vec<T> = Vec::new();
    let mut exhausted = false;
    let min_width = T::TAU() * T::lit(2f64.powi(-24));
    while let Some((a, b, cnodes)) = stack.pop() {
        let mid = (a + b) * T::lit(0.5);
        let budget_left = values.len() + 2 * settings.points <= settings.max_evals;
        if !budget_left {
            exhausted = true;
        }
        if !budget_left || b - a < min_width {
            // accept as is; the coarse rule doubles as the fine one
            fine.extend_from_slice(&cnodes);
            coarse.extend_from_slice(&cnodes);
            continue;
        }
        let left = eval_panel(a, mid, &mut values, &mut scale)?;
        let right = eval_panel(mid, b, &mut values, &mut scale)?;
        let ic = integrate(&cnodes, &values);
        let mut halves = left.clone();
        halves.extend_from_slice(&right);
        let ifn = integrate(&halves, &values);
        if error.is_empty() {
            error.resize(ic.len(), T::zero());
        }
        let ok = ic
            .iter()
            .zip(&ifn)
            .zip(&scale)
            .all(|((c, fv), s)| (*c - *fv).abs() <= settings.tol * (b - a) * *s);
        if ok {
            for ((e, c), fv) in error.iter_mut().zip(&ic).zip(&ifn) {
                *e = *e + (*c - *fv).abs();
            }
            fine.extend_from_slice(&halves);
            coarse.extend_from_slice(&cnodes);
        } else {
            stack.push((mid, b, right));
            stack.push((a, mid, left));
        }
    }
    let by_theta = |x: &Node<T>, y: &Node<T>| x.0.partial_cmp(&y.0).expect("finite θ");
    fine.sort_by(by_theta);
    coarse.sort_by(by_theta);
    let integral = integrate(&fine, &values);
    if error.is_empty() {
        error.resize(integral.len(), T::zero());
    }
    Ok(AdaptiveOutcome { fine, coarse, integral, error, exhausted })
}

/// Adaptive Gauss–Legendre over [a, b] for a fixed-size vector integrand.
///
/// A panel is accepted when the rule on the panel and on its two halves agree
/// to `tol` relative to ∫|f| over the panel or over the whole interval. Returns (integral, error estimate).
pub(crate) fn adaptive_interval<T, const N: usize, F>(
    a: T,
    b: T,
    breaks: &[T],
    tol: T,
    max_panels: usize,
    mut f: F,
) -> Result<([T; N], [T; N])>
where
    T: Real,
    F: FnMut(T) -> Result<[T; N]>,
{
    let rule = LegendreRule::<T>::new(10)?;
    let mut panel = |lo: T, hi: T| -> Result<([T; N], [T; N])> {
        let mut xs = Vec::with_capacity(10);
        let mut ws = Vec::with_capacity(10);
        rule.map_into(lo, hi, &mut xs, &mut ws);
        let mut int = [T::zero(); N];
        let mut abs = [T::zero(); N];
        for (x, w) in xs.into_iter().zip(ws) {
            let v = f(x)?;
            for c in 0..N {
                int[c] = int[c] + w * v[c];
                abs[c] = abs[c] + w * v[c].abs();
            }
        }
        Ok((int, abs))
    };
    let mut edges: Vec<T> = vec![a];
    edges.extend(breaks.iter().copied().filter(|x| *x > a && *x < b));
    edges.push(b);
    let mut stack: Vec<(T, T, [T; N], [T; N])> = Vec::new();
    let mut global = [T::zero(); N];
    for w in edges.windows(2).rev() {
        let (i, s) = panel(w[0], w[1])?;
        for c in 0..N {
            global[c] = global[c] + s[c];
        }
        stack.push((w[0], w[1], i, s));
    }
    let min_width = (b - a) * T::lit(1e-9);
    let mut total = [T::zero(); N];
    let mut err = [T::zero(); N];
    let mut panels = 0usize;
    while let Some((lo, hi, whole, _)) = stack.pop() {
        let mid = (lo + hi) * T::lit(0.5);
        let (l, labs) = panel(lo, mid)?;
        let (r, rabs) = panel(mid, hi)?;
        panels += 1;
        let mut ok = true;
        for c in 0..N {
            let d = (l[c] + r[c] - whole[c]).abs();
            let scale = labs[c] + rabs[c];
            // relative to the panel, or to the whole integral for tiny panels
            if d > tol * scale && d > tol * global[c] && d > T::epsilon() * T::lit(16.0) * scale {
                ok = false;
            }
        }
        if ok || hi - lo < min_width || panels + stack.len() >= max_panels {
            for c in 0..N {
                total[c] = total[c] + l[c] + r[c];
                err[c] = err[c] + (l[c] + r[c] - whole[c]).abs();
            }
        } else {
            stack.push((mid, hi, r, rabs));
            stack.push((lo, mid, l, labs));
        }
    }
    Ok((total, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peaked_periodic_integrand() {
        // ∫ 1/(1.01 − cos θ) dθ = 2π/√(1.01² − 1)
        let s = AdaptiveSettings { tol: 1e-10, points: 6, initial_panels: 4, max_evals: 100_000 };
        let out = adaptive_theta(&s, |t: f64| Ok(vec![1.0 / (1.01 - t.cos()), t.sin().powi(2)])).unwrap();
        let exact = std::f64::consts::TAU / (1.01f64 * 1.01 - 1.0).sqrt();
        assert!(((out.integral[0] - exact) / exact).abs() < 1e-8, "{}", out.integral[0]);
        assert!((out.integral[1] - std::f64::consts::PI).abs() < 1e-8);
        assert!(!out.exhausted);
        let wsum: f64 = out.fine.iter().map(|n| n.1).sum();
        assert!((wsum - std::f64::consts::TAU).abs() < 1e-12);
        let wsum: f64 = out.coarse.iter().map(|n| n.1).sum();
        assert!((wsum - std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn interval_resolves_flat_bump() {
        let f = |x: f64| {
            let t = 2.0 * x - 5.0;
            if t.abs() >= 1.0 { 0.0 } else { (1.0 - 1.0 / (1.0 - t * t)).exp() }
        };
        let (v, _) = adaptive_interval(2.0, 3.0, &[], 1e-12, 10_000, |x| Ok([f(x)])).unwrap();
        assert!((v[0] - 0.6034501612189378).abs() < 1e-13, "{}", v[0]);
    }
}
