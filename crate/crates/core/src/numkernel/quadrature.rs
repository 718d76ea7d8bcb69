//! Composite Gauss–Legendre rules.

use crate::error::{Error, Result};
use crate::real::Real;

/// Gauss–Legendre nodes and weights on [-1, 1], ascending.
#[derive(Debug, Clone)]
pub struct LegendreRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> LegendreRule<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("points_per_panel must be at least 1".into()));
        }
        let (x, w) = legendre_f64(n);
        Ok(Self {
            nodes: x.into_iter().map(T::lit).collect(),
            weights: w.into_iter().map(T::lit).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over [a, b].
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + *w * f(mid + half * *x);
        }
        acc * half
    }

    /// Maps the rule to [a, b], pushing (node, weight) pairs.
    pub fn map_into(&self, a: T, b: T, nodes: &mut Vec<T>, weights: &mut Vec<T>) {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            nodes.push(mid + half * *x);
            weights.push(*w * half);
        }
    }
}

fn legendre_f64(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_eval(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_eval(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A composite Gauss–Legendre rule over consecutive panels.
#[derive(Debug, Clone)]
pub struct QuadratureGrid<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    panels: Vec<T>,
    points_per_panel: usize,
}

impl<T: Real> QuadratureGrid<T> {
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn panels(&self) -> &[T] {
        &self.panels
    }

    pub fn points_per_panel(&self) -> usize {
        self.points_per_panel
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| *w * f(*x))
            .sum()
    }

    /// Iterates over (node, weight) pairs.
    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Builds the composite rule with `points_per_panel` nodes on every panel.
pub fn gauss_legendre<T: Real>(points_per_panel: usize, panels: &[T]) -> Result<QuadratureGrid<T>> {
    if panels.len() < 2 {
        return Err(Error::InvalidInput("at least one panel is required".into()));
    }
    if panels.iter().any(|p| !p.is_finite()) || panels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("panel boundaries must be finite and strictly increasing".into()));
    }
    let rule = LegendreRule::new(points_per_panel)?;
    let mut nodes = Vec::with_capacity(points_per_panel * (panels.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in panels.windows(2) {
        rule.map_into(w[0], w[1], &mut nodes, &mut weights);
    }
    Ok(QuadratureGrid { nodes, weights, panels: panels.to_vec(), points_per_panel })
}

/// Panel boundaries from `a` to `b` with lengths growing by `ratio`,
/// starting from a first panel of length `first`.
pub fn geometric_breaks<T: Real>(a: T, b: T, first: T, ratio: T) -> Vec<T> {
    let mut out = vec![a];
    let mut h = first;
    let mut x = a;
    while x + h < b {
        x = x + h;
        // avoid a sliver at the end
        if b - x < T::lit(0.5) * h {
            break;
        }
        out.push(x);
        h = h * ratio;
    }
    out.push(b);
    out
}

/// `n` equal panels on [a, b].
pub fn uniform_breaks<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    let n = n.max(1);
    let h = (b - a) / T::from_usize_lossy(n);
    let mut out: Vec<T> = (0..n).map(|i| a + h * T::from_usize_lossy(i)).collect();
    out.push(b);
    out
}

/// Merges sorted breakpoint lists and drops near-duplicates.
pub fn merge_breaks<T: Real>(lists: &[&[T]]) -> Vec<T> {
    let mut all: Vec<T> = lists.iter().flat_map(|l| l.iter().copied()).collect();
    all.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    let mut out: Vec<T> = Vec::with_capacity(all.len());
    for x in all {
        match out.last() {
            Some(&last) if (x - last).abs() <= T::lit(1e-12) * x.abs().max(T::one()) => {}
            _ => out.push(x),
        }
    }
    out
}
