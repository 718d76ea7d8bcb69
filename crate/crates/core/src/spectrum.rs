//! Finite-difference spectra of layers over surfaces of revolution, one
//! angular momentum m at a time.
//!
//! The partial-wave form
//!   Q_m[ψ] = ∫∫ [ψ_s² w/(1−uk_s)² + ψ_u² w + m² ψ² w/((1−uk_θ)² r²)] ds du,
//!   w = (1−uk_s)(1−uk_θ) r,
//! is discretized cell-centred in s and vertex-centred in u with flux
//! coefficients at faces and a lumped mass.

use crate::error::{Error, Result};
use crate::layer::LayerSpec;
use crate::numkernel::eigen::{lowest_eigenpairs_with, EigenOptions, Shift};
use crate::numkernel::sparse::{CsrMatrix, SparseSymmetricPair};
use crate::numkernel::tridiag::tridiagonal_eigen;
use crate::real::Real;
use crate::surface::{builtin, PolarChart};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndCondition {
    Dirichlet,
    /// zero flux at s = S
    Neumann,
}

/// Cells in s (nodes at cell midpoints, first face at the pole) times
/// interior nodes in u.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisymMesh<T> {
    faces: Vec<T>,
    pub half_width: T,
    pub n_u: usize,
    pub h_u: T,
    pub end: EndCondition,
}

impl<T: Real> AxisymMesh<T> {
    /// Uniform cells of width S/n_s.
    pub fn new(s_end: T, half_width: T, n_s: usize, n_u: usize) -> Result<Self> {
        if !(s_end > T::zero()) || !(half_width > T::zero()) {
            return Err(Error::InvalidInput("mesh needs S > 0 and a > 0".into()));
        }
        if n_s < 16 || n_u < 16 {
            return Err(Error::InvalidInput(format!("at least 16 nodes per direction, got {n_s} × {n_u}")));
        }
        let h = s_end / T::from_usize_lossy(n_s);
        let faces = (0..=n_s).map(|i| if i == n_s { s_end } else { h * T::from_usize_lossy(i) }).collect();
        Ok(Self::from_faces(faces, half_width, n_u))
    }

    /// Piecewise-uniform cells of width close to `h` with a face exactly at `interface`.
    pub fn with_interface(s_end: T, half_width: T, h: T, n_u: usize, interface: T) -> Result<Self> {
        if !(interface > T::zero() && interface < s_end) || !(h > T::zero()) {
            return Err(Error::InvalidInput(format!("interface {interface} must lie inside (0, {s_end})")));
        }
        if n_u < 16 {
            return Err(Error::InvalidInput(format!("at least 16 nodes in u, got {n_u}")));
        }
        let n1 = (interface / h).ceil().to_usize().unwrap_or(1).max(1);
        let n2 = ((s_end - interface) / h).ceil().to_usize().unwrap_or(1).max(1);
        if n1 + n2 < 16 {
            return Err(Error::InvalidInput("at least 16 cells in s".into()));
        }
        let h1 = interface / T::from_usize_lossy(n1);
        let h2 = (s_end - interface) / T::from_usize_lossy(n2);
        let mut faces: Vec<T> = (0..n1).map(|i| h1 * T::from_usize_lossy(i)).collect();
        faces.extend((0..n2).map(|i| interface + h2 * T::from_usize_lossy(i)));
        faces.push(s_end);
        Ok(Self::from_faces(faces, half_width, n_u))
    }

    fn from_faces(faces: Vec<T>, half_width: T, n_u: usize) -> Self {
        let h_u = (half_width + half_width) / T::from_usize_lossy(n_u + 1);
        Self { faces, half_width, n_u, h_u, end: EndCondition::Dirichlet }
    }

    pub fn neumann(mut self) -> Self {
        self.end = EndCondition::Neumann;
        self
    }

    /// Every cell split in two and the u spacing halved.
    pub fn refined(&self) -> Self {
        let mut faces = Vec::with_capacity(2 * self.faces.len());
        for w in self.faces.windows(2) {
            faces.push(w[0]);
            faces.push((w[0] + w[1]) * T::lit(0.5));
        }
        faces.push(self.s_end());
        Self { end: self.end, ..Self::from_faces(faces, self.half_width, 2 * self.n_u + 1) }
    }

    pub fn s_end(&self) -> T {
        *self.faces.last().expect("non-empty")
    }

    pub fn n_s(&self) -> usize {
        self.faces.len() - 1
    }

    pub fn faces(&self) -> &[T] {
        &self.faces
    }

    pub fn s_node(&self, i: usize) -> T {
        (self.faces[i] + self.faces[i + 1]) * T::lit(0.5)
    }

    pub fn cell_width(&self, i: usize) -> T {
        self.faces[i + 1] - self.faces[i]
    }

    /// Largest cell width.
    pub fn h_s(&self) -> T {
        (0..self.n_s()).map(|i| self.cell_width(i)).fold(T::zero(), T::max)
    }

    pub fn u_node(&self, j: usize) -> T {
        -self.half_width + self.h_u * T::from_usize_lossy(j + 1)
    }

    pub fn dim(&self) -> usize {
        self.n_s() * self.n_u
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_u + j
    }
}

#[derive(Debug, Clone)]
pub struct PartialWaveOperator<T> {
    pub m: u32,
    pub pair: SparseSymmetricPair<T>,
    pub mesh: AxisymMesh<T>,
    /// w at the nodes, row-major in (s, u)
    pub weights: Vec<T>,
    pub threshold: T,
}

#[derive(Debug, Clone, Copy)]
struct Geometry<T> {
    r: T,
    ks: T,
    kt: T,
}

fn geometry<T: Real>(chart: &PolarChart<T>, s: T) -> Result<Geometry<T>> {
    let p = chart.sample(s, T::zero())?;
    Ok(Geometry { r: p.r, ks: p.shape[0], kt: p.shape[2] })
}

impl<T: Real> Geometry<T> {
    fn weight(&self, u: T) -> T {
        (T::one() - u * self.ks) * (T::one() - u * self.kt) * self.r
    }
    /// w/(1 − uk_s)²
    fn flux_s(&self, u: T) -> T {
        (T::one() - u * self.kt) * self.r / (T::one() - u * self.ks)
    }
    /// w/((1 − uk_θ)² r²)
    fn centrifugal(&self, u: T) -> T {
        (T::one() - u * self.ks) / ((T::one() - u * self.kt) * self.r)
    }
}

/// Assembles stiffness and lumped mass for angular momentum `m`.
pub fn assemble_partial_wave<T: Real>(layer: &LayerSpec<T>, m: u32, mesh: &AxisymMesh<T>) -> Result<PartialWaveOperator<T>> {
    let chart = layer.chart();
    if !chart.is_axisymmetric() {
        return Err(Error::Capability("partial waves need a surface of revolution".into()));
    }
    if !layer.omega1_holds() {
        return Err(Error::HypothesisViolation(format!(
            "a = {} is not below ρ_m = {}",
            layer.half_width(),
            layer.rho_m()
        )));
    }
    if (mesh.half_width - layer.half_width()).abs() > T::lit(1e-12) * layer.half_width() {
        return Err(Error::InvalidInput("mesh and layer half-widths differ".into()));
    }
    if mesh.s_end() > chart.s_max() {
        return Err(Error::Truncation(format!("mesh end {} beyond chart radius {}", mesh.s_end(), chart.s_max())));
    }
    let (n_s, n_u, h_u) = (mesh.n_s(), mesh.n_u, mesh.h_u);
    let m2 = T::from_u32(m * m).expect("small integer");
    let breaks = chart.breakpoints();
    let nodes: Vec<Geometry<T>> = (0..n_s).map(|i| geometry(chart, mesh.s_node(i))).collect::<Result<_>>()?;

    let mut trip: Vec<(usize, usize, T)> = Vec::with_capacity(mesh.dim() * 5);
    let mut mass = Vec::with_capacity(mesh.dim());
    let mut weights = Vec::with_capacity(mesh.dim());
    let add_pair = |trip: &mut Vec<(usize, usize, T)>, p: usize, q: usize, c: T| {
        trip.push((p, p, c));
        trip.push((q, q, c));
        trip.push((p, q, -c));
        trip.push((q, p, -c));
    };

    for (i, g) in nodes.iter().enumerate() {
        let dx = mesh.cell_width(i);
        for j in 0..n_u {
            let u = mesh.u_node(j);
            let w = g.weight(u);
            if !(w > T::zero()) {
                return Err(Error::HypothesisViolation(format!("layer weight {w} ≤ 0 at s = {}, u = {u}", mesh.s_node(i))));
            }
            let p = mesh.index(i, j);
            weights.push(w);
            mass.push(w * dx * h_u);
            let mut diag = m2 * g.centrifugal(u) * dx * h_u;
            // u faces below and above; the outermost reach the Dirichlet walls
            for (uf, other) in [(u - h_u * T::lit(0.5), j.checked_sub(1)), (u + h_u * T::lit(0.5), (j + 1 < n_u).then_some(j + 1))] {
                let c = g.weight(uf) * dx / h_u;
                match other {
                    Some(k) if k > j => add_pair(&mut trip, p, mesh.index(i, k), c),
                    Some(_) => {}
                    None => diag = diag + c,
                }
            }
            trip.push((p, p, diag));
        }
    }

    // s faces between cells, and the outer end
    for f in 1..=n_s {
        let s = mesh.faces[f];
        let one_sided = breaks.iter().any(|b| (*b - s).abs() <= T::lit(1e-10) * s.max(T::one()));
        let (gl, gr) = if one_sided {
            let d = T::lit(1e-9) * s.max(T::one());
            (geometry(chart, s - d)?, geometry(chart, (s + d).min(chart.s_max()))?)
        } else {
            let g = geometry(chart, s)?;
            (g, g)
        };
        let left = mesh.cell_width(f - 1) * T::lit(0.5);
        for j in 0..n_u {
            let u = mesh.u_node(j);
            let p = mesh.index(f - 1, j);
            if f == n_s {
                if mesh.end == EndCondition::Dirichlet {
                    trip.push((p, p, gl.flux_s(u) * h_u / left));
                }
                continue;
            }
            let right = mesh.cell_width(f) * T::lit(0.5);
            // harmonic combination of the one-sided coefficients over the two half cells
            let c = (left + right) / (left / gl.flux_s(u) + right / gr.flux_s(u));
            add_pair(&mut trip, p, mesh.index(f, j), c * h_u / (left + right));
        }
    }

    let n = mesh.dim();
    let stiffness = CsrMatrix::from_triplets(n, &trip)?;
    let pair = SparseSymmetricPair::new(stiffness, CsrMatrix::diagonal(&mass))?;
    Ok(PartialWaveOperator { m, pair, mesh: mesh.clone(), weights, threshold: layer.threshold() })
}

/// Lowest Dirichlet eigenvalue of −d²/du² on the u grid of `mesh`: the flat discrete threshold.
pub fn discrete_threshold<T: Real>(mesh: &AxisymMesh<T>) -> T {
    let x = T::PI() * mesh.h_u / (T::lit(4.0) * mesh.half_width);
    let s = x.sin() * T::lit(2.0) / mesh.h_u;
    s * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow<T> {
    pub n_s: usize,
    pub n_u: usize,
    pub h_s: T,
    pub h_u: T,
    pub lowest: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T> {
    pub m: u32,
    /// ascending
    pub eigenvalues: Vec<T>,
    pub residuals: Vec<T>,
    /// eigenvalue below the discrete threshold of the same u grid
    pub below_threshold: Vec<bool>,
    pub threshold: T,
    pub discrete_threshold: T,
    pub n_s: usize,
    pub n_u: usize,
    pub h_s: T,
    pub h_u: T,
    pub truncation: T,
    pub convergence: Vec<ConvergenceRow<T>>,
    /// Richardson value of the lowest eigenvalue and the observed order
    pub extrapolated: Option<(T, T)>,
}

pub fn solve_spectrum<T: Real>(op: &PartialWaveOperator<T>, k: usize) -> Result<SpectrumResult<T>> {
    let opts = EigenOptions::default();
    let pairs = lowest_eigenpairs_with(&op.pair, k, Shift::Auto, &opts)?;
    let dt = discrete_threshold(&op.mesh);
    let mesh = &op.mesh;
    let eigenvalues: Vec<T> = pairs.iter().map(|p| p.value).collect();
    let row = ConvergenceRow { n_s: mesh.n_s(), n_u: mesh.n_u, h_s: mesh.h_s(), h_u: mesh.h_u, lowest: eigenvalues[0] };
    Ok(SpectrumResult {
        m: op.m,
        below_threshold: eigenvalues.iter().map(|v| *v < dt * (T::one() - opts.tol)).collect(),
        residuals: pairs.iter().map(|p| p.residual).collect(),
        eigenvalues,
        threshold: op.threshold,
        discrete_threshold: dt,
        n_s: mesh.n_s(),
        n_u: mesh.n_u,
        h_s: mesh.h_s(),
        h_u: mesh.h_u,
        truncation: mesh.s_end(),
        convergence: vec![row],
        extrapolated: None,
    })
}

/// Richardson extrapolation of a sequence at spacings h, h/2, h/4, …: the
/// observed order from the last three and the extrapolated limit.
pub fn richardson<T: Real>(values: &[T]) -> Option<(T, T)> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let (a, b, c) = (values[n - 3], values[n - 2], values[n - 1]);
    let ratio = (a - b) / (b - c);
    if !(ratio > T::one()) {
        return None;
    }
    let p = ratio.ln() / T::lit(2.0).ln();
    Some((c + (c - b) / (ratio - T::one()), p))
}

/// Solves on `levels` successively refined meshes; the result is the finest
/// solve with the convergence table and Richardson estimate attached.
pub fn refine_spectrum<T: Real>(layer: &LayerSpec<T>, m: u32, mesh: &AxisymMesh<T>, k: usize, levels: usize) -> Result<SpectrumResult<T>> {
    let mut mesh = mesh.clone();
    let mut table = Vec::new();
    let mut last = None;
    for level in 0..levels.max(1) {
        if level > 0 {
            mesh = mesh.refined();
        }
        let res = solve_spectrum(&assemble_partial_wave(layer, m, &mesh)?, k)?;
        table.extend(res.convergence.iter().copied());
        last = Some(res);
    }
    let mut res = last.expect("at least one level");
    let lows: Vec<T> = table.iter().map(|r| r.lowest).collect();
    res.extrapolated = richardson(&lows);
    res.convergence = table;
    Ok(res)
}

/// Value by Richardson extrapolation over a grid-halving sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialEstimate<T> {
    pub value: T,
    /// (interior nodes, eigenvalue) per level
    pub levels: Vec<(usize, T)>,
    pub order: T,
}

/// Lowest eigenvalue of the symmetric pencil −(p ψ')' + q ψ = λ ρ ψ on (lo, hi),
/// Dirichlet ends, n interior nodes.
fn sturm_liouville<T: Real>(lo: T, hi: T, n: usize, p: impl Fn(T) -> T, q: impl Fn(T) -> T, rho: impl Fn(T) -> T) -> Result<T> {
    let h = (hi - lo) / T::from_usize_lossy(n + 1);
    let x = |i: usize| lo + h * T::from_usize_lossy(i + 1);
    let half = h * T::lit(0.5);
    let scale: Vec<T> = (0..n).map(|i| rho(x(i)).sqrt()).collect();
    let d: Vec<T> = (0..n).map(|i| ((p(x(i) - half) + p(x(i) + half)) / (h * h) + q(x(i))) / (scale[i] * scale[i])).collect();
    let e: Vec<T> = (0..n.saturating_sub(1)).map(|i| -p(x(i) + half) / (h * h) / (scale[i] * scale[i + 1])).collect();
    let (vals, _) = tridiagonal_eigen(&d, &e)?;
    Ok(vals[0])
}

fn extrapolate_levels<T: Real>(base: usize, levels: usize, mut solve: impl FnMut(usize) -> Result<T>) -> Result<RadialEstimate<T>> {
    let mut out = Vec::new();
    let mut n = base;
    for _ in 0..levels {
        out.push((n, solve(n)?));
        n = 2 * n + 1;
    }
    let vals: Vec<T> = out.iter().map(|l| l.1).collect();
    let (value, order) = richardson(&vals).ok_or_else(|| Error::NoConvergence("refinement sequence is not monotone".into()))?;
    Ok(RadialEstimate { value, levels: out, order })
}

fn check_radii<T: Real>(radius: T, half_width: T) -> Result<()> {
    if !(half_width > T::zero() && half_width < radius) {
        return Err(Error::InvalidInput(format!("need 0 < a < R, got a = {half_width}, R = {radius}")));
    }
    Ok(())
}

/// Lowest Dirichlet eigenvalue ε₁ of −∂²_ρ − 1/(4ρ²) on (R − a, R + a).
pub fn counterexample_radial<T: Real>(radius: T, half_width: T, n: usize) -> Result<RadialEstimate<T>> {
    check_radii(radius, half_width)?;
    extrapolate_levels(n.max(16), 4, |k| {
        sturm_liouville(radius - half_width, radius + half_width, k, |_| T::one(), |x| -T::one() / (T::lit(4.0) * x * x), |_| T::one())
    })
}

/// Ground state between the spheres of radii R ∓ a from the l = 0 reduction −ρ⁻²(ρ² f')'.
pub fn spherical_shell_ground<T: Real>(radius: T, half_width: T) -> Result<RadialEstimate<T>> {
    check_radii(radius, half_width)?;
    extrapolate_levels(24, 5, |k| sturm_liouville(radius - half_width, radius + half_width, k, |x| x * x, |_| T::zero(), |x| x * x))
}

/// ε₁ for the u grid of `mesh`: the transverse operator −ρ⁻¹(ρ ψ')' with the
/// same face weights the layer assembly uses on the cylinder.
pub fn discrete_radial_threshold<T: Real>(radius: T, mesh: &AxisymMesh<T>) -> Result<T> {
    let a = mesh.half_width;
    check_radii(radius, a)?;
    sturm_liouville(radius - a, radius + a, mesh.n_u, |x| x, |_| T::zero(), |x| x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport<T> {
    pub spectrum: SpectrumResult<T>,
    /// continuum ε₁
    pub epsilon1: RadialEstimate<T>,
    /// ε₁ on the same u grid as the layer solve
    pub epsilon1_discrete: T,
    pub lowest: T,
    /// lowest eigenvalue below the discrete ε₁ by more than the solver tolerance
    pub below_epsilon1: bool,
}

/// m = 0 spectrum of the layer over a half-cylinder of radius R capped by a
/// hemisphere, Dirichlet-truncated at s = S, with a cell face on the junction.
pub fn counterexample_full<T: Real>(radius: T, half_width: T, s_end: T, h: T, n_u: usize, k: usize) -> Result<CounterexampleReport<T>> {
    check_radii(radius, half_width)?;
    let chart = PolarChart::from_profile(builtin::capped_cylinder(radius, s_end)?);
    let layer = LayerSpec::new(chart, half_width)?;
    let junction = T::FRAC_PI_2() * radius;
    let mesh = AxisymMesh::with_interface(s_end, half_width, h, n_u, junction)?;
    let spectrum = solve_spectrum(&assemble_partial_wave(&layer, 0, &mesh)?, k)?;
    let eps_d = discrete_radial_threshold(radius, &mesh)?;
    let lowest = spectrum.eigenvalues[0];
    Ok(CounterexampleReport {
        epsilon1: counterexample_radial(radius, half_width, 64)?,
        epsilon1_discrete: eps_d,
        lowest,
        below_epsilon1: lowest < eps_d * (T::one() - T::lit(1e-9)),
        spectrum,
    })
}

/// Ground state of the hemispherical cap layer with a zero-flux wall at the equator.
pub fn hemisphere_neumann_ground<T: Real>(radius: T, half_width: T, n_s: usize, n_u: usize) -> Result<T> {
    check_radii(radius, half_width)?;
    let end = T::FRAC_PI_2() * radius;
    let chart = PolarChart::sphere(radius)?;
    let layer = LayerSpec::new(chart, half_width)?;
    let mesh = AxisymMesh::new(end, half_width, n_s, n_u)?.neumann();
    Ok(solve_spectrum(&assemble_partial_wave(&layer, 0, &mesh)?, 1)?.eigenvalues[0])
}
