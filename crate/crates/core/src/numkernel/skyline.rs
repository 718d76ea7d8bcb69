//! Envelope (skyline) LDLᵀ factorization of symmetric matrices.

use crate::error::{Error, Result};
use crate::numkernel::sparse::CsrMatrix;
use crate::real::Real;

/// LDLᵀ factors of A − σB stored row-wise over the lower envelope.
#[derive(Debug, Clone)]
pub struct SkylineLdl<T> {
    first: Vec<usize>,
    start: Vec<usize>,
    // strictly-lower entries of L, row i holds columns first[i]..i
    lower: Vec<T>,
    diag: Vec<T>,
}

impl<T: Real> SkylineLdl<T> {
    /// Factors `a − shift·b`.
    pub fn factor(a: &CsrMatrix<T>, b: &CsrMatrix<T>, shift: T) -> Result<Self> {
        let n = a.dim();
        let mut first: Vec<usize> = (0..n).collect();
        for m in [a, b] {
            for (i, fi) in first.iter_mut().enumerate() {
                let (c, _) = m.row(i);
                if let Some(&j) = c.first() {
                    *fi = (*fi).min(j);
                }
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i]);
        }
        let mut lower = vec![T::zero(); start[n]];
        let mut diag = vec![T::zero(); n];
        let mut scale = vec![T::zero(); n];
        for (m, c) in [(a, T::one()), (b, -shift)] {
            if c == T::zero() {
                continue;
            }
            for i in 0..n {
                let (cols, vals) = m.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    if j < i {
                        lower[start[i] + j - first[i]] = lower[start[i] + j - first[i]] + c * v;
                    } else if j == i {
                        diag[i] = diag[i] + c * v;
                    }
                }
            }
        }
        for i in 0..n {
            let row = &lower[start[i]..start[i + 1]];
            scale[i] = row.iter().fold(diag[i].abs(), |m, v| m.max(v.abs()));
        }
        let tiny = T::epsilon() * T::lit(16.0);
        for i in 0..n {
            let fi = first[i];
            // u_ij = l_ij d_j, computed in place
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let mut acc = lower[start[i] + j - fi];
                for k in k0..j {
                    acc = acc - lower[start[i] + k - fi] * lower[start[j] + k - fj];
                }
                lower[start[i] + j - fi] = acc;
            }
            let mut d = diag[i];
            for j in fi..i {
                let u = lower[start[i] + j - fi];
                let l = u / diag[j];
                d = d - u * l;
                lower[start[i] + j - fi] = l;
            }
            if !d.is_finite() || d.abs() <= tiny * scale[i].max(T::min_positive_value()) {
                return Err(Error::Factorization(format!("zero pivot at row {i} for shift {shift}")));
            }
            diag[i] = d;
        }
        Ok(Self { first, start, lower, diag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of negative pivots, i.e. eigenvalues of the pencil below the shift.
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < T::zero()).count()
    }

    /// Solves (A − σB) x = rhs in place.
    pub fn solve_in_place(&self, x: &mut [T]) {
        let n = self.dim();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.lower[self.start[i]..self.start[i + 1]];
            let mut acc = x[i];
            for (k, l) in row.iter().enumerate() {
                acc = acc - *l * x[fi + k];
            }
            x[i] = acc;
        }
        for i in 0..n {
            x[i] = x[i] / self.diag[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = x[i];
            let row = &self.lower[self.start[i]..self.start[i + 1]];
            for (k, l) in row.iter().enumerate() {
                x[fi + k] = x[fi + k] - *l * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal() {
        let n = 6;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::<f64>::from_triplets(n, &t).unwrap();
        let f = SkylineLdl::factor(&a, &CsrMatrix::identity(n), 0.0).unwrap();
        assert_eq!(f.negative_pivots(), 0);
        let xs: Vec<f64> = (0..n).map(|i| i as f64 - 1.5).collect();
        let mut b = a.apply(&xs);
        f.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&xs) {
            assert!((u - v).abs() < 1e-12);
        }
        // eigenvalues of the second difference lie in (0, 4): a shift of 2.9 splits them
        let g = SkylineLdl::factor(&a, &CsrMatrix::identity(n), 2.9).unwrap();
        let below = (1..=n).filter(|k| 2.0 - 2.0 * (std::f64::consts::PI * *k as f64 / 7.0).cos() < 2.9).count();
        assert_eq!(g.negative_pivots(), below);
    }
}
