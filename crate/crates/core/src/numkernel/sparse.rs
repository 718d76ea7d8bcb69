//! Compressed sparse row storage for symmetric operators.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    /// Builds an n×n matrix from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut counts = vec![0usize; n + 1];
        for &(i, j, _) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut raw: Vec<(usize, T)> = vec![(0, T::zero()); triplets.len()];
        for &(i, j, v) in triplets {
            raw[fill[i]] = (j, v);
            fill[i] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals = Vec::with_capacity(triplets.len());
        for i in 0..n {
            let row = &mut raw[counts[i]..counts[i + 1]];
            row.sort_by_key(|e| e.0);
            for &(j, v) in row.iter() {
                if cols.len() > row_ptr[i] && *cols.last().unwrap() == j {
                    let last = vals.len() - 1;
                    vals[last] = vals[last] + v;
                } else {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr[i + 1] = cols.len();
        }
        Ok(Self { n, row_ptr, cols, vals })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Self { n, row_ptr: (0..=n).collect(), cols: (0..n).collect(), vals: d.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (c, v) = self.row(i);
        match c.binary_search(&j) {
            Ok(k) => v[k],
            Err(_) => T::zero(),
        }
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v = *v * c);
        out
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = T::zero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc = acc + self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.mul_vec(x, &mut y);
        y
    }

    /// x·A·x
    pub fn quadratic(&self, x: &[T]) -> T {
        let y = self.apply(x);
        x.iter().zip(&y).map(|(a, b)| *a * *b).sum()
    }

    pub fn max_abs(&self) -> T {
        self.vals.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Largest |a_ij − a_ji|.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            let (c, v) = self.row(i);
            for (j, a) in c.iter().zip(v) {
                worst = worst.max((*a - self.get(*j, i)).abs());
            }
        }
        worst
    }
}

/// Stiffness/mass pair of a generalized symmetric eigenproblem A v = λ B v.
#[derive(Debug, Clone)]
pub struct SparseSymmetricPair<T> {
    stiffness: CsrMatrix<T>,
    mass: CsrMatrix<T>,
}

impl<T: Real> SparseSymmetricPair<T> {
    pub fn new(stiffness: CsrMatrix<T>, mass: CsrMatrix<T>) -> Result<Self> {
        if stiffness.dim() != mass.dim() {
            return Err(Error::InvalidInput("stiffness and mass dimensions differ".into()));
        }
        let tol = T::lit(1e-13);
        for (name, m) in [("stiffness", &stiffness), ("mass", &mass)] {
            if m.asymmetry() > tol * m.max_abs() {
                return Err(Error::InvalidInput(format!("{name} is not symmetric")));
            }
        }
        if mass.diag().iter().any(|d| !(*d > T::zero())) {
            return Err(Error::InvalidInput("mass diagonal must be strictly positive".into()));
        }
        Ok(Self { stiffness, mass })
    }

    pub fn stiffness(&self) -> &CsrMatrix<T> {
        &self.stiffness
    }

    pub fn mass(&self) -> &CsrMatrix<T> {
        &self.mass
    }

    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    /// Rayleigh quotient xᵀAx / xᵀBx.
    pub fn rayleigh(&self, x: &[T]) -> T {
        self.stiffness.quadratic(x) / self.mass.quadratic(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_summed() {
        let m = CsrMatrix::<f64>::from_triplets(2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 4.0), (0, 1, 4.0)]).unwrap();
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.asymmetry(), 0.0);
        assert_eq!(m.apply(&[1.0, 1.0]), vec![7.0, 4.0]);
    }

    #[test]
    fn pair_validation() {
        let a = CsrMatrix::<f64>::from_triplets(2, &[(0, 1, 1.0)]).unwrap();
        assert!(SparseSymmetricPair::new(a, CsrMatrix::identity(2)).is_err());
        let a = CsrMatrix::<f64>::identity(2);
        let b = CsrMatrix::diagonal(&[1.0, 0.0]);
        assert!(SparseSymmetricPair::new(a, b).is_err());
    }
}
