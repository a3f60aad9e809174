use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

/// Symmetric `d x d` matrix stored as its packed upper triangle.
///
/// `get(i, j)` and `get(j, i)` read the same slot, so symmetry holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    upper: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            upper: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds the matrix by calling `f(i, j)` for `i <= j` only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        debug_assert!(b < self.dim);
        a * self.dim - a * (a + 1) / 2 + b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.slot(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let s = self.slot(i, j);
        self.upper[s] = value;
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let d = self.dim;
        (0..d * d).map(|n| self.get(n / d, n % d)).collect()
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn determinant(&self) -> f64 {
        self.to_nalgebra().determinant()
    }

    /// Inverse, symmetrized by averaging the two off-diagonal triangles.
    pub fn inverse(&self) -> Option<SymMatrix> {
        let inv = self.to_nalgebra().try_inverse()?;
        Some(Self::from_fn(self.dim, |i, j| {
            0.5 * (inv[(i, j)] + inv[(j, i)])
        }))
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            upper: self.upper.iter().map(|&v| f(v)).collect(),
        }
    }

    pub(crate) fn axpy(&mut self, alpha: f64, other: &SymMatrix) {
        for (a, b) in self.upper.iter_mut().zip(&other.upper) {
            *a += alpha * b;
        }
    }
}

/// Dense row-major rank-3 array over a `d`-dimensional index range.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &f64 {
        &self.data[(i * self.dim + j) * self.dim + k]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    #[inline]
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[(i * self.dim + j) * self.dim + k]
    }
}

/// Dense row-major rank-4 array.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<(usize, usize, usize, usize)> for Tensor4 {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j, k, l): (usize, usize, usize, usize)) -> &f64 {
        let d = self.dim;
        &self.data[((i * d + j) * d + k) * d + l]
    }
}

impl IndexMut<(usize, usize, usize, usize)> for Tensor4 {
    #[inline]
    fn index_mut(&mut self, (i, j, k, l): (usize, usize, usize, usize)) -> &mut f64 {
        let d = self.dim;
        &mut self.data[((i * d + j) * d + k) * d + l]
    }
}
