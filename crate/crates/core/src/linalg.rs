//! Small dense linear algebra for the low dimensions (n <= 6) used here.
//!
//! Matrices are row-major `Vec`s. Everything is generic over [`Scalar`], which
//! rules out the usual matrix crates whose element traits clash with
//! `num_traits::Float`.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `u^T M v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            if u[i] == T::zero() {
                continue;
            }
            let mut row = T::zero();
            for j in 0..self.n {
                row += self[(i, j)] * v[j];
            }
            acc += u[i] * row;
        }
        acc
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &x| if x.abs() > acc { x.abs() } else { acc })
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] - other[(i, j)])
    }

    /// Symmetric part `(M + M^T) / 2`.
    pub fn symmetrize(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.n, |i, j| half * (self[(i, j)] + self[(j, i)]))
    }

    /// Gram matrix `B M B^T` for the rows of `basis`.
    pub fn gram(&self, basis: &[Vec<T>]) -> Self {
        let k = basis.len();
        Self::from_fn(k, |a, b| self.bilinear(&basis[a], &basis[b]))
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(Error::Singular("matrix inverse"));
        }
        let tiny = scale * T::epsilon() * T::lit(16.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[(r, col)]
                        .abs()
                        .partial_cmp(&a[(s, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if !(a[(pivot, col)].abs() > tiny) {
                return Err(Error::Singular("matrix inverse"));
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let d = T::one() / a[(col, col)];
            for j in 0..n {
                a[(col, j)] *= d;
                inv[(col, j)] *= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by LU elimination with partial pivoting. The empty matrix has determinant one.
    pub fn determinant(&self) -> T {
        let n = self.n;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[(r, col)]
                        .abs()
                        .partial_cmp(&a[(s, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[(pivot, col)] == T::zero() {
                return T::zero();
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)];
            det *= p;
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                for j in col..n {
                    let v = a[(col, j)];
                    a[(r, j)] -= f * v;
                }
            }
        }
        det
    }

    /// Cholesky test for symmetric positive definiteness.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.n;
        let mut l = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if !(s > T::zero()) {
                        return false;
                    }
                    l[(i, i)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        true
    }

    fn swap_rows(&mut self, r: usize, s: usize) {
        for j in 0..self.n {
            self.data.swap(r * self.n + j, s * self.n + j);
        }
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Rank-3 array indexed `(a, b, c)`, each index in `0..n`.
///
/// Holds `d_k g_ij` as `(k, i, j)` and Christoffel symbols `Gamma^k_ij` as `(k, i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Tensor3<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &x| if x.abs() > acc { x.abs() } else { acc })
    }

    /// Slice `(k, ., .)` as a matrix.
    pub fn matrix(&self, k: usize) -> SquareMatrix<T> {
        SquareMatrix::from_fn(self.n, |i, j| self[(k, i, j)])
    }
}

impl<T> Index<(usize, usize, usize)> for Tensor3<T> {
    type Output = T;
    #[inline]
    fn index(&self, (a, b, c): (usize, usize, usize)) -> &T {
        &self.data[(a * self.n + b) * self.n + c]
    }
}

impl<T> IndexMut<(usize, usize, usize)> for Tensor3<T> {
    #[inline]
    fn index_mut(&mut self, (a, b, c): (usize, usize, usize)) -> &mut T {
        &mut self.data[(a * self.n + b) * self.n + c]
    }
}

/// Rank-4 array indexed `(l, k, i, j)`; holds `d_l d_k g_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Tensor4<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &x| if x.abs() > acc { x.abs() } else { acc })
    }
}

impl<T> Index<(usize, usize, usize, usize)> for Tensor4<T> {
    type Output = T;
    #[inline]
    fn index(&self, (l, k, i, j): (usize, usize, usize, usize)) -> &T {
        &self.data[((l * self.n + k) * self.n + i) * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize, usize, usize)> for Tensor4<T> {
    #[inline]
    fn index_mut(&mut self, (l, k, i, j): (usize, usize, usize, usize)) -> &mut T {
        &mut self.data[((l * self.n + k) * self.n + i) * self.n + j]
    }
}

pub fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).map(|(&a, &b)| a * b).sum()
}

pub fn norm<T: Scalar>(v: &[T]) -> T {
    dot(v, v).sqrt()
}

pub fn sub<T: Scalar>(u: &[T], v: &[T]) -> Vec<T> {
    u.iter().zip(v).map(|(&a, &b)| a - b).collect()
}

pub fn add<T: Scalar>(u: &[T], v: &[T]) -> Vec<T> {
    u.iter().zip(v).map(|(&a, &b)| a + b).collect()
}

pub fn scaled<T: Scalar>(v: &[T], s: T) -> Vec<T> {
    v.iter().map(|&a| a * s).collect()
}

pub fn normalized<T: Scalar>(v: &[T]) -> Vec<T> {
    let n = norm(v);
    scaled(v, T::one() / n)
}

pub fn unit<T: Scalar>(n: usize, axis: usize) -> Vec<T> {
    let mut e = vec![T::zero(); n];
    e[axis] = T::one();
    e
}

/// Cross product in three dimensions.
pub fn cross<T: Scalar>(u: &[T], v: &[T]) -> Vec<T> {
    vec![
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

/// Solves a 3x3 system by Cramer's rule; `None` when nearly singular.
pub fn solve3<T: Scalar>(rows: [&[T]; 3], rhs: [T; 3]) -> Option<Vec<T>> {
    let c01 = cross(rows[1], rows[2]);
    let det = dot(rows[0], &c01);
    let scale = norm(rows[0]) * norm(rows[1]) * norm(rows[2]);
    if !(det.abs() > scale * T::lit(1e-12)) {
        return None;
    }
    let c20 = cross(rows[2], rows[0]);
    let c12 = cross(rows[0], rows[1]);
    Some(
        (0..3)
            .map(|i| (rhs[0] * c01[i] + rhs[1] * c20[i] + rhs[2] * c12[i]) / det)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = SquareMatrix::from_fn(3, |i, j| if i == j { 2.0 } else { 0.3 * (i + j) as f64 });
        let inv = m.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let p: f64 = (0..3).map(|k| m[(i, k)] * inv[(k, j)]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singular_is_an_error() {
        let m = SquareMatrix::from_fn(2, |_, _| 1.0_f64);
        assert_eq!(m.inverse(), Err(Error::Singular("matrix inverse")));
        assert_eq!(m.determinant(), 0.0);
    }

    #[test]
    fn determinant_and_definiteness() {
        let m = SquareMatrix::from_fn(3, |i, j| if i == j { 4.0 } else { 1.0_f64 });
        assert!((m.determinant() - 54.0).abs() < 1e-12);
        assert!(m.is_positive_definite());
        let mut neg = m.clone();
        neg[(2, 2)] = -1.0;
        assert!(!neg.is_positive_definite());
        assert_eq!(SquareMatrix::<f64>::zeros(0).determinant(), 1.0);
    }

    #[test]
    fn cramer_solves_planes() {
        let x = solve3([&[1.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[1.0, 1.0, 1.0]], [1.0, 4.0, 6.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        assert!(solve3([&[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0], &[0.0, 0.0, 1.0]], [1.0, 1.0, 1.0]).is_none());
    }
}
