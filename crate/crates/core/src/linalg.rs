//! Small dense linear algebra over [`Scalar`]: enough for d ≤ 3 geometry.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

pub fn scale<T: Scalar>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

pub fn centroid<T: Scalar>(points: &[Vec<T>]) -> Vec<T> {
    let d = points.first().map_or(0, Vec::len);
    let mut c = vec![T::zero(); d];
    for p in points {
        for (ci, &pi) in c.iter_mut().zip(p) {
            *ci = *ci + pi;
        }
    }
    let n = T::from_usize(points.len().max(1)).unwrap();
    c.iter().map(|&x| x / n).collect()
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.data[i * cols..(i + 1) * cols].copy_from_slice(r);
        }
        m
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    /// Determinant (LU with partial pivoting).
    pub fn determinant(&self) -> T {
        assert_eq!(self.rows, self.cols);
        T::lit(to_na(self).determinant())
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Matrix<T>> {
        assert_eq!(self.rows, self.cols);
        to_na(self).try_inverse().map(|m| from_na(&m, self.rows))
    }
}

/// Computations run in f64 regardless of `T`.
fn to_na<T: Scalar>(a: &Matrix<T>) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows, a.cols, |i, j| a[(i, j)].as_f64())
}

fn from_na<T: Scalar>(m: &DMatrix<f64>, rows: usize) -> Matrix<T> {
    let mut out = Matrix::zeros(rows, m.ncols());
    for i in 0..rows {
        for j in 0..m.ncols() {
            out[(i, j)] = T::lit(m[(i, j)]);
        }
    }
    out
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Singular value decomposition `A = U diag(S) Vᵀ`.
///
/// `U` is `rows × cols` and `V` is a full `cols × cols` orthogonal matrix,
/// also when `rows < cols` (the trailing columns of `V` then span the null
/// space). Singular values are in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: Matrix<T>,
    pub s: Vec<T>,
    pub v: Matrix<T>,
}

pub fn svd<T: Scalar>(a: &Matrix<T>) -> Svd<T> {
    let (m, n) = (a.rows, a.cols);
    // Zero rows leave the decomposition unchanged but make V square.
    let padded = DMatrix::from_fn(m.max(n), n, |i, j| if i < m { a[(i, j)].as_f64() } else { 0.0 });
    let svd = nalgebra::SVD::new(padded, true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v requested");
    Svd {
        u: from_na(&u, m),
        s: svd.singular_values.iter().map(|&x| T::lit(x)).collect(),
        v: from_na(&v_t.transpose(), n),
    }
}

/// Number of singular values above `cutoff · σ_max`.
pub fn numerical_rank<T: Scalar>(a: &Matrix<T>, cutoff: T) -> usize {
    if a.rows == 0 || a.cols == 0 {
        return 0;
    }
    let s = svd(a).s;
    let top = s[0];
    if top <= T::zero() {
        return 0;
    }
    s.iter().filter(|&&x| x > cutoff * top).count()
}

/// Dimension of the affine hull of `points`, up to a relative cutoff.
pub fn affine_rank<T: Scalar>(points: &[Vec<T>], cutoff: T) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let c = centroid(points);
    let rows: Vec<Vec<T>> = points.iter().map(|p| sub(p, &c)).collect();
    numerical_rank(&Matrix::from_rows(&rows), cutoff)
}

/// Least-squares solution of `A x = b`. Returns `None` when `A` is
/// numerically rank deficient (a singular value below `cutoff · σ_max`).
pub fn lstsq<T: Scalar>(a: &Matrix<T>, b: &[T], cutoff: T) -> Option<Vec<T>> {
    if a.rows < a.cols || a.cols == 0 {
        return None;
    }
    let svd = nalgebra::SVD::new(to_na(a), true, true);
    let top = svd.singular_values.max();
    let floor = cutoff.as_f64() * top;
    if top <= 0.0 || svd.singular_values.iter().any(|&s| s <= floor) {
        return None;
    }
    let rhs = DVector::from_iterator(b.len(), b.iter().map(|x| x.as_f64()));
    let x = svd.solve(&rhs, floor).ok()?;
    Some(x.iter().map(|&c| T::lit(c)).collect())
}

/// Gram–Schmidt orthonormalization; returns `None` if the vectors are dependent.
pub fn orthonormalize<T: Scalar>(vectors: &[Vec<T>], cutoff: T) -> Option<Vec<Vec<T>>> {
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let n0 = norm(v);
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w = sub(&w, &scale(b, c));
            }
        }
        let nw = norm(&w);
        if n0 == T::zero() || nw <= cutoff * n0 {
            return None;
        }
        basis.push(scale(&w, T::one() / nw));
    }
    Some(basis)
}

impl<T: Scalar> serde::Serialize for Matrix<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..self.rows).map(|i| self.row(i).iter().map(|c| c.as_f64()).collect()).collect();
        serde::Serialize::serialize(&rows, s)
    }
}
