use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact_scalars::{Field, PointEval, PolyFn, Scalar, ScalarError};

use super::LinalgError;

/// Dense row-major matrix over a [`Field`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
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
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// All rows must have `cols` entries. `cols` is needed when there are no rows.
    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_skew(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (i..self.cols).all(|j| self.get(i, j).add_f(self.get(j, i)).is_zero()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U: Field, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (o.rows, o.cols),
            "matrix shape mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.add_f(b))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (o.rows, o.cols),
            "matrix shape mismatch"
        );
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| a.sub_f(b))
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg_f())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.mul_f(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add_f(&a.mul_f(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add_f(&a.mul_f(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix {
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows, "hstack row mismatch");
        Self::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                o.get(i, j - self.cols).clone()
            }
        })
    }

    /// Block-diagonal `diag(self, o)`.
    pub fn block_diag(&self, o: &Self) -> Self {
        Self::from_fn(self.rows + o.rows, self.cols + o.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                o.get(i - self.rows, j - self.cols).clone()
            } else {
                T::zero()
            }
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    /// Reduced row echelon form (Gauss-Jordan) and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv_f().unwrap();
            for j in c..m.cols {
                let v = m.get(r, j).mul_f(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let rv = m.get(r, j);
                    if rv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).sub_f(&f.mul_f(rv));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        m.rows = r;
        m.data.truncate(r * m.cols);
        (m, pivots)
    }

    pub fn rank_generic(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{v : self·v = 0}` as rows.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = r.get(i, free).neg_f();
            }
            out.push(v);
        }
        out
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
            return None;
        }
        let idx: Vec<usize> = (0..n).collect();
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(r.submatrix(&idx, &cols))
    }

    /// Determinant by cofactor-free elimination.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return T::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.neg_f();
            }
            let piv = m.get(c, c).clone();
            det = det.mul_f(&piv);
            let inv = piv.inv_f().unwrap();
            for i in c + 1..n {
                let f = m.get(i, c).mul_f(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).sub_f(&f.mul_f(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Matrix<Scalar> {
    pub fn from_ints(rows: usize, cols: usize, v: &[i64]) -> Self {
        Matrix::from_vec(rows, cols, v.iter().map(|&x| Scalar::from_int(x)).collect())
            .expect("entry count")
    }

    /// Exact rank by fraction-free (Bareiss) elimination on the denominator-cleared matrix.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        let (m, n) = (self.rows, self.cols);
        let mut rank = 0;
        let mut prev = BigInt::one();
        for c in 0..n {
            if rank == m {
                break;
            }
            let Some(p) = (rank..m).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let piv = a[rank][c].clone();
            for i in rank + 1..m {
                let f = a[i][c].clone();
                for j in c..n {
                    // exact by Sylvester's identity
                    a[i][j] = (&piv * &a[i][j] - &f * &a[rank][j]) / &prev;
                }
            }
            prev = piv;
            rank += 1;
        }
        rank
    }

    /// `(positive, negative, zero)` counts of a symmetric matrix, by congruence diagonalization.
    pub fn inertia(&self) -> (usize, usize, usize) {
        assert!(self.is_square(), "inertia of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let (mut pos, mut neg, mut zero) = (0, 0, 0);
        for k in 0..n {
            if a.get(k, k).is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !a.get(j, j).is_zero()) {
                    a.swap_rows(k, j);
                    a.swap_cols(k, j);
                } else if let Some(j) = (k + 1..n).find(|&j| !a.get(k, j).is_zero()) {
                    // e_k ↦ e_k + e_j makes the pivot 2·a_kj
                    for c in 0..n {
                        let v = a.get(k, c) + a.get(j, c);
                        a.set(k, c, v);
                    }
                    for r in 0..n {
                        let v = a.get(r, k) + a.get(r, j);
                        a.set(r, k, v);
                    }
                }
            }
            let p = a.get(k, k).clone();
            if p.is_zero() {
                zero += 1;
                continue;
            }
            if p.is_negative() {
                neg += 1;
            } else {
                pos += 1;
            }
            for i in k + 1..n {
                let f = a.get(i, k) / &p;
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = a.get(i, c) - &f * a.get(k, c);
                    a.set(i, c, v);
                }
                for r in 0..n {
                    let v = a.get(r, i) - &f * a.get(r, k);
                    a.set(r, i, v);
                }
            }
        }
        (pos, neg, zero)
    }

    pub fn to_polyfn(&self) -> Matrix<PolyFn> {
        self.map(|x| PolyFn::constant(x.clone()))
    }
}

impl<E: PointEval + Field> Matrix<E> {
    pub fn eval_at(&self, point: &[Scalar]) -> Result<Matrix<Scalar>, ScalarError> {
        self.try_map(|x| x.at(point))
    }

    pub fn substitute(&self, subs: &[PolyFn]) -> Result<Matrix<PolyFn>, ScalarError> {
        self.try_map(|x| x.subst(subs))
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self.data[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::<Scalar>::identity(3).rank(), 3);
        assert_eq!(Matrix::<Scalar>::zeros(2, 5).rank(), 0);
        let m = Matrix::from_ints(2, 2, &[1, 2, 2, 4]);
        assert!(m.det().is_zero());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn bareiss_agrees_with_gauss_jordan() {
        let m = Matrix::from_vec(
            3,
            4,
            [1, 2, 3, 4, 2, 4, 6, 8, 1, 0, -1, 5]
                .iter()
                .enumerate()
                .map(|(i, &x)| Scalar::from_ratio(x, 1 + (i as i64 % 3)))
                .collect(),
        )
        .unwrap();
        assert_eq!(m.rank(), m.rank_generic());
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        let h = Matrix::from_ints(2, 2, &[0, 1, 1, 0]);
        assert_eq!(h.inertia(), (1, 1, 0));
        let m = Matrix::from_ints(3, 3, &[2, 0, 0, 0, -1, 0, 0, 0, 0]);
        assert_eq!(m.inertia(), (1, 1, 1));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_ints(3, 3, &[2, 1, 0, 0, 1, 3, 1, 0, 1]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        assert_eq!(m.det(), Scalar::from_int(5));
    }
}
