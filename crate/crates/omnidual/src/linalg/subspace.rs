use crate::exact_scalars::{Field, PointEval, PolyFn, Scalar, ScalarError};

use super::{LinalgError, Matrix};

/// Linear subspace of `T^ambient`, stored as the RREF of a spanning set.
/// Two subspaces are equal as sets iff they are equal as values.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace<T> {
    ambient: usize,
    basis: Matrix<T>,
}

impl<T: Field> Subspace<T> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
        }
    }

    pub fn span(ambient: usize, vectors: &[Vec<T>]) -> Result<Self, LinalgError> {
        let m = Matrix::from_rows(ambient, vectors.to_vec())?;
        Ok(Self::row_space(&m))
    }

    pub fn row_space(m: &Matrix<T>) -> Self {
        let (r, _) = m.rref();
        Subspace {
            ambient: m.cols(),
            basis: r,
        }
    }

    pub fn coordinate(ambient: usize, indices: &[usize]) -> Self {
        let vs: Vec<Vec<T>> = indices.iter().map(|&i| unit(ambient, i)).collect();
        Self::span(ambient, &vs).expect("unit vectors have the ambient length")
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix<T> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<T>> {
        self.basis.row_vecs()
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| self.basis.row(i).iter().position(|x| !x.is_zero()).unwrap())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn check(&self, o: &Self) -> Result<(), LinalgError> {
        if self.ambient != o.ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                found: o.ambient,
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[T]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length");
        // reduce v against the rref pivots
        let mut w = v.to_vec();
        for (i, p) in self.pivots().into_iter().enumerate() {
            let f = w[p].clone();
            if f.is_zero() {
                continue;
            }
            for (j, b) in self.basis.row(i).iter().enumerate() {
                if !b.is_zero() {
                    w[j] = w[j].sub_f(&f.mul_f(b));
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn is_subspace_of(&self, o: &Self) -> bool {
        self.ambient == o.ambient && (0..self.dim()).all(|i| o.contains(self.basis.row(i)))
    }

    pub fn sum(&self, o: &Self) -> Result<Self, LinalgError> {
        self.check(o)?;
        Ok(Self::row_space(&self.basis.vstack(&o.basis)))
    }

    /// `{w : w·v = 0 for all v}` in the dual coordinates.
    pub fn annihilator(&self) -> Self {
        let k = self.basis.kernel_basis();
        Self::span(self.ambient, &k).expect("kernel vectors have the ambient length")
    }

    pub fn intersect(&self, o: &Self) -> Result<Self, LinalgError> {
        self.check(o)?;
        let eqs = self.annihilator().basis.vstack(&o.annihilator().basis);
        Ok(kernel(&eqs))
    }

    /// `m·self` for `m` acting on column vectors of this space.
    pub fn image(&self, m: &Matrix<T>) -> Result<Self, LinalgError> {
        if m.cols() != self.ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                found: m.cols(),
            });
        }
        let imgs: Vec<Vec<T>> = (0..self.dim())
            .map(|i| m.mul_vec(self.basis.row(i)))
            .collect();
        Self::span(m.rows(), &imgs)
    }

    /// Coordinates of `v` against the RREF basis, if `v` lies in the space.
    pub fn coords_of(&self, v: &[T]) -> Option<Vec<T>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots().into_iter().map(|p| v[p].clone()).collect())
    }

    pub fn map_field<U: Field>(&self, f: impl Fn(&T) -> U) -> Subspace<U> {
        Subspace::row_space(&self.basis.map(f))
    }
}

impl<E: PointEval + Field> Subspace<E> {
    /// Evaluates the spanning rows; the result may have lower dimension at special points.
    pub fn eval_at(&self, point: &[Scalar]) -> Result<Subspace<Scalar>, ScalarError> {
        Ok(Subspace::row_space(&self.basis.eval_at(point)?))
    }
}

impl Subspace<Scalar> {
    pub fn to_polyfn(&self) -> Subspace<PolyFn> {
        Subspace {
            ambient: self.ambient,
            basis: self.basis.to_polyfn(),
        }
    }
}

pub fn unit<T: Field>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

pub fn kernel<T: Field>(m: &Matrix<T>) -> Subspace<T> {
    Subspace::span(m.cols(), &m.kernel_basis()).expect("kernel vectors have the column count")
}

pub fn image<T: Field>(m: &Matrix<T>) -> Subspace<T> {
    Subspace::full(m.cols()).image(m).expect("shapes agree")
}

/// `{v : m·v ∈ s}`.
pub fn preimage<T: Field>(m: &Matrix<T>, s: &Subspace<T>) -> Result<Subspace<T>, LinalgError> {
    if m.rows() != s.ambient() {
        return Err(LinalgError::DimensionMismatch {
            expected: s.ambient(),
            found: m.rows(),
        });
    }
    let ann = s.annihilator();
    Ok(kernel(&ann.basis().mul(m)))
}

/// Matrix of the dual map in the dual coordinate bases.
pub fn dual_map<T: Field>(m: &Matrix<T>) -> Matrix<T> {
    m.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ambient: usize, vs: &[&[i64]]) -> Subspace<Scalar> {
        let rows: Vec<Vec<Scalar>> = vs
            .iter()
            .map(|v| v.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect();
        Subspace::span(ambient, &rows).unwrap()
    }

    #[test]
    fn intersections() {
        let a = s(3, &[&[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.intersect(&a).unwrap(), a);
        let e1 = s(2, &[&[1, 0]]);
        let e2 = s(2, &[&[0, 1]]);
        assert!(e1.intersect(&e2).unwrap().is_zero());
        let b = s(3, &[&[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.intersect(&b).unwrap(), s(3, &[&[0, 0, 1]]));
        assert!(a.intersect(&e1).is_err());
    }

    #[test]
    fn sums_and_annihilators() {
        let e1 = s(2, &[&[1, 0]]);
        let e2 = s(2, &[&[0, 1]]);
        assert_eq!(e1.sum(&Subspace::zero(2)).unwrap(), e1);
        assert!(e1.sum(&e2).unwrap().is_full());
        assert!(Subspace::<Scalar>::full(4).annihilator().is_zero());
        let a = s(4, &[&[1, 2, 0, -1], &[0, 1, 1, 1]]);
        assert_eq!(a.annihilator().annihilator(), a);
    }

    #[test]
    fn preimage_of_projection() {
        let proj = Matrix::from_ints(1, 2, &[1, 0]);
        let target = s(1, &[&[1]]);
        assert!(preimage(&proj, &target).unwrap().is_full());
        assert_eq!(
            preimage(&proj, &Subspace::zero(1)).unwrap(),
            s(2, &[&[0, 1]])
        );
    }

    #[test]
    fn representation_is_canonical() {
        let a = s(3, &[&[1, 2, 3], &[4, 5, 6]]);
        let b = s(3, &[&[5, 7, 9], &[3, 3, 3]]);
        assert_eq!(a, b);
    }
}
