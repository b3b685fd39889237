//! Pointwise model of `D_xL ⊕ J¹_xL` for a trivialized line bundle.
//!
//! Vectors are laid out as `(d-part, j-part)`. In jacobi mode the d-part is
//! `(X¹..Xⁿ, f)`, meaning `X + f·𝟙`, and the j-part uses the dual frame.
//! Dirac mode drops the `𝟙` slot. Every operation is generic over [`Field`],
//! so the same code computes fibers at points and over rational functions.

mod transforms;

use serde::{Deserialize, Serialize};

use crate::exact_scalars::{Field, PointEval, PolyFn, Scalar, ScalarError};
use crate::linalg::{kernel, unit, LinalgError, Matrix, Sampler, Subspace};

pub use transforms::{
    backward, forward, gauge, opposite, product_fiber, product_fiber_maps, pullback_form, star_sum,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Jacobi,
    Dirac,
}

impl Mode {
    pub fn extra(self) -> usize {
        match self {
            Mode::Jacobi => 1,
            Mode::Dirac => 0,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Jacobi => "jacobi",
            Mode::Dirac => "dirac",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiberModel {
    pub n: usize,
    pub mode: Mode,
}

impl FiberModel {
    pub fn new(n: usize, mode: Mode) -> Self {
        FiberModel { n, mode }
    }

    pub fn jacobi(n: usize) -> Self {
        Self::new(n, Mode::Jacobi)
    }

    pub fn dirac(n: usize) -> Self {
        Self::new(n, Mode::Dirac)
    }

    /// Dimension of the D-part.
    pub fn d_dim(&self) -> usize {
        self.n + self.mode.extra()
    }

    pub fn ambient(&self) -> usize {
        2 * self.d_dim()
    }

    /// Index of `𝟙` in the D-part.
    pub fn one_index(&self) -> Option<usize> {
        (self.mode == Mode::Jacobi).then_some(self.n)
    }

    pub fn one<T: Field>(&self) -> Option<Vec<T>> {
        self.one_index().map(|i| unit(self.d_dim(), i))
    }

    /// Gram matrix of the pairing on the standard basis.
    pub fn gram<T: Field>(&self) -> Matrix<T> {
        let d = self.d_dim();
        Matrix::from_fn(2 * d, 2 * d, |i, j| {
            if (i < d && j == i + d) || (j < d && i == j + d) {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    /// The subspace `D ⊕ 0`.
    pub fn d_space<T: Field>(&self) -> Subspace<T> {
        Subspace::coordinate(self.ambient(), &(0..self.d_dim()).collect::<Vec<_>>())
    }

    /// The subspace `0 ⊕ J`.
    pub fn j_space<T: Field>(&self) -> Subspace<T> {
        let d = self.d_dim();
        Subspace::coordinate(self.ambient(), &(d..2 * d).collect::<Vec<_>>())
    }

    /// `(δ, α)` as an ambient vector.
    pub fn join<T: Field>(&self, d: &[T], j: &[T]) -> Vec<T> {
        assert_eq!(d.len(), self.d_dim());
        assert_eq!(j.len(), self.d_dim());
        d.iter().chain(j).cloned().collect()
    }

    pub fn split<'a, T>(&self, v: &'a [T]) -> (&'a [T], &'a [T]) {
        v.split_at(self.d_dim())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OmniError {
    #[error("fiber models differ")]
    ModelMismatch,
    #[error("subspace of dimension {dim} is not Lagrangian (isotropic: {isotropic})")]
    NotLagrangian { dim: usize, isotropic: bool },
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("morphism does not send 𝟙 to 𝟙")]
    IdentityNotPreserved,
    #[error("line bundle factor vanishes")]
    ZeroFactor,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("vector is not in the D-projection of the structure")]
    NotInProjection,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `⟨⟨(δ₁,α₁),(δ₂,α₂)⟩⟩ = α₁(δ₂) + α₂(δ₁)`.
pub fn pairing<T: Field>(model: &FiberModel, u: &[T], v: &[T]) -> Result<T, OmniError> {
    if u.len() != model.ambient() || v.len() != model.ambient() {
        return Err(OmniError::ModelMismatch);
    }
    let (ud, uj) = model.split(u);
    let (vd, vj) = model.split(v);
    let mut acc = T::zero();
    for i in 0..model.d_dim() {
        acc = acc.add_f(&uj[i].mul_f(&vd[i])).add_f(&vj[i].mul_f(&ud[i]));
    }
    Ok(acc)
}

/// Orthogonal complement with respect to the pairing.
pub fn orthogonal<T: Field>(model: &FiberModel, s: &Subspace<T>) -> Subspace<T> {
    kernel(&s.basis().mul(&model.gram()))
}

pub fn is_isotropic<T: Field>(model: &FiberModel, s: &Subspace<T>) -> bool {
    let b = s.basis();
    b.mul(&model.gram()).mul(&b.transpose()).is_zero()
}

pub fn is_lagrangian<T: Field>(model: &FiberModel, s: &Subspace<T>) -> bool {
    s.ambient() == model.ambient() && s.dim() == model.d_dim() && is_isotropic(model, s)
}

/// A maximally isotropic subspace of the fiber.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LagrangianSubspace<T> {
    model: FiberModel,
    space: Subspace<T>,
}

impl<T: Field> LagrangianSubspace<T> {
    pub fn new(model: FiberModel, space: Subspace<T>) -> Result<Self, OmniError> {
        if space.ambient() != model.ambient() {
            return Err(OmniError::ModelMismatch);
        }
        if !is_lagrangian(&model, &space) {
            return Err(OmniError::NotLagrangian {
                dim: space.dim(),
                isotropic: is_isotropic(&model, &space),
            });
        }
        Ok(LagrangianSubspace { model, space })
    }

    pub fn span(model: FiberModel, vectors: &[Vec<T>]) -> Result<Self, OmniError> {
        Self::new(model, Subspace::span(model.ambient(), vectors)?)
    }

    /// Caller guarantees the Lagrangian property; used by constructions that preserve it.
    pub(crate) fn trusted(model: FiberModel, space: Subspace<T>) -> Self {
        debug_assert!(
            is_lagrangian(&model, &space),
            "construction lost the Lagrangian property"
        );
        LagrangianSubspace { model, space }
    }

    pub fn d(model: FiberModel) -> Self {
        LagrangianSubspace {
            model,
            space: model.d_space(),
        }
    }

    pub fn j(model: FiberModel) -> Self {
        LagrangianSubspace {
            model,
            space: model.j_space(),
        }
    }

    pub fn model(&self) -> &FiberModel {
        &self.model
    }

    pub fn space(&self) -> &Subspace<T> {
        &self.space
    }

    pub fn into_space(self) -> Subspace<T> {
        self.space
    }

    /// `pr_D 𝓛` inside D.
    pub fn pr_d(&self) -> Subspace<T> {
        let d = self.model.d_dim();
        let rows: Vec<Vec<T>> = self
            .space
            .basis_vectors()
            .into_iter()
            .map(|v| v[..d].to_vec())
            .collect();
        Subspace::span(d, &rows).expect("d-part length")
    }

    /// `𝓛 ∩ J` as a subspace of J; equals the annihilator of `pr_D 𝓛`.
    pub fn j_intersection(&self) -> Subspace<T> {
        let d = self.model.d_dim();
        let i = self
            .space
            .intersect(&self.model.j_space())
            .expect("same ambient");
        let rows: Vec<Vec<T>> = i
            .basis_vectors()
            .into_iter()
            .map(|v| v[d..].to_vec())
            .collect();
        Subspace::span(d, &rows).expect("j-part length")
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.space.contains(v)
    }

    /// Whether `𝟙 ∈ pr_D 𝓛`. Always false in dirac mode.
    pub fn contains_one(&self) -> bool {
        match self.model.one::<T>() {
            Some(one) => self.pr_d().contains(&one),
            None => false,
        }
    }

    /// Some `α` with `(u, α) ∈ 𝓛`, for `u ∈ pr_D 𝓛`. Unique modulo `𝓛 ∩ J`.
    pub fn lift(&self, u: &[T]) -> Result<Vec<T>, OmniError> {
        let d = self.model.d_dim();
        if u.len() != d {
            return Err(OmniError::Shape(format!(
                "expected a D-vector of length {d}"
            )));
        }
        // solve Σ c_k b_k|_D = u over the basis rows
        let b = self.space.basis();
        let dpart = Matrix::from_fn(d, b.rows(), |i, k| b.get(k, i).clone());
        let aug = dpart.hstack(&Matrix::from_fn(d, 1, |i, _| u[i].clone()));
        let (r, piv) = aug.rref();
        if piv.contains(&b.rows()) {
            return Err(OmniError::NotInProjection);
        }
        let mut c = vec![T::zero(); b.rows()];
        for (row, &p) in piv.iter().enumerate() {
            c[p] = r.get(row, b.rows()).clone();
        }
        let mut alpha = vec![T::zero(); d];
        for (k, ck) in c.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            for (i, a) in alpha.iter_mut().enumerate() {
                *a = a.add_f(&ck.mul_f(b.get(k, d + i)));
            }
        }
        Ok(alpha)
    }

    /// The form `β(u,v) = α_u(v)` on `pr_D 𝓛`, in the given basis of `pr_D 𝓛`.
    pub fn leaf_form(&self, basis: &[Vec<T>]) -> Result<Matrix<T>, OmniError> {
        let lifts = basis
            .iter()
            .map(|u| self.lift(u))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_fn(basis.len(), basis.len(), |i, j| {
            dot(&lifts[i], &basis[j])
        }))
    }

    pub fn map_field<U: Field>(&self, f: impl Fn(&T) -> U) -> LagrangianSubspace<U> {
        LagrangianSubspace {
            model: self.model,
            space: self.space.map_field(f),
        }
    }
}

impl<E: PointEval + Field> LagrangianSubspace<E> {
    /// Evaluates at a point; the result may fail to be Lagrangian at special points.
    pub fn eval_at(&self, point: &[Scalar]) -> Result<LagrangianSubspace<Scalar>, OmniError> {
        LagrangianSubspace::new(self.model, self.space.eval_at(point)?)
    }
}

impl LagrangianSubspace<Scalar> {
    pub fn to_polyfn(&self) -> LagrangianSubspace<PolyFn> {
        LagrangianSubspace {
            model: self.model,
            space: self.space.to_polyfn(),
        }
    }
}

pub fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc.add_f(&x.mul_f(y)))
}

fn check_form<T: Field>(model: &FiberModel, m: &Matrix<T>) -> Result<(), OmniError> {
    if m.rows() != model.d_dim() || m.cols() != model.d_dim() {
        return Err(OmniError::Shape(format!(
            "expected a {0}x{0} matrix",
            model.d_dim()
        )));
    }
    if !m.is_skew() {
        return Err(OmniError::NotSkew);
    }
    Ok(())
}

/// `ι_δ ϖ` with `(ι_δϖ)_j = Σ_i δ_i ϖ_ij`.
pub fn flat<T: Field>(form: &Matrix<T>, delta: &[T]) -> Vec<T> {
    form.transpose().mul_vec(delta)
}

/// `Gr ϖ = {(δ, ϖ♭δ)}`.
pub fn graph_of_form<T: Field>(
    model: &FiberModel,
    form: &Matrix<T>,
) -> Result<LagrangianSubspace<T>, OmniError> {
    check_form(model, form)?;
    let d = model.d_dim();
    let rows: Vec<Vec<T>> = (0..d)
        .map(|i| model.join(&unit(d, i), form.row(i)))
        .collect();
    Ok(LagrangianSubspace::trusted(
        *model,
        Subspace::span(model.ambient(), &rows)?,
    ))
}

/// `Gr J = {(J♯α, α)}` with `(J♯α)_j = Σ_i α_i J_ij`.
pub fn graph_of_biderivation<T: Field>(
    model: &FiberModel,
    bider: &Matrix<T>,
) -> Result<LagrangianSubspace<T>, OmniError> {
    check_form(model, bider)?;
    let d = model.d_dim();
    let rows: Vec<Vec<T>> = (0..d)
        .map(|i| model.join(bider.row(i), &unit(d, i)))
        .collect();
    Ok(LagrangianSubspace::trusted(
        *model,
        Subspace::span(model.ambient(), &rows)?,
    ))
}

/// Random skew matrix with small integer entries.
pub fn random_skew(sampler: &mut Sampler, d: usize) -> Matrix<Scalar> {
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        for j in i + 1..d {
            let v = Scalar::from_int(sampler.int(-3, 3));
            m.set(i, j, v.clone());
            m.set(j, i, -v);
        }
    }
    m
}

/// `{(e, ϖ♭e + α) : e ∈ E, α ∈ E°}` for a random `E ⊂ D` of dimension `k` and random skew `ϖ`.
/// Every Lagrangian subspace has this shape, with `E = pr_D 𝓛`.
pub fn lagrangian_from(
    model: &FiberModel,
    e: &Subspace<Scalar>,
    form: &Matrix<Scalar>,
) -> LagrangianSubspace<Scalar> {
    let d = model.d_dim();
    let mut rows = Vec::new();
    for v in e.basis_vectors() {
        let a = flat(form, &v);
        rows.push(model.join(&v, &a));
    }
    for a in e.annihilator().basis_vectors() {
        rows.push(model.join(&vec![Scalar::zero(); d], &a));
    }
    LagrangianSubspace::trusted(
        *model,
        Subspace::span(model.ambient(), &rows).expect("lengths"),
    )
}

pub fn random_lagrangian(sampler: &mut Sampler, model: &FiberModel) -> LagrangianSubspace<Scalar> {
    let d = model.d_dim();
    let k = sampler.int(0, d as i64) as usize;
    let rows: Vec<Vec<Scalar>> = (0..k)
        .map(|_| {
            (0..d)
                .map(|_| Scalar::from_int(sampler.int(-2, 2)))
                .collect()
        })
        .collect();
    let e = Subspace::span(d, &rows).expect("lengths");
    lagrangian_from(model, &e, &random_skew(sampler, d))
}

/// Random fiber map of an LB morphism from an `n_src`-dimensional base to an `n_tgt`-dimensional one.
/// With `surjective`, the base Jacobian has full row rank.
pub fn random_fiber_morphism(
    sampler: &mut Sampler,
    n_src: usize,
    n_tgt: usize,
    mode: Mode,
    surjective: bool,
) -> (Matrix<Scalar>, Scalar) {
    loop {
        let data = (0..n_tgt * n_src)
            .map(|_| Scalar::from_int(sampler.int(-2, 2)))
            .collect();
        let jac = Matrix::from_vec(n_tgt, n_src, data).expect("length");
        if surjective && jac.rank() < n_tgt {
            continue;
        }
        let a = loop {
            let v = sampler.int(-3, 3);
            if v != 0 {
                break Scalar::from_int(v);
            }
        };
        return match mode {
            Mode::Dirac => (jac, Scalar::one()),
            Mode::Jacobi => {
                let mut m = Matrix::zeros(n_tgt + 1, n_src + 1);
                for i in 0..n_tgt {
                    for j in 0..n_src {
                        m.set(i, j, jac.get(i, j).clone());
                    }
                }
                for j in 0..n_src {
                    m.set(n_tgt, j, Scalar::from_int(sampler.int(-2, 2)));
                }
                m.set(n_tgt, n_src, Scalar::one());
                (m, a)
            }
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn pairing_basics() {
        let m = FiberModel::jacobi(1);
        let d1 = vec![s(1), s(2), s(0), s(0)];
        let d2 = vec![s(3), s(-1), s(0), s(0)];
        assert!(pairing(&m, &d1, &d2).unwrap().is_zero());
        let u = vec![s(1), s(2), s(5), s(7)];
        assert_eq!(pairing(&m, &u, &u).unwrap(), s(2) * (s(5) + s(14)));
        assert!(pairing(&m, &u, &u[..2]).is_err());
    }

    #[test]
    fn d_and_j_are_self_orthogonal() {
        for m in [FiberModel::jacobi(2), FiberModel::dirac(2)] {
            let d: Subspace<Scalar> = m.d_space();
            let j: Subspace<Scalar> = m.j_space();
            assert_eq!(orthogonal(&m, &d), d);
            assert_eq!(orthogonal(&m, &j), j);
        }
    }

    #[test]
    fn graph_of_contact_form_on_a_line() {
        let m = FiberModel::jacobi(1);
        let w = Matrix::from_ints(2, 2, &[0, 1, -1, 0]);
        let g = graph_of_form(&m, &w).unwrap();
        // (∂; 𝟙*) and (𝟙; −∂*)
        let expected = Subspace::span(
            4,
            &[vec![s(1), s(0), s(0), s(1)], vec![s(0), s(1), s(-1), s(0)]],
        )
        .unwrap();
        assert_eq!(g.space(), &expected);
        assert!(g
            .space()
            .intersect(&m.j_space::<Scalar>())
            .unwrap()
            .is_zero());
        assert_eq!(
            graph_of_form(&m, &Matrix::<Scalar>::zeros(2, 2)).unwrap(),
            LagrangianSubspace::d(m)
        );
        assert_eq!(
            graph_of_biderivation(&m, &Matrix::<Scalar>::zeros(2, 2)).unwrap(),
            LagrangianSubspace::j(m)
        );
    }

    #[test]
    fn nondegenerate_biderivation_graph_is_form_graph() {
        let m = FiberModel::jacobi(1);
        let j = Matrix::from_ints(2, 2, &[0, 2, -2, 0]);
        let w = j.inverse().unwrap();
        assert_eq!(
            graph_of_biderivation(&m, &j).unwrap(),
            graph_of_form(&m, &w).unwrap()
        );
    }

    #[test]
    fn non_skew_rejected() {
        let m = FiberModel::jacobi(1);
        assert_eq!(
            graph_of_form(&m, &Matrix::from_ints(2, 2, &[1, 0, 0, 0])),
            Err(OmniError::NotSkew)
        );
    }

    #[test]
    fn lift_and_leaf_form() {
        let m = FiberModel::jacobi(1);
        let w = Matrix::from_ints(2, 2, &[0, 3, -3, 0]);
        let g = graph_of_form(&m, &w).unwrap();
        let basis = vec![vec![s(1), s(0)], vec![s(0), s(1)]];
        assert_eq!(g.leaf_form(&basis).unwrap(), w);
        assert!(g.contains_one());
        let j = LagrangianSubspace::<Scalar>::j(m);
        assert_eq!(j.lift(&[s(1), s(0)]), Err(OmniError::NotInProjection));
    }
}
