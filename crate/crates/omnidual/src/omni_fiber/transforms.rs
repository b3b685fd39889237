use crate::exact_scalars::Field;
use crate::linalg::{preimage, Matrix};

use super::{FiberModel, LagrangianSubspace, Mode, OmniError};

fn check_morphism<T: Field>(
    mode: Mode,
    target: &FiberModel,
    dphi: &Matrix<T>,
    a: &T,
) -> Result<FiberModel, OmniError> {
    if dphi.rows() != target.d_dim() || dphi.cols() < mode.extra() {
        return Err(OmniError::Shape(format!(
            "DΦ must have {} rows, found {}x{}",
            target.d_dim(),
            dphi.rows(),
            dphi.cols()
        )));
    }
    if a.is_zero() {
        return Err(OmniError::ZeroFactor);
    }
    let source = FiberModel::new(dphi.cols() - mode.extra(), mode);
    if let (Some(i), Some(i2)) = (source.one_index(), target.one_index()) {
        let ok = (0..dphi.rows()).all(|r| {
            let v = dphi.get(r, i);
            if r == i2 {
                v.is_one()
            } else {
                v.is_zero()
            }
        });
        if !ok {
            return Err(OmniError::IdentityNotPreserved);
        }
    }
    Ok(source)
}

// (δ, α′) ↦ (DΦδ, α′) and (δ, α′) ↦ (δ, a⁻¹DΦᵀα′), both on D ⊕ J′.
fn relation_maps<T: Field>(dphi: &Matrix<T>, a: &T) -> (Matrix<T>, Matrix<T>) {
    let d = dphi.cols();
    let d2 = dphi.rows();
    let push = dphi.block_diag(&Matrix::identity(d2));
    let ainv = a.inv_f().expect("nonzero factor");
    let pull = Matrix::<T>::identity(d).block_diag(&dphi.transpose().scale(&ainv));
    (push, pull)
}

/// `Φ^!𝓛′ = {(δ, (DΦ)*α′) : (DΦδ, α′) ∈ 𝓛′}` where `⟨δ,(DΦ)*α′⟩ = a⁻¹⟨DΦδ,α′⟩`.
pub fn backward<T: Field>(
    target: &LagrangianSubspace<T>,
    dphi: &Matrix<T>,
    a: &T,
) -> Result<LagrangianSubspace<T>, OmniError> {
    let tm = *target.model();
    let source = check_morphism(tm.mode, &tm, dphi, a)?;
    let (push, pull) = relation_maps(dphi, a);
    let w = preimage(&push, target.space())?;
    Ok(LagrangianSubspace::trusted(source, w.image(&pull)?))
}

/// `Φ_!𝓛 = {(DΦδ, α′) : (δ, (DΦ)*α′) ∈ 𝓛}`, with `target` the model of the codomain.
pub fn forward<T: Field>(
    source: &LagrangianSubspace<T>,
    dphi: &Matrix<T>,
    a: &T,
    target: &FiberModel,
) -> Result<LagrangianSubspace<T>, OmniError> {
    let sm = check_morphism(target.mode, target, dphi, a)?;
    if sm != *source.model() {
        return Err(OmniError::ModelMismatch);
    }
    let (push, pull) = relation_maps(dphi, a);
    let w = preimage(&pull, source.space())?;
    Ok(LagrangianSubspace::trusted(*target, w.image(&push)?))
}

/// `𝓛₁ ⋆ 𝓛₂ = {(δ, α₁+α₂) : (δ,αᵢ) ∈ 𝓛ᵢ}`.
pub fn star_sum<T: Field>(
    l1: &LagrangianSubspace<T>,
    l2: &LagrangianSubspace<T>,
) -> Result<LagrangianSubspace<T>, OmniError> {
    if l1.model() != l2.model() {
        return Err(OmniError::ModelMismatch);
    }
    let m = *l1.model();
    let d = m.d_dim();
    let id = Matrix::<T>::identity(d);
    let z = Matrix::<T>::zeros(d, d);
    let p1 = id.hstack(&z).hstack(&z).vstack(&z.hstack(&id).hstack(&z));
    let p2 = id.hstack(&z).hstack(&z).vstack(&z.hstack(&z).hstack(&id));
    let add = id.hstack(&z).hstack(&z).vstack(&z.hstack(&id).hstack(&id));
    let w = preimage(&p1, l1.space())?.intersect(&preimage(&p2, l2.space())?)?;
    Ok(LagrangianSubspace::trusted(m, w.image(&add)?))
}

/// `exp(B)(δ, α) = (δ, α + ι_δB)`.
pub fn gauge<T: Field>(
    l: &LagrangianSubspace<T>,
    b: &Matrix<T>,
) -> Result<LagrangianSubspace<T>, OmniError> {
    let m = *l.model();
    let d = m.d_dim();
    if b.rows() != d || b.cols() != d {
        return Err(OmniError::Shape(format!("expected a {d}x{d} form")));
    }
    if !b.is_skew() {
        return Err(OmniError::NotSkew);
    }
    let shear = Matrix::<T>::identity(d)
        .hstack(&Matrix::zeros(d, d))
        .vstack(&b.transpose().hstack(&Matrix::identity(d)));
    Ok(LagrangianSubspace::trusted(m, l.space().image(&shear)?))
}

/// `{(δ, −α) : (δ, α) ∈ 𝓛}`.
pub fn opposite<T: Field>(l: &LagrangianSubspace<T>) -> LagrangianSubspace<T> {
    let m = *l.model();
    let d = m.d_dim();
    let flip = Matrix::<T>::identity(d).block_diag(&Matrix::<T>::identity(d).neg());
    LagrangianSubspace::trusted(m, l.space().image(&flip).expect("shapes agree"))
}

/// `Φ*ϖ′ = a⁻¹ DΦᵀ ϖ′ DΦ`, the form whose graph is `Φ^! Gr ϖ′`.
pub fn pullback_form<T: Field>(form: &Matrix<T>, dphi: &Matrix<T>, a: &T) -> Matrix<T> {
    let ainv = a.inv_f().expect("nonzero factor");
    dphi.transpose().mul(form).mul(dphi).scale(&ainv)
}

/// Fiber maps of the two projections out of the product, at a point with coordinate `τ`.
///
/// The product chart is `(y₀, y₁, τ)`; its D-part is ordered `(∂y₀, ∂y₁, ∂τ, 𝟙)`.
/// `P₀` has factor 1 and `P₁` has factor `τ`, so `DP₁(∂τ) = −τ⁻¹𝟙` and the
/// generator `−τ∂τ` lies in `ker DP₀` with `DP₁(−τ∂τ) = 𝟙`. Dirac mode has no `τ`.
pub fn product_fiber_maps<T: Field>(
    n0: usize,
    n1: usize,
    mode: Mode,
    tau: &T,
) -> (FiberModel, [(Matrix<T>, T); 2]) {
    match mode {
        Mode::Jacobi => {
            let n = n0 + n1 + 1;
            let d = n + 1;
            let mut p0 = Matrix::zeros(n0 + 1, d);
            for i in 0..n0 {
                p0.set(i, i, T::one());
            }
            p0.set(n0, n, T::one());
            let mut p1 = Matrix::zeros(n1 + 1, d);
            for i in 0..n1 {
                p1.set(i, n0 + i, T::one());
            }
            p1.set(n1, n0 + n1, tau.inv_f().expect("τ ≠ 0").neg_f());
            p1.set(n1, n, T::one());
            (FiberModel::jacobi(n), [(p0, T::one()), (p1, tau.clone())])
        }
        Mode::Dirac => {
            let n = n0 + n1;
            let p0 = Matrix::from_fn(n0, n, |i, j| if i == j { T::one() } else { T::zero() });
            let p1 = Matrix::from_fn(n1, n, |i, j| if j == n0 + i { T::one() } else { T::zero() });
            (FiberModel::dirac(n), [(p0, T::one()), (p1, T::one())])
        }
    }
}

/// `(P₀^!𝓛₀) ⋆ (P₁^!𝓛₁)` at a product point with coordinate `τ`.
pub fn product_fiber<T: Field>(
    l0: &LagrangianSubspace<T>,
    l1: &LagrangianSubspace<T>,
    tau: &T,
) -> Result<LagrangianSubspace<T>, OmniError> {
    let mode = l0.model().mode;
    if l1.model().mode != mode {
        return Err(OmniError::ModelMismatch);
    }
    let (_, [(p0, a0), (p1, a1)]) = product_fiber_maps(l0.model().n, l1.model().n, mode, tau);
    star_sum(&backward(l0, &p0, &a0)?, &backward(l1, &p1, &a1)?)
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::exact_scalars::Scalar;
    use crate::linalg::Subspace;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn identity_morphism_is_neutral() {
        let m = FiberModel::jacobi(2);
        let w = Matrix::from_ints(3, 3, &[0, 1, 2, -1, 0, 3, -2, -3, 0]);
        let g = graph_of_form(&m, &w).unwrap();
        let id = Matrix::identity(3);
        assert_eq!(backward(&g, &id, &s(1)).unwrap(), g);
        assert_eq!(forward(&g, &id, &s(1), &m).unwrap(), g);
    }

    #[test]
    fn backward_of_graph_is_graph_of_pullback() {
        let tm = FiberModel::jacobi(1);
        let w = Matrix::from_ints(2, 2, &[0, 1, -1, 0]);
        // source (x, y), x ↦ x + 2y, factor 3, f-component of DΦ(∂y) = 5
        let dphi = Matrix::from_ints(2, 3, &[1, 2, 0, 0, 5, 1]);
        let a = s(3);
        let sm = FiberModel::jacobi(2);
        let lhs = backward(&graph_of_form(&tm, &w).unwrap(), &dphi, &a).unwrap();
        let rhs = graph_of_form(&sm, &pullback_form(&w, &dphi, &a)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn one_must_be_preserved() {
        let tm = FiberModel::jacobi(1);
        let bad = Matrix::from_ints(2, 2, &[1, 1, 0, 1]);
        let l = LagrangianSubspace::<Scalar>::d(tm);
        assert_eq!(
            backward(&l, &bad, &s(1)),
            Err(OmniError::IdentityNotPreserved)
        );
        assert_eq!(
            backward(&l, &Matrix::identity(2), &s(0)),
            Err(OmniError::ZeroFactor)
        );
    }

    #[test]
    fn backward_of_j_under_surjection_matches_definition() {
        // definition unrolled: (DΦδ, α′) ∈ J′ forces DΦδ = 0, so Φ^!J′ = ker DΦ ⊕ im DΦᵀ
        let tm = FiberModel::jacobi(1);
        let dphi = Matrix::from_ints(2, 3, &[1, 1, 0, 0, 0, 1]);
        let got = backward(&LagrangianSubspace::j(tm), &dphi, &s(2)).unwrap();
        let mut rows = vec![vec![s(1), s(-1), s(0), s(0), s(0), s(0)]];
        for i in 0..2 {
            let col = dphi.transpose().mul_vec(&crate::linalg::unit(2, i));
            let mut v = vec![s(0); 3];
            v.extend(col.iter().map(|x| x / &s(2)));
            rows.push(v);
        }
        assert_eq!(got.space(), &Subspace::span(6, &rows).unwrap());
    }

    #[test]
    fn star_with_zero_graph_is_neutral() {
        let m = FiberModel::jacobi(1);
        let j = Matrix::from_ints(2, 2, &[0, 1, -1, 0]);
        let g = graph_of_biderivation(&m, &j).unwrap();
        assert_eq!(star_sum(&g, &LagrangianSubspace::d(m)).unwrap(), g);
        let w1 = Matrix::from_ints(2, 2, &[0, 2, -2, 0]);
        let w2 = Matrix::from_ints(2, 2, &[0, -7, 7, 0]);
        let lhs = star_sum(
            &graph_of_form(&m, &w1).unwrap(),
            &graph_of_form(&m, &w2).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, graph_of_form(&m, &w1.add(&w2)).unwrap());
    }

    #[test]
    fn gauge_and_opposite() {
        let m = FiberModel::jacobi(1);
        let b = Matrix::from_ints(2, 2, &[0, 4, -4, 0]);
        let d = LagrangianSubspace::<Scalar>::d(m);
        assert_eq!(gauge(&d, &b).unwrap(), graph_of_form(&m, &b).unwrap());
        assert_eq!(
            opposite(&graph_of_form(&m, &b).unwrap()),
            graph_of_form(&m, &b.neg()).unwrap()
        );
        let g = graph_of_biderivation(&m, &b).unwrap();
        assert_eq!(gauge(&gauge(&g, &b).unwrap(), &b.neg()).unwrap(), g);
        assert_eq!(opposite(&opposite(&g)), g);
    }

    #[test]
    fn product_of_form_graphs() {
        let m0 = FiberModel::jacobi(1);
        let m1 = FiberModel::jacobi(1);
        let w0 = Matrix::from_ints(2, 2, &[0, 1, -1, 0]);
        let w1 = Matrix::from_ints(2, 2, &[0, -3, 3, 0]);
        let tau = s(2);
        let (pm, [(p0, a0), (p1, a1)]) = product_fiber_maps::<Scalar>(1, 1, Mode::Jacobi, &tau);
        assert_eq!(pm.n, 3);
        let prod = product_fiber(
            &graph_of_form(&m0, &w0).unwrap(),
            &graph_of_form(&m1, &w1).unwrap(),
            &tau,
        )
        .unwrap();
        let w = pullback_form(&w0, &p0, &a0).add(&pullback_form(&w1, &p1, &a1));
        assert_eq!(prod, graph_of_form(&pm, &w).unwrap());
        let dd =
            product_fiber(&LagrangianSubspace::d(m0), &LagrangianSubspace::d(m1), &tau).unwrap();
        assert_eq!(dd, LagrangianSubspace::d(pm));
    }

    #[test]
    fn splitting_generator() {
        let tau = s(-3);
        let (pm, [(p0, _), (p1, _)]) = product_fiber_maps::<Scalar>(2, 1, Mode::Jacobi, &tau);
        let mut gen = vec![s(0); pm.d_dim()];
        gen[3] = -&tau;
        assert!(p0.mul_vec(&gen).iter().all(|x| x.is_zero()));
        assert_eq!(p1.mul_vec(&gen), vec![s(0), s(1)]);
        // D = ker DP₀ ⊕ ker DP₁
        let k0 = crate::linalg::kernel(&p0);
        let k1 = crate::linalg::kernel(&p1);
        assert_eq!(k0.dim() + k1.dim(), pm.d_dim());
        assert!(k0.intersect(&k1).unwrap().is_zero());
        assert!(k0.sum(&k1).unwrap().is_full());
    }
}
