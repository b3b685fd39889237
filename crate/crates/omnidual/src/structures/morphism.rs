use crate::der_calculus::{frame_apply, Chart, FormField};
use crate::exact_scalars::{Field, PolyFn, Scalar};
use crate::linalg::Matrix;
use crate::omni_fiber::{pullback_form, Mode};

use super::StructureError;

/// A regular line-bundle morphism between trivialized charts: a base map
/// `φ` (one component per target coordinate, written in source coordinates)
/// and the fiber factor `a`, so that `Φ*s = (s∘φ)/a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LBMorphism {
    source: Chart,
    target: Chart,
    phi: Vec<PolyFn>,
    factor: PolyFn,
}

impl LBMorphism {
    pub fn new(
        source: Chart,
        target: Chart,
        phi: Vec<PolyFn>,
        factor: PolyFn,
    ) -> Result<Self, StructureError> {
        if source.mode() != target.mode() {
            return Err(StructureError::ModeMismatch);
        }
        if phi.len() != target.dim() {
            return Err(StructureError::Shape(format!(
                "base map needs {} components, found {}",
                target.dim(),
                phi.len()
            )));
        }
        let n = source.dim();
        if phi
            .iter()
            .chain(std::iter::once(&factor))
            .any(|f| f.max_var().is_some_and(|v| v >= n))
        {
            return Err(StructureError::Shape(
                "base map uses variables outside the source chart".into(),
            ));
        }
        if factor.is_zero() {
            return Err(StructureError::ZeroFactor);
        }
        if source.mode() == Mode::Dirac && !factor.is_one() {
            return Err(StructureError::Shape(
                "dirac-mode morphisms have factor 1".into(),
            ));
        }
        Ok(LBMorphism {
            source,
            target,
            phi,
            factor,
        })
    }

    pub fn identity(chart: &Chart) -> Self {
        let phi = (0..chart.dim()).map(PolyFn::var).collect();
        LBMorphism {
            source: chart.clone(),
            target: chart.clone(),
            phi,
            factor: PolyFn::one(),
        }
    }

    /// `x ↦ (x_{k₀}, x_{k₁}, …)` with factor 1.
    pub fn projection(
        source: &Chart,
        target: &Chart,
        indices: &[usize],
    ) -> Result<Self, StructureError> {
        if indices.iter().any(|&k| k >= source.dim()) {
            return Err(StructureError::Shape(
                "projection index out of range".into(),
            ));
        }
        Self::new(
            source.clone(),
            target.clone(),
            indices.iter().map(|&k| PolyFn::var(k)).collect(),
            PolyFn::one(),
        )
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn phi(&self) -> &[PolyFn] {
        &self.phi
    }

    pub fn factor(&self) -> &PolyFn {
        &self.factor
    }

    /// Source coordinate picked by each target coordinate, when `φ` is a coordinate projection.
    pub fn projection_indices(&self) -> Option<Vec<usize>> {
        let idx: Option<Vec<usize>> = self
            .phi
            .iter()
            .map(|f| (0..self.source.dim()).find(|&k| *f == PolyFn::var(k)))
            .collect();
        let idx = idx?;
        let mut seen = idx.clone();
        seen.sort_unstable();
        seen.dedup();
        (seen.len() == idx.len()).then_some(idx)
    }

    /// A section `σ` of `φ` (target coordinates to source coordinates) when `φ` is a
    /// coordinate projection; the remaining source coordinates are set to `anchor`.
    pub fn section(&self, anchor: &[Scalar]) -> Option<Vec<PolyFn>> {
        let idx = self.projection_indices()?;
        let mut s: Vec<PolyFn> = (0..self.source.dim())
            .map(|k| PolyFn::constant(anchor.get(k).cloned().unwrap_or_else(Scalar::zero)))
            .collect();
        for (j, &k) in idx.iter().enumerate() {
            s[k] = PolyFn::var(j);
        }
        Some(s)
    }

    pub fn jacobian(&self) -> Matrix<PolyFn> {
        Matrix::from_fn(self.target.dim(), self.source.dim(), |i, j| {
            self.phi[i].partial(j)
        })
    }

    /// Matrix of `DΦ` on the frames: `(X, f) ↦ (Jφ·X, f − X(a)/a)` in jacobi mode, `Jφ` in dirac mode.
    pub fn dphi(&self) -> Matrix<PolyFn> {
        let jac = self.jacobian();
        match self.source.mode() {
            Mode::Dirac => jac,
            Mode::Jacobi => {
                let (n, m) = (self.source.dim(), self.target.dim());
                let mut out = Matrix::zeros(m + 1, n + 1);
                for i in 0..m {
                    for j in 0..n {
                        out.set(i, j, jac.get(i, j).clone());
                    }
                }
                for j in 0..n {
                    let v = self
                        .factor
                        .partial(j)
                        .div_ref(&self.factor)
                        .expect("nonzero factor");
                    out.set(m, j, v.neg_ref());
                }
                out.set(m, n, PolyFn::one());
                out
            }
        }
    }

    /// `(DΦ, a)` at a source point.
    pub fn at(&self, point: &[Scalar]) -> Result<(Matrix<Scalar>, Scalar), StructureError> {
        let a = self.factor.eval(point)?;
        if a.is_zero() {
            return Err(StructureError::ZeroFactor);
        }
        Ok((self.dphi().eval_at(point)?, a))
    }

    pub fn image(&self, point: &[Scalar]) -> Result<Vec<Scalar>, StructureError> {
        Ok(self
            .phi
            .iter()
            .map(|f| f.eval(point))
            .collect::<Result<_, _>>()?)
    }

    /// Checks `((DΦ)δ)s = Φ(δ(Φ*s))` for every frame derivation `δ` and every
    /// test section `s ∈ {1, target coordinates}`. Returns the first failing pair.
    pub fn check_defining_relation(&self) -> Result<Option<(usize, usize)>, StructureError> {
        let sm = self.source.model();
        let tm = self.target.model();
        let dphi = self.dphi();
        let mut tests = Vec::new();
        if tm.mode == Mode::Jacobi {
            tests.push(PolyFn::one());
        }
        tests.extend((0..tm.n).map(PolyFn::var));
        for (si, s) in tests.iter().enumerate() {
            let s_phi = s.substitute(&self.phi)?;
            let pulled = s_phi.div_ref(&self.factor)?;
            for a in 0..sm.d_dim() {
                let mut lhs = PolyFn::zero();
                for b in 0..tm.d_dim() {
                    let c = dphi.get(b, a);
                    if c.is_zero() {
                        continue;
                    }
                    let sb = frame_apply(&tm, b, s).substitute(&self.phi)?;
                    lhs = lhs.add_ref(&c.mul_ref(&sb));
                }
                let rhs = self.factor.mul_ref(&frame_apply(&sm, a, &pulled));
                if lhs != rhs {
                    return Ok(Some((a, si)));
                }
            }
        }
        Ok(None)
    }

    /// Whether `Jφ` has full row rank at the point.
    pub fn is_submersive_at(&self, point: &[Scalar]) -> Result<bool, StructureError> {
        Ok(self.jacobian().eval_at(point)?.rank() == self.target.dim())
    }

    /// `Φ*ϖ = a⁻¹ DΦᵀ (ϖ∘φ) DΦ`.
    pub fn pull_form(&self, form: &FormField) -> Result<FormField, StructureError> {
        if *form.model() != self.target.model() || form.degree() != 2 {
            return Err(StructureError::Shape(
                "expected a 2-form on the target chart".into(),
            ));
        }
        let w = form.to_matrix().substitute(&self.phi)?;
        let pulled = pullback_form(&w, &self.dphi(), &self.factor);
        Ok(FormField::from_matrix(self.source.model(), &pulled)?)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &LBMorphism) -> Result<LBMorphism, StructureError> {
        if first.target != self.source {
            return Err(StructureError::ChartMismatch);
        }
        let phi = self
            .phi
            .iter()
            .map(|f| f.substitute(&first.phi))
            .collect::<Result<Vec<_>, _>>()?;
        let factor = first.factor.mul_ref(&self.factor.substitute(&first.phi)?);
        LBMorphism::new(first.source.clone(), self.target.clone(), phi, factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(names: &[&str]) -> Chart {
        Chart::new(names.iter().copied(), Mode::Jacobi).unwrap()
    }

    #[test]
    fn defining_relation_holds_for_rescaled_maps() {
        let src = chart(&["x", "y"]);
        let tgt = chart(&["u"]);
        let phi = vec![src.parse("x^2 + y").unwrap()];
        let f = LBMorphism::new(
            src.clone(),
            tgt.clone(),
            phi.clone(),
            src.parse("1 + x^2").unwrap(),
        )
        .unwrap();
        assert_eq!(f.check_defining_relation().unwrap(), None);
        assert_eq!(*f.dphi().get(1, 0), src.parse("-2*x/(1 + x^2)").unwrap());
    }

    #[test]
    fn factor_enters_the_matrix() {
        let src = chart(&["x"]);
        let f = LBMorphism::new(
            src.clone(),
            src.clone(),
            vec![PolyFn::var(0)],
            src.parse("x^2 + 1").unwrap(),
        )
        .unwrap();
        let g = LBMorphism::new(
            src.clone(),
            src.clone(),
            vec![PolyFn::var(0)],
            PolyFn::one(),
        )
        .unwrap();
        assert_ne!(f.dphi(), g.dphi());
        assert_eq!(g.check_defining_relation().unwrap(), None);
    }

    #[test]
    fn composition_multiplies_factors() {
        let c = chart(&["x"]);
        let f = LBMorphism::new(
            c.clone(),
            c.clone(),
            vec![c.parse("2*x").unwrap()],
            c.parse("x^2+1").unwrap(),
        )
        .unwrap();
        let g = LBMorphism::new(
            c.clone(),
            c.clone(),
            vec![c.parse("x+1").unwrap()],
            c.parse("x^2+2").unwrap(),
        )
        .unwrap();
        let h = g.after(&f).unwrap();
        assert_eq!(h.phi()[0], c.parse("2*x+1").unwrap());
        assert_eq!(*h.factor(), c.parse("(x^2+1)*(4*x^2+2)").unwrap());
        assert_eq!(h.check_defining_relation().unwrap(), None);
        let p = Scalar::from_int(3);
        let (m, a) = h.at(&[p.clone()]).unwrap();
        let (m1, a1) = f.at(&[p.clone()]).unwrap();
        let (m2, a2) = g.at(&f.image(&[p]).unwrap()).unwrap();
        assert_eq!(m, m2.mul(&m1));
        assert_eq!(a, a1 * a2);
    }

    #[test]
    fn projections_have_sections() {
        let src = chart(&["x", "y", "z"]);
        let tgt = chart(&["a", "b"]);
        let p = LBMorphism::projection(&src, &tgt, &[2, 0]).unwrap();
        assert_eq!(p.projection_indices(), Some(vec![2, 0]));
        let s = p.section(&[]).unwrap();
        assert_eq!(s, vec![PolyFn::var(1), PolyFn::zero(), PolyFn::var(0)]);
        assert!(p
            .is_submersive_at(&[Scalar::zero(), Scalar::zero(), Scalar::zero()])
            .unwrap());
    }
}
