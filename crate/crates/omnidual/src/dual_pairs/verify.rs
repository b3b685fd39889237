//! The three pointwise criteria for a weak dual pair, evaluated on one apex fiber.

use serde::Serialize;

use crate::exact_scalars::{Field, Scalar};
use crate::linalg::{kernel, Matrix, Subspace};
use crate::omni_fiber::{
    backward, flat, forward, gauge, graph_of_form, opposite, product_fiber, product_fiber_maps,
    FiberModel, LagrangianSubspace, Mode,
};
use crate::structures::show_point;

use super::DualPairError;

/// `ϖ`, `(DS, a_S)`, `(DT, a_T)` and the leg fibers `𝓛₀` at `S(x)`, `𝓛₁` at `T(x)`.
///
/// The second leg stores `𝓛₁` itself; `T_!Gr ϖ` is compared with its opposite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberInstance {
    pub apex: FiberModel,
    pub form: Matrix<Scalar>,
    pub s: (Matrix<Scalar>, Scalar),
    pub t: (Matrix<Scalar>, Scalar),
    pub l0: LagrangianSubspace<Scalar>,
    pub l1: LagrangianSubspace<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub holds: bool,
    pub witness: Option<String>,
}

impl Check {
    fn pass() -> Self {
        Check {
            holds: true,
            witness: None,
        }
    }

    fn fail(w: String) -> Self {
        Check {
            holds: false,
            witness: Some(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankCheck {
    pub holds: bool,
    /// `d − d₀ − d₁` in frame dimensions, i.e. `dim M − dim M₀ − dim M₁ − 1` in jacobi mode.
    pub expected: i64,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefinitionVerdict {
    pub orthogonal: Check,
    pub rank: RankCheck,
    pub forward_s: Check,
    pub forward_t: Check,
    /// `ker DS ∩ ker ϖ♭ ∩ ker DT = ker DS ∩ (ker DT)^ϖ = (ker DS)^ϖ ∩ ker DT` inside `𝔻`.
    pub kernel_identity: bool,
    /// `ϖ♭(ker DS ∩ ker DT) = (ker DS + ker DT)°`, evaluated once orthogonality and rank hold.
    pub annihilator_identity: Option<bool>,
    /// Set when both leg fibers are graphs of biderivations and the jet count is zero: whether `ϖ` is nondegenerate.
    pub full_contact: Option<bool>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BFieldVerdict {
    /// `S^!𝓛₀ = (T^!𝓛₁)^ϖ`.
    pub bfield: Check,
    pub rank: RankCheck,
    /// `S^!𝓛₀ = ker DS + (ker DT)^ϖ` and `T^!𝓛₁^opp = ker DT + (ker DS)^ϖ`, evaluated once the verdict holds.
    pub splitting_identities: Option<bool>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductVerdict {
    /// `(S ×! T)_! Gr ϖ = 𝓛₀ ×! 𝓛₁^opp` at the product point with `τ = a_T/a_S`.
    pub product_forward: Check,
    /// `S^!𝓛₀ ⊂ ker DS + (ker DT)^ϖ` and `T^!𝓛₁ ⊂ ker DT + (ker DS)^{−ϖ}`.
    pub inclusions: bool,
    pub orthogonal: bool,
    pub rank: bool,
    pub bfield: bool,
    /// Whether the three conditions agree; `None` when the product condition fails.
    pub equivalent: Option<bool>,
    pub note: Option<String>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberVerdict {
    pub definition: DefinitionVerdict,
    pub bfield: BFieldVerdict,
    pub product: ProductVerdict,
    /// The three verdicts coincide.
    pub agree: bool,
}

impl FiberVerdict {
    pub fn holds(&self) -> bool {
        self.definition.holds
    }
}

fn show(v: &[Scalar]) -> String {
    show_point(v)
}

fn first_missing(a: &Subspace<Scalar>, b: &Subspace<Scalar>) -> Option<Vec<Scalar>> {
    a.basis_vectors().into_iter().find(|v| !b.contains(v))
}

fn mismatch(
    lhs: &LagrangianSubspace<Scalar>,
    rhs: &LagrangianSubspace<Scalar>,
    names: (&str, &str),
) -> Check {
    if lhs == rhs {
        return Check::pass();
    }
    if let Some(v) = first_missing(lhs.space(), rhs.space()) {
        return Check::fail(format!("{} ∈ {} but not in {}", show(&v), names.0, names.1));
    }
    let v = first_missing(rhs.space(), lhs.space()).expect("distinct subspaces");
    Check::fail(format!("{} ∈ {} but not in {}", show(&v), names.1, names.0))
}

struct Kernels {
    ks: Subspace<Scalar>,
    kt: Subspace<Scalar>,
    triple: Subspace<Scalar>,
}

impl FiberInstance {
    pub fn new(
        apex: FiberModel,
        form: Matrix<Scalar>,
        s: (Matrix<Scalar>, Scalar),
        t: (Matrix<Scalar>, Scalar),
        l0: LagrangianSubspace<Scalar>,
        l1: LagrangianSubspace<Scalar>,
    ) -> Result<Self, DualPairError> {
        let d = apex.d_dim();
        if form.rows() != d || form.cols() != d || !form.is_skew() {
            return Err(DualPairError::Shape(format!(
                "ϖ must be a skew {d}x{d} matrix"
            )));
        }
        for (name, (m, a), leg) in [("S", &s, &l0), ("T", &t, &l1)] {
            let lm = leg.model();
            if lm.mode != apex.mode {
                return Err(DualPairError::Shape(format!(
                    "{name}: leg mode differs from apex mode"
                )));
            }
            if m.rows() != lm.d_dim() || m.cols() != d {
                return Err(DualPairError::Shape(format!(
                    "D{name} must be {}x{d}",
                    lm.d_dim()
                )));
            }
            if a.is_zero() || (apex.mode == Mode::Dirac && !a.is_one()) {
                return Err(DualPairError::Shape(format!(
                    "{name}: invalid line bundle factor"
                )));
            }
            if m.rank() != lm.d_dim() {
                return Err(DualPairError::Shape(format!("D{name} is not surjective")));
            }
        }
        Ok(FiberInstance {
            apex,
            form,
            s,
            t,
            l0,
            l1,
        })
    }

    pub fn expected_rank(&self) -> i64 {
        self.apex.d_dim() as i64 - self.l0.model().d_dim() as i64 - self.l1.model().d_dim() as i64
    }

    fn kernels(&self) -> Kernels {
        let ks = kernel(&self.s.0);
        let kt = kernel(&self.t.0);
        let triple = ks
            .intersect(&kt)
            .expect("ambient")
            .intersect(&kernel(&self.form))
            .expect("ambient");
        Kernels { ks, kt, triple }
    }

    fn graph(&self) -> LagrangianSubspace<Scalar> {
        graph_of_form(&self.apex, &self.form).expect("validated form")
    }

    fn pairing(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        crate::omni_fiber::dot(u, &self.form.mul_vec(v))
    }

    fn orthogonality(&self, k: &Kernels) -> Check {
        for u in k.ks.basis_vectors() {
            for v in k.kt.basis_vectors() {
                let c = self.pairing(&u, &v);
                if !c.is_zero() {
                    return Check::fail(format!(
                        "ϖ(u, v) = {c} for u = {} ∈ ker DS, v = {} ∈ ker DT",
                        show(&u),
                        show(&v)
                    ));
                }
            }
        }
        Check::pass()
    }

    fn rank(&self, k: &Kernels) -> RankCheck {
        let expected = self.expected_rank();
        let found = k.triple.dim();
        RankCheck {
            holds: expected == found as i64,
            expected,
            found,
        }
    }

    /// `{(δ, 0) : δ ∈ K}` inside `𝔻`.
    fn d_embed(&self, k: &Subspace<Scalar>) -> Subspace<Scalar> {
        let z = vec![Scalar::zero(); self.apex.d_dim()];
        let rows: Vec<Vec<Scalar>> = k
            .basis_vectors()
            .iter()
            .map(|v| self.apex.join(v, &z))
            .collect();
        Subspace::span(self.apex.ambient(), &rows).expect("lengths")
    }

    /// `K^{cϖ} = {(δ, c ϖ♭δ) : δ ∈ K}`.
    fn sheared(&self, k: &Subspace<Scalar>, c: &Scalar) -> Subspace<Scalar> {
        let rows: Vec<Vec<Scalar>> = k
            .basis_vectors()
            .iter()
            .map(|v| {
                let a: Vec<Scalar> = flat(&self.form, v).iter().map(|x| x.mul_f(c)).collect();
                self.apex.join(v, &a)
            })
            .collect();
        Subspace::span(self.apex.ambient(), &rows).expect("lengths")
    }

    fn kernel_identity(&self, k: &Kernels) -> bool {
        let one = Scalar::one();
        let t = self.d_embed(&k.triple);
        let a = self
            .d_embed(&k.ks)
            .intersect(&self.sheared(&k.kt, &one))
            .expect("ambient");
        let b = self
            .sheared(&k.ks, &one)
            .intersect(&self.d_embed(&k.kt))
            .expect("ambient");
        t == a && a == b
    }

    fn annihilator_identity(&self, k: &Kernels) -> bool {
        let both = k.ks.intersect(&k.kt).expect("ambient");
        let img: Vec<Vec<Scalar>> = both
            .basis_vectors()
            .iter()
            .map(|v| flat(&self.form, v))
            .collect();
        let lhs = Subspace::span(self.apex.d_dim(), &img).expect("lengths");
        lhs == k.ks.sum(&k.kt).expect("ambient").annihilator()
    }

    fn is_jacobi_leg(l: &LagrangianSubspace<Scalar>) -> bool {
        l.space()
            .intersect(&l.model().d_space())
            .expect("ambient")
            .is_zero()
    }

    fn pushed(
        &self,
    ) -> Result<(LagrangianSubspace<Scalar>, LagrangianSubspace<Scalar>), DualPairError> {
        let g = self.graph();
        let ps = forward(&g, &self.s.0, &self.s.1, self.l0.model())?;
        let pt = forward(&g, &self.t.0, &self.t.1, self.l1.model())?;
        Ok((ps, pt))
    }

    pub fn verify_definition(&self) -> Result<DefinitionVerdict, DualPairError> {
        let k = self.kernels();
        let orthogonal = self.orthogonality(&k);
        let rank = self.rank(&k);
        let (ps, pt) = self.pushed()?;
        let forward_s = mismatch(&ps, &self.l0, ("S_!Gr ϖ", "𝓛₀"));
        let forward_t = mismatch(&pt, &opposite(&self.l1), ("T_!Gr ϖ", "𝓛₁^opp"));
        let kernel_identity = self.kernel_identity(&k);
        let annihilator_identity =
            (orthogonal.holds && rank.holds).then(|| self.annihilator_identity(&k));
        let holds = orthogonal.holds && rank.holds && forward_s.holds && forward_t.holds;
        let full_contact = (holds
            && rank.expected == 0
            && Self::is_jacobi_leg(&self.l0)
            && Self::is_jacobi_leg(&self.l1))
        .then(|| !self.form.det().is_zero());
        Ok(DefinitionVerdict {
            orthogonal,
            rank,
            forward_s,
            forward_t,
            kernel_identity,
            annihilator_identity,
            full_contact,
            holds,
        })
    }

    fn pulled(
        &self,
    ) -> Result<(LagrangianSubspace<Scalar>, LagrangianSubspace<Scalar>), DualPairError> {
        Ok((
            backward(&self.l0, &self.s.0, &self.s.1)?,
            backward(&self.l1, &self.t.0, &self.t.1)?,
        ))
    }

    pub fn verify_bfield(&self) -> Result<BFieldVerdict, DualPairError> {
        let k = self.kernels();
        let (sl0, tl1) = self.pulled()?;
        let bfield = mismatch(&sl0, &gauge(&tl1, &self.form)?, ("S^!𝓛₀", "(T^!𝓛₁)^ϖ"));
        let rank = self.rank(&k);
        let holds = bfield.holds && rank.holds;
        let splitting_identities = holds.then(|| {
            let one = Scalar::one();
            let a = self
                .d_embed(&k.ks)
                .sum(&self.sheared(&k.kt, &one))
                .expect("ambient");
            let b = self
                .d_embed(&k.kt)
                .sum(&self.sheared(&k.ks, &one))
                .expect("ambient");
            let tl1opp = backward(&opposite(&self.l1), &self.t.0, &self.t.1).expect("validated");
            *sl0.space() == a && *tl1opp.space() == b
        });
        Ok(BFieldVerdict {
            bfield,
            rank,
            splitting_identities,
            holds,
        })
    }

    /// `(DΦ, a_S, τ)` for `Φ = S ×! T`, from `DP₀·DΦ = DS`, `DP₁·DΦ = DT`.
    fn product_map(&self) -> (FiberModel, Matrix<Scalar>, Scalar) {
        let tau = match self.apex.mode {
            Mode::Jacobi => self.t.1.div_f(&self.s.1),
            Mode::Dirac => Scalar::one(),
        };
        let (pm, [(p0, _), (p1, _)]) =
            product_fiber_maps(self.l0.model().n, self.l1.model().n, self.apex.mode, &tau);
        let inv = p0
            .vstack(&p1)
            .inverse()
            .expect("product projections are jointly invertible");
        (pm, inv.mul(&self.s.0.vstack(&self.t.0)), tau)
    }

    pub fn verify_product(&self) -> Result<ProductVerdict, DualPairError> {
        let k = self.kernels();
        let (pm, dphi, tau) = self.product_map();
        let lhs = forward(&self.graph(), &dphi, &self.s.1, &pm)?;
        let rhs = product_fiber(&self.l0, &opposite(&self.l1), &tau)?;
        let product_forward = mismatch(&lhs, &rhs, ("(S×!T)_!Gr ϖ", "𝓛₀×!𝓛₁^opp"));
        let (sl0, tl1) = self.pulled()?;
        let one = Scalar::one();
        let inc0 = self
            .d_embed(&k.ks)
            .sum(&self.sheared(&k.kt, &one))
            .expect("ambient");
        let inc1 = self
            .d_embed(&k.kt)
            .sum(&self.sheared(&k.ks, &one.neg_f()))
            .expect("ambient");
        let inclusions = sl0.space().is_subspace_of(&inc0) && tl1.space().is_subspace_of(&inc1);
        let orthogonal = self.orthogonality(&k).holds;
        let rank = self.rank(&k).holds;
        let bfield = sl0 == gauge(&tl1, &self.form)?;
        let (equivalent, note) = if product_forward.holds {
            (Some(orthogonal == rank && rank == bfield), None)
        } else {
            (None, Some("precondition unmet".to_string()))
        };
        Ok(ProductVerdict {
            holds: product_forward.holds && orthogonal,
            product_forward,
            inclusions,
            orthogonal,
            rank,
            bfield,
            equivalent,
            note,
        })
    }

    pub fn verify(&self) -> Result<FiberVerdict, DualPairError> {
        let definition = self.verify_definition()?;
        let bfield = self.verify_bfield()?;
        let product = self.verify_product()?;
        let agree = definition.holds == bfield.holds && bfield.holds == product.holds;
        Ok(FiberVerdict {
            definition,
            bfield,
            product,
            agree,
        })
    }
}
