//! The linear model of the self-dual pair at a point: apex fiber `DₓL ⊕ 𝓛ₓ`.

use serde::Serialize;

use crate::exact_scalars::Scalar;
use crate::linalg::Matrix;
use crate::omni_fiber::{
    backward, dot, gauge, is_lagrangian, FiberModel, LagrangianSubspace, Mode,
};

use super::{DualPairError, FiberInstance, FiberVerdict};

/// Apex coordinates are `(δ_∂, e, δ_𝟙)` in jacobi mode and `(δ, e)` in dirac
/// mode, where `e` are coordinates on `𝓛ₓ` in the basis `basis`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfDualLinearModel {
    pub fiber: LagrangianSubspace<Scalar>,
    pub basis: Vec<Vec<Scalar>>,
    pub instance: FiberInstance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfDualReport {
    pub n: usize,
    pub mode: Mode,
    /// `ker DS ∩ ker ϖ♭ ∩ ker DT = 0`.
    pub kernel_trivial: bool,
    /// `S^!𝓛ₓ = (T^!𝓛ₓ)^ϖ`.
    pub bfield: bool,
    /// Both conditions of the B-field characterization with `dim apex = 2n + 1`.
    pub characterization: bool,
    pub nondegenerate: bool,
    /// `𝓛ₓ ∩ Dₓ = 0`, so `𝓛ₓ` is the graph of a biderivation.
    pub jacobi_fiber: bool,
    pub full_contact: Option<bool>,
    pub verdict: FiberVerdict,
    pub holds: bool,
}

struct Layout {
    n: usize,
    d: usize,
    mode: Mode,
}

impl Layout {
    /// Apex index of `δ_a`.
    fn delta(&self, a: usize) -> usize {
        match self.mode {
            Mode::Jacobi if a == self.n => self.n + self.d,
            _ => a,
        }
    }

    /// Apex index of `e_k`.
    fn e(&self, k: usize) -> usize {
        self.n + k
    }

    fn split(&self, v: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
        let delta = (0..self.d).map(|a| v[self.delta(a)].clone()).collect();
        let e = (0..self.d).map(|k| v[self.e(k)].clone()).collect();
        (delta, e)
    }
}

fn combine(basis: &[Vec<Scalar>], e: &[Scalar], len: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); len];
    for (b, c) in basis.iter().zip(e) {
        for (x, y) in out.iter_mut().zip(b) {
            *x += &(c * y);
        }
    }
    out
}

pub fn self_dual_linear_model(
    l: &LagrangianSubspace<Scalar>,
) -> Result<(SelfDualLinearModel, SelfDualReport), DualPairError> {
    let m = *l.model();
    if !is_lagrangian(&m, l.space()) {
        return Err(DualPairError::Shape("fiber is not Lagrangian".into()));
    }
    let (n, d) = (m.n, m.d_dim());
    let lay = Layout { n, d, mode: m.mode };
    let apex = FiberModel::new(
        match m.mode {
            Mode::Jacobi => 2 * n + 1,
            Mode::Dirac => 2 * n,
        },
        m.mode,
    );
    let big = apex.d_dim();
    let basis = l.space().basis_vectors();

    let mut ds = Matrix::zeros(d, big);
    for a in 0..d {
        ds.set(a, lay.delta(a), Scalar::one());
    }
    let mut dt = ds.clone();
    for (k, b) in basis.iter().enumerate() {
        let (pd, _) = m.split(b);
        for a in 0..d {
            dt.set(a, lay.e(k), pd[a].clone());
        }
    }

    let half = Scalar::from_ratio(1, 2);
    let value = |u: &[Scalar], v: &[Scalar]| {
        let (d1, e1) = lay.split(u);
        let (d2, e2) = lay.split(v);
        let x1 = combine(&basis, &e1, m.ambient());
        let x2 = combine(&basis, &e2, m.ambient());
        let (pd1, pj1) = m.split(&x1);
        let (pd2, pj2) = m.split(&x2);
        let arg1: Vec<Scalar> = d1.iter().zip(pd1).map(|(a, b)| a + &(&half * b)).collect();
        let arg2: Vec<Scalar> = d2.iter().zip(pd2).map(|(a, b)| a + &(&half * b)).collect();
        &dot(pj2, &arg1) - &dot(pj1, &arg2)
    };
    let unit = |i: usize| crate::linalg::unit::<Scalar>(big, i);
    let form = Matrix::from_fn(big, big, |i, j| value(&unit(i), &unit(j)));

    let one = Scalar::one();
    let inst = FiberInstance::new(
        apex,
        form,
        (ds, one.clone()),
        (dt, one.clone()),
        l.clone(),
        l.clone(),
    )?;
    let verdict = inst.verify()?;
    let kernel_trivial = verdict.definition.rank.found == 0;
    let sl = backward(l, &inst.s.0, &one)?;
    let tl = backward(l, &inst.t.0, &one)?;
    let bfield = sl == gauge(&tl, &inst.form)?;
    let characterization = verdict.bfield.holds && verdict.bfield.rank.expected == 0;
    let nondegenerate = !inst.form.det().is_zero();
    let jacobi_fiber = l
        .space()
        .intersect(&m.d_space())
        .expect("ambient")
        .is_zero();
    let full_contact = verdict.definition.full_contact;
    let holds = kernel_trivial
        && bfield
        && characterization
        && verdict.agree
        && (!jacobi_fiber || (nondegenerate && full_contact == Some(true)));
    let report = SelfDualReport {
        n,
        mode: m.mode,
        kernel_trivial,
        bfield,
        characterization,
        nondegenerate,
        jacobi_fiber,
        full_contact,
        verdict,
        holds,
    };
    Ok((
        SelfDualLinearModel {
            fiber: l.clone(),
            basis,
            instance: inst,
        },
        report,
    ))
}
