//! Characteristic leaves of a weak dual pair and the leaf correspondence on its legs.

use serde::Serialize;

use crate::der_calculus::Chart;
use crate::exact_scalars::{Field, PolyFn, Scalar};
use crate::linalg::{kernel, Matrix, Sampler, Subspace};
use crate::omni_fiber::{backward, dot, gauge, pullback_form, LagrangianSubspace, Mode};
use crate::structures::{backward_generic, leaf_type, LBMorphism, LeafType};

use super::{DualPairError, DualPairInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafPointRecord {
    pub point: Vec<Scalar>,
    /// Basis of `ker DS + ker DT`.
    pub distribution: Vec<Vec<Scalar>>,
    /// `dim σ(ker DS + ker DT)`, the dimension of the characteristic leaf.
    pub leaf_dim: usize,
    pub leg_types: [LeafType; 2],
    pub types_match: bool,
    /// `ϖ = a_S⁻¹ β₀(DS·, DS·) − a_T⁻¹ β₁(DT·, DT·)` on the distribution, `βᵢ` the leg leaf forms.
    pub form_relation: bool,
    /// Both legs Jacobi: a complement of the leaf inside `ker θ`, where `θ∘σ = ι_𝟙ϖ`.
    pub transversal_in_ker_theta: Option<bool>,
    /// Slice supplied: `(S∘J)^!𝓛₀ = ((T∘J)^!𝓛₁)^{J*ϖ}` at the slice point.
    pub transverse_relation: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafSymbolic {
    pub leaf_type: LeafType,
    pub relation: String,
    pub holds: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafReport {
    pub points: Vec<LeafPointRecord>,
    pub symbolic: Option<LeafSymbolic>,
    /// `true` when some point has mismatched leg types: the instance cannot be a weak dual pair.
    pub alarm: bool,
    pub holds: bool,
}

/// Optional symbolic data: a leaf parametrization `I : N → M` and a slice `J : Q → M`
/// through the sample points, transverse to the leaves.
#[derive(Debug, Clone, Default)]
pub struct LeafTask {
    pub leaf: Option<LBMorphism>,
    pub slice: Option<LBMorphism>,
}

fn leaf_value(
    l: &LagrangianSubspace<Scalar>,
    u: &[Scalar],
    v: &[Scalar],
) -> Result<Scalar, DualPairError> {
    Ok(dot(&l.lift(u)?, v))
}

fn point_record(
    inst: &DualPairInstance,
    p: &[Scalar],
    slice: Option<(&LBMorphism, Vec<Scalar>)>,
) -> Result<LeafPointRecord, DualPairError> {
    let f = inst.fiber(p)?;
    let ks = kernel(&f.s.0);
    let kt = kernel(&f.t.0);
    let e = ks.sum(&kt)?;
    let basis = e.basis_vectors();
    let n = inst.apex().dim();
    let tangent: Vec<Vec<Scalar>> = basis.iter().map(|v| v[..n].to_vec()).collect();
    let te = Subspace::span(n, &tangent)?;
    let leg_types = [leaf_type(&f.l0), leaf_type(&f.l1)];
    let types_match = leg_types[0] == leg_types[1];

    let mut form_relation = true;
    'outer: for u in &basis {
        for v in &basis {
            let (su, sv) = (f.s.0.mul_vec(u), f.s.0.mul_vec(v));
            let (tu, tv) = (f.t.0.mul_vec(u), f.t.0.mul_vec(v));
            let (Ok(b0), Ok(b1)) = (leaf_value(&f.l0, &su, &sv), leaf_value(&f.l1, &tu, &tv))
            else {
                form_relation = false;
                break 'outer;
            };
            let rhs = &(&b0 / &f.s.1) - &(&b1 / &f.t.1);
            if dot(u, &f.form.mul_vec(v)) != rhs {
                form_relation = false;
                break 'outer;
            }
        }
    }

    let jacobi = |l: &LagrangianSubspace<Scalar>| {
        l.space()
            .intersect(&l.model().d_space())
            .expect("ambient")
            .is_zero()
    };
    let transversal_in_ker_theta = (inst.mode() == Mode::Jacobi && jacobi(&f.l0) && jacobi(&f.l1))
        .then(|| {
            let theta = Matrix::from_fn(1, n, |_, i| f.form.get(n, i).clone());
            let k = kernel(&theta);
            k.sum(&te).expect("ambient").is_full()
        });

    let transverse_relation = match slice {
        None => None,
        Some((j, q)) => Some(transverse_relation(inst, j, &q)?),
    };

    Ok(LeafPointRecord {
        point: p.to_vec(),
        distribution: basis,
        leaf_dim: te.dim(),
        leg_types,
        types_match,
        form_relation,
        transversal_in_ker_theta,
        transverse_relation,
    })
}

fn transverse_relation(
    inst: &DualPairInstance,
    j: &LBMorphism,
    q: &[Scalar],
) -> Result<bool, DualPairError> {
    let x = j.image(q)?;
    let (dj, aj) = j.at(q)?;
    let f = inst.fiber(&x)?;
    let w = pullback_form(&f.form, &dj, &aj);
    let lhs = backward(&backward(&f.l0, &f.s.0, &f.s.1)?, &dj, &aj)?;
    let rhs = gauge(&backward(&backward(&f.l1, &f.t.0, &f.t.1)?, &dj, &aj)?, &w)?;
    Ok(lhs == rhs)
}

fn entry_witness(
    chart: &Chart,
    m: &Matrix<PolyFn>,
    other: &Matrix<PolyFn>,
    label: &str,
) -> Option<String> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m.get(i, j) != other.get(i, j) {
                return Some(format!(
                    "{label} differs at ({i}, {j}): {} vs {}",
                    chart.display(m.get(i, j)),
                    chart.display(other.get(i, j))
                ));
            }
        }
    }
    None
}

/// Rows `eᵢ + γᵢ𝟙` spanning `pr_D 𝓛`, when `𝟙 ∉ pr_D 𝓛` and `pr_D 𝓛` projects onto the tangent space.
fn lcps_rows(l: &LagrangianSubspace<PolyFn>, k: usize) -> Option<(Vec<Vec<PolyFn>>, Vec<PolyFn>)> {
    let pd = l.pr_d();
    if pd.dim() != k || pd.pivots() != (0..k).collect::<Vec<_>>() {
        return None;
    }
    let rows = pd.basis_vectors();
    let gamma = rows.iter().map(|r| r[k].clone()).collect();
    Some((rows, gamma))
}

fn symbolic(inst: &DualPairInstance, leaf: &LBMorphism) -> Result<LeafSymbolic, DualPairError> {
    if leaf.target() != inst.apex() {
        return Err(DualPairError::Shape(
            "the leaf parametrization must land in the apex".into(),
        ));
    }
    let chart = leaf.source();
    let k = chart.dim();
    let d = chart.model().d_dim();
    let s = inst.maps()[0].after(leaf)?;
    let t = inst.maps()[1].after(leaf)?;
    let f0 = backward_generic(&inst.legs()[0], &s)?;
    let f1 = backward_generic(&inst.legs()[1].opposite(), &t)?;
    let w = leaf.pull_form(inst.form())?.to_matrix();
    let ty = match inst.mode() {
        Mode::Dirac => LeafType::Presymplectic,
        Mode::Jacobi if f0.contains_one() => LeafType::Precontact,
        Mode::Jacobi => LeafType::Lcps,
    };
    let fail = |relation: &str, w: String| LeafSymbolic {
        leaf_type: ty,
        relation: relation.into(),
        holds: false,
        witness: Some(w),
    };
    match ty {
        LeafType::Precontact | LeafType::Presymplectic => {
            let relation = "I*ϖ = Φ₀*ϖ₀ − Φ₁*ϖ₁";
            if !f0.pr_d().is_full() || !f1.pr_d().is_full() {
                return Ok(fail(relation, "the parametrization leaves the leaf".into()));
            }
            let std: Vec<Vec<PolyFn>> = (0..d).map(|i| crate::linalg::unit(d, i)).collect();
            let b0 = f0.leaf_form(&std)?;
            let b1 = f1.leaf_form(&std)?;
            let rhs = b0.add(&b1);
            let witness = entry_witness(chart, &w, &rhs, "I*ϖ");
            Ok(LeafSymbolic {
                leaf_type: ty,
                relation: relation.into(),
                holds: witness.is_none(),
                witness,
            })
        }
        LeafType::Lcps => {
            let relation = "d_∇(I*θ) = Φ₀*ω₀ − Φ₁*ω₁";
            let (Some((rows0, g0)), Some((rows1, g1))) = (lcps_rows(&f0, k), lcps_rows(&f1, k))
            else {
                return Ok(fail(relation, "the parametrization leaves the leaf".into()));
            };
            if g0 != g1 || rows0 != rows1 {
                return Ok(fail(
                    relation,
                    "the two legs induce different connections".into(),
                ));
            }
            let om = f0.leaf_form(&rows0)?.add(&f1.leaf_form(&rows1)?);
            let eta: Vec<PolyFn> = (0..k).map(|i| w.get(k, i).clone()).collect();
            let dn = Matrix::from_fn(k, k, |i, j| {
                let a = eta[j].partial(i).add_f(&g0[i].mul_f(&eta[j]));
                let b = eta[i].partial(j).add_f(&g0[j].mul_f(&eta[i]));
                a.sub_f(&b)
            });
            let witness = entry_witness(chart, &dn, &om, "d_∇(I*θ)");
            Ok(LeafSymbolic {
                leaf_type: ty,
                relation: relation.into(),
                holds: witness.is_none(),
                witness,
            })
        }
    }
}

/// Pointwise leaf data at the apex points, plus the symbolic form relation along `task.leaf`.
///
/// Slice points for the transverse relation are drawn from `sampler`.
pub fn leaf_correspondence_report(
    inst: &DualPairInstance,
    points: &[Vec<Scalar>],
    task: &LeafTask,
    sampler: &mut Sampler,
) -> Result<LeafReport, DualPairError> {
    let mut records = Vec::with_capacity(points.len());
    for p in points {
        let slice = match &task.slice {
            None => None,
            Some(j) => {
                let q = sampler
                    .point_where(j.source().dim(), |q| {
                        j.image(q).is_ok_and(|x| inst.fiber(&x).is_ok()) && j.at(q).is_ok()
                    })
                    .ok_or(DualPairError::NoSamples)?;
                Some((j, q))
            }
        };
        records.push(point_record(inst, p, slice)?);
    }
    let symbolic = match &task.leaf {
        None => None,
        Some(leaf) => Some(symbolic(inst, leaf)?),
    };
    let alarm = records.iter().any(|r| !r.types_match);
    let holds = !alarm
        && records.iter().all(|r| {
            r.form_relation
                && r.transversal_in_ker_theta != Some(false)
                && r.transverse_relation != Some(false)
        })
        && symbolic.as_ref().is_none_or(|s| s.holds);
    Ok(LeafReport {
        points: records,
        symbolic,
        alarm,
        holds,
    })
}
