//! Transforms of whole structures, certified by sampling the rank conditions
//! that make the pointwise result a smooth subbundle.

use serde::Serialize;

use crate::exact_scalars::{PolyFn, Scalar, ScalarError};
use crate::linalg::{kernel, Matrix, SampledRank, Subspace};
use crate::omni_fiber::{backward, forward, star_sum, FiberModel, LagrangianSubspace, Mode};

use super::{InvolutivityReport, LBMorphism, StructureError, StructureSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub operation: String,
    /// The subspace whose rank was sampled.
    pub quantity: String,
    pub sampled: SampledRank,
    pub constant_rank: Option<usize>,
    /// Backward: the morphism is a Dirac-Jacobi transversal at every sample.
    pub transversal: Option<bool>,
    /// The symbolic result evaluated at each sample equals the pointwise transform.
    pub agrees_pointwise: Option<bool>,
    pub involutive: Option<InvolutivityReport>,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct FamilyResult {
    pub report: FamilyReport,
    pub spec: Option<StructureSpec>,
}

fn rank_jump(samples: &SampledRank) -> Option<(Vec<Scalar>, Vec<Scalar>, (usize, usize))> {
    let (i, j) = samples.jump()?;
    Some((
        samples.points[i].clone(),
        samples.points[j].clone(),
        (samples.ranks[i], samples.ranks[j]),
    ))
}

fn skip_pole<T>(r: Result<T, StructureError>) -> Result<Option<T>, StructureError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(StructureError::Scalar(ScalarError::PoleAtPoint)) | Err(StructureError::ZeroFactor) => {
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn zero_d(model: &FiberModel) -> Vec<Scalar> {
    vec![Scalar::zero(); model.d_dim()]
}

/// `dim(𝓛′ ∩ (0 ⊕ ker DΦᵀ))`, the rank of `ker(DΦ)* ∩ φ*𝓛′` at one point.
fn backward_defect(l: &LagrangianSubspace<Scalar>, dphi: &Matrix<Scalar>) -> usize {
    let m = *l.model();
    let vs: Vec<Vec<Scalar>> = kernel(&dphi.transpose())
        .basis_vectors()
        .into_iter()
        .map(|a| m.join(&zero_d(&m), &a))
        .collect();
    let k = Subspace::span(m.ambient(), &vs).expect("lengths");
    l.space().intersect(&k).expect("same ambient").dim()
}

/// `dim(𝓛 ∩ (ker DΦ ⊕ 0))`.
fn forward_defect(l: &LagrangianSubspace<Scalar>, dphi: &Matrix<Scalar>) -> usize {
    let m = *l.model();
    let vs: Vec<Vec<Scalar>> = kernel(dphi)
        .basis_vectors()
        .into_iter()
        .map(|v| m.join(&v, &zero_d(&m)))
        .collect();
    let k = Subspace::span(m.ambient(), &vs).expect("lengths");
    l.space().intersect(&k).expect("same ambient").dim()
}

/// `im DΦ + pr_D𝓛′ = D′`.
pub fn is_transversal_at(l: &LagrangianSubspace<Scalar>, dphi: &Matrix<Scalar>) -> bool {
    let d = l.model().d_dim();
    let im = Subspace::span(d, &dphi.transpose().row_vecs()).expect("lengths");
    im.sum(&l.pr_d()).expect("same ambient").is_full()
}

/// `Φ^!𝓛′` over the field of rational functions on the source chart.
pub fn backward_generic(
    target: &StructureSpec,
    phi: &LBMorphism,
) -> Result<LagrangianSubspace<PolyFn>, StructureError> {
    if target.chart() != phi.target() {
        return Err(StructureError::ChartMismatch);
    }
    let rows = target
        .frame_rows()
        .iter()
        .map(|r| r.iter().map(|f| f.substitute(phi.phi())).collect())
        .collect::<Result<Vec<Vec<PolyFn>>, _>>()?;
    let lt = LagrangianSubspace::span(target.model(), &rows)?;
    Ok(backward(&lt, &phi.dphi(), phi.factor())?)
}

/// `Φ^!𝓛′` on the source chart, when `ker(DΦ)* ∩ φ*𝓛′` has constant sampled rank.
pub fn backward_family(
    target: &StructureSpec,
    phi: &LBMorphism,
    points: &[Vec<Scalar>],
) -> Result<FamilyResult, StructureError> {
    if target.chart() != phi.target() {
        return Err(StructureError::ChartMismatch);
    }
    let mut sampled = SampledRank {
        ranks: Vec::new(),
        points: Vec::new(),
    };
    let mut pointwise = Vec::new();
    let mut transversal = true;
    for p in points {
        let Some((dphi, a)) = skip_pole(phi.at(p))? else {
            continue;
        };
        let Some(l) = skip_pole(phi.image(p).and_then(|y| target.fiber_at(&y)))? else {
            continue;
        };
        sampled.ranks.push(backward_defect(&l, &dphi));
        sampled.points.push(p.clone());
        transversal &= is_transversal_at(&l, &dphi);
        pointwise.push(backward(&l, &dphi, &a)?);
    }
    if let Some((first, second, ranks)) = rank_jump(&sampled) {
        return Err(StructureError::NonCleanIntersection {
            first,
            second,
            ranks,
        });
    }
    let l = backward_generic(target, phi)?;
    let spec = StructureSpec::from_fiber(phi.source().clone(), &l)?;
    let agrees = agreement(&spec, &sampled.points, &pointwise);
    let note = if transversal {
        "transversal at every sample: kernel term vanishes".to_string()
    } else {
        format!("constant rank {}", sampled.label())
    };
    Ok(FamilyResult {
        report: FamilyReport {
            operation: "backward".into(),
            quantity: "ker(DΦ)* ∩ φ*𝓛′".into(),
            constant_rank: sampled.constant(),
            sampled,
            transversal: Some(transversal),
            agrees_pointwise: Some(agrees),
            involutive: None,
            note,
        },
        spec: Some(spec),
    })
}

fn agreement(
    spec: &StructureSpec,
    points: &[Vec<Scalar>],
    expected: &[LagrangianSubspace<Scalar>],
) -> bool {
    points
        .iter()
        .zip(expected)
        .all(|(p, e)| spec.fiber_at(p).is_ok_and(|f| f == *e))
}

/// `Φ_!𝓛` on the target chart, when `𝓛 ∩ ker DΦ` has constant sampled rank.
///
/// A symbolic result needs a section of `φ`, so it is produced for coordinate
/// projections only; the report says whether it matches the pointwise push at
/// every sample, which fails when the pushed fibers depend on the fiber coordinates.
pub fn forward_family(
    source: &StructureSpec,
    phi: &LBMorphism,
    points: &[Vec<Scalar>],
) -> Result<FamilyResult, StructureError> {
    if source.chart() != phi.source() {
        return Err(StructureError::ChartMismatch);
    }
    let tm = phi.target().model();
    let mut sampled = SampledRank {
        ranks: Vec::new(),
        points: Vec::new(),
    };
    let mut pushed = Vec::new();
    let mut images = Vec::new();
    for p in points {
        let Some((dphi, a)) = skip_pole(phi.at(p))? else {
            continue;
        };
        let Some(l) = skip_pole(source.fiber_at(p))? else {
            continue;
        };
        sampled.ranks.push(forward_defect(&l, &dphi));
        sampled.points.push(p.clone());
        pushed.push(forward(&l, &dphi, &a, &tm)?);
        images.push(phi.image(p)?);
    }
    if let Some((first, second, ranks)) = rank_jump(&sampled) {
        return Err(StructureError::NonCleanIntersection {
            first,
            second,
            ranks,
        });
    }
    let mut report = FamilyReport {
        operation: "forward".into(),
        quantity: "𝓛 ∩ ker DΦ".into(),
        constant_rank: sampled.constant(),
        sampled,
        transversal: None,
        agrees_pointwise: None,
        involutive: None,
        note: String::new(),
    };
    let anchor = report.sampled.points.first().cloned().unwrap_or_default();
    let Some(sigma) = phi.section(&anchor) else {
        report.note = "no section of the base map in this chart; pointwise data only".into();
        return Ok(FamilyResult { report, spec: None });
    };
    let sub = |f: &PolyFn| f.substitute(&sigma);
    let rows = source
        .frame_rows()
        .iter()
        .map(|r| r.iter().map(sub).collect())
        .collect::<Result<Vec<Vec<PolyFn>>, _>>()?;
    let ls = LagrangianSubspace::span(source.model(), &rows)?;
    let dphi = phi.dphi().substitute(&sigma)?;
    let a = sub(phi.factor())?;
    let l = forward(&ls, &dphi, &a, &tm)?;
    let spec = StructureSpec::from_fiber(phi.target().clone(), &l)?;
    let agrees = agreement(&spec, &images, &pushed);
    report.agrees_pointwise = Some(agrees);
    report.note = if agrees {
        format!("constant rank {}", report.sampled.label())
    } else {
        "pushed fibers depend on the point of the fiber".into()
    };
    Ok(FamilyResult {
        report,
        spec: Some(spec),
    })
}

/// `𝓛₁ ⋆ 𝓛₂`, when `pr_D𝓛₁ + pr_D𝓛₂` has constant sampled rank; the result's
/// involutivity is re-checked through its Courant tensor.
pub fn star_family(
    s1: &StructureSpec,
    s2: &StructureSpec,
    points: &[Vec<Scalar>],
) -> Result<FamilyResult, StructureError> {
    if s1.chart() != s2.chart() {
        return Err(StructureError::ChartMismatch);
    }
    let mut sampled = SampledRank {
        ranks: Vec::new(),
        points: Vec::new(),
    };
    let mut pointwise = Vec::new();
    for p in points {
        let (Some(a), Some(b)) = (skip_pole(s1.fiber_at(p))?, skip_pole(s2.fiber_at(p))?) else {
            continue;
        };
        sampled.ranks.push(a.pr_d().sum(&b.pr_d())?.dim());
        sampled.points.push(p.clone());
        pointwise.push(star_sum(&a, &b)?);
    }
    if let Some((first, second, ranks)) = rank_jump(&sampled) {
        return Err(StructureError::NonConstantRank {
            first,
            second,
            ranks,
        });
    }
    let l = star_sum(&s1.generic_fiber(), &s2.generic_fiber())?;
    let spec = StructureSpec::from_fiber(s1.chart().clone(), &l)?;
    let agrees = agreement(&spec, &sampled.points, &pointwise);
    let inv = spec.check_involutive_by_courant()?;
    Ok(FamilyResult {
        report: FamilyReport {
            operation: "star".into(),
            quantity: "pr_D𝓛₁ + pr_D𝓛₂".into(),
            constant_rank: sampled.constant(),
            note: format!("constant rank {}", sampled.label()),
            sampled,
            transversal: None,
            agrees_pointwise: Some(agrees),
            involutive: Some(inv),
        },
        spec: Some(spec),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafType {
    Precontact,
    Lcps,
    /// Dirac mode has a single leaf type.
    Presymplectic,
}

/// Fiber-level leaf data at a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafData {
    /// `pr_D𝓛 ∋ 𝟙`: the leaf form `β(u,v) = α_u(v)` on the basis of `pr_D𝓛`.
    Precontact {
        basis: Vec<Vec<Scalar>>,
        form: Matrix<Scalar>,
    },
    /// `𝟙 ∉ pr_D𝓛`: tangent directions `ξₖ`, the connection values `γ(ξₖ)` read off
    /// from the lifts `ξₖ + γ(ξₖ)𝟙 ∈ pr_D𝓛`, and `ω(ξₖ, ξₗ)`.
    Lcps {
        tangent: Vec<Vec<Scalar>>,
        gamma: Vec<Scalar>,
        omega: Matrix<Scalar>,
    },
    /// Dirac mode: `pr_D𝓛 ⊂ TM` and its presymplectic form.
    Presymplectic {
        basis: Vec<Vec<Scalar>>,
        form: Matrix<Scalar>,
    },
}

impl LeafData {
    pub fn leaf_type(&self) -> LeafType {
        match self {
            LeafData::Precontact { .. } => LeafType::Precontact,
            LeafData::Lcps { .. } => LeafType::Lcps,
            LeafData::Presymplectic { .. } => LeafType::Presymplectic,
        }
    }
}

pub fn leaf_type(l: &LagrangianSubspace<Scalar>) -> LeafType {
    match l.model().mode {
        Mode::Dirac => LeafType::Presymplectic,
        Mode::Jacobi if l.contains_one() => LeafType::Precontact,
        Mode::Jacobi => LeafType::Lcps,
    }
}

pub fn classify_point(s: &StructureSpec, point: &[Scalar]) -> Result<LeafData, StructureError> {
    classify_fiber(&s.fiber_at(point)?)
}

pub fn classify_fiber(l: &LagrangianSubspace<Scalar>) -> Result<LeafData, StructureError> {
    let basis = l.pr_d().basis_vectors();
    let form = l
        .leaf_form(&basis)
        .map_err(|e| StructureError::Inconsistent(e.to_string()))?;
    if !form.is_skew() {
        return Err(StructureError::Inconsistent("leaf form is not skew".into()));
    }
    Ok(match leaf_type(l) {
        LeafType::Presymplectic => LeafData::Presymplectic { basis, form },
        LeafType::Precontact => LeafData::Precontact { basis, form },
        LeafType::Lcps => {
            let n = l.model().n;
            let tangent = basis.iter().map(|v| v[..n].to_vec()).collect();
            let gamma = basis.iter().map(|v| v[n].clone()).collect();
            LeafData::Lcps {
                tangent,
                gamma,
                omega: form,
            }
        }
    })
}
