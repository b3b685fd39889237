//! Composition, transverse pullback and normal-form witnesses.

use serde::{Deserialize, Serialize};

use crate::der_calculus::{Chart, FormField};
use crate::exact_scalars::{Field, PolyFn, Scalar};
use crate::linalg::Sampler;
use crate::omni_fiber::{backward, gauge, LagrangianSubspace};
use crate::structures::{
    backward_family, eval_matrix, is_transversal_at, LBMorphism, StructureSpec,
};

use super::verify::Check;
use super::{DualPairError, DualPairInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositionSign {
    /// `ϖ₀₂ = P₁*ϖ₀₁ + P₂*ϖ₁₂`.
    #[default]
    Plus,
    /// `ϖ₀₂ = P₁*ϖ₀₁ − P₂*ϖ₁₂`.
    Minus,
}

fn fresh_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('_');
        name.push('2');
    }
    name
}

/// Weak dual pair between `M₀` and `M₂` on the fiber product `M₀₁ ×_{M₁} M₁₂`.
///
/// `T₀₁` and `S₁₂` must be coordinate projections. The apex keeps every
/// coordinate of `M₀₁` and the coordinates of `M₁₂` not read by `S₁₂`; its line
/// bundle is that of `M₀₁`, identified with `L₁₂` by `S₁₂⁻¹ ∘ T₀₁`.
pub fn compose(
    p01: &DualPairInstance,
    p12: &DualPairInstance,
    sign: CompositionSign,
) -> Result<DualPairInstance, DualPairError> {
    if p01.legs[1] != p12.legs[0] {
        return Err(DualPairError::IncompatibleMiddle);
    }
    let t01 = &p01.maps[1];
    let s12 = &p12.maps[0];
    let jt = t01.projection_indices().ok_or_else(|| {
        DualPairError::NotComposableInChart("T₀₁ is not a coordinate projection".into())
    })?;
    let ks = s12.projection_indices().ok_or_else(|| {
        DualPairError::NotComposableInChart("S₁₂ is not a coordinate projection".into())
    })?;

    let a = p01.apex.coords().to_vec();
    let b = p12.apex.coords();
    let mut names = a.clone();
    let mut slot = vec![None; b.len()];
    for (l, name) in b.iter().enumerate() {
        if ks.contains(&l) {
            continue;
        }
        slot[l] = Some(names.len());
        let n = fresh_name(&names, name);
        names.push(n);
    }
    let apex = Chart::new(names.iter(), p01.mode())?;

    let p1 = LBMorphism::new(
        apex.clone(),
        p01.apex.clone(),
        (0..a.len()).map(PolyFn::var).collect(),
        PolyFn::one(),
    )?;
    let phi2: Vec<PolyFn> = (0..b.len())
        .map(|l| match ks.iter().position(|&k| k == l) {
            Some(i) => PolyFn::var(jt[i]),
            None => PolyFn::var(slot[l].expect("free coordinate")),
        })
        .collect();
    let a_s = s12.factor().substitute(&phi2)?;
    let factor = t01.factor().div_ref(&a_s)?;
    let p2 = LBMorphism::new(apex.clone(), p12.apex.clone(), phi2, factor)?;

    let w1 = p1.pull_form(&p01.form)?;
    let w2 = p2.pull_form(&p12.form)?;
    let form = match sign {
        CompositionSign::Plus => w1.add(&w2),
        CompositionSign::Minus => w1.sub(&w2),
    };
    let s = p01.maps[0].after(&p1)?;
    let t = p12.maps[1].after(&p2)?;
    DualPairInstance::new(
        apex,
        form,
        [p01.legs[0].clone(), p12.legs[1].clone()],
        [s, t],
    )
}

/// Target coordinate `j` of a slice: `Some(var)` or the constant it is pinned to.
enum SliceEntry {
    Var(usize),
    Fixed(Scalar),
}

fn slice_entries(phi: &LBMorphism, name: &str) -> Result<Vec<SliceEntry>, DualPairError> {
    if !phi.factor().is_one() {
        return Err(DualPairError::NotComposableInChart(format!(
            "{name} must have factor 1"
        )));
    }
    let n = phi.source().dim();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for f in phi.phi() {
        if let Some(c) = f.constant_value() {
            out.push(SliceEntry::Fixed(c));
            continue;
        }
        match (0..n).find(|&k| *f == PolyFn::var(k)) {
            Some(k) if !seen[k] => {
                seen[k] = true;
                out.push(SliceEntry::Var(k));
            }
            _ => {
                return Err(DualPairError::NotComposableInChart(format!(
                    "{name} is not a coordinate slice"
                )))
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(DualPairError::NotComposableInChart(format!(
            "{name} is not a coordinate slice"
        )));
    }
    Ok(out)
}

fn check_transversal(
    leg: &StructureSpec,
    phi: &LBMorphism,
    name: &str,
    points: &[Vec<Scalar>],
) -> Result<(), DualPairError> {
    for q in points {
        let (dphi, _) = phi.at(q)?;
        let l = leg.fiber_at(&phi.image(q)?)?;
        if !is_transversal_at(&l, &dphi) {
            return Err(DualPairError::TransversalityFailed {
                map: name.into(),
                point: q.clone(),
            });
        }
    }
    Ok(())
}

fn sample_defined(
    sampler: &mut Sampler,
    n: usize,
    count: usize,
    ok: impl Fn(&[Scalar]) -> bool,
) -> Vec<Vec<Scalar>> {
    let mut out = Vec::new();
    let mut misses = 0;
    while out.len() < count && misses < 50 * count.max(1) {
        let p = sampler.point(n);
        if ok(&p) {
            out.push(p);
        } else {
            misses += 1;
        }
    }
    out
}

/// Pullback of `inst` along transversals `Φᵢ : Nᵢ → Mᵢ` given as coordinate slices.
///
/// The new apex is the slice of `M` cut out by the pinned coordinates; `S` and `T`
/// must be coordinate projections. Transversality is sampled on each `Nᵢ`.
pub fn transverse_pullback(
    inst: &DualPairInstance,
    phis: [&LBMorphism; 2],
    sampler: &mut Sampler,
    samples: usize,
) -> Result<DualPairInstance, DualPairError> {
    let names = ["Φ₀", "Φ₁"];
    let mut fixed: Vec<Option<Scalar>> = vec![None; inst.apex.dim()];
    let mut entries = Vec::new();
    let mut leg_points = Vec::new();
    for k in 0..2 {
        let phi = phis[k];
        let leg = &inst.legs[k];
        if phi.target() != leg.chart() {
            return Err(DualPairError::Shape(format!(
                "{} does not land in leg {k}",
                names[k]
            )));
        }
        let e = slice_entries(phi, names[k])?;
        let idx = inst.maps[k].projection_indices().ok_or_else(|| {
            DualPairError::NotComposableInChart("S and T must be coordinate projections".into())
        })?;
        for (j, entry) in e.iter().enumerate() {
            if let SliceEntry::Fixed(c) = entry {
                let slot = &mut fixed[idx[j]];
                match slot {
                    Some(prev) if prev != c => {
                        return Err(DualPairError::NotComposableInChart(
                            "the slices do not meet".into(),
                        ));
                    }
                    _ => *slot = Some(c.clone()),
                }
            }
        }
        let pts = sample_defined(sampler, phi.source().dim(), samples, |q| {
            phi.image(q).is_ok_and(|y| leg.fiber_at(&y).is_ok()) && phi.at(q).is_ok()
        });
        check_transversal(leg, phi, names[k], &pts)?;
        entries.push((e, idx));
        leg_points.push(pts);
    }

    let coords = inst.apex.coords();
    let kept: Vec<usize> = (0..coords.len()).filter(|&k| fixed[k].is_none()).collect();
    let chart = Chart::new(kept.iter().map(|&k| coords[k].as_str()), inst.mode())?;
    let phi2: Vec<PolyFn> = (0..coords.len())
        .map(|k| match &fixed[k] {
            Some(c) => PolyFn::constant(c.clone()),
            None => PolyFn::var(kept.iter().position(|&j| j == k).expect("kept")),
        })
        .collect();
    let p2 = LBMorphism::new(
        chart.clone(),
        inst.apex.clone(),
        phi2.clone(),
        PolyFn::one(),
    )?;

    let mut maps = Vec::new();
    let mut legs = Vec::new();
    for k in 0..2 {
        let phi = phis[k];
        let (e, idx) = &entries[k];
        let mut comps = vec![PolyFn::zero(); phi.source().dim()];
        for (j, entry) in e.iter().enumerate() {
            if let SliceEntry::Var(m) = entry {
                comps[*m] = phi2[idx[j]].clone();
            }
        }
        let factor = inst.maps[k].factor().substitute(&phi2)?;
        maps.push(LBMorphism::new(
            chart.clone(),
            phi.source().clone(),
            comps,
            factor,
        )?);
        let fam = backward_family(&inst.legs[k], phi, &leg_points[k])?;
        legs.push(fam.spec.expect("backward always yields a structure"));
    }
    let form = p2.pull_form(&inst.form)?;
    let [l0, l1]: [StructureSpec; 2] = legs.try_into().expect("two legs");
    let [s, t]: [LBMorphism; 2] = maps.try_into().expect("two maps");
    let out = DualPairInstance::new(chart, form, [l0, l1], [s, t])?;
    let pts = sample_defined(sampler, out.apex.dim(), samples, |p| {
        out.maps.iter().all(|m| m.at(p).is_ok())
    });
    for p in &pts {
        for (k, m) in out.maps.iter().enumerate() {
            if !m.is_submersive_at(p)? {
                let map = if k == 0 { "S_Σ" } else { "T_Σ" };
                return Err(DualPairError::SubmersivityFailed {
                    map: map.into(),
                    point: p.clone(),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalFormPoint {
    pub point: Vec<Scalar>,
    pub check: Check,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalFormReport {
    /// `im DΦ + pr_D𝓛 = D` at every sampled point of `N`.
    pub transversal: bool,
    pub points: Vec<NormalFormPoint>,
    pub holds: bool,
}

/// Checks `Q^!Φ^!𝓛 = (Ψ^!𝓛)^B` at sample points of `ν`, where the first `dim N`
/// coordinates of the chart of `Ψ` are the coordinates of `N` and `Q` forgets the rest.
pub fn normal_form_check(
    s: &StructureSpec,
    phi: &LBMorphism,
    psi: &LBMorphism,
    b: &FormField,
    points: &[Vec<Scalar>],
) -> Result<NormalFormReport, DualPairError> {
    let nu = psi.source();
    let n = phi.source();
    if phi.target() != s.chart() || psi.target() != s.chart() {
        return Err(DualPairError::Shape(
            "Φ and Ψ must land in the chart of the structure".into(),
        ));
    }
    if nu.dim() < n.dim() || nu.mode() != n.mode() || nu.coords()[..n.dim()] != *n.coords() {
        return Err(DualPairError::Shape(
            "the chart of Ψ must start with the coordinates of N".into(),
        ));
    }
    if *b.model() != nu.model() || b.degree() != 2 {
        return Err(DualPairError::Shape(
            "B must be an Atiyah 2-form on the chart of Ψ".into(),
        ));
    }
    if !b.d()?.is_zero() {
        return Err(DualPairError::NotClosed("B".into()));
    }
    if points.is_empty() {
        return Err(DualPairError::NoSamples);
    }
    let q = LBMorphism::projection(nu, n, &(0..n.dim()).collect::<Vec<_>>())?;
    let bm = b.to_matrix();
    let mut transversal = true;
    let mut records = Vec::new();
    for z in points {
        if psi.jacobian().eval_at(z)?.rank() != s.chart().dim() {
            return Err(DualPairError::Shape(format!(
                "Ψ is not a local diffeomorphism at {}",
                crate::structures::show_point(z)
            )));
        }
        let x = q.image(z)?;
        let (dq, aq) = q.at(z)?;
        let (dphi, aphi) = phi.at(&x)?;
        let lx = s.fiber_at(&phi.image(&x)?)?;
        transversal &= is_transversal_at(&lx, &dphi);
        let lhs = backward(&backward(&lx, &dphi, &aphi)?, &dq, &aq)?;
        let (dpsi, apsi) = psi.at(z)?;
        let rhs = gauge(
            &backward(&s.fiber_at(&psi.image(z)?)?, &dpsi, &apsi)?,
            &eval_matrix(&bm, z)?,
        )?;
        records.push(NormalFormPoint {
            point: z.clone(),
            check: compare(&lhs, &rhs),
        });
    }
    let holds = transversal && records.iter().all(|r| r.check.holds);
    Ok(NormalFormReport {
        transversal,
        points: records,
        holds,
    })
}

fn compare(lhs: &LagrangianSubspace<Scalar>, rhs: &LagrangianSubspace<Scalar>) -> Check {
    if lhs == rhs {
        return Check {
            holds: true,
            witness: None,
        };
    }
    let show = |l: &LagrangianSubspace<Scalar>| {
        l.space()
            .basis_vectors()
            .iter()
            .map(|v| crate::structures::show_point(v))
            .collect::<Vec<_>>()
            .join(", ")
    };
    Check {
        holds: false,
        witness: Some(format!(
            "Q^!Φ^!𝓛 = span{{{}}} but (Ψ^!𝓛)^B = span{{{}}}",
            show(lhs),
            show(rhs)
        )),
    }
}
