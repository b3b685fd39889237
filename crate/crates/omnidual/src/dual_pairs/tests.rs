use super::*;
use crate::exact_scalars::{Field, PolyFn};
use crate::linalg::{Matrix, Sampler};
use crate::omni_fiber::{random_lagrangian, FiberModel, LagrangianSubspace};

fn points(inst: &DualPairInstance, seed: u64, count: usize) -> Vec<Vec<Scalar>> {
    let pts = inst.sample_points(&mut Sampler::new(seed), count);
    assert_eq!(pts.len(), count, "could not sample {count} points");
    pts
}

#[test]
fn catalog_entries_verify_in_both_modes() {
    for mode in [Mode::Jacobi, Mode::Dirac] {
        for e in catalog(mode).unwrap() {
            let r = e.instance.verify(&points(&e.instance, 3, 4)).unwrap();
            assert!(r.equivalence.all_agree, "{}: criteria disagree", e.name);
            let fail = r
                .first_failure()
                .map(|p| format!("{:?}", p.verdict.definition));
            assert_eq!(r.holds, e.expect_pass, "{}: {fail:?}", e.name);
            assert!(
                r.rank_table.iter().all(|&k| k as i64 == r.expected_rank),
                "{}",
                e.name
            );
        }
    }
}

#[test]
fn jacobi_catalog_covers_both_leaf_types() {
    let cat = catalog(Mode::Jacobi).unwrap();
    assert!(cat.len() >= 10);
    let mut seen = std::collections::BTreeSet::new();
    for e in &cat {
        let mut s = Sampler::new(5);
        let pts = points(&e.instance, 5, 2);
        let r = leaf_correspondence_report(&e.instance, &pts, &e.leaf, &mut s).unwrap();
        assert!(r.holds, "{}: {:?}", e.name, r);
        for p in &r.points {
            seen.insert(format!("{:?}", p.leg_types[0]));
        }
        if let Some(sym) = &r.symbolic {
            seen.insert(format!("{:?}", sym.leaf_type));
        }
    }
    assert!(
        seen.contains("Lcps") && seen.contains("Precontact"),
        "{seen:?}"
    );
}

#[test]
fn dirac_leaf_reports_hold() {
    for e in catalog(Mode::Dirac).unwrap() {
        let pts = points(&e.instance, 8, 2);
        let r =
            leaf_correspondence_report(&e.instance, &pts, &e.leaf, &mut Sampler::new(8)).unwrap();
        assert!(r.holds, "{}: {:?}", e.name, r);
        assert!(r
            .points
            .iter()
            .all(|p| p.transversal_in_ker_theta.is_none()));
    }
}

#[test]
fn product_pair_passes_with_equivalent_conditions() {
    let p = &catalog(Mode::Jacobi).unwrap()[0].instance;
    let r = p.verify_characterization_ii(&points(p, 1, 5)).unwrap();
    assert!(r.holds);
    for rec in &r.points {
        let v = &rec.verdict.product;
        assert!(v.product_forward.holds);
        assert_eq!(v.equivalent, Some(true));
        assert!(v.orthogonal && v.rank && v.bfield);
    }
}

#[test]
fn broken_orthogonality_reports_witness() {
    let mut s = Sampler::new(17);
    let inst = random_fiber_instance(&mut s, Mode::Jacobi, Design::BreakOrthogonality);
    let v = inst.verify().unwrap();
    assert!(!v.definition.orthogonal.holds);
    let w = v.definition.orthogonal.witness.clone().unwrap();
    assert!(w.contains("∈ ker DS") && w.contains("∈ ker DT"), "{w}");
    assert!(!v.holds());
}

#[test]
fn unmet_product_precondition_is_reported() {
    let mut s = Sampler::new(23);
    let inst = random_fiber_instance(&mut s, Mode::Jacobi, Design::BreakForward);
    let v = inst.verify().unwrap();
    assert!(!v.product.product_forward.holds);
    assert_eq!(v.product.equivalent, None);
    assert_eq!(v.product.note.as_deref(), Some("precondition unmet"));
    assert!(!v.holds());
}

#[test]
fn random_instances_agree_across_criteria() {
    let mut s = Sampler::new(2024);
    for k in 0..200 {
        let mode = if k % 4 == 3 {
            Mode::Dirac
        } else {
            Mode::Jacobi
        };
        let design = Design::ALL[k % 4];
        let inst = random_fiber_instance(&mut s, mode, design);
        let v = inst.verify().unwrap();
        assert!(v.agree, "instance {k} ({design:?}, {mode:?}): {v:?}");
        assert_eq!(v.holds(), design == Design::Pass, "instance {k}");
    }
}

#[test]
fn zero_dimensional_legs() {
    let pt = Chart::new(Vec::<String>::new().iter(), Mode::Jacobi).unwrap();
    let zero = FormField::zero(pt.model(), 2);
    let p = product_pair(&pt, &zero, &pt, &zero).unwrap();
    assert_eq!(p.apex().dim(), 1);
    assert_eq!(p.expected_rank(), 1 - 1 - 1 + 1);
    let r = p.verify(&points(&p, 2, 3)).unwrap();
    assert!(r.holds && r.equivalence.all_agree);
}

#[test]
fn identity_pair_fails_on_rank() {
    let c = Chart::new(["x", "y"].iter(), Mode::Jacobi).unwrap();
    let leg = StructureSpec::graph_bider(c.clone(), Matrix::zeros(3, 3)).unwrap();
    let id = LBMorphism::identity(&c);
    let p = DualPairInstance::new(
        c.clone(),
        FormField::zero(c.model(), 2),
        [leg.clone(), leg],
        [id.clone(), id],
    )
    .unwrap();
    assert_eq!(p.expected_rank(), -3);
    let r = p.verify(&points(&p, 4, 2)).unwrap();
    assert!(!r.holds && r.equivalence.all_agree);
}

#[test]
fn non_closed_form_is_rejected() {
    let c = Chart::new(["x", "y"].iter(), Mode::Jacobi).unwrap();
    let mut w = FormField::zero(c.model(), 2);
    w.set(&[0, 1], PolyFn::var(0));
    let leg = StructureSpec::tangent(c.clone());
    let id = LBMorphism::identity(&c);
    let e = DualPairInstance::new(c, w, [leg.clone(), leg], [id.clone(), id]).unwrap_err();
    assert!(matches!(e, DualPairError::NotClosed(_)));
}

fn self_dual_holds(l: &LagrangianSubspace<Scalar>) -> SelfDualReport {
    let (_, r) = self_dual_linear_model(l).unwrap();
    assert!(r.holds, "{r:?}");
    r
}

#[test]
fn self_dual_model_on_basic_fibers() {
    for n in 0..=3 {
        for mode in [Mode::Jacobi, Mode::Dirac] {
            let m = FiberModel::new(n, mode);
            let d = LagrangianSubspace::new(m, m.d_space()).unwrap();
            let r = self_dual_holds(&d);
            assert_eq!(r.jacobi_fiber, m.d_dim() == 0);
        }
        let m = FiberModel::new(n, Mode::Jacobi);
        let mut j = Matrix::zeros(n + 1, n + 1);
        if n > 0 {
            j.set(0, n, Scalar::from_int(2));
            j.set(n, 0, Scalar::from_int(-2));
        }
        let r = self_dual_holds(&crate::omni_fiber::graph_of_biderivation(&m, &j).unwrap());
        assert!(r.jacobi_fiber && r.nondegenerate && r.full_contact == Some(true));
    }
}

#[test]
fn self_dual_model_on_random_fibers() {
    let mut s = Sampler::new(99);
    for k in 0..40 {
        let mode = if k % 2 == 0 {
            Mode::Jacobi
        } else {
            Mode::Dirac
        };
        let l = random_lagrangian(&mut s, &FiberModel::new(k % 4, mode));
        self_dual_holds(&l);
    }
}

#[test]
fn composition_with_plus_sign_passes_and_minus_fails() {
    let cat = catalog(Mode::Jacobi).unwrap();
    let p = &cat[0].instance;
    let c0 = p.legs()[0].chart().clone();
    let c1 = p.legs()[1].chart().clone();
    let w0 = form_of(&p.legs()[0]);
    let w1 = form_of(&p.legs()[1]);
    let mirror = product_pair(&c1, &w1, &c0, &w0).unwrap();
    let plus = compose(p, &mirror, CompositionSign::Plus).unwrap();
    let minus = compose(p, &mirror, CompositionSign::Minus).unwrap();
    let dim = |q: &DualPairInstance| q.apex().dim();
    assert_eq!(dim(&plus), dim(p) + dim(&mirror) - c1.dim());
    assert!(plus.verify(&points(&plus, 6, 3)).unwrap().holds);
    let r = minus.verify(&points(&minus, 6, 3)).unwrap();
    assert!(!r.holds && r.equivalence.all_agree);
}

fn form_of(s: &StructureSpec) -> FormField {
    match catalog_form(s) {
        Some(f) => f,
        None => panic!("not a graph of a form"),
    }
}

fn catalog_form(s: &StructureSpec) -> Option<FormField> {
    let c = s.chart();
    let rows = s.frame_rows();
    let d = c.model().d_dim();
    let mut m = Matrix::zeros(d, d);
    for (i, r) in rows.iter().enumerate() {
        if i >= d || !r[i].is_one() {
            return None;
        }
        for j in 0..d {
            m.set(i, j, r[d + j].clone());
        }
    }
    FormField::from_matrix(c.model(), &m).ok()
}

#[test]
fn composition_rejects_mismatched_middle() {
    let cat = catalog(Mode::Jacobi).unwrap();
    let e = compose(&cat[0].instance, &cat[0].instance, CompositionSign::Plus).unwrap_err();
    assert_eq!(e, DualPairError::IncompatibleMiddle);
}

#[test]
fn pullback_along_identity_is_the_pair() {
    let p = lcps_split(2, Some(&["0", "x1", "0"])).unwrap();
    let ids = [
        LBMorphism::identity(p.legs()[0].chart()),
        LBMorphism::identity(p.legs()[1].chart()),
    ];
    let q = transverse_pullback(&p, [&ids[0], &ids[1]], &mut Sampler::new(3), 4).unwrap();
    assert_eq!(q.apex(), p.apex());
    assert_eq!(q.form(), p.form());
}

#[test]
fn pullback_along_transversal_slice_verifies() {
    let p = lcps_split(2, Some(&["0", "x1", "0"])).unwrap();
    let slice = pullback_slice(&p).unwrap();
    let id = LBMorphism::identity(p.legs()[1].chart());
    let q = transverse_pullback(&p, [&slice, &id], &mut Sampler::new(3), 4).unwrap();
    assert_eq!(q.apex().dim(), p.apex().dim() - 1);
    assert!(q.verify(&points(&q, 7, 3)).unwrap().holds);
}

#[test]
fn pullback_along_non_transversal_slice_is_refused() {
    let p = zero_jacobi_pair(1).unwrap();
    let c = p.legs()[0].chart();
    let pt = Chart::new(Vec::<String>::new().iter(), Mode::Jacobi).unwrap();
    let slice = LBMorphism::new(pt, c.clone(), vec![PolyFn::zero()], PolyFn::one()).unwrap();
    let id = LBMorphism::identity(c);
    let e = transverse_pullback(&p, [&slice, &id], &mut Sampler::new(3), 4).unwrap_err();
    assert!(
        matches!(e, DualPairError::TransversalityFailed { .. }),
        "{e:?}"
    );
}

fn normal_form_fixture(b_entry: &str) -> NormalFormReport {
    let m = Chart::new(["x", "y"].iter(), Mode::Jacobi).unwrap();
    let n = Chart::new(["x"].iter(), Mode::Jacobi).unwrap();
    let mut j = Matrix::zeros(3, 3);
    j.set(1, 2, PolyFn::one());
    j.set(2, 1, -PolyFn::one());
    let s = StructureSpec::graph_bider(m.clone(), j).unwrap();
    let phi = LBMorphism::new(
        n,
        m.clone(),
        vec![PolyFn::var(0), PolyFn::zero()],
        PolyFn::one(),
    )
    .unwrap();
    let psi = LBMorphism::identity(&m);
    let b = form2(&m, &[(1, 2, b_entry)]).unwrap();
    let pts = m_points(&m);
    normal_form_check(&s, &phi, &psi, &b, &pts).unwrap()
}

fn m_points(m: &Chart) -> Vec<Vec<Scalar>> {
    let mut s = Sampler::new(31);
    (0..4).map(|_| s.point(m.dim())).collect()
}

#[test]
fn normal_form_witness_holds() {
    let r = normal_form_fixture("1");
    assert!(r.transversal && r.holds, "{r:?}");
}

#[test]
fn normal_form_with_wrong_b_fails() {
    let r = normal_form_fixture("2");
    assert!(r.transversal && !r.holds);
    assert!(r.points.iter().all(|p| p.check.witness.is_some()));
}

#[test]
fn rescaling_preserves_the_verdict() {
    let g = lcps_gluing(1).unwrap();
    let r = rescale(&g, "1 + v^2").unwrap();
    assert_ne!(r.form(), g.form());
    assert!(r.verify(&points(&r, 9, 3)).unwrap().holds);
}

#[test]
fn leaf_alarm_fires_on_mismatched_legs() {
    let c = Chart::new(["x"].iter(), Mode::Jacobi).unwrap();
    let apex = Chart::new(["x", "c"].iter(), Mode::Jacobi).unwrap();
    let s = LBMorphism::projection(&apex, &c, &[0]).unwrap();
    let form = form2(&apex, &[(1, 2, "-1")]).unwrap();
    let legs = [
        StructureSpec::tangent(c.clone()),
        StructureSpec::graph_bider(c.clone(), Matrix::zeros(2, 2)).unwrap(),
    ];
    let p = DualPairInstance::new(apex, form, legs, [s.clone(), s]).unwrap();
    let pts = points(&p, 1, 2);
    let r =
        leaf_correspondence_report(&p, &pts, &LeafTask::default(), &mut Sampler::new(1)).unwrap();
    assert!(r.alarm && !r.holds);
    assert!(!p.verify(&pts).unwrap().holds);
}
