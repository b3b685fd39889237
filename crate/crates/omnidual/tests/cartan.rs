use omnidual::der_calculus::{
    courant_tensor, courant_witness, dorfman, random, section_pairing, CalculusError, Derivation,
    FormField, SectionPair,
};
use omnidual::exact_scalars::PolyFn;
use omnidual::linalg::Sampler;
use omnidual::omni_fiber::{FiberModel, Mode};

const SEEDS: u64 = 12;

fn models() -> Vec<FiberModel> {
    vec![
        FiberModel::jacobi(1),
        FiberModel::jacobi(2),
        FiberModel::dirac(2),
        FiberModel::jacobi(3),
    ]
}

fn each(mut f: impl FnMut(&mut Sampler, &FiberModel)) {
    for m in models() {
        for seed in 0..SEEDS {
            let mut s = Sampler::new(seed * 31 + m.n as u64);
            f(&mut s, &m);
        }
    }
}

#[test]
fn d_squared_vanishes() {
    each(|s, m| {
        for k in 0..2 {
            let w = random::form(s, m, k, 2);
            assert!(w.d().unwrap().d().unwrap().is_zero());
        }
    });
}

#[test]
fn cartan_formula() {
    each(|s, m| {
        let delta = random::derivation(s, m, 1);
        let f0 = random::form(s, m, 0, 2);
        assert_eq!(
            f0.lie(&delta).unwrap(),
            f0.d().unwrap().contract(&delta).unwrap()
        );
        for k in 1..3 {
            let w = random::form(s, m, k, 2);
            let lhs = w.lie(&delta).unwrap();
            let rhs = w
                .contract(&delta)
                .unwrap()
                .d()
                .unwrap()
                .add(&w.d().unwrap().contract(&delta).unwrap());
            assert_eq!(lhs, rhs, "degree {k}");
        }
    });
}

#[test]
fn lie_contraction_commutator() {
    each(|s, m| {
        let a = random::derivation(s, m, 1);
        let b = random::derivation(s, m, 1);
        let ab = a.commutator(&b).unwrap();
        for k in 1..4 {
            let w = random::form(s, m, k, 1);
            let lhs = w
                .contract(&b)
                .unwrap()
                .lie(&a)
                .unwrap()
                .sub(&w.lie(&a).unwrap().contract(&b).unwrap());
            assert_eq!(lhs, w.contract(&ab).unwrap());
        }
    });
}

#[test]
fn lie_lie_commutator() {
    each(|s, m| {
        let a = random::derivation(s, m, 1);
        let b = random::derivation(s, m, 1);
        let ab = a.commutator(&b).unwrap();
        for k in 0..3 {
            let w = random::form(s, m, k, 1);
            let lhs = w
                .lie(&b)
                .unwrap()
                .lie(&a)
                .unwrap()
                .sub(&w.lie(&a).unwrap().lie(&b).unwrap());
            assert_eq!(lhs, w.lie(&ab).unwrap());
        }
    });
}

#[test]
fn d_commutes_with_lie_and_contractions_anticommute() {
    each(|s, m| {
        let a = random::derivation(s, m, 1);
        let b = random::derivation(s, m, 1);
        for k in 0..2 {
            let w = random::form(s, m, k, 2);
            assert_eq!(
                w.d().unwrap().lie(&a).unwrap(),
                w.lie(&a).unwrap().d().unwrap()
            );
        }
        for k in 2..4 {
            let w = random::form(s, m, k, 1);
            let ab = w.contract(&b).unwrap().contract(&a).unwrap();
            let ba = w.contract(&a).unwrap().contract(&b).unwrap();
            assert!(ab.add(&ba).is_zero());
        }
    });
}

#[test]
fn unit_section_is_a_contracting_homotopy() {
    for n in 1..4 {
        let m = FiberModel::jacobi(n);
        let one = Derivation::one(m).unwrap();
        for seed in 0..SEEDS {
            let mut s = Sampler::new(seed);
            let f0 = random::form(&mut s, &m, 0, 2);
            assert_eq!(f0.d().unwrap().contract(&one).unwrap(), f0);
            for k in 1..3 {
                let w = random::form(&mut s, &m, k, 2);
                assert_eq!(w.lie(&one).unwrap(), w);
                let h = w
                    .contract(&one)
                    .unwrap()
                    .d()
                    .unwrap()
                    .add(&w.d().unwrap().contract(&one).unwrap());
                assert_eq!(h, w);
            }
        }
    }
    assert!(Derivation::one(FiberModel::dirac(2)).is_none());
}

#[test]
fn dorfman_axioms() {
    each(|s, m| {
        let u = random::section(s, m, 1);
        let v = random::section(s, m, 1);
        let w = random::section(s, m, 1);
        let uv = dorfman(&u, &v).unwrap();
        let vw = dorfman(&v, &w).unwrap();
        let uw = dorfman(&u, &w).unwrap();

        // pairing compatibility: Δ_u⟨⟨v,w⟩⟩ = ⟨⟨[[u,v]],w⟩⟩ + ⟨⟨v,[[u,w]]⟩⟩
        let lhs = u.delta.apply(&section_pairing(&v, &w).unwrap());
        let rhs = section_pairing(&uv, &w)
            .unwrap()
            .add_ref(&section_pairing(&v, &uw).unwrap());
        assert_eq!(lhs, rhs);

        // left Leibniz
        let l = dorfman(&u, &vw).unwrap();
        let r1 = dorfman(&uv, &w).unwrap();
        let r2 = dorfman(&v, &uw).unwrap();
        assert_eq!(l.delta, r1.delta.add(&r2.delta));
        assert_eq!(l.psi, r1.psi.add(&r2.psi));

        // symmetric part is exact
        let vu = dorfman(&v, &u).unwrap();
        let sym = FormField::zero_form(*m, section_pairing(&u, &v).unwrap())
            .d()
            .unwrap();
        assert!(uv.delta.add(&vu.delta).comps().iter().all(PolyFn::is_zero));
        assert_eq!(uv.psi.add(&vu.psi), sym);
    });
}

fn graph_frame(w: &FormField) -> Vec<SectionPair> {
    let m = *w.model();
    (0..m.d_dim())
        .map(|a| {
            let e = Derivation::frame(m, a);
            let psi = w.contract(&e).unwrap();
            SectionPair::new(e, psi).unwrap()
        })
        .collect()
}

#[test]
fn courant_tensor_of_graph_is_d_of_form() {
    each(|s, m| {
        let w = random::form(s, m, 2, 2);
        let dw = w.d().unwrap();
        let frame = graph_frame(&w);
        let d = m.d_dim();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    assert_eq!(courant_tensor(&frame, i, j, k).unwrap(), dw.get(&[i, j, k]));
                }
            }
        }
        let closed = random::form(s, m, 1, 2).d().unwrap();
        assert_eq!(courant_witness(&graph_frame(&closed)).unwrap(), None);
    });
}

#[test]
fn courant_tensor_rejects_non_isotropic_frame() {
    let m = FiberModel::jacobi(1);
    let e = Derivation::frame(m, 0);
    let u = SectionPair::new(e, FormField::from_vec(m, &[PolyFn::one(), PolyFn::zero()])).unwrap();
    assert_eq!(
        courant_tensor(&[u], 0, 0, 0),
        Err(CalculusError::NotIsotropic(0, 0))
    );
    let dm = FiberModel::new(2, Mode::Dirac);
    assert_eq!(graph_frame(&FormField::zero(dm, 2)).len(), 2);
}
