//! Worked examples recomputed two ways, by the library and by a brute-force route,
//! and compared with stored expectations.

use serde::Serialize;

use crate::der_calculus::{contact_to_atiyah, jacobi_bracket, jacobiator_witness, Chart};
use crate::dual_pairs::{
    catalog, random_fiber_instance, self_dual_linear_model, transverse_pullback, Design,
    DualPairError,
};
use crate::exact_scalars::{PolyFn, Scalar, Vars};
use crate::linalg::{kernel, Matrix, Sampler, Subspace};
use crate::omni_fiber::{dot, random_lagrangian, FiberModel, Mode};
use crate::structures::{show_point, LBMorphism, StructureSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleRecord {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub oracle: String,
}

impl OracleRecord {
    pub fn pass(&self) -> bool {
        self.computed == self.expected && self.oracle == self.expected
    }

    pub fn summary(&self) -> String {
        if self.pass() {
            format!("= {}", self.expected)
        } else {
            format!(
                "expected {}, library gives {}, oracle gives {}",
                self.expected, self.computed, self.oracle
            )
        }
    }
}

fn rec(name: &str, expected: &str, computed: String, oracle: String) -> OracleRecord {
    OracleRecord {
        name: name.into(),
        expected: expected.into(),
        computed,
        oracle,
    }
}

fn q(n: i64, d: i64) -> Scalar {
    Scalar::from_ratio(n, d)
}

fn list(v: &[Scalar]) -> String {
    show_point(v)
}

fn quotient_derivative() -> OracleRecord {
    let vars = Vars::new(["x", "y"]).expect("names");
    let f = vars.parse("(x + y)/(x - y)").expect("parses");
    let df = vars.differentiate(&f, "x").expect("coordinate");
    let pts = [(3, 1), (2, 5), (-1, 4)];
    let computed: Vec<Scalar> = pts
        .iter()
        .map(|&(a, b)| df.eval(&[q(a, 1), q(b, 1)]).expect("no pole"))
        .collect();
    let hand: Vec<Scalar> = pts
        .iter()
        .map(|&(a, b)| q(-2 * b, (a - b) * (a - b)))
        .collect();
    rec(
        "quotient rule",
        "(-1/2, -10/9, -8/25)",
        list(&computed),
        list(&hand),
    )
}

fn quotient_value() -> OracleRecord {
    let vars = Vars::new(["x", "y"]).expect("names");
    let f = vars.parse("(x + y)/(x - y)").expect("parses");
    let pt = [("x".to_string(), q(3, 1)), ("y".to_string(), q(1, 1))]
        .into_iter()
        .collect();
    let v = vars.evaluate(&f, &pt).expect("no pole");
    rec(
        "evaluation at (3, 1)",
        "2",
        v.to_string(),
        (&(&q(3, 1) + &q(1, 1)) / &(&q(3, 1) - &q(1, 1))).to_string(),
    )
}

fn rank_example() -> OracleRecord {
    let m = Matrix::from_ints(2, 2, &[1, 2, 2, 4]);
    let det = &(m.get(0, 0) * m.get(1, 1)) - &(m.get(0, 1) * m.get(1, 0));
    let oracle = if det.is_zero() { 1 } else { 2 };
    rec(
        "rank of [[1,2],[2,4]]",
        "1",
        m.rank().to_string(),
        oracle.to_string(),
    )
}

fn intersection_example() -> OracleRecord {
    let e = |v: [i64; 3]| v.iter().map(|&x| q(x, 1)).collect::<Vec<_>>();
    let a = Subspace::span(3, &[e([1, 1, 0]), e([0, 0, 1])]).expect("ambient");
    let b = Subspace::span(3, &[e([0, 1, 0]), e([0, 0, 1])]).expect("ambient");
    let i = a.intersect(&b).expect("ambient");
    let computed = i
        .basis_vectors()
        .iter()
        .map(|v| list(v))
        .collect::<Vec<_>>()
        .join(" ");
    // s(e₁+e₂) + t e₃ lies in span{e₂, e₃} iff its first coordinate s vanishes.
    let mut hits = Vec::new();
    for s in -2..=2 {
        for t in -2..=2 {
            if s == 0 {
                hits.push(e([s, s, t]));
            }
        }
    }
    let hand = Subspace::span(3, &hits).expect("ambient");
    let oracle = hand
        .basis_vectors()
        .iter()
        .map(|v| list(v))
        .collect::<Vec<_>>()
        .join(" ");
    rec(
        "span{e₁+e₂, e₃} ∩ span{e₂, e₃}",
        "(0, 0, 1)",
        computed,
        oracle,
    )
}

/// Characteristic polynomial coefficients `c₀..cₙ` by Faddeev-LeVerrier.
fn char_poly(a: &Matrix<Scalar>) -> Vec<Scalar> {
    let n = a.rows();
    let mut c = vec![Scalar::zero(); n + 1];
    c[n] = Scalar::one();
    let mut m = Matrix::<Scalar>::zeros(n, n);
    for k in 1..=n {
        m = a.mul(&m).add(&Matrix::identity(n).scale(&c[n + 1 - k]));
        let am = a.mul(&m);
        let tr = (0..n).fold(Scalar::zero(), |acc, i| &acc + am.get(i, i));
        c[n - k] = -(&tr / &Scalar::from_int(k as i64));
    }
    c
}

fn sign_changes(c: &[Scalar]) -> usize {
    let s: Vec<i32> = c.iter().map(|x| x.signum()).filter(|&x| x != 0).collect();
    s.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Descartes on a real-rooted characteristic polynomial: exact root counts by sign.
fn descartes_inertia(a: &Matrix<Scalar>) -> (usize, usize) {
    let c = char_poly(a);
    let pos = sign_changes(&c);
    let flipped: Vec<Scalar> = c
        .iter()
        .enumerate()
        .map(|(i, x)| if i % 2 == 1 { -x.clone() } else { x.clone() })
        .collect();
    (pos, sign_changes(&flipped))
}

fn signature(n: usize) -> OracleRecord {
    let g = FiberModel::jacobi(n).gram::<Scalar>();
    let (p, m, _) = g.inertia();
    let (po, mo) = descartes_inertia(&g);
    let exp = format!("({0}, {0})", n + 1);
    rec(
        &format!("pairing signature n={n}"),
        &exp,
        format!("({p}, {m})"),
        format!("({po}, {mo})"),
    )
}

fn lcps_flat_fiber() -> OracleRecord {
    let c = Chart::new(["x"], Mode::Jacobi).expect("chart");
    let s = StructureSpec::lcps(c, vec![PolyFn::zero()], Matrix::zeros(1, 1)).expect("lcps");
    let l = s.fiber_at(&[q(2, 1)]).expect("no pole");
    let computed = l
        .space()
        .basis_vectors()
        .iter()
        .map(|v| list(v))
        .collect::<Vec<_>>()
        .join(" ");
    // (∂; 0) and (0; 𝟙*) in the frame order (∂, 𝟙 | ∂*, 𝟙*).
    let hand = Subspace::span(
        4,
        &[
            vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)],
        ],
    )
    .expect("ambient");
    let oracle = hand
        .basis_vectors()
        .iter()
        .map(|v| list(v))
        .collect::<Vec<_>>()
        .join(" ");
    rec(
        "flat lcps fiber",
        "(1, 0, 0, 0) (0, 0, 0, 1)",
        computed,
        oracle,
    )
}

fn contact_bracket() -> (Chart, Vec<Vec<PolyFn>>, Matrix<PolyFn>) {
    let c = Chart::new(["q", "u", "p"], Mode::Jacobi).expect("chart");
    let theta = vec![
        c.parse("-p").expect("parses"),
        PolyFn::one(),
        PolyFn::zero(),
    ];
    let w = contact_to_atiyah(&c.model(), &theta)
        .expect("jacobi chart")
        .to_matrix();
    let j = w.inverse().expect("nondegenerate").row_vecs();
    (c, j, w)
}

fn contact_jacobiator() -> OracleRecord {
    let (c, j, _) = contact_bracket();
    let m = c.model();
    let computed = match jacobiator_witness(&m, &j).expect("skew") {
        None => "0".to_string(),
        Some((_, v)) => c.display(&v),
    };
    let sections: Vec<PolyFn> = ["1", "q", "u", "p", "q*p", "u^2 + p", "q^2*u"]
        .iter()
        .map(|s| c.parse(s).expect("parses"))
        .collect();
    let br = |a: &PolyFn, b: &PolyFn| jacobi_bracket(&m, &j, a, b);
    let mut worst = PolyFn::zero();
    for a in &sections {
        for b in &sections {
            for d in &sections {
                let v = br(a, &br(b, d))
                    .add_ref(&br(b, &br(d, a)))
                    .add_ref(&br(d, &br(a, b)));
                if !v.is_zero() {
                    worst = v;
                }
            }
        }
    }
    rec(
        "canonical contact jacobiator",
        "0",
        computed,
        c.display(&worst),
    )
}

fn leibniz_det(m: &Matrix<PolyFn>) -> PolyFn {
    fn perms(n: usize) -> Vec<(Vec<usize>, bool)> {
        if n == 0 {
            return vec![(vec![], true)];
        }
        let mut out = Vec::new();
        for (p, even) in perms(n - 1) {
            for k in 0..n {
                let mut v = p.clone();
                v.insert(k, n - 1);
                out.push((v, even == ((n - 1 - k).is_multiple_of(2))));
            }
        }
        out
    }
    let mut acc = PolyFn::zero();
    for (p, even) in perms(m.rows()) {
        let t = p
            .iter()
            .enumerate()
            .fold(PolyFn::one(), |a, (i, &j)| a.mul_ref(m.get(i, j)));
        acc = if even {
            acc.add_ref(&t)
        } else {
            acc.sub_ref(&t)
        };
    }
    acc
}

fn contact_determinant() -> OracleRecord {
    let (c, _, w) = contact_bracket();
    rec(
        "det ϖ of du − p dq",
        "1",
        c.display(&w.det()),
        c.display(&leibniz_det(&w)),
    )
}

fn orthogonality_scan() -> OracleRecord {
    let inst = random_fiber_instance(
        &mut Sampler::new(17),
        Mode::Jacobi,
        Design::BreakOrthogonality,
    );
    let v = inst.verify().expect("valid");
    let computed = if v.definition.orthogonal.holds {
        "holds"
    } else {
        "fails"
    };
    let ks = kernel(&inst.s.0).basis_vectors();
    let kt = kernel(&inst.t.0).basis_vectors();
    let hit = ks
        .iter()
        .any(|u| kt.iter().any(|w| !dot(u, &inst.form.mul_vec(w)).is_zero()));
    rec(
        "designed non-orthogonal fiber",
        "fails",
        computed.into(),
        if hit { "fails" } else { "holds" }.into(),
    )
}

fn precondition() -> OracleRecord {
    let inst = random_fiber_instance(&mut Sampler::new(23), Mode::Jacobi, Design::BreakForward);
    let v = inst.verify().expect("valid");
    let computed = v.product.note.clone().unwrap_or_else(|| "none".into());
    let g = crate::omni_fiber::graph_of_form(&inst.apex, &inst.form).expect("skew");
    let pushed =
        crate::omni_fiber::forward(&g, &inst.s.0, &inst.s.1, inst.l0.model()).expect("shapes");
    let oracle = if pushed != inst.l0 {
        "precondition unmet"
    } else {
        "none"
    };
    rec(
        "product criterion with a wrong leg",
        "precondition unmet",
        computed,
        oracle.into(),
    )
}

fn catalog_verdict(name: &str, mode: Mode) -> OracleRecord {
    let entry = catalog(mode)
        .expect("catalog builds")
        .into_iter()
        .find(|e| e.name == name)
        .expect("catalog entry");
    let pts = entry.instance.sample_points(&mut Sampler::new(3), 4);
    let r = entry.instance.verify(&pts).expect("verifies");
    let word = |b: bool| if b { "holds" } else { "fails" }.to_string();
    let oracle = r
        .clone()
        .with_criterion(crate::dual_pairs::Criterion::BField)
        .holds;
    rec(
        &format!("catalog {name}"),
        "holds",
        word(r.holds),
        word(oracle),
    )
}

fn non_transversal_slice() -> OracleRecord {
    let p = crate::dual_pairs::zero_jacobi_pair(1).expect("builds");
    let c = p.legs()[0].chart().clone();
    let pt = Chart::new(Vec::<String>::new(), Mode::Jacobi).expect("chart");
    let slice =
        LBMorphism::new(pt, c.clone(), vec![PolyFn::zero()], PolyFn::one()).expect("morphism");
    let id = LBMorphism::identity(&c);
    let computed = match transverse_pullback(&p, [&slice, &id], &mut Sampler::new(3), 4) {
        Err(DualPairError::TransversalityFailed { .. }) => "not transversal",
        Err(_) => "other error",
        Ok(_) => "transversal",
    };
    // im DΦ at a point is spanned by 𝟙; pr_D Gr 0 is the span of 𝟙 as well, so ∂x is missed.
    let l = p.legs()[0].fiber_at(&[q(0, 1)]).expect("defined");
    let (dphi, _) = slice.at(&[]).expect("defined");
    let im = Subspace::span(2, &dphi.transpose().row_vecs()).expect("ambient");
    let full = im.sum(&l.pr_d()).expect("ambient").is_full();
    rec(
        "point slice into the zero Jacobi structure",
        "not transversal",
        computed.into(),
        if full {
            "transversal"
        } else {
            "not transversal"
        }
        .into(),
    )
}

fn selfdual_sweep(seed: u64) -> OracleRecord {
    let mut s = Sampler::new(seed);
    let mut ok = 0;
    let mut direct = 0;
    for k in 0..20 {
        let l = random_lagrangian(&mut s, &FiberModel::new(1 + k % 3, Mode::Jacobi));
        let (m, r) = self_dual_linear_model(&l).expect("lagrangian");
        ok += r.holds as usize;
        // The kernel triple from scratch: ker DS ∩ ker DT ∩ ker ϖ♭.
        let f = &m.instance;
        let stacked = f.s.0.vstack(&f.t.0).vstack(&f.form);
        direct += kernel(&stacked).is_zero() as usize;
    }
    rec(
        "20 self-dual linear models",
        "20/20",
        format!("{ok}/20"),
        format!("{direct}/20"),
    )
}

/// All oracles; `seed` drives the random sweeps.
pub fn run_all(seed: u64) -> Vec<OracleRecord> {
    let mut out = vec![
        quotient_derivative(),
        quotient_value(),
        rank_example(),
        intersection_example(),
    ];
    out.extend((1..=4).map(signature));
    out.extend([
        lcps_flat_fiber(),
        contact_jacobiator(),
        contact_determinant(),
        orthogonality_scan(),
        precondition(),
    ]);
    for (name, mode) in [
        ("product_line_line", Mode::Jacobi),
        ("product_composed_with_mirror", Mode::Jacobi),
        ("lcps_split_2_pullback", Mode::Jacobi),
        ("dirac_product_composed_with_mirror", Mode::Dirac),
    ] {
        out.push(catalog_verdict(name, mode));
    }
    out.push(non_transversal_slice());
    out.push(selfdual_sweep(seed));
    out
}
