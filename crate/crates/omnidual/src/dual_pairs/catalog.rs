//! Concrete weak dual pairs used by the shipped examples and the test suites.

use crate::der_calculus::{Chart, FormField};
use crate::exact_scalars::PolyFn;
use crate::linalg::Matrix;
use crate::omni_fiber::Mode;
use crate::structures::{LBMorphism, StructureSpec};

use super::ops::{compose, transverse_pullback, CompositionSign};
use super::{DualPairError, DualPairInstance, LeafTask};

fn chart(names: &[String], mode: Mode) -> Result<Chart, DualPairError> {
    Ok(Chart::new(names.iter(), mode)?)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    if n == 1 {
        return vec![prefix.to_string()];
    }
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn fresh(taken: &[String], base: &str) -> String {
    let mut s = base.to_string();
    while taken.contains(&s) {
        s.push('_');
    }
    s
}

/// `d_D η` for a 1-form given by its frame components.
pub fn exact_form(c: &Chart, eta: &[&str]) -> Result<FormField, DualPairError> {
    let v = eta
        .iter()
        .map(|s| c.parse(s))
        .collect::<Result<Vec<PolyFn>, _>>()?;
    Ok(FormField::from_vec(c.model(), &v).d()?)
}

/// A 2-form from its entries `ϖ_{ij}`, `i < j`.
pub fn form2(c: &Chart, entries: &[(usize, usize, &str)]) -> Result<FormField, DualPairError> {
    let mut w = FormField::zero(c.model(), 2);
    for &(i, j, s) in entries {
        w.set(&[i, j], c.parse(s)?);
    }
    Ok(w)
}

/// `(M₀, Gr ϖ₀) ← (M₀ ×! M₁, ϖ₀ ×! (−ϖ₁)) → (M₁, Gr(−ϖ₁))` on the chart `(y₀, y₁, τ)`,
/// where the second projection has factor `τ` (no `τ` in dirac mode).
pub fn product_pair(
    c0: &Chart,
    w0: &FormField,
    c1: &Chart,
    w1: &FormField,
) -> Result<DualPairInstance, DualPairError> {
    let mode = c0.mode();
    let mut all: Vec<String> = c0.coords().to_vec();
    for n in c1.coords() {
        let f = fresh(&all, n);
        all.push(f);
    }
    let (n0, n1) = (c0.dim(), c1.dim());
    let factor = match mode {
        Mode::Jacobi => {
            let t = fresh(&all, "t");
            all.push(t);
            PolyFn::var(n0 + n1)
        }
        Mode::Dirac => PolyFn::one(),
    };
    let apex = chart(&all, mode)?;
    let p0 = LBMorphism::new(
        apex.clone(),
        c0.clone(),
        (0..n0).map(PolyFn::var).collect(),
        PolyFn::one(),
    )?;
    let p1 = LBMorphism::new(
        apex.clone(),
        c1.clone(),
        (n0..n0 + n1).map(PolyFn::var).collect(),
        factor,
    )?;
    let form = p0.pull_form(w0)?.sub(&p1.pull_form(w1)?);
    let legs = [
        StructureSpec::graph_form(c0.clone(), w0.clone())?,
        StructureSpec::graph_form(c1.clone(), w1.clone())?,
    ];
    DualPairInstance::new(apex, form, legs, [p0, p1])
}

/// `J¹ℝⁿ = (x, p, u)` with `ϖ = −d_D(Σ pᵢ eˣⁱ + u e^𝟙)` and both legs `Gr 0 = J¹` on `ℝⁿ`.
pub fn zero_jacobi_pair(n: usize) -> Result<DualPairInstance, DualPairError> {
    let x = names("x", n);
    let mut all = x.clone();
    all.extend(names("p", n));
    all.push("u".into());
    let apex = chart(&all, Mode::Jacobi)?;
    let base = chart(&x, Mode::Jacobi)?;
    let mut eta = vec![PolyFn::zero(); 2 * n + 2];
    for i in 0..n {
        eta[i] = PolyFn::var(n + i);
    }
    eta[2 * n + 1] = PolyFn::var(2 * n);
    let form = FormField::from_vec(apex.model(), &eta).d()?.neg();
    let leg = StructureSpec::graph_bider(base.clone(), Matrix::zeros(n + 1, n + 1))?;
    let s = LBMorphism::projection(&apex, &base, &(0..n).collect::<Vec<_>>())?;
    DualPairInstance::new(apex, form, [leg.clone(), leg], [s.clone(), s])
}

/// `T*ℝⁿ = (x, p)` with `ω = Σ dxᵢ ∧ dpᵢ`, both legs the zero Poisson structure.
pub fn cotangent_pair(n: usize) -> Result<DualPairInstance, DualPairError> {
    let x = names("x", n);
    let mut all = x.clone();
    all.extend(names("p", n));
    let apex = chart(&all, Mode::Dirac)?;
    let base = chart(&x, Mode::Dirac)?;
    let mut w = FormField::zero(apex.model(), 2);
    for i in 0..n {
        w.set(&[i, n + i], PolyFn::one());
    }
    let leg = StructureSpec::graph_bider(base.clone(), Matrix::zeros(n, n))?;
    let s = LBMorphism::projection(&apex, &base, &(0..n).collect::<Vec<_>>())?;
    DualPairInstance::new(apex, w, [leg.clone(), leg], [s.clone(), s])
}

fn lcps_flat(c: &Chart, omega: Matrix<PolyFn>) -> Result<StructureSpec, DualPairError> {
    Ok(StructureSpec::lcps(
        c.clone(),
        vec![PolyFn::zero(); c.dim()],
        omega,
    )?)
}

/// Apex `(x, y, c)` over `ℝⁿ × ℝⁿ × ℝ` with `S = x`, `T = y` and `ϖ = −d_D(c e^𝟙) + S*d_Dη₀`.
/// The legs are `TM ⊕ ⟨𝟙*⟩` gauged by `d_Dη₀` on the left and left alone on the right.
pub fn lcps_split(n: usize, eta0: Option<&[&str]>) -> Result<DualPairInstance, DualPairError> {
    let x = names("x", n);
    let y = names("y", n);
    let mut all = x.clone();
    all.extend(y.clone());
    all.push("c".into());
    let apex = chart(&all, Mode::Jacobi)?;
    let c0 = chart(&x, Mode::Jacobi)?;
    let c1 = chart(&y, Mode::Jacobi)?;
    let s = LBMorphism::projection(&apex, &c0, &(0..n).collect::<Vec<_>>())?;
    let t = LBMorphism::projection(&apex, &c1, &(n..2 * n).collect::<Vec<_>>())?;
    let mut form = form2(&apex, &[(2 * n, 2 * n + 1, "-1")])?;
    let mut omega = Matrix::zeros(n, n);
    if let Some(eta) = eta0 {
        let b = exact_form(&c0, eta)?;
        form = form.add(&s.pull_form(&b)?);
        let bm = b.to_matrix();
        omega = Matrix::from_fn(n, n, |i, j| bm.get(i, j).clone());
    }
    let legs = [lcps_flat(&c0, omega)?, lcps_flat(&c1, Matrix::zeros(n, n))?];
    DualPairInstance::new(apex, form, legs, [s, t])
}

/// Apex `(x, v, c)` with `S = x`, `T = x + v`, `ϖ = −d_D(c e^𝟙)`, both legs `TM ⊕ ⟨𝟙*⟩`.
pub fn lcps_gluing(n: usize) -> Result<DualPairInstance, DualPairError> {
    let x = names("x", n);
    let mut all = x.clone();
    all.extend(names("v", n));
    all.push("c".into());
    let apex = chart(&all, Mode::Jacobi)?;
    let base = chart(&x, Mode::Jacobi)?;
    let s = LBMorphism::projection(&apex, &base, &(0..n).collect::<Vec<_>>())?;
    let t = LBMorphism::new(
        apex.clone(),
        base.clone(),
        (0..n)
            .map(|i| PolyFn::var(i).add_ref(&PolyFn::var(n + i)))
            .collect(),
        PolyFn::one(),
    )?;
    let form = form2(&apex, &[(2 * n, 2 * n + 1, "-1")])?;
    let leg = lcps_flat(&base, Matrix::zeros(n, n))?;
    DualPairInstance::new(apex, form, [leg.clone(), leg], [s, t])
}

/// The same pair in the apex trivialization rescaled by `f`.
pub fn rescale(inst: &DualPairInstance, f: &str) -> Result<DualPairInstance, DualPairError> {
    let apex = inst.apex().clone();
    let r = LBMorphism::new(
        apex.clone(),
        apex.clone(),
        (0..apex.dim()).map(PolyFn::var).collect(),
        apex.parse(f)?,
    )?;
    let form = r.pull_form(inst.form())?;
    let maps = [inst.maps()[0].after(&r)?, inst.maps()[1].after(&r)?];
    DualPairInstance::new(apex, form, inst.legs().clone(), maps)
}

/// A named instance with optional leaf data and its expected verdict.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub instance: DualPairInstance,
    pub leaf: LeafTask,
    pub expect_pass: bool,
}

fn identity_leaf(inst: &DualPairInstance) -> LeafTask {
    LeafTask {
        leaf: Some(LBMorphism::identity(inst.apex())),
        slice: None,
    }
}

/// The fiber `x = 1` of `(x, rest) ↦ x` as a parametrization `rest ↦ (1, rest)`.
fn fiber_leaf(inst: &DualPairInstance, n: usize) -> Result<LeafTask, DualPairError> {
    let apex = inst.apex();
    let rest: Vec<String> = apex.coords()[n..].to_vec();
    let c = chart(&rest, apex.mode())?;
    let mut phi: Vec<PolyFn> = (0..n).map(|_| PolyFn::one()).collect();
    phi.extend((0..rest.len()).map(PolyFn::var));
    let leaf = LBMorphism::new(c, apex.clone(), phi, PolyFn::one())?;
    let xs: Vec<String> = apex.coords()[..n].to_vec();
    let q = chart(&xs, apex.mode())?;
    let mut sphi: Vec<PolyFn> = (0..n).map(PolyFn::var).collect();
    sphi.extend((0..rest.len()).map(|_| PolyFn::zero()));
    let slice = LBMorphism::new(q, apex.clone(), sphi, PolyFn::one())?;
    Ok(LeafTask {
        leaf: Some(leaf),
        slice: Some(slice),
    })
}

fn entry(name: &str, instance: DualPairInstance, leaf: LeafTask) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        instance,
        leaf,
        expect_pass: true,
    }
}

/// Verified instances in the given mode.
pub fn catalog(mode: Mode) -> Result<Vec<CatalogEntry>, DualPairError> {
    let mut out = Vec::new();
    match mode {
        Mode::Jacobi => {
            let line = |v: &str| chart(&[v.to_string()], Mode::Jacobi);
            let plane = |a: &str, b: &str| chart(&[a.to_string(), b.to_string()], Mode::Jacobi);
            let (cy, cz) = (line("y")?, line("z")?);
            let wy = form2(&cy, &[(0, 1, "1")])?;
            let wz = form2(&cz, &[(0, 1, "1 + z^2")])?;
            let p11 = product_pair(&cy, &wy, &cz, &wz)?;
            out.push(entry("product_line_line", p11.clone(), identity_leaf(&p11)));

            let cab = plane("a", "b")?;
            let wab = exact_form(&cab, &["0", "a", "0"])?;
            let p21 = product_pair(&cab, &wab, &line("z")?, &form2(&cz, &[(0, 1, "z")])?)?;
            out.push(entry(
                "product_plane_line",
                p21.clone(),
                identity_leaf(&p21),
            ));

            let cpq = plane("p", "q")?;
            let wab2 = exact_form(&cab, &["b", "0", "a*b"])?;
            let wpq = exact_form(&cpq, &["q^2", "0", "p"])?;
            let p22 = product_pair(&cab, &wab2, &cpq, &wpq)?;
            out.push(entry(
                "product_plane_plane",
                p22.clone(),
                identity_leaf(&p22),
            ));

            let zero = FormField::zero(cy.model(), 2);
            let czw = plane("z", "w")?;
            let p0 = product_pair(&cy, &zero, &czw, &exact_form(&czw, &["0", "z", "0"])?)?;
            out.push(entry("product_zero_plane", p0.clone(), identity_leaf(&p0)));

            let r = rescale(&p11, "1 + y^2")?;
            out.push(entry(
                "product_line_line_rescaled",
                r.clone(),
                identity_leaf(&r),
            ));

            for n in 1..=2 {
                let z = zero_jacobi_pair(n)?;
                let task = fiber_leaf(&z, n)?;
                out.push(entry(&format!("zero_jacobi_{n}"), z, task));
            }
            let s1 = lcps_split(1, None)?;
            out.push(entry("lcps_split_1", s1.clone(), identity_leaf(&s1)));
            let s2 = lcps_split(2, Some(&["0", "x1", "0"]))?;
            out.push(entry("lcps_split_2_gauged", s2.clone(), identity_leaf(&s2)));
            let g = lcps_gluing(1)?;
            out.push(entry("lcps_gluing_1", g.clone(), identity_leaf(&g)));
            let gr = rescale(&g, "1 + v^2")?;
            out.push(entry(
                "lcps_gluing_1_rescaled",
                gr.clone(),
                identity_leaf(&gr),
            ));

            let mirror = product_pair(&cz, &wz, &cy, &wy)?;
            let comp = compose(&p11, &mirror, CompositionSign::Plus)?;
            out.push(entry(
                "product_composed_with_mirror",
                comp.clone(),
                identity_leaf(&comp),
            ));

            let slice = pullback_slice(&s2)?;
            let mut sampler = crate::linalg::Sampler::new(11);
            let pb = transverse_pullback(
                &s2,
                [&slice, &LBMorphism::identity(s2.legs()[1].chart())],
                &mut sampler,
                6,
            )?;
            out.push(entry(
                "lcps_split_2_pullback",
                pb.clone(),
                identity_leaf(&pb),
            ));
        }
        Mode::Dirac => {
            let c = |v: &[&str]| {
                chart(
                    &v.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                    Mode::Dirac,
                )
            };
            let cab = c(&["a", "b"])?;
            let cz = c(&["z"])?;
            let cpq = c(&["p", "q"])?;
            let w0 = form2(&cab, &[(0, 1, "1 + a^2")])?;
            let p1 = product_pair(&cab, &w0, &cz, &FormField::zero(cz.model(), 2))?;
            out.push(entry(
                "dirac_product_plane_line",
                p1.clone(),
                identity_leaf(&p1),
            ));
            let p2 = product_pair(&cab, &w0, &cpq, &form2(&cpq, &[(0, 1, "p")])?)?;
            out.push(entry(
                "dirac_product_plane_plane",
                p2.clone(),
                identity_leaf(&p2),
            ));
            for n in 1..=2 {
                let t = cotangent_pair(n)?;
                let task = fiber_leaf(&t, n)?;
                out.push(entry(&format!("dirac_cotangent_{n}"), t, task));
            }
            let mirror = product_pair(&cz, &FormField::zero(cz.model(), 2), &cab, &w0)?;
            let comp = compose(&p1, &mirror, CompositionSign::Plus)?;
            out.push(entry(
                "dirac_product_composed_with_mirror",
                comp.clone(),
                identity_leaf(&comp),
            ));
        }
    }
    Ok(out)
}

/// `x₁ ↦ (x₁, 0)` into the first leg of [`lcps_split`] with `n = 2`.
pub fn pullback_slice(inst: &DualPairInstance) -> Result<LBMorphism, DualPairError> {
    let leg = inst.legs()[0].chart();
    let n = chart(&leg.coords()[..1], leg.mode())?;
    Ok(LBMorphism::new(
        n,
        leg.clone(),
        vec![PolyFn::var(0), PolyFn::zero()],
        PolyFn::one(),
    )?)
}
