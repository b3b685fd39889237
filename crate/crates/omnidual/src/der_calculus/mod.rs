//! Chart-level calculus on a trivialized line bundle: derivations, Atiyah forms,
//! the der-complex Cartan operations, the Dorfman bracket and Jacobi brackets.
//!
//! Forms are stored by components on the frame `{∂₁..∂ₙ, 𝟙}` (just `{∂ᵢ}` in dirac
//! mode). All frame brackets vanish, so `d_D` is the alternating sum of frame
//! actions: `∂ᵢ` differentiates and `𝟙` acts as the identity on sections.

mod forms;
pub mod random;

use serde::{Deserialize, Serialize};

use crate::exact_scalars::{PolyFn, Scalar, ScalarError, Vars};
use crate::omni_fiber::{FiberModel, Mode};

pub use forms::FormField;

pub const MAX_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CalculusError {
    #[error("charts differ")]
    ChartMismatch,
    #[error("form degree {0} exceeds the supported maximum")]
    DegreeOverflow(usize),
    #[error("contraction of a 0-form")]
    DegreeUnderflow,
    #[error("sections of the frame are not pairwise isotropic (pair {0}, {1})")]
    NotIsotropic(usize, usize),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("Atiyah form is not closed")]
    NotClosed,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Coordinates of a chart together with the mode of the frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    vars: Vars,
    mode: Mode,
}

impl Chart {
    pub fn new<S: AsRef<str>>(
        coords: impl IntoIterator<Item = S>,
        mode: Mode,
    ) -> Result<Self, ScalarError> {
        Ok(Chart {
            vars: Vars::new(coords)?,
            mode,
        })
    }

    pub fn from_vars(vars: Vars, mode: Mode) -> Self {
        Chart { vars, mode }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn coords(&self) -> &[String] {
        self.vars.names()
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn model(&self) -> FiberModel {
        FiberModel::new(self.dim(), self.mode)
    }

    pub fn with_mode(&self, mode: Mode) -> Chart {
        Chart {
            vars: self.vars.clone(),
            mode,
        }
    }

    pub fn parse(&self, s: &str) -> Result<PolyFn, ScalarError> {
        self.vars.parse(s)
    }

    pub fn display(&self, f: &PolyFn) -> String {
        self.vars.display(f)
    }
}

/// Action of frame element `a` on a section.
pub fn frame_apply(model: &FiberModel, a: usize, g: &PolyFn) -> PolyFn {
    if a < model.n {
        g.partial(a)
    } else {
        g.clone()
    }
}

/// A derivation `X + f·𝟙`, stored by its frame components `(X¹..Xⁿ, f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    model: FiberModel,
    comps: Vec<PolyFn>,
}

impl Derivation {
    pub fn new(model: FiberModel, comps: Vec<PolyFn>) -> Result<Self, CalculusError> {
        if comps.len() != model.d_dim() {
            return Err(CalculusError::Shape(format!(
                "derivation needs {} components",
                model.d_dim()
            )));
        }
        Ok(Derivation { model, comps })
    }

    /// `(X, f)` in jacobi mode; `f` is ignored in dirac mode and must be zero there.
    pub fn from_parts(model: FiberModel, x: Vec<PolyFn>, f: PolyFn) -> Result<Self, CalculusError> {
        if x.len() != model.n {
            return Err(CalculusError::Shape(format!(
                "vector part needs {} components",
                model.n
            )));
        }
        let mut comps = x;
        match model.mode {
            Mode::Jacobi => comps.push(f),
            Mode::Dirac if !f.is_zero() => {
                return Err(CalculusError::Shape("dirac mode has no 𝟙 component".into()))
            }
            Mode::Dirac => {}
        }
        Ok(Derivation { model, comps })
    }

    pub fn zero(model: FiberModel) -> Self {
        Derivation {
            model,
            comps: vec![PolyFn::zero(); model.d_dim()],
        }
    }

    /// Frame element `e_a`.
    pub fn frame(model: FiberModel, a: usize) -> Self {
        let mut d = Self::zero(model);
        d.comps[a] = PolyFn::one();
        d
    }

    pub fn one(model: FiberModel) -> Option<Self> {
        model.one_index().map(|i| Self::frame(model, i))
    }

    pub fn model(&self) -> &FiberModel {
        &self.model
    }

    pub fn comps(&self) -> &[PolyFn] {
        &self.comps
    }

    pub fn vector_part(&self) -> &[PolyFn] {
        &self.comps[..self.model.n]
    }

    pub fn scalar_part(&self) -> PolyFn {
        match self.model.one_index() {
            Some(i) => self.comps[i].clone(),
            None => PolyFn::zero(),
        }
    }

    /// The symbol `σ_Δ = X` acting on functions.
    pub fn symbol_apply(&self, g: &PolyFn) -> PolyFn {
        let mut acc = PolyFn::zero();
        for (i, x) in self.vector_part().iter().enumerate() {
            if !x.is_zero() {
                acc = acc.add_ref(&x.mul_ref(&g.partial(i)));
            }
        }
        acc
    }

    /// `Δλ = X(λ) + f·λ`.
    pub fn apply(&self, lambda: &PolyFn) -> PolyFn {
        self.symbol_apply(lambda)
            .add_ref(&self.scalar_part().mul_ref(lambda))
    }

    pub fn add(&self, o: &Self) -> Self {
        let comps = self
            .comps
            .iter()
            .zip(&o.comps)
            .map(|(a, b)| a.add_ref(b))
            .collect();
        Derivation {
            model: self.model,
            comps,
        }
    }

    pub fn scale(&self, g: &PolyFn) -> Self {
        Derivation {
            model: self.model,
            comps: self.comps.iter().map(|c| c.mul_ref(g)).collect(),
        }
    }

    /// Componentwise `∂ᵢ`, so that `[Δ, ∂ᵢ] = −∂ᵢΔ`.
    pub fn partial(&self, i: usize) -> Self {
        Derivation {
            model: self.model,
            comps: self.comps.iter().map(|c| c.partial(i)).collect(),
        }
    }

    /// `[Δ₁, Δ₂] = ([X₁,X₂], X₁(f₂) − X₂(f₁))`.
    pub fn commutator(&self, o: &Self) -> Result<Self, CalculusError> {
        if self.model != o.model {
            return Err(CalculusError::ChartMismatch);
        }
        let comps = self
            .comps
            .iter()
            .zip(&o.comps)
            .map(|(c1, c2)| self.symbol_apply(c2).sub_ref(&o.symbol_apply(c1)))
            .collect();
        Ok(Derivation {
            model: self.model,
            comps,
        })
    }

    /// `[Δ, e_a]` for a frame element.
    pub fn bracket_with_frame(&self, a: usize) -> Self {
        if a < self.model.n {
            let p = self.partial(a);
            Derivation {
                model: self.model,
                comps: p.comps.iter().map(|c| c.neg_ref()).collect(),
            }
        } else {
            Derivation::zero(self.model)
        }
    }

    pub fn at(&self, point: &[Scalar]) -> Result<Vec<Scalar>, ScalarError> {
        self.comps.iter().map(|c| c.eval(point)).collect()
    }
}

/// A section `(Δ, ψ)` of the omni-Lie algebroid over the chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionPair {
    pub delta: Derivation,
    pub psi: FormField,
}

impl SectionPair {
    pub fn new(delta: Derivation, psi: FormField) -> Result<Self, CalculusError> {
        if delta.model() != psi.model() || psi.degree() != 1 {
            return Err(CalculusError::ChartMismatch);
        }
        Ok(SectionPair { delta, psi })
    }

    /// Section whose components in `(d-part, j-part)` layout are `v`.
    pub fn from_components(model: FiberModel, v: &[PolyFn]) -> Result<Self, CalculusError> {
        let d = model.d_dim();
        if v.len() != 2 * d {
            return Err(CalculusError::Shape(format!(
                "section needs {} components",
                2 * d
            )));
        }
        Ok(SectionPair {
            delta: Derivation::new(model, v[..d].to_vec())?,
            psi: FormField::from_vec(model, &v[d..]),
        })
    }

    pub fn components(&self) -> Vec<PolyFn> {
        let mut v = self.delta.comps().to_vec();
        v.extend(self.psi.to_vec());
        v
    }

    pub fn model(&self) -> &FiberModel {
        self.delta.model()
    }
}

/// `⟨⟨(Δ₁,ψ₁),(Δ₂,ψ₂)⟩⟩ = ψ₁(Δ₂) + ψ₂(Δ₁)`.
pub fn section_pairing(u: &SectionPair, v: &SectionPair) -> Result<PolyFn, CalculusError> {
    if u.model() != v.model() {
        return Err(CalculusError::ChartMismatch);
    }
    Ok(u.psi.pair(&v.delta).add_ref(&v.psi.pair(&u.delta)))
}

/// `[[(Δ₁,ψ₁),(Δ₂,ψ₂)]] = ([Δ₁,Δ₂], 𝓛_{Δ₁}ψ₂ − ι_{Δ₂}d_Dψ₁)`.
pub fn dorfman(u: &SectionPair, v: &SectionPair) -> Result<SectionPair, CalculusError> {
    if u.model() != v.model() {
        return Err(CalculusError::ChartMismatch);
    }
    let delta = u.delta.commutator(&v.delta)?;
    let psi = v.psi.lie(&u.delta)?.sub(&u.psi.d()?.contract(&v.delta)?);
    Ok(SectionPair { delta, psi })
}

/// `Υ(X,Y,Z) = ⟨⟨X, [[Y,Z]]⟩⟩` on the triple `(i, j, k)` of frame sections.
/// The frame must be pairwise isotropic, otherwise `Υ` is not tensorial.
pub fn courant_tensor(
    frame: &[SectionPair],
    i: usize,
    j: usize,
    k: usize,
) -> Result<PolyFn, CalculusError> {
    check_isotropic(frame)?;
    let n = frame.len();
    if i >= n || j >= n || k >= n {
        return Err(CalculusError::Shape("triple index out of range".into()));
    }
    section_pairing(&frame[i], &dorfman(&frame[j], &frame[k])?)
}

pub fn check_isotropic(frame: &[SectionPair]) -> Result<(), CalculusError> {
    for a in 0..frame.len() {
        for b in a..frame.len() {
            if !section_pairing(&frame[a], &frame[b])?.is_zero() {
                return Err(CalculusError::NotIsotropic(a, b));
            }
        }
    }
    Ok(())
}

/// First nonzero Courant tensor value over all ordered triples, if any.
pub fn courant_witness(
    frame: &[SectionPair],
) -> Result<Option<((usize, usize, usize), PolyFn)>, CalculusError> {
    check_isotropic(frame)?;
    let n = frame.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = section_pairing(&frame[i], &dorfman(&frame[j], &frame[k])?)?;
                if !v.is_zero() {
                    return Ok(Some(((i, j, k), v)));
                }
            }
        }
    }
    Ok(None)
}

/// `{λ, μ} = J(j¹λ, j¹μ) = Σ J_ab (j¹λ)_a (j¹μ)_b`.
pub fn jacobi_bracket(
    model: &FiberModel,
    j: &[Vec<PolyFn>],
    lambda: &PolyFn,
    mu: &PolyFn,
) -> PolyFn {
    let d = model.d_dim();
    let jl: Vec<PolyFn> = (0..d).map(|a| frame_apply(model, a, lambda)).collect();
    let jm: Vec<PolyFn> = (0..d).map(|a| frame_apply(model, a, mu)).collect();
    let mut acc = PolyFn::zero();
    for a in 0..d {
        if jl[a].is_zero() {
            continue;
        }
        for b in 0..d {
            if j[a][b].is_zero() || jm[b].is_zero() {
                continue;
            }
            acc = acc.add_ref(&j[a][b].mul_ref(&jl[a]).mul_ref(&jm[b]));
        }
    }
    acc
}

fn check_skew(model: &FiberModel, j: &[Vec<PolyFn>]) -> Result<(), CalculusError> {
    let d = model.d_dim();
    if j.len() != d || j.iter().any(|r| r.len() != d) {
        return Err(CalculusError::Shape(format!(
            "biderivation must be {d}x{d}"
        )));
    }
    for a in 0..d {
        for b in a..d {
            if !j[a][b].add_ref(&j[b][a]).is_zero() {
                return Err(CalculusError::NotSkew);
            }
        }
    }
    Ok(())
}

/// `{λ,{μ,ν}} + {μ,{ν,λ}} + {ν,{λ,μ}}`.
pub fn jacobiator(
    model: &FiberModel,
    j: &[Vec<PolyFn>],
    lambda: &PolyFn,
    mu: &PolyFn,
    nu: &PolyFn,
) -> Result<PolyFn, CalculusError> {
    check_skew(model, j)?;
    let br = |a: &PolyFn, b: &PolyFn| jacobi_bracket(model, j, a, b);
    Ok(br(lambda, &br(mu, nu))
        .add_ref(&br(mu, &br(nu, lambda)))
        .add_ref(&br(nu, &br(lambda, mu))))
}

/// Sections on which the jacobiator is tested: `1` (jacobi mode only) and the coordinates.
///
/// The jacobiator of a biderivation bracket is a first-order operator in each slot.
/// A first-order operator `X + f` is fixed by its values on `1` (which gives `f`)
/// and on the coordinates (which give `X`), so vanishing on this set is vanishing.
pub fn jacobi_test_sections(model: &FiberModel) -> Vec<PolyFn> {
    let mut v = Vec::new();
    if model.mode == Mode::Jacobi {
        v.push(PolyFn::one());
    }
    v.extend((0..model.n).map(PolyFn::var));
    v
}

/// First nonzero jacobiator over the test set, if any.
pub fn jacobiator_witness(
    model: &FiberModel,
    j: &[Vec<PolyFn>],
) -> Result<Option<([usize; 3], PolyFn)>, CalculusError> {
    let t = jacobi_test_sections(model);
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            for c in b + 1..t.len() {
                let v = jacobiator(model, j, &t[a], &t[b], &t[c])?;
                if !v.is_zero() {
                    return Ok(Some(([a, b, c], v)));
                }
            }
        }
    }
    Ok(None)
}

/// `θ ↦ ϖ = d_D(θ∘σ)`: the presymplectic Atiyah form of an `L`-valued 1-form.
pub fn contact_to_atiyah(model: &FiberModel, theta: &[PolyFn]) -> Result<FormField, CalculusError> {
    if model.mode != Mode::Jacobi || theta.len() != model.n {
        return Err(CalculusError::Shape(
            "contact forms need jacobi mode and n components".into(),
        ));
    }
    let mut comps = theta.to_vec();
    comps.push(PolyFn::zero());
    FormField::from_vec(*model, &comps).d()
}

/// `ϖ ↦ θ` with `θ∘σ = ι_𝟙ϖ`; requires `d_Dϖ = 0`.
pub fn atiyah_to_contact(form: &FormField) -> Result<Vec<PolyFn>, CalculusError> {
    let model = *form.model();
    let Some(one) = Derivation::one(model) else {
        return Err(CalculusError::Shape(
            "contact forms need jacobi mode".into(),
        ));
    };
    if form.degree() != 2 {
        return Err(CalculusError::Shape("expected a 2-form".into()));
    }
    if !form.d()?.is_zero() {
        return Err(CalculusError::NotClosed);
    }
    let v = form.contract(&one)?.to_vec();
    Ok(v[..model.n].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactDirection {
    ToAtiyah,
    ToContact,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(names: &[&str]) -> Chart {
        Chart::new(names.iter().copied(), Mode::Jacobi).unwrap()
    }

    fn der(c: &Chart, x: &[&str], f: &str) -> Derivation {
        Derivation::from_parts(
            c.model(),
            x.iter().map(|s| c.parse(s).unwrap()).collect(),
            c.parse(f).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn commutator_examples() {
        let c = chart(&["x"]);
        let a = der(&c, &["1"], "0");
        let b = der(&c, &["x"], "0");
        assert_eq!(a.commutator(&a).unwrap(), Derivation::zero(c.model()));
        assert_eq!(a.commutator(&b).unwrap(), a);
        let mult = der(&c, &["0"], "x");
        // oracle: act on the test sections 1 and x
        let br = a.commutator(&mult).unwrap();
        for s in ["1", "x"] {
            let lam = c.parse(s).unwrap();
            let direct = a
                .apply(&mult.apply(&lam))
                .sub_ref(&mult.apply(&a.apply(&lam)));
            assert_eq!(br.apply(&lam), direct);
        }
        assert_eq!(br, der(&c, &["0"], "1"));
    }

    #[test]
    fn jet_prolongation_pairs_to_action() {
        let c = chart(&["x", "y"]);
        let lam = c.parse("x^2*y + 3*y").unwrap();
        let dl = FormField::zero_form(c.model(), lam.clone()).d().unwrap();
        let delta = der(&c, &["y", "x*y"], "x - 1");
        assert_eq!(dl.pair(&delta), delta.apply(&lam));
    }

    #[test]
    fn canonical_contact_is_jacobi() {
        let c = chart(&["q", "u", "p"]);
        let theta = vec![c.parse("-p").unwrap(), PolyFn::one(), PolyFn::zero()];
        let w = contact_to_atiyah(&c.model(), &theta).unwrap();
        let m = w.to_matrix();
        assert!(!m.det().is_zero());
        assert_eq!(atiyah_to_contact(&w).unwrap(), theta);
        let j = m.inverse().unwrap().row_vecs();
        assert_eq!(jacobiator_witness(&c.model(), &j).unwrap(), None);
    }

    #[test]
    fn dirac_mode_poisson_bracket() {
        let c = Chart::new(["x", "y"], Mode::Dirac).unwrap();
        let j = vec![
            vec![PolyFn::zero(), PolyFn::one()],
            vec![PolyFn::int(-1), PolyFn::zero()],
        ];
        let x = c.parse("x").unwrap();
        let y = c.parse("y").unwrap();
        assert_eq!(jacobi_bracket(&c.model(), &j, &x, &y), PolyFn::one());
        assert_eq!(jacobi_test_sections(&c.model()).len(), 2);
    }
}
