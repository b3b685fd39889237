//! Random polynomial data for property tests of the calculus.

use super::{Derivation, FormField, SectionPair};
use crate::exact_scalars::{Monomial, Poly, PolyFn, Scalar};
use crate::linalg::Sampler;
use crate::omni_fiber::FiberModel;

/// Polynomial in `n` variables of total degree at most `deg`, with a few terms
/// and coefficients in `[-3, 3]`.
pub fn polynomial(s: &mut Sampler, n: usize, deg: u32) -> PolyFn {
    let terms = s.int(0, 3);
    let mut p = Poly::zero();
    for _ in 0..terms {
        let mut exps = vec![0u32; n];
        let mut left = s.int(0, deg as i64) as u32;
        while left > 0 && n > 0 {
            let i = s.int(0, n as i64 - 1) as usize;
            exps[i] += 1;
            left -= 1;
        }
        p = p.add(&Poly::term(
            Scalar::from_int(s.int(-3, 3)),
            Monomial::new(exps),
        ));
    }
    PolyFn::from_poly(p)
}

pub fn derivation(s: &mut Sampler, model: &FiberModel, deg: u32) -> Derivation {
    let comps = (0..model.d_dim())
        .map(|_| polynomial(s, model.n, deg))
        .collect();
    Derivation::new(*model, comps).expect("component count matches")
}

pub fn form(s: &mut Sampler, model: &FiberModel, degree: usize, deg: u32) -> FormField {
    let mut f = FormField::zero(*model, degree);
    for idx in super::forms::subsets(model.d_dim(), degree) {
        f.set(&idx, polynomial(s, model.n, deg));
    }
    f
}

pub fn section(s: &mut Sampler, model: &FiberModel, deg: u32) -> SectionPair {
    SectionPair {
        delta: derivation(s, model, deg),
        psi: form(s, model, 1, deg),
    }
}
