//! Exact rationals, multivariate polynomials and rational functions.

mod expr;
mod poly;
mod polyfn;
mod scalar;

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::Neg;

pub use expr::{parse, ExprJson};
pub use poly::{Monomial, Poly};
pub use polyfn::PolyFn;
pub use scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the sample point")]
    PoleAtPoint,
    #[error("unknown coordinate '{0}'")]
    UnknownCoordinate(String),
    #[error("point does not assign every variable in use")]
    MissingAssignment,
    #[error("duplicate coordinate '{0}'")]
    DuplicateCoordinate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// The scalar field of a matrix: exact rationals pointwise, rational functions symbolically.
pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_f(&self, o: &Self) -> Self;
    fn sub_f(&self, o: &Self) -> Self;
    fn mul_f(&self, o: &Self) -> Self;
    fn neg_f(&self) -> Self;
    fn inv_f(&self) -> Option<Self>;
    fn from_scalar(s: Scalar) -> Self;

    fn div_f(&self, o: &Self) -> Self {
        self.mul_f(&o.inv_f().expect("division by zero field element"))
    }

    fn from_int(n: i64) -> Self {
        Self::from_scalar(Scalar::from_int(n))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_f(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_f(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_f(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_f(&self) -> Self {
        -self
    }
    fn inv_f(&self) -> Option<Self> {
        self.inv()
    }
    fn from_scalar(s: Scalar) -> Self {
        s
    }
}

impl Field for PolyFn {
    fn zero() -> Self {
        PolyFn::zero()
    }
    fn one() -> Self {
        PolyFn::one()
    }
    fn is_zero(&self) -> bool {
        PolyFn::is_zero(self)
    }
    fn add_f(&self, o: &Self) -> Self {
        self.add_ref(o)
    }
    fn sub_f(&self, o: &Self) -> Self {
        self.sub_ref(o)
    }
    fn mul_f(&self, o: &Self) -> Self {
        self.mul_ref(o)
    }
    fn neg_f(&self) -> Self {
        self.neg_ref()
    }
    fn inv_f(&self) -> Option<Self> {
        self.inv()
    }
    fn from_scalar(s: Scalar) -> Self {
        PolyFn::constant(s)
    }
}

/// Something that can be evaluated to a field element, either at a rational
/// point or by substituting rational functions for the variables.
pub trait PointEval {
    fn at(&self, point: &[Scalar]) -> Result<Scalar, ScalarError>;
    fn subst(&self, subs: &[PolyFn]) -> Result<PolyFn, ScalarError>;
}

impl PointEval for PolyFn {
    fn at(&self, point: &[Scalar]) -> Result<Scalar, ScalarError> {
        self.eval(point)
    }
    fn subst(&self, subs: &[PolyFn]) -> Result<PolyFn, ScalarError> {
        self.substitute(subs)
    }
}

/// Ordered coordinate names; variable `i` of a [`PolyFn`] is `names[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vars {
    names: Vec<String>,
}

impl Vars {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self, ScalarError> {
        let names: Vec<String> = names.into_iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ScalarError::DuplicateCoordinate(n.clone()));
            }
        }
        Ok(Vars { names })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, ScalarError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ScalarError::UnknownCoordinate(name.to_string()))
    }

    pub fn var(&self, name: &str) -> Result<PolyFn, ScalarError> {
        Ok(PolyFn::var(self.index_of(name)?))
    }

    pub fn parse(&self, src: &str) -> Result<PolyFn, ScalarError> {
        parse(src, self)
    }

    pub fn differentiate(&self, f: &PolyFn, coordinate: &str) -> Result<PolyFn, ScalarError> {
        Ok(f.partial(self.index_of(coordinate)?))
    }

    pub fn evaluate(
        &self,
        f: &PolyFn,
        point: &BTreeMap<String, Scalar>,
    ) -> Result<Scalar, ScalarError> {
        let mut pt = Vec::with_capacity(self.names.len());
        for n in &self.names {
            match point.get(n) {
                Some(v) => pt.push(v.clone()),
                None => pt.push(Scalar::zero()),
            }
        }
        for (i, n) in self.names.iter().enumerate() {
            if !point.contains_key(n) && (f.num().degree_in(i) > 0 || f.den().degree_in(i) > 0) {
                return Err(ScalarError::MissingAssignment);
            }
        }
        f.eval(&pt)
    }

    pub fn display(&self, f: &PolyFn) -> String {
        f.display_with(&self.names)
    }
}

impl Neg for &PolyFn {
    type Output = PolyFn;
    fn neg(self) -> PolyFn {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xy() -> Vars {
        Vars::new(["x", "y"]).unwrap()
    }

    #[test]
    fn named_differentiation() {
        let v = xy();
        let f = v.parse("x^2*y").unwrap();
        assert_eq!(v.differentiate(&f, "x").unwrap(), v.parse("2*x*y").unwrap());
        assert!(v.differentiate(&PolyFn::one(), "x").unwrap().is_zero());
        assert_eq!(
            v.differentiate(&f, "z"),
            Err(ScalarError::UnknownCoordinate("z".into()))
        );
    }

    #[test]
    fn named_evaluation() {
        let v = Vars::new(["x"]).unwrap();
        let f = v.parse("x^2 + 1").unwrap();
        let pt = BTreeMap::from([("x".to_string(), Scalar::from_int(2))]);
        assert_eq!(v.evaluate(&f, &pt).unwrap(), Scalar::from_int(5));
        let w = xy();
        let g = w.parse("x/y").unwrap();
        let pt = BTreeMap::from([
            ("x".to_string(), Scalar::one()),
            ("y".to_string(), Scalar::zero()),
        ]);
        assert_eq!(w.evaluate(&g, &pt), Err(ScalarError::PoleAtPoint));
    }

    fn small_poly() -> impl Strategy<Value = PolyFn> {
        prop::collection::vec((-3i64..=3, 0u32..3, 0u32..3), 1..4).prop_map(|ts| {
            ts.into_iter().fold(PolyFn::zero(), |acc, (c, a, b)| {
                acc + PolyFn::int(c) * PolyFn::var(0).pow(a) * PolyFn::var(1).pow(b)
            })
        })
    }

    fn small_ratfn() -> impl Strategy<Value = PolyFn> {
        (small_poly(), small_poly())
            .prop_filter_map("nonzero denominator", |(n, d)| n.div_ref(&d).ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_rule(f in small_ratfn(), g in small_ratfn()) {
            let lhs = (&f * &g).partial(0);
            let rhs = &(&f.partial(0) * &g) + &(&f * &g.partial(0));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn normal_form(f in small_ratfn(), g in small_ratfn()) {
            // cross-multiplied identity decides functional equality independently
            let same = f.num().mul(g.den()) == g.num().mul(f.den());
            prop_assert_eq!(same, f == g);
            let h = &f * &g;
            let back = h.div_ref(&g);
            if !g.is_zero() {
                prop_assert_eq!(back.unwrap(), f.clone());
            }
        }

        #[test]
        fn derivative_matches_finite_difference(f in small_ratfn(), a in -5i64..5, b in -5i64..5) {
            let p = [Scalar::from_int(a), Scalar::from_int(b)];
            let h = Scalar::from_ratio(1, 1_000_000);
            let plus = [&p[0] + &h, p[1].clone()];
            let minus = [&p[0] - &h, p[1].clone()];
            if let (Ok(d), Ok(fp), Ok(fm)) = (f.partial(0).eval(&p), f.eval(&plus), f.eval(&minus)) {
                let fd = (&fp - &fm) / (&h + &h);
                let err = (&fd - &d).abs().to_f64();
                prop_assert!(err < 1e-3 * (1.0 + d.abs().to_f64()), "err {}", err);
            }
        }
    }
}
