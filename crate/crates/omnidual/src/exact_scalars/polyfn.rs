use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Poly, Scalar, ScalarError};

/// Reduced quotient of polynomials. `num` and `den` are coprime and `den` is grlex-monic,
/// so structural equality is equality of functions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyFn {
    num: Poly,
    den: Poly,
}

impl PolyFn {
    pub fn zero() -> Self {
        PolyFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        PolyFn::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        PolyFn {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        PolyFn::constant(Scalar::from_int(n))
    }

    pub fn var(i: usize) -> Self {
        PolyFn {
            num: Poly::var(i),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        PolyFn {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn new(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return PolyFn::zero();
        }
        if let Some(c) = den.constant_value() {
            let inv = c.inv().expect("nonzero denominator");
            return PolyFn {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            PolyFn { num, den }
        } else {
            let inv = lc.inv().unwrap();
            PolyFn {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        self.num.max_var().max(self.den.max_var())
    }

    pub fn add_ref(&self, o: &PolyFn) -> PolyFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return PolyFn {
                    num: self.num.add(&o.num),
                    den: Poly::one(),
                };
            }
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::reduce(num, self.den.mul(&o.den))
    }

    pub fn neg_ref(&self) -> PolyFn {
        PolyFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub_ref(&self, o: &PolyFn) -> PolyFn {
        self.add_ref(&o.neg_ref())
    }

    pub fn mul_ref(&self, o: &PolyFn) -> PolyFn {
        if self.is_zero() || o.is_zero() {
            return PolyFn::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return PolyFn {
                num: self.num.mul(&o.num),
                den: Poly::one(),
            };
        }
        Self::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, s: &Scalar) -> PolyFn {
        if s.is_zero() {
            return PolyFn::zero();
        }
        PolyFn {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Option<PolyFn> {
        if self.is_zero() {
            return None;
        }
        Some(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn div_ref(&self, o: &PolyFn) -> Result<PolyFn, ScalarError> {
        let i = o.inv().ok_or(ScalarError::DivisionByZero)?;
        Ok(self.mul_ref(&i))
    }

    pub fn pow(&self, e: u32) -> PolyFn {
        PolyFn {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Quotient rule on the index-addressed variable.
    pub fn partial(&self, v: usize) -> PolyFn {
        if self.den.is_one() {
            return PolyFn::from_poly(self.num.partial(v));
        }
        let n = self
            .num
            .partial(v)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.partial(v)));
        Self::reduce(n, self.den.mul(&self.den))
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar, ScalarError> {
        let d = self.den.eval(point).ok_or(ScalarError::MissingAssignment)?;
        if d.is_zero() {
            return Err(ScalarError::PoleAtPoint);
        }
        let n = self.num.eval(point).ok_or(ScalarError::MissingAssignment)?;
        Ok(&n / &d)
    }

    /// Composition: variable `i` replaced by `subs[i]`.
    pub fn substitute(&self, subs: &[PolyFn]) -> Result<PolyFn, ScalarError> {
        let n = subst_poly(&self.num, subs)?;
        let d = subst_poly(&self.den, subs)?;
        n.div_ref(&d).map_err(|_| ScalarError::PoleAtPoint)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let n = self.num.display_with(names);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.display_with(names);
        let wrap = |s: String, p: &Poly| {
            if p.num_terms() > 1 || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        };
        // den is monic, so a single term is a bare monomial
        let d = if self.den.num_terms() == 1 && !d.contains('*') {
            d
        } else {
            format!("({d})")
        };
        format!("{}/{}", wrap(n, &self.num), d)
    }
}

fn subst_poly(p: &Poly, subs: &[PolyFn]) -> Result<PolyFn, ScalarError> {
    let mut acc = PolyFn::zero();
    for (m, c) in p.terms() {
        let mut t = PolyFn::constant(c.clone());
        for (i, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let s = subs.get(i).ok_or(ScalarError::MissingAssignment)?;
            t = t.mul_ref(&s.pow(e));
        }
        acc = acc.add_ref(&t);
    }
    Ok(acc)
}

impl From<Scalar> for PolyFn {
    fn from(c: Scalar) -> Self {
        PolyFn::constant(c)
    }
}

impl From<Poly> for PolyFn {
    fn from(p: Poly) -> Self {
        PolyFn::from_poly(p)
    }
}

impl fmt::Debug for PolyFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

impl Add for PolyFn {
    type Output = PolyFn;
    fn add(self, rhs: PolyFn) -> PolyFn {
        self.add_ref(&rhs)
    }
}

impl Sub for PolyFn {
    type Output = PolyFn;
    fn sub(self, rhs: PolyFn) -> PolyFn {
        self.sub_ref(&rhs)
    }
}

impl Mul for PolyFn {
    type Output = PolyFn;
    fn mul(self, rhs: PolyFn) -> PolyFn {
        self.mul_ref(&rhs)
    }
}

impl Neg for PolyFn {
    type Output = PolyFn;
    fn neg(self) -> PolyFn {
        self.neg_ref()
    }
}

impl<'a> Add<&'a PolyFn> for &'a PolyFn {
    type Output = PolyFn;
    fn add(self, rhs: &PolyFn) -> PolyFn {
        self.add_ref(rhs)
    }
}

impl<'a> Sub<&'a PolyFn> for &'a PolyFn {
    type Output = PolyFn;
    fn sub(self, rhs: &PolyFn) -> PolyFn {
        self.sub_ref(rhs)
    }
}

impl<'a> Mul<&'a PolyFn> for &'a PolyFn {
    type Output = PolyFn;
    fn mul(self, rhs: &PolyFn) -> PolyFn {
        self.mul_ref(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> PolyFn {
        PolyFn::var(0)
    }
    fn y() -> PolyFn {
        PolyFn::var(1)
    }

    #[test]
    fn quotient_rule() {
        let f = (x() + y()).div_ref(&(x() - y())).unwrap();
        let expected = (PolyFn::int(-2) * y())
            .div_ref(&(x() - y()).pow(2))
            .unwrap();
        assert_eq!(f.partial(0), expected);
    }

    #[test]
    fn eval_and_pole() {
        let f = (x() + y()).div_ref(&(x() - y())).unwrap();
        let p = [Scalar::from_int(3), Scalar::from_int(1)];
        assert_eq!(f.eval(&p).unwrap(), Scalar::from_int(2));
        let g = x().div_ref(&y()).unwrap();
        let q = [Scalar::from_int(1), Scalar::zero()];
        assert_eq!(g.eval(&q), Err(ScalarError::PoleAtPoint));
    }

    #[test]
    fn cancels_common_factor() {
        let f = ((x() + y()) * (x() - y()))
            .div_ref(&(PolyFn::int(2) * (x() + y())))
            .unwrap();
        assert_eq!(f, (x() - y()).scale(&Scalar::from_ratio(1, 2)));
        assert!(f.is_polynomial());
    }

    #[test]
    fn substitution() {
        let f = x().div_ref(&(y() + PolyFn::one())).unwrap();
        let g = f.substitute(&[y() * y(), x()]).unwrap();
        assert_eq!(g, (y() * y()).div_ref(&(x() + PolyFn::one())).unwrap());
    }
}
