use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::Scalar;

/// Exponent vector with trailing zeros trimmed, so `x0` and `x0*x1^0` are the same key.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let e = (0..n).map(|i| self.exp(i) + other.exp(i)).collect();
        Monomial::new(e)
    }

    /// `self / other` when it is a monomial.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            if other.0[self.0.len()..].iter().any(|&e| e > 0) {
                return None;
            }
        }
        let mut e = self.0.clone();
        for (i, &b) in other.0.iter().enumerate() {
            if i >= e.len() {
                break;
            }
            if e[i] < b {
                return None;
            }
            e[i] -= b;
        }
        Some(Monomial::new(e))
    }

    fn with_exp(&self, i: usize, k: u32) -> Monomial {
        let mut e = self.0.clone();
        if e.len() <= i {
            e.resize(i + 1, 0);
        }
        e[i] = k;
        Monomial::new(e)
    }

    fn max_var(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }
}

impl Ord for Monomial {
    // graded lex: total degree first, then the earlier variable wins
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let n = self.0.len().max(other.0.len());
        for i in 0..n {
            match self.exp(i).cmp(&other.exp(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse multivariate polynomial over the rationals, variables addressed by index.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(i: usize) -> Self {
        Poly::term(Scalar::one(), Monomial::var(i))
    }

    pub fn term(c: Scalar, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::one()).is_some_and(|c| c.is_one())
    }

    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Scalar {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.leading().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.keys().filter_map(|m| m.max_var()).max()
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let remove = match self.terms.get_mut(&m) {
            Some(e) => {
                *e += c;
                e.is_zero()
            }
            None => {
                self.terms.insert(m.clone(), c.clone());
                false
            }
        };
        if remove {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c);
        }
        r
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), &-c);
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, s: &Scalar) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        let mut r = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                r.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn partial(&self, v: usize) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            let k = m.exp(v);
            if k == 0 {
                continue;
            }
            r.add_term(m.with_exp(v, k - 1), &(c * Scalar::from_int(k as i64)));
        }
        r
    }

    /// Missing coordinates are an error only if a term actually uses them.
    pub fn eval(&self, point: &[Scalar]) -> Option<Scalar> {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                t = t * point.get(i)?.pow(e);
            }
            acc += &t;
        }
        Some(acc)
    }

    /// Coefficients in `x_v`: entry k multiplies `x_v^k`.
    pub fn coeffs_in(&self, v: usize) -> Vec<Poly> {
        let d = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); d + 1];
        for (m, c) in &self.terms {
            let k = m.exp(v);
            out[k as usize].add_term(m.with_exp(v, 0), c);
        }
        out
    }

    pub fn from_coeffs_in(v: usize, coeffs: &[Poly]) -> Poly {
        let mut r = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            for (m, s) in &c.terms {
                let e = m.exp(v) + k as u32;
                r.add_term(m.with_exp(v, e), s);
            }
        }
        r
    }

    /// Exact quotient, `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&c.inv()?));
        }
        let (ld, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let lc_inv = lc.inv()?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((lm, c)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = lm.div(&ld)?;
            let qc = &c * &lc_inv;
            r = r.sub(&d.mul_term(&qm, &qc));
            q.add_term(qm, &qc);
        }
        Some(q)
    }

    /// Makes the grlex-leading coefficient 1.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Monic gcd over Q.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self == other {
            return self.monic();
        }
        gcd_rec(self, other).monic()
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = mono_str(m, names);
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&a.to_string());
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

fn mono_str(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
        if e == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

// gcd over vars <= main variable, recursion on the main variable.
fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let va = a.max_var().unwrap();
    let vb = b.max_var().unwrap();
    let v = va.max(vb);
    if va < v {
        return gcd_rec(a, &content_in(b, v));
    }
    if vb < v {
        return gcd_rec(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd_rec(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        if q.degree_in(v) == 0 {
            // q is a nonzero polynomial free of x_v but primitive: unit in the PRS sense
            p = Poly::one();
            break;
        }
        let r = prem(&p, &q, v);
        p = q;
        q = if r.is_zero() { r } else { prim_part_in(&r, v) };
    }
    prim_part_in(&p, v).mul(&c)
}

fn content_in(p: &Poly, v: usize) -> Poly {
    let mut g = Poly::zero();
    for c in p.coeffs_in(v) {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() {
            c.monic()
        } else {
            gcd_rec(&g, &c).monic()
        };
        if g.is_one() {
            break;
        }
    }
    g
}

fn prim_part_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides").monic()
}

fn prem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v);
    let lb = b.coeffs_in(v).pop().unwrap();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lr = r.coeffs_in(v).pop().unwrap();
        let shift = Poly::term(Scalar::one(), Monomial::var(v)).pow(dr - db);
        r = r.mul(&lb).sub(&lr.mul(&shift).mul(b));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Poly {
        Poly::var(0)
    }
    fn y() -> Poly {
        Poly::var(1)
    }
    fn c(n: i64) -> Poly {
        Poly::constant(Scalar::from_int(n))
    }

    #[test]
    fn grlex_order() {
        let a = Monomial::new(vec![2]);
        let b = Monomial::new(vec![1, 1]);
        let cc = Monomial::new(vec![0, 3]);
        assert!(a > b);
        assert!(cc > a);
        assert_eq!(Monomial::new(vec![1, 0, 0]), Monomial::var(0));
    }

    #[test]
    fn partial_power_rule() {
        let p = x().pow(2).mul(&y());
        assert_eq!(p.partial(0), c(2).mul(&x()).mul(&y()));
        assert!(c(1).partial(0).is_zero());
    }

    #[test]
    fn exact_division() {
        let a = x().add(&y());
        let b = x().sub(&y());
        let p = a.mul(&b).mul(&a);
        assert_eq!(p.div_exact(&a).unwrap(), a.mul(&b));
        assert!(p.div_exact(&x()).is_none());
    }

    #[test]
    fn gcd_multivariate() {
        let a = x().add(&y());
        let b = x().sub(&c(2).mul(&y()));
        let z = Poly::var(2);
        let g = a.mul(&b).gcd(&a.mul(&z.add(&c(1))));
        assert_eq!(g, a.monic());
        assert!(x().gcd(&y()).is_one());
        let h = x().mul(&y()).sub(&c(3)).pow(2);
        assert_eq!(h.mul(&a).gcd(&h.mul(&b)), h.monic());
    }

    #[test]
    fn display() {
        let names = vec!["x".to_string(), "y".to_string()];
        let p = x().pow(2).mul(&c(3)).sub(&y()).add(&c(1));
        assert_eq!(p.display_with(&names), "3*x^2 - y + 1");
    }
}
