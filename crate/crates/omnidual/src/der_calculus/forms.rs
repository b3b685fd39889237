use std::collections::BTreeMap;

use super::{frame_apply, CalculusError, Derivation, MAX_DEGREE};
use crate::exact_scalars::{PolyFn, Scalar, ScalarError};
use crate::linalg::Matrix;
use crate::omni_fiber::FiberModel;

/// An `L`-valued Atiyah form of degree `k`, stored sparsely by strictly increasing
/// frame multi-indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormField {
    model: FiberModel,
    degree: usize,
    comps: BTreeMap<Vec<usize>, PolyFn>,
}

/// Sorts `idx`, returning the permutation sign, or `None` on a repeated index.
fn sort_signed(idx: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut v = idx.to_vec();
    let mut odd = false;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, odd))
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl FormField {
    pub fn zero(model: FiberModel, degree: usize) -> Self {
        FormField {
            model,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn zero_form(model: FiberModel, g: PolyFn) -> Self {
        let mut f = Self::zero(model, 0);
        f.set(&[], g);
        f
    }

    pub fn from_vec(model: FiberModel, v: &[PolyFn]) -> Self {
        let mut f = Self::zero(model, 1);
        for (i, c) in v.iter().enumerate() {
            f.set(&[i], c.clone());
        }
        f
    }

    pub fn from_matrix(model: FiberModel, m: &Matrix<PolyFn>) -> Result<Self, CalculusError> {
        let d = model.d_dim();
        if m.rows() != d || m.cols() != d {
            return Err(CalculusError::Shape(format!(
                "2-form needs a {d}x{d} matrix"
            )));
        }
        if !m.is_skew() {
            return Err(CalculusError::NotSkew);
        }
        let mut f = Self::zero(model, 2);
        for i in 0..d {
            for j in i + 1..d {
                f.set(&[i, j], m.get(i, j).clone());
            }
        }
        Ok(f)
    }

    pub fn from_fn(model: FiberModel, degree: usize, g: impl Fn(&[usize]) -> PolyFn) -> Self {
        let mut f = Self::zero(model, degree);
        for s in subsets(model.d_dim(), degree) {
            let v = g(&s);
            f.set(&s, v);
        }
        f
    }

    pub fn model(&self) -> &FiberModel {
        &self.model
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Nonzero components on increasing multi-indices.
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &PolyFn)> {
        self.comps.iter()
    }

    /// Component on an arbitrary multi-index, with the alternating sign.
    pub fn get(&self, idx: &[usize]) -> PolyFn {
        match sort_signed(idx) {
            None => PolyFn::zero(),
            Some((s, odd)) => match self.comps.get(&s) {
                None => PolyFn::zero(),
                Some(c) if odd => c.neg_ref(),
                Some(c) => c.clone(),
            },
        }
    }

    pub fn set(&mut self, idx: &[usize], v: PolyFn) {
        assert_eq!(idx.len(), self.degree, "multi-index length");
        let Some((s, odd)) = sort_signed(idx) else {
            assert!(v.is_zero(), "repeated index with nonzero value");
            return;
        };
        let v = if odd { v.neg_ref() } else { v };
        if v.is_zero() {
            self.comps.remove(&s);
        } else {
            self.comps.insert(s, v);
        }
    }

    pub fn to_vec(&self) -> Vec<PolyFn> {
        assert_eq!(self.degree, 1);
        (0..self.model.d_dim()).map(|i| self.get(&[i])).collect()
    }

    pub fn to_matrix(&self) -> Matrix<PolyFn> {
        assert_eq!(self.degree, 2);
        let d = self.model.d_dim();
        Matrix::from_fn(d, d, |i, j| self.get(&[i, j]))
    }

    pub fn scalar(&self) -> PolyFn {
        assert_eq!(self.degree, 0);
        self.get(&[])
    }

    fn zip(&self, o: &Self, f: impl Fn(&PolyFn, &PolyFn) -> PolyFn) -> Self {
        assert_eq!(
            (self.model, self.degree),
            (o.model, o.degree),
            "form shapes differ"
        );
        let mut out = Self::zero(self.model, self.degree);
        let zero = PolyFn::zero();
        let keys: std::collections::BTreeSet<&Vec<usize>> =
            self.comps.keys().chain(o.comps.keys()).collect();
        for k in keys {
            let v = f(
                self.comps.get(k).unwrap_or(&zero),
                o.comps.get(k).unwrap_or(&zero),
            );
            if !v.is_zero() {
                out.comps.insert(k.clone(), v);
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub_ref(b))
    }

    pub fn neg(&self) -> Self {
        self.scale(&PolyFn::int(-1))
    }

    pub fn scale(&self, g: &PolyFn) -> Self {
        let mut out = Self::zero(self.model, self.degree);
        for (k, v) in &self.comps {
            let w = v.mul_ref(g);
            if !w.is_zero() {
                out.comps.insert(k.clone(), w);
            }
        }
        out
    }

    /// `(d_Dω)_{i₀..i_k} = Σ_m (−1)^m e_{i_m}(ω_{..î_m..})`.
    pub fn d(&self) -> Result<Self, CalculusError> {
        let k = self.degree + 1;
        if k > MAX_DEGREE {
            return Err(CalculusError::DegreeOverflow(k));
        }
        let mut out = Self::zero(self.model, k);
        for s in subsets(self.model.d_dim(), k) {
            let mut acc = PolyFn::zero();
            for m in 0..k {
                let mut rest = s.clone();
                let a = rest.remove(m);
                let Some(c) = self.comps.get(&rest) else {
                    continue;
                };
                let t = frame_apply(&self.model, a, c);
                acc = if m % 2 == 0 {
                    acc.add_ref(&t)
                } else {
                    acc.sub_ref(&t)
                };
            }
            out.set(&s, acc);
        }
        Ok(out)
    }

    /// `(ι_Δω)_J = Σ_a Δ^a ω_{aJ}`.
    pub fn contract(&self, delta: &Derivation) -> Result<Self, CalculusError> {
        if self.degree == 0 {
            return Err(CalculusError::DegreeUnderflow);
        }
        if delta.model() != &self.model {
            return Err(CalculusError::ChartMismatch);
        }
        let mut out = Self::zero(self.model, self.degree - 1);
        for s in subsets(self.model.d_dim(), self.degree - 1) {
            let mut acc = PolyFn::zero();
            for (a, c) in delta.comps().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut idx = vec![a];
                idx.extend(&s);
                let w = self.get(&idx);
                if !w.is_zero() {
                    acc = acc.add_ref(&c.mul_ref(&w));
                }
            }
            out.set(&s, acc);
        }
        Ok(out)
    }

    /// `ω(Δ₁, …, Δ_k) = Σ_I ω_I det[Δᵢ^{I_j}]`.
    pub fn eval_on(&self, args: &[Derivation]) -> PolyFn {
        assert_eq!(args.len(), self.degree);
        let mut acc = PolyFn::zero();
        for (idx, w) in &self.comps {
            let minor = Matrix::from_fn(self.degree, self.degree, |i, j| {
                args[i].comps()[idx[j]].clone()
            });
            acc = acc.add_ref(&w.mul_ref(&minor.det()));
        }
        acc
    }

    pub fn pair(&self, delta: &Derivation) -> PolyFn {
        self.eval_on(std::slice::from_ref(delta))
    }

    /// `(𝓛_Δω)(e_J) = Δ(ω_J) − Σ_m ω(.., [Δ, e_{j_m}], ..)`.
    pub fn lie(&self, delta: &Derivation) -> Result<Self, CalculusError> {
        if delta.model() != &self.model {
            return Err(CalculusError::ChartMismatch);
        }
        let model = self.model;
        let dd = model.d_dim();
        let brackets: Vec<Derivation> = (0..dd).map(|a| delta.bracket_with_frame(a)).collect();
        let mut out = Self::zero(model, self.degree);
        for s in subsets(dd, self.degree) {
            let mut acc = delta.apply(&self.get(&s));
            for (m, &jm) in s.iter().enumerate() {
                for (b, c) in brackets[jm].comps().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut idx = s.clone();
                    idx[m] = b;
                    let w = self.get(&idx);
                    if !w.is_zero() {
                        acc = acc.sub_ref(&c.mul_ref(&w));
                    }
                }
            }
            out.set(&s, acc);
        }
        Ok(out)
    }

    /// Components evaluated at a point, on increasing multi-indices.
    pub fn at(&self, point: &[Scalar]) -> Result<BTreeMap<Vec<usize>, Scalar>, ScalarError> {
        self.comps
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.eval(point)?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omni_fiber::Mode;

    #[test]
    fn alternating_access() {
        let m = FiberModel::new(2, Mode::Jacobi);
        let mut f = FormField::zero(m, 2);
        f.set(&[2, 0], PolyFn::var(1));
        assert_eq!(f.get(&[0, 2]), PolyFn::var(1).neg_ref());
        assert_eq!(f.get(&[1, 1]), PolyFn::zero());
        assert!(f.to_matrix().is_skew());
        assert_eq!(subsets(4, 2).len(), 6);
    }

    #[test]
    fn d_of_coordinate() {
        let m = FiberModel::new(2, Mode::Jacobi);
        let x = FormField::zero_form(m, PolyFn::var(0));
        assert_eq!(
            x.d().unwrap().to_vec(),
            vec![PolyFn::one(), PolyFn::zero(), PolyFn::var(0)]
        );
        let dm = FiberModel::new(2, Mode::Dirac);
        assert_eq!(
            FormField::zero_form(dm, PolyFn::var(0))
                .d()
                .unwrap()
                .to_vec(),
            vec![PolyFn::one(), PolyFn::zero()]
        );
    }

    #[test]
    fn degree_cap() {
        let m = FiberModel::new(3, Mode::Jacobi);
        assert_eq!(
            FormField::zero(m, 3).d(),
            Err(CalculusError::DegreeOverflow(4))
        );
        assert_eq!(
            FormField::zero(m, 0).contract(&Derivation::zero(m)),
            Err(CalculusError::DegreeUnderflow)
        );
    }
}
