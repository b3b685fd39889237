//! Random fiber instances, either passing or with one condition broken on purpose.

use serde::Serialize;

use crate::exact_scalars::Scalar;
use crate::linalg::{kernel, Matrix, Sampler};
use crate::omni_fiber::{
    forward, graph_of_form, opposite, random_fiber_morphism, random_lagrangian, random_skew,
    FiberModel, Mode,
};

use super::FiberInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Design {
    Pass,
    BreakOrthogonality,
    BreakRank,
    BreakForward,
}

impl Design {
    pub const ALL: [Design; 4] = [
        Design::Pass,
        Design::BreakOrthogonality,
        Design::BreakRank,
        Design::BreakForward,
    ];
}

/// A random skew `ϖ` with `ϖ(u, v) = 0` for `u ∈ K₀`, `v ∈ K₁`.
fn orthogonal_form(
    s: &mut Sampler,
    d: usize,
    k0: &[Vec<Scalar>],
    k1: &[Vec<Scalar>],
) -> Matrix<Scalar> {
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .collect();
    let mut rows = Vec::new();
    for u in k0 {
        for v in k1 {
            rows.push(
                pairs
                    .iter()
                    .map(|&(i, j)| &(&u[i] * &v[j]) - &(&u[j] * &v[i]))
                    .collect::<Vec<Scalar>>(),
            );
        }
    }
    let free = if rows.is_empty() {
        (0..pairs.len())
            .map(|k| crate::linalg::unit(pairs.len(), k))
            .collect()
    } else {
        kernel(&Matrix::from_rows(pairs.len(), rows).expect("row length")).basis_vectors()
    };
    let mut coeffs = vec![Scalar::zero(); pairs.len()];
    for b in &free {
        let c = Scalar::from_int(s.int(-2, 2));
        for (x, y) in coeffs.iter_mut().zip(b) {
            *x += &(&c * y);
        }
    }
    let mut m = Matrix::zeros(d, d);
    for (&(i, j), c) in pairs.iter().zip(coeffs) {
        m.set(j, i, -c.clone());
        m.set(i, j, c);
    }
    m
}

/// Makes `DT` kill a chosen vector of `ker DS` by a rank-one change in the tangent columns.
fn share_kernel(
    s: &mut Sampler,
    ds: &Matrix<Scalar>,
    dt: &Matrix<Scalar>,
    n_apex: usize,
) -> Option<Matrix<Scalar>> {
    let ks = kernel(ds).basis_vectors();
    if ks.is_empty() {
        return None;
    }
    let mut u = vec![Scalar::zero(); ds.cols()];
    for b in &ks {
        let c = Scalar::from_int(s.int(-2, 2));
        for (x, y) in u.iter_mut().zip(b) {
            *x += &(&c * y);
        }
    }
    let i = (0..n_apex).find(|&i| !u[i].is_zero())?;
    let tu = dt.mul_vec(&u);
    let mut out = dt.clone();
    for r in 0..dt.rows() {
        let v = &out.get(r, i).clone() - &(&tu[r] / &u[i]);
        out.set(r, i, v);
    }
    (out.rank() == dt.rows()).then_some(out)
}

fn assemble(
    apex: FiberModel,
    form: Matrix<Scalar>,
    s: (Matrix<Scalar>, Scalar),
    t: (Matrix<Scalar>, Scalar),
    m0: FiberModel,
    m1: FiberModel,
) -> FiberInstance {
    let g = graph_of_form(&apex, &form).expect("skew");
    let l0 = forward(&g, &s.0, &s.1, &m0).expect("shapes");
    let l1 = opposite(&forward(&g, &t.0, &t.1, &m1).expect("shapes"));
    FiberInstance::new(apex, form, s, t, l0, l1).expect("generated data is well formed")
}

/// A random instance of the requested design. Legs are always the pushes of
/// `Gr ϖ` except for [`Design::BreakForward`], which replaces `𝓛₀`.
pub fn random_fiber_instance(s: &mut Sampler, mode: Mode, design: Design) -> FiberInstance {
    loop {
        let n0 = s.int(0, 2) as usize;
        let n1 = s.int(0, 2) as usize;
        let extra = s.int(0, 1) as usize;
        let m0 = FiberModel::new(n0, mode);
        let m1 = FiberModel::new(n1, mode);
        let d = m0.d_dim() + m1.d_dim() + extra;
        let Some(n) = d.checked_sub(mode.extra()) else {
            continue;
        };
        let apex = FiberModel::new(n, mode);
        let sm = random_fiber_morphism(s, n, n0, mode, true);
        let mut tm = random_fiber_morphism(s, n, n1, mode, true);
        if design == Design::BreakRank {
            match share_kernel(s, &sm.0, &tm.0, n) {
                Some(m) => tm.0 = m,
                None => continue,
            }
        }
        let ks = kernel(&sm.0).basis_vectors();
        let kt = kernel(&tm.0).basis_vectors();
        let mut form = orthogonal_form(s, d, &ks, &kt);
        if design == Design::BreakOrthogonality {
            form = form.add(&random_skew(s, d));
        }
        let mut inst = assemble(apex, form, sm, tm, m0, m1);
        if design == Design::BreakForward {
            let l = random_lagrangian(s, &m0);
            if l == inst.l0 {
                continue;
            }
            inst.l0 = l;
        }
        let v = inst.verify_definition().expect("valid instance");
        let ok = match design {
            Design::Pass => v.holds,
            Design::BreakOrthogonality => {
                !v.orthogonal.holds && v.forward_s.holds && v.forward_t.holds
            }
            Design::BreakRank => {
                v.orthogonal.holds && !v.rank.holds && v.forward_s.holds && v.forward_t.holds
            }
            Design::BreakForward => v.orthogonal.holds && v.rank.holds && !v.forward_s.holds,
        };
        if ok {
            return inst;
        }
    }
}
