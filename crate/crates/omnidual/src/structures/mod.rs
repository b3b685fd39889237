//! Dirac-Jacobi structures over a whole chart.
//!
//! A [`StructureSpec`] stores one of four representations. All of them reduce
//! to a frame of `n+1` sections of `𝔻L` (just `n` in dirac mode), which is what
//! the family operations and the Courant tensor consume.

mod family;
mod morphism;

use serde::Serialize;

use crate::der_calculus::{
    courant_witness, jacobiator_witness, CalculusError, Chart, FormField, SectionPair,
};
use crate::exact_scalars::{PolyFn, Scalar, ScalarError};
use crate::linalg::{LinalgError, Matrix, Subspace};
use crate::omni_fiber::{
    graph_of_biderivation, graph_of_form, FiberModel, LagrangianSubspace, Mode, OmniError,
};

pub use family::{
    backward_family, backward_generic, classify_fiber, classify_point, forward_family,
    is_transversal_at, leaf_type, star_family, FamilyReport, FamilyResult, LeafData, LeafType,
};
pub use morphism::LBMorphism;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("charts differ")]
    ChartMismatch,
    #[error("modes differ")]
    ModeMismatch,
    #[error("line bundle factor vanishes")]
    ZeroFactor,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("frame is not Lagrangian: {0}")]
    NotLagrangian(String),
    #[error("frame drops to rank {rank} at {}", show_point(point))]
    RankDrop { point: Vec<Scalar>, rank: usize },
    #[error("intersection rank jumps from {} at {} to {} at {}", ranks.0, show_point(first), ranks.1, show_point(second))]
    NonCleanIntersection {
        first: Vec<Scalar>,
        second: Vec<Scalar>,
        ranks: (usize, usize),
    },
    #[error("rank of the D-projection sum jumps from {} at {} to {} at {}", ranks.0, show_point(first), ranks.1, show_point(second))]
    NonConstantRank {
        first: Vec<Scalar>,
        second: Vec<Scalar>,
        ranks: (usize, usize),
    },
    #[error("B-field is not closed")]
    NotClosed,
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Omni(#[from] OmniError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub fn show_point(p: &[Scalar]) -> String {
    let parts: Vec<String> = p.iter().map(|s| s.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Name of frame element `a`: `∂x` for a coordinate, `𝟙` for the identity derivation.
pub fn frame_label(chart: &Chart, a: usize) -> String {
    match chart.coords().get(a) {
        Some(c) => format!("∂{c}"),
        None => "𝟙".to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Repr {
    /// `Gr ϖ = {(δ, ι_δϖ)}` for an Atiyah 2-form.
    GraphForm(FormField),
    /// `Gr J = {(J♯α, α)}` for a skew biderivation.
    GraphBider(Matrix<PolyFn>),
    /// `{(∇_ξ, σ*(ι_ξω) + α) : α ∈ (im ∇)°}` with `∇_{∂ᵢ} = ∂ᵢ + γᵢ𝟙` and `ω` an `L`-valued 2-form on M.
    Lcps {
        gamma: Vec<PolyFn>,
        omega: Matrix<PolyFn>,
    },
    /// Explicit frame vectors `(d-part, j-part)`.
    Frame(Vec<Vec<PolyFn>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureSpec {
    chart: Chart,
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvolutivityReport {
    pub holds: bool,
    pub criterion: String,
    pub witness: Option<String>,
}

impl StructureSpec {
    pub fn new(chart: Chart, repr: Repr) -> Result<Self, StructureError> {
        let m = chart.model();
        let d = m.d_dim();
        match &repr {
            Repr::GraphForm(w) => {
                if *w.model() != m || w.degree() != 2 {
                    return Err(StructureError::Shape(format!(
                        "expected a 2-form on {d} frame elements"
                    )));
                }
            }
            Repr::GraphBider(j) => {
                if j.rows() != d || j.cols() != d {
                    return Err(StructureError::Shape(format!(
                        "biderivation must be {d}x{d}"
                    )));
                }
                if !j.is_skew() {
                    return Err(StructureError::NotSkew);
                }
            }
            Repr::Lcps { gamma, omega } => {
                if m.mode != Mode::Jacobi {
                    return Err(StructureError::ModeMismatch);
                }
                if gamma.len() != m.n || omega.rows() != m.n || omega.cols() != m.n {
                    return Err(StructureError::Shape(format!(
                        "lcps data needs {0} potentials and a {0}x{0} form",
                        m.n
                    )));
                }
                if !omega.is_skew() {
                    return Err(StructureError::NotSkew);
                }
            }
            Repr::Frame(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != m.ambient()) {
                    return Err(StructureError::Shape(format!(
                        "frame needs {d} vectors of length {}",
                        m.ambient()
                    )));
                }
                let mat = Matrix::from_rows(m.ambient(), rows.clone())?;
                let gram = mat.mul(&m.gram()).mul(&mat.transpose());
                if !gram.is_zero() {
                    return Err(StructureError::NotLagrangian(
                        "frame vectors are not pairwise isotropic".into(),
                    ));
                }
                let r = mat.rank_generic();
                if r != d {
                    return Err(StructureError::NotLagrangian(format!(
                        "generic rank {r}, expected {d}"
                    )));
                }
            }
        }
        Ok(StructureSpec { chart, repr })
    }

    pub fn graph_form(chart: Chart, w: FormField) -> Result<Self, StructureError> {
        Self::new(chart, Repr::GraphForm(w))
    }

    pub fn graph_bider(chart: Chart, j: Matrix<PolyFn>) -> Result<Self, StructureError> {
        Self::new(chart, Repr::GraphBider(j))
    }

    pub fn lcps(
        chart: Chart,
        gamma: Vec<PolyFn>,
        omega: Matrix<PolyFn>,
    ) -> Result<Self, StructureError> {
        Self::new(chart, Repr::Lcps { gamma, omega })
    }

    pub fn frame(chart: Chart, rows: Vec<Vec<PolyFn>>) -> Result<Self, StructureError> {
        Self::new(chart, Repr::Frame(rows))
    }

    /// `Gr 0 = DL`.
    pub fn tangent(chart: Chart) -> Self {
        let m = chart.model();
        StructureSpec {
            chart,
            repr: Repr::GraphForm(FormField::zero(m, 2)),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn model(&self) -> FiberModel {
        self.chart.model()
    }

    pub fn kind(&self) -> &'static str {
        match self.repr {
            Repr::GraphForm(_) => "graph_form",
            Repr::GraphBider(_) => "graph_bider",
            Repr::Lcps { .. } => "lcps",
            Repr::Frame(_) => "frame",
        }
    }

    pub fn frame_rows(&self) -> Vec<Vec<PolyFn>> {
        let m = self.model();
        let d = m.d_dim();
        let unit = |i: usize| -> Vec<PolyFn> {
            (0..d)
                .map(|k| {
                    if k == i {
                        PolyFn::one()
                    } else {
                        PolyFn::zero()
                    }
                })
                .collect()
        };
        match &self.repr {
            Repr::GraphForm(w) => {
                let mat = w.to_matrix();
                (0..d).map(|i| m.join(&unit(i), mat.row(i))).collect()
            }
            Repr::GraphBider(j) => (0..d).map(|i| m.join(j.row(i), &unit(i))).collect(),
            Repr::Lcps { gamma, omega } => {
                let n = m.n;
                let mut rows = Vec::with_capacity(d);
                for i in 0..n {
                    let mut dp = unit(i);
                    dp[n] = gamma[i].clone();
                    let mut jp: Vec<PolyFn> = omega.row(i).to_vec();
                    jp.push(PolyFn::zero());
                    rows.push(m.join(&dp, &jp));
                }
                let mut jp: Vec<PolyFn> = gamma.iter().map(|g| g.neg_ref()).collect();
                jp.push(PolyFn::one());
                rows.push(m.join(&vec![PolyFn::zero(); d], &jp));
                rows
            }
            Repr::Frame(rows) => rows.clone(),
        }
    }

    /// The fiber over the field of rational functions on the chart.
    pub fn generic_fiber(&self) -> LagrangianSubspace<PolyFn> {
        let m = self.model();
        let space = Subspace::span(m.ambient(), &self.frame_rows())
            .expect("frame lengths checked at construction");
        LagrangianSubspace::trusted(m, space)
    }

    pub fn fiber_at(&self, point: &[Scalar]) -> Result<LagrangianSubspace<Scalar>, StructureError> {
        let m = self.model();
        if point.len() != m.n {
            return Err(StructureError::Shape(format!(
                "point needs {} coordinates",
                m.n
            )));
        }
        match &self.repr {
            Repr::GraphForm(w) => Ok(graph_of_form(&m, &w.to_matrix().eval_at(point)?)?),
            Repr::GraphBider(j) => Ok(graph_of_biderivation(&m, &j.eval_at(point)?)?),
            _ => {
                let rows = self
                    .frame_rows()
                    .iter()
                    .map(|r| r.iter().map(|f| f.eval(point)).collect())
                    .collect::<Result<Vec<Vec<Scalar>>, _>>()?;
                let space = Subspace::span(m.ambient(), &rows)?;
                if space.dim() != m.d_dim() {
                    return Err(StructureError::RankDrop {
                        point: point.to_vec(),
                        rank: space.dim(),
                    });
                }
                Ok(LagrangianSubspace::new(m, space)?)
            }
        }
    }

    /// Rejects frames that lose rank at one of the points.
    pub fn validate_at(&self, points: &[Vec<Scalar>]) -> Result<(), StructureError> {
        for p in points {
            self.fiber_at(p)?;
        }
        Ok(())
    }

    pub fn sections(&self) -> Vec<SectionPair> {
        let m = self.model();
        self.frame_rows()
            .iter()
            .map(|r| {
                SectionPair::from_components(m, r).expect("frame lengths checked at construction")
            })
            .collect()
    }

    pub fn to_frame(&self) -> StructureSpec {
        StructureSpec {
            chart: self.chart.clone(),
            repr: Repr::Frame(self.frame_rows()),
        }
    }

    /// Frame spec from the canonical basis of a symbolic fiber.
    pub fn from_fiber(
        chart: Chart,
        l: &LagrangianSubspace<PolyFn>,
    ) -> Result<Self, StructureError> {
        if *l.model() != chart.model() {
            return Err(StructureError::ChartMismatch);
        }
        Self::frame(chart, l.space().basis_vectors())
    }

    pub fn check_involutive(&self) -> Result<InvolutivityReport, StructureError> {
        let m = self.model();
        let c = &self.chart;
        Ok(match &self.repr {
            Repr::GraphForm(w) => {
                let dw = w.d()?;
                let witness = dw.components().next().map(|(idx, v)| {
                    let labels: Vec<String> = idx.iter().map(|&a| frame_label(c, a)).collect();
                    format!("d_Dϖ({}) = {}", labels.join(", "), c.display(v))
                });
                InvolutivityReport {
                    holds: witness.is_none(),
                    criterion: "d_D ϖ = 0".into(),
                    witness,
                }
            }
            Repr::GraphBider(j) => {
                let w = jacobiator_witness(&m, &j.row_vecs())?;
                let witness = w.map(|(idx, v)| {
                    let names = test_section_names(c);
                    format!(
                        "jacobiator({}, {}, {}) = {}",
                        names[idx[0]],
                        names[idx[1]],
                        names[idx[2]],
                        c.display(&v)
                    )
                });
                InvolutivityReport {
                    holds: witness.is_none(),
                    criterion: "jacobiator = 0".into(),
                    witness,
                }
            }
            Repr::Lcps { gamma, omega } => {
                let witness = lcps_witness(c, gamma, omega);
                InvolutivityReport {
                    holds: witness.is_none(),
                    criterion: "∇ flat and d_∇ω = 0".into(),
                    witness,
                }
            }
            Repr::Frame(_) => self.check_involutive_by_courant()?,
        })
    }

    /// Involutivity through the Courant tensor of the frame, whatever the representation.
    pub fn check_involutive_by_courant(&self) -> Result<InvolutivityReport, StructureError> {
        let w = courant_witness(&self.sections())?;
        let witness =
            w.map(|((i, j, k), v)| format!("Υ(e{i}, e{j}, e{k}) = {}", self.chart.display(&v)));
        Ok(InvolutivityReport {
            holds: witness.is_none(),
            criterion: "Courant tensor = 0".into(),
            witness,
        })
    }

    /// `𝓛 ↦ 𝓛^B = {(δ, α + ι_δB)}` for a closed Atiyah 2-form `B`.
    pub fn gauge(&self, b: &FormField) -> Result<StructureSpec, StructureError> {
        if *b.model() != self.model() || b.degree() != 2 {
            return Err(StructureError::Shape(
                "B-field must be a 2-form on the same chart".into(),
            ));
        }
        if !b.d()?.is_zero() {
            return Err(StructureError::NotClosed);
        }
        let repr = match &self.repr {
            Repr::GraphForm(w) => Repr::GraphForm(w.add(b)),
            _ => {
                let m = self.model();
                let bm = b.to_matrix();
                let rows = self
                    .frame_rows()
                    .into_iter()
                    .map(|r| {
                        let (dp, jp) = m.split(&r);
                        let shift = crate::omni_fiber::flat(&bm, dp);
                        let jp: Vec<PolyFn> =
                            jp.iter().zip(&shift).map(|(a, s)| a.add_ref(s)).collect();
                        m.join(dp, &jp)
                    })
                    .collect();
                Repr::Frame(rows)
            }
        };
        Ok(StructureSpec {
            chart: self.chart.clone(),
            repr,
        })
    }

    /// `𝓛^opp = {(δ, −α)}`.
    pub fn opposite(&self) -> StructureSpec {
        let repr = match &self.repr {
            Repr::GraphForm(w) => Repr::GraphForm(w.neg()),
            Repr::GraphBider(j) => Repr::GraphBider(j.neg()),
            Repr::Lcps { gamma, omega } => Repr::Lcps {
                gamma: gamma.clone(),
                omega: omega.neg(),
            },
            Repr::Frame(rows) => {
                let d = self.model().d_dim();
                Repr::Frame(
                    rows.iter()
                        .map(|r| {
                            r.iter()
                                .enumerate()
                                .map(|(k, v)| if k < d { v.clone() } else { v.neg_ref() })
                                .collect()
                        })
                        .collect(),
                )
            }
        };
        StructureSpec {
            chart: self.chart.clone(),
            repr,
        }
    }
}

fn test_section_names(c: &Chart) -> Vec<String> {
    let mut v = Vec::new();
    if c.mode() == Mode::Jacobi {
        v.push("1".to_string());
    }
    v.extend(c.coords().iter().cloned());
    v
}

/// Curvature `∂ᵢγⱼ − ∂ⱼγᵢ`, then `(d_∇ω)_{ijk} = Σ_cyc ±(∂ᵢ + γᵢ)ω_{jk}`.
fn lcps_witness(c: &Chart, gamma: &[PolyFn], omega: &Matrix<PolyFn>) -> Option<String> {
    let n = gamma.len();
    for i in 0..n {
        for j in i + 1..n {
            let f = gamma[j].partial(i).sub_ref(&gamma[i].partial(j));
            if !f.is_zero() {
                return Some(format!(
                    "curvature({}, {}) = {}",
                    c.coords()[i],
                    c.coords()[j],
                    c.display(&f)
                ));
            }
        }
    }
    let nabla = |a: usize, g: &PolyFn| g.partial(a).add_ref(&gamma[a].mul_ref(g));
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = nabla(i, omega.get(j, k))
                    .sub_ref(&nabla(j, omega.get(i, k)))
                    .add_ref(&nabla(k, omega.get(i, j)));
                if !v.is_zero() {
                    let cs = c.coords();
                    return Some(format!(
                        "d_∇ω({}, {}, {}) = {}",
                        cs[i],
                        cs[j],
                        cs[k],
                        c.display(&v)
                    ));
                }
            }
        }
    }
    None
}

/// Evaluates a symbolic matrix entrywise; used by callers that hold a `Matrix<PolyFn>` spec field.
pub fn eval_matrix(m: &Matrix<PolyFn>, point: &[Scalar]) -> Result<Matrix<Scalar>, StructureError> {
    Ok(m.try_map(|f| f.eval(point))?)
}
