//! Weak dual pairs `(M₀, 𝓛₀) ← (M, Gr ϖ) → (M₁, 𝓛₁^opp)` over explicit charts.

mod catalog;
mod generate;
mod leaves;
mod ops;
mod selfdual;
#[cfg(test)]
mod tests;
mod verify;

use serde::Serialize;

use crate::der_calculus::{CalculusError, Chart, FormField};
use crate::exact_scalars::{Scalar, ScalarError};
use crate::linalg::{LinalgError, Sampler};
use crate::omni_fiber::{Mode, OmniError};
use crate::structures::{eval_matrix, show_point, LBMorphism, StructureError, StructureSpec};

pub use catalog::{
    catalog, cotangent_pair, exact_form, form2, lcps_gluing, lcps_split, product_pair,
    pullback_slice, rescale, zero_jacobi_pair, CatalogEntry,
};
pub use generate::{random_fiber_instance, Design};
pub use leaves::{leaf_correspondence_report, LeafPointRecord, LeafReport, LeafSymbolic, LeafTask};
pub use ops::{
    compose, normal_form_check, transverse_pullback, CompositionSign, NormalFormPoint,
    NormalFormReport,
};
pub use selfdual::{self_dual_linear_model, SelfDualLinearModel, SelfDualReport};
pub use verify::{
    BFieldVerdict, Check, DefinitionVerdict, FiberInstance, FiberVerdict, ProductVerdict, RankCheck,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DualPairError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("ϖ is not closed: {0}")]
    NotClosed(String),
    #[error("{map} does not cover a submersion at {}", show_point(point))]
    NotSubmersive { map: String, point: Vec<Scalar> },
    #[error("middle legs differ")]
    IncompatibleMiddle,
    #[error("not composable in this chart: {0}")]
    NotComposableInChart(String),
    #[error("{map} is not transversal at {}", show_point(point))]
    TransversalityFailed { map: String, point: Vec<Scalar> },
    #[error("{map} does not cover a submersion at {}", show_point(point))]
    SubmersivityFailed { map: String, point: Vec<Scalar> },
    #[error("no usable sample points")]
    NoSamples,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Omni(#[from] OmniError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPairInstance {
    apex: Chart,
    form: FormField,
    legs: [StructureSpec; 2],
    maps: [LBMorphism; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Definition,
    BField,
    Product,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointRecord {
    pub point: Vec<Scalar>,
    pub verdict: FiberVerdict,
}

/// Overall verdicts of the three criteria, one entry per sample point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceMatrix {
    pub definition: Vec<bool>,
    pub bfield: Vec<bool>,
    pub product: Vec<bool>,
    pub all_agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub criterion: Criterion,
    pub mode: Mode,
    pub expected_rank: i64,
    pub rank_table: Vec<usize>,
    pub points: Vec<PointRecord>,
    pub equivalence: EquivalenceMatrix,
    pub holds: bool,
}

impl VerificationReport {
    pub fn with_criterion(mut self, c: Criterion) -> Self {
        let v = match c {
            Criterion::Definition => &self.equivalence.definition,
            Criterion::BField => &self.equivalence.bfield,
            Criterion::Product => &self.equivalence.product,
        };
        self.holds = !v.is_empty() && v.iter().all(|&b| b);
        self.criterion = c;
        self
    }

    /// First failing point with its definition verdict.
    pub fn first_failure(&self) -> Option<&PointRecord> {
        self.points.iter().find(|p| !p.verdict.holds())
    }
}

impl DualPairInstance {
    pub fn new(
        apex: Chart,
        form: FormField,
        legs: [StructureSpec; 2],
        maps: [LBMorphism; 2],
    ) -> Result<Self, DualPairError> {
        if *form.model() != apex.model() || form.degree() != 2 {
            return Err(DualPairError::Shape(
                "ϖ must be an Atiyah 2-form on the apex chart".into(),
            ));
        }
        for (k, (leg, map)) in legs.iter().zip(&maps).enumerate() {
            if map.source() != &apex {
                return Err(DualPairError::Shape(format!(
                    "map {k} does not start at the apex chart"
                )));
            }
            if map.target() != leg.chart() {
                return Err(DualPairError::Shape(format!(
                    "map {k} does not land in the chart of leg {k}"
                )));
            }
        }
        let report = StructureSpec::graph_form(apex.clone(), form.clone())?.check_involutive()?;
        if !report.holds {
            return Err(DualPairError::NotClosed(report.witness.unwrap_or_default()));
        }
        Ok(DualPairInstance {
            apex,
            form,
            legs,
            maps,
        })
    }

    pub fn apex(&self) -> &Chart {
        &self.apex
    }

    pub fn form(&self) -> &FormField {
        &self.form
    }

    pub fn legs(&self) -> &[StructureSpec; 2] {
        &self.legs
    }

    pub fn maps(&self) -> &[LBMorphism; 2] {
        &self.maps
    }

    pub fn mode(&self) -> Mode {
        self.apex.mode()
    }

    /// `dim M − dim M₀ − dim M₁ − 1` in jacobi mode, without the `−1` in dirac mode.
    pub fn expected_rank(&self) -> i64 {
        let d = |c: &Chart| c.model().d_dim() as i64;
        d(&self.apex) - d(self.legs[0].chart()) - d(self.legs[1].chart())
    }

    /// The pointwise data at an apex point.
    pub fn fiber(&self, point: &[Scalar]) -> Result<FiberInstance, DualPairError> {
        let form = eval_matrix(&self.form.to_matrix(), point)?;
        let mut fibers = Vec::with_capacity(2);
        let mut maps = Vec::with_capacity(2);
        for (k, (leg, map)) in self.legs.iter().zip(&self.maps).enumerate() {
            if !map.is_submersive_at(point)? {
                let name = if k == 0 { "S" } else { "T" };
                return Err(DualPairError::NotSubmersive {
                    map: name.into(),
                    point: point.to_vec(),
                });
            }
            maps.push(map.at(point)?);
            fibers.push(leg.fiber_at(&map.image(point)?)?);
        }
        let [l0, l1]: [_; 2] = fibers.try_into().expect("two legs");
        let [s, t]: [_; 2] = maps.try_into().expect("two maps");
        FiberInstance::new(self.apex.model(), form, s, t, l0, l1)
    }

    /// `count` apex points where every datum is defined and both maps are submersive.
    pub fn sample_points(&self, sampler: &mut Sampler, count: usize) -> Vec<Vec<Scalar>> {
        let n = self.apex.dim();
        let mut out: Vec<Vec<Scalar>> = Vec::with_capacity(count);
        let mut misses = 0;
        while out.len() < count && misses < 50 * count.max(1) {
            let p = sampler.point(n);
            if out.contains(&p) || self.fiber(&p).is_err() {
                misses += 1;
                continue;
            }
            out.push(p);
        }
        out
    }

    /// All three criteria at each point; `holds` follows the definition.
    pub fn verify(&self, points: &[Vec<Scalar>]) -> Result<VerificationReport, DualPairError> {
        if points.is_empty() {
            return Err(DualPairError::NoSamples);
        }
        let mut records = Vec::with_capacity(points.len());
        for p in points {
            let verdict = self.fiber(p)?.verify()?;
            records.push(PointRecord {
                point: p.clone(),
                verdict,
            });
        }
        let col = |f: &dyn Fn(&FiberVerdict) -> bool| {
            records.iter().map(|r| f(&r.verdict)).collect::<Vec<bool>>()
        };
        let definition = col(&|v| v.definition.holds);
        let bfield = col(&|v| v.bfield.holds);
        let product = col(&|v| v.product.holds);
        let all_agree = records.iter().all(|r| r.verdict.agree);
        let rank_table = records
            .iter()
            .map(|r| r.verdict.definition.rank.found)
            .collect();
        let report = VerificationReport {
            criterion: Criterion::Definition,
            mode: self.mode(),
            expected_rank: self.expected_rank(),
            rank_table,
            points: records,
            equivalence: EquivalenceMatrix {
                definition,
                bfield,
                product,
                all_agree,
            },
            holds: false,
        };
        Ok(report.with_criterion(Criterion::Definition))
    }

    pub fn verify_weak_dual_pair(
        &self,
        points: &[Vec<Scalar>],
    ) -> Result<VerificationReport, DualPairError> {
        self.verify(points)
    }

    pub fn verify_characterization_i(
        &self,
        points: &[Vec<Scalar>],
    ) -> Result<VerificationReport, DualPairError> {
        Ok(self.verify(points)?.with_criterion(Criterion::BField))
    }

    pub fn verify_characterization_ii(
        &self,
        points: &[Vec<Scalar>],
    ) -> Result<VerificationReport, DualPairError> {
        Ok(self.verify(points)?.with_criterion(Criterion::Product))
    }
}
