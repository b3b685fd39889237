//! The JSON instance document: raw schema, resolution into checked objects and canonical output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::der_calculus::{Chart, FormField};
use crate::dual_pairs::{CompositionSign, DualPairInstance};
use crate::exact_scalars::{ExprJson, PolyFn, Scalar};
use crate::linalg::{Matrix, Sampler};
use crate::omni_fiber::Mode;
use crate::structures::{LBMorphism, Repr, StructureSpec};

use super::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChart {
    pub coords: Vec<String>,
    pub mode: Mode,
}

/// An Atiyah 2-form, either by its skew matrix in the frame order `∂₁..∂ₙ, 𝟙`
/// or as `d_D` of a 1-form given by its frame components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawForm {
    pub chart: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<ExprJson>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<Vec<ExprJson>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RawStructure {
    GraphForm {
        chart: String,
        matrix: Vec<Vec<ExprJson>>,
    },
    GraphBider {
        chart: String,
        matrix: Vec<Vec<ExprJson>>,
    },
    Lcps {
        chart: String,
        gamma: Vec<ExprJson>,
        omega: Vec<Vec<ExprJson>>,
    },
    Frame {
        chart: String,
        rows: Vec<Vec<ExprJson>>,
    },
    Tangent {
        chart: String,
    },
}

impl RawStructure {
    fn chart(&self) -> &str {
        match self {
            RawStructure::GraphForm { chart, .. }
            | RawStructure::GraphBider { chart, .. }
            | RawStructure::Lcps { chart, .. }
            | RawStructure::Frame { chart, .. }
            | RawStructure::Tangent { chart } => chart,
        }
    }
}

fn one_expr() -> ExprJson {
    ExprJson::Int(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMorphism {
    pub source: String,
    pub target: String,
    pub map: Vec<ExprJson>,
    #[serde(default = "one_expr")]
    pub factor: ExprJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub apex: String,
    pub form: String,
    pub legs: [String; 2],
    pub maps: [String; 2],
}

fn default_seed() -> u64 {
    7
}

fn default_count() -> usize {
    5
}

/// Explicit points per instance, or `count` seeded random points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePolicy {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub points: BTreeMap<String, Vec<Vec<Scalar>>>,
}

impl Default for SamplePolicy {
    fn default() -> Self {
        SamplePolicy {
            seed: default_seed(),
            count: default_count(),
            points: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeTask {
    pub name: String,
    pub first: String,
    pub second: String,
    #[serde(default)]
    pub sign: CompositionSign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackTask {
    pub name: String,
    pub instance: String,
    pub maps: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalFormTask {
    pub name: String,
    pub structure: String,
    pub phi: String,
    pub psi: String,
    pub b: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeafTaskSpec {
    pub instance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    pub format_version: u32,
    #[serde(default)]
    pub charts: BTreeMap<String, RawChart>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub forms: BTreeMap<String, RawForm>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub structures: BTreeMap<String, RawStructure>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, RawMorphism>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub instances: BTreeMap<String, RawInstance>,
    #[serde(default)]
    pub samples: SamplePolicy,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compose: Vec<ComposeTask>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pullbacks: Vec<PullbackTask>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub normal_forms: Vec<NormalFormTask>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub leaves: Vec<LeafTaskSpec>,
}

/// A loaded document: every reference resolved and every object checked.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDocument {
    pub charts: BTreeMap<String, Chart>,
    pub forms: BTreeMap<String, FormField>,
    pub structures: BTreeMap<String, StructureSpec>,
    pub morphisms: BTreeMap<String, LBMorphism>,
    pub instances: BTreeMap<String, DualPairInstance>,
    pub samples: SamplePolicy,
    pub compose: Vec<ComposeTask>,
    pub pullbacks: Vec<PullbackTask>,
    pub normal_forms: Vec<NormalFormTask>,
    pub leaves: Vec<LeafTaskSpec>,
    raw: RawDocument,
}

/// RFC 6901 pointer from path segments.
pub fn pointer<S: AsRef<str>>(segments: &[S]) -> String {
    segments
        .iter()
        .map(|s| format!("/{}", s.as_ref().replace('~', "~0").replace('/', "~1")))
        .collect()
}

fn path_pointer(p: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let segs: Vec<String> = p
        .iter()
        .filter_map(|s| match s {
            Segment::Seq { index } => Some(index.to_string()),
            Segment::Map { key } => Some(key.clone()),
            Segment::Enum { variant } => Some(variant.clone()),
            Segment::Unknown => None,
        })
        .collect();
    pointer(&segs)
}

struct Ctx<'a> {
    charts: &'a BTreeMap<String, Chart>,
}

impl Ctx<'_> {
    fn chart(&self, key: &str, path: &[&str]) -> Result<&Chart, CliError> {
        self.charts
            .get(key)
            .ok_or_else(|| CliError::UnresolvedReference {
                path: pointer(path),
                key: key.into(),
            })
    }
}

fn expr(c: &Chart, e: &ExprJson, path: &[String]) -> Result<PolyFn, CliError> {
    e.to_polyfn(c.vars()).map_err(|err| CliError::Schema {
        path: pointer(path),
        message: err.to_string(),
    })
}

fn sub(path: &[String], more: &[&str]) -> Vec<String> {
    let mut p = path.to_vec();
    p.extend(more.iter().map(|s| s.to_string()));
    p
}

fn exprs(c: &Chart, v: &[ExprJson], path: &[String]) -> Result<Vec<PolyFn>, CliError> {
    v.iter()
        .enumerate()
        .map(|(i, e)| expr(c, e, &sub(path, &[&i.to_string()])))
        .collect()
}

fn matrix(
    c: &Chart,
    rows: &[Vec<ExprJson>],
    size: (usize, usize),
    path: &[String],
) -> Result<Matrix<PolyFn>, CliError> {
    if rows.len() != size.0 || rows.iter().any(|r| r.len() != size.1) {
        return Err(CliError::Schema {
            path: pointer(path),
            message: format!("expected a {}x{} matrix", size.0, size.1),
        });
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| exprs(c, r, &sub(path, &[&i.to_string()])))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(size.1, rows).expect("row lengths checked"))
}

fn skew(c: &Chart, m: &Matrix<PolyFn>, path: &[String]) -> Result<(), CliError> {
    for i in 0..m.rows() {
        for j in i..m.cols() {
            if m.get(i, j) != &m.get(j, i).neg_ref() {
                return Err(CliError::InvariantViolation {
                    path: pointer(&sub(path, &[&i.to_string(), &j.to_string()])),
                    witness: format!(
                        "not skew: entry ({i}, {j}) is {} but entry ({j}, {i}) is {}",
                        c.display(m.get(i, j)),
                        c.display(m.get(j, i))
                    ),
                });
            }
        }
    }
    Ok(())
}

fn invariant(path: &[String], e: impl std::fmt::Display) -> CliError {
    CliError::InvariantViolation {
        path: pointer(path),
        witness: e.to_string(),
    }
}

fn render(c: &Chart, f: &PolyFn) -> ExprJson {
    ExprJson::from_polyfn(f, c.vars())
}

fn render_matrix(c: &Chart, m: &Matrix<PolyFn>) -> Vec<Vec<ExprJson>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| render(c, m.get(i, j))).collect())
        .collect()
}

fn load_points(
    policy: &SamplePolicy,
    charts: &BTreeMap<String, Chart>,
    instances: &BTreeMap<String, RawInstance>,
) -> Result<(), CliError> {
    for (k, pts) in &policy.points {
        let inst = instances
            .get(k)
            .ok_or_else(|| CliError::UnresolvedReference {
                path: pointer(&["samples", "points", k]),
                key: k.clone(),
            })?;
        let dim = charts[&inst.apex].dim();
        for (i, p) in pts.iter().enumerate() {
            if p.len() != dim {
                return Err(CliError::Schema {
                    path: pointer(&["samples", "points", k, &i.to_string()]),
                    message: format!("point needs {dim} coordinates"),
                });
            }
        }
    }
    Ok(())
}

/// Parses and validates a document.
pub fn load(bytes: &[u8]) -> Result<InstanceDocument, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let raw: RawDocument = serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        path: path_pointer(e.path()),
        message: e.inner().to_string(),
    })?;
    resolve(raw)
}

fn resolve(raw: RawDocument) -> Result<InstanceDocument, CliError> {
    if raw.format_version != FORMAT_VERSION {
        return Err(CliError::Schema {
            path: "/format_version".into(),
            message: format!(
                "unsupported version {}, expected {FORMAT_VERSION}",
                raw.format_version
            ),
        });
    }
    let mut charts = BTreeMap::new();
    for (k, c) in &raw.charts {
        let chart = Chart::new(c.coords.iter(), c.mode)
            .map_err(|e| invariant(&sub(&[], &["charts", k, "coords"]), e))?;
        charts.insert(k.clone(), chart);
    }
    let ctx = Ctx { charts: &charts };

    let mut forms = BTreeMap::new();
    for (k, f) in &raw.forms {
        let base = sub(&[], &["forms", k]);
        let c = ctx.chart(&f.chart, &["forms", k, "chart"])?;
        let d = c.model().d_dim();
        let form = match (&f.matrix, &f.potential) {
            (Some(m), None) => {
                let p = sub(&base, &["matrix"]);
                let m = matrix(c, m, (d, d), &p)?;
                skew(c, &m, &p)?;
                FormField::from_matrix(c.model(), &m).map_err(|e| invariant(&p, e))?
            }
            (None, Some(v)) => {
                let p = sub(&base, &["potential"]);
                if v.len() != d {
                    return Err(CliError::Schema {
                        path: pointer(&p),
                        message: format!("expected {d} components"),
                    });
                }
                FormField::from_vec(c.model(), &exprs(c, v, &p)?)
                    .d()
                    .map_err(|e| invariant(&p, e))?
            }
            _ => {
                return Err(CliError::Schema {
                    path: pointer(&base),
                    message: "give exactly one of matrix, potential".into(),
                })
            }
        };
        forms.insert(k.clone(), form);
    }

    let mut structures = BTreeMap::new();
    let mut sampler = Sampler::new(raw.samples.seed);
    for (k, s) in &raw.structures {
        let base = sub(&[], &["structures", k]);
        let c = ctx.chart(s.chart(), &["structures", k, "chart"])?;
        let m = c.model();
        let d = m.d_dim();
        let spec = match s {
            RawStructure::GraphForm { matrix: rows, .. } => {
                let p = sub(&base, &["matrix"]);
                let mm = matrix(c, rows, (d, d), &p)?;
                skew(c, &mm, &p)?;
                let w = FormField::from_matrix(m, &mm).map_err(|e| invariant(&p, e))?;
                StructureSpec::graph_form(c.clone(), w)
            }
            RawStructure::GraphBider { matrix: rows, .. } => {
                let p = sub(&base, &["matrix"]);
                let mm = matrix(c, rows, (d, d), &p)?;
                skew(c, &mm, &p)?;
                StructureSpec::graph_bider(c.clone(), mm)
            }
            RawStructure::Lcps { gamma, omega, .. } => {
                let g = exprs(c, gamma, &sub(&base, &["gamma"]))?;
                let p = sub(&base, &["omega"]);
                let om = matrix(c, omega, (m.n, m.n), &p)?;
                skew(c, &om, &p)?;
                StructureSpec::lcps(c.clone(), g, om)
            }
            RawStructure::Frame { rows, .. } => {
                let p = sub(&base, &["rows"]);
                let mm = matrix(c, rows, (d, m.ambient()), &p)?;
                StructureSpec::frame(c.clone(), (0..d).map(|i| mm.row(i).to_vec()).collect())
            }
            RawStructure::Tangent { .. } => Ok(StructureSpec::tangent(c.clone())),
        }
        .map_err(|e| invariant(&base, e))?;
        let pts: Vec<Vec<Scalar>> = (0..3)
            .filter_map(|_| {
                sampler.point_where(c.dim(), |p| {
                    spec.frame_rows()
                        .iter()
                        .flatten()
                        .all(|f| f.eval(p).is_ok())
                })
            })
            .collect();
        spec.validate_at(&pts).map_err(|e| invariant(&base, e))?;
        structures.insert(k.clone(), spec);
    }

    let mut morphisms = BTreeMap::new();
    for (k, m) in &raw.morphisms {
        let base = sub(&[], &["morphisms", k]);
        let src = ctx.chart(&m.source, &["morphisms", k, "source"])?;
        let tgt = ctx.chart(&m.target, &["morphisms", k, "target"])?;
        let phi = exprs(src, &m.map, &sub(&base, &["map"]))?;
        let factor = expr(src, &m.factor, &sub(&base, &["factor"]))?;
        let mor = LBMorphism::new(src.clone(), tgt.clone(), phi, factor)
            .map_err(|e| invariant(&base, e))?;
        morphisms.insert(k.clone(), mor);
    }

    let mut instances = BTreeMap::new();
    for (k, i) in &raw.instances {
        let base = sub(&[], &["instances", k]);
        let apex = ctx.chart(&i.apex, &["instances", k, "apex"])?;
        let form = forms
            .get(&i.form)
            .ok_or_else(|| CliError::UnresolvedReference {
                path: pointer(&sub(&base, &["form"])),
                key: i.form.clone(),
            })?;
        let get_s = |j: usize| {
            structures
                .get(&i.legs[j])
                .cloned()
                .ok_or_else(|| CliError::UnresolvedReference {
                    path: pointer(&sub(&base, &["legs", &j.to_string()])),
                    key: i.legs[j].clone(),
                })
        };
        let get_m = |j: usize| {
            morphisms
                .get(&i.maps[j])
                .cloned()
                .ok_or_else(|| CliError::UnresolvedReference {
                    path: pointer(&sub(&base, &["maps", &j.to_string()])),
                    key: i.maps[j].clone(),
                })
        };
        let inst = DualPairInstance::new(
            apex.clone(),
            form.clone(),
            [get_s(0)?, get_s(1)?],
            [get_m(0)?, get_m(1)?],
        )
        .map_err(|e| invariant(&base, e))?;
        instances.insert(k.clone(), inst);
    }
    load_points(&raw.samples, &charts, &raw.instances)?;

    let unresolved = |path: Vec<String>, key: &str| CliError::UnresolvedReference {
        path: pointer(&path),
        key: key.into(),
    };
    for (t, c) in raw.compose.iter().enumerate() {
        for (field, key) in [("first", &c.first), ("second", &c.second)] {
            if !instances.contains_key(key) {
                return Err(unresolved(
                    sub(&[], &["compose", &t.to_string(), field]),
                    key,
                ));
            }
        }
    }
    for (t, p) in raw.pullbacks.iter().enumerate() {
        if !instances.contains_key(&p.instance) {
            return Err(unresolved(
                sub(&[], &["pullbacks", &t.to_string(), "instance"]),
                &p.instance,
            ));
        }
        for (j, m) in p.maps.iter().enumerate() {
            if !morphisms.contains_key(m) {
                return Err(unresolved(
                    sub(&[], &["pullbacks", &t.to_string(), "maps", &j.to_string()]),
                    m,
                ));
            }
        }
    }
    for (t, n) in raw.normal_forms.iter().enumerate() {
        let p = |f: &str| sub(&[], &["normal_forms", &t.to_string(), f]);
        if !structures.contains_key(&n.structure) {
            return Err(unresolved(p("structure"), &n.structure));
        }
        for (field, key) in [("phi", &n.phi), ("psi", &n.psi)] {
            if !morphisms.contains_key(key) {
                return Err(unresolved(p(field), key));
            }
        }
        if !forms.contains_key(&n.b) {
            return Err(unresolved(p("b"), &n.b));
        }
    }
    for (t, l) in raw.leaves.iter().enumerate() {
        let p = |f: &str| sub(&[], &["leaves", &t.to_string(), f]);
        if !instances.contains_key(&l.instance) {
            return Err(unresolved(p("instance"), &l.instance));
        }
        for (field, key) in [("leaf", &l.leaf), ("slice", &l.slice)] {
            if let Some(key) = key {
                if !morphisms.contains_key(key) {
                    return Err(unresolved(p(field), key));
                }
            }
        }
    }

    let mut doc = InstanceDocument {
        charts,
        forms,
        structures,
        morphisms,
        instances,
        samples: raw.samples.clone(),
        compose: raw.compose.clone(),
        pullbacks: raw.pullbacks.clone(),
        normal_forms: raw.normal_forms.clone(),
        leaves: raw.leaves.clone(),
        raw,
    };
    doc.raw = doc.canonical(&doc.raw);
    Ok(doc)
}

impl InstanceDocument {
    /// Re-renders every expression from the resolved objects; keys and references are kept.
    fn canonical(&self, raw: &RawDocument) -> RawDocument {
        let charts = self
            .charts
            .iter()
            .map(|(k, c)| {
                (
                    k.clone(),
                    RawChart {
                        coords: c.coords().to_vec(),
                        mode: c.mode(),
                    },
                )
            })
            .collect();
        let forms = self
            .forms
            .iter()
            .map(|(k, f)| {
                let chart = raw.forms[k].chart.clone();
                let c = &self.charts[&chart];
                (
                    k.clone(),
                    RawForm {
                        chart,
                        matrix: Some(render_matrix(c, &f.to_matrix())),
                        potential: None,
                    },
                )
            })
            .collect();
        let structures = self
            .structures
            .iter()
            .map(|(k, s)| {
                (
                    k.clone(),
                    raw_structure(raw.structures[k].chart().to_string(), s),
                )
            })
            .collect();
        let morphisms = self
            .morphisms
            .iter()
            .map(|(k, m)| {
                let c = m.source();
                let r = RawMorphism {
                    source: raw.morphisms[k].source.clone(),
                    target: raw.morphisms[k].target.clone(),
                    map: m.phi().iter().map(|f| render(c, f)).collect(),
                    factor: render(c, m.factor()),
                };
                (k.clone(), r)
            })
            .collect();
        let instances = raw.instances.clone();
        RawDocument {
            format_version: FORMAT_VERSION,
            charts,
            forms,
            structures,
            morphisms,
            instances,
            samples: self.samples.clone(),
            compose: self.compose.clone(),
            pullbacks: self.pullbacks.clone(),
            normal_forms: self.normal_forms.clone(),
            leaves: self.leaves.clone(),
        }
    }

    pub fn raw(&self) -> &RawDocument {
        &self.raw
    }

    /// Canonical pretty-printed JSON.
    pub fn serialize(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.raw).expect("documents serialize");
        s.push('\n');
        s
    }

    /// The chart key used by an instance apex.
    pub fn apex_key(&self, instance: &str) -> &str {
        &self.raw.instances[instance].apex
    }

    /// Sample points for an instance: the listed ones, else `count` seeded points.
    pub fn points_for(&self, name: &str, seed: u64, count: usize) -> Vec<Vec<Scalar>> {
        if let Some(p) = self.samples.points.get(name) {
            return p.clone();
        }
        let inst = &self.instances[name];
        let mut s = Sampler::new(seed ^ fnv(name));
        inst.sample_points(&mut s, count)
    }

    pub fn mode_of(&self, name: &str) -> Mode {
        self.instances[name].mode()
    }
}

/// Stable per-name seed offset.
pub fn fnv(name: &str) -> u64 {
    name.bytes().fold(0xcbf29ce484222325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100000001b3)
    })
}

fn raw_structure(chart: String, s: &StructureSpec) -> RawStructure {
    let c = s.chart();
    match s.repr() {
        Repr::GraphForm(w) => RawStructure::GraphForm {
            chart,
            matrix: render_matrix(c, &w.to_matrix()),
        },
        Repr::GraphBider(j) => RawStructure::GraphBider {
            chart,
            matrix: render_matrix(c, j),
        },
        Repr::Lcps { gamma, omega } => RawStructure::Lcps {
            chart,
            gamma: gamma.iter().map(|g| render(c, g)).collect(),
            omega: render_matrix(c, omega),
        },
        Repr::Frame(rows) => RawStructure::Frame {
            chart,
            rows: rows
                .iter()
                .map(|r| r.iter().map(|f| render(c, f)).collect())
                .collect(),
        },
    }
}

/// Assembles a document from library objects; keys of equal charts are shared.
#[derive(Debug, Clone)]
pub struct DocumentBuilder {
    raw: RawDocument,
    charts: Vec<(String, Chart)>,
}

impl DocumentBuilder {
    pub fn new(seed: u64, count: usize) -> Self {
        let raw = RawDocument {
            format_version: FORMAT_VERSION,
            charts: BTreeMap::new(),
            forms: BTreeMap::new(),
            structures: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            instances: BTreeMap::new(),
            samples: SamplePolicy {
                seed,
                count,
                points: BTreeMap::new(),
            },
            compose: Vec::new(),
            pullbacks: Vec::new(),
            normal_forms: Vec::new(),
            leaves: Vec::new(),
        };
        DocumentBuilder {
            raw,
            charts: Vec::new(),
        }
    }

    pub fn chart(&mut self, key: &str, c: &Chart) -> String {
        if let Some((k, _)) = self.charts.iter().find(|(_, x)| x == c) {
            return k.clone();
        }
        self.raw.charts.insert(
            key.into(),
            RawChart {
                coords: c.coords().to_vec(),
                mode: c.mode(),
            },
        );
        self.charts.push((key.into(), c.clone()));
        key.into()
    }

    pub fn form(&mut self, key: &str, chart: &Chart, f: &FormField) -> String {
        let ck = self.chart(&format!("{key}.chart"), chart);
        self.raw.forms.insert(
            key.into(),
            RawForm {
                chart: ck,
                matrix: Some(render_matrix(chart, &f.to_matrix())),
                potential: None,
            },
        );
        key.into()
    }

    pub fn structure(&mut self, key: &str, s: &StructureSpec) -> String {
        let ck = self.chart(&format!("{key}.chart"), s.chart());
        self.raw.structures.insert(key.into(), raw_structure(ck, s));
        key.into()
    }

    pub fn morphism(&mut self, key: &str, m: &LBMorphism) -> String {
        let source = self.chart(&format!("{key}.source"), m.source());
        let target = self.chart(&format!("{key}.target"), m.target());
        let c = m.source();
        self.raw.morphisms.insert(
            key.into(),
            RawMorphism {
                source,
                target,
                map: m.phi().iter().map(|f| render(c, f)).collect(),
                factor: render(c, m.factor()),
            },
        );
        key.into()
    }

    /// Registers the pair under `key` with its form, legs and maps under `key.form`, `key.leg0`, ...
    pub fn instance(&mut self, key: &str, inst: &DualPairInstance) -> String {
        let apex = self.chart(&format!("{key}.apex"), inst.apex());
        let form = self.form(&format!("{key}.form"), inst.apex(), inst.form());
        let legs = [
            self.structure(&format!("{key}.leg0"), &inst.legs()[0]),
            self.structure(&format!("{key}.leg1"), &inst.legs()[1]),
        ];
        let maps = [
            self.morphism(&format!("{key}.S"), &inst.maps()[0]),
            self.morphism(&format!("{key}.T"), &inst.maps()[1]),
        ];
        self.raw.instances.insert(
            key.into(),
            RawInstance {
                apex,
                form,
                legs,
                maps,
            },
        );
        key.into()
    }

    pub fn leaf_task(&mut self, instance: &str, task: &crate::dual_pairs::LeafTask) {
        let leaf = task
            .leaf
            .as_ref()
            .map(|m| self.morphism(&format!("{instance}.leaf"), m));
        let slice = task
            .slice
            .as_ref()
            .map(|m| self.morphism(&format!("{instance}.slice"), m));
        self.raw.leaves.push(LeafTaskSpec {
            instance: instance.into(),
            leaf,
            slice,
        });
    }

    pub fn raw_mut(&mut self) -> &mut RawDocument {
        &mut self.raw
    }

    pub fn build(self) -> Result<InstanceDocument, CliError> {
        resolve(self.raw)
    }
}
