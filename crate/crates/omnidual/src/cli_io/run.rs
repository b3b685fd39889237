//! Command dispatch and reports.

use serde::Serialize;
use serde_json::{json, Value};

use crate::dual_pairs::{
    compose, leaf_correspondence_report, normal_form_check, self_dual_linear_model,
    transverse_pullback, DualPairError, DualPairInstance, FiberVerdict, LeafTask,
    VerificationReport,
};
use crate::exact_scalars::Scalar;
use crate::linalg::Sampler;
use crate::omni_fiber::{random_lagrangian, FiberModel, Mode};
use crate::structures::{leaf_type, show_point};

use super::document::fnv;
use super::{oracle, CliError, InstanceDocument};

/// Below this many sample points `--strict` fails a sampled verdict.
pub const STRICT_MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckStructure,
    VerifyPair,
    Compose,
    Pullback,
    Selfdual,
    Leafcorr,
    Oracle,
}

impl Command {
    pub fn needs_input(self) -> bool {
        !matches!(self, Command::Selfdual | Command::Oracle)
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::CheckStructure => "check-structure",
            Command::VerifyPair => "verify-pair",
            Command::Compose => "compose",
            Command::Pullback => "pullback",
            Command::Selfdual => "selfdual",
            Command::Leafcorr => "leafcorr",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    /// Overrides the document seed.
    pub seed: Option<u64>,
    /// Overrides the document sample count.
    pub samples: Option<usize>,
    /// Restricts to entries of this mode; the mode of `selfdual`.
    pub mode: Option<Mode>,
    pub strict: bool,
    /// `selfdual` only.
    pub dim: usize,
    pub count: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: None,
            samples: None,
            mode: None,
            strict: false,
            dim: 2,
            count: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub pass: bool,
    pub summary: String,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: Command,
    pub seed: u64,
    pub samples: usize,
    pub strict: bool,
    pub results: Vec<Entry>,
    pub pass: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} (seed {}, {} samples{})\n",
            self.command.name(),
            self.seed,
            self.samples,
            if self.strict { ", strict" } else { "" }
        );
        for e in &self.results {
            out.push_str(&format!(
                "  {} {}: {}\n",
                if e.pass { "PASS" } else { "FAIL" },
                e.name,
                e.summary
            ));
        }
        out.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        out
    }

    pub fn render(&self, f: ReportFormat) -> String {
        match f {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Text => self.to_text(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn runtime(e: DualPairError) -> CliError {
    CliError::Runtime(e.to_string())
}

/// First witness of a failed definition verdict.
pub(crate) fn witness(v: &FiberVerdict) -> String {
    let d = &v.definition;
    if let Some(w) = &d.orthogonal.witness {
        return format!("orthogonality fails: {w}");
    }
    if !d.rank.holds {
        return format!(
            "rank of ker DS ∩ ker DT ∩ ker ϖ is {}, expected {}",
            d.rank.found, d.rank.expected
        );
    }
    if let Some(w) = &d.forward_s.witness {
        return format!("S_!Gr ϖ ≠ 𝓛₀: {w}");
    }
    if let Some(w) = &d.forward_t.witness {
        return format!("T_!Gr ϖ ≠ 𝓛₁^opp: {w}");
    }
    "verdict fails".into()
}

fn pair_entry(
    name: &str,
    inst: &DualPairInstance,
    points: &[Vec<Scalar>],
    strict: bool,
    extra: Value,
) -> Result<Entry, CliError> {
    if points.is_empty() {
        return Ok(Entry {
            name: name.into(),
            pass: false,
            summary: "no usable sample points".into(),
            detail: extra,
        });
    }
    let r: VerificationReport = inst.verify(points).map_err(runtime)?;
    let enough = !strict || points.len() >= STRICT_MIN_SAMPLES;
    let summary = match r.first_failure() {
        Some(p) => format!("fails at {}: {}", show_point(&p.point), witness(&p.verdict)),
        None if !enough => format!(
            "holds at {} points, below the strict threshold {STRICT_MIN_SAMPLES}",
            points.len()
        ),
        None => format!(
            "weak dual pair at {} points, rank {}",
            points.len(),
            r.expected_rank
        ),
    };
    let summary = if r.equivalence.all_agree {
        summary
    } else {
        format!("{summary}; criteria disagree")
    };
    let mut detail = to_value(&r);
    if let (Value::Object(d), Value::Object(e)) = (&mut detail, extra) {
        d.extend(e);
    }
    Ok(Entry {
        name: name.into(),
        pass: r.holds && enough && r.equivalence.all_agree,
        summary,
        detail,
    })
}

fn wants(opts: &RunOptions, m: Mode) -> bool {
    opts.mode.is_none_or(|x| x == m)
}

fn doc_seed(doc: &InstanceDocument, opts: &RunOptions) -> (u64, usize) {
    (
        opts.seed.unwrap_or(doc.samples.seed),
        opts.samples.unwrap_or(doc.samples.count),
    )
}

fn verify_pair(doc: &InstanceDocument, opts: &RunOptions) -> Result<Vec<Entry>, CliError> {
    let (seed, count) = doc_seed(doc, opts);
    let mut out = Vec::new();
    for (name, inst) in &doc.instances {
        if !wants(opts, inst.mode()) {
            continue;
        }
        let pts = doc.points_for(name, seed, count);
        out.push(pair_entry(name, inst, &pts, opts.strict, json!({})));
    }
    out.into_iter().collect()
}

fn seeded_points(inst: &DualPairInstance, name: &str, seed: u64, count: usize) -> Vec<Vec<Scalar>> {
    inst.sample_points(&mut Sampler::new(seed ^ fnv(name)), count)
}

fn apex_detail(inst: &DualPairInstance) -> Value {
    json!({ "apex": inst.apex().coords(), "form": inst.form().to_matrix().row_vecs().iter().map(|r| r.iter().map(|f| inst.apex().display(f)).collect::<Vec<_>>()).collect::<Vec<_>>() })
}

fn compose_cmd(doc: &InstanceDocument, opts: &RunOptions) -> Result<Vec<Entry>, CliError> {
    let (seed, count) = doc_seed(doc, opts);
    let mut out = Vec::new();
    for t in &doc.compose {
        let (a, b) = (&doc.instances[&t.first], &doc.instances[&t.second]);
        if !wants(opts, a.mode()) {
            continue;
        }
        match compose(a, b, t.sign) {
            Ok(c) => {
                let pts = seeded_points(&c, &t.name, seed, count);
                out.push(pair_entry(&t.name, &c, &pts, opts.strict, apex_detail(&c))?);
            }
            Err(e) => out.push(Entry {
                name: t.name.clone(),
                pass: false,
                summary: e.to_string(),
                detail: json!({}),
            }),
        }
    }
    Ok(out)
}

fn pullback_cmd(doc: &InstanceDocument, opts: &RunOptions) -> Result<Vec<Entry>, CliError> {
    let (seed, count) = doc_seed(doc, opts);
    let mut out = Vec::new();
    for t in &doc.pullbacks {
        let inst = &doc.instances[&t.instance];
        if !wants(opts, inst.mode()) {
            continue;
        }
        let maps = [&doc.morphisms[&t.maps[0]], &doc.morphisms[&t.maps[1]]];
        let mut s = Sampler::new(seed ^ fnv(&t.name));
        match transverse_pullback(inst, maps, &mut s, count) {
            Ok(p) => {
                let pts = seeded_points(&p, &t.name, seed, count);
                out.push(pair_entry(&t.name, &p, &pts, opts.strict, apex_detail(&p))?);
            }
            Err(e) => out.push(Entry {
                name: t.name.clone(),
                pass: false,
                summary: e.to_string(),
                detail: json!({}),
            }),
        }
    }
    for t in &doc.normal_forms {
        let s = &doc.structures[&t.structure];
        if !wants(opts, s.chart().mode()) {
            continue;
        }
        let (phi, psi, b) = (
            &doc.morphisms[&t.phi],
            &doc.morphisms[&t.psi],
            &doc.forms[&t.b],
        );
        let pts = if t.points.is_empty() {
            let mut smp = Sampler::new(seed ^ fnv(&t.name));
            let dim = psi.source().dim();
            (0..count)
                .filter_map(|_| {
                    smp.point_where(dim, |z| {
                        psi.at(z).is_ok() && b.to_matrix().eval_at(z).is_ok()
                    })
                })
                .collect()
        } else {
            t.points.clone()
        };
        match normal_form_check(s, phi, psi, b, &pts) {
            Ok(r) => {
                let summary = if r.holds {
                    format!("normal form holds at {} points", r.points.len())
                } else if !r.transversal {
                    "Φ is not a transversal".into()
                } else {
                    let p = r
                        .points
                        .iter()
                        .find(|p| !p.check.holds)
                        .expect("a failing point");
                    format!(
                        "fails at {}: {}",
                        show_point(&p.point),
                        p.check.witness.clone().unwrap_or_default()
                    )
                };
                out.push(Entry {
                    name: t.name.clone(),
                    pass: r.holds,
                    summary,
                    detail: to_value(&r),
                });
            }
            Err(e) => out.push(Entry {
                name: t.name.clone(),
                pass: false,
                summary: e.to_string(),
                detail: json!({}),
            }),
        }
    }
    Ok(out)
}

fn leafcorr_cmd(doc: &InstanceDocument, opts: &RunOptions) -> Result<Vec<Entry>, CliError> {
    let (seed, count) = doc_seed(doc, opts);
    let tasks: Vec<(String, LeafTask)> = if doc.leaves.is_empty() {
        doc.instances
            .keys()
            .map(|k| (k.clone(), LeafTask::default()))
            .collect()
    } else {
        doc.leaves
            .iter()
            .map(|t| {
                let get = |k: &Option<String>| k.as_ref().map(|k| doc.morphisms[k].clone());
                (
                    t.instance.clone(),
                    LeafTask {
                        leaf: get(&t.leaf),
                        slice: get(&t.slice),
                    },
                )
            })
            .collect()
    };
    let mut out = Vec::new();
    for (name, task) in tasks {
        let inst = &doc.instances[&name];
        if !wants(opts, inst.mode()) {
            continue;
        }
        let pts = doc.points_for(&name, seed, count);
        let mut s = Sampler::new(seed ^ fnv(&name) ^ 1);
        let r = leaf_correspondence_report(inst, &pts, &task, &mut s).map_err(runtime)?;
        let summary = if r.alarm {
            "leg leaf types differ at some point: not a weak dual pair".to_string()
        } else if let Some(w) = r.symbolic.as_ref().and_then(|s| s.witness.clone()) {
            w
        } else if r.holds {
            let types: Vec<String> = r
                .points
                .iter()
                .map(|p| format!("{:?}", p.leg_types[0]).to_lowercase())
                .collect();
            format!(
                "leaf relations hold at {} points ({})",
                r.points.len(),
                types.first().cloned().unwrap_or_default()
            )
        } else {
            "a pointwise leaf relation fails".into()
        };
        out.push(Entry {
            name,
            pass: r.holds,
            summary,
            detail: to_value(&r),
        });
    }
    Ok(out)
}

fn check_structure(doc: &InstanceDocument, opts: &RunOptions) -> Result<Vec<Entry>, CliError> {
    let (seed, count) = doc_seed(doc, opts);
    let mut out = Vec::new();
    for (name, s) in &doc.structures {
        if !wants(opts, s.chart().mode()) {
            continue;
        }
        let inv = s
            .check_involutive()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        let mut smp = Sampler::new(seed ^ fnv(name));
        let pts: Vec<Vec<Scalar>> = (0..count)
            .filter_map(|_| smp.point_where(s.chart().dim(), |p| s.fiber_at(p).is_ok()))
            .collect();
        let types: Vec<Value> = pts
            .iter()
            .map(|p| to_value(&leaf_type(&s.fiber_at(p).expect("sampled where defined"))))
            .collect();
        let summary = match (&inv.holds, &inv.witness) {
            (true, _) => format!("{} structure ({})", s.kind(), inv.criterion),
            (false, Some(w)) => format!("not involutive ({}): {w}", inv.criterion),
            (false, None) => format!("not involutive ({})", inv.criterion),
        };
        out.push(Entry {
            name: name.clone(),
            pass: inv.holds,
            summary,
            detail: json!({ "involutivity": inv, "points": pts, "leaf_types": types }),
        });
    }
    Ok(out)
}

fn selfdual(opts: &RunOptions, seed: u64) -> Result<Vec<Entry>, CliError> {
    let mode = opts.mode.unwrap_or_default();
    let model = FiberModel::new(opts.dim, mode);
    let mut s = Sampler::new(seed);
    let mut failed = Vec::new();
    let mut full_contact = 0;
    for k in 0..opts.count {
        let l = random_lagrangian(&mut s, &model);
        let (_, r) = self_dual_linear_model(&l).map_err(runtime)?;
        if !r.holds {
            failed.push(k);
        }
        if r.full_contact == Some(true) {
            full_contact += 1;
        }
    }
    let pass = failed.is_empty() && opts.count > 0;
    let summary = format!(
        "{} of {} models verified, {full_contact} full contact",
        opts.count - failed.len(),
        opts.count
    );
    Ok(vec![Entry {
        name: format!("selfdual n={} {mode}", opts.dim),
        pass,
        summary,
        detail: json!({ "n": opts.dim, "mode": mode, "count": opts.count, "failed": failed, "full_contact": full_contact }),
    }])
}

/// Runs a command. `doc` is required for the commands that read a document.
pub fn run(
    cmd: Command,
    doc: Option<&InstanceDocument>,
    opts: &RunOptions,
) -> Result<Report, CliError> {
    let need = || doc.ok_or_else(|| CliError::Usage(format!("{} needs --input", cmd.name())));
    let (seed, samples) = match doc {
        Some(d) => doc_seed(d, opts),
        None => (opts.seed.unwrap_or(7), opts.samples.unwrap_or(opts.count)),
    };
    let results = match cmd {
        Command::CheckStructure => check_structure(need()?, opts)?,
        Command::VerifyPair => verify_pair(need()?, opts)?,
        Command::Compose => compose_cmd(need()?, opts)?,
        Command::Pullback => pullback_cmd(need()?, opts)?,
        Command::Leafcorr => leafcorr_cmd(need()?, opts)?,
        Command::Selfdual => selfdual(opts, seed)?,
        Command::Oracle => oracle::run_all(seed)
            .into_iter()
            .map(|o| Entry {
                name: o.name.clone(),
                pass: o.pass(),
                summary: o.summary(),
                detail: to_value(&o),
            })
            .collect(),
    };
    if results.is_empty() {
        return Err(CliError::Usage(format!(
            "{} found nothing to check",
            cmd.name()
        )));
    }
    let pass = results.iter().all(|e| e.pass);
    Ok(Report {
        command: cmd,
        seed,
        samples,
        strict: opts.strict,
        results,
        pass,
    })
}
