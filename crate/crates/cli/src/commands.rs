//! One function per subcommand. Each returns the report entries; every
//! certificate is re-verified before it is attached.

use std::path::Path;

use num_traits::ToPrimitive;
use rand::Rng;
use serde_json::{json, Value};
use transverse_core::algebroid::{ClassVerdict, FailureKind};
use transverse_core::cech::{
    modular_evidence, transverse_volume_form_criterion, w1tr, CoverDecl, ModEvidence, ParityGraph, ParityVerdict,
    Triviality, VolumeVerdict,
};
use transverse_core::groupoid::{
    additive_part, canonical_groupoid_rep, tilde_cocycle, AddCocycle, Arrow, FixedPointCertificate, GpdLineRep,
    GroupoidModel, Letter, ModelKind,
};
use transverse_core::symcore::{integrate_density, Decision, LogSum};
use transverse_core::vanest::{induced_algebroid, van_est1};
use transverse_core::{random, AlgCocycle1, Character, Chart, LieAlgebroid, RatExpr, Rational};

use crate::input::{letters, rationals, read_json, AlgebroidFile, DensityFile, InputError, ModelFile, OrientabilityFile};
use crate::report::{Entry, Verdict};

/// Options shared by all commands.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub seed: u64,
    pub max_degree: u32,
}

/// Random functions per randomized suite.
const SUITE_SIZE: usize = 20;

type Outcome = Result<Vec<Entry>, InputError>;

fn bad(path: &Path) -> impl Fn(transverse_core::Error) -> InputError + '_ {
    move |e| InputError::new(path, e)
}

fn strings(v: &[RatExpr]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn cocycle_json(c: &AlgCocycle1) -> Value {
    json!(strings(&c.values))
}

fn load_algebroid(path: &Path) -> Result<(AlgebroidFile, LieAlgebroid), InputError> {
    let file: AlgebroidFile = read_json(path)?;
    let a = LieAlgebroid::from_spec(&file.spec).map_err(bad(path))?;
    Ok((file, a))
}

fn validation_entries(a: &LieAlgebroid) -> Vec<Entry> {
    let report = a.check();
    let kinds = [
        (FailureKind::ForeignVariable, "variables"),
        (FailureKind::Antisymmetry, "antisymmetry"),
        (FailureKind::AnchorMorphism, "anchor morphism"),
        (FailureKind::Jacobi, "jacobi"),
    ];
    kinds
        .iter()
        .map(|&(kind, name)| {
            let hits: Vec<_> = report.failures.iter().filter(|f| f.kind == kind).collect();
            if hits.is_empty() {
                return Entry::pass(name, "holds identically");
            }
            // re-check: each reported residual is a nonzero expression
            let shown: Vec<String> = hits.iter().filter(|f| !f.residual.is_zero()).map(|f| f.to_string()).collect();
            let cert: Vec<Value> = hits
                .iter()
                .map(|f| json!({"indices": f.indices, "residual": f.residual.to_string()}))
                .collect();
            Entry::fail(name, format!("{} failure(s)", hits.len()))
                .with_residuals(shown)
                .with_certificate(json!(cert))
        })
        .collect()
}

pub fn check_algebroid(path: &Path, opts: Options) -> Outcome {
    let (_, a) = load_algebroid(path)?;
    let mut entries = validation_entries(&a);
    if a.check().passed() {
        // d_A² = 0 on random functions
        let mut rng = random::rng(opts.seed);
        let mut residuals = Vec::new();
        for _ in 0..SUITE_SIZE {
            let f = random::polynomial(&mut rng, a.chart().names(), opts.max_degree);
            for ((i, j), r) in a.d1(&a.d0(&f)) {
                if !r.is_zero() {
                    residuals.push(format!("f = {f}, (d d f)({}, {}) = {r}", i + 1, j + 1));
                }
            }
        }
        let name = "d_A squares to zero on random functions";
        entries.push(if residuals.is_empty() {
            Entry::pass(name, format!("{SUITE_SIZE} functions, seed {}, degree ≤ {}", opts.seed, opts.max_degree))
        } else {
            Entry::fail(name, "nonzero residuals").with_residuals(residuals)
        });
    }
    Ok(entries)
}

pub fn modular_class(path: &Path, _opts: Options) -> Outcome {
    let (file, a) = load_algebroid(path)?;
    let checks = validation_entries(&a);
    if checks.iter().any(|e| e.verdict != Verdict::Pass) {
        let mut out = vec![Entry::fail("validation", "not a Lie algebroid; see check-algebroid")];
        out.extend(checks.into_iter().filter(|e| e.verdict != Verdict::Pass));
        return Ok(out);
    }
    let chi = file.chi.unwrap_or(Character::DENSITY);
    let c = a.canonical_rep(chi).map_err(bad(path))?.theta();
    let mut entries = Vec::new();
    if !a.is_closed(&c) {
        entries.push(Entry::fail("cocycle", "characteristic form is not closed"));
        return Ok(entries);
    }
    let label = if chi == Character::DENSITY { "modular cocycle".to_string() } else { format!("characteristic cocycle ({}, {})", chi.m, chi.eps) };
    entries.push(Entry::pass(&label, c.to_string()).with_certificate(json!({"chi": chi, "values": cocycle_json(&c)})));
    if chi == Character::DENSITY {
        let qa = a.qa_cocycle().map_err(bad(path))?;
        let vtr = a.vtr_cocycle().map_err(bad(path))?;
        let name = "Q_A and transverse volume cocycles agree";
        entries.push(if qa == c && vtr == c {
            Entry::pass(name, "identical representatives")
        } else {
            Entry::fail(name, format!("{qa} / {vtr}"))
        });
    }
    let candidate = file
        .primitive
        .as_deref()
        .map(|s| RatExpr::parse(s, a.chart().names()))
        .transpose()
        .map_err(bad(path))?;
    entries.push(match a.class_verdict(&c, candidate.as_ref()) {
        ClassVerdict::Trivial { primitive } => {
            if a.is_coboundary(&c, &primitive) {
                Entry::pass("class", format!("trivial, cocycle = d_A({primitive})"))
                    .with_certificate(json!({"primitive": primitive.to_string()}))
            } else {
                Entry::unknown("class", "primitive failed to re-verify")
            }
        }
        ClassVerdict::Nontrivial { reason } => {
            let constant = c.values.iter().all(|v| v.as_constant().is_some());
            let shown = if constant { format!("nontrivial (constant-coboundary test: {reason})") } else { format!("nontrivial ({reason})") };
            Entry::fail("class", shown).with_certificate(json!({"cocycle": cocycle_json(&c), "reason": reason}))
        }
        ClassVerdict::Unknown => {
            Entry::unknown("class", "no primitive supplied and the anchor does not vanish").with_residuals(strings(&c.values))
        }
    });
    Ok(entries)
}

struct LoadedModel {
    file: ModelFile,
    model: GroupoidModel,
    sigma: RatExpr,
}

fn load_model(path: &Path) -> Result<LoadedModel, InputError> {
    let file: ModelFile = read_json(path)?;
    model_from_file(path, file)
}

fn model_from_file(path: &Path, file: ModelFile) -> Result<LoadedModel, InputError> {
    let model = GroupoidModel::from_spec(&file.model).map_err(bad(path))?;
    let sigma = match &file.sigma {
        Some(s) => RatExpr::parse(s, model.chart().names()).map_err(bad(path))?,
        None => RatExpr::one(),
    };
    Ok(LoadedModel { file, model, sigma })
}

fn rep_of(path: &Path, m: &LoadedModel, chi: Character) -> Result<GpdLineRep, InputError> {
    if m.file.twists.is_empty() {
        return canonical_groupoid_rep(&m.model, chi).map_err(bad(path));
    }
    let twists = m
        .file
        .twists
        .iter()
        .map(|t| RatExpr::parse(t, m.model.chart().names()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad(path))?;
    GpdLineRep::with_twists(&m.model, chi, twists).map_err(bad(path))
}

fn arrow_label(a: &Arrow) -> String {
    match a {
        Arrow::Generic => "g".into(),
        Arrow::Word(w) => w.iter().map(ToString::to_string).collect::<Vec<_>>().join("·"),
    }
}

fn decision_entry(name: &str, d: Decision, detail: &str) -> Entry {
    match d {
        Decision::Equal => Entry::pass(name, detail.to_string()),
        Decision::NotEqual => Entry::fail(name, format!("{detail}: identity fails")),
        Decision::Unknown => Entry::unknown(name, format!("{detail}: undecided")),
    }
}

pub fn groupoid_cocycle(path: &Path, opts: Options) -> Outcome {
    let m = load_model(path)?;
    let chi = m.file.chi.unwrap_or(Character::DENSITY);
    let rep = rep_of(path, &m, chi)?;
    let c = tilde_cocycle(&rep, &m.sigma).map_err(bad(path))?;
    let mut words: Vec<Vec<Letter>> = m.file.words.iter().map(|w| letters(w)).collect::<Result<_, _>>().map_err(|e| InputError::new(path, e))?;
    if let ModelKind::DiscreteAction { generators } = m.model.kind() {
        if !generators.is_empty() {
            let mut rng = random::rng(opts.seed);
            words.extend(m.model.letters());
            for _ in 0..4 {
                let len = rng.gen_range(1..=3);
                words.push(
                    (0..len)
                        .map(|_| {
                            let k = rng.gen_range(0..generators.len());
                            if rng.gen_bool(0.5) { Letter::gen(k) } else { Letter::inv(k) }
                        })
                        .collect(),
                );
            }
        }
    }
    let mut entries = Vec::new();
    let law = m.model.check_jacobian_law(&words).map_err(bad(path))?;
    entries.push(if law {
        Entry::pass("transverse Jacobian is multiplicative", format!("{} model", m.model.kind_name()))
    } else {
        Entry::fail("transverse Jacobian is multiplicative", "J̃(gh) ≠ J̃(g)J̃(h)")
    });
    entries.push(decision_entry("unital", c.is_unital().map_err(bad(path))?, "c̃ = 1 on units"));
    entries.push(decision_entry(
        "cocycle law",
        c.check_composition(&words).map_err(bad(path))?,
        "c̃(gh) = c̃(g)·c̃(h) on composable pairs",
    ));
    let add = additive_part(&c).map_err(bad(path))?;
    let values: Vec<Value> = c
        .generating_arrows()
        .iter()
        .map(|a| -> Result<Value, transverse_core::Error> {
            let v = c.value(a)?;
            Ok(json!({
                "arrow": arrow_label(a),
                "abs": v.abs_part.to_string(),
                "sign": v.sign_part.to_string(),
                "additive": add.value(a)?.to_string(),
            }))
        })
        .collect::<Result<_, _>>()
        .map_err(bad(path))?;
    entries.push(
        Entry::pass("values", format!("c = {add}"))
            .with_certificate(json!({"chi": chi, "sigma": m.sigma.to_string(), "arrows": values})),
    );
    Ok(entries)
}

fn obstruction_json(cert: &FixedPointCertificate) -> Value {
    json!({
        "arrow": cert.arrow.to_string(),
        "point": cert.point.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "value": cert.value.to_string(),
        "approx": cert.value.to_f64(),
    })
}

fn candidates(path: &Path, file: &ModelFile) -> Result<Vec<(transverse_core::groupoid::IsotropyArrow, Vec<Rational>)>, InputError> {
    file.isotropy
        .iter()
        .map(|i| i.resolve().map_err(|e| InputError::new(path, e)))
        .collect()
}

fn evidence_entry(path: &Path, m: &LoadedModel, ev: &ModEvidence) -> Result<Entry, InputError> {
    if !ev.verify(&m.model) {
        return Ok(Entry::unknown("modular class", "evidence failed to re-verify"));
    }
    Ok(match ev {
        ModEvidence::Density(w) => Entry::pass("modular class", format!("zero: {} is an invariant density", w.sigma))
            .with_certificate(json!({"invariant_density": w.sigma.to_string()})),
        ModEvidence::Obstruction { certificate, .. } => {
            let rep = canonical_groupoid_rep(&m.model, Character::DENSITY).map_err(bad(path))?;
            let c = additive_part(&tilde_cocycle(&rep, &m.sigma).map_err(bad(path))?).map_err(bad(path))?;
            Entry::fail(
                "modular class",
                format!("nonzero: c = {} ≠ 0 on the isotropy arrow {} at the fixed point", certificate.value, certificate.arrow),
            )
            .with_certificate(obstruction_json(certificate))
            .with_residuals(vec![c.to_string()])
        }
        ModEvidence::Unknown => Entry::unknown(
            "modular class",
            format!("{} is not invariant and no isotropy candidate gives a nonzero value", m.sigma),
        ),
    })
}

pub fn invariant_density(path: &Path, _opts: Options) -> Outcome {
    let m = load_model(path)?;
    let cands = candidates(path, &m.file)?;
    let ev = modular_evidence(&m.model, &m.sigma, &cands).map_err(bad(path))?;
    Ok(vec![evidence_entry(path, &m, &ev)?])
}

pub fn vanest(path: &Path, opts: Options) -> Outcome {
    let m = load_model(path)?;
    let a = induced_algebroid(&m.model).map_err(bad(path))?;
    let chi = m.file.chi.unwrap_or(Character::DENSITY);
    let mut entries = vec![Entry::pass("induced algebroid", format!("rank {}, brackets validated", a.rank()))
        .with_certificate(serde_json::to_value(a.to_spec()).expect("specs serialize"))];
    let rep = canonical_groupoid_rep(&m.model, chi).map_err(bad(path))?;
    let c = additive_part(&tilde_cocycle(&rep, &RatExpr::one()).map_err(bad(path))?).map_err(bad(path))?;
    let ve = van_est1(&c).map_err(bad(path))?;
    let expected = a.canonical_rep(chi).map_err(bad(path))?.theta();
    let name = "Van Est of the groupoid cocycle";
    entries.push(if ve == expected {
        Entry::pass(name, format!("VE = {ve}, matching the algebroid cocycle"))
            .with_certificate(json!({"chi": chi, "groupoid": c.to_string(), "van_est": cocycle_json(&ve)}))
    } else {
        Entry::fail(name, format!("VE = {ve}, algebroid cocycle {expected}"))
            .with_residuals(strings(&ve.add(&expected.scale(&Rational::from_integer((-1).into()))).values))
    });
    let mut rng = random::rng(opts.seed);
    let mut residuals = Vec::new();
    for _ in 0..SUITE_SIZE {
        let f = random::polynomial(&mut rng, m.model.chart().names(), opts.max_degree);
        let cob = AddCocycle::coboundary(&m.model, &LogSum::from_rational(f.clone())).map_err(bad(path))?;
        let v = van_est1(&cob).map_err(bad(path))?;
        let d = a.d0(&f);
        if v != d {
            residuals.push(format!("f = {f}: VE(δf) = {v}, d_A f = {d}"));
        }
    }
    let name = "Van Est of coboundaries";
    entries.push(if residuals.is_empty() {
        Entry::pass(name, format!("VE(δf) = d_A f for {SUITE_SIZE} functions, seed {}, degree ≤ {}", opts.seed, opts.max_degree))
    } else {
        Entry::fail(name, "mismatch").with_residuals(residuals)
    });
    Ok(entries)
}

fn parity_entry(name: &str, v: &ParityVerdict) -> Entry {
    if !v.verify() {
        return Entry::unknown(name, "certificate failed to re-verify");
    }
    let g = &v.graph;
    match &v.result {
        Triviality::Trivial(eps) => {
            let assignment: serde_json::Map<String, Value> =
                g.nodes().iter().cloned().zip(eps.iter().map(|&s| json!(s))).collect();
            Entry::pass(name, format!("trivial on {} node(s), {} edge(s)", g.nodes().len(), g.edges().len()))
                .with_certificate(json!({"assignment": assignment}))
        }
        Triviality::Nontrivial(cycle) => {
            let k = cycle.nodes.len();
            let steps: Vec<Value> = cycle
                .edges
                .iter()
                .enumerate()
                .map(|(i, &e)| {
                    let edge = &g.edges()[e];
                    json!({
                        "from": g.nodes()[cycle.nodes[i]],
                        "to": g.nodes()[cycle.nodes[(i + 1) % k]],
                        "parity": edge.parity,
                        "label": edge.label,
                    })
                })
                .collect();
            Entry::fail(name, format!("nontrivial, violating loop: {}", g.describe_cycle(cycle)))
                .with_certificate(json!({"cycle": steps, "product": -1}))
        }
    }
}

fn cover_of(path: &Path, m: &LoadedModel) -> Result<CoverDecl, InputError> {
    let spec = m.file.cover.as_ref().ok_or_else(|| InputError::new(path, "model file needs a `cover`"))?;
    CoverDecl::from_spec(spec).map_err(bad(path))
}

pub fn orientability(path: &Path, _opts: Options) -> Outcome {
    let name = "transverse orientability";
    match read_json::<OrientabilityFile>(path)? {
        OrientabilityFile::Graph(spec) => {
            let graph = ParityGraph::from_spec(&spec).map_err(bad(path))?;
            let result = graph.decide_trivial();
            Ok(vec![parity_entry("parity graph", &ParityVerdict { graph, result })])
        }
        OrientabilityFile::Model(file) => {
            let m = model_from_file(path, *file)?;
            let cover = cover_of(path, &m)?;
            let v = w1tr(&m.model, &cover).map_err(bad(path))?;
            Ok(vec![parity_entry(name, &v)])
        }
    }
}

pub fn volume_form_criterion(path: &Path, _opts: Options) -> Outcome {
    let m = load_model(path)?;
    let cover = cover_of(path, &m)?;
    let cands = candidates(path, &m.file)?;
    let ev = modular_evidence(&m.model, &m.sigma, &cands).map_err(bad(path))?;
    let mut entries = vec![evidence_entry(path, &m, &ev)?];
    let verdict = transverse_volume_form_criterion(&m.model, &cover, &ev).map_err(bad(path))?;
    let name = "transverse volume form";
    match &verdict {
        VolumeVerdict::Yes { sigma, orientation } => {
            let w1 = w1tr(&m.model, &cover).map_err(bad(path))?;
            entries.push(parity_entry("transverse orientability", &w1));
            let form: serde_json::Map<String, Value> = orientation
                .iter()
                .map(|(n, s)| (n.clone(), json!(if *s == 1 { sigma.to_string() } else { (-sigma).to_string() })))
                .collect();
            entries.push(Entry::pass(name, verdict.to_string()).with_certificate(json!({"volume_form": form})));
        }
        VolumeVerdict::ModularObstruction(_) => {
            entries.push(Entry::fail(name, verdict.to_string()));
        }
        VolumeVerdict::NotOrientable(w1) => {
            entries.push(parity_entry("transverse orientability", w1));
            entries.push(Entry::fail(name, "no: not transversely orientable"));
        }
        VolumeVerdict::Unknown { orientation } => {
            entries.push(parity_entry("transverse orientability", orientation));
            entries.push(Entry::unknown(name, verdict.to_string()));
        }
    }
    Ok(entries)
}

pub fn integrate(path: &Path, _opts: Options) -> Outcome {
    let file: DensityFile = read_json(path)?;
    let chart = Chart::new(file.chart.iter().cloned()).map_err(bad(path))?;
    let rho = RatExpr::parse(&file.density, chart.names()).map_err(bad(path))?;
    let mut bounds = Vec::new();
    for (lo, hi) in &file.bounds {
        let v = rationals(&[lo.clone(), hi.clone()]).map_err(|e| InputError::new(path, e))?;
        bounds.push((v[0].clone(), v[1].clone()));
    }
    let value = integrate_density(&rho, &chart, &bounds, file.resolution).map_err(bad(path))?;
    let approx = value.to_f64();
    Ok(vec![Entry::pass(
        "integral",
        format!("≈ {} (midpoint rule, resolution {})", approx.map_or("?".into(), |v| format!("{v:.6}")), file.resolution),
    )
    .with_certificate(json!({"exact": value.to_string(), "approx": approx, "resolution": file.resolution}))])
}
