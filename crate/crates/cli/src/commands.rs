use std::collections::BTreeMap;
use std::error::Error;
use std::fs;
use std::path::Path;

use glp_core::algebra::{
    alg_consequence_check, check_glp, heights, is_box_founded, ConsequenceMode, Elem, Valuation,
};
use glp_core::cyclic::{check_cyclic, classify_cyclic, cyclic_to_hilbert, judge_cyclic, theorem_witness, CyclicDerivation};
use glp_core::hilbert::{check_hilbert, classify};
use glp_core::infinitary::{
    bisimilar, check_omega, classify_inf, inf_to_omega, judge_inf, omega_to_inf, ravel, unravel, ProofGraph,
};
use glp_core::io::{AlgebraFile, ModelFile, ProofFile, ProofFileKind};
use glp_core::neighbourhood::{
    sem_consequence_check, search_countermodel, Model, SearchBounds, SemMode,
};
use glp_core::proof::{Derivation, Judgment, LeafClassification};
use glp_core::{parse, CheckError, Formula, FormulaSet};
use serde_json::Value;

use crate::report::Report;
use crate::{Cli, Cmd, Context, Mode};

pub type Result<T> = std::result::Result<T, Box<dyn Error>>;

/// A report plus, for transformation verbs run without `-o`, the produced
/// document. When a document is present it owns standard output and the
/// report goes to standard error.
pub struct Outcome {
    pub report: Report,
    pub document: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome { report, document: None }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Check { file, ctx } => check(file, ctx).map(Into::into),
        Cmd::Classify { file, inf } => classify_cmd(file, *inf).map(Into::into),
        Cmd::ToHilbert { file, ctx, raw, output } => to_hilbert(file, ctx, *raw, output.as_deref()),
        Cmd::Ravel { file, output } => ravel_cmd(file, output.as_deref()),
        Cmd::ToOmega { file, ctx, output } => to_omega(file, ctx, output.as_deref()),
        Cmd::ToInf { file, ctx, output } => to_inf(file, ctx, output.as_deref()),
        Cmd::Eval { model, phi, world } => eval(model, phi, world.as_deref()).map(Into::into),
        Cmd::Consequence {
            phi,
            ctx,
            mode,
            model,
            world,
            nbhd,
            search,
            levels,
            output,
        } => match (model, search) {
            (Some(m), None) => consequence_at(m, phi, ctx, *mode, world.as_deref(), nbhd.as_deref()).map(Into::into),
            (None, Some(n)) => search_cmd("consequence", phi, ctx, *mode, *n, *levels, output.as_deref()).map(Into::into),
            _ => Err("consequence needs either --model or --search".into()),
        },
        Cmd::Algebra {
            file,
            phi,
            val,
            ctx,
            mode,
        } => algebra_cmd(file, phi.as_deref(), val.as_deref(), ctx, *mode).map(Into::into),
        Cmd::Search {
            phi,
            ctx,
            mode,
            points,
            levels,
            output,
        } => search_cmd("search", phi, ctx, *mode, *points, *levels, output.as_deref()).map(Into::into),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()).into())
}

fn read_proof(path: &Path) -> Result<ProofFile> {
    Ok(ProofFile::from_json(&read(path)?)?)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()).into())
}

fn formula(s: &str) -> Result<Formula> {
    parse(s).map_err(|e| format!("{s:?}: {e}").into())
}

fn formula_list(s: &str) -> Result<FormulaSet> {
    FormulaSet::parse_list(s).map_err(|e| format!("{s:?}: {e}").into())
}

fn rendered(s: &FormulaSet) -> Value {
    s.iter().map(Formula::render).collect::<Vec<_>>().into()
}

fn rendered_list(xs: &[Formula]) -> Value {
    xs.iter().map(Formula::render).collect::<Vec<_>>().into()
}

/// Context from the flags, falling back to the file, then to `default`.
fn context(ctx: &Context, file: &ProofFile, default: impl FnOnce() -> (FormulaSet, FormulaSet)) -> Result<(FormulaSet, FormulaSet)> {
    let from_flags = |flag: &Option<String>| flag.as_deref().map(formula_list).transpose();
    let sigma = from_flags(&ctx.sigma)?;
    let gamma = from_flags(&ctx.gamma)?;
    let in_file = file.sigma.is_some() || file.gamma.is_some();
    if sigma.is_none() && gamma.is_none() && !in_file {
        return Ok(default());
    }
    let sigma = match sigma {
        Some(s) => s,
        None => file.sigma()?,
    };
    let gamma = match gamma {
        Some(g) => g,
        None => file.gamma()?,
    };
    Ok((sigma, gamma))
}

fn has_context(ctx: &Context, file: &ProofFile) -> bool {
    ctx.sigma.is_some() || ctx.gamma.is_some() || file.sigma.is_some() || file.gamma.is_some()
}

fn all_assumptions(d: &Derivation) -> (FormulaSet, FormulaSet) {
    let all: FormulaSet = d.assumptions().into_iter().collect();
    (all.clone(), all)
}

fn leaves_context(cls: &LeafClassification) -> (FormulaSet, FormulaSet) {
    (cls.boxed_formulas(), cls.local_formulas())
}

fn kind_name(k: ProofFileKind) -> &'static str {
    match k {
        ProofFileKind::Hilbert => "hilbert",
        ProofFileKind::Cyclic => "cyclic",
        ProofFileKind::Omega => "omega",
    }
}

fn rejected(verb: &'static str, e: &CheckError) -> Report {
    Report::new(verb, "invalid", false)
        .field("code", e.code())
        .field("error", e.to_string())
}

fn judgment_report(verb: &'static str, j: &Judgment) -> Report {
    Report::new(verb, "valid", true)
        .field("conclusion", j.conclusion.render())
        .field("sigma", rendered(&j.sigma))
        .field("gamma", rendered(&j.gamma))
        .field("boxed", rendered_list(&j.leaves.boxed_list()))
        .field("local", rendered_list(&j.leaves.local_list()))
}

fn check(path: &Path, ctx: &Context) -> Result<Report> {
    let file = read_proof(path)?;
    let kind = file.kind();
    let judged = match kind {
        ProofFileKind::Hilbert => {
            let d = file.to_derivation()?;
            let (sigma, gamma) = context(ctx, &file, || all_assumptions(&d))?;
            check_hilbert(&d, &sigma, &gamma)
        }
        ProofFileKind::Omega => {
            let d = file.to_derivation()?;
            let (sigma, gamma) = context(ctx, &file, || all_assumptions(&d))?;
            check_omega(&d, &sigma, &gamma)
        }
        ProofFileKind::Cyclic => {
            let c = file.to_cyclic()?;
            match classify_cyclic(&c) {
                Err(e) => Err(e),
                Ok(cls) => {
                    let (sigma, gamma) = context(ctx, &file, || leaves_context(&cls))?;
                    judge_cyclic(&c, &sigma, &gamma)
                }
            }
        }
    };
    let report = match judged {
        Ok(j) => judgment_report("check", &j),
        Err(e) => rejected("check", &e),
    };
    Ok(report.field("kind", kind_name(kind)))
}

fn classify_cmd(path: &Path, inf: bool) -> Result<Report> {
    let file = read_proof(path)?;
    let kind = file.kind();
    let cls = match kind {
        ProofFileKind::Hilbert if !inf => classify(&file.to_derivation()?),
        ProofFileKind::Omega => {
            let d = file.to_derivation()?;
            let (sigma, gamma) = all_assumptions(&d);
            check_omega(&d, &sigma, &gamma).map(|j| j.leaves)
        }
        _ => {
            let c = file.to_cyclic()?;
            if inf {
                unravel(&c).map(|r| classify_inf(&r))
            } else {
                classify_cyclic(&c)
            }
        }
    };
    Ok(match cls {
        Ok(cls) => Report::new("classify", "valid", true)
            .field("kind", kind_name(kind))
            .field("mode", if inf { "inf" } else { kind_name(kind) })
            .field("boxed", leaf_ids(&cls.boxed))
            .field("local", leaf_ids(&cls.local)),
        Err(e) => rejected("classify", &e),
    })
}

fn leaf_ids(leaves: &[glp_core::proof::Leaf]) -> Value {
    leaves
        .iter()
        .map(|l| format!("{}={}", l.node.0, l.formula.render()))
        .collect::<Vec<_>>()
        .into()
}

/// Writes `doc` to `output` or hands it back for standard output.
fn emit(report: Report, doc: String, output: Option<&Path>) -> Result<Outcome> {
    match output {
        Some(p) => {
            write(p, &doc)?;
            Ok(report.field("output", p.display().to_string()).into())
        }
        None => Ok(Outcome {
            report,
            document: Some(doc),
        }),
    }
}

/// A self-check failure on produced output is a bug, not a verdict.
fn selfcheck<T>(what: &str, r: std::result::Result<T, CheckError>) -> Result<T> {
    r.map_err(|e| format!("{what} output failed its re-check: {e}").into())
}

fn to_hilbert(path: &Path, ctx: &Context, raw: bool, output: Option<&Path>) -> Result<Outcome> {
    let file = read_proof(path)?;
    let c = file.to_cyclic()?;
    if let Err(e) = check_cyclic(&c) {
        return Ok(rejected("to-hilbert", &e).into());
    }
    let (d, sigma, gamma) = if has_context(ctx, &file) {
        let cls = selfcheck("cyclic", classify_cyclic(&c))?;
        let (sigma, gamma) = context(ctx, &file, || leaves_context(&cls))?;
        if let Err(e) = judge_cyclic(&c, &sigma, &gamma) {
            return Ok(rejected("to-hilbert", &e).into());
        }
        (theorem_witness(&c, &sigma, &gamma)?, sigma, gamma)
    } else {
        let t = cyclic_to_hilbert(&c)?;
        let d = if raw { t.raw } else { t.normalized };
        (d, FormulaSet::new(), FormulaSet::new())
    };
    let j = selfcheck("to-hilbert", check_hilbert(&d, &sigma, &gamma))?;
    let doc = ProofFile::from_derivation(&d).with_context(&sigma, &gamma).to_json();
    let report = judgment_report("to-hilbert", &j).field("size", d.size());
    emit(report, doc, output)
}

fn ravel_cmd(path: &Path, output: Option<&Path>) -> Result<Outcome> {
    let file = read_proof(path)?;
    let g = if file.kind() == ProofFileKind::Cyclic {
        ProofGraph::from_cyclic(&file.to_cyclic()?)
    } else {
        file.to_graph()?
    };
    let c = match ravel(&g) {
        Ok(c) => c,
        Err(e) => return Ok(rejected("ravel", &e).into()),
    };
    selfcheck("ravel", check_cyclic(&c))?;
    if !bisimilar(&g, &ProofGraph::from_cyclic(&c)) {
        return Err("ravel output is not bisimilar to its input".into());
    }
    let report = Report::new("ravel", "valid", true)
        .field("conclusion", c.conclusion().render())
        .field("nodes", c.len())
        .field("backlinks", c.backlinks().len());
    emit(report, ProofFile::from_cyclic(&c).to_json(), output)
}

fn to_omega(path: &Path, ctx: &Context, output: Option<&Path>) -> Result<Outcome> {
    let file = read_proof(path)?;
    let c = file.to_cyclic()?;
    let r = match unravel(&c) {
        Ok(r) => r,
        Err(e) => return Ok(rejected("to-omega", &e).into()),
    };
    let cls = classify_inf(&r);
    let (sigma, gamma) = context(ctx, &file, || leaves_context(&cls))?;
    if let Err(e) = judge_inf(&r, &sigma, &gamma) {
        return Ok(rejected("to-omega", &e).into());
    }
    let w = inf_to_omega(&r, &sigma, &gamma)?;
    let j = selfcheck("to-omega", check_omega(&w, &sigma, &gamma))?;
    let doc = ProofFile::from_derivation(&w).with_context(&sigma, &gamma).to_json();
    let report = judgment_report("to-omega", &j).field("size", w.size());
    emit(report, doc, output)
}

fn to_inf(path: &Path, ctx: &Context, output: Option<&Path>) -> Result<Outcome> {
    let file = read_proof(path)?;
    let w = file.to_derivation()?;
    let (sigma, gamma) = context(ctx, &file, || all_assumptions(&w))?;
    if let Err(e) = check_omega(&w, &sigma, &gamma) {
        return Ok(rejected("to-inf", &e).into());
    }
    let r = omega_to_inf(&w)?;
    let j = selfcheck("to-inf", judge_inf(&r, &sigma, &gamma))?;
    let c: &CyclicDerivation = r.presentation();
    let doc = ProofFile::from_cyclic(c).with_context(&sigma, &gamma).to_json();
    let report = judgment_report("to-inf", &j)
        .field("nodes", c.len())
        .field("backlinks", c.backlinks().len());
    emit(report, doc, output)
}

fn read_model(path: &Path) -> Result<Model> {
    Ok(ModelFile::from_json(&read(path)?)?.to_model()?)
}

fn world_index(m: &Model, w: &str) -> Result<usize> {
    let points = m.space().points();
    if let Some(i) = points.iter().position(|p| p == w) {
        return Ok(i);
    }
    match w.parse::<usize>() {
        Ok(i) if i < points.len() => Ok(i),
        _ => Err(format!("no world {w:?} in the model").into()),
    }
}

fn world_names(m: &Model, set: Elem) -> Value {
    m.space()
        .points()
        .iter()
        .enumerate()
        .filter(|(i, _)| set >> i & 1 == 1)
        .map(|(_, p)| p.clone())
        .collect::<Vec<_>>()
        .into()
}

fn eval(path: &Path, phi: &str, world: Option<&str>) -> Result<Report> {
    let m = read_model(path)?;
    let f = formula(phi)?;
    let ext = m.eval(&f);
    let (holds, at) = match world {
        Some(w) => {
            let x = world_index(&m, w)?;
            (m.holds_at(x, &f), m.space().points()[x].clone())
        }
        None => (m.holds(&f), "all".to_string()),
    };
    Ok(Report::new("eval", if holds { "true" } else { "false" }, holds)
        .field("phi", f.render())
        .field("world", at)
        .field("extension", world_names(&m, ext)))
}

fn sem_mode(mode: Mode, nbhd: Elem) -> SemMode {
    match mode {
        Mode::Local => SemMode::Local,
        Mode::Global => SemMode::Global,
        Mode::Glocal => SemMode::Glocal,
        Mode::GlocalStar => SemMode::GlocalStar(nbhd),
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Local => "local",
        Mode::Global => "global",
        Mode::Glocal => "glocal",
        Mode::GlocalStar => "glocal-star",
    }
}

fn flag_context(ctx: &Context) -> Result<(FormulaSet, FormulaSet)> {
    let list = |flag: &Option<String>| flag.as_deref().map(formula_list).unwrap_or_else(|| Ok(FormulaSet::new()));
    Ok((list(&ctx.sigma)?, list(&ctx.gamma)?))
}

fn consequence_at(
    path: &Path,
    phi: &str,
    ctx: &Context,
    mode: Mode,
    world: Option<&str>,
    nbhd: Option<&str>,
) -> Result<Report> {
    let m = read_model(path)?;
    let f = formula(phi)?;
    let (sigma, gamma) = flag_context(ctx)?;
    let x = match (world, mode) {
        (Some(w), _) => world_index(&m, w)?,
        (None, Mode::Global) => 0,
        (None, _) => return Err("--world is required for this mode".into()),
    };
    let u = match nbhd {
        Some(list) => {
            let mut u: Elem = 0;
            for w in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                u |= 1 << world_index(&m, w)?;
            }
            u
        }
        None if m.space().n_points() > 0 => m.space().topology(0).min_nbhd(x),
        None => 0,
    };
    let holds = sem_consequence_check(&m, x, &sigma, &gamma, &f, sem_mode(mode, u))?;
    let mut r = Report::new("consequence", if holds { "true" } else { "false" }, holds)
        .field("mode", mode_name(mode))
        .field("phi", f.render());
    if mode != Mode::Global {
        r.push("world", m.space().points()[x].clone());
    }
    if mode == Mode::GlocalStar {
        r.push("nbhd", world_names(&m, u));
    }
    Ok(r)
}

fn search_cmd(
    verb: &'static str,
    phi: &str,
    ctx: &Context,
    mode: Mode,
    points: usize,
    levels: usize,
    output: Option<&Path>,
) -> Result<Report> {
    let f = formula(phi)?;
    let (sigma, gamma) = flag_context(ctx)?;
    let bounds = SearchBounds::new(points, levels);
    let found = search_countermodel(&sigma, &gamma, &f, sem_mode(mode, 0), &bounds)?;
    let r = Report::new(verb, if found.is_some() { "countermodel" } else { "none" }, found.is_none())
        .field("mode", mode_name(mode))
        .field("phi", f.render())
        .field("points", points)
        .field("levels", levels);
    let Some(cm) = found else {
        return Ok(r);
    };
    let file = ModelFile::from_model(&cm.model);
    let mut r = r.field("world", cm.model.space().points()[cm.world].clone());
    if let Some(u) = cm.nbhd {
        r.push("nbhd", world_names(&cm.model, u));
    }
    match output {
        Some(p) => {
            write(p, &file.to_json())?;
            r.push("output", p.display().to_string());
        }
        None => r.push("model", serde_json::to_value(&file)?),
    }
    Ok(r)
}

fn parse_valuation(s: &str) -> Result<Valuation> {
    let mut v = BTreeMap::new();
    for pair in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, x) = pair.split_once('=').ok_or_else(|| format!("bad valuation entry {pair:?}"))?;
        let x = x.trim();
        let bits = match x.strip_prefix("0b") {
            Some(b) => Elem::from_str_radix(b, 2),
            None => x.parse::<Elem>(),
        }
        .map_err(|e| format!("bad valuation entry {pair:?}: {e}"))?;
        v.insert(k.trim().to_string(), bits);
    }
    Ok(v)
}

fn algebra_cmd(path: &Path, phi: Option<&str>, val: Option<&str>, ctx: &Context, mode: Mode) -> Result<Report> {
    let a = AlgebraFile::from_json(&read(path)?)?.to_algebra()?;
    let mut r = match check_glp(&a) {
        Ok(()) => Report::new("algebra", "glp", true),
        Err(v) => Report::new("algebra", "not-glp", false).field("violation", v.to_string()),
    };
    r.push("atoms", a.n_atoms());
    r.push("levels", a.levels());
    for i in 0..a.levels() {
        let founded = is_box_founded(&a, i);
        r.push(&format!("founded_{i}"), founded);
        if founded {
            let hs = heights(&a, i)?;
            r.push(&format!("heights_{i}"), hs.iter().map(|h| h.to_string()).collect::<Vec<_>>());
        }
    }
    let Some(phi) = phi else {
        return Ok(r);
    };
    let f = formula(phi)?;
    let v = val.map(parse_valuation).transpose()?.unwrap_or_default();
    let value = a.evaluate(&v, &f)?;
    r.push("phi", f.render());
    r.push("value", value);
    if ctx.sigma.is_none() && ctx.gamma.is_none() {
        return Ok(r);
    }
    let (sigma, gamma) = flag_context(ctx)?;
    let cmode = match mode {
        Mode::Local => ConsequenceMode::Local,
        Mode::Global => ConsequenceMode::Global,
        Mode::Glocal => ConsequenceMode::Glocal,
        Mode::GlocalStar => return Err("glocal-star is a neighbourhood mode".into()),
    };
    let holds = alg_consequence_check(&a, &v, &sigma, &gamma, &f, cmode)?;
    let mut out = Report::new("algebra", if holds { "true" } else { "false" }, holds && r.ok());
    out.push("mode", mode_name(mode));
    for (k, x) in r.into_fields() {
        out.push(&k, x);
    }
    Ok(out)
}
