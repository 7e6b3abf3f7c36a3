//! Group specs, the dossier pipeline and its report.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::alcove::{facet_of_lambda, facet_is_minimal, stabilizes_base_alcove};
use crate::dl_variety::{
    check_phi_w, enumerate_yw, enumerate_yw_by_fibers, m_wsigma_points, rational_group, DlContext,
    YwEnumeration, YwPoint,
};
use crate::error::{Error, Result};
use crate::fan::{double_description_ok, intersections_are_faces, is_weyl_stable, kgl_fan, locate};
use crate::finite_field::GaloisField;
use crate::finite_linear::{gl_order, FqMatrix, DEFAULT_GROUP_BUDGET};
use crate::lambda::{
    check_lambda_invariants, component_group, compute_lambda, lambdapst_check, weil_d, LambdaData,
    ShimuraDatum,
};
use crate::lt_specialize::{random_level_vector, specialize, LevelVector};
use crate::matrix::{self, Matrix};
use crate::puiseux::PuiseuxRing;
use crate::root_datum::{gl_datum, BasedRootDatum, LatticeAut};
use crate::{Int, IntMatrix, Rat};

/// Largest `n` for which the dossier builds the fan.
pub const DOSSIER_FAN_RANK: usize = 4;
/// Points per level used for the action checks.
const ACTION_SAMPLE: usize = 12;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(rename = "type")]
    pub kind: String,
    pub n: Option<usize>,
    pub rank: Option<usize>,
    pub roots: Option<Vec<Vec<i64>>>,
    pub coroots: Option<Vec<Vec<i64>>>,
    pub simple_roots: Option<Vec<usize>>,
    pub sigma: Option<Vec<Vec<i64>>>,
    pub q: u64,
    pub mu: Vec<i64>,
    /// Optional Weyl element for the component-group computation.
    pub v: Option<Vec<Vec<i64>>>,
}

fn int_matrix(rows: &[Vec<i64>], what: &str) -> Result<IntMatrix> {
    Matrix::from_rows(rows.to_vec()).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn datum(&self) -> Result<BasedRootDatum> {
        let base = match self.kind.as_str() {
            "gl" => {
                let n = self.n.ok_or_else(|| Error::Parse("type gl needs `n`".into()))?;
                gl_datum(n)?
            }
            "custom" => {
                let missing = |f: &str| Error::Parse(format!("type custom needs `{f}`"));
                let rank = self.rank.ok_or_else(|| missing("rank"))?;
                let roots = self.roots.clone().ok_or_else(|| missing("roots"))?;
                let coroots = self.coroots.clone().ok_or_else(|| missing("coroots"))?;
                let simple = self.simple_roots.clone().ok_or_else(|| missing("simple_roots"))?;
                BasedRootDatum::new(rank, roots, coroots, simple, None)?
            }
            other => return Err(Error::Parse(format!("unknown group type `{other}`"))),
        };
        match &self.sigma {
            Some(s) => base.with_sigma(int_matrix(s, "sigma")?),
            None => Ok(base),
        }
    }

    pub fn shimura_datum(&self) -> Result<ShimuraDatum> {
        ShimuraDatum::new(self.datum()?, self.q, self.mu.clone())
    }
}

#[derive(Clone, Debug)]
pub struct DossierOptions {
    /// Explicit highest level for point counts; budget overruns are errors.
    pub count_max_m: Option<u32>,
    pub budget: u128,
    pub seed: u64,
}

impl Default for DossierOptions {
    fn default() -> Self {
        DossierOptions {
            count_max_m: None,
            budget: DEFAULT_GROUP_BUDGET,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Dossier {
    pub doc: Value,
    pub ledger: Vec<(String, bool)>,
}

impl Dossier {
    pub fn all_pass(&self) -> bool {
        self.ledger.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.ledger.iter().filter(|(_, ok)| !ok).map(|(k, _)| k.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("dossier serializes")
    }
}

fn rat_json(x: &Rat) -> Value {
    Value::String(x.to_string())
}

fn rats_json(v: &[Rat]) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

fn int_json(x: &Int) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => Value::String(x.to_string()),
    }
}

fn ints_json(v: &[Int]) -> Value {
    Value::Array(v.iter().map(int_json).collect())
}

fn matrix_json(m: &IntMatrix) -> Value {
    json!((0..m.rows()).map(|i| m.row(i).to_vec()).collect::<Vec<_>>())
}

fn roots_json(d: &BasedRootDatum, set: &[usize]) -> Value {
    let mut v: Vec<&[i64]> = set.iter().map(|&i| d.root(i)).collect();
    v.sort();
    json!(v)
}

struct Ledger(Vec<(String, bool)>);

impl Ledger {
    fn push(&mut self, name: impl Into<String>, ok: bool) {
        self.0.push((name.into(), ok));
    }
}

pub fn build_dossier(spec: &GroupSpec, opts: &DossierOptions) -> Result<Dossier> {
    let sd = spec.shimura_datum()?;
    let d = &sd.datum;
    let ld = compute_lambda(&sd)?;
    let mut ledger = Ledger(Vec::new());

    for (name, ok) in check_lambda_invariants(&sd, &ld) {
        ledger.push(name, ok);
    }
    let pst = lambdapst_check(&sd, &ld);
    ledger.push("lambda-sign-pattern", pst.pass);
    ledger.push("w-length-zero", stabilizes_base_alcove(d, &sd.w.aut, &sd.mu));

    let facet = facet_of_lambda(d, &ld.lambda)?;
    ledger.push("facet-contains-sample", facet.contains(d, &facet.sample_interior_point));
    let minimal = facet_is_minimal(d, &sd.w, &ld.lambda);

    let weil = match weil_d(&sd) {
        Ok(w) => json!({"d": w.d, "mu_d": w.mu_d}),
        Err(Error::Unsupported(msg)) => json!({"unsupported": msg}),
        Err(e) => return Err(e),
    };

    let wsigma = sd.wsigma();
    let mut groups = serde_json::Map::new();
    groups.insert("w".into(), ints_json(&component_group(&wsigma.mat)?));
    if let Some(v) = &spec.v {
        let v = LatticeAut::new(int_matrix(v, "v")?)?;
        groups.insert("v".into(), ints_json(&component_group(&v.compose(d.sigma()).mat)?));
    }

    let r_table: Vec<Value> = ld
        .phi_mu_neg
        .iter()
        .map(|&i| json!({"root": d.root(i), "r": rat_json(&ld.r_alpha[i])}))
        .collect();

    let mut dl = json!({"unsupported": "matrix-level work needs a split GL_n datum"});
    let mut m_wsigma = Value::Null;
    if let Ok(ctx1) = DlContext::new(&sd, &ld, 1) {
        let (value, mw) = point_counts(&sd, &ld, &ctx1, opts, &mut ledger)?;
        dl = value;
        m_wsigma = mw;
    }

    let fan = if spec.kind == "gl" && d.rank() <= DOSSIER_FAN_RANK {
        fan_summary(&ld, d.rank(), &mut ledger)?
    } else {
        Value::Null
    };

    let ledger_json: serde_json::Map<String, Value> =
        ledger.0.iter().map(|(k, v)| (k.clone(), json!(if *v { "pass" } else { "fail" }))).collect();

    let doc = json!({
        "input": {
            "type": spec.kind,
            "rank": d.rank(),
            "roots": d.roots(),
            "coroots": d.coroots(),
            "simple_roots": d.simple_roots(),
            "sigma": matrix_json(&d.sigma().mat),
            "q": sd.q.q,
            "p": sd.q.p,
            "mu": sd.mu,
            "v": spec.v,
            "seed": opts.seed,
            "budget": opts.budget.to_string(),
            "count_max_m": opts.count_max_m,
        },
        "w": {
            "permutation": sd.w.aut.as_permutation(),
            "word": sd.w.word,
            "matrix": matrix_json(&sd.w.aut.mat),
        },
        "b": format!("w·μ(ϖ) with w = {:?}, μ = {:?}", sd.w.aut.as_permutation().unwrap_or_default(), sd.mu),
        "lambda": rats_json(&ld.lambda),
        "N": ld.n,
        "e": int_json(&ld.e),
        "e_lambda": ints_json(&ld.e_lambda()),
        "r_alpha": r_table,
        "roots": {
            "M": roots_json(d, &ld.phi_m),
            "N": roots_json(d, &ld.phi_n),
            "mu_neg": roots_json(d, &ld.phi_mu_neg),
            "mu_pos": roots_json(d, &ld.phi_mu_pos),
        },
        "dim_r": ld.dim_r,
        "facet": {
            "zero_roots": roots_json(d, &facet.zero_roots),
            "sample_point": rats_json(&facet.sample_interior_point.coords),
            "minimal": minimal,
        },
        "weil": weil,
        "component_group": Value::Object(groups),
        "M_wsigma": m_wsigma,
        "Y_w": dl,
        "fan": fan,
        "ledger": Value::Object(ledger_json),
    });
    Ok(Dossier { doc, ledger: ledger.0 })
}

enum Method {
    Exhaustive,
    Fibers,
}

fn choose_method(ctx: &DlContext, budget: u128) -> Result<Method> {
    let size = ctx.field.size() as u128;
    if gl_order(ctx.n, size as u64) <= budget {
        return Ok(Method::Exhaustive);
    }
    let cost = size.checked_pow((ctx.k_roots.len() + ctx.n) as u32);
    match cost {
        Some(c) if c <= budget => Ok(Method::Fibers),
        _ => Err(Error::size(
            format!("Y(w) count at level {}", ctx.field.m()),
            format!("{size}^{}", ctx.k_roots.len() + ctx.n),
            budget,
        )),
    }
}

fn point_counts(
    sd: &ShimuraDatum,
    ld: &LambdaData,
    ctx1: &DlContext,
    opts: &DossierOptions,
    ledger: &mut Ledger,
) -> Result<(Value, Value)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let explicit = opts.count_max_m.is_some();
    let max_m = opts.count_max_m.unwrap_or(ld.n as u32);

    let (nilpotent, bijective) = check_phi_w(ctx1)?;
    ledger.push("phi-w-nilpotent[m=1]", nilpotent);
    ledger.push("phi-w-artin-schreier[m=1]", bijective);

    let mut levels = Vec::new();
    for m in 1..=max_m {
        let ctx = DlContext::new(sd, ld, m)?;
        let method = match choose_method(&ctx, opts.budget) {
            Ok(x) => x,
            Err(e) if explicit => return Err(e),
            Err(_) => {
                levels.push(json!({"m": m, "skipped": "budget"}));
                continue;
            }
        };
        let (en, name) = match method {
            Method::Exhaustive => (enumerate_yw(&ctx, opts.budget)?, "exhaustive"),
            Method::Fibers => (enumerate_yw_by_fibers(&ctx, opts.budget)?, "fibers"),
        };
        ledger.push(format!("lang-torsor[m={m}]"), en.all_fibers_are_torsors());
        if m == 1 {
            let expected = if ctx.in_k(&ctx.w_inv) { en.group_order } else { 0 };
            ledger.push("rational-shortcut[m=1]", en.points.len() as u128 == expected);
        }
        let fiber_sizes: BTreeSet<usize> = en.fibers.values().copied().collect();
        let mut level = json!({
            "m": m,
            "method": name,
            "points": en.points.len(),
            "fibers": en.fibers.len(),
            "fiber_sizes": fiber_sizes,
            "group_order": en.group_order.to_string(),
        });
        if !en.points.is_empty() {
            let rational = rational_group(&ctx, opts.budget.min(1 << 20)).ok();
            let checked = action_checks(&ctx, &en, rational.as_deref(), opts.budget, &mut rng, ledger, m)?;
            level["action_checks"] = json!(checked);
        }
        levels.push(level);
    }

    // M^{wσ} lives over F_{q^N}
    let mw = DlContext::new(sd, ld, ld.n as u32)
        .ok()
        .and_then(|c| m_wsigma_points(&c, opts.budget).ok())
        .map_or(json!({"skipped": "budget"}), |p| json!({"order": p.order, "level": ld.n}));
    Ok((json!(levels), mw))
}

/// Freeness of the `G^σ`-action and commutation with `M^{wσ}` and inertia on
/// a seeded sample of points.
fn action_checks(
    ctx: &DlContext,
    en: &YwEnumeration,
    rational: Option<&[FqMatrix]>,
    budget: u128,
    rng: &mut ChaCha8Rng,
    ledger: &mut Ledger,
    m: u32,
) -> Result<Vec<&'static str>> {
    let mut done = Vec::new();
    let sample: Vec<&FqMatrix> =
        en.points.choose_multiple(rng, ACTION_SAMPLE.min(en.points.len())).collect();
    let canonical = sample.iter().all(|g| {
        ctx.canonicalize(g).map(|p| &p.rep == *g).unwrap_or(false)
    });
    ledger.push(format!("canonical-fixed[m={m}]"), canonical);
    done.push("canonical");

    let id = ctx.identity();
    if let Some(grp) = rational {
        let mut free = true;
        for g in &sample {
            let pt = YwPoint { rep: (*g).clone(), level: m };
            for g0 in grp {
                if matrix::is_identity(&ctx.field, g0) {
                    continue;
                }
                let moved = ctx.act(&pt, g0, &id, 0)?;
                free &= moved.rep != **g && ctx.is_canonical(&moved.rep);
            }
        }
        ledger.push(format!("g-sigma-free[m={m}]"), free);
        done.push("free");
    }

    let mw = m_wsigma_points(ctx, budget.min(1 << 20)).ok();
    let has_zeta = ctx.inertia_element(1).is_ok();
    if let (Some(mw), Some(grp), true) = (mw, rational, has_zeta) {
        let mut commute = true;
        let mut zeta_central = true;
        let z = ctx.inertia_element(1)?;
        for g in &sample {
            let pt = YwPoint { rep: (*g).clone(), level: m };
            let g0 = grp.choose(rng).expect("nonempty group");
            let mm = mw.elements.choose(rng).expect("nonempty group");
            let tau = 1;
            let both = ctx.act(&pt, g0, mm, tau)?;
            let left_first = ctx.act(&ctx.act(&pt, g0, &id, 0)?, &id, mm, tau)?;
            let right_first = ctx.act(&ctx.act(&pt, &id, mm, tau)?, g0, &id, 0)?;
            commute &= both == left_first && both == right_first;
            zeta_central &= ctx.mul(&z, mm) == ctx.mul(mm, &z);
        }
        ledger.push(format!("actions-commute[m={m}]"), commute);
        ledger.push(format!("inertia-commutes-with-M[m={m}]"), zeta_central);
        done.push("commute");
    }
    Ok(done)
}

fn fan_summary(ld: &LambdaData, n: usize, ledger: &mut Ledger) -> Result<Value> {
    let fan = kgl_fan(n)?;
    let stable = is_weyl_stable(&fan);
    let dd = fan.cones.iter().all(|c| double_description_ok(c, n));
    let faces = intersections_are_faces(&fan);
    ledger.push("fan-weyl-stable", stable);
    ledger.push("fan-double-description", dd);
    ledger.push("fan-intersections-are-faces", faces);
    let el: Vec<Rat> = ld.e_lambda().into_iter().map(Rat::from_integer).collect();
    let loc = locate(&fan, &el)?;
    Ok(json!({
        "n": n,
        "maximal_cones": fan.cones.len(),
        "weyl_stable": stable,
        "double_description": dd,
        "e_lambda_cone": loc.label,
        "e_lambda_maximal": loc.maximal,
    }))
}

pub fn pretty_report(d: &Dossier) -> String {
    let doc = &d.doc;
    let mut s = String::new();
    let show = |v: &Value| -> String {
        match v {
            Value::String(x) => x.clone(),
            other => other.to_string(),
        }
    };
    let _ = writeln!(s, "group    rank {}  q = {}  mu = {}", doc["input"]["rank"], doc["input"]["q"], doc["input"]["mu"]);
    let _ = writeln!(s, "w        {}", show(&doc["w"]["permutation"]));
    let _ = writeln!(s, "b        {}", show(&doc["b"]));
    let _ = writeln!(s, "lambda   {}", show(&doc["lambda"]));
    let _ = writeln!(s, "N = {}  e = {}  e·lambda = {}", doc["N"], doc["e"], doc["e_lambda"]);
    let _ = writeln!(s, "dim r    {}", doc["dim_r"]);
    let _ = writeln!(s, "facet    minimal = {}", doc["facet"]["minimal"]);
    let _ = writeln!(s, "weil     {}", doc["weil"]);
    let _ = writeln!(s, "pi_0     {}", doc["component_group"]);
    let _ = writeln!(s, "M^wσ     {}", doc["M_wsigma"]);
    if let Some(levels) = doc["Y_w"].as_array() {
        for l in levels {
            if l.get("skipped").is_some() {
                let _ = writeln!(s, "Y(w)     m = {}: skipped ({})", l["m"], show(&l["skipped"]));
            } else {
                let _ = writeln!(
                    s,
                    "Y(w)     m = {}: {} points in {} fibers, sizes {} ({})",
                    l["m"],
                    l["points"],
                    l["fibers"],
                    l["fiber_sizes"],
                    show(&l["method"])
                );
            }
        }
    } else {
        let _ = writeln!(s, "Y(w)     {}", doc["Y_w"]);
    }
    if !doc["fan"].is_null() {
        let _ = writeln!(
            s,
            "fan      {} cones, e·lambda in {}",
            doc["fan"]["maximal_cones"],
            show(&doc["fan"]["e_lambda_cone"])
        );
    }
    let _ = writeln!(s, "ledger");
    for (k, ok) in &d.ledger {
        let _ = writeln!(s, "  {:<36} {}", k, if *ok { "pass" } else { "FAIL" });
    }
    s
}

/// A batch of level vectors for the specializer.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub p: u32,
    #[serde(default = "one")]
    pub f: u32,
    /// Degree of the coefficient field over `F_q`; defaults to the largest `n`.
    pub m: Option<u32>,
    #[serde(default)]
    pub vector: Vec<VectorRecord>,
    pub random: Option<RandomBatch>,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorRecord {
    pub name: Option<String>,
    pub t: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomBatch {
    pub n: usize,
    pub count: usize,
}

impl VectorFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn ring(&self) -> Result<PuiseuxRing> {
        let n_max = self
            .vector
            .iter()
            .map(|v| v.t.len())
            .chain(self.random.iter().map(|r| r.n))
            .max()
            .unwrap_or(1);
        let m = self.m.unwrap_or(n_max as u32).max(1);
        Ok(PuiseuxRing::new(GaloisField::new(self.p, self.f, m)?))
    }
}

#[derive(Clone, Debug)]
pub struct SpecializeBatch {
    pub records: Vec<Value>,
    pub agreements: usize,
    pub failures: usize,
}

impl SpecializeBatch {
    pub fn all_agree(&self) -> bool {
        self.failures == 0
    }
}

fn specialize_record(ring: &PuiseuxRing, name: String, t: Result<LevelVector>) -> (Value, bool) {
    let rep = t.and_then(|t| specialize(ring, &t));
    match rep {
        Ok(rep) => {
            let residues: Vec<Vec<String>> = rep
                .breaks
                .residues
                .iter()
                .map(|r| r.iter().map(|&x| ring.field.fmt_elem(x)).collect())
                .collect();
            let ok = rep.agrees();
            (
                json!({
                    "name": name,
                    "stratum": rep.breaks.lengths,
                    "breaks": rep.breaks.breaks,
                    "valuations": rats_json(&rep.normalized.t.valuations()),
                    "residues": residues,
                    "agreement": ok,
                }),
                ok,
            )
        }
        Err(e) => (json!({"name": name, "error": e.to_string()}), false),
    }
}

/// Specializes every listed vector, then the seeded random batch.
pub fn specialize_batch(file: &VectorFile, seed: u64) -> Result<SpecializeBatch> {
    let ring = file.ring()?;
    let mut out = SpecializeBatch {
        records: Vec::new(),
        agreements: 0,
        failures: 0,
    };
    let mut push = |(v, ok): (Value, bool)| {
        out.records.push(v);
        if ok {
            out.agreements += 1;
        } else {
            out.failures += 1;
        }
    };
    for (i, rec) in file.vector.iter().enumerate() {
        let name = rec.name.clone().unwrap_or_else(|| format!("vector-{}", i + 1));
        let t = rec
            .t
            .iter()
            .map(|s| ring.parse(s))
            .collect::<Result<Vec<_>>>()
            .and_then(LevelVector::new);
        push(specialize_record(&ring, name, t));
    }
    if let Some(batch) = &file.random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..batch.count {
            let t = random_level_vector(&ring, batch.n, &mut rng);
            push(specialize_record(&ring, format!("random-{}", i + 1), t));
        }
    }
    Ok(out)
}

/// Canonical representatives of `Y(w)(F_{q^m})`, one formatted matrix per line.
pub fn export_points(spec: &GroupSpec, m: u32, budget: u128) -> Result<Vec<String>> {
    let sd = spec.shimura_datum()?;
    let ld = compute_lambda(&sd)?;
    let ctx = DlContext::new(&sd, &ld, m)?;
    let en = match choose_method(&ctx, budget)? {
        Method::Exhaustive => {
            let mut e = enumerate_yw(&ctx, budget)?;
            e.points.sort();
            e
        }
        Method::Fibers => enumerate_yw_by_fibers(&ctx, budget)?,
    };
    Ok(en.points.iter().map(|g| ctx.format_matrix(g)).collect())
}

impl SpecializeBatch {
    pub fn to_json(&self) -> String {
        let doc = json!({
            "records": self.records,
            "agreements": self.agreements,
            "failures": self.failures,
        });
        serde_json::to_string_pretty(&doc).expect("batch serializes")
    }
}

/// The fan document for `KGL_n` with its check flags.
pub fn fan_document(n: usize) -> Result<String> {
    let fan = kgl_fan(n)?;
    let mut doc = crate::fan::export(&fan);
    doc["positive_cones"] = json!(crate::fan::positive_part(n)?.cones.len());
    doc["weyl_stable"] = json!(is_weyl_stable(&fan));
    doc["double_description"] = json!(fan.cones.iter().all(|c| double_description_ok(c, n)));
    Ok(serde_json::to_string_pretty(&doc).expect("fan serializes"))
}
