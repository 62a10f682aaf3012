//! Pipeline orchestration and machine-readable reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::flatness::{self, FlatnessError, Verdict, Witness};
use crate::hypersurface::{self, HypersurfaceError};
use crate::parser::{parse_series, ExprError};
use crate::pde::{derive_associated_system, PdeError, PdeSystem};
use crate::scalar::GaussianRational;
use crate::series::{TruncatedSeries, VariableContext};

type Series = TruncatedSeries<GaussianRational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Reality,
    Levi,
    Signature,
    DerivePde,
    Integrability,
    Curvature,
    Pseudospherical,
    CrossCheck,
}

impl Check {
    /// The checks run by `check`.
    pub const FULL: [Check; 6] = [
        Check::Reality,
        Check::Levi,
        Check::Signature,
        Check::Integrability,
        Check::Pseudospherical,
        Check::CrossCheck,
    ];
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "reality" => Check::Reality,
            "levi" => Check::Levi,
            "signature" => Check::Signature,
            "derive-pde" | "derive_pde" => Check::DerivePde,
            "integrability" => Check::Integrability,
            "curvature" => Check::Curvature,
            "pseudospherical" | "pseudosphericality" => Check::Pseudospherical,
            "cross-check" | "cross_check" => Check::CrossCheck,
            other => return Err(format!("unknown check `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    /// `Θ(z, z̄, w̄)` in the grammar of [`crate::parser`].
    Theta(String),
    /// `φ(x, y, v)` of the graph `u = φ`.
    Graph(String),
    /// `F_{k1,k2}` by 1-based index pair.
    System(BTreeMap<(usize, usize), String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMap {
    pub zmap: Vec<String>,
    pub wmap: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub n: usize,
    pub order: u32,
    pub input: Input,
    pub checks: BTreeSet<Check>,
    /// Applied to the hypersurface before any check.
    pub transform: Option<PointMap>,
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coefficient {
    pub re: String,
    pub im: String,
}

impl From<&GaussianRational> for Coefficient {
    fn from(c: &GaussianRational) -> Self {
        Coefficient {
            re: c.re.to_string(),
            im: c.im.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// `[k1, k2, l1, l2]`, 1-based.
    pub component: [usize; 4],
    pub monomial: String,
    pub coefficient: Coefficient,
}

impl From<&Witness<GaussianRational>> for WitnessReport {
    fn from(w: &Witness<GaussianRational>) -> Self {
        let (k1, k2, l1, l2) = w.component;
        WitnessReport {
            component: [k1 + 1, k2 + 1, l1 + 1, l2 + 1],
            monomial: w.rendered.clone(),
            coefficient: (&w.coefficient).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealityFailureReport {
    pub identity: u8,
    pub monomial: String,
    pub coefficient: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrabilityFailureReport {
    /// `[k1, k2, k3]`, 1-based.
    pub indices: [usize; 3],
    pub monomial: String,
    pub coefficient: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub passed: bool,
    pub order: u32,
    pub failures: Vec<IntegrabilityFailureReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub agree: bool,
    pub order: u32,
    pub nonzero: bool,
    pub mismatch: Option<WitnessReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub n: usize,
    pub order_requested: u32,
    pub order_certified: Option<u32>,
    /// `"pass"` or `"fail"`.
    pub reality: Option<String>,
    pub reality_failure: Option<RealityFailureReport>,
    pub levi_nondegenerate: Option<bool>,
    pub signature: Option<[usize; 2]>,
    /// Defining function after a point map.
    pub theta: Option<String>,
    /// `"F[k1,k2]"` to series text.
    pub system: Option<BTreeMap<String, String>>,
    pub integrability: Option<IntegrabilityReport>,
    /// `"vanishes_to_order"` or `"non_vanishing"` for the Hachtroudi tensor of
    /// a user-supplied system.
    pub curvature: Option<String>,
    /// `"vanishes_to_order"` or `"non_vanishing"`.
    pub pseudospherical: Option<String>,
    pub cross_check: Option<CrossCheckReport>,
    pub witness: Option<WitnessReport>,
    pub error: Option<ErrorReport>,
    pub timings_ms: Option<BTreeMap<String, u64>>,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const USAGE_CODES: [&str; 10] = [
    "missing_input",
    "parse_error",
    "eval_error",
    "unsupported_dimension",
    "invalid_order",
    "normalization_error",
    "invalid_graph",
    "invalid_map",
    "invalid_system",
    "invalid_job",
];

impl Report {
    fn new(job: &JobSpec) -> Self {
        Report {
            n: job.n,
            order_requested: job.order,
            order_certified: None,
            reality: None,
            reality_failure: None,
            levi_nondegenerate: None,
            signature: None,
            theta: None,
            system: None,
            integrability: None,
            curvature: None,
            pseudospherical: None,
            cross_check: None,
            witness: None,
            error: None,
            timings_ms: job.timings.then(BTreeMap::new),
        }
    }

    /// Report for a job rejected before it could run.
    pub fn rejected(n: usize, order: u32, code: &str, message: impl ToString) -> Self {
        let mut r = Report::new(&JobSpec {
            n,
            order,
            input: Input::System(BTreeMap::new()),
            checks: BTreeSet::new(),
            transform: None,
            timings: false,
        });
        r.error = Some(ErrorReport {
            code: code.to_string(),
            message: message.to_string(),
        });
        r
    }

    /// 0 when every requested check passed, 1 when one failed, 2 on input or
    /// usage errors.
    pub fn exit_code(&self) -> i32 {
        if let Some(e) = &self.error {
            return if USAGE_CODES.contains(&e.code.as_str()) {
                EXIT_USAGE
            } else {
                EXIT_FAILED
            };
        }
        let failed = self.reality.as_deref() == Some("fail")
            || self.levi_nondegenerate == Some(false)
            || self.integrability.as_ref().is_some_and(|r| !r.passed)
            || self.curvature.as_deref() == Some("non_vanishing")
            || self.pseudospherical.as_deref() == Some("non_vanishing")
            || self.cross_check.as_ref().is_some_and(|c| !c.agree);
        if failed {
            EXIT_FAILED
        } else {
            EXIT_OK
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Human-readable summary, one fact per line.
    pub fn render_text(&self, with_witness: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n: {}", self.n);
        let _ = writeln!(out, "order requested: {}", self.order_requested);
        if let Some(r) = &self.reality {
            let _ = write!(out, "reality: {r}");
            if let Some(f) = &self.reality_failure {
                let _ = write!(
                    out,
                    " (identity {} at {}, coefficient {})",
                    f.identity,
                    f.monomial,
                    coefficient_text(&f.coefficient)
                );
            }
            out.push('\n');
        }
        if let Some(l) = self.levi_nondegenerate {
            let _ = writeln!(
                out,
                "levi: {}",
                if l { "nondegenerate" } else { "degenerate" }
            );
        }
        if let Some([p, q]) = self.signature {
            let _ = writeln!(out, "signature: ({p}, {q})");
        }
        if let Some(t) = &self.theta {
            let _ = writeln!(out, "theta: {t}");
        }
        if let Some(s) = &self.system {
            for (k, v) in s {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        if let Some(i) = &self.integrability {
            let _ = writeln!(
                out,
                "integrability: {} (order {})",
                if i.passed { "pass" } else { "fail" },
                i.order
            );
            for f in &i.failures {
                let [k1, k2, k3] = f.indices;
                let _ = writeln!(
                    out,
                    "  D_{k3} F[{k1},{k2}] - D_{k2} F[{k1},{k3}]: {} at {}",
                    coefficient_text(&f.coefficient),
                    f.monomial
                );
            }
        }
        let order = self
            .order_certified
            .map_or(String::new(), |o| format!(" {o}"));
        if let Some(c) = &self.curvature {
            let _ = writeln!(
                out,
                "curvature: {c}{}",
                if c == "vanishes_to_order" { &order } else { "" }
            );
        }
        if let Some(p) = &self.pseudospherical {
            let _ = writeln!(
                out,
                "pseudospherical: {p}{}",
                if p == "vanishes_to_order" { &order } else { "" }
            );
        }
        if let Some(c) = &self.cross_check {
            let _ = writeln!(
                out,
                "cross-check: {} to order {}",
                if c.agree {
                    "routes agree"
                } else {
                    "routes differ"
                },
                c.order
            );
        }
        if with_witness {
            if let Some(w) = &self.witness {
                let [k1, k2, l1, l2] = w.component;
                let _ = writeln!(
                    out,
                    "witness: component ({k1},{k2},{l1},{l2}), monomial {}, coefficient {}",
                    w.monomial,
                    coefficient_text(&w.coefficient)
                );
            }
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error [{}]: {}", e.code, e.message);
        }
        if let Some(t) = &self.timings_ms {
            for (k, v) in t {
                let _ = writeln!(out, "time {k}: {v} ms");
            }
        }
        out
    }
}

fn coefficient_text(c: &Coefficient) -> String {
    format!("{} + {}*i", c.re, c.im)
}

struct Failure {
    code: &'static str,
    message: String,
}

impl Failure {
    fn new(code: &'static str, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<ExprError> for Failure {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Parse(p) => Failure::new("parse_error", p),
            ExprError::Eval(v) => Failure::new("eval_error", v),
        }
    }
}

impl From<HypersurfaceError> for Failure {
    fn from(e: HypersurfaceError) -> Self {
        use HypersurfaceError::*;
        let code = match &e {
            UnsupportedDimension(_) => "unsupported_dimension",
            Normalization(_) | WrongContext { .. } => "normalization_error",
            Reality { .. } => "reality_error",
            LeviDegenerate => "levi_degenerate",
            NonRealGraph(_) | GraphNotSecondOrder | NoImaginaryUnit => "invalid_graph",
            NonInvertibleMap(_) => "invalid_map",
            Series(_) => "internal_error",
        };
        Failure::new(code, e)
    }
}

impl From<PdeError> for Failure {
    fn from(e: PdeError) -> Self {
        match e {
            PdeError::Hypersurface(h) => h.into(),
            PdeError::RankDeficient => Failure::new("levi_degenerate", e),
            PdeError::UnsupportedDimension(_) => Failure::new("unsupported_dimension", e),
            PdeError::IndexOutOfRange { .. }
            | PdeError::Asymmetric(..)
            | PdeError::WrongContext { .. } => Failure::new("invalid_system", e),
            other => Failure::new("internal_error", other),
        }
    }
}

impl From<FlatnessError> for Failure {
    fn from(e: FlatnessError) -> Self {
        match e {
            FlatnessError::LeviDegenerate => Failure::new("levi_degenerate", e),
            FlatnessError::InsufficientOrder(_) => Failure::new("invalid_order", e),
            FlatnessError::Pde(p) => p.into(),
            FlatnessError::Series(_) => Failure::new("internal_error", e),
        }
    }
}

struct Timer<'a> {
    sink: &'a mut Option<BTreeMap<String, u64>>,
}

impl Timer<'_> {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if let Some(t) = self.sink.as_mut() {
            t.insert(stage.to_string(), start.elapsed().as_millis() as u64);
        }
        out
    }
}

/// Runs the requested checks in dependency order, stopping at the first
/// hard error or failed prerequisite.
pub fn run(job: &JobSpec) -> Report {
    let mut report = Report::new(job);
    let mut timings = report.timings_ms.take();
    let outcome = run_inner(job, &mut report, &mut Timer { sink: &mut timings });
    report.timings_ms = timings;
    if let Err(f) = outcome {
        report.error = Some(ErrorReport {
            code: f.code.to_string(),
            message: f.message,
        });
    }
    report
}

fn run_inner(job: &JobSpec, report: &mut Report, timer: &mut Timer<'_>) -> Result<(), Failure> {
    if job.n < 2 {
        return Err(Failure::new(
            "unsupported_dimension",
            HypersurfaceError::UnsupportedDimension(job.n),
        ));
    }
    let needs_flatness =
        job.checks.contains(&Check::Pseudospherical) || job.checks.contains(&Check::CrossCheck);
    if needs_flatness && job.order < 5 {
        return Err(Failure::new(
            "invalid_order",
            format!(
                "order {} is below 5, the tensor needs fourth-order jets",
                job.order
            ),
        ));
    }
    if job.checks.contains(&Check::Curvature) && job.order < 3 {
        return Err(Failure::new(
            "invalid_order",
            format!("order {} is below 3", job.order),
        ));
    }
    let n = job.n;
    let order = job.order;

    let theta = match &job.input {
        Input::System(entries) => return run_system(job, entries, report, timer),
        Input::Theta(text) => timer.time("parse", || {
            parse_series(text, &VariableContext::theta(n), order)
        })?,
        Input::Graph(text) => {
            let phi: Series = timer.time("parse", || {
                parse_series(text, &VariableContext::graph(n), order)
            })?;
            let model = timer.time("graph", || hypersurface::from_graph(&phi, n, order))?;
            model.theta().clone()
        }
    };
    hypersurface::check_normalization(n, &theta)?;
    let reality = timer.time("reality", || hypersurface::check_reality(n, &theta))?;
    if let Some(f) = &reality.failure {
        report.reality = Some("fail".into());
        report.reality_failure = Some(RealityFailureReport {
            identity: f.identity,
            monomial: f.rendered.clone(),
            coefficient: (&f.coefficient).into(),
        });
        return Ok(());
    }
    if job.checks.contains(&Check::Reality) {
        report.reality = Some("pass".into());
    }
    let mut model = hypersurface::make_model(n, theta, order)?;

    if let Some(map) = &job.transform {
        let hctx = VariableContext::holomorphic(n);
        if map.zmap.len() != n {
            return Err(Failure::new(
                "invalid_map",
                format!("expected {n} coordinate images, found {}", map.zmap.len()),
            ));
        }
        let zmap = map
            .zmap
            .iter()
            .map(|t| parse_series(t, &hctx, order))
            .collect::<Result<Vec<Series>, _>>()?;
        let wmap: Series = parse_series(&map.wmap, &hctx, order)?;
        model = timer.time("transform", || {
            hypersurface::apply_biholomorphism(&model, &zmap, &wmap)
        })?;
        report.theta = Some(model.theta().to_string());
    }

    let wants_levi = [
        Check::Levi,
        Check::Signature,
        Check::DerivePde,
        Check::Integrability,
    ]
    .iter()
    .any(|c| job.checks.contains(c))
        || needs_flatness;
    if wants_levi {
        match timer.time("levi", || model.levi()) {
            Ok(levi) => {
                report.levi_nondegenerate = Some(true);
                if job.checks.contains(&Check::Signature) || job.checks.contains(&Check::Levi) {
                    report.signature = Some([levi.signature.0, levi.signature.1]);
                }
            }
            Err(HypersurfaceError::LeviDegenerate) => {
                report.levi_nondegenerate = Some(false);
                return Ok(());
            }
            Err(e) => return Err(e.into()),
        }
    }

    if job.checks.contains(&Check::DerivePde) || job.checks.contains(&Check::Integrability) {
        let system = timer.time("derive", || derive_associated_system(&model))?;
        if job.checks.contains(&Check::DerivePde) {
            report.system = Some(system_text(&system));
        }
        if job.checks.contains(&Check::Integrability) {
            report.integrability =
                Some(timer.time("integrability", || integrability_report(&system)));
        }
    }

    if job.checks.contains(&Check::Pseudospherical) {
        let tensor = timer.time("main_theorem", || flatness::main_theorem_tensor(&model))?;
        record_verdict(report, flatness::verdict_of(&tensor), false);
    }
    if job.checks.contains(&Check::CrossCheck) {
        let check = timer.time("cross_check", || flatness::cross_check(&model))?;
        let nonzero = check.main_theorem.witness().is_some();
        report.cross_check = Some(CrossCheckReport {
            agree: check.agree(),
            order: check.order,
            nonzero,
            mismatch: check.mismatch.as_ref().map(|m| {
                let (k1, k2, l1, l2) = m.component;
                WitnessReport {
                    component: [k1 + 1, k2 + 1, l1 + 1, l2 + 1],
                    monomial: m.rendered.clone(),
                    coefficient: (&(m.left.clone() - m.right.clone())).into(),
                }
            }),
        });
        if report.pseudospherical.is_none() {
            record_verdict(report, flatness::verdict_of(&check.main_theorem), false);
        }
    }
    Ok(())
}

fn run_system(
    job: &JobSpec,
    entries: &BTreeMap<(usize, usize), String>,
    report: &mut Report,
    timer: &mut Timer<'_>,
) -> Result<(), Failure> {
    let n = job.n;
    let ctx = VariableContext::jet(n);
    let mut parsed = Vec::new();
    for (&(k1, k2), text) in entries {
        if k1 == 0 || k2 == 0 || k1 > n || k2 > n {
            return Err(Failure::new(
                "invalid_system",
                format!("index pair ({k1},{k2}) outside 1..={n}"),
            ));
        }
        let f: Series = parse_series(text, &ctx, job.order)?;
        parsed.push((k1 - 1, k2 - 1, f));
    }
    let system = PdeSystem::from_entries(n, job.order, parsed)?;
    for check in &job.checks {
        match check {
            Check::Integrability => {
                report.integrability =
                    Some(timer.time("integrability", || integrability_report(&system)));
            }
            Check::Curvature => {
                let tensor = timer.time("curvature", || flatness::hachtroudi_tensor(&system));
                record_verdict(report, flatness::verdict_of(&tensor), true);
            }
            Check::DerivePde => report.system = Some(system_text(&system)),
            other => {
                return Err(Failure::new(
                    "invalid_job",
                    format!("check {other:?} needs a hypersurface, not a PDE system"),
                ))
            }
        }
    }
    Ok(())
}

fn record_verdict(report: &mut Report, verdict: Verdict<GaussianRational>, curvature: bool) {
    let status = match &verdict {
        Verdict::VanishesToOrder(d) => {
            report.order_certified = Some(*d);
            "vanishes_to_order"
        }
        Verdict::NonVanishing(w) => {
            report.witness = Some(w.into());
            report.order_certified = Some(w.monomial.degree());
            "non_vanishing"
        }
    };
    if curvature {
        report.curvature = Some(status.into());
    } else {
        report.pseudospherical = Some(status.into());
    }
}

fn integrability_report(system: &PdeSystem<GaussianRational>) -> IntegrabilityReport {
    let r = system.check_complete_integrability();
    IntegrabilityReport {
        passed: r.passed(),
        order: r.order,
        failures: r
            .failures
            .iter()
            .map(|f| IntegrabilityFailureReport {
                indices: [f.indices.0 + 1, f.indices.1 + 1, f.indices.2 + 1],
                monomial: f.rendered.clone(),
                coefficient: (&f.coefficient).into(),
            })
            .collect(),
    }
}

fn system_text(system: &PdeSystem<GaussianRational>) -> BTreeMap<String, String> {
    let n = system.n();
    let mut out = BTreeMap::new();
    for k1 in 0..n {
        for k2 in k1..n {
            out.insert(
                format!("F[{},{}]", k1 + 1, k2 + 1),
                system.get(k1, k2).to_string(),
            );
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct InputFileError {
    pub line: usize,
    pub message: String,
}

/// Settings read from a `key = value` file; absent keys stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputFile {
    pub n: Option<usize>,
    pub order: Option<u32>,
    pub theta: Option<String>,
    pub graph: Option<String>,
    pub system: BTreeMap<(usize, usize), String>,
    pub checks: Option<BTreeSet<Check>>,
    pub zmap: BTreeMap<usize, String>,
    pub wmap: Option<String>,
}

/// Parses `k1,k2` (1-based).
pub fn parse_index_pair(text: &str) -> Option<(usize, usize)> {
    let (a, b) = text.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// Parses `all` or a comma-separated list of check names.
pub fn parse_checks(text: &str) -> Result<BTreeSet<Check>, String> {
    if text.trim() == "all" {
        return Ok(Check::FULL.into_iter().collect());
    }
    text.split(',').map(Check::from_str).collect()
}

impl InputFile {
    pub fn parse(text: &str) -> Result<Self, InputFileError> {
        let mut out = InputFile::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| InputFileError { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            let indexed = |prefix: &str| -> Option<&str> {
                key.strip_prefix(prefix)?
                    .strip_prefix('[')?
                    .strip_suffix(']')
            };
            if let Some(inner) = indexed("f") {
                let pair = parse_index_pair(inner)
                    .ok_or_else(|| err(format!("bad index pair `{inner}`")))?;
                out.system.insert(pair, value);
            } else if let Some(inner) = indexed("zmap") {
                let k = inner
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad index `{inner}`")))?;
                out.zmap.insert(k, value);
            } else {
                match key {
                    "n" => {
                        out.n = Some(value.parse().map_err(|_| err(format!("bad n `{value}`")))?)
                    }
                    "order" => {
                        out.order = Some(
                            value
                                .parse()
                                .map_err(|_| err(format!("bad order `{value}`")))?,
                        )
                    }
                    "theta" => out.theta = Some(value),
                    "graph" => out.graph = Some(value),
                    "checks" => out.checks = Some(parse_checks(&value).map_err(err)?),
                    "wmap" => out.wmap = Some(value),
                    other => return Err(err(format!("unknown key `{other}`"))),
                }
            }
        }
        Ok(out)
    }
}
