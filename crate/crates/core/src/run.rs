//! Batch runs over sampled points and their reports.

use std::fmt::Write as _;
use std::io;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::ser::Serialize;
use serde::Serialize as DeriveSerialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::catalogue::{self, sample_box, Strategy};
use crate::error::{Error, Result};
use crate::expr::{parse_manifold, ManifoldSpec};
use crate::geometry::{checks, LocalGeometry};
use crate::jet::Point;
use crate::soliton::{
    IdentityId, IdentityReport, LambdaReport, Part, PointAnalysis, SolitonInstance, Tolerances, TorseFormingFit,
    Verdict,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status of a run.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Curvature,
    CheckSoliton,
    Lambda,
    ClassifyField,
    Identities,
    ListCatalogue,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::CheckSoliton => "check-soliton",
            Command::Lambda => "lambda",
            Command::ClassifyField => "classify-field",
            Command::Identities => "identities",
            Command::ListCatalogue => "list-catalogue",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// file path or `catalogue:<name>`; unused by `list-catalogue`
    pub source: String,
    pub command: Command,
    pub points: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub tol: Option<f64>,
    /// identity filter for `identities`
    pub only: Option<Vec<IdentityId>>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command, source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            command,
            points: 10,
            seed: 42,
            strategy: Strategy::UniformRandom,
            tol: None,
            only: None,
            format: Format::Json,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=1_000_000).contains(&self.points) {
            return Err(Error::Config(format!("--points must be in [1, 1000000], got {}", self.points)));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t <= 1e-2) {
                return Err(Error::Config(format!("--tol must be in (0, 1e-2], got {t}")));
            }
        }
        if self.only.as_ref().is_some_and(Vec::is_empty) {
            return Err(Error::Config("--only needs at least one identity id".into()));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol.map_or_else(Tolerances::default, Tolerances::with_override)
    }
}

/// Loads `catalogue:<name>` or a manifold file.
pub fn load_source(source: &str) -> Result<ManifoldSpec> {
    if let Some(name) = source.strip_prefix("catalogue:") {
        return Ok(catalogue::get_manifold(name)?.spec);
    }
    let text = std::fs::read_to_string(source).map_err(|e| Error::Config(format!("cannot read '{source}': {e}")))?;
    parse_manifold(&text)
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct ConfigEcho {
    pub source: String,
    pub command: Command,
    pub points: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub tolerance: Option<f64>,
    pub only: Option<Vec<&'static str>>,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct IdentitySummary {
    pub id: &'static str,
    /// max over per-point residuals; absent if no point produced one
    pub max_residual: Option<f64>,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub error: usize,
}

#[derive(Debug, Clone, Default, PartialEq, DeriveSerialize)]
pub struct ClassificationSummary {
    pub classified: usize,
    pub torse_forming: usize,
    pub concircular: usize,
    pub gradient_dual_closed: usize,
    pub solenoidal: usize,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct DeviationSummary {
    pub a: &'static str,
    pub b: &'static str,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct Summary {
    pub points: usize,
    pub point_errors: usize,
    pub failures: usize,
    pub passed: bool,
    pub identities: Vec<IdentitySummary>,
    pub classification: ClassificationSummary,
    pub lambda_deviations: Vec<DeviationSummary>,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct CurvatureDump {
    /// `Γ^k_ij` indexed `[k][i][j]`
    pub christoffel: Vec<Vec<Vec<f64>>>,
    pub ricci: Vec<Vec<f64>>,
    pub scal: f64,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct PointReport {
    pub index: usize,
    pub coords: Vec<f64>,
    pub identities: Vec<IdentityReport>,
    pub classification: Option<TorseFormingFit>,
    pub lambda: Option<LambdaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct CatalogueListing {
    pub name: &'static str,
    pub dim: usize,
    pub doc: &'static str,
}

#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct RunReport {
    pub version: &'static str,
    pub config: ConfigEcho,
    pub summary: Summary,
    pub points: Vec<PointReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalogue: Option<Vec<CatalogueListing>>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.passed {
            exit::OK
        } else {
            exit::CHECK_FAILED
        }
    }

    /// Canonical JSON: fixed key order, floats with 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits(PrettyFormatter::new()));
        self.serialize(&mut ser).expect("report serializes");
        buf.push(b'\n');
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    /// Line-oriented projection of the JSON report.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        let _ = writeln!(s, "einsol {} {} {}", self.version, c.command.as_str(), c.source);
        if let Some(list) = &self.catalogue {
            for e in list {
                let _ = writeln!(s, "{}  (n = {})  {}", e.name, e.dim, e.doc);
            }
            return s;
        }
        for p in &self.points {
            let _ = writeln!(s, "point {} {}", p.index, fmt_list(&p.coords));
            if let Some(e) = &p.error {
                let _ = writeln!(s, "  error: {e}");
            }
            if let Some(cd) = &p.curvature {
                let _ = writeln!(s, "  scal = {}", num(cd.scal));
            }
            if let Some(f) = &p.classification {
                let _ = writeln!(
                    s,
                    "  fit a = {} psi = {} residual = {} torse_forming = {} concircular = {} gradient = {} solenoidal = {}",
                    num(f.a),
                    fmt_list(&f.psi),
                    num(f.residual),
                    f.is_torse_forming,
                    f.is_concircular,
                    f.is_gradient_dual_closed,
                    f.is_solenoidal
                );
            }
            if let Some(l) = &p.lambda {
                let _ = write!(s, "  lambda ({}) = {}", l.resolved.as_str(), num(l.value));
                for v in &l.sources {
                    if let Some(x) = v.value {
                        let _ = write!(s, "  {} = {}", v.source, num(x));
                    }
                }
                let _ = writeln!(s);
            }
            for r in &p.identities {
                let res = r.residual.map_or_else(|| "-".to_string(), num);
                let _ = write!(s, "  {:<16} {:<5} residual = {}", r.id, r.verdict.as_str(), res);
                if let Some(n) = &r.note {
                    let _ = write!(s, "  ({n})");
                }
                let _ = writeln!(s);
            }
        }
        let sm = &self.summary;
        let _ = writeln!(s, "summary: {} points, {} point errors, {} failures", sm.points, sm.point_errors, sm.failures);
        for i in &sm.identities {
            let res = i.max_residual.map_or_else(|| "-".to_string(), num);
            let _ = writeln!(
                s,
                "  {:<16} max residual = {}  pass {} fail {} skip {} error {}",
                i.id, res, i.pass, i.fail, i.skip, i.error
            );
        }
        for d in &sm.lambda_deviations {
            let _ = writeln!(s, "  lambda {} vs {}: max deviation = {}", d.a, d.b, num(d.max_deviation));
        }
        let _ = writeln!(s, "result: {}", if sm.passed { "PASS" } else { "FAIL" });
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

/// 17 significant digits, the same rendering in JSON and text.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn fmt_list(xs: &[f64]) -> String {
    format!("[{}]", xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", "))
}

/// Pretty JSON with floats written by [`num`].
struct SigDigits(PrettyFormatter<'static>);

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(num(value).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

fn engine_report(id: &'static str, point: &Point, tolerance: f64, parts: Vec<Part>) -> IdentityReport {
    let residual = parts.iter().fold(0.0_f64, |m, p| m.max(p.residual));
    IdentityReport {
        id,
        point: point.coords().to_vec(),
        verdict: if residual < tolerance { Verdict::Pass } else { Verdict::Fail },
        residual: Some(residual),
        tolerance,
        parts,
        note: None,
    }
}

fn defect_part(label: &str, defect: f64) -> Part {
    Part { label: label.into(), left: vec![defect], right: vec![0.0], residual: defect }
}

/// Internal-consistency checks of the curvature engine at one point.
pub fn engine_checks(geo: &LocalGeometry, tol: Tolerances) -> Vec<IdentityReport> {
    let p = geo.point();
    let mut out = vec![
        engine_report("METRIC_INVERSE", p, tol.identity, vec![defect_part("g g^-1 = I", checks::inverse_defect(geo))]),
        engine_report(
            "METRIC_COMPAT",
            p,
            tol.identity,
            vec![defect_part("nabla g = 0", checks::metric_compatibility_defect(geo))],
        ),
        engine_report(
            "RIEMANN_SYM",
            p,
            tol.identity,
            vec![defect_part("Riemann symmetries and first Bianchi", checks::riemann_symmetry_defect(geo))],
        ),
    ];
    let bianchi = match checks::contracted_bianchi_defect(geo) {
        Ok(d) => vec![defect_part("div Ric = 1/2 d scal", d)],
        Err(e) => vec![Part { label: e.to_string(), left: vec![f64::NAN], right: vec![0.0], residual: f64::INFINITY }],
    };
    out.push(engine_report("BIANCHI_2", p, tol.order3, bianchi));
    out
}

fn curvature_dump(geo: &LocalGeometry) -> CurvatureDump {
    let n = geo.dim();
    CurvatureDump {
        christoffel: (0..n)
            .map(|k| (0..n).map(|i| (0..n).map(|j| geo.conn.gamma(k, i, j)).collect()).collect())
            .collect(),
        ricci: (0..n).map(|i| (0..n).map(|j| geo.ricci.get(&[i, j]).value()).collect()).collect(),
        scal: geo.scal.value(),
    }
}

fn analyse_point(inst: &SolitonInstance, config: &RunConfig, ids: &[IdentityId], index: usize, point: &Point) -> PointReport {
    let tol = config.tolerances();
    let mut report = PointReport {
        index,
        coords: point.coords().to_vec(),
        identities: Vec::new(),
        classification: None,
        lambda: None,
        curvature: None,
        error: None,
    };
    let pa = match PointAnalysis::new(inst, point, tol) {
        Ok(pa) => pa,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    report.classification = pa.classification().ok().cloned();
    report.lambda = pa.lambda_report().ok();
    match config.command {
        Command::Curvature => {
            report.curvature = Some(curvature_dump(pa.geometry()));
            report.identities = engine_checks(pa.geometry(), tol);
        }
        Command::CheckSoliton => report.identities = vec![pa.soliton_report(), pa.lambda_triangle_report()],
        Command::Lambda => report.identities = vec![pa.lambda_triangle_report()],
        Command::ClassifyField => {
            if let Err(e) = pa.classification() {
                report.error = Some(e.to_string());
            }
        }
        Command::Identities => report.identities = pa.identities(ids),
        Command::ListCatalogue => {}
    }
    report
}

fn summarize(points: &[PointReport]) -> Summary {
    let mut identities: Vec<IdentitySummary> = Vec::new();
    let mut classification = ClassificationSummary::default();
    let mut deviations: Vec<DeviationSummary> = Vec::new();
    let mut failures = 0;
    for p in points {
        for r in &p.identities {
            let pos = match identities.iter().position(|s| s.id == r.id) {
                Some(i) => i,
                None => {
                    identities.push(IdentitySummary { id: r.id, max_residual: None, pass: 0, fail: 0, skip: 0, error: 0 });
                    identities.len() - 1
                }
            };
            let s = &mut identities[pos];
            if let Some(res) = r.residual {
                s.max_residual = Some(s.max_residual.map_or(res, |m: f64| m.max(res)));
            }
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => {
                    s.fail += 1;
                    failures += 1;
                }
                Verdict::Skip => s.skip += 1,
                Verdict::Error => s.error += 1,
            }
        }
        if let Some(c) = &p.classification {
            classification.classified += 1;
            classification.torse_forming += usize::from(c.is_torse_forming);
            classification.concircular += usize::from(c.is_concircular);
            classification.gradient_dual_closed += usize::from(c.is_gradient_dual_closed);
            classification.solenoidal += usize::from(c.is_solenoidal);
        }
        if let Some(l) = &p.lambda {
            for d in &l.deviations {
                match deviations.iter_mut().find(|x| x.a == d.a && x.b == d.b) {
                    Some(x) => x.max_deviation = x.max_deviation.max(d.deviation),
                    None => deviations.push(DeviationSummary { a: d.a, b: d.b, max_deviation: d.deviation }),
                }
            }
        }
    }
    let point_errors = points.iter().filter(|p| p.error.is_some()).count();
    Summary {
        points: points.len(),
        point_errors,
        failures,
        passed: failures == 0 && point_errors == 0,
        identities,
        classification,
        lambda_deviations: deviations,
    }
}

/// Runs a command. `Err` means the input could not be used (exit code 2);
/// check outcomes are in the report.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let echo = ConfigEcho {
        source: config.source.clone(),
        command: config.command,
        points: config.points,
        seed: config.seed,
        strategy: config.strategy,
        tolerance: config.tol,
        only: config.only.as_ref().map(|ids| ids.iter().map(|id| id.name()).collect()),
    };
    if config.command == Command::ListCatalogue {
        let listing = catalogue::list()
            .into_iter()
            .map(|name| {
                let e = catalogue::get_manifold(name).expect("listed entries exist");
                CatalogueListing { name: e.name, dim: e.spec.dim(), doc: e.doc }
            })
            .collect();
        return Ok(RunReport {
            version: VERSION,
            config: echo,
            summary: summarize(&[]),
            points: Vec::new(),
            catalogue: Some(listing),
        });
    }
    let spec = load_source(&config.source)?;
    let points = sample_box(spec.sampling_box(), config.points, config.seed, config.strategy)?;
    let inst = SolitonInstance::new(spec);
    let ids: Vec<IdentityId> = config.only.clone().unwrap_or_else(|| IdentityId::ALL.to_vec());
    let reports: Vec<PointReport> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| analyse_point(&inst, config, &ids, i, p))
        .collect();
    Ok(RunReport { version: VERSION, config: echo, summary: summarize(&reports), points: reports, catalogue: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(Command::Lambda, "catalogue:exp_warped");
        assert!(c.validate().is_ok());
        c.tol = Some(0.5);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.tol = Some(1e-2);
        c.points = 0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-6.0), "-6.0000000000000000e0");
        assert_eq!(num(f64::NAN), "null");
        let v: serde_json::Value = serde_json::from_str(&num(1.0 / 3.0)).unwrap();
        assert_eq!(v.as_f64(), Some(1.0 / 3.0));
    }

    #[test]
    fn summary_max_is_exact_max() {
        let mut c = RunConfig::new(Command::CheckSoliton, "catalogue:hyperbolic_halfspace");
        c.points = 7;
        let r = run(&c).unwrap();
        let per_point = r
            .points
            .iter()
            .filter_map(|p| p.identities.iter().find(|i| i.id == "SOLITON").and_then(|i| i.residual))
            .fold(0.0_f64, f64::max);
        assert_eq!(r.summary.identities[0].max_residual, Some(per_point));
        assert_eq!(r.exit_code(), exit::OK);
    }

    #[test]
    fn json_has_fixed_top_level_keys() {
        let mut c = RunConfig::new(Command::Identities, "catalogue:exp_warped");
        c.points = 2;
        let json = run(&c).unwrap().to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v.as_object().unwrap().len(), 4);
        let pos: Vec<usize> = ["version", "config", "summary", "points"]
            .iter()
            .map(|k| json.find(&format!("\n  \"{k}\": ")).unwrap())
            .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let point = &v["points"][0];
        for k in ["coords", "identities", "classification", "lambda"] {
            assert!(point.get(k).is_some(), "{k}");
        }
    }
}
