//! Manifold definition documents.
//!
//! Line-oriented, `#` starts a comment:
//!
//! ```text
//! dim = 3
//! coords = x y z
//! domain z > 0
//! g[1][1] = 1/z^2
//! g[2][2] = 1/z^2
//! g[3][3] = 1/z^2
//! V[3] = 1
//! lambda = 1 - 1/z
//! f = -1/z
//! ```
//!
//! Optional keys: `lambda`, `f`, `a`, `psi[i]`, and `box <coord> <lo> <hi>`
//! giving the sampling interval of a coordinate.

use std::collections::HashSet;
use std::sync::Arc;

use super::ast::{Constant, Func, ScalarExpr};
use super::parser::parse_expr;
use crate::error::{Error, ManifoldError};
use crate::jet::{Point, MAX_DIM};

/// Sampling interval used for coordinates without a `box` line.
pub const DEFAULT_INTERVAL: (f64, f64) = (0.5, 1.5);

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    coords: Arc<[String]>,
    constraints: Vec<ScalarExpr>,
}

impl Chart {
    pub fn new(coords: &[&str]) -> Result<Self, ManifoldError> {
        let names: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        validate_coords(&names)?;
        Ok(Self { coords: names.into(), constraints: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &Arc<[String]> {
        &self.coords
    }

    pub fn constraints(&self) -> &[ScalarExpr] {
        &self.constraints
    }

    /// Adds a strict `expr > 0` constraint.
    pub fn add_constraint(&mut self, text: &str) -> Result<(), Error> {
        let e = parse_expr(text, &self.coords)?;
        self.constraints.push(e);
        Ok(())
    }

    pub fn parse(&self, text: &str) -> Result<ScalarExpr, Error> {
        Ok(parse_expr(text, &self.coords)?)
    }

    pub fn check_point(&self, point: &Point) -> Result<(), Error> {
        if point.dim() != self.dim() {
            return Err(crate::error::EvalError::PointDimension {
                expected: self.dim(),
                got: point.dim(),
            }
            .into());
        }
        for c in &self.constraints {
            let v = c.eval(point.coords())?;
            if !(v > 0.0) {
                return Err(Error::OutsideDomain {
                    point: point.coords().to_vec(),
                    constraint: c.to_string(),
                });
            }
        }
        Ok(())
    }
}

fn validate_coords(names: &[String]) -> Result<(), ManifoldError> {
    let n = names.len();
    if !(2..=MAX_DIM).contains(&n) {
        return Err(ManifoldError::Chart(format!("dimension must be in 2..={MAX_DIM}, got {n}")));
    }
    let mut seen = HashSet::new();
    for name in names {
        let mut chars = name.chars();
        let ident = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
            && chars.all(|c| c.is_alphanumeric() || c == '_');
        if !ident {
            return Err(ManifoldError::Chart(format!("invalid coordinate name '{name}'")));
        }
        if Func::from_name(name).is_some() || Constant::from_name(name).is_some() {
            return Err(ManifoldError::Chart(format!("coordinate name '{name}' is reserved")));
        }
        if !seen.insert(name.as_str()) {
            return Err(ManifoldError::Chart(format!("duplicate coordinate name '{name}'")));
        }
    }
    Ok(())
}

/// Declared torse-forming data: ∇V = a·I + ψ⊗V.
#[derive(Debug, Clone, PartialEq)]
pub struct TorseData {
    pub a: ScalarExpr,
    pub psi: Vec<ScalarExpr>,
}

/// A complete problem instance: chart, metric, potential field and optional soliton data.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    chart: Chart,
    // upper triangle, row major
    metric: Vec<ScalarExpr>,
    vector: Vec<ScalarExpr>,
    lambda: Option<ScalarExpr>,
    potential: Option<ScalarExpr>,
    torse: Option<TorseData>,
    sampling_box: Vec<(f64, f64)>,
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl ManifoldSpec {
    /// Builds a spec from a full list of metric components `g[i][j]`, `i <= j`, row major.
    pub fn new(chart: Chart, metric: Vec<ScalarExpr>, vector: Vec<ScalarExpr>) -> Result<Self, Error> {
        let n = chart.dim();
        if metric.len() != n * (n + 1) / 2 || vector.len() != n {
            return Err(ManifoldError::Chart("component count does not match dimension".into()).into());
        }
        Ok(Self {
            chart,
            metric,
            vector,
            lambda: None,
            potential: None,
            torse: None,
            sampling_box: vec![DEFAULT_INTERVAL; n],
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn metric(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.metric[upper_index(self.dim(), i, j)]
    }

    pub fn vector(&self) -> &[ScalarExpr] {
        &self.vector
    }

    pub fn lambda(&self) -> Option<&ScalarExpr> {
        self.lambda.as_ref()
    }

    pub fn potential(&self) -> Option<&ScalarExpr> {
        self.potential.as_ref()
    }

    pub fn torse(&self) -> Option<&TorseData> {
        self.torse.as_ref()
    }

    pub fn sampling_box(&self) -> &[(f64, f64)] {
        &self.sampling_box
    }

    pub fn with_lambda(mut self, lambda: Option<ScalarExpr>) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_potential(mut self, f: Option<ScalarExpr>) -> Self {
        self.potential = f;
        self
    }

    pub fn with_vector(mut self, vector: Vec<ScalarExpr>) -> Self {
        assert_eq!(vector.len(), self.dim());
        self.vector = vector;
        self
    }

    pub fn with_torse(mut self, torse: Option<TorseData>) -> Self {
        self.torse = torse;
        self
    }

    pub fn with_sampling_box(mut self, sampling_box: Vec<(f64, f64)>) -> Self {
        assert_eq!(sampling_box.len(), self.dim());
        self.sampling_box = sampling_box;
        self
    }
}

fn line_err(line: usize, message: impl Into<String>) -> ManifoldError {
    ManifoldError::Line { line, message: message.into() }
}

/// Parses `g[2][3]`, `V[1]` style keys: returns the 1-based indices.
fn indices(key: &str, prefix: &str, count: usize, line: usize) -> Result<Option<Vec<usize>>, ManifoldError> {
    let Some(mut rest) = key.strip_prefix(prefix) else {
        return Ok(None);
    };
    let mut out = Vec::new();
    while let Some(r) = rest.trim_start().strip_prefix('[') {
        let close = r.find(']').ok_or_else(|| line_err(line, format!("unclosed '[' in {key}")))?;
        let idx: usize = r[..close]
            .trim()
            .parse()
            .map_err(|_| line_err(line, format!("bad index in {key}")))?;
        out.push(idx);
        rest = &r[close + 1..];
    }
    if !rest.trim().is_empty() || out.is_empty() {
        return Ok(None);
    }
    if out.len() != count {
        return Err(line_err(line, format!("{key} needs {count} index(es)")));
    }
    Ok(Some(out))
}

struct Entry<'a> {
    line: usize,
    key: String,
    value: &'a str,
}

/// Parse a manifold definition document into a validated spec.
pub fn parse_manifold(document: &str) -> Result<ManifoldSpec, Error> {
    let mut dim: Option<(usize, usize)> = None;
    let mut coords: Option<(Vec<String>, usize)> = None;
    let mut domains: Vec<(usize, &str)> = Vec::new();
    let mut boxes: Vec<(usize, &str)> = Vec::new();
    let mut entries: Vec<Entry> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();

    for (idx, raw) in document.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("domain").filter(|r| r.starts_with(char::is_whitespace)) {
            domains.push((line, rest.trim()));
            continue;
        }
        if let Some(rest) = text.strip_prefix("box").filter(|r| r.starts_with(char::is_whitespace)) {
            boxes.push((line, rest.trim()));
            continue;
        }
        let (key, value) = text
            .split_once('=')
            .ok_or_else(|| line_err(line, format!("expected 'key = value', got '{text}'")))?;
        let key: String = key.chars().filter(|c| !c.is_whitespace()).collect();
        let value = value.trim();
        if !seen.insert(key.clone()) {
            return Err(ManifoldError::Duplicate { line, key }.into());
        }
        match key.as_str() {
            "dim" => {
                let n = value
                    .parse::<usize>()
                    .map_err(|_| line_err(line, format!("dim must be an integer, got '{value}'")))?;
                dim = Some((n, line));
            }
            "coords" => {
                coords = Some((value.split_whitespace().map(str::to_string).collect(), line));
            }
            _ => entries.push(Entry { line, key, value }),
        }
    }

    let (n, dim_line) = dim.ok_or(ManifoldError::Missing("dim"))?;
    let (names, coords_line) = coords.ok_or(ManifoldError::Missing("coords"))?;
    if names.len() != n {
        return Err(line_err(
            coords_line,
            format!("dimension mismatch: dim = {n} (line {dim_line}) but {} coordinates", names.len()),
        )
        .into());
    }
    validate_coords(&names)?;
    let names: Arc<[String]> = names.into();
    let mut chart = Chart { coords: names.clone(), constraints: Vec::new() };

    let parse_at = |line: usize, text: &str| -> Result<ScalarExpr, Error> {
        parse_expr(text, &names).map_err(|source| ManifoldError::Expr { line, source }.into())
    };

    for (line, rest) in domains {
        let Some((lhs, rhs)) = rest.rsplit_once('>') else {
            return Err(line_err(line, "domain constraints are written '<expr> > 0'").into());
        };
        if rhs.trim() != "0" {
            return Err(line_err(line, "domain constraints are written '<expr> > 0'").into());
        }
        chart.constraints.push(parse_at(line, lhs.trim())?);
    }

    let mut sampling_box = vec![DEFAULT_INTERVAL; n];
    let mut boxed = HashSet::new();
    for (line, rest) in boxes {
        let parts: Vec<&str> = rest.split_whitespace().collect();
        let [name, lo, hi] = parts[..] else {
            return Err(line_err(line, "box lines are written 'box <coord> <lo> <hi>'").into());
        };
        let i = names
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| line_err(line, format!("unknown coordinate {name}")))?;
        let parse_num = |s: &str| {
            s.parse::<f64>().map_err(|_| line_err(line, format!("bad number '{s}'")))
        };
        let (lo, hi) = (parse_num(lo)?, parse_num(hi)?);
        if !(lo < hi) {
            return Err(line_err(line, format!("empty interval [{lo}, {hi}]")).into());
        }
        if !boxed.insert(i) {
            return Err(ManifoldError::Duplicate { line, key: format!("box {name}") }.into());
        }
        sampling_box[i] = (lo, hi);
    }

    let mut metric: Vec<Option<ScalarExpr>> = vec![None; n * (n + 1) / 2];
    let mut vector: Vec<Option<ScalarExpr>> = vec![None; n];
    let mut psi: Vec<Option<ScalarExpr>> = vec![None; n];
    let mut lambda = None;
    let mut potential = None;
    let mut a = None;
    let mut any_vector = false;
    let mut any_psi = false;

    let check_range = |line: usize, idx: &[usize]| -> Result<(), ManifoldError> {
        match idx.iter().find(|&&i| i == 0 || i > n) {
            Some(&index) => Err(ManifoldError::IndexRange { line, index, dim: n }),
            None => Ok(()),
        }
    };

    for Entry { line, key, value } in entries {
        let expr = || parse_at(line, value);
        match key.as_str() {
            "lambda" => lambda = Some(expr()?),
            "f" => potential = Some(expr()?),
            "a" => a = Some(expr()?),
            _ => {
                if let Some(ij) = indices(&key, "g", 2, line)? {
                    check_range(line, &ij)?;
                    if ij[0] > ij[1] {
                        return Err(line_err(line, format!("metric entries are written with i <= j, got {key}")).into());
                    }
                    metric[upper_index(n, ij[0] - 1, ij[1] - 1)] = Some(expr()?);
                } else if let Some(i) = indices(&key, "V", 1, line)? {
                    check_range(line, &i)?;
                    vector[i[0] - 1] = Some(expr()?);
                    any_vector = true;
                } else if let Some(i) = indices(&key, "psi", 1, line)? {
                    check_range(line, &i)?;
                    psi[i[0] - 1] = Some(expr()?);
                    any_psi = true;
                } else {
                    return Err(line_err(line, format!("unknown key {key}")).into());
                }
            }
        }
    }

    if !any_vector {
        return Err(ManifoldError::Missing("V").into());
    }
    let zero = || ScalarExpr::constant(0.0, names.clone());
    let mut full_metric = Vec::with_capacity(metric.len());
    for i in 0..n {
        for j in i..n {
            match metric[upper_index(n, i, j)].take() {
                Some(e) => full_metric.push(e),
                None if i == j => return Err(ManifoldError::MissingDiagonal(i + 1).into()),
                None => full_metric.push(zero()),
            }
        }
    }
    let torse = match (a, any_psi) {
        (Some(a), _) => Some(TorseData { a, psi: psi.into_iter().map(|p| p.unwrap_or_else(zero)).collect() }),
        (None, true) => return Err(ManifoldError::Missing("a (required when psi is given)").into()),
        (None, false) => None,
    };
    let vector = vector.into_iter().map(|v| v.unwrap_or_else(zero)).collect();

    Ok(ManifoldSpec {
        chart,
        metric: full_metric,
        vector,
        lambda,
        potential,
        torse,
        sampling_box,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE_1: &str = "\
# hyperbolic half-space
dim = 3
coords = x y z
domain z > 0
g[1][1] = 1/z^2
g[2][2] = 1/z^2
g[3][3] = 1/z^2
V[3] = 1
lambda = 1 - 1/z
f = -1/z
";

    #[test]
    fn upper_index_is_row_major_packing() {
        let n = 4;
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                assert_eq!(upper_index(n, i, j), k);
                assert_eq!(upper_index(n, j, i), k);
                k += 1;
            }
        }
    }

    #[test]
    fn example_one_document() {
        let spec = parse_manifold(EXAMPLE_1).unwrap();
        assert_eq!(spec.dim(), 3);
        assert_eq!(spec.metric(0, 0).to_string(), "1 / z ^ 2");
        assert_eq!(spec.metric(0, 2).to_string(), "0");
        assert_eq!(spec.vector()[2].to_string(), "1");
        assert_eq!(spec.vector()[0].to_string(), "0");
        assert_eq!(spec.lambda().unwrap().to_string(), "1 - 1 / z");
        assert_eq!(spec.potential().unwrap().to_string(), "-1 / z");
        assert_eq!(spec.chart().constraints().len(), 1);
        assert!(spec.chart().check_point(&Point::new(vec![0.0, 0.0, 2.0])).is_ok());
        assert!(matches!(
            spec.chart().check_point(&Point::new(vec![0.0, 0.0, -1.0])),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn euclidean_document() {
        let doc = "dim = 3\ncoords = x y z\ng[1][1] = 1\ng[2][2] = 1\ng[3][3] = 1\nV[1] = x\nV[2] = y\nV[3] = z\n";
        let spec = parse_manifold(doc).unwrap();
        assert!(spec.lambda().is_none());
        assert!(spec.torse().is_none());
        assert_eq!(spec.sampling_box(), &[DEFAULT_INTERVAL; 3]);
    }

    #[test]
    fn missing_diagonal() {
        let doc = EXAMPLE_1.replace("g[1][1] = 1/z^2\n", "");
        let e = parse_manifold(&doc).unwrap_err();
        assert_eq!(e, Error::Manifold(ManifoldError::MissingDiagonal(1)));
        assert!(e.to_string().contains("diagonal metric entry required"));
    }

    #[test]
    fn structural_errors() {
        let no_v = EXAMPLE_1.replace("V[3] = 1\n", "");
        assert_eq!(parse_manifold(&no_v).unwrap_err(), Error::Manifold(ManifoldError::Missing("V")));

        let dup = format!("{EXAMPLE_1}g[1][1] = 2\n");
        assert!(matches!(
            parse_manifold(&dup).unwrap_err(),
            Error::Manifold(ManifoldError::Duplicate { line: 11, .. })
        ));

        let out_of_range = format!("{EXAMPLE_1}V[4] = 1\n");
        assert!(matches!(
            parse_manifold(&out_of_range).unwrap_err(),
            Error::Manifold(ManifoldError::IndexRange { index: 4, dim: 3, .. })
        ));

        let mismatch = EXAMPLE_1.replace("coords = x y z", "coords = x y");
        assert!(parse_manifold(&mismatch).unwrap_err().to_string().contains("dimension mismatch"));

        let no_dim = EXAMPLE_1.replace("dim = 3\n", "");
        assert_eq!(parse_manifold(&no_dim).unwrap_err(), Error::Manifold(ManifoldError::Missing("dim")));

        let lower = format!("{EXAMPLE_1}g[3][1] = 0\n");
        assert!(parse_manifold(&lower).unwrap_err().to_string().contains("i <= j"));

        let psi_only = format!("{EXAMPLE_1}psi[1] = 0\n");
        assert!(matches!(parse_manifold(&psi_only).unwrap_err(), Error::Manifold(ManifoldError::Missing(_))));

        let bad_coord = EXAMPLE_1.replace("coords = x y z", "coords = x y exp");
        assert!(matches!(parse_manifold(&bad_coord).unwrap_err(), Error::Manifold(ManifoldError::Chart(_))));
    }

    #[test]
    fn expression_errors_carry_line_and_column() {
        let doc = EXAMPLE_1.replace("f = -1/z", "f = -1/w");
        match parse_manifold(&doc).unwrap_err() {
            Error::Manifold(ManifoldError::Expr { line, source }) => {
                assert_eq!(line, 10);
                assert_eq!(source.column, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn torse_and_box_lines() {
        let doc = format!("{EXAMPLE_1}a = -1/z\nbox z 0.5 4\nbox x -1 1\n");
        let spec = parse_manifold(&doc).unwrap();
        let t = spec.torse().unwrap();
        assert_eq!(t.a.to_string(), "-1 / z");
        assert!(t.psi.iter().all(|p| p.to_string() == "0"));
        assert_eq!(spec.sampling_box()[2], (0.5, 4.0));
        assert_eq!(spec.sampling_box()[0], (-1.0, 1.0));
        assert_eq!(spec.sampling_box()[1], DEFAULT_INTERVAL);

        let empty = format!("{EXAMPLE_1}box z 4 1\n");
        assert!(parse_manifold(&empty).is_err());
    }
}
