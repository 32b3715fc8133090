use serde::Serialize;

use crate::error::Result;
use crate::geometry::TensorValue;
use crate::jet::Point;

use super::analysis::{LambdaSource, PointAnalysis, SolitonInstance, Tolerances, TorseFormingFit};
use super::report::rel_scalar;

/// One λ value and where it came from; `value` is absent when the source does not apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaValue {
    pub source: &'static str,
    pub value: Option<f64>,
    pub note: Option<String>,
}

/// Relative disagreement `|x - y| / max(|x|, |y|, 1)` between two λ sources.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaDeviation {
    pub a: &'static str,
    pub b: &'static str,
    pub deviation: f64,
}

/// All λ sources at a point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaReport {
    /// source used for the soliton equation
    pub resolved: LambdaSource,
    pub value: f64,
    pub sources: Vec<LambdaValue>,
    pub deviations: Vec<LambdaDeviation>,
}

/// Outcome of the torse-forming λ formula.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop3Value {
    pub lambda: f64,
    /// present when `a` is a nonzero constant and `ψ = 0`
    pub constant_clause: Option<ConstantClause>,
}

/// Concircular field with constant `a != 0`: `λ = a` and `Ric = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantClause {
    pub lambda_minus_a: f64,
    pub ricci_norm: f64,
}

impl PointAnalysis<'_> {
    pub fn lambda_report(&self) -> Result<LambdaReport> {
        let (resolved, value) = self.lambda_jet()?;
        let entry = |source, r: Result<f64>| match r {
            Ok(v) => LambdaValue { source, value: Some(v), note: None },
            Err(e) => LambdaValue { source, value: None, note: Some(e.to_string()) },
        };
        let mut sources = Vec::new();
        if self.lambda_declared.is_some() {
            sources.push(entry("declared", self.lambda_declared_jet().map(|j| j.value())));
        }
        sources.push(entry("trace", Ok(self.lambda_trace_jet().value())));
        sources.push(entry("theorem1", self.lambda_theorem1_jet().map(|j| j.value())));
        sources.push(entry("prop3", self.lambda_prop3_jet().map(|j| j.value())));
        sources.push(entry("solenoidal", self.lambda_solenoidal_jet().map(|j| j.value())));
        let mut deviations = Vec::new();
        for (i, x) in sources.iter().enumerate() {
            for y in &sources[i + 1..] {
                if let (Some(u), Some(v)) = (x.value, y.value) {
                    deviations.push(LambdaDeviation { a: x.source, b: y.source, deviation: rel_scalar(u, v) });
                }
            }
        }
        Ok(LambdaReport { resolved, value: value.value(), sources, deviations })
    }

    pub fn prop3_value(&self) -> Result<Prop3Value> {
        let lambda = self.lambda_prop3_jet()?.value();
        let (a, _) = self.torse_jets()?;
        let fit = self.classification()?;
        let tc = self.tol.classify;
        let da = (0..self.dim()).fold(0.0_f64, |m, i| m.max(a.grad(i).abs()));
        let constant = fit.is_concircular && da < tc * a.value().abs().max(1.0) && a.value().abs() > tc;
        let constant_clause = constant.then(|| ConstantClause {
            lambda_minus_a: lambda - a.value(),
            ricci_norm: self.geo.ricci_value().norm(self.md()),
        });
        Ok(Prop3Value { lambda, constant_clause })
    }
}

fn analysis<'a>(inst: &'a SolitonInstance, point: &Point) -> Result<PointAnalysis<'a>> {
    PointAnalysis::new(inst, point, Tolerances::default())
}

/// `½£_V g + Ric - (scal/2 + λ)g` with λ resolved per the instance.
pub fn soliton_residual_at(inst: &SolitonInstance, point: &Point) -> Result<TensorValue> {
    let pa = analysis(inst, point)?;
    pa.require_nonvanishing()?;
    Ok(pa.soliton_check()?.residual_tensor)
}

/// λ that makes the trace of the soliton equation hold.
pub fn lambda_candidate_at(inst: &SolitonInstance, point: &Point) -> Result<f64> {
    Ok(analysis(inst, point)?.lambda_trace_jet().value())
}

/// λ expressed through `V` alone, for gradient `V`.
pub fn lambda_theorem1_at(inst: &SolitonInstance, point: &Point) -> Result<f64> {
    Ok(analysis(inst, point)?.lambda_theorem1_jet()?.value())
}

pub fn classify_field_at(inst: &SolitonInstance, point: &Point) -> Result<TorseFormingFit> {
    Ok(analysis(inst, point)?.classification()?.clone())
}

/// λ from the torse-forming data; declared `a`, `ψ` take precedence over the fit.
pub fn prop3_lambda_at(inst: &SolitonInstance, point: &Point) -> Result<Prop3Value> {
    analysis(inst, point)?.prop3_value()
}

/// `μ = -(n-1)V(a)/|V|²` for concircular `V`, and the relative residual of `Ric - μg`.
pub fn almost_einstein_function_at(inst: &SolitonInstance, point: &Point) -> Result<(f64, f64)> {
    let pa = analysis(inst, point)?;
    let (a, _) = pa.require_concircular()?;
    let mu = pa.almost_einstein_mu(&a);
    let ric = pa.geometry().ricci_value();
    let g = pa.geometry().metric_value().scale(mu);
    Ok((mu, super::report::rel_tensor(&pa.geometry().md, &ric, &g)))
}

/// `-(n-2)·scal/(2n)` for solenoidal `V`.
pub fn solenoidal_lambda_at(inst: &SolitonInstance, point: &Point) -> Result<f64> {
    Ok(analysis(inst, point)?.lambda_solenoidal_jet()?.value())
}

/// Checks a single identity with default tolerances.
pub fn identity_residual_at(
    inst: &SolitonInstance,
    point: &Point,
    id: super::IdentityId,
) -> Result<super::IdentityReport> {
    Ok(analysis(inst, point)?.identity(id))
}
