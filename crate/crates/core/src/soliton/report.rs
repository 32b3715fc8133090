use serde::Serialize;

use crate::geometry::{MetricData, TensorValue};

/// Outcome of one identity at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// a precondition of the identity does not hold at the point
    Skip,
    /// the identity is undefined in this dimension
    Error,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skip => "skip",
            Verdict::Error => "error",
        }
    }

    pub fn is_failure(self) -> bool {
        self == Verdict::Fail
    }
}

/// One compared equation inside an identity: both sides and their relative mismatch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Part {
    pub label: String,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub residual: f64,
}

impl Part {
    /// `|l - r| / max(|l|, |r|, 1)`
    pub fn scalar(label: impl Into<String>, l: f64, r: f64) -> Part {
        Part { label: label.into(), left: vec![l], right: vec![r], residual: rel_scalar(l, r) }
    }

    /// Metric-norm analogue of [`Part::scalar`] for tensors of equal slots.
    pub fn tensor(label: impl Into<String>, md: &MetricData, l: &TensorValue, r: &TensorValue) -> Part {
        Part {
            label: label.into(),
            left: l.components().to_vec(),
            right: r.components().to_vec(),
            residual: rel_tensor(md, l, r),
        }
    }

    /// A truth-valued side of a logical statement; `defect` is how far the
    /// statement is from holding, `residual` is 0.
    pub fn condition(label: impl Into<String>, defect: f64) -> Part {
        Part { label: label.into(), left: vec![defect], right: vec![0.0], residual: 0.0 }
    }
}

pub fn rel_scalar(l: f64, r: f64) -> f64 {
    (l - r).abs() / l.abs().max(r.abs()).max(1.0)
}

pub fn rel_tensor(md: &MetricData, l: &TensorValue, r: &TensorValue) -> f64 {
    l.sub(r).norm(md) / l.norm(md).max(r.norm(md)).max(1.0)
}

/// Result of checking one identity at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: &'static str,
    pub point: Vec<f64>,
    pub verdict: Verdict,
    /// largest part residual; absent for skipped or undefined identities
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub parts: Vec<Part>,
    pub note: Option<String>,
}
