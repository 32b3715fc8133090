use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{gradient_jets, hessian_jets, metric_trace, raise, JetTensor, Slot, TensorValue};
use crate::jet::Jet3;

use super::analysis::PointAnalysis;
use super::report::{IdentityReport, Part, Verdict};

/// Identifiers of the checked identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IdentityId {
    Bochner,
    Eq43,
    HessDiv,
    QGradF,
    Prop2,
    Eq7,
    RxyV,
    Eq5Eq6,
    Eq44,
    Prop4I,
    Prop4II,
    Prop4III,
    Prop4IV,
    RemarkAe,
    LieNorm,
}

impl IdentityId {
    pub const ALL: [IdentityId; 15] = [
        IdentityId::Bochner,
        IdentityId::Eq43,
        IdentityId::HessDiv,
        IdentityId::QGradF,
        IdentityId::Prop2,
        IdentityId::Eq7,
        IdentityId::RxyV,
        IdentityId::Eq5Eq6,
        IdentityId::Eq44,
        IdentityId::Prop4I,
        IdentityId::Prop4II,
        IdentityId::Prop4III,
        IdentityId::Prop4IV,
        IdentityId::RemarkAe,
        IdentityId::LieNorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Bochner => "BOCHNER",
            IdentityId::Eq43 => "EQ43",
            IdentityId::HessDiv => "HESS_DIV",
            IdentityId::QGradF => "Q_GRADF",
            IdentityId::Prop2 => "PROP2",
            IdentityId::Eq7 => "EQ7",
            IdentityId::RxyV => "RXY_V",
            IdentityId::Eq5Eq6 => "EQ5_EQ6",
            IdentityId::Eq44 => "EQ44",
            IdentityId::Prop4I => "PROP4_I",
            IdentityId::Prop4II => "PROP4_II",
            IdentityId::Prop4III => "PROP4_III",
            IdentityId::Prop4IV => "PROP4_IV",
            IdentityId::RemarkAe => "REMARK_AE",
            IdentityId::LieNorm => "LIE_NORM",
        }
    }

    pub fn from_name(name: &str) -> Option<IdentityId> {
        Self::ALL.into_iter().find(|id| id.name().eq_ignore_ascii_case(name))
    }

    /// Whether the identity involves third derivatives of the data.
    pub fn is_order3(self) -> bool {
        matches!(
            self,
            IdentityId::HessDiv
                | IdentityId::QGradF
                | IdentityId::Eq44
                | IdentityId::Prop4I
                | IdentityId::Prop4II
                | IdentityId::Prop4III
                | IdentityId::Prop4IV
        )
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parts plus an optional note; the verdict is derived from the parts.
struct Outcome {
    parts: Vec<Part>,
    note: Option<String>,
    /// overrides the residual-based verdict (logical statements)
    verdict: Option<Verdict>,
}

impl Outcome {
    fn parts(parts: Vec<Part>) -> Self {
        Self { parts, note: None, verdict: None }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

impl PointAnalysis<'_> {
    /// Evaluates one identity. Unmet preconditions become `skip`, a dimension
    /// guard becomes `error`, any other evaluation failure is a `fail`.
    pub fn identity(&self, id: IdentityId) -> IdentityReport {
        let tolerance = if id.is_order3() { self.tol.order3 } else { self.tol.identity };
        let outcome = match id {
            IdentityId::Bochner => self.bochner(),
            IdentityId::Eq43 => self.eq43(),
            IdentityId::HessDiv => self.hess_div(),
            IdentityId::QGradF => self.q_grad_f(),
            IdentityId::Prop2 => self.prop2(),
            IdentityId::Eq7 => self.eq7(),
            IdentityId::RxyV => self.rxy_v(),
            IdentityId::Eq5Eq6 => self.eq5_eq6(),
            IdentityId::Eq44 => self.eq44(),
            IdentityId::Prop4I => self.prop4_i(),
            IdentityId::Prop4II => self.prop4_ii(),
            IdentityId::Prop4III => self.prop4_iii(),
            IdentityId::Prop4IV => self.prop4_iv(),
            IdentityId::RemarkAe => self.remark_ae(),
            IdentityId::LieNorm => self.lie_norm(),
        };
        self.finish(id.name(), tolerance, outcome)
    }

    fn finish(&self, id: &'static str, tolerance: f64, outcome: Result<Outcome>) -> IdentityReport {
        let point = self.point().coords().to_vec();
        let blocked = |verdict, note: String| IdentityReport {
            id,
            point: point.clone(),
            verdict,
            residual: None,
            tolerance,
            parts: Vec::new(),
            note: Some(note),
        };
        match outcome {
            Ok(o) => {
                let residual = o.parts.iter().fold(0.0_f64, |m, p| m.max(p.residual));
                let verdict = o.verdict.unwrap_or(if residual < tolerance { Verdict::Pass } else { Verdict::Fail });
                IdentityReport { id, point, verdict, residual: Some(residual), tolerance, parts: o.parts, note: o.note }
            }
            Err(e @ Error::Precondition(_)) | Err(e @ Error::VanishingField(_)) => blocked(Verdict::Skip, e.to_string()),
            Err(e @ Error::Dimension { .. }) => blocked(Verdict::Error, format!("dimension error: {e}")),
            Err(e) => blocked(Verdict::Fail, e.to_string()),
        }
    }

    /// The soliton equation itself, plus the gradient form and `grad f = V` when `f` is declared.
    pub fn soliton_report(&self) -> IdentityReport {
        let outcome = (|| {
            let (source, lambda) = self.lambda_jet()?;
            let (left, right) = self.soliton_tensors(lambda.value());
            let md = self.md();
            let mut parts = vec![Part::tensor("1/2 Lie_V g + Ric = (scal/2 + lambda) g", md, &left, &right)];
            if let Some(f) = &self.f {
                let hess = hessian_jets(f, &self.geo.conn).value(self.point());
                let hr = self.tensor2(|i, j| hess.get(&[i, j]) + self.ric(i, j));
                parts.push(Part::tensor("Hess f + Ric = (scal/2 + lambda) g", md, &hr, &right));
                let gf = gradient_jets(f, md).value(self.point());
                parts.push(Part::tensor("grad f = V", md, &gf, &self.v.value(self.point())));
            }
            Ok(Outcome::parts(parts).with_note(format!("lambda source: {}", source.as_str())))
        })();
        self.finish("SOLITON", self.tol.identity, outcome)
    }

    /// Pairwise agreement of every applicable λ source.
    pub fn lambda_triangle_report(&self) -> IdentityReport {
        let outcome = self.lambda_report().map(|r| {
            let parts = r
                .deviations
                .iter()
                .map(|d| {
                    let value = |s| r.sources.iter().find(|v| v.source == s).and_then(|v| v.value).unwrap_or(f64::NAN);
                    Part::scalar(format!("{} = {}", d.a, d.b), value(d.a), value(d.b))
                })
                .collect();
            let used: Vec<&str> = r.sources.iter().filter(|v| v.value.is_some()).map(|v| v.source).collect();
            Outcome::parts(parts).with_note(format!("sources: {}", used.join(", ")))
        });
        self.finish("LAMBDA_TRIANGLE", self.tol.identity, outcome)
    }

    pub fn identities(&self, ids: &[IdentityId]) -> Vec<IdentityReport> {
        ids.iter().map(|&id| self.identity(id)).collect()
    }

    fn tensor2(&self, f: impl Fn(usize, usize) -> f64) -> TensorValue {
        TensorValue::from_fn(vec![Slot::Down, Slot::Down], self.dim(), self.point().clone(), |ij| f(ij[0], ij[1]))
    }

    fn tensor3(&self, f: impl Fn(usize, usize, usize) -> f64) -> TensorValue {
        TensorValue::from_fn(vec![Slot::Down; 3], self.dim(), self.point().clone(), |x| f(x[0], x[1], x[2]))
    }

    fn covector(&self, f: impl Fn(usize) -> f64) -> TensorValue {
        TensorValue::from_fn(vec![Slot::Down], self.dim(), self.point().clone(), |i| f(i[0]))
    }

    fn vector(&self, f: impl Fn(usize) -> f64) -> TensorValue {
        TensorValue::from_fn(vec![Slot::Up], self.dim(), self.point().clone(), |i| f(i[0]))
    }

    fn ric(&self, i: usize, j: usize) -> f64 {
        self.geo.ricci.get(&[i, j]).value()
    }

    fn g(&self, i: usize, j: usize) -> f64 {
        self.md().g(i, j)
    }

    fn vi(&self, i: usize) -> f64 {
        self.v.get(&[i]).value()
    }

    fn theta_i(&self, i: usize) -> f64 {
        self.theta.get(&[i]).value()
    }

    /// Relative "T = 0" defect.
    fn zero_defect(&self, t: &TensorValue, scale: f64) -> f64 {
        t.norm(self.md()) / scale.max(1.0)
    }

    fn bochner(&self) -> Result<Outcome> {
        self.require_nonvanishing()?;
        self.require_gradient()?;
        let right = 0.5 * self.laplacian_v_norm_sq() - self.nabla_v_norm_sq() - self.v_of_div_v();
        Ok(Outcome::parts(vec![Part::scalar("Ric(V,V)", self.ric_vv(), right)]))
    }

    fn eq43(&self) -> Result<Outcome> {
        self.require_dim3("EQ43")?;
        self.require_nonvanishing()?;
        let check = self.require_soliton()?;
        let n = self.dim() as f64;
        let vsq = self.v_norm_sq();
        let right =
            -0.5 * self.v_of_v_norm_sq() + vsq * self.div_v() / (n - 2.0) - 2.0 * vsq * check.lambda / (n - 2.0);
        Ok(Outcome::parts(vec![Part::scalar("Ric(V,V)", self.ric_vv(), right)]))
    }

    /// `Hess f`, `grad f`, `Δf` jets: from the declared `f`, else from `θ` for gradient `V`.
    fn potential_jets(&self) -> Result<(JetTensor, JetTensor, Jet3, &'static str)> {
        if let Some(f) = &self.f {
            let hess = hessian_jets(f, &self.geo.conn);
            let lap = metric_trace(&hess, self.md());
            return Ok((hess, gradient_jets(f, self.md()), lap, "declared f"));
        }
        self.require_gradient().map_err(|_| Error::Precondition("no f declared and V not gradient-type".into()))?;
        Ok((self.nabla_theta.clone(), self.v.clone(), self.div_v.clone(), "f with grad f = V"))
    }

    fn hess_div(&self) -> Result<Outcome> {
        let (hess, grad, lap, origin) = self.potential_jets()?;
        let n = self.dim();
        let nh = hess.covariant_derivative(&self.geo.conn).value(self.point());
        let div_h = self.covector(|j| {
            let mut s = 0.0;
            for k in 0..n {
                for i in 0..n {
                    s += self.md().g_inv(k, i) * nh.get(&[k, i, j]);
                }
            }
            s
        });
        let right = self.covector(|j| lap.grad(j) + (0..n).map(|m| self.ric(j, m) * grad.get(&[m]).value()).sum::<f64>());
        let mut parts = vec![Part::tensor("div Hess f = d(lap f) + Ric(grad f)", self.md(), &div_h, &right)];
        let mut note = format!("potential: {origin}");
        let consistent = self.f.is_none()
            || self.soliton_check().ok().and_then(|c| c.grad_f).is_some_and(|r| r < self.tol.identity);
        match self.require_soliton() {
            Ok(_) if consistent => {
                let (_, lambda) = self.lambda_jet()?;
                let dl = self.covector(|j| lambda.grad(j));
                parts.push(Part::tensor("he: div Hess f = d lambda", self.md(), &div_h, &dl));
            }
            Ok(_) => note.push_str("; he part skipped: grad f differs from V"),
            Err(e) => note.push_str(&format!("; he part skipped: {e}")),
        }
        Ok(Outcome::parts(parts).with_note(note))
    }

    fn q_grad_f(&self) -> Result<Outcome> {
        self.require_dim3("Q_GRADF")?;
        let check = self.require_soliton()?;
        let grad = match &self.f {
            Some(f) if check.grad_f.is_some_and(|r| r < self.tol.identity) => gradient_jets(f, self.md()),
            _ => {
                self.require_gradient()?;
                self.v.clone()
            }
        };
        let (_, lambda) = self.lambda_jet()?;
        let n = self.dim();
        let nf = n as f64;
        let q_grad = self.vector(|i| {
            let mut s = 0.0;
            for k in 0..n {
                for j in 0..n {
                    s += self.md().g_inv(i, k) * self.ric(k, j) * grad.get(&[j]).value();
                }
            }
            s
        });
        let dl = raise(&JetTensor::from_fn(vec![Slot::Down], n, |i| lambda.partial(i[0])), self.md()).value(self.point());
        let ds = raise(&JetTensor::from_fn(vec![Slot::Down], n, |i| self.geo.scal.partial(i[0])), self.md())
            .value(self.point());
        let right = self.vector(|i| -(nf - 1.0) * dl.get(&[i]) - (nf - 2.0) / 2.0 * ds.get(&[i]));
        let mut parts = vec![Part::tensor("Q(grad f)", self.md(), &q_grad, &right)];
        let mut out = Outcome::parts(Vec::new());
        if q_grad.norm(self.md()) < self.tol.order3 {
            let kernel = ds.scale(-(nf - 2.0) / (2.0 * (nf - 1.0)));
            parts.push(Part::tensor("kernel: grad lambda", self.md(), &dl, &kernel));
        } else {
            out = out.with_note("kernel clause not applicable: Q(grad f) != 0");
        }
        out.parts = parts;
        Ok(out)
    }

    fn prop2(&self) -> Result<Outcome> {
        self.require_dim3("PROP2")?;
        self.require_nonvanishing()?;
        self.require_gradient()?;
        self.require_solenoidal()?;
        let check = self.require_soliton()?;
        let n = self.dim() as f64;
        let ric_sq = self.geo.ricci_value().norm_sq(self.md());
        let nv_sq = self.nabla_v_norm_sq();
        let l = check.lambda;
        let right = ric_sq - 4.0 * n * l * l / ((n - 2.0) * (n - 2.0));
        let excess = (nv_sq - ric_sq).max(0.0) / ric_sq.max(nv_sq).max(1.0);
        Ok(Outcome::parts(vec![
            Part::scalar("|nabla V|^2", nv_sq, right),
            Part { label: "|Ric|^2 >= |nabla V|^2".into(), left: vec![ric_sq], right: vec![nv_sq], residual: excess },
        ]))
    }

    fn eq7(&self) -> Result<Outcome> {
        self.require_dim3("EQ7")?;
        let (a, psi) = self.torse_jets()?;
        let n = self.dim();
        let nf = n as f64;
        let md = self.md();
        let p = self.point();
        let psi_v = self.psi_of_v(&psi).value();
        let av = a.value();
        let ps = |i: usize| psi[i].value();

        let mut parts = Vec::new();
        let div_right = nf * av + psi_v;
        parts.push(Part::scalar("div V = n a + psi(V)", self.div_v(), div_right));
        let lie = crate::geometry::lie_derivative_jets(md, &self.v).value(p);
        let lie_right = self.tensor2(|i, j| 2.0 * av * self.g(i, j) + ps(i) * self.theta_i(j) + self.theta_i(i) * ps(j));
        parts.push(Part::tensor("Lie_V g = 2a g + psi*theta + theta*psi", md, &lie, &lie_right));
        if let Some(declared) = self.declared_torse_tensor() {
            parts.push(Part::tensor("declared a I + psi*V = nabla V", md, &self.nabla_v_value(), &declared));
        }

        let mut note = None;
        match self.require_soliton() {
            Ok(check) => {
                let c = (psi_v + 2.0 * (av - check.lambda)) / (nf - 2.0);
                let ric = self.geo.ricci_value();
                let right = self.tensor2(|i, j| c * self.g(i, j) - 0.5 * (ps(i) * self.theta_i(j) + self.theta_i(i) * ps(j)));
                parts.push(Part::tensor("Ric", md, &ric, &right));

                let zeta = raise(&JetTensor::new(vec![Slot::Down], n, psi.clone()), md).value(p);
                let q = TensorValue::from_fn(vec![Slot::Up, Slot::Down], n, p.clone(), |ij| {
                    (0..n).map(|k| md.g_inv(ij[0], k) * self.ric(k, ij[1])).sum()
                });
                let q_right = TensorValue::from_fn(vec![Slot::Up, Slot::Down], n, p.clone(), |ij| {
                    let (i, j) = (ij[0], ij[1]);
                    let delta = if i == j { c } else { 0.0 };
                    delta - 0.5 * (ps(j) * self.vi(i) + self.theta_i(j) * zeta.get(&[i]))
                });
                parts.push(Part::tensor("Q", md, &q, &q_right));
                let scal_right = 2.0 / (nf - 2.0) * (psi_v + nf * (av - check.lambda));
                parts.push(Part::scalar("scal", self.geo.scal.value(), scal_right));
            }
            Err(e) => note = Some(format!("Ricci parts skipped: {e}")),
        }
        Ok(Outcome { parts, note, verdict: None })
    }

    fn rxy_v(&self) -> Result<Outcome> {
        let (a, psi) = self.torse_jets()?;
        let n = self.dim();
        let np = self.nabla_psi(&psi);
        // c = da - a ψ
        let c: Vec<f64> = (0..n).map(|i| a.grad(i) - a.value() * psi[i].value()).collect();
        let slots = vec![Slot::Down, Slot::Down, Slot::Up];
        let p = self.point().clone();
        let left = TensorValue::from_fn(slots.clone(), n, p.clone(), |x| {
            let (i, j, l) = (x[0], x[1], x[2]);
            (0..n).map(|k| self.geo.riemann.get(&[l, k, i, j]).value() * self.vi(k)).sum()
        });
        let right = TensorValue::from_fn(slots, n, p, |x| {
            let (i, j, l) = (x[0], x[1], x[2]);
            let d = |u: usize, w: usize| f64::from(u8::from(u == w));
            c[i] * d(l, j) - c[j] * d(l, i)
                + (np.get(&[i, j]).value() - np.get(&[j, i]).value()) * self.vi(l)
        });
        Ok(Outcome::parts(vec![Part::tensor("R(X,Y)V", self.md(), &left, &right)]))
    }

    fn eq5_eq6(&self) -> Result<Outcome> {
        self.require_dim3("EQ5_EQ6")?;
        let (a, psi) = self.torse_jets()?;
        let n = self.dim() as f64;
        let ric_vv = self.ric_vv();
        let psi_v = self.psi_of_v(&psi).value();
        let mut parts = Vec::new();
        let mut notes = Vec::new();
        let codazzi = self.codazzi_defect(&psi);
        if codazzi < self.tol.identity {
            let right = (1.0 - n) * (self.along_v(&a).value() - a.value() * psi_v);
            parts.push(Part::scalar("eq5: Ric(V,V)", ric_vv, right));
        } else {
            notes.push(format!("eq5 skipped: psi not Codazzi (asymmetry {codazzi:e})"));
        }
        match self.require_soliton() {
            Ok(check) => {
                let right = self.v_norm_sq() * (2.0 * (a.value() - check.lambda) - (n - 3.0) * psi_v) / (n - 2.0);
                parts.push(Part::scalar("eq6: Ric(V,V)", ric_vv, right));
            }
            Err(e) => notes.push(format!("eq6 skipped: {e}")),
        }
        if parts.is_empty() {
            return Err(Error::Precondition(notes.join("; ")));
        }
        let out = Outcome::parts(parts);
        Ok(if notes.is_empty() { out } else { out.with_note(notes.join("; ")) })
    }

    fn eq44(&self) -> Result<Outcome> {
        self.require_dim3("EQ44")?;
        let (a, psi) = self.torse_jets()?;
        self.require_soliton()?;
        let (_, lambda) = self.lambda_jet()?;
        let n = self.dim();
        let nf = n as f64;
        let nric = self.geo.nabla_ricci()?.value(self.point());
        let psi_v = self.psi_of_v(&psi);
        let a_minus_l = &a - &lambda;
        let np = self.nabla_psi(&psi);
        let nt = &self.nabla_theta;
        let ps = |i: usize| psi[i].value();
        let right = self.tensor3(|k, i, j| {
            (psi_v.grad(k) + 2.0 * a_minus_l.grad(k)) / (nf - 2.0) * self.g(i, j)
                - 0.5
                    * (ps(i) * nt.get(&[k, j]).value()
                        + ps(j) * nt.get(&[k, i]).value()
                        + self.theta_i(i) * np.get(&[k, j]).value()
                        + self.theta_i(j) * np.get(&[k, i]).value())
        });
        let mut parts = vec![Part::tensor("nabla Ric", self.md(), &nric, &right)];
        let fit = self.classification()?;
        if fit.is_concircular {
            let collapsed = self.tensor3(|k, i, j| 2.0 / (nf - 2.0) * a_minus_l.grad(k) * self.g(i, j));
            parts.push(Part::tensor("concircular: nabla Ric", self.md(), &nric, &collapsed));
        }
        Ok(Outcome::parts(parts))
    }

    /// `λ - a` for the concircular statements, after their preconditions.
    fn prop4_setup(&self, op: &'static str) -> Result<(Jet3, TensorValue)> {
        self.require_dim3(op)?;
        let (a, _) = self.require_concircular()?;
        self.require_soliton()?;
        let (_, lambda) = self.lambda_jet()?;
        let nric = self.geo.nabla_ricci()?.value(self.point());
        Ok((&lambda - &a, nric))
    }

    fn biconditional(&self, lhs: (&str, f64), rhs: (&str, f64), implication: bool, note: Option<&str>) -> Outcome {
        let tol = self.tol.order3;
        let (lt, rt) = (lhs.1 < tol, rhs.1 < tol);
        let ok = if implication { !lt || rt } else { lt == rt };
        let residual = if ok { 0.0 } else { 1.0 };
        let mut parts = vec![Part::condition(lhs.0, lhs.1), Part::condition(rhs.0, rhs.1)];
        parts.push(Part {
            label: if implication { "lhs implies rhs".into() } else { "lhs iff rhs".into() },
            left: vec![f64::from(u8::from(lt))],
            right: vec![f64::from(u8::from(rt))],
            residual,
        });
        let mut text = format!("lhs {lt}, rhs {rt}");
        if let Some(n) = note {
            text.push_str("; ");
            text.push_str(n);
        }
        Outcome { parts, note: Some(text), verdict: Some(if ok { Verdict::Pass } else { Verdict::Fail }) }
    }

    fn d_norm(&self, h: &Jet3) -> f64 {
        self.covector(|i| h.grad(i)).norm(self.md())
    }

    fn prop4_i(&self) -> Result<Outcome> {
        let (d, nric) = self.prop4_setup("PROP4_I")?;
        let ric_norm = self.geo.ricci_value().norm(self.md());
        let lhs = self.zero_defect(&nric, ric_norm);
        let rhs = self.d_norm(&d) / self.d_norm(&self.lambda_jet()?.1).max(1.0);
        Ok(self.biconditional(("nabla Ric = 0", lhs), ("d(lambda - a) = 0", rhs), false, None))
    }

    fn prop4_ii(&self) -> Result<Outcome> {
        let (d, nric) = self.prop4_setup("PROP4_II")?;
        let md = self.md();
        let theta_ric = self.tensor3(|k, i, j| self.theta_i(k) * self.ric(i, j));
        let lhs = nric.sub(&theta_ric).norm(md) / nric.norm(md).max(theta_ric.norm(md)).max(1.0);
        let grad_d = raise(&JetTensor::from_fn(vec![Slot::Down], self.dim(), |i| d.partial(i[0])), md).value(self.point());
        let dv = self.vector(|i| d.value() * self.vi(i));
        let rhs = grad_d.sub(&dv).norm(md) / grad_d.norm(md).max(dv.norm(md)).max(1.0);
        Ok(self.biconditional(("nabla Ric = theta*Ric", lhs), ("grad(lambda - a) = (lambda - a) V", rhs), false, None))
    }

    fn prop4_iii(&self) -> Result<Outcome> {
        let (d, nric) = self.prop4_setup("PROP4_III")?;
        let md = self.md();
        let asym = self.tensor3(|k, i, j| nric.get(&[k, i, j]) - nric.get(&[i, k, j]));
        let lhs = self.zero_defect(&asym, nric.norm(md));
        let swapped = self.tensor3(|k, i, j| d.grad(k) * self.g(i, j) - d.grad(i) * self.g(k, j));
        let rhs = self.zero_defect(&swapped, self.d_norm(&d) * (self.dim() as f64).sqrt());
        Ok(self.biconditional(
            ("(nabla_X Ric)(Y,Z) symmetric in X,Y", lhs),
            ("X(lambda - a) g(Y,Z) = Y(lambda - a) g(X,Z)", rhs),
            false,
            Some("the rhs condition holds only when d(lambda - a) = 0 for n >= 2"),
        ))
    }

    fn prop4_iv(&self) -> Result<Outcome> {
        let (d, nric) = self.prop4_setup("PROP4_IV")?;
        let md = self.md();
        let cyc = self.tensor3(|k, i, j| nric.get(&[k, i, j]) + nric.get(&[i, j, k]) + nric.get(&[j, k, i]));
        let lhs = self.zero_defect(&cyc, nric.norm(md));
        let grad_d = raise(&JetTensor::from_fn(vec![Slot::Down], self.dim(), |i| d.partial(i[0])), md).value(self.point());
        let vd = self.along_v(&d).value();
        let vsq = self.v_norm_sq();
        let target = self.vector(|i| -2.0 * vd * self.vi(i) / vsq);
        let rhs = grad_d.sub(&target).norm(md) / grad_d.norm(md).max(target.norm(md)).max(1.0);
        Ok(self.biconditional(
            ("cyclic sum of nabla Ric = 0", lhs),
            ("grad(lambda - a) = -2 V(lambda - a) V/|V|^2", rhs),
            true,
            None,
        ))
    }

    fn remark_ae(&self) -> Result<Outcome> {
        self.require_dim3("REMARK_AE")?;
        let (a, _) = self.require_concircular()?;
        self.require_soliton()?;
        let mu = self.almost_einstein_mu(&a);
        let ric = self.geo.ricci_value();
        let right = self.geo.metric_value().scale(mu);
        Ok(Outcome::parts(vec![Part::tensor("Ric = mu g", self.md(), &ric, &right)]).with_note(format!("mu = {mu}")))
    }

    pub(crate) fn almost_einstein_mu(&self, a: &Jet3) -> f64 {
        -(self.dim() as f64 - 1.0) * self.along_v(a).value() / self.v_norm_sq()
    }

    fn lie_norm(&self) -> Result<Outcome> {
        self.require_gradient()?;
        let lie = crate::geometry::lie_derivative_jets(self.md(), &self.v).value(self.point());
        let left = lie.norm_sq(self.md());
        Ok(Outcome::parts(vec![Part::scalar("|Lie_V g|^2 = 4 |nabla V|^2", left, 4.0 * self.nabla_v_norm_sq())]))
    }
}
