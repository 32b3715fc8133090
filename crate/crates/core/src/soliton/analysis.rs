use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::ManifoldSpec;
use crate::geometry::{
    directional_jet, divergence_jet, hessian_jets, lie_derivative_jets, linalg, lower, metric_trace,
    raise, scalar_jets, vector_field_jets, JetTensor, LocalGeometry, MetricData, Slot, TensorValue,
};
use crate::jet::{jet_sum, Jet3, Point};

use super::report::rel_tensor;

/// Squared metric norm below which `V` counts as vanishing.
pub const VANISHING_NORM_SQ: f64 = 1e-14;

/// Pass thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// identities built from at most second derivatives of the data
    pub identity: f64,
    /// identities that need third derivatives
    pub order3: f64,
    /// classification flags
    pub classify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { identity: 1e-8, order3: 1e-7, classify: 1e-8 }
    }
}

impl Tolerances {
    /// Replaces both identity thresholds; classification thresholds stay fixed.
    pub fn with_override(tol: f64) -> Self {
        Self { identity: tol, order3: tol, ..Self::default() }
    }
}

/// Where the soliton function λ comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaSource {
    Declared,
    Theorem1,
    Trace,
}

impl LambdaSource {
    pub fn as_str(self) -> &'static str {
        match self {
            LambdaSource::Declared => "declared",
            LambdaSource::Theorem1 => "theorem1",
            LambdaSource::Trace => "trace",
        }
    }
}

/// A manifold with its potential field, plus an optional forced λ source.
/// Without one, λ resolves as declared, else theorem-1 (gradient `V`, `n >= 3`),
/// else the trace candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonInstance {
    spec: ManifoldSpec,
    lambda_source: Option<LambdaSource>,
}

impl SolitonInstance {
    pub fn new(spec: ManifoldSpec) -> Self {
        Self { spec, lambda_source: None }
    }

    pub fn with_lambda_source(mut self, source: LambdaSource) -> Self {
        self.lambda_source = Some(source);
        self
    }

    pub fn spec(&self) -> &ManifoldSpec {
        &self.spec
    }

    pub fn lambda_source(&self) -> Option<LambdaSource> {
        self.lambda_source
    }
}

/// Least-squares fit of `∇V = a·I + ψ⊗V` and the classification flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorseFormingFit {
    pub a: f64,
    /// covariant components `ψ_j`
    pub psi: Vec<f64>,
    pub psi_norm: f64,
    /// relative metric-norm mismatch of `∇V - a·I - ψ⊗V`
    pub residual: f64,
    pub is_torse_forming: bool,
    pub is_concircular: bool,
    pub is_gradient_dual_closed: bool,
    pub is_solenoidal: bool,
}

/// Jets of the fitted `a` and `ψ`.
#[derive(Debug, Clone)]
pub(crate) struct FitJets {
    pub a: Jet3,
    pub psi: Vec<Jet3>,
}

/// Soliton-equation check at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonCheck {
    pub source: LambdaSource,
    pub lambda: f64,
    /// `½£_V g + Ric - (scal/2 + λ)g`
    pub residual_tensor: TensorValue,
    pub residual: f64,
    /// `Hess f + Ric - (scal/2 + λ)g`, relative, when `f` is declared
    pub gradient_form: Option<f64>,
    /// relative mismatch of `grad f` and `V`, when `f` is declared
    pub grad_f: Option<f64>,
}

/// Everything the soliton formulas need at one point, as jets.
#[derive(Debug, Clone)]
pub struct PointAnalysis<'a> {
    pub(crate) inst: &'a SolitonInstance,
    pub(crate) tol: Tolerances,
    pub(crate) geo: LocalGeometry,
    /// `V^i`
    pub(crate) v: JetTensor,
    /// `θ_i = g_ij V^j`
    pub(crate) theta: JetTensor,
    /// `∇_k V^i`, slots `[k, i]`
    pub(crate) nabla_v: JetTensor,
    /// `∇_k θ_i`
    pub(crate) nabla_theta: JetTensor,
    pub(crate) v_sq: Jet3,
    pub(crate) div_v: Jet3,
    pub(crate) lambda_declared: Option<Jet3>,
    pub(crate) f: Option<Jet3>,
    pub(crate) torse_declared: Option<(Jet3, Vec<Jet3>)>,
    pub(crate) fit: Option<(FitJets, TorseFormingFit)>,
    pub(crate) dual_closed: bool,
    pub(crate) solenoidal: bool,
}

impl<'a> PointAnalysis<'a> {
    pub fn new(inst: &'a SolitonInstance, point: &Point, tol: Tolerances) -> Result<Self> {
        let spec = inst.spec();
        let geo = LocalGeometry::new(spec, point, 3)?;
        let n = geo.dim();
        let v = vector_field_jets(spec, point, 3)?;
        let theta = lower(&v, &geo.md);
        let nabla_v = v.covariant_derivative(&geo.conn);
        let nabla_theta = theta.covariant_derivative(&geo.conn);
        let v_sq = jet_sum(Jet3::constant(n, 0.0, 3), (0..n).map(|i| v.get(&[i]) * theta.get(&[i])));
        let div_v = divergence_jet(&nabla_v);

        let lambda_declared = spec.lambda().map(|e| scalar_jets(e, point, 3)).transpose()?;
        let f = spec.potential().map(|e| scalar_jets(e, point, 3)).transpose()?;
        let torse_declared = match spec.torse() {
            Some(t) => Some((
                scalar_jets(&t.a, point, 3)?,
                t.psi.iter().map(|p| scalar_jets(p, point, 3)).collect::<Result<Vec<_>>>()?,
            )),
            None => None,
        };

        let mut dtheta_defect: f64 = 0.0;
        let mut dtheta_scale: f64 = 1.0;
        for i in 0..n {
            for j in 0..n {
                let dij = theta.get(&[j]).grad(i);
                dtheta_scale = dtheta_scale.max(dij.abs());
                dtheta_defect = dtheta_defect.max((dij - theta.get(&[i]).grad(j)).abs());
            }
        }
        let tc = tol.classify;
        let dual_closed = dtheta_defect < tc * dtheta_scale;
        let nv_norm = nabla_v.value(point).norm(&geo.md);
        let solenoidal = div_v.value().abs() < tc * nv_norm.max(1.0);

        let mut out = Self {
            inst,
            tol,
            geo,
            v,
            theta,
            nabla_v,
            nabla_theta,
            v_sq,
            div_v,
            lambda_declared,
            f,
            torse_declared,
            fit: None,
            dual_closed,
            solenoidal,
        };
        if !out.vanishing() {
            out.fit = Some(out.fit_torse_forming()?);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.geo.dim()
    }

    pub fn point(&self) -> &Point {
        self.geo.point()
    }

    pub fn geometry(&self) -> &LocalGeometry {
        &self.geo
    }

    pub(crate) fn md(&self) -> &MetricData {
        &self.geo.md
    }

    pub(crate) fn zero(&self) -> Jet3 {
        self.geo.zero()
    }

    pub fn vanishing(&self) -> bool {
        self.v_sq.value() <= VANISHING_NORM_SQ
    }

    pub(crate) fn require_nonvanishing(&self) -> Result<()> {
        if self.vanishing() {
            return Err(Error::VanishingField(self.point().coords().to_vec()));
        }
        Ok(())
    }

    pub(crate) fn require_dim3(&self, op: &'static str) -> Result<()> {
        if self.dim() < 3 {
            return Err(Error::Dimension { op, n: self.dim() });
        }
        Ok(())
    }

    pub(crate) fn require_gradient(&self) -> Result<()> {
        if !self.dual_closed {
            return Err(Error::Precondition("V not gradient-type".into()));
        }
        Ok(())
    }

    pub(crate) fn require_solenoidal(&self) -> Result<()> {
        if !self.solenoidal {
            return Err(Error::Precondition(format!("V not solenoidal (div V = {:e})", self.div_v.value())));
        }
        Ok(())
    }

    pub fn is_gradient(&self) -> bool {
        self.dual_closed
    }

    pub fn is_solenoidal(&self) -> bool {
        self.solenoidal
    }

    /// `(∇V)^i_j` with slots `[Up, Down]`.
    pub fn nabla_v_value(&self) -> TensorValue {
        self.nabla_v.value(self.point()).transpose()
    }

    pub fn v_norm_sq(&self) -> f64 {
        self.v_sq.value()
    }

    pub fn div_v(&self) -> f64 {
        self.div_v.value()
    }

    /// `|∇V|²` as a jet.
    pub(crate) fn nabla_v_norm_sq_jet(&self) -> Jet3 {
        let n = self.dim();
        let md = self.md();
        let mut acc = self.zero();
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        acc = acc
                            + md.g_inv_jet(k, l)
                                * md.g_jet(i, j)
                                * self.nabla_v.get(&[k, i])
                                * self.nabla_v.get(&[l, j]);
                    }
                }
            }
        }
        acc
    }

    pub fn nabla_v_norm_sq(&self) -> f64 {
        self.nabla_v.value(self.point()).norm_sq(self.md())
    }

    /// `Δ(|V|²)` as a jet.
    pub(crate) fn laplacian_v_sq(&self) -> Jet3 {
        metric_trace(&hessian_jets(&self.v_sq, &self.geo.conn), self.md())
    }

    pub fn laplacian_v_norm_sq(&self) -> f64 {
        self.laplacian_v_sq().value()
    }

    pub fn v_of_v_norm_sq(&self) -> f64 {
        directional_jet(&self.v, &self.v_sq).value()
    }

    pub fn v_of_div_v(&self) -> f64 {
        directional_jet(&self.v, &self.div_v).value()
    }

    pub fn ric_vv(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.geo.ricci.get(&[i, j]).value() * self.v.get(&[i]).value() * self.v.get(&[j]).value();
            }
        }
        s
    }

    /// `V(h)` for a jet `h`.
    pub(crate) fn along_v(&self, h: &Jet3) -> Jet3 {
        directional_jet(&self.v, h)
    }

    // ---- torse-forming fit ----

    fn fit_torse_forming(&self) -> Result<(FitJets, TorseFormingFit)> {
        let n = self.dim();
        let point = self.point();
        let vi = |i: usize| self.v.get(&[i]);
        // N^i_j = ∇_j V^i
        let nij = |i: usize, j: usize| self.nabla_v.get(&[j, i]);
        let zero = self.zero();
        let v_euclid = jet_sum(zero.clone(), (0..n).map(|i| vi(i) * vi(i)));

        let m = n + 1;
        let mut ata = vec![vec![zero.clone(); m]; m];
        ata[0][0] = Jet3::constant(n, n as f64, 3);
        for k in 0..n {
            ata[0][k + 1] = vi(k).clone();
            ata[k + 1][0] = vi(k).clone();
            ata[k + 1][k + 1] = v_euclid.clone();
        }
        let mut atb = vec![vec![zero.clone()]; m];
        atb[0][0] = jet_sum(zero.clone(), (0..n).map(|i| nij(i, i).clone()));
        for j in 0..n {
            atb[j + 1][0] = jet_sum(zero.clone(), (0..n).map(|i| vi(i) * nij(i, j)));
        }
        let sol = linalg::solve(ata, atb, "torse-forming normal equations")?;
        let a = sol[0][0].clone();
        let psi: Vec<Jet3> = (1..m).map(|k| sol[k][0].clone()).collect();

        let nv = self.nabla_v_value();
        let fitted = torse_tensor(self.md(), &a, &psi, &self.v);
        let residual = rel_tensor(self.md(), &nv, &fitted);
        let psi_t = TensorValue::new(vec![Slot::Down], n, psi.iter().map(Jet3::value).collect(), point.clone());
        let psi_norm = psi_t.norm(self.md());
        let tc = self.tol.classify;
        let is_torse_forming = residual < tc;
        let summary = TorseFormingFit {
            a: a.value(),
            psi: psi_t.components().to_vec(),
            psi_norm,
            residual,
            is_torse_forming,
            is_concircular: is_torse_forming && psi_norm < tc,
            is_gradient_dual_closed: self.dual_closed,
            is_solenoidal: self.solenoidal,
        };
        Ok((FitJets { a, psi }, summary))
    }

    pub fn classification(&self) -> Result<&TorseFormingFit> {
        self.require_nonvanishing()?;
        Ok(&self.fit.as_ref().expect("fit exists for non-vanishing V").1)
    }

    /// `(a, ψ)` jets for the torse-forming formulas: the declared ones when
    /// present, the fitted ones otherwise. Requires an accepted fit.
    pub(crate) fn torse_jets(&self) -> Result<(Jet3, Vec<Jet3>)> {
        let fit = self.classification()?;
        if !fit.is_torse_forming {
            return Err(Error::Precondition(format!("V not torse-forming (fit residual {:e})", fit.residual)));
        }
        if let Some((a, psi)) = &self.torse_declared {
            return Ok((a.clone(), psi.clone()));
        }
        let jets = &self.fit.as_ref().expect("fit exists").0;
        Ok((jets.a.clone(), jets.psi.clone()))
    }

    pub(crate) fn require_concircular(&self) -> Result<(Jet3, Vec<Jet3>)> {
        let fit = self.classification()?;
        if !fit.is_concircular {
            return Err(Error::Precondition(format!(
                "V not concircular (fit residual {:e}, |psi| = {:e})",
                fit.residual, fit.psi_norm
            )));
        }
        self.torse_jets()
    }

    /// Declared `a·I + ψ⊗V` against `∇V`, when `a` is declared.
    pub(crate) fn declared_torse_tensor(&self) -> Option<TensorValue> {
        self.torse_declared.as_ref().map(|(a, psi)| torse_tensor(self.md(), a, psi, &self.v))
    }

    /// Max relative asymmetry of `∇ψ`.
    pub(crate) fn codazzi_defect(&self, psi: &[Jet3]) -> f64 {
        let n = self.dim();
        let np = self.nabla_psi(psi);
        let mut worst: f64 = 0.0;
        let scale = np.value(self.point()).max_abs().max(1.0);
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((np.get(&[i, j]).value() - np.get(&[j, i]).value()).abs());
            }
        }
        worst / scale
    }

    /// `∇_k ψ_j`, slots `[k, j]`.
    pub(crate) fn nabla_psi(&self, psi: &[Jet3]) -> JetTensor {
        JetTensor::new(vec![Slot::Down], self.dim(), psi.to_vec()).covariant_derivative(&self.geo.conn)
    }

    pub(crate) fn psi_of_v(&self, psi: &[Jet3]) -> Jet3 {
        jet_sum(self.zero(), psi.iter().enumerate().map(|(i, p)| p * self.v.get(&[i])))
    }

    // ---- λ ----

    /// `(div V - (n-2)·scal/2)/n`; `div V / 2` when `n = 2`.
    pub(crate) fn lambda_trace_jet(&self) -> Jet3 {
        let n = self.dim();
        if n == 2 {
            return self.div_v.scale(0.5);
        }
        (&self.div_v - &self.geo.scal.scale((n as f64 - 2.0) / 2.0)).scale(1.0 / n as f64)
    }

    pub(crate) fn lambda_theorem1_jet(&self) -> Result<Jet3> {
        self.require_dim3("theorem-1 lambda")?;
        self.require_nonvanishing()?;
        self.require_gradient()?;
        let n = self.dim() as f64;
        let bracket = self.laplacian_v_sq() - self.nabla_v_norm_sq_jet().scale(2.0) + self.along_v(&self.v_sq)
            - self.along_v(&self.div_v).scale(2.0);
        Ok((bracket / &self.v_sq).scale(-(n - 2.0) / 4.0) + self.div_v.scale(0.5))
    }

    pub(crate) fn lambda_declared_jet(&self) -> Result<Jet3> {
        self.lambda_declared.clone().ok_or_else(|| Error::Precondition("no lambda declared".into()))
    }

    /// λ by the instance's forced source, or by the default resolution order.
    pub(crate) fn lambda_jet(&self) -> Result<(LambdaSource, Jet3)> {
        match self.inst.lambda_source() {
            Some(LambdaSource::Declared) => Ok((LambdaSource::Declared, self.lambda_declared_jet()?)),
            Some(LambdaSource::Theorem1) => Ok((LambdaSource::Theorem1, self.lambda_theorem1_jet()?)),
            Some(LambdaSource::Trace) => Ok((LambdaSource::Trace, self.lambda_trace_jet())),
            None => {
                if let Some(l) = &self.lambda_declared {
                    Ok((LambdaSource::Declared, l.clone()))
                } else if let Ok(l) = self.lambda_theorem1_jet() {
                    Ok((LambdaSource::Theorem1, l))
                } else {
                    Ok((LambdaSource::Trace, self.lambda_trace_jet()))
                }
            }
        }
    }

    /// `λ = a + (n-1)(n-2)V(a)/(2|V|²) - [(n-1)(n-2)a + (n-3)|V|²]ψ(V)/(2|V|²)`.
    pub(crate) fn lambda_prop3_jet(&self) -> Result<Jet3> {
        self.require_dim3("torse-forming lambda formula")?;
        let (a, psi) = self.torse_jets()?;
        let codazzi = self.codazzi_defect(&psi);
        if codazzi >= self.tol.identity {
            return Err(Error::Precondition(format!("psi not Codazzi (asymmetry {codazzi:e})")));
        }
        let n = self.dim() as f64;
        let c = (n - 1.0) * (n - 2.0);
        let two_v_sq = self.v_sq.scale(2.0);
        let psi_v = self.psi_of_v(&psi);
        let va = self.along_v(&a);
        let coeff = a.scale(c) + self.v_sq.scale(n - 3.0);
        Ok(&a + &(va.scale(c) / &two_v_sq) - coeff * psi_v / two_v_sq)
    }

    /// `−(n−2)·scal/(2n)` for solenoidal `V`.
    pub(crate) fn lambda_solenoidal_jet(&self) -> Result<Jet3> {
        self.require_dim3("solenoidal lambda")?;
        self.require_solenoidal()?;
        let n = self.dim() as f64;
        Ok(self.geo.scal.scale(-(n - 2.0) / (2.0 * n)))
    }

    // ---- soliton equation ----

    /// `½£_V g + Ric - (scal/2 + λ)g` for the given λ value.
    pub(crate) fn soliton_tensors(&self, lambda: f64) -> (TensorValue, TensorValue) {
        let p = self.point();
        let lie = lie_derivative_jets(self.md(), &self.v).value(p);
        let ric = self.geo.ricci_value();
        let g = self.geo.metric_value();
        let coeff = self.geo.scal.value() / 2.0 + lambda;
        let n = self.dim();
        let left = TensorValue::from_fn(vec![Slot::Down, Slot::Down], n, p.clone(), |ij| {
            0.5 * lie.get(ij) + ric.get(ij)
        });
        (left, g.scale(coeff))
    }

    pub fn soliton_check(&self) -> Result<SolitonCheck> {
        let (source, lambda) = self.lambda_jet()?;
        let lambda = lambda.value();
        let (left, right) = self.soliton_tensors(lambda);
        let residual_tensor = left.sub(&right);
        let residual = rel_tensor(self.md(), &left, &right);
        let (gradient_form, grad_f) = match &self.f {
            Some(f) => {
                let p = self.point();
                let hess = hessian_jets(f, &self.geo.conn).value(p);
                let ric = self.geo.ricci_value();
                let l = TensorValue::from_fn(vec![Slot::Down, Slot::Down], self.dim(), p.clone(), |ij| {
                    hess.get(ij) + ric.get(ij)
                });
                let gf = raise(&JetTensor::from_fn(vec![Slot::Down], self.dim(), |i| f.partial(i[0])), self.md());
                (
                    Some(rel_tensor(self.md(), &l, &right)),
                    Some(rel_tensor(self.md(), &gf.value(p), &self.v.value(p))),
                )
            }
            None => (None, None),
        };
        Ok(SolitonCheck { source, lambda, residual_tensor, residual, gradient_form, grad_f })
    }

    pub(crate) fn require_soliton(&self) -> Result<SolitonCheck> {
        let check = self.soliton_check()?;
        if check.residual >= self.tol.identity {
            return Err(Error::Precondition(format!(
                "soliton equation does not hold (residual {:e}, lambda {})",
                check.residual,
                check.source.as_str()
            )));
        }
        Ok(check)
    }
}

/// `(a·I + ψ⊗V)^i_j = a δ^i_j + ψ_j V^i`, slots `[Up, Down]`.
fn torse_tensor(md: &MetricData, a: &Jet3, psi: &[Jet3], v: &JetTensor) -> TensorValue {
    let n = md.dim();
    TensorValue::from_fn(vec![Slot::Up, Slot::Down], n, md.point().clone(), |ij| {
        let (i, j) = (ij[0], ij[1]);
        let delta = if i == j { a.value() } else { 0.0 };
        delta + psi[j].value() * v.get(&[i]).value()
    })
}
