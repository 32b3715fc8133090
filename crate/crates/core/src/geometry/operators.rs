use super::connection::{christoffel_at, ricci_jets, riemann_jets, scalar_jet, ConnectionData};
use super::metric::{metric_data_at, MetricData};
use super::tensor::{JetTensor, Slot, TensorValue};
use crate::error::Result;
use crate::expr::{ManifoldSpec, ScalarExpr};
use crate::jet::{eval_jet, jet_sum, Jet3, Point};

/// Metric, connection and curvature at one point, all as jets.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub md: MetricData,
    pub conn: ConnectionData,
    /// slots `[l, k, i, j]`
    pub riemann: JetTensor,
    pub ricci: JetTensor,
    pub scal: Jet3,
}

impl LocalGeometry {
    /// Needs `order >= 2`; order 3 also carries first derivatives of curvature.
    pub fn new(spec: &ManifoldSpec, point: &Point, order: u8) -> Result<Self> {
        Self::from_metric(metric_data_at(spec, point, order)?)
    }

    pub fn from_metric(md: MetricData) -> Result<Self> {
        md.require("curvature", 2)?;
        let conn = christoffel_at(&md)?;
        let riemann = riemann_jets(&conn);
        let ricci = ricci_jets(&riemann);
        let scal = scalar_jet(&md, &ricci);
        Ok(Self { md, conn, riemann, ricci, scal })
    }

    pub fn dim(&self) -> usize {
        self.md.dim()
    }

    pub fn point(&self) -> &Point {
        self.md.point()
    }

    pub fn zero(&self) -> Jet3 {
        Jet3::constant(self.dim(), 0.0, 3)
    }

    pub fn ricci_value(&self) -> TensorValue {
        self.ricci.value(self.point())
    }

    /// `(∇Ric)_kij`; needs metric order 3.
    pub fn nabla_ricci(&self) -> Result<JetTensor> {
        self.md.require("covariant derivative of Ricci", 3)?;
        Ok(self.ricci.covariant_derivative(&self.conn))
    }

    /// Metric tensor as a constant-slot jet tensor `g_ij`.
    pub fn metric_tensor(&self) -> JetTensor {
        JetTensor::from_fn(vec![Slot::Down, Slot::Down], self.dim(), |ij| self.md.g_jet(ij[0], ij[1]).clone())
    }

    pub fn metric_value(&self) -> TensorValue {
        TensorValue::from_fn(vec![Slot::Down, Slot::Down], self.dim(), self.point().clone(), |ij| {
            self.md.g(ij[0], ij[1])
        })
    }
}

/// Contravariant components `V^i` of the spec's vector field as jets.
pub fn vector_field_jets(spec: &ManifoldSpec, point: &Point, order: u8) -> Result<JetTensor> {
    let comps = spec
        .vector()
        .iter()
        .map(|e| eval_jet(e, point, order))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(JetTensor::new(vec![Slot::Up], spec.dim(), comps))
}

/// Scalar field and its jets.
pub fn scalar_jets(expr: &ScalarExpr, point: &Point, order: u8) -> Result<Jet3> {
    Ok(eval_jet(expr, point, order)?)
}

/// `V_i = g_ij V^j`
pub fn lower(v: &JetTensor, md: &MetricData) -> JetTensor {
    debug_assert_eq!(v.slots(), &[Slot::Up]);
    let n = v.dim();
    JetTensor::from_fn(vec![Slot::Down], n, |i| {
        jet_sum(Jet3::constant(n, 0.0, 3), (0..n).map(|j| md.g_jet(i[0], j) * v.get(&[j])))
    })
}

/// `w^i = g^ij w_j`
pub fn raise(w: &JetTensor, md: &MetricData) -> JetTensor {
    debug_assert_eq!(w.slots(), &[Slot::Down]);
    let n = w.dim();
    JetTensor::from_fn(vec![Slot::Up], n, |i| {
        jet_sum(Jet3::constant(n, 0.0, 3), (0..n).map(|j| md.g_inv_jet(i[0], j) * w.get(&[j])))
    })
}

/// Covariant derivative of a contravariant vector, slots `[k, i]`: `∂_k V^i + Γ^i_km V^m`.
pub fn nabla_vector(v: &JetTensor, conn: &ConnectionData) -> JetTensor {
    v.covariant_derivative(conn)
}

/// `div V = (∇V)^i_i` from the output of [`nabla_vector`].
pub fn divergence_jet(nabla_v: &JetTensor) -> Jet3 {
    let n = nabla_v.dim();
    jet_sum(Jet3::constant(n, 0.0, 3), (0..n).map(|i| nabla_v.get(&[i, i]).clone()))
}

/// Coordinate formula `(£_V g)_ij = V^k ∂_k g_ij + g_kj ∂_i V^k + g_ik ∂_j V^k`.
pub fn lie_derivative_jets(md: &MetricData, v: &JetTensor) -> JetTensor {
    let n = md.dim();
    JetTensor::from_fn(vec![Slot::Down, Slot::Down], n, |ij| {
        let (i, j) = (ij[0], ij[1]);
        let zero = Jet3::constant(n, 0.0, 3);
        jet_sum(
            zero,
            (0..n).map(|k| {
                let vk = v.get(&[k]);
                vk * md.g_jet(i, j).partial(k)
                    + md.g_jet(k, j) * vk.partial(i)
                    + md.g_jet(i, k) * vk.partial(j)
            }),
        )
    })
}

/// `Hess(h)_ij = ∂_i∂_j h - Γ^k_ij ∂_k h`
pub fn hessian_jets(h: &Jet3, conn: &ConnectionData) -> JetTensor {
    let n = h.dim();
    let dh = JetTensor::from_fn(vec![Slot::Down], n, |i| h.partial(i[0]));
    dh.covariant_derivative(conn)
}

/// `grad(h)^i = g^ij ∂_j h`
pub fn gradient_jets(h: &Jet3, md: &MetricData) -> JetTensor {
    let n = h.dim();
    raise(&JetTensor::from_fn(vec![Slot::Down], n, |i| h.partial(i[0])), md)
}

/// `g^ij T_ij`
pub fn metric_trace(t: &JetTensor, md: &MetricData) -> Jet3 {
    let n = md.dim();
    let mut acc = Jet3::constant(n, 0.0, 3);
    for i in 0..n {
        for j in 0..n {
            acc = acc + md.g_inv_jet(i, j) * t.get(&[i, j]);
        }
    }
    acc
}

/// `V(h) = V^i ∂_i h`
pub fn directional_jet(v: &JetTensor, h: &Jet3) -> Jet3 {
    let n = h.dim();
    jet_sum(Jet3::constant(n, 0.0, 3), (0..n).map(|i| v.get(&[i]) * h.partial(i)))
}

/// `(∇V)^i_j = ∂_j V^i + Γ^i_jk V^k`, slots `[i, j]`.
pub fn covariant_derivative_vector_at(spec: &ManifoldSpec, point: &Point) -> Result<TensorValue> {
    let geo = LocalGeometry::new(spec, point, 2)?;
    let v = vector_field_jets(spec, point, 1)?;
    Ok(nabla_vector(&v, &geo.conn).value(point).transpose())
}

pub fn lie_derivative_metric_at(spec: &ManifoldSpec, point: &Point) -> Result<TensorValue> {
    let md = metric_data_at(spec, point, 1)?;
    let v = vector_field_jets(spec, point, 1)?;
    Ok(lie_derivative_jets(&md, &v).value(point))
}

/// Gradient, Hessian and Laplace–Beltrami `Δh = g^ij Hess_ij` (so that `Δ = div ∘ grad`).
pub fn grad_hess_laplacian_at(
    spec: &ManifoldSpec,
    h: &ScalarExpr,
    point: &Point,
) -> Result<(TensorValue, TensorValue, f64)> {
    let md = metric_data_at(spec, point, 1)?;
    let conn = christoffel_at(&md)?;
    let hj = scalar_jets(h, point, 2)?;
    let hess = hessian_jets(&hj, &conn);
    let lap = metric_trace(&hess, &md).value();
    Ok((gradient_jets(&hj, &md).value(point), hess.value(point), lap))
}

pub fn divergence_vector_at(spec: &ManifoldSpec, point: &Point) -> Result<f64> {
    let md = metric_data_at(spec, point, 1)?;
    let conn = christoffel_at(&md)?;
    let v = vector_field_jets(spec, point, 1)?;
    Ok(divergence_jet(&nabla_vector(&v, &conn)).value())
}

/// Squared norm of `t` with every slot contracted by `g` or `g⁻¹` according to its variance.
pub fn tensor_norm_sq_at(md: &MetricData, t: &TensorValue) -> f64 {
    t.norm_sq(md)
}

/// `V(h)` for the spec's vector field.
pub fn directional_derivative_at(spec: &ManifoldSpec, h: &ScalarExpr, point: &Point) -> Result<f64> {
    spec.chart().check_point(point)?;
    let v = vector_field_jets(spec, point, 0)?;
    let hj = scalar_jets(h, point, 1)?;
    Ok(directional_jet(&v, &hj).value())
}

/// `(∇Ric)_kij = ∂_k Ric_ij - Γ^l_ki Ric_lj - Γ^l_kj Ric_il`.
pub fn nabla_ricci_at(spec: &ManifoldSpec, point: &Point) -> Result<TensorValue> {
    let geo = LocalGeometry::new(spec, point, 3)?;
    Ok(geo.nabla_ricci()?.value(point))
}

/// `(∇ψ)_ij` style helper for 1-forms given as jets.
pub fn nabla_covector(w: &JetTensor, conn: &ConnectionData) -> JetTensor {
    w.covariant_derivative(conn)
}
