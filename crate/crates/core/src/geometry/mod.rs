//! Metric, Levi-Civita connection, curvature and differential operators,
//! evaluated pointwise with jets.

pub mod checks;
mod connection;
pub(crate) mod linalg;
mod metric;
mod operators;
mod tensor;

pub use connection::{christoffel_at, ricci_at, riemann_at, scalar_curvature_at, ConnectionData};
pub use metric::{metric_data_at, MetricData, SINGULAR_DET};
pub use operators::{
    covariant_derivative_vector_at, directional_derivative_at, directional_jet, divergence_jet,
    divergence_vector_at, grad_hess_laplacian_at, gradient_jets, hessian_jets, lie_derivative_jets,
    lie_derivative_metric_at, lower, metric_trace, nabla_covector, nabla_ricci_at, nabla_vector, raise,
    scalar_jets, tensor_norm_sq_at, vector_field_jets, LocalGeometry,
};
pub use tensor::{JetTensor, Slot, TensorValue};
