//! Internal consistency checks of the curvature engine.

use super::operators::{lie_derivative_jets, lower, nabla_covector, LocalGeometry};
use super::tensor::{JetTensor, Slot};
use crate::error::Result;
use crate::jet::Jet3;

fn rel(defect: f64, scale: f64) -> f64 {
    defect / scale.max(1.0)
}

/// `max |∇_k g_ij|`, computed from the jets of `g` and `Γ`.
pub fn metric_compatibility_defect(geo: &LocalGeometry) -> f64 {
    let g = geo.metric_tensor();
    let ng = g.covariant_derivative(&geo.conn);
    let scale = (0..geo.dim())
        .flat_map(|k| (0..geo.dim()).flat_map(move |i| (0..geo.dim()).map(move |j| (k, i, j))))
        .fold(0.0_f64, |m, (k, i, j)| m.max(geo.md.dg(k, i, j).abs()));
    rel(ng.value(geo.point()).max_abs(), scale)
}

/// Lowered Riemann tensor `R_lkij = g_lm R^m_kij`.
fn lowered_riemann(geo: &LocalGeometry) -> JetTensor {
    let n = geo.dim();
    JetTensor::from_fn(vec![Slot::Down; 4], n, |idx| {
        (0..n).fold(Jet3::constant(n, 0.0, 3), |acc, m| {
            acc + geo.md.g_jet(idx[0], m) * geo.riemann.get(&[m, idx[1], idx[2], idx[3]])
        })
    })
}

/// Largest violation among `R_lkij = -R_lkji`, `R_lkij = -R_klij`, `R_lkij = R_ijlk`
/// and the first Bianchi identity, relative to `max |R|`.
pub fn riemann_symmetry_defect(geo: &LocalGeometry) -> f64 {
    let r = lowered_riemann(geo).value(geo.point());
    let n = geo.dim();
    let scale = r.max_abs();
    let mut worst: f64 = 0.0;
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let v = r.get(&[l, k, i, j]);
                    worst = worst
                        .max((v + r.get(&[l, k, j, i])).abs())
                        .max((v + r.get(&[k, l, i, j])).abs())
                        .max((v - r.get(&[i, j, l, k])).abs())
                        .max((v + r.get(&[l, i, j, k]) + r.get(&[l, j, k, i])).abs());
                }
            }
        }
    }
    rel(worst, scale)
}

/// Contracted second Bianchi identity `div Ric = ½ d scal`, relative to `max |∇Ric|`.
/// Needs metric jets of order 3.
pub fn contracted_bianchi_defect(geo: &LocalGeometry) -> Result<f64> {
    let nric = geo.nabla_ricci()?.value(geo.point());
    let n = geo.dim();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let mut div = 0.0;
        for k in 0..n {
            for i in 0..n {
                div += geo.md.g_inv(k, i) * nric.get(&[k, i, j]);
            }
        }
        worst = worst.max((div - 0.5 * geo.scal.grad(j)).abs());
    }
    Ok(rel(worst, nric.max_abs()))
}

/// `max |g g⁻¹ - I|`.
pub fn inverse_defect(geo: &LocalGeometry) -> f64 {
    let n = geo.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p: f64 = (0..n).map(|k| geo.md.g(i, k) * geo.md.g_inv(k, j)).sum();
            worst = worst.max((p - f64::from(u8::from(i == j))).abs());
        }
    }
    worst
}

/// Coordinate Lie derivative `£_V g` against `∇_i θ_j + ∇_j θ_i` with `θ = V♭`,
/// relative to `max |£_V g|`. `v` needs order >= 1.
pub fn lie_symmetrized_defect(geo: &LocalGeometry, v: &JetTensor) -> f64 {
    let lie = lie_derivative_jets(&geo.md, v).value(geo.point());
    let nt = nabla_covector(&lower(v, &geo.md), &geo.conn).value(geo.point());
    let n = geo.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((lie.get(&[i, j]) - nt.get(&[i, j]) - nt.get(&[j, i])).abs());
        }
    }
    rel(worst, lie.max_abs())
}
