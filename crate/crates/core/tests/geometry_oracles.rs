//! Curvature engine against finite-difference and closed-form oracles.

use nalgebra::DMatrix;
use soliton_core::catalogue::{get_manifold, list, sample_box, sample_points, Strategy};
use soliton_core::expr::{parse_manifold, ManifoldSpec};
use soliton_core::geometry::checks::{
    contracted_bianchi_defect, inverse_defect, lie_symmetrized_defect, metric_compatibility_defect,
    riemann_symmetry_defect,
};
use soliton_core::geometry::{
    christoffel_at, divergence_jet, gradient_jets, grad_hess_laplacian_at, metric_data_at, nabla_vector,
    scalar_jets, vector_field_jets, LocalGeometry,
};
use soliton_core::jet::{fd_oracle, Point};

/// Non-diagonal metric with non-constant curvature.
const SKEW: &str = "\
dim = 3
coords = x y z
g[1][1] = 1 + x^2
g[1][2] = 0.3*sin(y*z)
g[2][2] = 2 + cos(x)
g[2][3] = 0.2*x*z
g[3][3] = exp(y/2)
V[1] = y*z
V[2] = sin(x)
V[3] = x + z^2
box x -1 1
box y -1 1
box z -1 1
";

/// Orthogonal metric `E du² + G dv²` for the Brioschi formula.
const SURFACE: &str = "\
dim = 2
coords = u v
g[1][1] = 1 + u^2
g[2][2] = exp(v)*(2 + sin(u))
V[1] = 1
box u -1 1
box v -1 1
";

fn skew() -> ManifoldSpec {
    parse_manifold(SKEW).unwrap()
}

/// Value and first/second FD partials of every metric component.
struct FdMetric {
    n: usize,
    g: DMatrix<f64>,
    gi: DMatrix<f64>,
    dg: Vec<DMatrix<f64>>,
    ddg: Vec<Vec<DMatrix<f64>>>,
}

impl FdMetric {
    fn new(spec: &ManifoldSpec, p: &Point) -> Self {
        let n = spec.dim();
        let mut g = DMatrix::zeros(n, n);
        let mut dg = vec![DMatrix::zeros(n, n); n];
        let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
        for i in 0..n {
            for j in 0..n {
                let e = spec.metric(i, j);
                g[(i, j)] = e.eval(p.coords()).unwrap();
                let d1 = fd_oracle(e, p, 1).unwrap();
                let d2 = fd_oracle(e, p, 2).unwrap();
                for k in 0..n {
                    dg[k][(i, j)] = d1.grad(k);
                    for l in 0..n {
                        ddg[k][l][(i, j)] = d2.hess(k, l);
                    }
                }
            }
        }
        let gi = g.clone().try_inverse().unwrap();
        Self { n, g, gi, dg, ddg }
    }

    /// Koszul: `Γ^k_ij = ½ g^kl (∂_i g_jl + ∂_j g_il - ∂_l g_ij)`.
    fn gamma(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.n;
        let mut out = vec![vec![vec![0.0; n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[k][i][j] = 0.5
                        * (0..n)
                            .map(|l| {
                                self.gi[(k, l)] * (self.dg[i][(j, l)] + self.dg[j][(i, l)] - self.dg[l][(i, j)])
                            })
                            .sum::<f64>();
                }
            }
        }
        out
    }

    /// `∂_m Γ^k_ij`, slots `[m][k][i][j]`.
    fn dgamma(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let n = self.n;
        let mut out = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for m in 0..n {
            let dgi = -(&self.gi * &self.dg[m] * &self.gi);
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = 0.0;
                        for l in 0..n {
                            let c = self.dg[i][(j, l)] + self.dg[j][(i, l)] - self.dg[l][(i, j)];
                            let dc = self.ddg[m][i][(j, l)] + self.ddg[m][j][(i, l)] - self.ddg[m][l][(i, j)];
                            acc += dgi[(k, l)] * c + self.gi[(k, l)] * dc;
                        }
                        out[m][k][i][j] = 0.5 * acc;
                    }
                }
            }
        }
        out
    }

    /// `Ric_kj = R^i_kij` with `R^l_kij = ∂_iΓ^l_jk - ∂_jΓ^l_ik + Γ^l_im Γ^m_jk - Γ^l_jm Γ^m_ik`.
    fn ricci(&self) -> DMatrix<f64> {
        let n = self.n;
        let (g, dg) = (self.gamma(), self.dgamma());
        DMatrix::from_fn(n, n, |k, j| {
            (0..n)
                .map(|i| {
                    let l = i;
                    dg[i][l][j][k] - dg[j][l][i][k]
                        + (0..n).map(|m| g[l][i][m] * g[m][j][k] - g[l][j][m] * g[m][i][k]).sum::<f64>()
                })
                .sum()
        })
    }
}

/// Second-difference error is amplified by `g⁻¹` near chart edges.
const FD_CURVATURE_TOL: f64 = 1e-5;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn manifolds() -> Vec<(String, ManifoldSpec)> {
    let mut out: Vec<(String, ManifoldSpec)> =
        list().into_iter().map(|n| (n.to_string(), get_manifold(n).unwrap().spec)).collect();
    out.push(("skew".into(), skew()));
    out.push(("surface".into(), parse_manifold(SURFACE).unwrap()));
    out
}

#[test]
fn christoffels_match_koszul_on_fd_metric_derivatives() {
    for (name, spec) in manifolds() {
        for p in sample_box(spec.sampling_box(), 20, 5, Strategy::UniformRandom).unwrap() {
            let md = metric_data_at(&spec, &p, 1).unwrap();
            let conn = christoffel_at(&md).unwrap();
            let oracle = FdMetric::new(&spec, &p).gamma();
            let n = spec.dim();
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let e = rel(conn.gamma(k, i, j), oracle[k][i][j]);
                        assert!(e < 1e-8, "{name} Γ^{k}_{i}{j} at {p:?}: {e:e}");
                    }
                }
            }
        }
    }
}

#[test]
fn ricci_and_scalar_match_fd_curvature() {
    for (name, spec) in manifolds() {
        for p in sample_box(spec.sampling_box(), 20, 6, Strategy::UniformRandom).unwrap() {
            let geo = LocalGeometry::new(&spec, &p, 2).unwrap();
            let fd = FdMetric::new(&spec, &p);
            let ric = fd.ricci();
            let n = spec.dim();
            let mut scal = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let e = rel(geo.ricci.get(&[i, j]).value(), ric[(i, j)]);
                    assert!(e < FD_CURVATURE_TOL, "{name} Ric_{i}{j} at {p:?}: {e:e}");
                    scal += fd.gi[(i, j)] * ric[(i, j)];
                }
            }
            assert!(rel(geo.scal.value(), scal) < FD_CURVATURE_TOL, "{name} scal at {p:?}");
            assert!((fd.g.clone() - DMatrix::from_fn(n, n, |i, j| geo.md.g(i, j))).amax() == 0.0);
        }
    }
}

/// Gaussian curvature of `E du² + G dv²`:
/// `K = -1/(2W) [∂_u(G_u/W) + ∂_v(E_v/W)]`, `W = √(EG)`.
fn brioschi(spec: &ManifoldSpec, p: &Point) -> f64 {
    let e = fd_oracle(spec.metric(0, 0), p, 2).unwrap();
    let g = fd_oracle(spec.metric(1, 1), p, 2).unwrap();
    let (ev, gv) = (e.value(), g.value());
    let w = (ev * gv).sqrt();
    let w_u = (e.grad(0) * gv + ev * g.grad(0)) / (2.0 * w);
    let w_v = (e.grad(1) * gv + ev * g.grad(1)) / (2.0 * w);
    let a = g.hess(0, 0) / w - g.grad(0) * w_u / (w * w);
    let b = e.hess(1, 1) / w - e.grad(1) * w_v / (w * w);
    -(a + b) / (2.0 * w)
}

#[test]
fn surface_scalar_curvature_is_twice_gaussian_curvature() {
    let sphere = get_manifold("sphere2").unwrap();
    for p in sample_points(&sphere, 50, 3, Strategy::UniformRandom).unwrap() {
        let geo = LocalGeometry::new(&sphere.spec, &p, 2).unwrap();
        assert!((geo.scal.value() - 2.0).abs() < 1e-9);
        assert!((brioschi(&sphere.spec, &p) - 1.0).abs() < FD_CURVATURE_TOL);
    }
    let surface = parse_manifold(SURFACE).unwrap();
    for p in sample_box(surface.sampling_box(), 50, 3, Strategy::UniformRandom).unwrap() {
        let geo = LocalGeometry::new(&surface, &p, 2).unwrap();
        let k = brioschi(&surface, &p);
        assert!(rel(geo.scal.value(), 2.0 * k) < FD_CURVATURE_TOL, "{} vs {}", geo.scal.value(), 2.0 * k);
    }
}

#[test]
fn engine_invariants_on_every_manifold() {
    for (name, spec) in manifolds() {
        let pts = sample_box(spec.sampling_box(), 100, 42, Strategy::UniformRandom).unwrap();
        for p in &pts {
            let geo = LocalGeometry::new(&spec, p, 3).unwrap();
            let v = vector_field_jets(&spec, p, 3).unwrap();
            assert!(inverse_defect(&geo) < 1e-12, "{name} inverse");
            assert!(metric_compatibility_defect(&geo) < 1e-10, "{name} metric compatibility");
            assert!(riemann_symmetry_defect(&geo) < 1e-10, "{name} Riemann symmetries");
            assert!(contracted_bianchi_defect(&geo).unwrap() < 1e-8, "{name} contracted Bianchi");
            assert!(lie_symmetrized_defect(&geo, &v) < 1e-10, "{name} Lie derivative");
            for i in 0..spec.dim() {
                for j in 0..spec.dim() {
                    for k in 0..spec.dim() {
                        assert_eq!(geo.conn.gamma(k, i, j), geo.conn.gamma(k, j, i));
                    }
                }
            }
        }
    }
}

#[test]
fn catalogue_entries_are_regular_at_box_corners() {
    for name in list() {
        let e = get_manifold(name).unwrap();
        let b = e.sampling_box();
        let n = b.len();
        for mask in 0..(1usize << n) {
            let p = Point::new((0..n).map(|i| if mask >> i & 1 == 1 { b[i].1 } else { b[i].0 }).collect());
            let geo = LocalGeometry::new(&e.spec, &p, 3).unwrap();
            assert!(contracted_bianchi_defect(&geo).unwrap() < 1e-8, "{name} at {p:?}");
            assert!(riemann_symmetry_defect(&geo) < 1e-10, "{name} at {p:?}");
        }
    }
}

#[test]
fn laplacian_is_trace_of_hessian_and_divergence_of_gradient() {
    let spec = skew();
    let h = spec.chart().parse("x*y + sin(z)*exp(x)").unwrap();
    for p in sample_box(spec.sampling_box(), 20, 9, Strategy::UniformRandom).unwrap() {
        let (_, hess, lap) = grad_hess_laplacian_at(&spec, &h, &p).unwrap();
        let md = metric_data_at(&spec, &p, 2).unwrap();
        let n = spec.dim();
        let mut trace = 0.0;
        for i in 0..n {
            for j in 0..n {
                trace += md.g_inv(i, j) * hess.get(&[i, j]);
            }
        }
        assert!(rel(lap, trace) < 1e-14);
        let conn = christoffel_at(&md).unwrap();
        let grad = gradient_jets(&scalar_jets(&h, &p, 2).unwrap(), &md);
        let div = divergence_jet(&nabla_vector(&grad, &conn)).value();
        assert!(rel(lap, div) < 1e-12, "{lap} vs {div}");
    }
}
