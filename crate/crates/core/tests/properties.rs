//! Property tests over random points, constants and data.

use proptest::prelude::*;
use soliton_core::catalogue::{get_manifold, sample_points, Strategy};
use soliton_core::expr::{parse_manifold, ManifoldSpec, ScalarExpr};
use soliton_core::geometry::checks::{contracted_bianchi_defect, riemann_symmetry_defect};
use soliton_core::geometry::{metric_data_at, LocalGeometry};
use soliton_core::jet::Point;
use soliton_core::soliton::{
    classify_field_at, identity_residual_at, soliton_residual_at, IdentityId, SolitonInstance, Verdict,
};

const ENTRIES: [&str; 6] = [
    "hyperbolic_halfspace",
    "exp_warped",
    "euclidean3",
    "euclidean3_position_field",
    "euclidean3_rotation_field",
    "sphere2",
];

fn point_in(spec: &ManifoldSpec, u: &[f64]) -> Point {
    Point::new(spec.sampling_box().iter().zip(u).map(|(&(lo, hi), t)| lo + (hi - lo) * t).collect())
}

fn expr(spec: &ManifoldSpec, text: &str) -> ScalarExpr {
    spec.chart().parse(text).unwrap()
}

/// Largest component of `r2 - (r1 - c g)` and the bound it must meet: a few
/// roundings of the coefficient `scal/2 + λ + c` times `|g|`.
fn linearity_gap(spec: &ManifoldSpec, c: f64, p: &Point) -> (f64, f64) {
    let lambda = spec.lambda().unwrap().to_string();
    let shifted = spec.clone().with_lambda(Some(expr(spec, &format!("({lambda}) + ({c:e})"))));
    let r1 = soliton_residual_at(&SolitonInstance::new(spec.clone()), p).unwrap();
    let r2 = soliton_residual_at(&SolitonInstance::new(shifted), p).unwrap();
    let md = metric_data_at(spec, p, 1).unwrap();
    let n = spec.dim();
    let geo = LocalGeometry::new(spec, p, 2).unwrap();
    let coeff = geo.scal.value().abs() / 2.0 + spec.lambda().unwrap().eval(p.coords()).unwrap().abs() + c.abs();
    let mut gap: f64 = 0.0;
    let mut gmax: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            gap = gap.max((r2.get(&[i, j]) - (r1.get(&[i, j]) - c * md.g(i, j))).abs());
            gmax = gmax.max(md.g(i, j).abs());
        }
    }
    (gap, 8.0 * f64::EPSILON * (coeff * gmax + r1.max_abs()).max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn soliton_residual_is_linear_in_lambda(
        which in 0..ENTRIES.len(),
        c in -10.0f64..10.0,
        u in prop::array::uniform3(0.0f64..1.0),
    ) {
        let spec = get_manifold(ENTRIES[which]).unwrap().spec;
        let p = point_in(&spec, &u);
        let (gap, bound) = linearity_gap(&spec, c, &p);
        prop_assert!(gap <= bound, "gap {gap:e} > {bound:e}");
    }

    #[test]
    fn classification_scales_with_the_field(
        which in 0..5usize,
        k in 0.1f64..10.0,
        u in prop::array::uniform3(0.0f64..1.0),
    ) {
        let name = ENTRIES[which];
        let spec = get_manifold(name).unwrap().spec.with_torse(None);
        let scaled_v = spec.vector().iter().map(|v| expr(&spec, &format!("({k:e}) * ({v})"))).collect();
        let scaled = spec.clone().with_vector(scaled_v);
        let p = point_in(&spec, &u);
        let base = classify_field_at(&SolitonInstance::new(spec), &p).unwrap();
        let fit = classify_field_at(&SolitonInstance::new(scaled), &p).unwrap();
        prop_assert!((fit.a - k * base.a).abs() <= 1e-12 * (k * base.a).abs().max(1.0), "{name}: a");
        for (s, b) in fit.psi.iter().zip(&base.psi) {
            prop_assert!((s - b).abs() <= 1e-12 * b.abs().max(1.0), "{name}: psi");
        }
        prop_assert_eq!(fit.is_gradient_dual_closed, base.is_gradient_dual_closed);
        prop_assert_eq!(fit.is_solenoidal, base.is_solenoidal);
        prop_assert_eq!(fit.is_torse_forming, base.is_torse_forming);
        prop_assert_eq!(fit.is_concircular, base.is_concircular);
    }

    #[test]
    fn gradient_fields_satisfy_the_lie_norm_identity(
        c in prop::array::uniform4(-2.0f64..2.0),
        u in prop::array::uniform3(0.0f64..1.0),
    ) {
        // V = grad f for f = c0 x + c1 y + c2 z^2 + c3 x y on g = z^-2 δ
        let spec = get_manifold("hyperbolic_halfspace").unwrap().spec;
        let v = [
            format!("z^2 * ({:e} + ({:e}) * y)", c[0], c[3]),
            format!("z^2 * ({:e} + ({:e}) * x)", c[1], c[3]),
            format!("2 * ({:e}) * z^3", c[2]),
        ];
        let spec = spec.clone().with_vector(v.iter().map(|t| expr(&spec, t)).collect()).with_torse(None);
        let p = point_in(&spec, &u);
        let inst = SolitonInstance::new(spec);
        let fit = classify_field_at(&inst, &p);
        prop_assume!(fit.is_ok());
        prop_assert!(fit.unwrap().is_gradient_dual_closed);
        let r = identity_residual_at(&inst, &p, IdentityId::LieNorm).unwrap();
        prop_assert_eq!(r.verdict, Verdict::Pass);
        prop_assert!(r.residual.unwrap() < 1e-9);
    }

    #[test]
    fn bianchi_identities_hold_for_random_metrics(
        a in 0.0f64..2.0,
        b in -0.3f64..0.3,
        c in -0.3f64..0.3,
        u in prop::array::uniform3(0.0f64..1.0),
    ) {
        let doc = format!(
            "dim = 3\ncoords = x y z\ng[1][1] = 1 + {a:e}*x^2\ng[1][2] = {b:e}*sin(y*z)\n\
             g[2][2] = 2 + cos(x*y)\ng[2][3] = {c:e}*x*z\ng[3][3] = exp(y/2)\nV[1] = 1\n\
             box x -1 1\nbox y -1 1\nbox z -1 1\n"
        );
        let spec = parse_manifold(&doc).unwrap();
        let p = point_in(&spec, &u);
        let geo = LocalGeometry::new(&spec, &p, 3).unwrap();
        prop_assert!(riemann_symmetry_defect(&geo) < 1e-10);
        prop_assert!(contracted_bianchi_defect(&geo).unwrap() < 1e-8);
    }

    #[test]
    fn sampling_is_deterministic_and_inside(
        which in 0..ENTRIES.len(),
        count in 1usize..200,
        seed in any::<u64>(),
        grid in any::<bool>(),
    ) {
        let e = get_manifold(ENTRIES[which]).unwrap();
        let strategy = if grid { Strategy::Grid } else { Strategy::UniformRandom };
        let a = sample_points(&e, count, seed, strategy).unwrap();
        prop_assert_eq!(a.len(), count);
        prop_assert_eq!(&a, &sample_points(&e, count, seed, strategy).unwrap());
        for p in &a {
            for (x, &(lo, hi)) in p.coords().iter().zip(e.sampling_box()) {
                prop_assert!(lo < *x && *x < hi);
            }
        }
    }
}
