mod common;

use common::{corpus, corpus_mismatch, corpus_points, fd_mismatch, random_expr, xyz, CORPUS_SIZE, FD_BOUNDS};
use proptest::prelude::*;
use soliton_core::catalogue::SplitMix64;
use soliton_core::expr::parse_expr;
use soliton_core::jet::{eval_jet, Point};

#[test]
fn corpus_matches_finite_differences() {
    assert!(corpus().len() >= 20);
    let worst = corpus_mismatch(&corpus_points(8, 11));
    for (order, (w, bound)) in worst.iter().zip(FD_BOUNDS).enumerate() {
        assert!(*w < bound, "order {}: mismatch {w:e} >= {bound:e}", order + 1);
    }
}

#[test]
fn corpus_has_distinct_expressions() {
    let mut texts: Vec<String> = corpus().iter().map(|e| e.to_string()).collect();
    texts.sort();
    texts.dedup();
    assert!(texts.len() >= CORPUS_SIZE - 2, "{texts:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_expressions_match_finite_differences(
        seed in any::<u64>(),
        p in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let text = random_expr(&mut SplitMix64::new(seed), 3);
        let e = parse_expr(&text, &xyz()).unwrap();
        let p = Point::new(p.to_vec());
        for order in 1..=3u8 {
            let m = fd_mismatch(&e, &p, order);
            prop_assert!(m < FD_BOUNDS[order as usize - 1], "{text} order {order}: {m:e}");
        }
    }

    #[test]
    fn values_are_a_ring_homomorphism(
        sa in any::<u64>(),
        sb in any::<u64>(),
        p in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let coords = xyz();
        let ta = random_expr(&mut SplitMix64::new(sa), 3);
        let tb = random_expr(&mut SplitMix64::new(sb), 3);
        let a = parse_expr(&ta, &coords).unwrap();
        let b = parse_expr(&tb, &coords).unwrap();
        let p = Point::new(p.to_vec());
        let va = a.eval(p.coords()).unwrap();
        let vb = b.eval(p.coords()).unwrap();
        let val = |op: &str| {
            let e = parse_expr(&format!("({ta}) {op} ({tb})"), &coords).unwrap();
            eval_jet(&e, &p, 3).unwrap().value()
        };
        prop_assert_eq!(eval_jet(&a, &p, 3).unwrap().value(), va);
        prop_assert_eq!(val("+"), va + vb);
        prop_assert_eq!(val("-"), va - vb);
        prop_assert_eq!(val("*"), va * vb);
        if vb != 0.0 {
            prop_assert_eq!(val("/"), va / vb);
        }
    }

    #[test]
    fn mixed_partials_do_not_depend_on_factor_order(p in prop::array::uniform3(-2.0f64..2.0)) {
        let coords = xyz();
        let p = Point::new(p.to_vec());
        let xy = eval_jet(&parse_expr("x*y", &coords).unwrap(), &p, 3).unwrap();
        let yx = eval_jet(&parse_expr("y*x", &coords).unwrap(), &p, 3).unwrap();
        let w = eval_jet(&parse_expr("exp(x*y)*sin(z*x)", &coords).unwrap(), &p, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(xy.hess(i, j), xy.hess(j, i));
                prop_assert_eq!(xy.hess(i, j), yx.hess(i, j));
                prop_assert_eq!(w.hess(i, j), w.hess(j, i));
                for k in 0..3 {
                    prop_assert_eq!(xy.third(i, j, k), xy.third(k, i, j));
                    prop_assert_eq!(xy.third(i, j, k), yx.third(i, j, k));
                    prop_assert_eq!(w.third(i, j, k), w.third(j, k, i));
                }
            }
        }
    }
}
