//! Shared fixtures: a seeded corpus of composed expressions and the
//! jet-versus-finite-difference comparison.
#![allow(dead_code)]

use std::sync::Arc;

use soliton_core::catalogue::SplitMix64;
use soliton_core::expr::{parse_expr, ScalarExpr};
use soliton_core::jet::{eval_jet, fd_oracle, Jet3, Point};

pub const CORPUS_SIZE: usize = 24;
pub const CORPUS_SEED: u64 = 2024;

/// Bounds on `|jet - fd| / max(|jet|, 1)` per derivative order 1..=3.
pub const FD_BOUNDS: [f64; 3] = [1e-6, 1e-6, 1e-4];

pub fn xyz() -> Arc<[String]> {
    ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
}

fn pick(rng: &mut SplitMix64, k: u64) -> u64 {
    rng.next_u64() % k
}

/// Random expression text over `x, y, z` whose every subexpression stays
/// inside its domain for any real arguments.
pub fn random_expr(rng: &mut SplitMix64, depth: u32) -> String {
    if depth == 0 || pick(rng, 5) == 0 {
        return match pick(rng, 5) {
            0 => "x".into(),
            1 => "y".into(),
            2 => "z".into(),
            3 => ["0.5", "1", "1.5"][pick(rng, 3) as usize].into(),
            _ => format!("({} * {})", ["x", "y", "z"][pick(rng, 3) as usize], ["x", "y", "z"][pick(rng, 3) as usize]),
        };
    }
    let a = random_expr(rng, depth - 1);
    match pick(rng, 13) {
        0 => format!("sin(0.5 * ({a}))"),
        1 => format!("cos(0.5 * ({a}))"),
        2 => format!("exp(0.5 * sin({a}))"),
        3 => format!("sqrt(1 + ({a})^2)"),
        4 => format!("log(2 + cos(0.5 * ({a})))"),
        5 => format!("({a})^2"),
        6 => format!("({a}) * {}", ["x", "y", "z"][pick(rng, 3) as usize]),
        7 => format!("(1.5 + sin(0.5 * ({a})))^(0.5 + 0.5 * cos({}))", random_expr(rng, depth - 1)),
        8 => format!("({a}) + ({})", random_expr(rng, depth - 1)),
        9 => format!("({a}) - ({})", random_expr(rng, depth - 1)),
        10 => format!("({a}) * ({})", random_expr(rng, depth - 1)),
        11 => format!("({a}) / (1.5 + cos(0.5 * ({})))", random_expr(rng, depth - 1)),
        _ => format!("sinh(0.5 * sin({a})) + cosh(0.5 * cos({a}))"),
    }
}

/// The fixed expression corpus, parsed.
pub fn corpus() -> Vec<ScalarExpr> {
    let mut rng = SplitMix64::new(CORPUS_SEED);
    let coords = xyz();
    (0..CORPUS_SIZE)
        .map(|_| {
            let text = random_expr(&mut rng, 4);
            parse_expr(&text, &coords).unwrap_or_else(|e| panic!("corpus expression {text}: {e}"))
        })
        .collect()
}

pub fn corpus_points(count: usize, seed: u64) -> Vec<Point> {
    let mut rng = SplitMix64::new(seed);
    (0..count).map(|_| Point::new((0..3).map(|_| -1.0 + 2.0 * rng.next_open01()).collect())).collect()
}

fn layer(j: &Jet3, order: u8) -> &[f64] {
    match order {
        1 => j.gradient(),
        2 => j.hess_packed(),
        _ => j.third_packed(),
    }
}

/// Largest relative jet-vs-FD mismatch of the `order`-th derivatives.
pub fn fd_mismatch(expr: &ScalarExpr, point: &Point, order: u8) -> f64 {
    let ad = eval_jet(expr, point, 3).expect("jet evaluation");
    let fd = fd_oracle(expr, point, order).expect("fd evaluation");
    layer(&ad, order)
        .iter()
        .zip(layer(&fd, order))
        .map(|(a, f)| (a - f).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Worst mismatch per order over the corpus at `points`.
pub fn corpus_mismatch(points: &[Point]) -> [f64; 3] {
    let mut worst = [0.0_f64; 3];
    for e in corpus() {
        for p in points {
            for order in 1..=3u8 {
                let m = fd_mismatch(&e, p, order);
                worst[order as usize - 1] = worst[order as usize - 1].max(m);
            }
        }
    }
    worst
}
