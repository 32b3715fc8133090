//! Central finite-difference oracle for jet evaluation.
//!
//! Uses only plain floating-point evaluation of the expression, so it shares
//! no arithmetic with the jet path it is meant to check.

use super::layout::layout;
use super::{Jet3, Point};
use crate::error::EvalError;
use crate::expr::ScalarExpr;

/// Step for coordinate value `x` when differencing through `order`:
/// `ε^(1/(order+2)) · max(1, |x|)`.
pub fn fd_step(order: u8, x: f64) -> f64 {
    f64::EPSILON.powf(1.0 / (f64::from(order) + 2.0)) * x.abs().max(1.0)
}

/// Finite-difference approximation of the partials of `expr` at `point`
/// through `order` (1..=3), all layers using the step for `order`.
pub fn fd_oracle(expr: &ScalarExpr, point: &Point, order: u8) -> Result<Jet3, EvalError> {
    let order = order.clamp(1, 3);
    let n = point.dim();
    let h: Vec<f64> = point.coords().iter().map(|&x| fd_step(order, x)).collect();
    let f = |offsets: &[(usize, f64)]| -> Result<f64, EvalError> {
        let mut x = point.coords().to_vec();
        for &(i, s) in offsets {
            x[i] += s * h[i];
        }
        expr.eval(&x)
    };

    let f0 = f(&[])?;
    let mut grad = vec![0.0; n];
    for i in 0..n {
        grad[i] = (f(&[(i, 1.0)])? - f(&[(i, -1.0)])?) / (2.0 * h[i]);
    }

    let l = layout(n);
    let mut hess = vec![0.0; l.pairs.len()];
    if order >= 2 {
        for (p, &[i, j]) in l.pairs.iter().enumerate() {
            hess[p] = if i == j {
                (f(&[(i, 1.0)])? - 2.0 * f0 + f(&[(i, -1.0)])?) / (h[i] * h[i])
            } else {
                (f(&[(i, 1.0), (j, 1.0)])? - f(&[(i, 1.0), (j, -1.0)])? - f(&[(i, -1.0), (j, 1.0)])?
                    + f(&[(i, -1.0), (j, -1.0)])?)
                    / (4.0 * h[i] * h[j])
            };
        }
    }

    let mut third = vec![0.0; l.triples.len()];
    if order >= 3 {
        // second difference along `i`, first difference along `j`
        let iij = |i: usize, j: usize| -> Result<f64, EvalError> {
            let along = |s: f64| -> Result<f64, EvalError> {
                Ok(f(&[(i, 1.0), (j, s)])? - 2.0 * f(&[(j, s)])? + f(&[(i, -1.0), (j, s)])?)
            };
            Ok((along(1.0)? - along(-1.0)?) / (2.0 * h[j] * h[i] * h[i]))
        };
        for (t, &[i, j, k]) in l.triples.iter().enumerate() {
            third[t] = if i == j && j == k {
                (f(&[(i, 2.0)])? - 2.0 * f(&[(i, 1.0)])? + 2.0 * f(&[(i, -1.0)])? - f(&[(i, -2.0)])?)
                    / (2.0 * h[i] * h[i] * h[i])
            } else if i == j {
                iij(i, k)?
            } else if j == k {
                iij(j, i)?
            } else {
                let mut acc = 0.0;
                for si in [1.0, -1.0] {
                    for sj in [1.0, -1.0] {
                        for sk in [1.0, -1.0] {
                            acc += si * sj * sk * f(&[(i, si), (j, sj), (k, sk)])?;
                        }
                    }
                }
                acc / (8.0 * h[i] * h[j] * h[k])
            };
        }
    }
    Ok(Jet3::from_layers(order, f0, grad, hess, third))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use std::sync::Arc;

    fn xyz() -> Arc<[String]> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn inverse_square_first_order() {
        let e = parse_expr("1/z^2", &xyz()).unwrap();
        let j = fd_oracle(&e, &Point::new(vec![0.0, 0.0, 2.0]), 1).unwrap();
        assert!((j.grad(2) + 0.25).abs() < 1e-8);
        assert!(j.grad(0).abs() < 1e-12);
    }

    #[test]
    fn exponential_second_order() {
        let e = parse_expr("exp(2*z)", &xyz()).unwrap();
        let j = fd_oracle(&e, &Point::new(vec![0.0, 0.0, 0.0]), 2).unwrap();
        assert!((j.hess(2, 2) - 4.0).abs() < 1e-6);
    }

    #[test]
    fn constant_has_no_derivatives() {
        let e = parse_expr("3", &xyz()).unwrap();
        let j = fd_oracle(&e, &Point::new(vec![0.4, -7.0, 12.0]), 3).unwrap();
        assert_eq!(j.value(), 3.0);
        assert!(j.gradient().iter().chain(j.hess_packed()).chain(j.third_packed()).all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn third_order_mixed_cases() {
        // x^2 y z has ∂xxy... only ∂xyz = 2x, ∂xxy = 2z, ∂xxz = 2y
        let e = parse_expr("x^2*y*z + y^3", &xyz()).unwrap();
        let j = fd_oracle(&e, &Point::new(vec![0.5, 1.5, -1.0]), 3).unwrap();
        assert!((j.third(0, 1, 2) - 1.0).abs() < 1e-4);
        assert!((j.third(0, 0, 1) + 2.0).abs() < 1e-4);
        assert!((j.third(0, 0, 2) - 3.0).abs() < 1e-4);
        assert!((j.third(1, 1, 1) - 6.0).abs() < 1e-4);
        assert!(j.third(2, 2, 2).abs() < 1e-4);
    }

    #[test]
    fn step_rule() {
        assert_eq!(fd_step(1, 0.5), f64::EPSILON.powf(1.0 / 3.0));
        assert_eq!(fd_step(2, -4.0), 4.0 * f64::EPSILON.powf(0.25));
    }
}
