use super::{Jet3, Point};
use crate::error::EvalError;
use crate::expr::{check_domain, BinOp, Func, Node, ScalarExpr};

/// Evaluates `expr` at `point` with all partial derivatives through `order`.
///
/// Domain violations (log or sqrt of a non-positive value, division by zero,
/// a non-integer power of a non-positive base) are reported with the
/// offending subexpression.
pub fn eval_jet(expr: &ScalarExpr, point: &Point, order: u8) -> Result<Jet3, EvalError> {
    if point.dim() != expr.dim() {
        return Err(EvalError::PointDimension { expected: expr.dim(), got: point.dim() });
    }
    Evaluator { expr, point, order: order.min(3) }.node(expr.root())
}

struct Evaluator<'a> {
    expr: &'a ScalarExpr,
    point: &'a Point,
    order: u8,
}

impl Evaluator<'_> {
    fn constant(&self, v: f64) -> Jet3 {
        Jet3::constant(self.point.dim(), v, self.order)
    }

    fn node(&self, node: &Node) -> Result<Jet3, EvalError> {
        Ok(match node {
            Node::Lit(v) => self.constant(*v),
            Node::Const(c) => self.constant(c.value()),
            Node::Coord(i) => Jet3::variable(self.point.dim(), *i, self.point[*i], self.order),
            Node::Neg(a) => -self.node(a)?,
            Node::Binary(op, a, b) => {
                let u = self.node(a)?;
                match op {
                    BinOp::Add => u + self.node(b)?,
                    BinOp::Sub => u - self.node(b)?,
                    BinOp::Mul => u * self.node(b)?,
                    BinOp::Div => {
                        let v = self.node(b)?;
                        if v.value() == 0.0 {
                            return Err(EvalError::DivisionByZero(self.expr.render(node)));
                        }
                        u / v
                    }
                    BinOp::Pow => match b.integer_literal() {
                        Some(k) => {
                            if k < 0 && u.value() == 0.0 {
                                return Err(EvalError::DivisionByZero(self.expr.render(node)));
                            }
                            u.powi(k)
                        }
                        None => {
                            if u.value() <= 0.0 {
                                return Err(EvalError::PowerBase {
                                    base: u.value(),
                                    expr: self.expr.render(node),
                                });
                            }
                            u.powf(&self.node(b)?)
                        }
                    },
                }
            }
            Node::Apply(func, a) => {
                let u = self.node(a)?;
                check_domain(*func, u.value(), || self.expr.render(node))?;
                match func {
                    Func::Exp => u.exp(),
                    Func::Log => u.ln(),
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => u.tan(),
                    Func::Sinh => u.sinh(),
                    Func::Cosh => u.cosh(),
                    Func::Sqrt => u.sqrt(),
                }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use std::sync::Arc;

    fn xyz() -> Arc<[String]> {
        ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
    }

    fn jet(text: &str, p: [f64; 3], order: u8) -> Result<Jet3, EvalError> {
        eval_jet(&parse_expr(text, &xyz()).unwrap(), &Point::new(p.to_vec()), order)
    }

    #[test]
    fn inverse_square() {
        let j = jet("1/z^2", [0.0, 0.0, 2.0], 2).unwrap();
        assert_eq!(j.value(), 0.25);
        assert_eq!(j.grad(2), -0.25);
        assert_eq!(j.hess(2, 2), 0.375);
        assert_eq!(j.grad(0), 0.0);
        assert_eq!(j.order(), 2);
    }

    #[test]
    fn exponential() {
        let j = jet("exp(2*z)", [0.0, 0.0, 2f64.ln()], 1).unwrap();
        assert!((j.value() - 4.0).abs() < 1e-15);
        assert!((j.grad(2) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial() {
        let j = jet("x*y + z", [1.0, 2.0, 3.0], 3).unwrap();
        assert_eq!(j.value(), 5.0);
        assert_eq!(j.gradient(), &[2.0, 1.0, 1.0]);
        assert_eq!(j.hess(0, 1), 1.0);
        assert_eq!(j.hess(0, 0) + j.hess(1, 1) + j.hess(2, 2) + j.hess(0, 2) + j.hess(1, 2), 0.0);
        assert!(j.third_packed().iter().all(|&t| t == 0.0));
    }

    #[test]
    fn general_power_and_pi() {
        let j = jet("x^y * pi", [2.0, 0.5, 1.0], 1).unwrap();
        let want = 2f64.sqrt() * std::f64::consts::PI;
        assert!((j.value() - want).abs() < 1e-14);
        // d/dy x^y = x^y ln x
        assert!((j.grad(1) - want * 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        match jet("1 + log(x - 1)", [0.5, 0.0, 0.0], 1).unwrap_err() {
            EvalError::Domain { func, expr, .. } => {
                assert_eq!(func, "log");
                assert_eq!(expr, "log(x - 1)");
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            jet("y / (x - x)", [1.0, 1.0, 1.0], 0).unwrap_err(),
            EvalError::DivisionByZero("y / (x - x)".into())
        );
        assert!(matches!(jet("sqrt(z)", [0.0, 0.0, 0.0], 2), Err(EvalError::Domain { .. })));
        assert!(matches!(jet("(-x)^0.5", [1.0, 0.0, 0.0], 0), Err(EvalError::PowerBase { .. })));
        assert!(matches!(jet("x^-1", [0.0, 0.0, 0.0], 0), Err(EvalError::DivisionByZero(_))));
        // integer powers of negative bases are fine
        assert_eq!(jet("x^3", [-2.0, 0.0, 0.0], 0).unwrap().value(), -8.0);
    }

    #[test]
    fn values_use_the_same_floating_operations() {
        let p = [0.3, 1.7, 2.9];
        for text in ["x / y", "x * y", "x + y", "x - y", "sin(x) / cosh(z) - y"] {
            let e = parse_expr(text, &xyz()).unwrap();
            let plain = e.eval(&p).unwrap();
            let j = eval_jet(&e, &Point::new(p.to_vec()), 3).unwrap();
            assert_eq!(j.value(), plain, "{text}");
        }
    }
}
