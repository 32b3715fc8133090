use std::fmt;
use std::sync::Arc;

use crate::error::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
        }
    }

    pub fn from_name(name: &str) -> Option<Constant> {
        match name {
            "pi" => Some(Constant::Pi),
            _ => None,
        }
    }
}

/// Expression tree node. Coordinates are referenced by chart index.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Lit(f64),
    Coord(usize),
    Const(Constant),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Apply(Func, Box<Node>),
}

impl Node {
    pub(crate) fn binary(op: BinOp, lhs: Node, rhs: Node) -> Node {
        Node::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Exponent value when `self` is an integer literal, possibly negated.
    pub(crate) fn integer_literal(&self) -> Option<i32> {
        let v = match self {
            Node::Lit(v) => *v,
            Node::Neg(inner) => match inner.as_ref() {
                Node::Lit(v) => -*v,
                _ => return None,
            },
            _ => return None,
        };
        (v.fract() == 0.0 && v.abs() <= i32::MAX as f64).then_some(v as i32)
    }

    pub(crate) fn max_coord(&self) -> Option<usize> {
        match self {
            Node::Lit(_) | Node::Const(_) => None,
            Node::Coord(i) => Some(*i),
            Node::Neg(a) | Node::Apply(_, a) => a.max_coord(),
            Node::Binary(_, a, b) => match (a.max_coord(), b.max_coord()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Binary(op, ..) => op.precedence(),
            Node::Neg(_) => 3,
            _ => 5,
        }
    }

    pub(crate) fn render(&self, names: &[String]) -> String {
        Rendered { node: self, names }.to_string()
    }
}

struct Rendered<'a> {
    node: &'a Node,
    names: &'a [String],
}

impl Rendered<'_> {
    fn child(&self, node: &Node, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner = Rendered { node, names: self.names };
        if node.precedence() < min_prec {
            write!(f, "({inner})")
        } else {
            write!(f, "{inner}")
        }
    }
}

impl fmt::Display for Rendered<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Node::Lit(v) => write!(f, "{v}"),
            Node::Coord(i) => match self.names.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "#{i}"),
            },
            Node::Const(Constant::Pi) => f.write_str("pi"),
            Node::Neg(a) => {
                f.write_str("-")?;
                self.child(a, 4, f)
            }
            Node::Binary(op, a, b) => {
                let p = op.precedence();
                // left-assoc ops bind the right child one level tighter; ^ is the mirror image
                let (lp, rp) = match op {
                    BinOp::Pow => (p + 1, p),
                    _ => (p, p + 1),
                };
                self.child(a, lp, f)?;
                write!(f, " {} ", op.symbol())?;
                self.child(b, rp, f)
            }
            Node::Apply(func, a) => {
                write!(f, "{}(", func.name())?;
                Rendered { node: a, names: self.names }.fmt(f)?;
                f.write_str(")")
            }
        }
    }
}

/// A parsed scalar expression over a coordinate chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarExpr {
    root: Node,
    coords: Arc<[String]>,
}

impl ScalarExpr {
    pub fn new(root: Node, coords: Arc<[String]>) -> Self {
        assert!(
            root.max_coord().is_none_or(|i| i < coords.len()),
            "coordinate reference outside the chart"
        );
        Self { root, coords }
    }

    pub fn constant(value: f64, coords: Arc<[String]>) -> Self {
        Self::new(Node::Lit(value), coords)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coord_names(&self) -> &[String] {
        &self.coords
    }

    pub(crate) fn render(&self, node: &Node) -> String {
        node.render(&self.coords)
    }

    /// Plain floating-point evaluation, with the same domain rules as the jet evaluator.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        if point.len() != self.dim() {
            return Err(EvalError::PointDimension { expected: self.dim(), got: point.len() });
        }
        self.eval_node(&self.root, point)
    }

    fn eval_node(&self, node: &Node, x: &[f64]) -> Result<f64, EvalError> {
        Ok(match node {
            Node::Lit(v) => *v,
            Node::Coord(i) => x[*i],
            Node::Const(c) => c.value(),
            Node::Neg(a) => -self.eval_node(a, x)?,
            Node::Binary(op, a, b) => {
                let u = self.eval_node(a, x)?;
                match op {
                    BinOp::Add => u + self.eval_node(b, x)?,
                    BinOp::Sub => u - self.eval_node(b, x)?,
                    BinOp::Mul => u * self.eval_node(b, x)?,
                    BinOp::Div => {
                        let v = self.eval_node(b, x)?;
                        if v == 0.0 {
                            return Err(EvalError::DivisionByZero(self.render(node)));
                        }
                        u / v
                    }
                    BinOp::Pow => match b.integer_literal() {
                        Some(k) => {
                            if k < 0 && u == 0.0 {
                                return Err(EvalError::DivisionByZero(self.render(node)));
                            }
                            u.powi(k)
                        }
                        None => {
                            if u <= 0.0 {
                                return Err(EvalError::PowerBase {
                                    base: u,
                                    expr: self.render(node),
                                });
                            }
                            (self.eval_node(b, x)? * u.ln()).exp()
                        }
                    },
                }
            }
            Node::Apply(func, a) => {
                let u = self.eval_node(a, x)?;
                check_domain(*func, u, || self.render(node))?;
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

/// Domain guard shared by both evaluators. `sqrt` needs a strictly positive
/// argument because its derivatives blow up at zero.
pub(crate) fn check_domain(
    func: Func,
    arg: f64,
    render: impl FnOnce() -> String,
) -> Result<(), EvalError> {
    let ok = match func {
        Func::Log | Func::Sqrt => arg > 0.0,
        Func::Tan => arg.cos() != 0.0,
        _ => arg.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(EvalError::Domain { func: func.name(), arg, expr: render() })
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Rendered { node: &self.root, names: &self.coords }.fmt(f)
    }
}
