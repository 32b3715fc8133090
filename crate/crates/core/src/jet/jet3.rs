use std::ops::{Add, Div, Mul, Neg, Sub};

use super::layout::{layout, Layout};

/// Value and symmetric partial derivatives through order 3 of a scalar in `n` variables.
///
/// Layers above `order` are carried as zeros and never read by arithmetic.
/// Binary operations truncate to the lower order of their operands.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet3 {
    order: u8,
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
    third: Vec<f64>,
}

impl Jet3 {
    fn zeros(n: usize, order: u8) -> Self {
        let l = layout(n);
        Self {
            order: order.min(3),
            value: 0.0,
            grad: vec![0.0; n],
            hess: vec![0.0; l.pairs.len()],
            third: vec![0.0; l.triples.len()],
        }
    }

    pub fn constant(n: usize, value: f64, order: u8) -> Self {
        Self { value, ..Self::zeros(n, order) }
    }

    /// The coordinate function `x_index` at `value`.
    pub fn variable(n: usize, index: usize, value: f64, order: u8) -> Self {
        let mut j = Self::constant(n, value, order);
        if j.order >= 1 {
            j.grad[index] = 1.0;
        }
        j
    }

    /// Assembles a jet from packed layers (see [`Jet3::hess_packed`], [`Jet3::third_packed`]).
    pub fn from_layers(order: u8, value: f64, grad: Vec<f64>, hess: Vec<f64>, third: Vec<f64>) -> Self {
        let n = grad.len();
        let l = layout(n);
        assert!(hess.len() == l.pairs.len() && third.len() == l.triples.len(), "layer size mismatch");
        Self { order: order.min(3), value, grad, hess, third }
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[self.layout().pair(i, j)]
    }

    pub fn third(&self, i: usize, j: usize, k: usize) -> f64 {
        self.third[self.layout().triple(i, j, k)]
    }

    /// Packed second-derivative layer, `i <= j` row major.
    pub fn hess_packed(&self) -> &[f64] {
        &self.hess
    }

    /// Packed third-derivative layer, `i <= j <= k` lexicographic.
    pub fn third_packed(&self) -> &[f64] {
        &self.third
    }

    /// Partial derivative along the multi-index (length 0..=3).
    pub fn derivative(&self, index: &[usize]) -> f64 {
        match *index {
            [] => self.value,
            [i] => self.grad(i),
            [i, j] => self.hess(i, j),
            [i, j, k] => self.third(i, j, k),
            _ => panic!("jets carry derivatives through order 3"),
        }
    }

    fn layout(&self) -> &'static Layout {
        layout(self.dim())
    }

    /// Jet of `∂_i self`, one order lower. The value of an order-0 input is NaN.
    pub fn partial(&self, i: usize) -> Jet3 {
        let n = self.dim();
        if self.order == 0 {
            return Self::constant(n, f64::NAN, 0);
        }
        let l = self.layout();
        let mut out = Self::zeros(n, self.order - 1);
        out.value = self.grad[i];
        if out.order >= 1 {
            for j in 0..n {
                out.grad[j] = self.hess[l.pair(i, j)];
            }
        }
        if out.order >= 2 {
            for (p, &[j, k]) in l.pairs.iter().enumerate() {
                out.hess[p] = self.third[l.triple(i, j, k)];
            }
        }
        out
    }

    /// Copy truncated to `order`.
    pub fn truncate(&self, order: u8) -> Jet3 {
        if order >= self.order {
            return self.clone();
        }
        let mut out = Self::zeros(self.dim(), order);
        out.value = self.value;
        if order >= 1 {
            out.grad.copy_from_slice(&self.grad);
        }
        if order >= 2 {
            out.hess.copy_from_slice(&self.hess);
        }
        out
    }

    /// True when the value and every carried derivative are exactly zero.
    pub fn is_zero(&self) -> bool {
        self.value == 0.0
            && self.grad.iter().chain(&self.hess).chain(&self.third).all(|&d| d == 0.0)
    }

    pub fn scale(&self, c: f64) -> Jet3 {
        self.map_layers(|x| c * x)
    }

    pub fn add_scalar(&self, c: f64) -> Jet3 {
        let mut out = self.clone();
        out.value += c;
        out
    }

    fn map_layers(&self, f: impl Fn(f64) -> f64) -> Jet3 {
        Jet3 {
            order: self.order,
            value: f(self.value),
            grad: self.grad.iter().map(|&x| f(x)).collect(),
            hess: self.hess.iter().map(|&x| f(x)).collect(),
            third: self.third.iter().map(|&x| f(x)).collect(),
        }
    }

    fn zip_layers(&self, other: &Jet3, f: impl Fn(f64, f64) -> f64) -> Jet3 {
        assert_eq!(self.dim(), other.dim(), "jet dimension mismatch");
        let order = self.order.min(other.order);
        let mut out = Self::zeros(self.dim(), order);
        out.value = f(self.value, other.value);
        if order >= 1 {
            for (o, (a, b)) in out.grad.iter_mut().zip(self.grad.iter().zip(&other.grad)) {
                *o = f(*a, *b);
            }
        }
        if order >= 2 {
            for (o, (a, b)) in out.hess.iter_mut().zip(self.hess.iter().zip(&other.hess)) {
                *o = f(*a, *b);
            }
        }
        if order >= 3 {
            for (o, (a, b)) in out.third.iter_mut().zip(self.third.iter().zip(&other.third)) {
                *o = f(*a, *b);
            }
        }
        out
    }

    fn mul_jet(&self, b: &Jet3) -> Jet3 {
        assert_eq!(self.dim(), b.dim(), "jet dimension mismatch");
        let a = self;
        let n = a.dim();
        let l = a.layout();
        let order = a.order.min(b.order);
        let mut out = Self::zeros(n, order);
        out.value = a.value * b.value;
        if order >= 1 {
            for i in 0..n {
                out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
            }
        }
        if order >= 2 {
            for (p, &[i, j]) in l.pairs.iter().enumerate() {
                out.hess[p] = a.hess[p] * b.value
                    + a.grad[i] * b.grad[j]
                    + a.grad[j] * b.grad[i]
                    + a.value * b.hess[p];
            }
        }
        if order >= 3 {
            for (t, &[i, j, k]) in l.triples.iter().enumerate() {
                let (ij, ik, jk) = (l.pair(i, j), l.pair(i, k), l.pair(j, k));
                out.third[t] = a.third[t] * b.value
                    + a.hess[ij] * b.grad[k]
                    + a.hess[ik] * b.grad[j]
                    + a.hess[jk] * b.grad[i]
                    + a.grad[i] * b.hess[jk]
                    + a.grad[j] * b.hess[ik]
                    + a.grad[k] * b.hess[ij]
                    + a.value * b.third[t];
            }
        }
        out
    }

    /// Quotient by solving `a = q·b` layer by layer, so the value is exactly `a / b`.
    fn div_jet(&self, b: &Jet3) -> Jet3 {
        assert_eq!(self.dim(), b.dim(), "jet dimension mismatch");
        let a = self;
        let n = a.dim();
        let l = a.layout();
        let order = a.order.min(b.order);
        let mut q = Self::zeros(n, order);
        let b0 = b.value;
        q.value = a.value / b0;
        if order >= 1 {
            for i in 0..n {
                q.grad[i] = (a.grad[i] - q.value * b.grad[i]) / b0;
            }
        }
        if order >= 2 {
            for (p, &[i, j]) in l.pairs.iter().enumerate() {
                q.hess[p] = (a.hess[p]
                    - q.grad[i] * b.grad[j]
                    - q.grad[j] * b.grad[i]
                    - q.value * b.hess[p])
                    / b0;
            }
        }
        if order >= 3 {
            for (t, &[i, j, k]) in l.triples.iter().enumerate() {
                let (ij, ik, jk) = (l.pair(i, j), l.pair(i, k), l.pair(j, k));
                let known = q.hess[ij] * b.grad[k]
                    + q.hess[ik] * b.grad[j]
                    + q.hess[jk] * b.grad[i]
                    + q.grad[i] * b.hess[jk]
                    + q.grad[j] * b.hess[ik]
                    + q.grad[k] * b.hess[ij]
                    + q.value * b.third[t];
                q.third[t] = (a.third[t] - known) / b0;
            }
        }
        q
    }

    /// `φ ∘ self` given `[φ, φ', φ'', φ''']` at `self.value()` (Faà di Bruno through order 3).
    pub fn compose(&self, d: [f64; 4]) -> Jet3 {
        let n = self.dim();
        let l = self.layout();
        let g = &self.grad;
        let h = &self.hess;
        let mut out = Self::zeros(n, self.order);
        out.value = d[0];
        if self.order >= 1 {
            for i in 0..n {
                out.grad[i] = d[1] * g[i];
            }
        }
        if self.order >= 2 {
            for (p, &[i, j]) in l.pairs.iter().enumerate() {
                out.hess[p] = d[2] * g[i] * g[j] + d[1] * h[p];
            }
        }
        if self.order >= 3 {
            for (t, &[i, j, k]) in l.triples.iter().enumerate() {
                let (ij, ik, jk) = (l.pair(i, j), l.pair(i, k), l.pair(j, k));
                out.third[t] = d[3] * g[i] * g[j] * g[k]
                    + d[2] * (h[ij] * g[k] + h[ik] * g[j] + h[jk] * g[i])
                    + d[1] * self.third[t];
            }
        }
        out
    }

    pub fn exp(&self) -> Jet3 {
        let e = self.value.exp();
        self.compose([e, e, e, e])
    }

    pub fn ln(&self) -> Jet3 {
        let x = self.value;
        let r = 1.0 / x;
        self.compose([x.ln(), r, -r * r, 2.0 * r * r * r])
    }

    pub fn sin(&self) -> Jet3 {
        let (s, c) = self.value.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet3 {
        let (s, c) = self.value.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn tan(&self) -> Jet3 {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.compose([t, sec2, 2.0 * t * sec2, 2.0 * sec2 * (1.0 + 3.0 * t * t)])
    }

    pub fn sinh(&self) -> Jet3 {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose([s, c, s, c])
    }

    pub fn cosh(&self) -> Jet3 {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose([c, s, c, s])
    }

    pub fn sqrt(&self) -> Jet3 {
        let s = self.value.sqrt();
        let d1 = 0.5 / s;
        let d2 = -0.5 * d1 / self.value;
        let d3 = -1.5 * d2 / self.value;
        self.compose([s, d1, d2, d3])
    }

    /// Integer power by repeated squaring; negative exponents divide into 1.
    pub fn powi(&self, k: i32) -> Jet3 {
        let mut base = self.clone();
        let mut e = k.unsigned_abs();
        let mut acc: Option<Jet3> = None;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => &a * &base,
                    None => base.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        let pos = acc.unwrap_or_else(|| Jet3::constant(self.dim(), 1.0, self.order));
        if k < 0 {
            &Jet3::constant(self.dim(), 1.0, self.order) / &pos
        } else {
            pos
        }
    }

    /// `exp(b · ln a)`; caller guarantees `a > 0`.
    pub fn powf(&self, exponent: &Jet3) -> Jet3 {
        (exponent * &self.ln()).exp()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Jet3> for &Jet3 {
            type Output = Jet3;
            fn $method(self, rhs: &Jet3) -> Jet3 {
                let f: fn(&Jet3, &Jet3) -> Jet3 = $body;
                f(self, rhs)
            }
        }
        impl $trait<Jet3> for Jet3 {
            type Output = Jet3;
            fn $method(self, rhs: Jet3) -> Jet3 {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet3> for Jet3 {
            type Output = Jet3;
            fn $method(self, rhs: &Jet3) -> Jet3 {
                (&self).$method(rhs)
            }
        }
        impl $trait<Jet3> for &Jet3 {
            type Output = Jet3;
            fn $method(self, rhs: Jet3) -> Jet3 {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.zip_layers(b, |x, y| x + y));
binop!(Sub, sub, |a, b| a.zip_layers(b, |x, y| x - y));
binop!(Mul, mul, |a, b| a.mul_jet(b));
binop!(Div, div, |a, b| a.div_jet(b));

impl Neg for &Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.map_layers(|x| -x)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        -&self
    }
}

impl Mul<&Jet3> for f64 {
    type Output = Jet3;
    fn mul(self, rhs: &Jet3) -> Jet3 {
        rhs.scale(self)
    }
}

impl Mul<Jet3> for f64 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        rhs.scale(self)
    }
}

/// Sum of jets; `zero` fixes dimension and order when the iterator is empty.
pub fn jet_sum(zero: Jet3, items: impl IntoIterator<Item = Jet3>) -> Jet3 {
    items.into_iter().fold(zero, |acc, x| acc + x)
}
