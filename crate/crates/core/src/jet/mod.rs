//! Order-3 forward-mode differentiation of scalar expressions.

mod eval;
mod fd;
mod jet3;
mod layout;

use std::ops::Index;

pub use eval::eval_jet;
pub use fd::{fd_oracle, fd_step};
pub use jet3::{jet_sum, Jet3};

/// Largest chart dimension the kernel supports.
pub const MAX_DIM: usize = 8;

/// Coordinates of an evaluation locus.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}
