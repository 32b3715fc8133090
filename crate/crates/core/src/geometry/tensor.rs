use serde::Serialize;

use super::connection::ConnectionData;
use super::metric::MetricData;
use crate::jet::{Jet3, Point};

/// Variance of a tensor slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    /// contravariant (upper) index
    Up,
    /// covariant (lower) index
    Down,
}

/// Row-major flat index of a multi-index in `n` dimensions.
pub(crate) fn flat_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

pub(crate) fn unflatten(n: usize, rank: usize, mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in (0..rank).rev() {
        idx[slot] = flat % n;
        flat /= n;
    }
    idx
}

/// Components of a tensor at a point, in coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    slots: Vec<Slot>,
    n: usize,
    components: Vec<f64>,
    point: Point,
}

impl TensorValue {
    pub fn new(slots: Vec<Slot>, n: usize, components: Vec<f64>, point: Point) -> Self {
        assert_eq!(components.len(), n.pow(slots.len() as u32), "component count must be n^rank");
        Self { slots, n, components, point }
    }

    pub fn from_fn(slots: Vec<Slot>, n: usize, point: Point, f: impl Fn(&[usize]) -> f64) -> Self {
        let rank = slots.len();
        let components = (0..n.pow(rank as u32)).map(|k| f(&unflatten(n, rank, k))).collect();
        Self::new(slots, n, components, point)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn point(&self) -> &Point {
        &self.point
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.rank());
        self.components[flat_index(self.n, idx)]
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Componentwise `self - other`; slots must agree.
    pub fn sub(&self, other: &TensorValue) -> TensorValue {
        assert_eq!(self.slots, other.slots, "slot mismatch");
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect();
        TensorValue::new(self.slots.clone(), self.n, components, self.point.clone())
    }

    pub fn scale(&self, c: f64) -> TensorValue {
        let components = self.components.iter().map(|a| c * a).collect();
        TensorValue::new(self.slots.clone(), self.n, components, self.point.clone())
    }

    /// Swaps the two slots of a rank-2 tensor.
    pub fn transpose(&self) -> TensorValue {
        assert_eq!(self.rank(), 2);
        let slots = vec![self.slots[1], self.slots[0]];
        TensorValue::from_fn(slots, self.n, self.point.clone(), |ij| self.get(&[ij[1], ij[0]]))
    }

    /// Squared norm with every slot contracted through the metric.
    pub fn norm_sq(&self, md: &MetricData) -> f64 {
        let mut raised = self.components.clone();
        let n = self.n;
        let rank = self.rank();
        // move each slot to the opposite variance, one slot at a time
        for (s, slot) in self.slots.iter().enumerate() {
            let stride = n.pow((rank - 1 - s) as u32);
            let mut next = vec![0.0; raised.len()];
            for (k, out) in next.iter_mut().enumerate() {
                let i = (k / stride) % n;
                let base = k - i * stride;
                let mut acc = 0.0;
                for m in 0..n {
                    let w = match slot {
                        Slot::Down => md.g_inv(i, m),
                        Slot::Up => md.g(i, m),
                    };
                    acc += w * raised[base + m * stride];
                }
                *out = acc;
            }
            raised = next;
        }
        self.components.iter().zip(&raised).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, md: &MetricData) -> f64 {
        self.norm_sq(md).max(0.0).sqrt()
    }

    /// Largest relative deviation from symmetry under swapping slots `a` and `b`.
    pub fn symmetry_defect(&self, a: usize, b: usize) -> f64 {
        let rank = self.rank();
        let mut worst: f64 = 0.0;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..self.components.len() {
            let mut idx = unflatten(self.n, rank, k);
            let v = self.components[k];
            idx.swap(a, b);
            worst = worst.max((v - self.get(&idx)).abs() / scale);
        }
        worst
    }
}

/// A tensor whose components are jets, so derivatives of every component are on hand.
#[derive(Debug, Clone)]
pub struct JetTensor {
    slots: Vec<Slot>,
    n: usize,
    comps: Vec<Jet3>,
}

impl JetTensor {
    pub fn new(slots: Vec<Slot>, n: usize, comps: Vec<Jet3>) -> Self {
        assert_eq!(comps.len(), n.pow(slots.len() as u32));
        Self { slots, n, comps }
    }

    pub fn from_fn(slots: Vec<Slot>, n: usize, mut f: impl FnMut(&[usize]) -> Jet3) -> Self {
        let rank = slots.len();
        let comps = (0..n.pow(rank as u32)).map(|k| f(&unflatten(n, rank, k))).collect();
        Self::new(slots, n, comps)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn get(&self, idx: &[usize]) -> &Jet3 {
        &self.comps[flat_index(self.n, idx)]
    }

    pub fn components(&self) -> &[Jet3] {
        &self.comps
    }

    /// Lowest jet order among the components.
    pub fn order(&self) -> u8 {
        self.comps.iter().map(Jet3::order).min().unwrap_or(3)
    }

    pub fn value(&self, point: &Point) -> TensorValue {
        TensorValue::new(
            self.slots.clone(),
            self.n,
            self.comps.iter().map(Jet3::value).collect(),
            point.clone(),
        )
    }

    /// Covariant derivative; the new covariant slot comes first:
    /// `(∇T)_{k, I} = ∂_k T_I + Σ_up Γ^a_{k m} T_{..m..} - Σ_down Γ^m_{k a} T_{..m..}`.
    pub fn covariant_derivative(&self, conn: &ConnectionData) -> JetTensor {
        let n = self.n;
        let rank = self.rank();
        let mut slots = Vec::with_capacity(rank + 1);
        slots.push(Slot::Down);
        slots.extend_from_slice(&self.slots);
        JetTensor::from_fn(slots, n, |full| {
            let k = full[0];
            let idx = &full[1..];
            let mut acc = self.get(idx).partial(k);
            let mut moved = idx.to_vec();
            for (s, slot) in self.slots.iter().enumerate() {
                let a = idx[s];
                for m in 0..n {
                    moved[s] = m;
                    let term = match slot {
                        Slot::Up => conn.gamma_jet(a, k, m) * self.get(&moved),
                        Slot::Down => -(conn.gamma_jet(m, k, a) * self.get(&moved)),
                    };
                    acc = acc + term;
                }
                moved[s] = a;
            }
            acc
        })
    }
}
