//! Built-in manifolds and deterministic point sampling.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse_manifold, ManifoldSpec};
use crate::jet::Point;

/// A named, fully specified manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub doc: &'static str,
    pub spec: ManifoldSpec,
}

impl CatalogueEntry {
    /// Per-coordinate sampling intervals, strictly inside the domain.
    pub fn sampling_box(&self) -> &[(f64, f64)] {
        self.spec.sampling_box()
    }
}

struct Source {
    name: &'static str,
    doc: &'static str,
    text: &'static str,
}

const SOURCES: [Source; 6] = [
    Source {
        name: "hyperbolic_halfspace",
        doc: "upper half-space z > 0 with g = (dx^2 + dy^2 + dz^2)/z^2, V = d/dz = grad(-1/z), lambda = 1 - 1/z",
        text: "\
dim = 3
coords = x y z
domain z > 0
g[1][1] = 1/z^2
g[2][2] = 1/z^2
g[3][3] = 1/z^2
V[3] = 1
lambda = 1 - 1/z
f = -1/z
a = -1/z
box x -1 1
box y -1 1
box z 0.5 4
",
    },
    Source {
        name: "exp_warped",
        doc: "g = e^(2z)(dx^2 + dy^2) + dz^2, V = e^z d/dz = grad(e^z), lambda = e^z + 1",
        text: "\
dim = 3
coords = x y z
g[1][1] = exp(2*z)
g[2][2] = exp(2*z)
g[3][3] = 1
V[3] = exp(z)
lambda = exp(z) + 1
f = exp(z)
a = exp(z)
box x -1 1
box y -1 1
box z 0.1 2
",
    },
    Source {
        name: "euclidean3",
        doc: "flat R^3 with the parallel field V = d/dx = grad(x), lambda = 0",
        text: "\
dim = 3
coords = x y z
g[1][1] = 1
g[2][2] = 1
g[3][3] = 1
V[1] = 1
lambda = 0
f = x
box x -1 1
box y -1 1
box z -1 1
",
    },
    Source {
        name: "euclidean3_position_field",
        doc: "flat R^3 with the position field V = (x, y, z) = grad(r^2/2), concircular with a = 1, lambda = 1",
        text: "\
dim = 3
coords = x y z
g[1][1] = 1
g[2][2] = 1
g[3][3] = 1
V[1] = x
V[2] = y
V[3] = z
lambda = 1
f = (x^2 + y^2 + z^2)/2
a = 1
box x 0.25 2
box y 0.25 2
box z 0.25 2
",
    },
    Source {
        name: "euclidean3_rotation_field",
        doc: "flat R^3 with the Killing field V = (-y, x, 0): solenoidal, not gradient, not torse-forming, lambda = 0",
        text: "\
dim = 3
coords = x y z
g[1][1] = 1
g[2][2] = 1
g[3][3] = 1
V[1] = -y
V[2] = x
lambda = 0
box x 0.5 2
box y 0.5 2
box z -1 1
",
    },
    Source {
        name: "sphere2",
        doc: "unit 2-sphere g = dtheta^2 + sin(theta)^2 dphi^2 with the Killing field V = d/dphi, lambda = 0",
        text: "\
dim = 2
coords = theta phi
domain theta > 0
domain pi - theta > 0
g[1][1] = 1
g[2][2] = sin(theta)^2
V[2] = 1
lambda = 0
",
    },
];

/// Names of all built-in manifolds.
pub fn list() -> Vec<&'static str> {
    SOURCES.iter().map(|s| s.name).collect()
}

/// Looks up a built-in manifold; also accepts the `catalogue:` prefix.
pub fn get_manifold(name: &str) -> Result<CatalogueEntry> {
    let bare = name.strip_prefix("catalogue:").unwrap_or(name);
    let src = SOURCES
        .iter()
        .find(|s| s.name == bare)
        .ok_or_else(|| Error::UnknownManifold(bare.to_string()))?;
    let mut spec = parse_manifold(src.text).expect("catalogue documents parse");
    if src.name == "sphere2" {
        spec = spec.with_sampling_box(vec![(0.1, PI - 0.1), (-PI, PI)]);
    }
    Ok(CatalogueEntry { name: src.name, doc: src.doc, spec })
}

/// Point sampling strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    UniformRandom,
    Grid,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::UniformRandom => "uniform_random",
            Strategy::Grid => "grid",
        }
    }

    pub fn from_name(name: &str) -> Option<Strategy> {
        match name {
            "uniform_random" | "uniform" | "random" => Some(Strategy::UniformRandom),
            "grid" => Some(Strategy::Grid),
            _ => None,
        }
    }
}

/// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9e3779b97f4a7c15, then a
/// fixed xor-shift-multiply finaliser. Fully specified, so sequences are
/// identical on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in the open interval (0, 1).
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// Deterministic points strictly inside `sampling_box`.
///
/// `Grid` uses the smallest `k` with `k^n >= count` cells per axis, takes
/// cell centres in lexicographic order and keeps the first `count`.
pub fn sample_box(sampling_box: &[(f64, f64)], count: usize, seed: u64, strategy: Strategy) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::Sampling("count must be at least 1".into()));
    }
    if let Some((lo, hi)) = sampling_box.iter().find(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::Sampling(format!("empty sampling interval [{lo}, {hi}]")));
    }
    let n = sampling_box.len();
    match strategy {
        Strategy::UniformRandom => {
            let mut rng = SplitMix64::new(seed);
            Ok((0..count)
                .map(|_| Point::new(sampling_box.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.next_open01()).collect()))
                .collect())
        }
        Strategy::Grid => {
            let mut k = 1usize;
            while k.checked_pow(n as u32).is_some_and(|c| c < count) {
                k += 1;
            }
            Ok((0..count)
                .map(|mut flat| {
                    let mut idx = vec![0usize; n];
                    for slot in (0..n).rev() {
                        idx[slot] = flat % k;
                        flat /= k;
                    }
                    Point::new(
                        idx.iter()
                            .zip(sampling_box)
                            .map(|(&i, &(lo, hi))| lo + (hi - lo) * (i as f64 + 0.5) / k as f64)
                            .collect(),
                    )
                })
                .collect())
        }
    }
}

pub fn sample_points(entry: &CatalogueEntry, count: usize, seed: u64, strategy: Strategy) -> Result<Vec<Point>> {
    sample_box(entry.sampling_box(), count, seed, strategy)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_loads() {
        for name in list() {
            let e = get_manifold(name).unwrap();
            assert_eq!(e.name, name);
            assert_eq!(e.sampling_box().len(), e.spec.dim());
        }
        assert!(matches!(get_manifold("nope"), Err(Error::UnknownManifold(_))));
        assert_eq!(get_manifold("catalogue:exp_warped").unwrap().name, "exp_warped");
    }

    #[test]
    fn declared_data() {
        let e = get_manifold("hyperbolic_halfspace").unwrap();
        assert_eq!(e.spec.potential().unwrap().to_string(), "-1 / z");
        assert_eq!(e.sampling_box()[2], (0.5, 4.0));
        let e = get_manifold("exp_warped").unwrap();
        assert_eq!(e.spec.potential().unwrap().to_string(), "exp(z)");
        let e = get_manifold("euclidean3_position_field").unwrap();
        assert_eq!(e.spec.lambda().unwrap().to_string(), "1");
    }

    #[test]
    fn splitmix_reference_values() {
        // published reference outputs for seed 0
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(r.next_u64(), 0x6e78_9e6a_a1b9_65f4);
        assert_eq!(r.next_u64(), 0x06c4_5d18_8009_454f);
    }

    #[test]
    fn grid_sampling() {
        let e = get_manifold("hyperbolic_halfspace").unwrap();
        let pts = sample_points(&e, 8, 42, Strategy::Grid).unwrap();
        assert_eq!(pts.len(), 8);
        assert!(pts.iter().all(|p| p[2] > 0.5 && p[2] < 4.0));
        assert_eq!(pts[0].coords(), &[-0.5, -0.5, 1.375]);
        assert_eq!(pts, sample_points(&e, 8, 42, Strategy::Grid).unwrap());
        assert_eq!(sample_points(&e, 9, 0, Strategy::Grid).unwrap().len(), 9);
    }

    #[test]
    fn random_sampling_is_reproducible_and_inside() {
        let e = get_manifold("sphere2").unwrap();
        let a = sample_points(&e, 100, 7, Strategy::UniformRandom).unwrap();
        assert_eq!(a, sample_points(&e, 100, 7, Strategy::UniformRandom).unwrap());
        assert_ne!(a, sample_points(&e, 100, 8, Strategy::UniformRandom).unwrap());
        assert!(a.iter().all(|p| p[0] > 0.1 && p[0] < PI - 0.1 && p[1] > -PI && p[1] < PI));
    }

    #[test]
    fn bad_requests() {
        assert!(matches!(sample_box(&[(0.0, 1.0)], 0, 1, Strategy::Grid), Err(Error::Sampling(_))));
        assert!(matches!(sample_box(&[(1.0, 1.0)], 3, 1, Strategy::Grid), Err(Error::Sampling(_))));
    }
}
