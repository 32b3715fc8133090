use std::sync::OnceLock;

use super::MAX_DIM;

/// Packed index tables for symmetric derivative layers in `n` variables.
#[derive(Debug)]
pub(crate) struct Layout {
    pub n: usize,
    /// `(i, j)` with `i <= j`, in storage order.
    pub pairs: Vec<[usize; 2]>,
    /// `(i, j, k)` with `i <= j <= k`, in storage order.
    pub triples: Vec<[usize; 3]>,
    pair_lookup: Vec<usize>,
    triple_lookup: Vec<usize>,
}

impl Layout {
    fn build(n: usize) -> Self {
        let mut pairs = Vec::new();
        let mut pair_lookup = vec![0; n * n];
        for i in 0..n {
            for j in i..n {
                pair_lookup[i * n + j] = pairs.len();
                pair_lookup[j * n + i] = pairs.len();
                pairs.push([i, j]);
            }
        }
        let mut triples = Vec::new();
        let mut triple_lookup = vec![0; n * n * n];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let t = triples.len();
                    for [a, b, c] in [[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
                        triple_lookup[(a * n + b) * n + c] = t;
                    }
                    triples.push([i, j, k]);
                }
            }
        }
        Self { n, pairs, triples, pair_lookup, triple_lookup }
    }

    #[inline]
    pub fn pair(&self, i: usize, j: usize) -> usize {
        self.pair_lookup[i * self.n + j]
    }

    #[inline]
    pub fn triple(&self, i: usize, j: usize, k: usize) -> usize {
        self.triple_lookup[(i * self.n + j) * self.n + k]
    }
}

static LAYOUTS: [OnceLock<Layout>; MAX_DIM + 1] = [const { OnceLock::new() }; MAX_DIM + 1];

pub(crate) fn layout(n: usize) -> &'static Layout {
    assert!(n <= MAX_DIM, "dimension {n} exceeds MAX_DIM = {MAX_DIM}");
    LAYOUTS[n].get_or_init(|| Layout::build(n))
}
