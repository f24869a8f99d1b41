//! Random labelled trees: the sequential min(k−1, V_k) construction and its
//! uniformly relabelled version.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::numeric::NeumaierSum;

/// Vertex k (1-based, k ≥ 2) links to min(k−1, V_k) with V_k uniform on 1..N.
pub(super) fn sequential_edges<R: Rng + ?Sized>(rng: &mut R, n: u64) -> Vec<(u32, u32)> {
    let mut edges = Vec::with_capacity(n as usize - 1);
    for k in 2..=n {
        let v = rng.random_range(1..=n);
        let parent = v.min(k - 1);
        edges.push(((parent - 1) as u32, (k - 1) as u32));
    }
    edges.sort_unstable();
    edges
}

pub(super) fn uniform_edges<R: Rng + ?Sized>(rng: &mut R, n: u64) -> Vec<(u32, u32)> {
    let tree = sequential_edges(rng, n);
    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(rng);
    let mut edges: Vec<(u32, u32)> = tree
        .into_iter()
        .map(|(u, v)| {
            let (a, b) = (perm[u as usize], perm[v as usize]);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    edges
}

/// Σ_{k=3..N} [((k−2)/N) ln N + ((N−k+2)/N) ln(N/(N−k+2))].
pub fn tree_sequential_entropy(n: u64) -> f64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    let mut acc = NeumaierSum::new();
    for k in 3..=n {
        let rest = (n - k + 2) as f64;
        acc.add((k - 2) as f64 / nf * ln_n + rest / nf * (nf / rest).ln());
    }
    acc.value()
}
