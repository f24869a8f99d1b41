//! Sequential Erdős–Rényi construction where each new vertex copies every
//! name coordinate from a uniform choice among its parents and a fresh letter.

mod extensions;
mod mc;
mod series;

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{name_length, name_space, to_letters, GraphWithNames, MAX_ALPHABET};
use crate::numeric::rng_from_seed;
use crate::sampling::for_each_success;

pub use extensions::{count_linear_extensions, extension_lower_bound, LinearExtensions, MAX_COMPONENT};
pub use mc::{mc_entropy, mc_entropy_steps, McSteps};
pub use series::{
    e_series, e_series_truncated, rate_hybrid, rate_hybrid_truncated, series_truncation, ESeries, NameLength,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridParams {
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
    pub alphabet: u32,
    /// Names carry the construction index.
    pub ordered: bool,
}

impl HybridParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::validation(format!("N must be at least 2, got {}", self.n)));
        }
        if self.n > u32::MAX as u64 {
            return Err(Error::Capacity(format!("N = {} exceeds 2^32 - 1", self.n)));
        }
        if !(self.alpha >= 0.0) || self.alpha > self.n as f64 {
            return Err(Error::validation(format!("alpha must lie in [0, N], got {}", self.alpha)));
        }
        if !(self.beta > 1.0) || !self.beta.is_finite() {
            return Err(Error::validation(format!("beta must be > 1, got {}", self.beta)));
        }
        if !(2..=MAX_ALPHABET).contains(&self.alphabet) {
            return Err(Error::validation(format!(
                "alphabet size must be in 2..={MAX_ALPHABET}, got {}",
                self.alphabet
            )));
        }
        Ok(())
    }

    pub fn name_len(&self) -> u32 {
        name_length(self.n, self.beta, self.alphabet)
    }
}

/// Where every letter came from, plus per-step link counts and tree flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyTrace {
    name_len: u32,
    origins: Vec<u32>,
    /// Q for each vertex: how many earlier vertices it linked to.
    pub link_counts: Vec<u32>,
    /// True when the descendant subgraph of the vertex is not a tree.
    pub non_tree: Vec<bool>,
}

impl CopyTrace {
    pub fn n(&self) -> usize {
        self.link_counts.len()
    }

    pub fn name_len(&self) -> u32 {
        self.name_len
    }

    /// C_u(v): the vertex whose original letter sits at coordinate u of v.
    pub fn origin(&self, v: usize, u: usize) -> u32 {
        self.origins[v * self.name_len as usize + u]
    }
}

/// Directed edges (a, b) meaning b must come before a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl Dag {
    pub fn new(n: usize, mut edges: Vec<(u32, u32)>) -> Result<Self> {
        for &(a, b) in &edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::validation(format!("DAG edge ({a}, {b}) out of range for N = {n}")));
            }
            if a == b {
                return Err(Error::validation(format!("DAG self-loop at {a}")));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let dag = Self { n, edges };
        dag.check_acyclic()?;
        Ok(dag)
    }

    fn check_acyclic(&self) -> Result<()> {
        let mut indeg = vec![0u32; self.n];
        let mut out: Vec<Vec<u32>> = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            out[b as usize].push(a);
            indeg[a as usize] += 1;
        }
        let mut stack: Vec<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &w in &out[v] {
                indeg[w as usize] -= 1;
                if indeg[w as usize] == 0 {
                    stack.push(w as usize);
                }
            }
        }
        if seen != self.n {
            return Err(Error::validation("cycle detected in DAG"));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }
}

/// Everything one hybrid construction produces.
#[derive(Debug, Clone)]
pub struct HybridOutput {
    pub graph: GraphWithNames,
    pub dag: Dag,
    pub trace: CopyTrace,
}

/// Runs the construction. Deterministic in `(params, seed)`.
pub fn gen_hybrid(params: &HybridParams, seed: u64) -> Result<HybridOutput> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let n = params.n as usize;
    let l = params.name_len() as usize;
    let a = params.alphabet;
    let p = params.alpha / params.n as f64;

    let mut letters = vec![0u8; n * l];
    let mut origins = vec![0u32; n * l];
    let mut link_counts = vec![0u32; n];
    let mut non_tree = vec![false; n];
    // ancestors[v]: sorted vertices whose descendant set contains v, v included
    let mut ancestors: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut parents: Vec<u32> = Vec::new();
    let mut merged: Vec<u32> = Vec::new();

    for slot in letters.iter_mut().take(l) {
        *slot = rng.random_range(0..a) as u8;
    }
    ancestors.push(vec![0]);

    for m in 1..n {
        parents.clear();
        for_each_success(&mut rng, m as u64, p, |i| parents.push(i as u32));
        let q = parents.len();
        link_counts[m] = q as u32;
        for u in 0..l {
            let pick = rng.random_range(0..=q);
            let at = m * l + u;
            if pick == 0 {
                letters[at] = rng.random_range(0..a) as u8;
                origins[at] = m as u32;
            } else {
                let src = parents[pick - 1] as usize * l + u;
                letters[at] = letters[src];
                origins[at] = origins[src];
            }
        }
        merged.clear();
        for &par in &parents {
            merged.extend_from_slice(&ancestors[par as usize]);
            edges.push((par, m as u32));
        }
        merged.sort_unstable();
        for w in merged.windows(2) {
            if w[0] == w[1] {
                non_tree[w[0] as usize] = true;
            }
        }
        merged.dedup();
        merged.push(m as u32);
        ancestors.push(merged.clone());
    }

    edges.sort_unstable();
    let dag_edges = edges.iter().map(|&(i, m)| (m, i)).collect();
    let graph = GraphWithNames::from_sorted_parts(a, l as u32, letters, edges, params.ordered);
    Ok(HybridOutput {
        graph,
        dag: Dag { n, edges: dag_edges },
        trace: CopyTrace {
            name_len: l as u32,
            origins,
            link_counts,
            non_tree,
        },
    })
}

/// Gives every vertex whose name already belongs to an earlier vertex a fresh
/// uniform name that collides with nothing. Returns the new graph and the
/// number of renamed vertices.
pub fn rename_duplicates(graph: &GraphWithNames, seed: u64) -> Result<(GraphWithNames, usize)> {
    if graph.is_ordered() {
        return Ok((graph.clone(), 0));
    }
    let n = graph.n();
    let l = graph.name_len();
    let a = graph.alphabet();
    let space = name_space(a, l);
    if space.is_some_and(|s| s < n as u64) {
        return Err(Error::validation(format!("name space {a}^{l} is smaller than N = {n}")));
    }
    let holders = graph.first_holders();
    let later: Vec<usize> = (0..n).filter(|&v| holders[v] as usize != v).collect();
    if later.is_empty() {
        return Ok((graph.clone(), 0));
    }
    let mut rng = rng_from_seed(seed);
    let mut taken: HashSet<Vec<u8>> = (0..n).map(|v| graph.name(v).to_vec()).collect();
    let mut out = graph.clone();
    let mut fresh = vec![0u8; l as usize];
    let crowded = space.filter(|&s| s <= 4 * n as u64 + 64);
    let mut free: Vec<u64> = match crowded {
        Some(s) => (0..s)
            .filter(|&x| {
                to_letters(x, a, l, &mut fresh);
                !taken.contains(&fresh)
            })
            .collect(),
        None => Vec::new(),
    };
    for &v in &later {
        if crowded.is_some() {
            let i = rng.random_range(0..free.len());
            let x = free.swap_remove(i);
            to_letters(x, a, l, &mut fresh);
        } else {
            loop {
                for slot in fresh.iter_mut() {
                    *slot = rng.random_range(0..a) as u8;
                }
                if !taken.contains(&fresh) {
                    break;
                }
            }
        }
        taken.insert(fresh.clone());
        out.name_mut(v).copy_from_slice(&fresh);
    }
    Ok((out, later.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionStats {
    /// Vertices whose letters equal those of some other vertex.
    pub duplicate_name_count: u64,
    /// Fraction of vertex pairs sharing the coordinate-0 origin.
    pub est_theta: f64,
    pub non_tree_fraction: f64,
}

/// Collision diagnostics for one construction. `est_theta` is computed over
/// all pairs rather than a sample.
pub fn collision_stats(trace: &CopyTrace, graph: &GraphWithNames) -> Result<CollisionStats> {
    if trace.n() != graph.n() || trace.name_len() != graph.name_len() {
        return Err(Error::validation("trace and graph come from different constructions"));
    }
    let n = graph.n();
    let holders = graph.first_holders();
    let mut group = vec![0u64; n];
    for &h in &holders {
        group[h as usize] += 1;
    }
    let duplicate_name_count = holders.iter().filter(|&&h| group[h as usize] > 1).count() as u64;

    let mut by_origin = vec![0u64; n];
    for v in 0..n {
        by_origin[trace.origin(v, 0) as usize] += 1;
    }
    let same: u64 = by_origin.iter().map(|&g| g * g.saturating_sub(1) / 2).sum();
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    Ok(CollisionStats {
        duplicate_name_count,
        est_theta: same as f64 / pairs as f64,
        non_tree_fraction: trace.non_tree.iter().filter(|&&b| b).count() as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u64, alpha: f64) -> HybridParams {
        HybridParams {
            n,
            alpha,
            beta: 2.0,
            alphabet: 2,
            ordered: false,
        }
    }

    #[test]
    fn no_copying_without_links() {
        let out = gen_hybrid(&params(300, 0.0), 1).unwrap();
        assert_eq!(out.graph.edge_count(), 0);
        for v in 0..300 {
            for u in 0..out.trace.name_len() as usize {
                assert_eq!(out.trace.origin(v, u), v as u32);
            }
        }
        let c = collision_stats(&out.trace, &out.graph).unwrap();
        assert_eq!(c.est_theta, 0.0);
        assert_eq!(c.non_tree_fraction, 0.0);
    }

    #[test]
    fn reproducible() {
        let a = gen_hybrid(&params(500, 1.0), 9).unwrap();
        let b = gen_hybrid(&params(500, 1.0), 9).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.dag, b.dag);
    }

    #[test]
    fn trace_invariants() {
        let out = gen_hybrid(&params(2000, 1.5), 4).unwrap();
        let l = out.trace.name_len() as usize;
        let mut from_parent = vec![0u32; 2000];
        for &(i, m) in out.graph.edges() {
            assert!(i < m);
            from_parent[m as usize] += 1;
        }
        assert_eq!(from_parent, out.trace.link_counts);
        for v in 0..2000 {
            for u in 0..l {
                let o = out.trace.origin(v, u) as usize;
                assert!(o <= v);
                assert_eq!(out.graph.name(v)[u], out.graph.name(o)[u]);
            }
        }
        assert!(out.dag.edges().iter().all(|&(a, b)| a > b));
    }

    #[test]
    fn tree_flag_marks_a_diamond() {
        // brute-force check against descendant sets built from the edge list
        let out = gen_hybrid(&params(400, 3.0), 2).unwrap();
        let n = 400;
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, m) in out.graph.edges() {
            children[i as usize].push(m as usize);
        }
        for v in 0..n {
            let mut inside = vec![false; n];
            inside[v] = true;
            let mut edges_inside = 0usize;
            let mut count = 1usize;
            for w in v + 1..n {
                let links = out
                    .graph
                    .edges()
                    .iter()
                    .filter(|&&(i, m)| m as usize == w && inside[i as usize])
                    .count();
                if links > 0 {
                    inside[w] = true;
                    count += 1;
                    edges_inside += links;
                }
            }
            assert_eq!(out.trace.non_tree[v], edges_inside != count - 1, "vertex {v}");
        }
    }

    #[test]
    fn rename_keeps_earliest_holder() {
        let g = GraphWithNames::new(2, 3, vec![0, 0, 1, 0, 1, 1, 0, 0, 1], vec![(0, 2)], false).unwrap();
        let (r, count) = rename_duplicates(&g, 5).unwrap();
        assert_eq!(count, 1);
        assert_eq!(r.name(0), g.name(0));
        assert_eq!(r.name(1), g.name(1));
        assert_ne!(r.name(2), g.name(0));
        assert!(r.names_distinct());
        assert_eq!(r.edges(), g.edges());

        let (same, zero) = rename_duplicates(&r, 5).unwrap();
        assert_eq!(zero, 0);
        assert_eq!(same, r);
    }

    #[test]
    fn rename_in_a_crowded_space() {
        // 4 names in a space of 4: the renamed vertex must take the last free name
        let g = GraphWithNames::new(2, 2, vec![0, 0, 0, 1, 1, 0, 0, 0], vec![], false).unwrap();
        let (r, count) = rename_duplicates(&g, 1).unwrap();
        assert_eq!(count, 1);
        assert_eq!(r.name(3), &[1, 1]);
        let full = GraphWithNames::new(2, 1, vec![0, 1, 1], vec![], false).unwrap();
        assert!(rename_duplicates(&full, 1).is_err());
    }

    #[test]
    fn dag_rejects_cycles() {
        assert!(Dag::new(3, vec![(1, 0), (2, 1), (0, 2)]).is_err());
        assert!(Dag::new(3, vec![(1, 0), (2, 1)]).is_ok());
        assert!(Dag::new(2, vec![(2, 0)]).is_err());
    }

    #[test]
    fn collision_stats_mismatch() {
        let a = gen_hybrid(&params(100, 1.0), 1).unwrap();
        let b = gen_hybrid(&params(120, 1.0), 1).unwrap();
        assert!(collision_stats(&a.trace, &b.graph).is_err());
    }
}
