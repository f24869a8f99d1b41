//! Structural statistics used to check the zero-rate regimes: edge lengths
//! under a per-vertex ordering, and name similarity across edges.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphWithNames;

/// A per-vertex ranking j(i, 1), j(i, 2), … of the other vertices.
pub trait VertexOrdering {
    fn vertex_count(&self) -> usize;

    /// The ℓ ≥ 1 with j = j(i, ℓ).
    fn length(&self, i: usize, j: usize) -> Result<u64>;
}

/// Torus vertices ranked by Euclidean distance of the minimal offset, ties
/// broken by (Δi, Δj).
#[derive(Debug, Clone)]
pub struct TorusOrdering {
    side: usize,
    rank: Vec<u64>,
}

impl TorusOrdering {
    pub fn new(side: usize) -> Result<Self> {
        if side < 3 || side % 2 == 0 {
            return Err(Error::validation(format!("torus side must be odd and >= 3, got {side}")));
        }
        let h = (side / 2) as i64;
        let mut offsets: Vec<(i64, i64)> = (-h..=h)
            .flat_map(|di| (-h..=h).map(move |dj| (di, dj)))
            .filter(|&o| o != (0, 0))
            .collect();
        offsets.sort_by_key(|&(di, dj)| (di * di + dj * dj, di, dj));
        let mut rank = vec![0u64; side * side];
        for (r, (di, dj)) in offsets.into_iter().enumerate() {
            rank[Self::slot(side, di, dj)] = r as u64 + 1;
        }
        Ok(Self { side, rank })
    }

    fn slot(side: usize, di: i64, dj: i64) -> usize {
        let h = (side / 2) as i64;
        ((di + h) as usize) * side + (dj + h) as usize
    }

    /// Minimal signed torus offset from vertex i to vertex j.
    pub fn offset(&self, i: usize, j: usize) -> (i64, i64) {
        let n = self.side as i64;
        let h = n / 2;
        let wrap = |d: i64| {
            let d = d.rem_euclid(n);
            if d > h {
                d - n
            } else {
                d
            }
        };
        let (ai, aj) = ((i / self.side) as i64, (i % self.side) as i64);
        let (bi, bj) = ((j / self.side) as i64, (j % self.side) as i64);
        (wrap(bi - ai), wrap(bj - aj))
    }

    /// Euclidean torus distance between two vertices.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (di, dj) = self.offset(i, j);
        ((di * di + dj * dj) as f64).sqrt()
    }
}

impl VertexOrdering for TorusOrdering {
    fn vertex_count(&self) -> usize {
        self.side * self.side
    }

    fn length(&self, i: usize, j: usize) -> Result<u64> {
        let n = self.vertex_count();
        if i >= n || j >= n || i == j {
            return Err(Error::validation(format!("pair ({i}, {j}) invalid for {n} vertices")));
        }
        let (di, dj) = self.offset(i, j);
        Ok(self.rank[Self::slot(self.side, di, dj)])
    }
}

/// j(i, ℓ) = i + ℓ mod N.
#[derive(Debug, Clone, Copy)]
pub struct IndexOffsetOrdering {
    pub n: usize,
}

impl VertexOrdering for IndexOffsetOrdering {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn length(&self, i: usize, j: usize) -> Result<u64> {
        if i >= self.n || j >= self.n || i == j {
            return Err(Error::validation(format!("pair ({i}, {j}) invalid for {} vertices", self.n)));
        }
        Ok(((j + self.n - i) % self.n) as u64)
    }
}

/// Caller-supplied rankings: `rows[i]` lists the other vertices in order.
#[derive(Debug, Clone)]
pub struct ExplicitOrdering {
    position: Vec<Vec<u32>>,
}

impl ExplicitOrdering {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len();
        let mut position = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() + 1 != n {
                return Err(Error::validation(format!("ordering row {i} has {} entries, need {}", row.len(), n - 1)));
            }
            let mut pos = vec![u32::MAX; n];
            for (l, &j) in row.iter().enumerate() {
                let j = j as usize;
                if j >= n || j == i || pos[j] != u32::MAX {
                    return Err(Error::validation(format!("ordering row {i} is not a permutation of the other vertices")));
                }
                pos[j] = l as u32 + 1;
            }
            position.push(pos);
        }
        Ok(Self { position })
    }
}

impl VertexOrdering for ExplicitOrdering {
    fn vertex_count(&self) -> usize {
        self.position.len()
    }

    fn length(&self, i: usize, j: usize) -> Result<u64> {
        let n = self.position.len();
        if i >= n || j >= n || i == j {
            return Err(Error::validation(format!("pair ({i}, {j}) invalid for {n} vertices")));
        }
        Ok(self.position[i][j] as u64)
    }
}

/// Lengths of all edges (i, j), i < j, in edge order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeLengthStats {
    pub lengths: Vec<u64>,
}

impl EdgeLengthStats {
    pub fn histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for &l in &self.lengths {
            *h.entry(l).or_insert(0) += 1;
        }
        h
    }

    /// Fraction of edges with length strictly above `m`; 0 for an edgeless graph.
    pub fn fraction_longer_than(&self, m: f64) -> f64 {
        if self.lengths.is_empty() {
            return 0.0;
        }
        self.lengths.iter().filter(|&&l| l as f64 > m).count() as f64 / self.lengths.len() as f64
    }

    pub fn median(&self) -> Option<u64> {
        let mut v = self.lengths.clone();
        v.sort_unstable();
        v.get(v.len() / 2).copied().filter(|_| !v.is_empty())
    }
}

pub fn edge_length_stats(graph: &GraphWithNames, ordering: &dyn VertexOrdering) -> Result<EdgeLengthStats> {
    if ordering.vertex_count() != graph.n() {
        return Err(Error::validation(format!(
            "ordering covers {} vertices, graph has {}",
            ordering.vertex_count(),
            graph.n()
        )));
    }
    let lengths = graph
        .edges()
        .iter()
        .map(|&(u, v)| ordering.length(u as usize, v as usize))
        .collect::<Result<_>>()?;
    Ok(EdgeLengthStats { lengths })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NameSimilarity {
    pub total_edge_hamming: u64,
    /// 0 for an edgeless graph
    pub per_edge_mean: f64,
    /// total / (N ln N)
    pub normalized: f64,
}

/// Hamming distances between the letter parts of adjacent names.
pub fn name_similarity_stats(graph: &GraphWithNames) -> NameSimilarity {
    let total: u64 = graph
        .edges()
        .iter()
        .map(|&(u, v)| graph.hamming(u as usize, v as usize) as u64)
        .sum();
    let e = graph.edge_count();
    let n = graph.n() as f64;
    NameSimilarity {
        total_edge_hamming: total,
        per_edge_mean: if e == 0 { 0.0 } else { total as f64 / e as f64 },
        normalized: total as f64 / (n * n.ln()),
    }
}
