//! Counting vertex orderings consistent with a DAG.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ln_factorial;

use super::Dag;

/// Largest weakly connected component the subset dynamic program accepts.
pub const MAX_COMPONENT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearExtensions {
    /// Natural log of the count.
    pub log_count: f64,
    /// The count itself when it fits in 128 bits.
    pub exact: Option<u128>,
}

fn components(dag: &Dag) -> Vec<Vec<usize>> {
    let n = dag.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in dag.edges() {
        let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

/// Orderings of one component, by dynamic programming over downsets taken one
/// size layer at a time.
fn count_component(vertices: &[usize], dag: &Dag) -> u128 {
    let c = vertices.len();
    if c <= 1 {
        return 1;
    }
    let mut local = vec![usize::MAX; dag.n()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v] = i;
    }
    let mut before = vec![0u32; c];
    for &(a, b) in dag.edges() {
        let (la, lb) = (local[a as usize], local[b as usize]);
        if la != usize::MAX {
            before[la] |= 1 << lb;
        }
    }
    let mut layer: HashMap<u32, u128> = HashMap::from([(0, 1)]);
    for _ in 0..c {
        let mut next: HashMap<u32, u128> = HashMap::with_capacity(layer.len() * 2);
        for (&mask, &count) in &layer {
            for (v, &need) in before.iter().enumerate() {
                let bit = 1u32 << v;
                if mask & bit == 0 && need & !mask == 0 {
                    *next.entry(mask | bit).or_insert(0) += count;
                }
            }
        }
        layer = next;
    }
    layer.into_values().next().unwrap_or(0)
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for j in 0..k {
        r = r.checked_mul(n - j)? / (j + 1);
    }
    Some(r)
}

/// Number of linear extensions M of the DAG. Components are counted
/// separately and combined with the multinomial interleaving factor.
pub fn count_linear_extensions(dag: &Dag) -> Result<LinearExtensions> {
    let comps = components(dag);
    if let Some(big) = comps.iter().find(|c| c.len() > MAX_COMPONENT) {
        return Err(Error::Capacity(format!(
            "connected component of {} vertices exceeds {MAX_COMPONENT}; use the lower bound instead",
            big.len()
        )));
    }
    let mut log_count = ln_factorial(dag.n() as u64);
    let mut exact = Some(1u128);
    let mut placed: u128 = 0;
    for comp in &comps {
        let m = count_component(comp, dag);
        let size = comp.len() as u128;
        log_count += (m as f64).ln() - ln_factorial(size as u64);
        exact = exact
            .and_then(|e| e.checked_mul(binomial_u128(placed + size, size)?))
            .and_then(|e| e.checked_mul(m));
        placed += size;
    }
    if let Some(e) = exact {
        log_count = (e as f64).ln();
    }
    Ok(LinearExtensions { log_count, exact })
}

/// K·ln(⌊N/K − 2αN/K²⌋!), the interval-partition lower bound on E ln M.
pub fn extension_lower_bound(n: u64, alpha: f64, k: u64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::validation(format!("K must lie in 1..=N, got {k}")));
    }
    if !(alpha >= 0.0) {
        return Err(Error::validation(format!("alpha must be >= 0, got {alpha}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let x = (nf / kf - 2.0 * alpha * nf / (kf * kf)).floor().max(0.0);
    Ok(kf * ln_factorial(x as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybrid::{gen_hybrid, HybridParams};
    use proptest::prelude::*;

    fn brute(dag: &Dag) -> u128 {
        fn rec(dag: &Dag, used: &mut Vec<bool>, placed: usize) -> u128 {
            let n = dag.n();
            if placed == n {
                return 1;
            }
            let mut total = 0;
            for v in 0..n {
                if used[v] {
                    continue;
                }
                let ready = dag.edges().iter().all(|&(a, b)| a as usize != v || used[b as usize]);
                if ready {
                    used[v] = true;
                    total += rec(dag, used, placed + 1);
                    used[v] = false;
                }
            }
            total
        }
        rec(dag, &mut vec![false; dag.n()], 0)
    }

    #[test]
    fn small_examples() {
        let empty = Dag::new(3, vec![]).unwrap();
        assert_eq!(count_linear_extensions(&empty).unwrap().exact, Some(6));
        let chain = Dag::new(3, vec![(2, 1), (1, 0)]).unwrap();
        assert_eq!(count_linear_extensions(&chain).unwrap().exact, Some(1));
        let fork = Dag::new(3, vec![(2, 0), (2, 1)]).unwrap();
        assert_eq!(count_linear_extensions(&fork).unwrap().exact, Some(2));
        assert_eq!(brute(&fork), 2);
    }

    #[test]
    fn matches_brute_force_on_hybrid_dags() {
        for seed in 0..40 {
            let p = HybridParams { n: 8, alpha: 3.0, beta: 2.0, alphabet: 2, ordered: true };
            let dag = gen_hybrid(&p, seed).unwrap().dag;
            let c = count_linear_extensions(&dag).unwrap();
            assert_eq!(c.exact, Some(brute(&dag)));
        }
    }

    #[test]
    fn capacity_limit() {
        let chain = Dag::new(25, (1..25u32).map(|i| (i, i - 1)).collect()).unwrap();
        assert!(matches!(count_linear_extensions(&chain), Err(Error::Capacity(_))));
        // many small components are fine even past 24 vertices
        let pairs = Dag::new(40, (0..20u32).map(|i| (2 * i + 1, 2 * i)).collect()).unwrap();
        let c = count_linear_extensions(&pairs).unwrap();
        let expect = ln_factorial(40) - 20.0 * 2f64.ln();
        assert!((c.log_count - expect).abs() < 1e-9);
        // 40!/2^20 is about 7.8e41, past 2^128
        assert!(c.exact.is_none());
    }

    #[test]
    fn lower_bound_values() {
        assert!((extension_lower_bound(12, 0.0, 3).unwrap() - 3.0 * 24f64.ln()).abs() < 1e-12);
        assert_eq!(extension_lower_bound(10, 5.0, 2).unwrap(), 0.0);
        assert!(extension_lower_bound(10, 1.0, 0).is_err());
    }

    fn random_dag(n: usize, bits: &[bool]) -> Dag {
        let mut edges = Vec::new();
        let mut it = bits.iter();
        for a in 0..n {
            for b in 0..a {
                if *it.next().unwrap_or(&false) {
                    edges.push((a as u32, b as u32));
                }
            }
        }
        Dag::new(n, edges).unwrap()
    }

    proptest! {
        #[test]
        fn disjoint_union_is_multiplicative(
            n1 in 1usize..6, n2 in 1usize..6,
            b1 in prop::collection::vec(any::<bool>(), 15),
            b2 in prop::collection::vec(any::<bool>(), 15),
        ) {
            let g1 = random_dag(n1, &b1);
            let g2 = random_dag(n2, &b2);
            let shifted: Vec<(u32, u32)> = g2.edges().iter().map(|&(a, b)| (a + n1 as u32, b + n1 as u32)).collect();
            let mut all = g1.edges().to_vec();
            all.extend(shifted);
            let union = Dag::new(n1 + n2, all).unwrap();
            let m1 = count_linear_extensions(&g1).unwrap().exact.unwrap();
            let m2 = count_linear_extensions(&g2).unwrap().exact.unwrap();
            let mu = count_linear_extensions(&union).unwrap().exact.unwrap();
            let binom = binomial_u128((n1 + n2) as u128, n1 as u128).unwrap();
            prop_assert_eq!(mu, binom * m1 * m2);
            prop_assert_eq!(mu, brute(&union));
        }

        #[test]
        fn log_count_at_most_log_factorial(n in 1usize..10, bits in prop::collection::vec(any::<bool>(), 45)) {
            let g = random_dag(n, &bits);
            let c = count_linear_extensions(&g).unwrap();
            let full = ln_factorial(n as u64);
            prop_assert!(c.log_count <= full + 1e-9);
            if g.edges().is_empty() {
                prop_assert!((c.log_count - full).abs() < 1e-9);
            } else {
                prop_assert!(c.log_count < full - 1e-9);
            }
        }
    }
}
