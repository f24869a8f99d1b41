use std::collections::VecDeque;

use gne::io::{read_gnv, write_gnv};
use gne::models::{exact_entropy, generate, ModelParams};
use gne::sweep::{run_sweep, SweepModel, SweepSpec};
use gne::GraphWithNames;

fn all_models() -> Vec<ModelParams> {
    vec![
        ModelParams::ErBinary { n: 500, alpha: 2.0 },
        ModelParams::ErNamed { n: 500, alpha: 1.0, beta: 2.0, alphabet: 3 },
        ModelParams::SmallWorld { side: 15, alpha: 1.0, gamma: 2.0 },
        ModelParams::Hamming { n: 500, alpha: 1.0, beta: 2.0, alphabet: 2, d: 0.25 },
        ModelParams::TreeSequential { n: 500 },
        ModelParams::TreeUniform { n: 500 },
    ]
}

#[test]
fn gnv_round_trip_for_every_generator() {
    for p in all_models() {
        for seed in 0..5 {
            let g = generate(&p, seed).unwrap();
            let mut text = Vec::new();
            write_gnv(&mut text, &g).unwrap();
            let back = read_gnv(text.as_slice()).unwrap();
            assert_eq!(back, g, "{p:?}");
            let mut again = Vec::new();
            write_gnv(&mut again, &back).unwrap();
            assert_eq!(again, text);
        }
    }
}

fn connected(g: &GraphWithNames) -> bool {
    let mut adj = vec![Vec::new(); g.n()];
    for &(u, v) in g.edges() {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    let mut seen = vec![false; g.n()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen.iter().all(|&s| s)
}

#[test]
fn trees_are_spanning() {
    for seed in 0..20 {
        for p in [ModelParams::TreeSequential { n: 300 }, ModelParams::TreeUniform { n: 300 }] {
            let g = generate(&p, seed).unwrap();
            assert_eq!(g.edge_count(), 299);
            assert!(connected(&g));
        }
    }
}

#[test]
fn er_edge_density_matches_alpha() {
    let n = 20_000u64;
    let g = generate(&ModelParams::ErBinary { n, alpha: 3.0 }, 11).unwrap();
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    let p = 3.0 / n as f64;
    let sd = (pairs * p * (1.0 - p)).sqrt();
    assert!((g.edge_count() as f64 - pairs * p).abs() < 4.0 * sd);
}

fn sweep(params: ModelParams, sizes: Vec<u64>) -> Vec<f64> {
    let spec = SweepSpec { model: SweepModel::Exact { params }, sizes, seeds: 1, root_seed: 0 };
    run_sweep(&spec).unwrap().iter().map(|r| r.normalized_rate).collect()
}

#[test]
fn er_binary_sweep_has_the_exact_finite_n_correction() {
    // C(N,2)ℰ(α/N)/(N ln N) = (α/2)(1 + (1 − ln α)/ln N)(1 − 1/N) + O(1/(N ln N))
    let sizes = vec![1_000u64, 10_000, 100_000];
    let vals = sweep(ModelParams::ErBinary { n: 0, alpha: 2.0 }, sizes.clone());
    for (v, n) in vals.iter().zip(&sizes) {
        let nf = *n as f64;
        let lead = 1.0 + (1.0 - 2f64.ln()) / nf.ln();
        assert!((v - lead * (1.0 - 1.0 / nf)).abs() < 1.0 / (nf * nf.ln()), "N={n}: {v}");
    }
}

#[test]
fn tree_uniform_sweep_is_exact() {
    let sizes = vec![5u64, 50, 500, 5000];
    let vals = sweep(ModelParams::TreeUniform { n: 0 }, sizes.clone());
    for (v, n) in vals.iter().zip(&sizes) {
        assert_eq!(*v, (*n as f64 - 2.0) / *n as f64);
    }
}

#[test]
fn small_world_gamma_three_sweep_decreases() {
    let vals = sweep(ModelParams::SmallWorld { side: 0, alpha: 1.0, gamma: 3.0 }, vec![101, 301, 501]);
    assert!(vals.windows(2).all(|w| w[1] < w[0]), "{vals:?}");
}

#[test]
fn sweep_rows_are_consistent() {
    let spec = SweepSpec {
        model: SweepModel::Exact { params: ModelParams::Hamming { n: 0, alpha: 1.0, beta: 2.0, alphabet: 2, d: 0.25 } },
        sizes: vec![200, 2000],
        seeds: 3,
        root_seed: 42,
    };
    for row in run_sweep(&spec).unwrap() {
        let nf = row.n as f64;
        assert!((row.normalized_rate - row.entropy_nats / (nf * nf.ln())).abs() < 1e-12);
        assert_eq!(row.root_seed, 42);
        assert!(row.stderr.is_none());
    }
}

#[test]
fn exact_entropy_is_nonnegative_and_below_the_trivial_bound() {
    // a graph on N named vertices carries at most C(N,2) ln 2 nats of edge information
    // plus N·L·ln A of names
    for p in all_models() {
        let e = exact_entropy(&p).unwrap();
        let n = p.vertex_count() as f64;
        let names = n * p.name_len() as f64 * 62f64.ln();
        assert!(e.nats >= 0.0);
        assert!(e.nats <= n * (n - 1.0) / 2.0 * 2f64.ln() + names, "{p:?}");
    }
}
