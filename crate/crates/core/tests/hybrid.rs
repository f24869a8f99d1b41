use gne::entropy::RateConstants;
use gne::hybrid::{
    collision_stats, e_series, gen_hybrid, mc_entropy, mc_entropy_steps, rename_duplicates, HybridParams, NameLength,
};

fn params(n: u64, alpha: f64, a: u32, ordered: bool) -> HybridParams {
    HybridParams { n, alpha, beta: 2.0, alphabet: a, ordered }
}

fn consts(p: &HybridParams) -> RateConstants {
    RateConstants { alpha: Some(p.alpha), beta: Some(p.beta), alphabet: Some(p.alphabet), gamma: None, d: None }
}

#[test]
fn letters_are_marginally_uniform() {
    // vertex 150, coordinate 3, over 4000 seeds; each letter count within
    // 3 binomial standard deviations of its mean
    let p = params(200, 3.0, 3, true);
    let seeds = 4000;
    let mut counts = [0u32; 3];
    for seed in 0..seeds {
        let g = gen_hybrid(&p, seed).unwrap().graph;
        counts[g.name(150)[3] as usize] += 1;
    }
    let mean = seeds as f64 / 3.0;
    let sd = (seeds as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
    for c in counts {
        assert!((c as f64 - mean).abs() < 3.0 * sd, "{counts:?}");
    }
}

#[test]
fn link_counts_follow_the_binomial_law() {
    let n = 10_000u64;
    let p = params(n, 1.0, 2, true);
    let trace = gen_hybrid(&p, 3).unwrap().trace;
    let q = 1.0 / n as f64;
    let mut observed = 0.0;
    let mut expected = 0.0;
    let mut var = 0.0;
    for m in 1..n as usize {
        let prob = 1.0 - (1.0 - q).powi(m as i32);
        observed += (trace.link_counts[m] >= 1) as u8 as f64;
        expected += prob;
        var += prob * (1.0 - prob);
    }
    assert!((observed - expected).abs() < 3.0 * var.sqrt(), "{observed} vs {expected}");
    // copied coordinates only occur at steps with links
    let copied = (1..n as usize)
        .filter(|&m| (0..trace.name_len() as usize).any(|u| trace.origin(m, u) < m as u32))
        .count();
    assert!(copied as f64 <= observed);
}

#[test]
fn renamed_fraction_is_small() {
    let n = 5000;
    let mut total = 0usize;
    for seed in 0..50 {
        let g = gen_hybrid(&params(n, 1.0, 2, false), seed).unwrap().graph;
        let (renamed, count) = rename_duplicates(&g, seed).unwrap();
        assert!(renamed.names_distinct());
        total += count;
    }
    let mean_fraction = total as f64 / (50.0 * n as f64);
    assert!(mean_fraction < 0.01, "{mean_fraction}");
}

#[test]
fn collision_rates_scale_like_one_over_n() {
    let mut scaled_theta = Vec::new();
    let mut scaled_tree = Vec::new();
    for n in [1_000u64, 10_000] {
        let seeds = 30;
        let (mut theta, mut tree) = (0.0, 0.0);
        for seed in 0..seeds {
            let out = gen_hybrid(&params(n, 1.0, 2, true), seed).unwrap();
            let s = collision_stats(&out.trace, &out.graph).unwrap();
            theta += s.est_theta;
            tree += s.non_tree_fraction;
        }
        scaled_theta.push(n as f64 * theta / seeds as f64);
        scaled_tree.push(n as f64 * tree / seeds as f64);
    }
    // bounded by a constant: the tenfold larger N must not inflate N·x by more than a small factor
    assert!(scaled_theta[1] < 3.0 * scaled_theta[0].max(1.0), "{scaled_theta:?}");
    let bound = (1f64.exp()).powi(3) / 2.0 * 10.0;
    assert!(scaled_tree.iter().all(|&x| x < bound), "{scaled_tree:?}");
}

#[test]
fn zero_alpha_series_equals_monte_carlo() {
    let p = params(400, 0.0, 3, true);
    let mc = mc_entropy(&p, 4, 0).unwrap();
    let s = e_series(400, &consts(&p), NameLength::Realized).unwrap();
    assert_eq!(mc.stderr, Some(0.0));
    assert!((mc.nats - s.total).abs() <= 1e-9 * s.total, "{} vs {}", mc.nats, s.total);
}

#[test]
fn doubling_link_samples_halves_variance() {
    let p = params(2000, 1.0, 2, true);
    let v8: f64 = mc_entropy_steps(&p, 8, 5).unwrap().step_mean_vars.iter().sum();
    let v16: f64 = mc_entropy_steps(&p, 16, 5).unwrap().step_mean_vars.iter().sum();
    let ratio = v8 / v16;
    assert!((1.6..2.5).contains(&ratio), "{ratio}");
}

#[test]
fn mc_agrees_with_series_across_seeds() {
    let p = params(2000, 1.0, 2, true);
    let series = e_series(2000, &consts(&p), NameLength::Realized).unwrap().total;
    let reports: Vec<_> = (0..10).map(|s| mc_entropy(&p, 32, 100 + s).unwrap()).collect();
    let mean = reports.iter().map(|r| r.nats).sum::<f64>() / 10.0;
    let se = reports.iter().map(|r| r.stderr.unwrap().powi(2)).sum::<f64>().sqrt() / 10.0;
    assert!((mean - series).abs() < 3.0 * se + 1e-3 * series, "{mean} +- {se} vs {series}");
}
