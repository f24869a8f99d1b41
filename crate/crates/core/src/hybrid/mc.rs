//! Chain-rule Monte Carlo estimate of the ordered hybrid entropy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{bern, mixture_entropy};
use crate::error::{Error, Result};
use crate::models::EntropyReport;
use crate::numeric::{derive_seed, rng_from_seed, NeumaierSum};
use crate::sampling::for_each_success;

use super::{gen_hybrid, HybridParams};

/// Per-step name-term sample means and variances of the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSteps {
    pub step_means: Vec<f64>,
    /// Estimated variance of each step mean.
    pub step_mean_vars: Vec<f64>,
    pub name_total: f64,
    pub edge_total: f64,
    pub report: EntropyReport,
}

/// Runs one trajectory with `seed`, then for every step averages the exact
/// letter entropy over `link_samples` fresh link sets drawn from a separate
/// stream. Steps are independent given the trajectory, so they run in
/// parallel with per-step seeds.
pub fn mc_entropy_steps(params: &HybridParams, link_samples: u32, seed: u64) -> Result<McSteps> {
    if link_samples == 0 {
        return Err(Error::validation("link_samples must be at least 1"));
    }
    let out = gen_hybrid(params, seed)?;
    let g = &out.graph;
    let n = g.n();
    let l = g.name_len() as usize;
    let a = g.alphabet() as usize;
    let ln_a = (a as f64).ln();
    let full = l as f64 * ln_a;
    let p = params.alpha / params.n as f64;
    let link_root = derive_seed(seed, 1);
    let r = link_samples as usize;

    let steps: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|m| {
            if m == 0 {
                return (full, 0.0);
            }
            let mut rng = rng_from_seed(derive_seed(link_root, m as u64));
            let mut parents: Vec<u32> = Vec::new();
            let mut counts = vec![0u32; a];
            let mut sum = NeumaierSum::new();
            let mut sq = NeumaierSum::new();
            for _ in 0..r {
                parents.clear();
                for_each_success(&mut rng, m as u64, p, |i| parents.push(i as u32));
                let x = if parents.is_empty() {
                    full
                } else {
                    (0..l)
                        .map(|u| {
                            counts.iter_mut().for_each(|c| *c = 0);
                            for &par in &parents {
                                counts[g.name(par as usize)[u] as usize] += 1;
                            }
                            mixture_entropy(a, &counts)
                        })
                        .sum()
                };
                sum.add(x);
                sq.add(x * x);
            }
            let mean = sum.value() / r as f64;
            let var_mean = if p == 0.0 {
                0.0
            } else if r == 1 {
                // Popoviciu: a variable in [0, L ln A] has variance at most (L ln A)²/4
                full * full / 4.0
            } else {
                ((sq.value() - r as f64 * mean * mean) / (r as f64 - 1.0)).max(0.0) / r as f64
            };
            (mean, var_mean)
        })
        .collect();

    let (step_means, step_mean_vars): (Vec<f64>, Vec<f64>) = steps.into_iter().unzip();
    let name_total = step_means.iter().copied().collect::<NeumaierSum>().value();
    let nf = n as f64;
    let edge_total = nf * (nf - 1.0) / 2.0 * bern(p);
    let stderr = step_mean_vars.iter().copied().collect::<NeumaierSum>().value().sqrt();
    Ok(McSteps {
        report: EntropyReport::monte_carlo(name_total + edge_total, stderr, params.n),
        step_means,
        step_mean_vars,
        name_total,
        edge_total,
    })
}

/// Estimate of the ordered-model entropy with its standard error.
pub fn mc_entropy(params: &HybridParams, link_samples: u32, seed: u64) -> Result<EntropyReport> {
    Ok(mc_entropy_steps(params, link_samples, seed)?.report)
}
