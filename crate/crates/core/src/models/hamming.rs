//! Random names with edges allowed only between names at Hamming distance at
//! most M_N, each allowed edge present with probability α/μ_N.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::bern;
use crate::error::{Error, Result};
use crate::graph::{name_length, GraphWithNames};
use crate::numeric::{ln_choose_f64, log_sum_exp};
use crate::sampling::{for_each_success, pair_from_index};

use super::{name_set_entropy, random_names};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HammingMu {
    pub mu: f64,
    /// ln μ / ln N
    pub log_ratio: f64,
}

/// M_N = round(d·L), clamped to [1, L−1].
pub fn hamming_max_distance(l: u32, d: f64) -> u32 {
    ((d * l as f64).round() as u32).clamp(1, l.saturating_sub(1).max(1))
}

/// μ_N = (N−1)/(1−A^{−L}) · P(1 ≤ Bin(L, 1−1/A) ≤ M).
pub fn hamming_mu(n: u64, alphabet: u32, l: u32, m: u32) -> Result<HammingMu> {
    if m < 1 || m > l {
        return Err(Error::validation(format!("need 1 <= M <= L, got M = {m}, L = {l}")));
    }
    if alphabet < 2 || n < 2 {
        return Err(Error::validation("hamming_mu needs A >= 2 and N >= 2"));
    }
    let ln_a = (alphabet as f64).ln();
    let ln_q = (-1.0 / alphabet as f64).ln_1p();
    let terms: Vec<f64> = (1..=m)
        .map(|j| ln_choose_f64(l as f64, j as f64) + j as f64 * ln_q - (l - j) as f64 * ln_a)
        .collect();
    let ln_tail = log_sum_exp(&terms);
    let ln_norm = (-(-(l as f64) * ln_a).exp_m1()).ln();
    let ln_mu = ((n - 1) as f64).ln() - ln_norm + ln_tail;
    Ok(HammingMu {
        mu: ln_mu.exp(),
        log_ratio: ln_mu / (n as f64).ln(),
    })
}

fn mu_for(n: u64, alpha: f64, beta: f64, alphabet: u32, d: f64) -> Result<(u32, u32, f64)> {
    let l = name_length(n, beta, alphabet);
    let m = hamming_max_distance(l, d);
    let mu = hamming_mu(n, alphabet, l, m)?.mu;
    if mu < alpha {
        return Err(Error::model(format!("mu_N = {mu} is below alpha = {alpha}")));
    }
    Ok((l, m, mu))
}

pub(super) fn entropy(n: u64, alpha: f64, beta: f64, alphabet: u32, d: f64) -> Result<f64> {
    let (l, _, mu) = mu_for(n, alpha, beta, alphabet, d)?;
    Ok(name_set_entropy(n, alphabet, l) + n as f64 / 2.0 * mu * bern(alpha / mu))
}

pub(super) fn generate<R: Rng + ?Sized>(
    rng: &mut R,
    n: u64,
    alpha: f64,
    beta: f64,
    alphabet: u32,
    d: f64,
) -> Result<GraphWithNames> {
    let (l, m, mu) = mu_for(n, alpha, beta, alphabet, d)?;
    let letters = random_names(rng, n, alphabet, l)?;
    let lu = l as usize;
    let dist = |u: usize, v: usize| {
        letters[u * lu..(u + 1) * lu]
            .iter()
            .zip(&letters[v * lu..(v + 1) * lu])
            .filter(|(a, b)| a != b)
            .count() as u32
    };
    // thin an all-pairs Bernoulli(α/μ) stream down to the allowed pairs
    let mut edges = Vec::new();
    let pairs = n * (n - 1) / 2;
    for_each_success(rng, pairs, alpha / mu, |t| {
        let (u, v) = pair_from_index(t);
        let h = dist(u as usize, v as usize);
        if (1..=m).contains(&h) {
            edges.push((u as u32, v as u32));
        }
    });
    edges.sort_unstable();
    Ok(GraphWithNames::from_sorted_parts(alphabet, l, letters, edges, false))
}
