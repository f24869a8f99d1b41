//! Entropy functionals and the special constants used by the rate formulas.
//!
//! Everything is in nats. Callers convert with [`NATS_PER_BIT`] at the edges.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{self, integrate, ln_choose_f64, ln_factorial, xlogx, NeumaierSum};

pub const NATS_PER_BIT: f64 = LN_2;

/// Quadrature tolerance for κ_γ and the J_k cross-check.
pub const QUAD_TOL: f64 = 1e-12;

fn sum_tolerance(len: usize) -> f64 {
    1e-12_f64.max(4.0 * f64::EPSILON * len as f64)
}

/// A finite probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::validation("distribution has no outcomes"));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::validation(format!("negative or non-finite probability {p}")));
        }
        let total = numeric::compensated_sum(probs.iter().copied());
        if (total - 1.0).abs() > sum_tolerance(probs.len()) {
            return Err(Error::validation(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Joint law of (X, Y) laid out with one row per value of the conditioning
/// variable: `probs[y][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    probs: Vec<Vec<f64>>,
    cols: usize,
}

impl JointDistribution {
    pub fn new(probs: Vec<Vec<f64>>) -> Result<Self> {
        let cols = probs.first().map_or(0, Vec::len);
        if probs.is_empty() || cols == 0 {
            return Err(Error::validation("joint distribution is empty"));
        }
        if probs.iter().any(|r| r.len() != cols) {
            return Err(Error::validation("joint distribution rows have unequal lengths"));
        }
        let flat: Vec<f64> = probs.iter().flatten().copied().collect();
        Distribution::new(flat)?;
        Ok(Self { probs, cols })
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|x| numeric::compensated_sum(self.probs.iter().map(|r| r[x])))
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        self.probs
            .iter()
            .map(|r| numeric::compensated_sum(r.iter().copied()))
            .collect()
    }

    /// Entropy of the pair (X, Y).
    pub fn joint_entropy(&self) -> f64 {
        entropy_of(self.probs.iter().flatten().copied())
    }
}

fn entropy_of<I: IntoIterator<Item = f64>>(probs: I) -> f64 {
    -numeric::compensated_sum(probs.into_iter().map(xlogx))
}

/// −Σ p ln p with 0·ln 0 = 0.
pub fn ent(dist: &Distribution) -> f64 {
    entropy_of(dist.probs.iter().copied())
}

/// Returns `(ent(X), E ent(X | Y))`.
pub fn conditional_entropy(joint: &JointDistribution) -> (f64, f64) {
    let ent_x = entropy_of(joint.marginal_x());
    let mut acc = NeumaierSum::new();
    for (row, q) in joint.probs.iter().zip(joint.marginal_y()) {
        if q > 0.0 {
            acc.add(q * entropy_of(row.iter().map(|p| p / q)));
        }
    }
    (ent_x, acc.value())
}

/// Bernoulli entropy without argument checks, for hot loops.
#[inline]
pub(crate) fn bern(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.ln() - (1.0 - p) * (-p).ln_1p()
    }
}

/// ℰ(p) = −p ln p − (1−p) ln(1−p).
pub fn bernoulli_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation(format!("probability {p} outside [0,1]")));
    }
    Ok(bern(p))
}

/// Binomial large-deviation rate Λ_p(x) = x ln(x/p) + (1−x) ln((1−x)/(1−p)).
pub fn large_dev_rate(p: f64, x: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::validation(format!("large deviation rate needs 0 < p < 1, got {p}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::validation(format!("x = {x} outside [0,1]")));
    }
    let mut v = 0.0;
    if x > 0.0 {
        v += x * (x / p).ln();
    }
    if x < 1.0 {
        v += (1.0 - x) * ((1.0 - x) / (1.0 - p)).ln();
    }
    // rounding can leave a tiny negative value at x ≈ p
    Ok(v.max(0.0))
}

/// Exact ln C(m, k).
pub fn log_choose(m: u64, k: u64) -> Result<f64> {
    if k > m {
        return Err(Error::validation(format!("log_choose: k = {k} exceeds m = {m}")));
    }
    Ok(ln_choose_f64(m as f64, k as f64))
}

/// First-order asymptotic K ln(m/K) of ln C(m, K) for K/m → 0.
pub fn log_choose_asymptotic(m: u64, k: u64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * (m as f64 / k as f64).ln()
    }
}

/// ln G[N, M], the log of the number of graphs on N labelled vertices with at
/// most M edges.
pub fn log_graph_count(n: u64, max_edges: u64) -> f64 {
    let pairs = n as u128 * n.saturating_sub(1) as u128 / 2;
    if max_edges as u128 >= pairs {
        return pairs as f64 * LN_2;
    }
    let p = pairs as f64;
    // terms increase up to k = pairs/2, so the last term bounds the rest when M < pairs/2
    let mut run_max = f64::NEG_INFINITY;
    let mut scaled = NeumaierSum::new();
    for k in 0..=max_edges {
        let t = ln_choose_f64(p, k as f64);
        if t > run_max {
            let shrink = (run_max - t).exp();
            let prev = scaled.value() * shrink;
            scaled = NeumaierSum::new();
            scaled.add(prev);
            run_max = t;
        }
        scaled.add((t - run_max).exp());
    }
    run_max + scaled.value().ln()
}

/// ln G[N, M] / (N ln N).
pub fn log_graph_count_normalized(n: u64, max_edges: u64) -> f64 {
    log_graph_count(n, max_edges) / (n as f64 * (n as f64).ln())
}

/// Entropy of the letter mixture p(a) = (1 + A·c_a) / ((1+k)A) given the
/// parent letter counts `counts` (which sum to k).
pub fn mixture_entropy(alphabet: usize, counts: &[u32]) -> f64 {
    let k: u32 = counts.iter().sum();
    let denom = ((1 + k) as f64) * alphabet as f64;
    let a = alphabet as f64;
    -counts
        .iter()
        .map(|&c| xlogx((1.0 + a * c as f64) / denom))
        .sum::<f64>()
}

fn for_each_partition(k: u32, max_parts: usize, max_part: u32, parts: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if k == 0 {
        f(parts);
        return;
    }
    if parts.len() == max_parts {
        return;
    }
    for first in (1..=max_part.min(k)).rev() {
        parts.push(first);
        for_each_partition(k - first, max_parts, first, parts, f);
        parts.pop();
    }
}

/// h_A(k): the uniform average over all A^k parent-letter tuples of the
/// entropy of the copy-rule mixture. h_A(0) = ln A.
///
/// Tuples are grouped by their multiset of letter counts (an integer partition
/// of k into at most A parts). Each group contributes
/// `#count-vectors × multinomial × A^{-k}` times the shared entropy.
pub fn h_a(alphabet: u32, k: u32) -> Result<f64> {
    if alphabet < 2 {
        return Err(Error::validation(format!("alphabet size {alphabet} < 2")));
    }
    let a = alphabet as usize;
    if k == 0 {
        return Ok((a as f64).ln());
    }
    let ln_a = (a as f64).ln();
    let ln_k_fact = ln_factorial(k as u64);
    let denom = ((1 + k) as f64) * a as f64;
    let p_zero = 1.0 / denom;
    let mut acc = NeumaierSum::new();
    let mut parts = Vec::with_capacity(a.min(k as usize));
    for_each_partition(k, a, k, &mut parts, &mut |lambda| {
        let r = lambda.len();
        // ways to place the r part values on distinct letters
        let mut ln_w = ln_factorial(a as u64) - ln_factorial((a - r) as u64);
        let mut i = 0;
        while i < r {
            let mut j = i;
            while j < r && lambda[j] == lambda[i] {
                j += 1;
            }
            ln_w -= ln_factorial((j - i) as u64);
            i = j;
        }
        ln_w += ln_k_fact - k as f64 * ln_a;
        ln_w -= lambda.iter().map(|&c| ln_factorial(c as u64)).sum::<f64>();
        let mut h = -((a - r) as f64) * xlogx(p_zero);
        for &c in lambda {
            h -= xlogx((1.0 + a as f64 * c as f64) / denom);
        }
        acc.add(ln_w.exp() * h);
    });
    Ok(acc.value())
}

/// h_A(0..=k_max).
pub fn h_a_table(alphabet: u32, k_max: u32) -> Result<Vec<f64>> {
    (0..=k_max).map(|k| h_a(alphabet, k)).collect()
}

const J_ALPHA_MAX: f64 = 700.0;

fn check_j_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::validation(format!("J_k needs alpha >= 0, got {alpha}")));
    }
    if alpha > J_ALPHA_MAX {
        return Err(Error::validation(format!("J_k supports alpha <= {J_ALPHA_MAX}")));
    }
    Ok(())
}

/// J_k(α) = e^{−α} Σ_m α^m k!/(k+m+1)!; every term is positive.
fn j_series(alpha: f64, k: usize) -> f64 {
    let mut term = 1.0 / (k as f64 + 1.0);
    let mut acc = NeumaierSum::new();
    let mut m = 0usize;
    loop {
        acc.add(term);
        m += 1;
        term *= alpha / (k + m + 1) as f64;
        if term < 1e-18 * acc.value() {
            break;
        }
    }
    (-alpha).exp() * acc.value()
}

/// J_0(α), …, J_{k_max}(α) where J_k(α) = ∫₀¹ x^k e^{−αx} dx.
///
/// Indices k ≤ α use the upward recurrence J_k = (k J_{k−1} − e^{−α})/α, which
/// is contracting there; indices above α use the downward form
/// J_{k−1} = (α J_k + e^{−α})/k seeded from the positive series at k_max.
pub fn j_k_table(alpha: f64, k_max: u32) -> Result<Vec<f64>> {
    check_j_alpha(alpha)?;
    let k_max = k_max as usize;
    if alpha == 0.0 {
        return Ok((0..=k_max).map(|k| 1.0 / (k as f64 + 1.0)).collect());
    }
    let e = (-alpha).exp();
    let mut out = vec![0.0; k_max + 1];
    let split = (alpha.floor() as usize).min(k_max);
    out[0] = -(-alpha).exp_m1() / alpha;
    for k in 1..=split {
        out[k] = (k as f64 * out[k - 1] - e) / alpha;
    }
    if split < k_max {
        out[k_max] = j_series(alpha, k_max);
        for k in (split + 2..=k_max).rev() {
            out[k - 1] = (alpha * out[k] + e) / k as f64;
        }
    }
    Ok(out)
}

pub fn j_k(alpha: f64, k: u32) -> Result<f64> {
    Ok(*j_k_table(alpha, k)?.last().expect("non-empty"))
}

/// Independent route for J_k(α) by adaptive quadrature.
pub fn j_k_quadrature(alpha: f64, k: u32) -> Result<f64> {
    check_j_alpha(alpha)?;
    integrate(|x| x.powi(k as i32) * (-alpha * x).exp(), 0.0, 1.0, 1e-14)
}

/// κ_γ = (2−γ) / (2^{1+γ} ∫₀^{π/4} sec^{2−γ} θ dθ), the small-world
/// calibration constant for 0 < γ < 2.
pub fn kappa(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::validation(format!("kappa needs 0 < gamma < 2, got {gamma}")));
    }
    let integral = integrate(|t| t.cos().powf(gamma - 2.0), 0.0, PI / 4.0, QUAD_TOL)?;
    Ok((2.0 - gamma) / (2f64.powf(1.0 + gamma) * integral))
}

/// Parameter bundle consumed by the asymptotic rate formulas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RateConstants {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub alphabet: Option<u32>,
    pub gamma: Option<f64>,
    pub d: Option<f64>,
}

impl RateConstants {
    pub fn require_alpha(&self) -> Result<f64> {
        let a = self.alpha.ok_or_else(|| Error::validation("alpha is required"))?;
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::validation(format!("alpha must be finite and >= 0, got {a}")));
        }
        Ok(a)
    }

    pub fn require_beta(&self, min: f64, inclusive: bool) -> Result<f64> {
        let b = self.beta.ok_or_else(|| Error::validation("beta is required"))?;
        let ok = if inclusive { b >= min } else { b > min };
        if !ok || !b.is_finite() {
            let op = if inclusive { ">=" } else { ">" };
            return Err(Error::validation(format!("beta must be {op} {min}, got {b}")));
        }
        Ok(b)
    }

    pub fn require_alphabet(&self) -> Result<u32> {
        let a = self.alphabet.ok_or_else(|| Error::validation("alphabet size A is required"))?;
        if a < 2 {
            return Err(Error::validation(format!("alphabet size must be >= 2, got {a}")));
        }
        Ok(a)
    }

    pub fn require_gamma(&self) -> Result<f64> {
        let g = self.gamma.ok_or_else(|| Error::validation("gamma is required"))?;
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::validation(format!("gamma must be > 0, got {g}")));
        }
        Ok(g)
    }

    pub fn require_d(&self) -> Result<f64> {
        self.d.ok_or_else(|| Error::validation("d is required"))
    }
}
