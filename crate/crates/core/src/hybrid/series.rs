//! Asymptotic rate series and the finite-N per-step approximation.

use serde::{Deserialize, Serialize};

use crate::entropy::{bern, h_a_table, j_k_table, RateConstants};
use crate::error::{Error, Result};
use crate::graph::name_length;
use crate::numeric::NeumaierSum;

const K_CAP: u32 = 400;

/// Smallest K with Σ_{k>K} scale·α^k/(k+shift)! < tol.
fn truncation(alpha: f64, scale: f64, shift: u32, tol: f64) -> u32 {
    if alpha == 0.0 {
        return 0;
    }
    // term(k) = α^k/(k+shift)!
    let mut term = 1.0;
    for j in 1..=shift {
        term /= j as f64;
    }
    let mut k = 0u32;
    loop {
        let next = term * alpha / (k + 1 + shift) as f64;
        let ratio = alpha / (k + 2 + shift) as f64;
        if ratio < 1.0 && scale * next / (1.0 - ratio) < tol {
            return k;
        }
        if k >= K_CAP {
            return K_CAP;
        }
        term = next;
        k += 1;
    }
}

/// Truncation index used by [`rate_hybrid`] for the given tolerance.
pub fn series_truncation(c: &RateConstants, tol: f64) -> Result<u32> {
    if !(tol > 0.0) {
        return Err(Error::validation(format!("tolerance must be > 0, got {tol}")));
    }
    let alpha = c.require_alpha()?;
    let beta = c.require_beta(1.0, false)?;
    Ok(truncation(alpha, beta, 1, tol))
}

/// α/2 + β Σ_{k=0..K} α^k J_k(α) h_A(k) / (k! ln A), minus 1 when unordered.
pub fn rate_hybrid_truncated(c: &RateConstants, ordered: bool, k_max: u32) -> Result<f64> {
    let alpha = c.require_alpha()?;
    let beta = c.require_beta(1.0, false)?;
    let a = c.require_alphabet()?;
    let ln_a = (a as f64).ln();
    let j = j_k_table(alpha, k_max)?;
    let h = h_a_table(a, k_max)?;
    let mut acc = NeumaierSum::new();
    let mut pow_over_fact = 1.0;
    for k in 0..=k_max as usize {
        if k > 0 {
            pow_over_fact *= alpha / k as f64;
        }
        acc.add(pow_over_fact * j[k] * h[k] / ln_a);
    }
    let ordered_rate = alpha / 2.0 + beta * acc.value();
    Ok(if ordered { ordered_rate } else { ordered_rate - 1.0 })
}

/// Entropy rate of the hybrid model; the unordered rate is the ordered one
/// minus 1.
pub fn rate_hybrid(c: &RateConstants, ordered: bool, tol: f64) -> Result<f64> {
    let k = series_truncation(c, tol)?;
    rate_hybrid_truncated(c, ordered, k)
}

/// Which name length multiplies the per-step letter entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NameLength {
    /// β log_A N, as in the asymptotic analysis.
    Asymptotic,
    /// The integer L_N the generator uses.
    Realized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ESeries {
    /// e_{N,n} for n = 0..N−1, where step n adds a vertex with n candidates.
    pub per_step: Vec<f64>,
    pub name_total: f64,
    /// Σ_n n·ℰ(α/N)
    pub edge_total: f64,
    pub total: f64,
    /// total / (N ln N)
    pub normalized: f64,
    pub k_max: u32,
}

/// e_{N,n} = ℓ Σ_k α^k h_A(k) C(n,k) N^{−k} e^{−αn/N}, truncated at `k_max`.
pub fn e_series_truncated(n: u64, c: &RateConstants, length: NameLength, k_max: u32) -> Result<ESeries> {
    if n < 2 {
        return Err(Error::validation(format!("N must be at least 2, got {n}")));
    }
    let alpha = c.require_alpha()?;
    let beta = c.require_beta(1.0, false)?;
    let a = c.require_alphabet()?;
    let nf = n as f64;
    let ell = match length {
        NameLength::Asymptotic => beta * nf.ln() / (a as f64).ln(),
        NameLength::Realized => name_length(n, beta, a) as f64,
    };
    let h = h_a_table(a, k_max)?;
    let x = alpha / nf;
    let per_step: Vec<f64> = (0..n)
        .map(|step| {
            let mut acc = NeumaierSum::new();
            let mut binom_pow = 1.0;
            for k in 0..=(k_max as u64).min(step) {
                if k > 0 {
                    binom_pow *= (step - k + 1) as f64 / k as f64 * x;
                }
                acc.add(binom_pow * h[k as usize]);
            }
            ell * (-x * step as f64).exp() * acc.value()
        })
        .collect();
    let name_total = per_step.iter().copied().collect::<NeumaierSum>().value();
    let edge_total = nf * (nf - 1.0) / 2.0 * bern(x);
    let total = name_total + edge_total;
    Ok(ESeries {
        per_step,
        name_total,
        edge_total,
        total,
        normalized: total / (nf * nf.ln()),
        k_max,
    })
}

/// [`e_series_truncated`] with the truncation chosen so the dropped tail of
/// Σ α^k/k! falls below 1e−15 relative to ℓ ln A.
pub fn e_series(n: u64, c: &RateConstants, length: NameLength) -> Result<ESeries> {
    let alpha = c.require_alpha()?;
    let k = truncation(alpha, 1.0, 0, 1e-15);
    e_series_truncated(n, c, length, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts(alpha: f64, beta: f64, a: u32) -> RateConstants {
        RateConstants {
            alpha: Some(alpha),
            beta: Some(beta),
            alphabet: Some(a),
            gamma: None,
            d: None,
        }
    }

    #[test]
    fn zero_alpha_rate_is_beta() {
        for a in [2, 3, 7] {
            let c = consts(0.0, 2.5, a);
            assert!((rate_hybrid(&c, true, 1e-12).unwrap() - 2.5).abs() < 1e-15);
            assert!((rate_hybrid(&c, false, 1e-12).unwrap() - 1.5).abs() < 1e-15);
        }
    }

    #[test]
    fn truncation_is_stable() {
        let c = consts(1.0, 2.0, 2);
        let a = rate_hybrid_truncated(&c, true, 40).unwrap();
        let b = rate_hybrid_truncated(&c, true, 60).unwrap();
        assert!((a - b).abs() < 1e-12);
        let auto = rate_hybrid(&c, true, 1e-12).unwrap();
        assert!((auto - b).abs() < 1e-12);
        assert!(rate_hybrid(&c, true, 0.0).is_err());
    }

    #[test]
    fn unordered_is_ordered_minus_one() {
        for &(alpha, beta, a) in &[(0.5, 1.5, 2u32), (1.0, 2.0, 2), (3.0, 3.0, 4)] {
            let c = consts(alpha, beta, a);
            let o = rate_hybrid(&c, true, 1e-12).unwrap();
            let u = rate_hybrid(&c, false, 1e-12).unwrap();
            assert_eq!(u, o - 1.0);
        }
    }

    #[test]
    fn each_series_term_is_bounded() {
        // α^k J_k h_A(k)/(k! ln A) ≤ α^k/(k+1)!
        let c = consts(2.0, 2.0, 3);
        let mut prev = rate_hybrid_truncated(&c, true, 0).unwrap();
        let mut bound = 1.0;
        for k in 1..14u32 {
            bound *= 2.0 / (k + 1) as f64;
            let cur = rate_hybrid_truncated(&c, true, k).unwrap();
            let term = (cur - prev) / 2.0;
            assert!(term > 0.0 && term <= bound * (1.0 + 1e-12), "k={k}");
            prev = cur;
        }
    }

    #[test]
    fn e_series_zero_alpha() {
        let c = consts(0.0, 2.0, 2);
        let s = e_series(1000, &c, NameLength::Asymptotic).unwrap();
        let expect = 2.0 * 1000f64.ln();
        assert!(s.per_step.iter().all(|&e| (e - expect).abs() < 1e-12));
        assert!((s.total - 1000.0 * expect).abs() < 1e-8);
        assert_eq!(s.edge_total, 0.0);
    }

    #[test]
    fn e_series_truncation_agreement() {
        let c = consts(1.0, 2.0, 2);
        let a = e_series_truncated(100, &c, NameLength::Asymptotic, 30).unwrap();
        let b = e_series_truncated(100, &c, NameLength::Asymptotic, 50).unwrap();
        assert!((a.name_total - b.name_total).abs() < 1e-10);
    }
}
