//! Numerical building blocks: compensated summation, log-factorials and
//! log-binomials that stay accurate for arguments near 2^40, log-sum-exp,
//! adaptive Gauss–Kronrod quadrature, and seed derivation.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<NeumaierSum>().value()
}

const TABLE_LEN: usize = 256;
const STIRLING_MIN: f64 = 32.0;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        let mut acc = NeumaierSum::new();
        for (i, slot) in t.iter_mut().enumerate().skip(1) {
            acc.add((i as f64).ln());
            *slot = acc.value();
        }
        t
    })
}

/// lnΓ(x+1) − (x ln x − x + ½ ln 2πx), valid for x ≥ 32.
fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0))))
}

fn stirling_main(x: f64) -> f64 {
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln()
}

/// lnΓ(x+1) for real x ≥ 0.
pub fn ln_gamma1p(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x.fract() == 0.0 && x < TABLE_LEN as f64 {
        return ln_factorial_table()[x as usize];
    }
    if x >= STIRLING_MIN {
        return stirling_main(x) + stirling_tail(x);
    }
    // shift upward: Γ(x+1) = Γ(x+1+s) / ((x+1)(x+2)...(x+s))
    let s = (STIRLING_MIN - x.floor()) as usize;
    let y = x + s as f64;
    let mut acc = NeumaierSum::new();
    acc.add(stirling_main(y) + stirling_tail(y));
    for i in 1..=s {
        acc.add(-(x + i as f64).ln());
    }
    acc.value()
}

pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma1p(n as f64)
}

/// ln C(m, k) for real m ≥ k ≥ 0 (integers in practice, possibly beyond 2^53).
pub fn ln_choose_f64(m: f64, k: f64) -> f64 {
    debug_assert!(k >= 0.0 && k <= m);
    let kk = k.min(m - k);
    if kk <= 0.0 {
        return 0.0;
    }
    if kk < STIRLING_MIN {
        let base = m - kk;
        let mut acc = NeumaierSum::new();
        let mut i = 1.0;
        while i <= kk {
            acc.add(((base + i) / i).ln());
            i += 1.0;
        }
        return acc.value();
    }
    let rest = m - kk;
    let mut acc = NeumaierSum::new();
    acc.add(kk * (m / kk).ln());
    acc.add(-rest * (-kk / m).ln_1p());
    acc.add(0.5 * (m / (2.0 * PI * kk * rest)).ln());
    acc.add(stirling_tail(m));
    acc.add(-stirling_tail(kk));
    acc.add(-stirling_tail(rest));
    acc.value()
}

/// Stable log Σ exp(x_i). Returns −∞ for an empty input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + compensated_sum(values.iter().map(|v| (v - max).exp())).ln()
}

/// x ln x with the 0·ln 0 = 0 convention.
#[inline]
pub fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let (value, err) = gk15(f, a, b);
    if err <= tol || err <= 1e-15 * value.abs() {
        return Ok(value);
    }
    if depth == 0 {
        return Err(Error::validation(format!(
            "quadrature did not converge on [{a}, {b}] (error estimate {err:e})"
        )));
    }
    let m = 0.5 * (a + b);
    Ok(adapt(f, a, m, 0.5 * tol, depth - 1)? + adapt(f, m, b, 0.5 * tol, depth - 1)?)
}

/// Adaptive Gauss–Kronrod (7/15) integral of a smooth function on a finite
/// interval to the requested absolute tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    if !(abs_tol > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::validation("integrate needs a finite interval and tol > 0"));
    }
    adapt(&f, a, b, abs_tol, 40)
}

/// Deterministic RNG for a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Counter-based seed split (SplitMix64 finalizer over root + counter).
pub fn derive_seed(root: u64, counter: u64) -> u64 {
    let mut z = root
        .wrapping_add(counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_choose_direct(m: u64, k: u64) -> f64 {
        (0..k).map(|i| ((m - i) as f64 / (i + 1) as f64).ln()).sum()
    }

    #[test]
    fn ln_factorial_small_and_large_agree_with_sums() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
        let direct: f64 = (1..=1000u64).map(|i| (i as f64).ln()).sum();
        assert!((ln_factorial(1000) - direct).abs() / direct < 1e-13);
        // Stirling path vs table path at the boundary
        let shifted = ln_gamma1p(255.5);
        let lo = ln_factorial(255);
        let hi = ln_factorial(256);
        assert!(shifted > lo && shifted < hi);
    }

    #[test]
    fn ln_gamma1p_half_integer() {
        // Γ(1.5) = √π / 2
        let expect = (PI.sqrt() / 2.0).ln();
        assert!((ln_gamma1p(0.5) - expect).abs() < 1e-13);
    }

    #[test]
    fn ln_choose_matches_direct_products() {
        for &(m, k) in &[(8u64, 3u64), (100, 50), (1000, 40), (5000, 2500), (1 << 34, 100)] {
            let a = ln_choose_f64(m as f64, k as f64);
            let b = ln_choose_direct(m, k);
            assert!((a - b).abs() <= 1e-12 * b.max(1.0), "({m},{k}) {a} vs {b}");
        }
        assert!((ln_choose_f64(8.0, 3.0) - 56f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn gauss_kronrod_integrates_known_functions() {
        let v = integrate(|x| x.exp(), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
        let v = integrate(|t| 1.0 / t.cos(), 0.0, PI / 4.0, 1e-12).unwrap();
        assert!((v - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn neumaier_recovers_cancellation() {
        let s = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(7, 0);
        let b = derive_seed(7, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(7, 0));
    }
}
