//! The named-graph model families: generators, exact finite-N entropies and
//! asymptotic entropy rates.

mod diagnostics;
mod hamming;
mod smallworld;
mod trees;

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::entropy::{bern, large_dev_rate, RateConstants};
use crate::error::{Error, Result};
use crate::graph::{bits_for, name_length, name_space, to_letters, GraphWithNames};
use crate::numeric::{ln_choose_f64, rng_from_seed};
use crate::sampling::{distinct_values, er_edges};

pub use diagnostics::{
    edge_length_stats, name_similarity_stats, EdgeLengthStats, ExplicitOrdering, IndexOffsetOrdering,
    NameSimilarity, TorusOrdering, VertexOrdering,
};
pub use hamming::{hamming_max_distance, hamming_mu, HammingMu};
pub use smallworld::{calibrate_a, smallworld_entropy, Calibration};
pub use trees::tree_sequential_entropy;

/// Parameters of one model family. Generation takes the seed separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    ErBinary { n: u64, alpha: f64 },
    ErNamed { n: u64, alpha: f64, beta: f64, alphabet: u32 },
    /// `side` is the odd torus side n; the graph has N = n² vertices.
    SmallWorld { side: u64, alpha: f64, gamma: f64 },
    Hamming { n: u64, alpha: f64, beta: f64, alphabet: u32, d: f64 },
    TreeSequential { n: u64 },
    TreeUniform { n: u64 },
}

/// Model family without parameters, used to select a rate formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    ErBinary,
    ErNamed,
    SmallWorld,
    Hamming,
    TreeSequential,
    TreeUniform,
}

impl ModelTag {
    pub fn name(self) -> &'static str {
        match self {
            ModelTag::ErBinary => "er_binary",
            ModelTag::ErNamed => "er_named",
            ModelTag::SmallWorld => "small_world",
            ModelTag::Hamming => "hamming",
            ModelTag::TreeSequential => "tree_sequential",
            ModelTag::TreeUniform => "tree_uniform",
        }
    }
}

impl std::str::FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "er_binary" => ModelTag::ErBinary,
            "er_named" => ModelTag::ErNamed,
            "small_world" | "smallworld" => ModelTag::SmallWorld,
            "hamming" => ModelTag::Hamming,
            "tree_sequential" => ModelTag::TreeSequential,
            "tree_uniform" => ModelTag::TreeUniform,
            other => return Err(Error::validation(format!("unknown model '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub nats: f64,
    pub bits: f64,
    /// nats / (N ln N)
    pub normalized_rate: f64,
    pub stderr: Option<f64>,
    pub method: Method,
}

impl EntropyReport {
    pub fn exact(nats: f64, n: u64) -> Self {
        Self {
            nats,
            bits: nats / LN_2,
            normalized_rate: normalize(nats, n),
            stderr: None,
            method: Method::Exact,
        }
    }

    pub fn monte_carlo(nats: f64, stderr: f64, n: u64) -> Self {
        Self {
            nats,
            bits: nats / LN_2,
            normalized_rate: normalize(nats, n),
            stderr: Some(stderr),
            method: Method::MonteCarlo,
        }
    }
}

/// x / (N ln N).
pub fn normalize(nats: f64, n: u64) -> f64 {
    nats / (n as f64 * (n as f64).ln())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::validation(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    Ok(())
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::validation(format!("N must be at least 2, got {n}")));
    }
    if n > u32::MAX as u64 {
        return Err(Error::Capacity(format!("N = {n} exceeds 2^32 - 1")));
    }
    Ok(())
}

fn check_alphabet(a: u32) -> Result<()> {
    if !(2..=crate::graph::MAX_ALPHABET).contains(&a) {
        return Err(Error::validation(format!(
            "alphabet size must be in 2..={}, got {a}",
            crate::graph::MAX_ALPHABET
        )));
    }
    Ok(())
}

fn check_edge_prob(alpha: f64, n: u64) -> Result<()> {
    if alpha > n as f64 {
        return Err(Error::model(format!("edge probability alpha/N = {} exceeds 1", alpha / n as f64)));
    }
    Ok(())
}

/// Upper end of the admissible β range for the Hamming model,
/// ln A / Λ_{1−1/A}(d).
pub fn hamming_beta_max(alphabet: u32, d: f64) -> Result<f64> {
    let p = 1.0 - 1.0 / alphabet as f64;
    if !(d > 0.0 && d < p) {
        return Err(Error::validation(format!("d must lie in (0, {p}), got {d}")));
    }
    Ok((alphabet as f64).ln() / large_dev_rate(p, d)?)
}

impl ModelParams {
    pub fn tag(&self) -> ModelTag {
        match self {
            ModelParams::ErBinary { .. } => ModelTag::ErBinary,
            ModelParams::ErNamed { .. } => ModelTag::ErNamed,
            ModelParams::SmallWorld { .. } => ModelTag::SmallWorld,
            ModelParams::Hamming { .. } => ModelTag::Hamming,
            ModelParams::TreeSequential { .. } => ModelTag::TreeSequential,
            ModelParams::TreeUniform { .. } => ModelTag::TreeUniform,
        }
    }

    /// Number of vertices N.
    pub fn vertex_count(&self) -> u64 {
        match *self {
            ModelParams::SmallWorld { side, .. } => side * side,
            ModelParams::ErBinary { n, .. }
            | ModelParams::ErNamed { n, .. }
            | ModelParams::Hamming { n, .. }
            | ModelParams::TreeSequential { n }
            | ModelParams::TreeUniform { n } => n,
        }
    }

    /// Name length L used by the generator.
    pub fn name_len(&self) -> u32 {
        match *self {
            ModelParams::ErNamed { n, beta, alphabet, .. } | ModelParams::Hamming { n, beta, alphabet, .. } => {
                name_length(n, beta, alphabet)
            }
            ModelParams::SmallWorld { side, .. } => 2 * bits_for(side),
            ModelParams::ErBinary { n, .. } | ModelParams::TreeSequential { n } | ModelParams::TreeUniform { n } => {
                bits_for(n)
            }
        }
    }

    pub fn rate_constants(&self) -> RateConstants {
        let mut c = RateConstants::default();
        match *self {
            ModelParams::ErBinary { alpha, .. } => c.alpha = Some(alpha),
            ModelParams::ErNamed { alpha, beta, alphabet, .. } => {
                c.alpha = Some(alpha);
                c.beta = Some(beta);
                c.alphabet = Some(alphabet);
            }
            ModelParams::SmallWorld { alpha, gamma, .. } => {
                c.alpha = Some(alpha);
                c.gamma = Some(gamma);
            }
            ModelParams::Hamming { alpha, beta, alphabet, d, .. } => {
                c.alpha = Some(alpha);
                c.beta = Some(beta);
                c.alphabet = Some(alphabet);
                c.d = Some(d);
            }
            ModelParams::TreeSequential { .. } | ModelParams::TreeUniform { .. } => {}
        }
        c
    }

    /// Checks parameter ranges that do not need any heavy computation.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelParams::ErBinary { n, alpha } => {
                check_n(n)?;
                check_alpha(alpha)?;
                check_edge_prob(alpha, n)
            }
            ModelParams::ErNamed { n, alpha, beta, alphabet } => {
                check_n(n)?;
                check_alpha(alpha)?;
                check_alphabet(alphabet)?;
                if !(beta > 1.0) || !beta.is_finite() {
                    return Err(Error::validation(format!("beta must be > 1, got {beta}")));
                }
                check_edge_prob(alpha, n)
            }
            ModelParams::SmallWorld { side, alpha, gamma } => {
                if side < 5 || side % 2 == 0 {
                    return Err(Error::validation(format!("torus side must be odd and >= 5, got {side}")));
                }
                check_n(side * side)?;
                check_alpha(alpha)?;
                if !(gamma > 0.0) || !gamma.is_finite() {
                    return Err(Error::validation(format!("gamma must be > 0, got {gamma}")));
                }
                Ok(())
            }
            ModelParams::Hamming { n, alpha, beta, alphabet, d } => {
                check_n(n)?;
                check_alpha(alpha)?;
                check_alphabet(alphabet)?;
                let beta_max = hamming_beta_max(alphabet, d)?;
                if !(beta >= 1.0 && beta < beta_max) {
                    return Err(Error::validation(format!(
                        "beta must lie in [1, {beta_max:.6}) for A = {alphabet}, d = {d}; got {beta}"
                    )));
                }
                if name_length(n, beta, alphabet) < 2 {
                    return Err(Error::validation("Hamming model needs names of length >= 2"));
                }
                Ok(())
            }
            ModelParams::TreeSequential { n } | ModelParams::TreeUniform { n } => check_n(n),
        }
    }
}

/// Draws one graph from the model. The output is a pure function of
/// `(params, seed)`.
pub fn generate(params: &ModelParams, seed: u64) -> Result<GraphWithNames> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    match *params {
        ModelParams::ErBinary { n, alpha } => {
            let edges = er_edges(&mut rng, n, alpha / n as f64);
            Ok(binary_named(n, edges))
        }
        ModelParams::ErNamed { n, alpha, beta, alphabet } => {
            let l = name_length(n, beta, alphabet);
            let letters = random_names(&mut rng, n, alphabet, l)?;
            let edges = er_edges(&mut rng, n, alpha / n as f64);
            Ok(GraphWithNames::from_sorted_parts(alphabet, l, letters, edges, false))
        }
        ModelParams::SmallWorld { side, alpha, gamma } => smallworld::generate(&mut rng, side, alpha, gamma),
        ModelParams::Hamming { n, alpha, beta, alphabet, d } => {
            hamming::generate(&mut rng, n, alpha, beta, alphabet, d)
        }
        ModelParams::TreeSequential { n } => Ok(binary_named(n, trees::sequential_edges(&mut rng, n))),
        ModelParams::TreeUniform { n } => Ok(binary_named(n, trees::uniform_edges(&mut rng, n))),
    }
}

/// Vertex v named by the base-2 digits of v, zero padded.
pub(crate) fn binary_named(n: u64, edges: Vec<(u32, u32)>) -> GraphWithNames {
    let l = bits_for(n);
    let mut letters = vec![0u8; (n * l as u64) as usize];
    for (v, chunk) in letters.chunks_mut(l as usize).enumerate() {
        to_letters(v as u64, 2, l, chunk);
    }
    GraphWithNames::from_sorted_parts(2, l, letters, edges, false)
}

/// N distinct uniform names of length L in increasing order.
pub(crate) fn random_names<R: rand::Rng + ?Sized>(rng: &mut R, n: u64, alphabet: u32, l: u32) -> Result<Vec<u8>> {
    let space = name_space(alphabet, l)
        .ok_or_else(|| Error::Capacity(format!("name space {alphabet}^{l} exceeds 64 bits")))?;
    let values = distinct_values(rng, space, n)?;
    let mut letters = vec![0u8; (n * l as u64) as usize];
    for (chunk, &x) in letters.chunks_mut(l as usize).zip(&values) {
        to_letters(x, alphabet, l, chunk);
    }
    Ok(letters)
}

/// ln C(A^L, N): entropy of a uniform set of N distinct names.
pub fn name_set_entropy(n: u64, alphabet: u32, l: u32) -> f64 {
    let space = (alphabet as f64).powi(l as i32);
    ln_choose_f64(space, n as f64)
}

/// C(N,2)·ℰ(α/N).
pub fn er_edge_entropy(n: u64, alpha: f64) -> f64 {
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    pairs * bern(alpha / n as f64)
}

/// Exact entropy of one draw from the model, in nats.
pub fn exact_entropy(params: &ModelParams) -> Result<EntropyReport> {
    params.validate()?;
    let n = params.vertex_count();
    let nats = match *params {
        ModelParams::ErBinary { n, alpha } => er_edge_entropy(n, alpha),
        ModelParams::ErNamed { n, alpha, beta, alphabet } => {
            name_set_entropy(n, alphabet, name_length(n, beta, alphabet)) + er_edge_entropy(n, alpha)
        }
        ModelParams::SmallWorld { side, alpha, gamma } => smallworld_entropy(side, alpha, gamma)?,
        ModelParams::Hamming { n, alpha, beta, alphabet, d } => hamming::entropy(n, alpha, beta, alphabet, d)?,
        ModelParams::TreeSequential { n } => tree_sequential_entropy(n),
        ModelParams::TreeUniform { n } => (n as f64 - 2.0) * (n as f64).ln(),
    };
    let mut report = EntropyReport::exact(nats, n);
    if let ModelParams::TreeUniform { .. } = params {
        // (N−2)/N exactly, rather than after rounding both logarithms
        report.normalized_rate = (n as f64 - 2.0) / n as f64;
    }
    Ok(report)
}

/// Asymptotic entropy rate c of the family with the given constants.
pub fn rate(tag: ModelTag, c: &RateConstants) -> Result<f64> {
    match tag {
        ModelTag::ErBinary => Ok(c.require_alpha()? / 2.0),
        ModelTag::ErNamed => Ok(c.require_beta(1.0, false)? - 1.0 + c.require_alpha()? / 2.0),
        ModelTag::SmallWorld => {
            let alpha = c.require_alpha()?;
            let gamma = c.require_gamma()?;
            Ok(if gamma < 2.0 {
                alpha / 2.0
            } else if gamma == 2.0 {
                alpha / 4.0
            } else {
                0.0
            })
        }
        ModelTag::Hamming => {
            let alpha = c.require_alpha()?;
            let a = c.require_alphabet()?;
            let d = c.require_d()?;
            let beta = c.require_beta(1.0, true)?;
            let beta_max = hamming_beta_max(a, d)?;
            if beta >= beta_max {
                return Err(Error::validation(format!(
                    "beta = {beta} violates beta < ln A / Lambda(d) = {beta_max}"
                )));
            }
            let lambda = large_dev_rate(1.0 - 1.0 / a as f64, d)?;
            Ok(beta - 1.0 + 0.5 * alpha * (1.0 - beta * lambda / (a as f64).ln()))
        }
        ModelTag::TreeSequential => Ok(0.5),
        ModelTag::TreeUniform => Ok(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_binary_examples() {
        let g = generate(&ModelParams::ErBinary { n: 4, alpha: 0.0 }, 9).unwrap();
        assert_eq!(g.edge_count(), 0);
        let names: Vec<String> = (0..4).map(|v| g.name_string(v)).collect();
        assert_eq!(names, ["00", "01", "10", "11"]);
        let e = exact_entropy(&ModelParams::ErBinary { n: 4, alpha: 2.0 }).unwrap();
        assert!((e.nats - 6.0 * LN_2).abs() < 1e-12);
        assert!((e.bits - 6.0).abs() < 1e-12);
        assert_eq!(e.method, Method::Exact);
        assert!(e.stderr.is_none());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let params = [
            ModelParams::ErBinary { n: 300, alpha: 2.0 },
            ModelParams::ErNamed { n: 300, alpha: 1.0, beta: 2.0, alphabet: 3 },
            ModelParams::SmallWorld { side: 11, alpha: 1.0, gamma: 2.5 },
            ModelParams::Hamming { n: 300, alpha: 1.0, beta: 2.0, alphabet: 2, d: 0.25 },
            ModelParams::TreeSequential { n: 300 },
            ModelParams::TreeUniform { n: 300 },
        ];
        for p in &params {
            assert_eq!(generate(p, 42).unwrap(), generate(p, 42).unwrap(), "{p:?}");
        }
    }

    #[test]
    fn named_models_have_distinct_names_of_length_l() {
        let p = ModelParams::ErNamed { n: 500, alpha: 1.0, beta: 1.2, alphabet: 2 };
        let g = generate(&p, 1).unwrap();
        assert_eq!(g.name_len(), p.name_len());
        assert!(g.names_distinct());
    }

    #[test]
    fn parameter_validation() {
        assert!(generate(&ModelParams::ErNamed { n: 10, alpha: 1.0, beta: 1.0, alphabet: 2 }, 0).is_err());
        assert!(generate(&ModelParams::SmallWorld { side: 6, alpha: 1.0, gamma: 1.0 }, 0).is_err());
        assert!(generate(&ModelParams::ErBinary { n: 10, alpha: -1.0 }, 0).is_err());
        let too_dense = generate(&ModelParams::ErBinary { n: 10, alpha: 11.0 }, 0);
        assert!(matches!(too_dense, Err(Error::ModelInvalid(_))));
        // β above ln 2 / Λ_{1/2}(0.25) ≈ 5.30
        let p = ModelParams::Hamming { n: 100, alpha: 1.0, beta: 5.5, alphabet: 2, d: 0.25 };
        assert!(generate(&p, 0).is_err());
    }

    #[test]
    fn rate_examples() {
        let c = |alpha, beta, a, gamma, d| RateConstants { alpha, beta, alphabet: a, gamma, d };
        assert_eq!(rate(ModelTag::ErBinary, &c(Some(2.0), None, None, None, None)).unwrap(), 1.0);
        let sw = |g| rate(ModelTag::SmallWorld, &c(Some(1.0), None, None, Some(g), None)).unwrap();
        assert_eq!(sw(1.0), 0.5);
        assert_eq!(sw(2.0), 0.25);
        assert_eq!(sw(3.0), 0.0);
        let h = rate(ModelTag::Hamming, &c(Some(1.0), Some(2.0), Some(2), None, Some(0.25))).unwrap();
        let lambda = 0.25 * 0.5f64.ln() + 0.75 * 1.5f64.ln();
        assert!((h - (1.0 + 0.5 * (1.0 - 2.0 * lambda / LN_2))).abs() < 1e-12);
        assert!((h - 1.311_278).abs() < 1e-6);
        assert_eq!(rate(ModelTag::TreeSequential, &RateConstants::default()).unwrap(), 0.5);
        assert_eq!(rate(ModelTag::TreeUniform, &RateConstants::default()).unwrap(), 1.0);
        assert!(rate(ModelTag::Hamming, &c(Some(1.0), Some(6.0), Some(2), None, Some(0.25))).is_err());
        assert!(rate(ModelTag::ErNamed, &c(Some(1.0), None, Some(2), None, None)).is_err());
    }

    #[test]
    fn hamming_rate_meets_er_named_at_upper_d() {
        for &(a, beta, alpha) in &[(2u32, 2.0, 1.0), (3, 1.5, 2.0), (4, 3.0, 0.5)] {
            let d = 1.0 - 1.0 / a as f64 - 1e-6;
            let c = RateConstants {
                alpha: Some(alpha),
                beta: Some(beta),
                alphabet: Some(a),
                gamma: None,
                d: Some(d),
            };
            let h = rate(ModelTag::Hamming, &c).unwrap();
            let er = rate(ModelTag::ErNamed, &c).unwrap();
            assert!((h - er).abs() < 1e-4, "A={a}: {h} vs {er}");
        }
    }

    #[test]
    fn tree_uniform_normalized_is_exact() {
        for n in [5u64, 100, 12345] {
            let e = exact_entropy(&ModelParams::TreeUniform { n }).unwrap();
            assert_eq!(e.normalized_rate, (n as f64 - 2.0) / n as f64);
            assert!((e.normalized_rate - normalize(e.nats, n)).abs() < 1e-12);
        }
        let e = exact_entropy(&ModelParams::TreeUniform { n: 5 }).unwrap();
        assert!((e.nats - 4.828_314).abs() < 1e-6);
    }

    #[test]
    fn model_tag_parses() {
        assert_eq!("er-binary".parse::<ModelTag>().unwrap(), ModelTag::ErBinary);
        assert_eq!("small_world".parse::<ModelTag>().unwrap(), ModelTag::SmallWorld);
        assert!("foo".parse::<ModelTag>().is_err());
    }
}
