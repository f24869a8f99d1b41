//! Sparse random graphs with vertex names: generators, exact and asymptotic
//! entropies, Monte Carlo estimation and a model-conditioned arithmetic codec.

pub mod codec;
pub mod entropy;
pub mod error;
pub mod graph;
pub mod hybrid;
pub mod io;
pub mod models;
pub mod numeric;
mod sampling;
pub mod sweep;

pub use error::{Error, Result};
pub use graph::GraphWithNames;
pub use models::{exact_entropy, generate, EntropyReport, ModelParams, ModelTag};
