use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gne::codec::{self, CodecModel};
use gne::entropy::{h_a, j_k, kappa, large_dev_rate, RateConstants};
use gne::hybrid::{
    collision_stats, count_linear_extensions, e_series, extension_lower_bound, gen_hybrid, mc_entropy_steps,
    rate_hybrid, rename_duplicates, HybridParams, NameLength,
};
use gne::io::{read_dag_file, read_graph, read_stream, write_dag, write_gnv, write_graph, write_stream};
use gne::models::{
    edge_length_stats, exact_entropy, generate, EdgeLengthStats, name_similarity_stats, rate, ModelParams, ModelTag, TorusOrdering,
};
use gne::sweep::{run_sweep, with_pool, write_csv, write_csv_file, SweepModel, SweepSpec};
use gne::{Error, GraphWithNames, Result};

#[derive(Parser)]
#[command(name = "gne", version, about = "Sparse random graphs with vertex names")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// er_binary, er_named, small_world, hamming, tree_sequential, tree_uniform or hybrid
    #[arg(long)]
    model: String,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Alphabet size
    #[arg(long = "A")]
    alphabet: Option<u32>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    /// Vertex count
    #[arg(long = "N")]
    vertices: Option<u64>,
    /// Torus side for small_world (N = n²)
    #[arg(long = "n")]
    side: Option<u64>,
    /// Hybrid names carry the construction index (the default)
    #[arg(long, conflicts_with = "unordered")]
    ordered: bool,
    #[arg(long)]
    unordered: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a graph and write it as GNV1
    Gen {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (stdout if absent)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Hybrid only: also write the construction DAG
        #[arg(long)]
        dag_out: Option<PathBuf>,
    },
    /// Exact finite-N entropy (series approximation for hybrid)
    Entropy {
        #[command(flatten)]
        model: ModelArgs,
        /// Fail unless the value is exact
        #[arg(long)]
        exact: bool,
    },
    /// Asymptotic entropy rate c
    Rate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Monte Carlo entropy estimate of the ordered hybrid model
    Estimate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 32)]
        link_samples: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Entropy / (N ln N) over a list of sizes, as CSV
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated vertex counts
        #[arg(long = "N-list", value_delimiter = ',')]
        n_list: Vec<u64>,
        /// Comma-separated torus sides (small_world)
        #[arg(long = "n-list", value_delimiter = ',')]
        side_list: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        seeds: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        link_samples: u32,
        /// Output CSV file (stdout if absent)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compress a GNV1 graph under a model
    Encode {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decompress a GNC1 stream back to GNV1
    Decode {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count linear extensions of a DAG edge list
    Extensions {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also report the interval-partition lower bound with K intervals
        #[arg(long = "K")]
        k: Option<u64>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Structural diagnostics of a generated graph
    Diag {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hybrid duplicate-name and copy-collision statistics
        #[arg(long)]
        collisions: bool,
        /// Small-world edge lengths under the torus ordering
        #[arg(long)]
        edge_lengths: bool,
        /// Length threshold M (default n^(1/4))
        #[arg(long)]
        threshold: Option<f64>,
        /// Mean Hamming distance between the names at each edge
        #[arg(long)]
        similarity: bool,
    },
    /// Print h_A(k), J_k(α), κ_γ and Λ_p(x) as CSV rows
    Const {
        #[arg(long = "A")]
        alphabet: Option<u32>,
        /// Largest k for h_A and J_k
        #[arg(long, default_value_t = 10)]
        k_max: u32,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
    },
}

enum Model {
    Family(ModelParams),
    Hybrid(HybridParams),
}

fn need<T>(v: Option<T>, flag: &str, model: &str) -> Result<T> {
    v.ok_or_else(|| Error::Validation(format!("--{flag} is required for model {model}")))
}

impl ModelArgs {
    fn is_hybrid(&self) -> bool {
        self.model.replace('-', "_") == "hybrid"
    }

    fn hybrid(&self, n: Option<u64>) -> Result<HybridParams> {
        let m = "hybrid";
        let p = HybridParams {
            n: need(n.or(self.vertices), "N", m)?,
            alpha: need(self.alpha, "alpha", m)?,
            beta: need(self.beta, "beta", m)?,
            alphabet: need(self.alphabet, "A", m)?,
            ordered: !self.unordered,
        };
        Ok(p)
    }

    /// Family parameters; `size`, when given, overrides --N (or --n for small_world).
    fn family(&self, size: Option<u64>) -> Result<ModelParams> {
        let tag: ModelTag = self.model.parse()?;
        let m = tag.name();
        let n = size.or(self.vertices);
        Ok(match tag {
            ModelTag::ErBinary => ModelParams::ErBinary { n: need(n, "N", m)?, alpha: need(self.alpha, "alpha", m)? },
            ModelTag::ErNamed => ModelParams::ErNamed {
                n: need(n, "N", m)?,
                alpha: need(self.alpha, "alpha", m)?,
                beta: need(self.beta, "beta", m)?,
                alphabet: need(self.alphabet, "A", m)?,
            },
            ModelTag::SmallWorld => ModelParams::SmallWorld {
                side: need(size.or(self.side), "n", m)?,
                alpha: need(self.alpha, "alpha", m)?,
                gamma: need(self.gamma, "gamma", m)?,
            },
            ModelTag::Hamming => ModelParams::Hamming {
                n: need(n, "N", m)?,
                alpha: need(self.alpha, "alpha", m)?,
                beta: need(self.beta, "beta", m)?,
                alphabet: need(self.alphabet, "A", m)?,
                d: need(self.d, "d", m)?,
            },
            ModelTag::TreeSequential => ModelParams::TreeSequential { n: need(n, "N", m)? },
            ModelTag::TreeUniform => ModelParams::TreeUniform { n: need(n, "N", m)? },
        })
    }

    fn resolve(&self) -> Result<Model> {
        let m = if self.is_hybrid() { Model::Hybrid(self.hybrid(None)?) } else { Model::Family(self.family(None)?) };
        match &m {
            Model::Family(p) => p.validate()?,
            Model::Hybrid(p) => p.validate()?,
        }
        Ok(m)
    }

    fn rate_constants(&self) -> RateConstants {
        RateConstants { alpha: self.alpha, beta: self.beta, alphabet: self.alphabet, gamma: self.gamma, d: self.d }
    }

    fn codec(&self) -> Result<CodecModel> {
        let m = self.model.replace('-', "_");
        let n = need(self.vertices, "N", &m)?;
        let alpha = need(self.alpha, "alpha", &m)?;
        let model = match m.as_str() {
            "er_binary" => CodecModel::ErBinary { n, alpha },
            "er_named" => CodecModel::ErNamed {
                n,
                alpha,
                beta: need(self.beta, "beta", &m)?,
                alphabet: need(self.alphabet, "A", &m)?,
            },
            "hybrid" if !self.unordered => CodecModel::HybridOrdered {
                n,
                alpha,
                beta: need(self.beta, "beta", &m)?,
                alphabet: need(self.alphabet, "A", &m)?,
            },
            "hybrid" => return Err(Error::Validation("only the ordered hybrid model can be coded".into())),
            other => return Err(Error::Validation(format!("the codec supports er_binary, er_named and hybrid, not {other}"))),
        };
        model.validate()?;
        Ok(model)
    }
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn emit_graph(g: &GraphWithNames, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => write_graph(path, g),
        None => write_gnv(BufWriter::new(io::stdout().lock()), g),
    }
}

fn cmd_gen(model: &ModelArgs, seed: u64, out: &Option<PathBuf>, dag_out: &Option<PathBuf>) -> Result<()> {
    match model.resolve()? {
        Model::Family(p) => {
            if dag_out.is_some() {
                return Err(Error::Validation("--dag-out applies to the hybrid model only".into()));
            }
            emit_graph(&generate(&p, seed)?, out)
        }
        Model::Hybrid(p) => {
            let h = gen_hybrid(&p, seed)?;
            let graph = if p.ordered {
                h.graph
            } else {
                let (g, renamed) = rename_duplicates(&h.graph, seed)?;
                if renamed > 0 {
                    eprintln!("renamed {renamed} vertices with duplicate names");
                }
                g
            };
            if let Some(path) = dag_out {
                write_dag(BufWriter::new(std::fs::File::create(path)?), &h.dag)?;
            }
            emit_graph(&graph, out)
        }
    }
}

fn cmd_entropy(model: &ModelArgs, exact: bool) -> Result<()> {
    match model.resolve()? {
        Model::Family(p) => {
            let r = exact_entropy(&p)?;
            print_json(&json!({
                "model": p.tag().name(),
                "n": p.vertex_count(),
                "nats": r.nats,
                "bits": r.bits,
                "normalized_rate": r.normalized_rate,
                "method": r.method,
            }))
        }
        Model::Hybrid(p) => {
            if exact || !p.ordered {
                return Err(Error::Validation(
                    "the hybrid model has no exact finite-N entropy; use `estimate` or drop --exact for the ordered series".into(),
                ));
            }
            let s = e_series(p.n, &model.rate_constants(), NameLength::Realized)?;
            print_json(&json!({
                "model": "hybrid_ordered",
                "n": p.n,
                "nats": s.total,
                "bits": s.total / std::f64::consts::LN_2,
                "normalized_rate": s.normalized,
                "method": "series",
                "series_terms": s.k_max,
            }))
        }
    }
}

fn cmd_rate(model: &ModelArgs, tol: f64) -> Result<()> {
    let c = model.rate_constants();
    let (name, value) = if model.is_hybrid() {
        let ordered = !model.unordered;
        (if ordered { "hybrid_ordered" } else { "hybrid_unordered" }, rate_hybrid(&c, ordered, tol)?)
    } else {
        let tag: ModelTag = model.model.parse()?;
        (tag.name(), rate(tag, &c)?)
    };
    print_json(&json!({ "model": name, "rate": value }))
}

fn cmd_estimate(model: &ModelArgs, link_samples: u32, seed: u64) -> Result<()> {
    let Model::Hybrid(p) = model.resolve()? else {
        return Err(Error::Validation("estimate applies to the hybrid model; other models have exact entropies".into()));
    };
    if !p.ordered {
        return Err(Error::Validation("estimate covers the ordered hybrid model only".into()));
    }
    let mc = mc_entropy_steps(&p, link_samples, seed)?;
    let series = e_series(p.n, &model.rate_constants(), NameLength::Realized)?;
    print_json(&json!({
        "model": "hybrid_ordered",
        "n": p.n,
        "name_len": p.name_len(),
        "nats": mc.report.nats,
        "bits": mc.report.bits,
        "stderr": mc.report.stderr,
        "normalized_rate": mc.report.normalized_rate,
        "name_term": mc.name_total,
        "edge_term": mc.edge_total,
        "e_series_nats": series.total,
        "e_series_normalized": series.normalized,
        "method": mc.report.method,
    }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    model: &ModelArgs,
    n_list: &[u64],
    side_list: &[u64],
    seeds: u32,
    seed: u64,
    link_samples: u32,
    csv: &Option<PathBuf>,
) -> Result<()> {
    let sizes = match (n_list.is_empty(), side_list.is_empty()) {
        (false, true) => n_list.to_vec(),
        (true, false) => side_list.to_vec(),
        _ => return Err(Error::Validation("give exactly one of --N-list or --n-list".into())),
    };
    let first = Some(sizes[0]);
    let sweep_model = if model.is_hybrid() {
        SweepModel::Hybrid { params: model.hybrid(first)?, link_samples }
    } else {
        let params = model.family(first)?;
        let is_side = matches!(params, ModelParams::SmallWorld { .. });
        if is_side == side_list.is_empty() {
            return Err(Error::Validation(
                "small_world sweeps take --n-list (torus sides); other models take --N-list".into(),
            ));
        }
        SweepModel::Exact { params }
    };
    let spec = SweepSpec { model: sweep_model, sizes, seeds, root_seed: seed };
    let rows = run_sweep(&spec)?;
    match csv {
        Some(path) => write_csv_file(path, &rows),
        None => write_csv(io::stdout().lock(), &rows),
    }
}

fn cmd_encode(model: &ModelArgs, input: &PathBuf, out: &PathBuf) -> Result<()> {
    let m = model.codec()?;
    let g = read_graph(input)?;
    let stream = codec::encode(&m, &g)?;
    let ideal = codec::ideal_codelength(&m, &g)?;
    write_stream(out, &stream)?;
    print_json(&json!({
        "bits": stream.len_bits(),
        "ideal_bits": ideal,
        "overhead_bits": 8 * m.overhead_bytes(),
        "bits_per_n_log2_n": stream.len_bits() as f64 / (g.n() as f64 * (g.n() as f64).log2()),
    }))
}

fn cmd_decode(model: &ModelArgs, input: &PathBuf, out: &PathBuf) -> Result<()> {
    let m = model.codec()?;
    let g = codec::decode(&m, &read_stream(input)?)?;
    write_graph(out, &g)
}

fn cmd_extensions(input: &PathBuf, k: Option<u64>, alpha: Option<f64>) -> Result<()> {
    let dag = read_dag_file(input)?;
    let bound = match k {
        Some(k) => {
            let alpha = alpha.ok_or_else(|| Error::Validation("--K needs --alpha".into()))?;
            Some(extension_lower_bound(dag.n() as u64, alpha, k)?)
        }
        None => None,
    };
    let c = count_linear_extensions(&dag)?;
    print_json(&json!({
        "n": dag.n(),
        "edges": dag.edges().len(),
        "log_count": c.log_count,
        "count": c.exact.map(|e| e.to_string()),
        "lower_bound": bound,
    }))
}

fn cmd_diag(model: &ModelArgs, seed: u64, collisions: bool, edge_lengths: bool, threshold: Option<f64>, similarity: bool) -> Result<()> {
    if !(collisions || edge_lengths || similarity) {
        return Err(Error::Validation("choose at least one of --collisions, --edge-lengths, --similarity".into()));
    }
    let mut report = serde_json::Map::new();
    let graph = match model.resolve()? {
        Model::Hybrid(p) => {
            let h = gen_hybrid(&p, seed)?;
            if collisions {
                report.insert("collisions".into(), json!(collision_stats(&h.trace, &h.graph)?));
            }
            h.graph
        }
        Model::Family(p) => {
            if collisions {
                return Err(Error::Validation("--collisions applies to the hybrid model only".into()));
            }
            let g = generate(&p, seed)?;
            if edge_lengths {
                let ModelParams::SmallWorld { side, .. } = p else {
                    return Err(Error::Validation("--edge-lengths applies to small_world only".into()));
                };
                let stats = edge_length_stats(&g, &TorusOrdering::new(side as usize)?)?;
                let m = threshold.unwrap_or((side as f64).powf(0.25));
                // the four lattice neighbours hold ranks 1..=4
                let random = EdgeLengthStats { lengths: stats.lengths.iter().copied().filter(|&l| l > 4).collect() };
                report.insert(
                    "edge_lengths".into(),
                    json!({
                        "threshold": m,
                        "edges": stats.lengths.len(),
                        "fraction_longer": stats.fraction_longer_than(m),
                        "median": stats.median(),
                        "random_edges": random.lengths.len(),
                        "random_fraction_longer": random.fraction_longer_than(m),
                    }),
                );
            }
            g
        }
    };
    if edge_lengths && !report.contains_key("edge_lengths") {
        return Err(Error::Validation("--edge-lengths applies to small_world only".into()));
    }
    if similarity {
        report.insert("similarity".into(), json!(name_similarity_stats(&graph)));
    }
    print_json(&Value::Object(report))
}

fn cmd_const(alphabet: Option<u32>, k_max: u32, alpha: Option<f64>, gamma: Option<f64>, p: Option<f64>, x: Option<f64>) -> Result<()> {
    let mut out = BufWriter::new(io::stdout().lock());
    let mut any = false;
    if let Some(a) = alphabet {
        for k in 0..=k_max {
            writeln!(out, "h_A,{a},{k},{}", h_a(a, k)?)?;
        }
        any = true;
    }
    if let Some(alpha) = alpha {
        for k in 0..=k_max {
            writeln!(out, "J_k,{alpha},{k},{}", j_k(alpha, k)?)?;
        }
        any = true;
    }
    if let Some(g) = gamma {
        writeln!(out, "kappa,{g},{}", kappa(g)?)?;
        any = true;
    }
    match (p, x) {
        (Some(p), Some(x)) => {
            writeln!(out, "Lambda,{p},{x},{}", large_dev_rate(p, x)?)?;
            any = true;
        }
        (None, None) => {}
        _ => return Err(Error::Validation("Lambda needs both --p and --x".into())),
    }
    if !any {
        return Err(Error::Validation("nothing to print; give --A, --alpha, --gamma or --p/--x".into()));
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Gen { model, seed, out, dag_out } => cmd_gen(model, *seed, out, dag_out),
        Command::Entropy { model, exact } => cmd_entropy(model, *exact),
        Command::Rate { model, tol } => cmd_rate(model, *tol),
        Command::Estimate { model, link_samples, seed } => cmd_estimate(model, *link_samples, *seed),
        Command::Sweep { model, n_list, side_list, seeds, seed, link_samples, csv } => {
            cmd_sweep(model, n_list, side_list, *seeds, *seed, *link_samples, csv)
        }
        Command::Encode { model, input, out } => cmd_encode(model, input, out),
        Command::Decode { model, input, out } => cmd_decode(model, input, out),
        Command::Extensions { input, k, alpha } => cmd_extensions(input, *k, *alpha),
        Command::Diag { model, seed, collisions, edge_lengths, threshold, similarity } => {
            cmd_diag(model, *seed, *collisions, *edge_lengths, *threshold, *similarity)
        }
        Command::Const { alphabet, k_max, alpha, gamma, p, x } => cmd_const(*alphabet, *k_max, *alpha, *gamma, *p, *x),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_pool(|| run(cli)).and_then(|r| r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gne: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
