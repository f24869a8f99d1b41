//! Arithmetic coding of model realizations under the model's own sequential
//! probabilities.
//!
//! Stream layout: `GNC1`, a model tag byte, the parameters as little-endian
//! 64-bit fields, the range-coder payload, and a CRC-32 of everything before
//! it.

mod nameset;
mod range;

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bits_for, from_letters, name_length, name_space, to_letters, GraphWithNames, MAX_ALPHABET};
use crate::models::binary_named;
use crate::numeric::{ln_choose_f64, NeumaierSum};

use range::{RangeDecoder, RangeEncoder, MAX_TOTAL};

pub const MAGIC: &[u8; 4] = b"GNC1";
const CRC_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum CodecModel {
    ErBinary { n: u64, alpha: f64 },
    ErNamed { n: u64, alpha: f64, beta: f64, alphabet: u32 },
    HybridOrdered { n: u64, alpha: f64, beta: f64, alphabet: u32 },
}

/// A coded stream. The coder works in whole bytes, so the bit length is
/// always a multiple of 8.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    pub bytes: Vec<u8>,
}

impl BitStream {
    pub fn len_bits(&self) -> u64 {
        self.bytes.len() as u64 * 8
    }
}

impl CodecModel {
    fn tag(&self) -> u8 {
        match self {
            CodecModel::ErBinary { .. } => 1,
            CodecModel::ErNamed { .. } => 2,
            CodecModel::HybridOrdered { .. } => 3,
        }
    }

    fn n(&self) -> u64 {
        match *self {
            CodecModel::ErBinary { n, .. } | CodecModel::ErNamed { n, .. } | CodecModel::HybridOrdered { n, .. } => n,
        }
    }

    fn alpha(&self) -> f64 {
        match *self {
            CodecModel::ErBinary { alpha, .. }
            | CodecModel::ErNamed { alpha, .. }
            | CodecModel::HybridOrdered { alpha, .. } => alpha,
        }
    }

    fn param_words(&self) -> Vec<u64> {
        match *self {
            CodecModel::ErBinary { n, alpha } => vec![n, alpha.to_bits()],
            CodecModel::ErNamed { n, alpha, beta, alphabet } | CodecModel::HybridOrdered { n, alpha, beta, alphabet } => {
                vec![n, alpha.to_bits(), beta.to_bits(), alphabet as u64]
            }
        }
    }

    /// Name length L the model uses.
    pub fn name_len(&self) -> u32 {
        match *self {
            CodecModel::ErBinary { n, .. } => bits_for(n),
            CodecModel::ErNamed { n, beta, alphabet, .. } | CodecModel::HybridOrdered { n, beta, alphabet, .. } => {
                name_length(n, beta, alphabet)
            }
        }
    }

    fn alphabet(&self) -> u32 {
        match *self {
            CodecModel::ErBinary { .. } => 2,
            CodecModel::ErNamed { alphabet, .. } | CodecModel::HybridOrdered { alphabet, .. } => alphabet,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 || n > u32::MAX as u64 {
            return Err(Error::validation(format!("N must lie in 2..2^32, got {n}")));
        }
        let alpha = self.alpha();
        if !(alpha >= 0.0) || alpha > n as f64 {
            return Err(Error::validation(format!("alpha must lie in [0, N], got {alpha}")));
        }
        if let CodecModel::ErNamed { beta, alphabet, .. } | CodecModel::HybridOrdered { beta, alphabet, .. } = *self {
            if !(beta > 1.0) || !beta.is_finite() {
                return Err(Error::validation(format!("beta must be > 1, got {beta}")));
            }
            if !(2..=MAX_ALPHABET).contains(&alphabet) {
                return Err(Error::validation(format!("alphabet size must be in 2..={MAX_ALPHABET}")));
            }
        }
        Ok(())
    }

    /// Bytes outside the payload: magic, tag, parameters and checksum.
    pub fn overhead_bytes(&self) -> usize {
        MAGIC.len() + 1 + 8 * self.param_words().len() + CRC_LEN
    }

    fn header(&self) -> Vec<u8> {
        let mut h = MAGIC.to_vec();
        h.push(self.tag());
        for w in self.param_words() {
            h.extend_from_slice(&w.to_le_bytes());
        }
        h
    }
}

/// Edge probability α/N quantized to 32 bits. `None` means the outcome is
/// certain and is not coded.
fn quantize(p: f64) -> Option<u64> {
    if p <= 0.0 || p >= 1.0 {
        return None;
    }
    Some(((p * MAX_TOTAL as f64).round() as u64).clamp(1, MAX_TOTAL - 1))
}

fn check_shape(model: &CodecModel, g: &GraphWithNames) -> Result<()> {
    if g.n() as u64 != model.n() {
        return Err(Error::validation(format!("graph has {} vertices, model has {}", g.n(), model.n())));
    }
    if g.alphabet() != model.alphabet() || g.name_len() != model.name_len() {
        return Err(Error::validation(format!(
            "graph names are {}-ary of length {}, model expects {}-ary of length {}",
            g.alphabet(),
            g.name_len(),
            model.alphabet(),
            model.name_len()
        )));
    }
    Ok(())
}

/// Edges grouped by their larger endpoint: `rows[v]` lists u < v ascending.
fn rows_by_later(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut rows = vec![Vec::new(); n];
    for &(u, v) in edges {
        rows[v as usize].push(u);
    }
    rows.iter_mut().for_each(|r| r.sort_unstable());
    rows
}

fn encode_row(enc: &mut RangeEncoder, v: usize, row: &[u32], q: Option<u64>) {
    let Some(q) = q else { return };
    let mut it = row.iter().peekable();
    for u in 0..v as u32 {
        let bit = it.peek() == Some(&&u);
        if bit {
            it.next();
        }
        enc.encode_bit(bit, q);
    }
}

fn decode_row(dec: &mut RangeDecoder, v: usize, p: f64, q: Option<u64>, edges: &mut Vec<(u32, u32)>) -> Result<()> {
    match q {
        Some(q) => {
            for u in 0..v as u32 {
                if dec.decode_bit(q)? {
                    edges.push((u, v as u32));
                }
            }
        }
        None if p >= 1.0 => edges.extend((0..v as u32).map(|u| (u, v as u32))),
        None => {}
    }
    Ok(())
}

/// Certain-outcome rows must match the forced value.
fn check_forced(n: usize, edges: usize, p: f64) -> Result<()> {
    if p <= 0.0 && edges > 0 {
        return Err(Error::validation("graph has edges but the model gives them probability 0"));
    }
    if p >= 1.0 && edges != n * (n - 1) / 2 {
        return Err(Error::validation("graph misses edges that the model makes certain"));
    }
    Ok(())
}

/// Sorts the names and relabels edges to match, which is how the decoder
/// returns ErNamed graphs.
fn canonical_named(g: &GraphWithNames) -> Result<(Vec<u64>, Vec<(u32, u32)>)> {
    name_space(g.alphabet(), g.name_len()).ok_or_else(|| Error::Capacity("name space exceeds 64 bits".into()))?;
    let values: Vec<u64> = (0..g.n()).map(|v| from_letters(g.name(v), g.alphabet())).collect();
    let mut order: Vec<u32> = (0..g.n() as u32).collect();
    order.sort_by_key(|&v| values[v as usize]);
    let mut rank = vec![0u32; g.n()];
    for (r, &v) in order.iter().enumerate() {
        rank[v as usize] = r as u32;
    }
    let sorted: Vec<u64> = order.iter().map(|&v| values[v as usize]).collect();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::validation("ErNamed realizations need distinct names"));
    }
    let mut edges: Vec<(u32, u32)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (rank[u as usize], rank[v as usize]);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    Ok((sorted, edges))
}

fn letter_freqs(counts: &[u32], a: u32, q: u32) -> (Vec<u64>, u64) {
    let f: Vec<u64> = counts.iter().map(|&c| 1 + a as u64 * c as u64).collect();
    (f, (1 + q as u64) * a as u64)
}

/// Codes `graph` under `model`. ErNamed graphs are coded in sorted-name
/// order, so decoding returns that canonical relabelling.
pub fn encode(model: &CodecModel, graph: &GraphWithNames) -> Result<BitStream> {
    model.validate()?;
    check_shape(model, graph)?;
    let n = graph.n();
    let p = model.alpha() / n as f64;
    let q = quantize(p);
    check_forced(n, graph.edge_count(), p)?;
    let mut enc = RangeEncoder::new();
    match *model {
        CodecModel::ErBinary { n: nn, .. } => {
            if *graph != binary_named(nn, graph.edges().to_vec()) {
                return Err(Error::validation("ErBinary graphs must carry the binary index names"));
            }
            let rows = rows_by_later(n, graph.edges());
            for (v, row) in rows.iter().enumerate() {
                encode_row(&mut enc, v, row, q);
            }
        }
        CodecModel::ErNamed { alphabet, .. } => {
            let (values, edges) = canonical_named(graph)?;
            let space = name_space(alphabet, graph.name_len()).expect("checked");
            nameset::encode(&mut enc, 0, space, &values);
            let rows = rows_by_later(n, &edges);
            for (v, row) in rows.iter().enumerate() {
                encode_row(&mut enc, v, row, q);
            }
        }
        CodecModel::HybridOrdered { alphabet, .. } => {
            if !graph.is_ordered() {
                return Err(Error::validation("HybridOrdered needs an ordered graph"));
            }
            let rows = rows_by_later(n, graph.edges());
            let l = graph.name_len() as usize;
            let mut counts = vec![0u32; alphabet as usize];
            for (v, row) in rows.iter().enumerate() {
                encode_row(&mut enc, v, row, q);
                for u in 0..l {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for &par in row {
                        counts[graph.name(par as usize)[u] as usize] += 1;
                    }
                    let (f, total) = letter_freqs(&counts, alphabet, row.len() as u32);
                    let x = graph.name(v)[u] as usize;
                    let cum: u64 = f[..x].iter().sum();
                    enc.encode(cum, f[x], total);
                }
            }
        }
    }
    let mut bytes = model.header();
    bytes.extend(enc.finish());
    let crc = crc32fast::hash(&bytes);
    bytes.extend_from_slice(&crc.to_le_bytes());
    Ok(BitStream { bytes })
}

/// Inverse of [`encode`]. Header, parameter and checksum mismatches are
/// reported with the byte position where they were found.
pub fn decode(model: &CodecModel, stream: &BitStream) -> Result<GraphWithNames> {
    model.validate()?;
    let bytes = &stream.bytes;
    let header = model.header();
    if bytes.len() < header.len() + CRC_LEN {
        return Err(Error::decode(bytes.len(), "stream shorter than header and checksum"));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::decode(0, "bad magic"));
    }
    if bytes[4] != header[4] {
        return Err(Error::decode(4, format!("stream model tag {} does not match model tag {}", bytes[4], header[4])));
    }
    if let Some(i) = (5..header.len()).find(|&i| bytes[i] != header[i]) {
        return Err(Error::decode(i, "stream parameters differ from the model"));
    }
    let body_end = bytes.len() - CRC_LEN;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().expect("4 bytes"));
    if crc32fast::hash(&bytes[..body_end]) != stored {
        return Err(Error::decode(body_end, "checksum mismatch"));
    }
    let payload = &bytes[header.len()..body_end];
    let mut dec = RangeDecoder::new(payload, header.len());
    let n = model.n() as usize;
    let p = model.alpha() / n as f64;
    let q = quantize(p);
    let mut edges = Vec::new();
    let graph = match *model {
        CodecModel::ErBinary { n: nn, .. } => {
            for v in 0..n {
                decode_row(&mut dec, v, p, q, &mut edges)?;
            }
            edges.sort_unstable();
            binary_named(nn, edges)
        }
        CodecModel::ErNamed { alphabet, .. } => {
            let l = model.name_len();
            let space = name_space(alphabet, l).ok_or_else(|| Error::Capacity("name space exceeds 64 bits".into()))?;
            let mut values = Vec::with_capacity(n);
            nameset::decode(&mut dec, 0, space, n as u64, &mut values)?;
            let mut letters = vec![0u8; n * l as usize];
            for (chunk, &x) in letters.chunks_mut(l as usize).zip(&values) {
                to_letters(x, alphabet, l, chunk);
            }
            for v in 0..n {
                decode_row(&mut dec, v, p, q, &mut edges)?;
            }
            edges.sort_unstable();
            GraphWithNames::from_sorted_parts(alphabet, l, letters, edges, false)
        }
        CodecModel::HybridOrdered { alphabet, .. } => {
            let l = model.name_len() as usize;
            let mut letters = vec![0u8; n * l];
            let mut counts = vec![0u32; alphabet as usize];
            let mut row = Vec::new();
            for v in 0..n {
                row.clear();
                decode_row(&mut dec, v, p, q, &mut row)?;
                for u in 0..l {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for &(par, _) in &row {
                        counts[letters[par as usize * l + u] as usize] += 1;
                    }
                    let (f, total) = letter_freqs(&counts, alphabet, row.len() as u32);
                    let (x, r) = dec.peek(total)?;
                    let mut cum = 0;
                    let mut sym = 0;
                    while cum + f[sym] <= x {
                        cum += f[sym];
                        sym += 1;
                    }
                    dec.consume(r, cum, f[sym]);
                    letters[v * l + u] = sym as u8;
                }
                edges.extend_from_slice(&row);
            }
            edges.sort_unstable();
            GraphWithNames::from_sorted_parts(alphabet, l as u32, letters, edges, true)
        }
    };
    // the encoder drops trailing zero bytes, so a little padding is expected
    if dec.overrun() > 16 {
        return Err(Error::decode(body_end, "payload ended early"));
    }
    Ok(graph)
}

fn edge_bits(n: usize, edges: usize, p: f64) -> Result<f64> {
    check_forced(n, edges, p)?;
    let pairs = (n * (n - 1) / 2) as f64;
    let e = edges as f64;
    let mut bits = 0.0;
    if e > 0.0 {
        bits -= e * p.log2();
    }
    if pairs - e > 0.0 {
        bits -= (pairs - e) * (-p).ln_1p() / LN_2;
    }
    Ok(bits)
}

/// −log₂ P(graph) under the model, from the exact (unquantized)
/// probabilities the coder approximates.
pub fn ideal_codelength(model: &CodecModel, graph: &GraphWithNames) -> Result<f64> {
    model.validate()?;
    check_shape(model, graph)?;
    let n = graph.n();
    let p = model.alpha() / n as f64;
    match *model {
        CodecModel::ErBinary { n: nn, .. } => {
            if *graph != binary_named(nn, graph.edges().to_vec()) {
                return Err(Error::validation("ErBinary graphs must carry the binary index names"));
            }
            edge_bits(n, graph.edge_count(), p)
        }
        CodecModel::ErNamed { alphabet, .. } => {
            canonical_named(graph)?;
            let space = (alphabet as f64).powi(graph.name_len() as i32);
            Ok(ln_choose_f64(space, n as f64) / LN_2 + edge_bits(n, graph.edge_count(), p)?)
        }
        CodecModel::HybridOrdered { alphabet, .. } => {
            if !graph.is_ordered() {
                return Err(Error::validation("HybridOrdered needs an ordered graph"));
            }
            let mut acc = NeumaierSum::new();
            acc.add(edge_bits(n, graph.edge_count(), p)?);
            let rows = rows_by_later(n, graph.edges());
            let l = graph.name_len() as usize;
            let mut counts = vec![0u32; alphabet as usize];
            for (v, row) in rows.iter().enumerate() {
                for u in 0..l {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for &par in row {
                        counts[graph.name(par as usize)[u] as usize] += 1;
                    }
                    let (f, total) = letter_freqs(&counts, alphabet, row.len() as u32);
                    let x = graph.name(v)[u] as usize;
                    acc.add((total as f64 / f[x] as f64).log2());
                }
            }
            Ok(acc.value())
        }
    }
}
