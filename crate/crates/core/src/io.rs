//! The `GNV1` text graph format, the binary stream files and DAG edge lists.
//!
//! ```text
//! GNV1
//! N=<n> A=<alphabet> L=<name length>
//! <one name per line, `<index>:<letters>` for ordered graphs>
//! E=<edge count>
//! <u v per line, 0-based, u < v>
//! ```

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::codec::BitStream;
use crate::error::{Error, Result};
use crate::graph::{char_letter, letter_char, GraphWithNames, MAX_ALPHABET};
use crate::hybrid::Dag;

pub const GNV_MAGIC: &str = "GNV1";

/// Serializes in GNV1. Unordered graphs must have distinct names, since the
/// reader rejects duplicates.
pub fn write_gnv<W: Write>(mut w: W, g: &GraphWithNames) -> Result<()> {
    if !g.names_distinct() {
        return Err(Error::validation("unordered graph has duplicate names; rename them before writing"));
    }
    writeln!(w, "{GNV_MAGIC}")?;
    writeln!(w, "N={} A={} L={}", g.n(), g.alphabet(), g.name_len())?;
    let mut line = String::with_capacity(g.name_len() as usize + 12);
    for v in 0..g.n() {
        line.clear();
        if g.is_ordered() {
            line.push_str(&v.to_string());
            line.push(':');
        }
        line.extend(g.name(v).iter().map(|&l| letter_char(l)));
        writeln!(w, "{line}")?;
    }
    writeln!(w, "E={}", g.edge_count())?;
    for &(u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    number: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self, what: &str) -> Result<String> {
        self.number += 1;
        match self.inner.next() {
            Some(line) => Ok(line?.trim_end_matches('\r').to_string()),
            None => Err(Error::parse(self.number, format!("unexpected end of file, expected {what}"))),
        }
    }
}

fn header_field(line: usize, token: Option<&str>, key: &str) -> Result<u64> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {key}= field")))?;
    let value = token
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| Error::parse(line, format!("expected {key}=<int>, found `{token}`")))?;
    value
        .parse()
        .map_err(|_| Error::parse(line, format!("{key} is not a non-negative integer: `{value}`")))
}

/// Parses GNV1. A graph is ordered when its names carry an `<index>:` prefix;
/// the index must equal the name's position.
pub fn read_gnv<R: BufRead>(r: R) -> Result<GraphWithNames> {
    let mut lines = Lines { inner: r.lines(), number: 0 };
    let magic = lines.next_line("the GNV1 header")?;
    if magic != GNV_MAGIC {
        return Err(Error::parse(1, format!("expected `{GNV_MAGIC}`, found `{magic}`")));
    }
    let header = lines.next_line("the N= A= L= line")?;
    let mut tokens = header.split_whitespace();
    let n = header_field(2, tokens.next(), "N")?;
    let a = header_field(2, tokens.next(), "A")?;
    let l = header_field(2, tokens.next(), "L")?;
    if let Some(extra) = tokens.next() {
        return Err(Error::parse(2, format!("unexpected token `{extra}`")));
    }
    if !(2..=MAX_ALPHABET as u64).contains(&a) {
        return Err(Error::parse(2, format!("A must lie in 2..={MAX_ALPHABET}, got {a}")));
    }
    if l == 0 || l > u32::MAX as u64 || n > u32::MAX as u64 {
        return Err(Error::parse(2, "N or L out of range"));
    }
    let (n, a, l) = (n as usize, a as u32, l as u32);

    let mut letters = Vec::with_capacity(n.saturating_mul(l as usize).min(1 << 28));
    let mut ordered = None;
    let mut seen: HashSet<String> = HashSet::with_capacity(n.min(1 << 24));
    for v in 0..n {
        let line = lines.next_line("a name")?;
        let at = lines.number;
        let (index, body) = match line.split_once(':') {
            Some((i, b)) => (Some(i), b),
            None => (None, line.as_str()),
        };
        let is_ordered = index.is_some();
        if *ordered.get_or_insert(is_ordered) != is_ordered {
            return Err(Error::parse(at, "names mix ordered and unordered forms"));
        }
        if let Some(i) = index {
            if i.parse::<usize>().ok() != Some(v) {
                return Err(Error::parse(at, format!("ordered name index `{i}` should be {v}")));
            }
        }
        if body.len() != l as usize {
            return Err(Error::parse(at, format!("name `{body}` has length {}, expected {l}", body.len())));
        }
        for c in body.bytes() {
            match char_letter(c) {
                Some(x) if (x as u32) < a => letters.push(x),
                _ => return Err(Error::parse(at, format!("`{}` is not a letter of the {a}-ary alphabet", c as char))),
            }
        }
        if !is_ordered && !seen.insert(body.to_string()) {
            return Err(Error::parse(at, format!("duplicate name `{body}`")));
        }
    }

    let e_line = lines.next_line("the E= line")?;
    let e = header_field(lines.number, Some(e_line.trim()), "E")?;
    let mut edges = Vec::with_capacity((e as usize).min(1 << 26));
    let mut seen_edges = HashSet::with_capacity((e as usize).min(1 << 26));
    for _ in 0..e {
        let line = lines.next_line("an edge")?;
        let at = lines.number;
        let mut parts = line.split_whitespace();
        let mut endpoint = || -> Result<u32> {
            let t = parts.next().ok_or_else(|| Error::parse(at, "edge needs two indices"))?;
            t.parse().map_err(|_| Error::parse(at, format!("bad vertex index `{t}`")))
        };
        let (u, v) = (endpoint()?, endpoint()?);
        if parts.next().is_some() {
            return Err(Error::parse(at, "edge line has extra fields"));
        }
        if u >= v {
            return Err(Error::parse(at, format!("edge `{u} {v}` must satisfy u < v")));
        }
        if v as usize >= n {
            return Err(Error::parse(at, format!("vertex index {v} >= N = {n}")));
        }
        if !seen_edges.insert((u, v)) {
            return Err(Error::parse(at, format!("duplicate edge `{u} {v}`")));
        }
        edges.push((u, v));
    }
    loop {
        lines.number += 1;
        match lines.inner.next() {
            None => break,
            Some(line) => {
                if !line?.trim().is_empty() {
                    return Err(Error::parse(lines.number, "trailing content after the edge list"));
                }
            }
        }
    }
    GraphWithNames::new(a, l, letters, edges, ordered.unwrap_or(false))
}

pub fn write_graph(path: impl AsRef<Path>, g: &GraphWithNames) -> Result<()> {
    write_gnv(BufWriter::new(fs::File::create(path)?), g)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<GraphWithNames> {
    read_gnv(BufReader::new(fs::File::open(path)?))
}

pub fn write_stream(path: impl AsRef<Path>, s: &BitStream) -> Result<()> {
    Ok(fs::write(path, &s.bytes)?)
}

pub fn read_stream(path: impl AsRef<Path>) -> Result<BitStream> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    Ok(BitStream { bytes })
}

/// DAG edge list: lines `a b` meaning a directed edge from the newer vertex
/// `a` to the older `b`. An optional first line `N=<n>` fixes the vertex
/// count, otherwise it is one more than the largest index. Blank lines and
/// lines starting with `#` are skipped.
pub fn read_dag<R: BufRead>(r: R) -> Result<Dag> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let at = i + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if t.starts_with("N=") {
            if n.is_some() || !edges.is_empty() {
                return Err(Error::parse(at, "N= must come before any edge"));
            }
            n = Some(header_field(at, Some(t), "N")? as usize);
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::parse(at, "expected `a b`"));
        }
        let parse = |s: &str| s.parse::<u32>().map_err(|_| Error::parse(at, format!("bad vertex index `{s}`")));
        let (a, b) = (parse(parts[0])?, parse(parts[1])?);
        if let Some(n) = n {
            if a as usize >= n || b as usize >= n {
                return Err(Error::parse(at, format!("vertex index >= N = {n}")));
            }
        }
        edges.push((a, b));
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(a, b)| a.max(b) as usize + 1).max().unwrap_or(0));
    Dag::new(n, edges)
}

pub fn read_dag_file(path: impl AsRef<Path>) -> Result<Dag> {
    read_dag(BufReader::new(fs::File::open(path)?))
}

pub fn write_dag<W: Write>(mut w: W, dag: &Dag) -> Result<()> {
    writeln!(w, "N={}", dag.n())?;
    for &(a, b) in dag.edges() {
        writeln!(w, "{a} {b}")?;
    }
    w.flush()?;
    Ok(())
}
