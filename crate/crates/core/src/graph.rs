//! The graph-with-names container shared by every model.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Letter symbols used when names are rendered as text.
pub const LETTERS: &[u8; 62] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

pub const MAX_ALPHABET: u32 = LETTERS.len() as u32;

/// Number of binary digits needed to write every integer below `count`.
pub fn bits_for(count: u64) -> u32 {
    if count <= 2 {
        1
    } else {
        64 - (count - 1).leading_zeros()
    }
}

/// Smallest L with A^L ≥ N.
pub fn min_name_len(n: u64, alphabet: u32) -> u32 {
    let mut l = 1u32;
    let mut cap = alphabet as u128;
    while cap < n as u128 {
        cap *= alphabet as u128;
        l += 1;
    }
    l
}

/// L_N = max(⌈β ln N / ln A⌉, ⌈ln N / ln A⌉), with the second term taken as
/// the exact minimal length so that A^L ≥ N always holds.
pub fn name_length(n: u64, beta: f64, alphabet: u32) -> u32 {
    let target = beta * (n as f64).ln() / (alphabet as f64).ln();
    // guard against 2.0000000000004 style overshoot from the division
    let scaled = (target - 1e-9).ceil().max(1.0) as u32;
    scaled.max(min_name_len(n, alphabet))
}

/// A^L as an integer, or `None` when it does not fit in 64 bits.
pub fn name_space(alphabet: u32, name_len: u32) -> Option<u64> {
    (alphabet as u64).checked_pow(name_len)
}

/// Write `value` in base A with exactly `len` letters, most significant first.
pub fn to_letters(mut value: u64, alphabet: u32, len: u32, out: &mut [u8]) {
    debug_assert_eq!(out.len(), len as usize);
    for slot in out.iter_mut().rev() {
        *slot = (value % alphabet as u64) as u8;
        value /= alphabet as u64;
    }
}

pub fn from_letters(letters: &[u8], alphabet: u32) -> u64 {
    letters
        .iter()
        .fold(0u64, |acc, &l| acc * alphabet as u64 + l as u64)
}

pub fn letter_char(letter: u8) -> char {
    LETTERS[letter as usize] as char
}

pub fn char_letter(c: u8) -> Option<u8> {
    LETTERS.iter().position(|&x| x == c).map(|p| p as u8)
}

/// An undirected simple graph whose vertices carry fixed-length names over an
/// alphabet of size A.
///
/// Names are stored as letter indices `0..A`. For ordered graphs the vertex
/// index is part of the name; it is kept implicit and only shows up when the
/// name is rendered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphWithNames {
    alphabet: u32,
    name_len: u32,
    letters: Vec<u8>,
    ordered: bool,
    edges: Vec<(u32, u32)>,
}

impl GraphWithNames {
    /// Builds a graph, checking names and edges. Edges may be given in any
    /// order and orientation; they are stored sorted with `u < v`.
    /// Duplicate names are allowed here; see [`Self::names_distinct`].
    pub fn new(
        alphabet: u32,
        name_len: u32,
        letters: Vec<u8>,
        mut edges: Vec<(u32, u32)>,
        ordered: bool,
    ) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&alphabet) {
            return Err(Error::validation(format!(
                "alphabet size must be in 2..={MAX_ALPHABET}, got {alphabet}"
            )));
        }
        if name_len == 0 {
            return Err(Error::validation("name length must be at least 1"));
        }
        if letters.len() % name_len as usize != 0 {
            return Err(Error::validation("letter buffer is not a whole number of names"));
        }
        if let Some(bad) = letters.iter().find(|&&l| l as u32 >= alphabet) {
            return Err(Error::validation(format!("letter {bad} outside alphabet of size {alphabet}")));
        }
        let n = (letters.len() / name_len as usize) as u64;
        if n > u32::MAX as u64 {
            return Err(Error::Capacity("more than 2^32 - 1 vertices".into()));
        }
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(Error::validation(format!("self-loop at vertex {}", e.0)));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            if e.1 as u64 >= n {
                return Err(Error::validation(format!("edge endpoint {} >= N = {n}", e.1)));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::validation(format!("duplicate edge {} {}", w[0].0, w[0].1)));
        }
        Ok(Self {
            alphabet,
            name_len,
            letters,
            ordered,
            edges,
        })
    }

    /// Builds from edges already sorted, deduplicated and oriented `u < v`.
    pub(crate) fn from_sorted_parts(
        alphabet: u32,
        name_len: u32,
        letters: Vec<u8>,
        edges: Vec<(u32, u32)>,
        ordered: bool,
    ) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|e| e.0 < e.1));
        Self {
            alphabet,
            name_len,
            letters,
            ordered,
            edges,
        }
    }

    pub fn n(&self) -> usize {
        self.letters.len() / self.name_len as usize
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn name_len(&self) -> u32 {
        self.name_len
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    pub fn name(&self, v: usize) -> &[u8] {
        let l = self.name_len as usize;
        &self.letters[v * l..(v + 1) * l]
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub(crate) fn name_mut(&mut self, v: usize) -> &mut [u8] {
        let l = self.name_len as usize;
        &mut self.letters[v * l..(v + 1) * l]
    }

    /// Text form of a name; ordered names are prefixed with `<index>:`.
    pub fn name_string(&self, v: usize) -> String {
        let body: String = self.name(v).iter().map(|&l| letter_char(l)).collect();
        if self.ordered {
            format!("{v}:{body}")
        } else {
            body
        }
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).is_ok()
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.n()];
        for &(u, v) in &self.edges {
            d[u as usize] += 1;
            d[v as usize] += 1;
        }
        d
    }

    /// Hamming distance between the letter parts of two names.
    pub fn hamming(&self, u: usize, v: usize) -> u32 {
        self.name(u)
            .iter()
            .zip(self.name(v))
            .filter(|(a, b)| a != b)
            .count() as u32
    }

    /// For every vertex, the earliest vertex carrying the same letters.
    pub fn first_holders(&self) -> Vec<u32> {
        let mut seen: HashMap<&[u8], u32> = HashMap::with_capacity(self.n());
        (0..self.n())
            .map(|v| *seen.entry(self.name(v)).or_insert(v as u32))
            .collect()
    }

    /// True when every vertex has a distinct name. Ordered names are always
    /// distinct because they include the index.
    pub fn names_distinct(&self) -> bool {
        self.ordered
            || self
                .first_holders()
                .iter()
                .enumerate()
                .all(|(v, &h)| h as usize == v)
    }
}
