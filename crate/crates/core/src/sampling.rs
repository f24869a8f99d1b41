//! Sampling helpers shared by the generators.

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use crate::error::{Error, Result};

/// Calls `f` with every index in `0..len` that succeeds in an independent
/// Bernoulli(p) trial, visiting successes in increasing order. Work is
/// proportional to the number of successes.
pub(crate) fn for_each_success<R: Rng + ?Sized>(rng: &mut R, len: u64, p: f64, mut f: impl FnMut(u64)) {
    if len == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(f);
        return;
    }
    let geo = Geometric::new(p).expect("0 < p < 1");
    let mut pos = geo.sample(rng);
    while pos < len {
        f(pos);
        pos = match pos.checked_add(1 + geo.sample(rng)) {
            Some(x) => x,
            None => return,
        };
    }
}

/// Index of the pair (u, v), u < v, in colex order: t = v(v−1)/2 + u.
#[cfg(test)]
pub(crate) fn pair_index(u: u64, v: u64) -> u64 {
    v * (v - 1) / 2 + u
}

pub(crate) fn pair_from_index(t: u64) -> (u64, u64) {
    let mut v = ((1.0 + (1.0 + 8.0 * t as f64).sqrt()) / 2.0) as u64;
    while v * (v - 1) / 2 > t {
        v -= 1;
    }
    while (v + 1) * v / 2 <= t {
        v += 1;
    }
    (t - v * (v - 1) / 2, v)
}

/// Independent Bernoulli(p) edges on all pairs of `n` vertices, sorted.
pub(crate) fn er_edges<R: Rng + ?Sized>(rng: &mut R, n: u64, p: f64) -> Vec<(u32, u32)> {
    let pairs = n * n.saturating_sub(1) / 2;
    let mut edges = Vec::with_capacity((pairs as f64 * p * 1.1) as usize + 16);
    for_each_success(rng, pairs, p, |t| {
        let (u, v) = pair_from_index(t);
        edges.push((u as u32, v as u32));
    });
    edges.sort_unstable();
    edges
}

/// `count` distinct values drawn uniformly from `0..space`, sorted.
pub(crate) fn distinct_values<R: Rng + ?Sized>(rng: &mut R, space: u64, count: u64) -> Result<Vec<u64>> {
    if count > space {
        return Err(Error::validation(format!("cannot draw {count} distinct names from {space}")));
    }
    let space_usize = usize::try_from(space)
        .map_err(|_| Error::Capacity("name space does not fit the address width".into()))?;
    let mut v: Vec<u64> = rand::seq::index::sample(rng, space_usize, count as usize)
        .into_iter()
        .map(|x| x as u64)
        .collect();
    v.sort_unstable();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rng_from_seed;

    #[test]
    fn pair_index_round_trip() {
        for v in 1..60u64 {
            for u in 0..v {
                assert_eq!(pair_from_index(pair_index(u, v)), (u, v));
            }
        }
        let big = pair_index(99_998, 99_999);
        assert_eq!(pair_from_index(big), (99_998, 99_999));
    }

    #[test]
    fn bernoulli_stream_edge_cases() {
        let mut rng = rng_from_seed(1);
        let mut hits = Vec::new();
        for_each_success(&mut rng, 5, 1.0, |i| hits.push(i));
        assert_eq!(hits, vec![0, 1, 2, 3, 4]);
        hits.clear();
        for_each_success(&mut rng, 5, 0.0, |i| hits.push(i));
        assert!(hits.is_empty());
    }

    #[test]
    fn bernoulli_stream_rate() {
        let mut rng = rng_from_seed(2);
        let mut count = 0u64;
        for_each_success(&mut rng, 1_000_000, 0.01, |_| count += 1);
        // binomial sd ≈ 99.5
        assert!((count as f64 - 10_000.0).abs() < 500.0, "{count}");
    }

    #[test]
    fn distinct_values_are_sorted_and_distinct() {
        let mut rng = rng_from_seed(3);
        let v = distinct_values(&mut rng, 1 << 40, 1000).unwrap();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(distinct_values(&mut rng, 10, 11).is_err());
        assert_eq!(distinct_values(&mut rng, 10, 10).unwrap(), (0..10).collect::<Vec<_>>());
    }
}
