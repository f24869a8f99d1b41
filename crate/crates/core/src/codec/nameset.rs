//! Coding a uniformly random K-subset of [0, S) by recursive halving: the
//! number of members in the lower half is hypergeometric, so the product of
//! the coded probabilities is exactly 1 / C(S, K).

use crate::error::Result;
use crate::numeric::ln_choose_f64;

use super::range::{RangeDecoder, RangeEncoder, MAX_TOTAL};

/// Support start and quantized frequencies of the count in the lower half.
fn split_table(size: u64, count: u64) -> (u64, Vec<u64>) {
    let lower = size / 2;
    let upper = size - lower;
    let lo = count.saturating_sub(upper);
    let hi = count.min(lower);
    let t = hi - lo + 1;
    let ln_total = ln_choose_f64(size as f64, count as f64);
    let spare = (MAX_TOTAL - t) as f64;
    let freqs = (lo..=hi)
        .map(|k| {
            let ln_p = ln_choose_f64(lower as f64, k as f64) + ln_choose_f64(upper as f64, (count - k) as f64)
                - ln_total;
            1 + (ln_p.exp().min(1.0) * spare) as u64
        })
        .collect();
    (lo, freqs)
}

pub(crate) fn encode(enc: &mut RangeEncoder, start: u64, size: u64, members: &[u64]) {
    let count = members.len() as u64;
    if count == 0 || count == size {
        return;
    }
    let lower = size / 2;
    let split = members.partition_point(|&x| x < start + lower);
    let (lo, freqs) = split_table(size, count);
    if freqs.len() > 1 {
        let idx = split - lo as usize;
        let cum: u64 = freqs[..idx].iter().sum();
        let total: u64 = freqs.iter().sum();
        enc.encode(cum, freqs[idx], total);
    }
    encode(enc, start, lower, &members[..split]);
    encode(enc, start + lower, size - lower, &members[split..]);
}

pub(crate) fn decode(dec: &mut RangeDecoder, start: u64, size: u64, count: u64, out: &mut Vec<u64>) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if count == size {
        out.extend(start..start + size);
        return Ok(());
    }
    let lower = size / 2;
    let (lo, freqs) = split_table(size, count);
    let k = if freqs.len() > 1 {
        let total: u64 = freqs.iter().sum();
        let (v, r) = dec.peek(total)?;
        let mut cum = 0u64;
        let mut idx = 0usize;
        while cum + freqs[idx] <= v {
            cum += freqs[idx];
            idx += 1;
        }
        dec.consume(r, cum, freqs[idx]);
        lo + idx as u64
    } else {
        lo
    };
    decode(dec, start, lower, k, out)?;
    decode(dec, start + lower, size - lower, count - k, out)
}
