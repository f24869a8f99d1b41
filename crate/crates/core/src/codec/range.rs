//! 64-bit range coder with byte-wise carry propagation.

use crate::error::{Error, Result};

const TOP: u64 = 1 << 56;
const MASK64: u128 = (1u128 << 64) - 1;

/// Frequencies passed to the coder must sum to at most this.
pub(crate) const MAX_TOTAL: u64 = 1 << 32;

pub(crate) struct RangeEncoder {
    low: u128,
    range: u64,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl RangeEncoder {
    pub(crate) fn new() -> Self {
        Self {
            low: 0,
            range: u64::MAX,
            cache: 0,
            cache_size: 1,
            out: Vec::new(),
        }
    }

    fn shift_low(&mut self) {
        let carry = (self.low >> 64) as u8;
        if self.low < (0xFFu128 << 56) || carry != 0 {
            let mut temp = self.cache;
            loop {
                self.out.push(temp.wrapping_add(carry));
                temp = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = ((self.low >> 56) & 0xFF) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low << 8) & MASK64;
    }

    /// Codes the symbol occupying `[cum, cum + freq)` out of `total`.
    pub(crate) fn encode(&mut self, cum: u64, freq: u64, total: u64) {
        debug_assert!(freq > 0 && cum + freq <= total && total <= MAX_TOTAL);
        let r = self.range / total;
        self.low += r as u128 * cum as u128;
        self.range = r * freq;
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    pub(crate) fn encode_bit(&mut self, bit: bool, p_one: u64) {
        if bit {
            self.encode(0, p_one, MAX_TOTAL);
        } else {
            self.encode(p_one, MAX_TOTAL - p_one, MAX_TOTAL);
        }
    }

    /// Ends the stream with the value in the final interval that has the most
    /// trailing zero bytes, then drops the leading zero byte every stream
    /// starts with and all trailing zero bytes.
    pub(crate) fn finish(mut self) -> Vec<u8> {
        let step = TOP as u128;
        self.low = (self.low + step - 1) & !(step - 1);
        for _ in 0..9 {
            self.shift_low();
        }
        let mut out = self.out;
        debug_assert_eq!(out.first(), Some(&0));
        out.remove(0);
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }
}

pub(crate) struct RangeDecoder<'a> {
    code: u64,
    range: u64,
    input: &'a [u8],
    pos: usize,
    /// Offset of `input` inside the whole stream, for error positions.
    base: usize,
}

impl<'a> RangeDecoder<'a> {
    pub(crate) fn new(input: &'a [u8], base: usize) -> Self {
        let mut d = Self {
            code: 0,
            range: u64::MAX,
            input,
            pos: 0,
            base,
        };
        for _ in 0..8 {
            d.code = (d.code << 8) | d.next_byte() as u64;
        }
        d
    }

    fn next_byte(&mut self) -> u8 {
        let b = self.input.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b
    }

    fn position(&self) -> usize {
        self.base + self.pos.min(self.input.len())
    }

    /// Value in `[0, total)` locating the next symbol.
    pub(crate) fn peek(&mut self, total: u64) -> Result<(u64, u64)> {
        let r = self.range / total;
        let v = self.code / r;
        if v >= total {
            return Err(Error::decode(self.position(), "code value outside the coding interval"));
        }
        Ok((v, r))
    }

    pub(crate) fn consume(&mut self, r: u64, cum: u64, freq: u64) {
        self.code -= r * cum;
        self.range = r * freq;
        while self.range < TOP {
            self.range <<= 8;
            self.code = (self.code << 8) | self.next_byte() as u64;
        }
    }

    pub(crate) fn decode_bit(&mut self, p_one: u64) -> Result<bool> {
        let (v, r) = self.peek(MAX_TOTAL)?;
        if v < p_one {
            self.consume(r, 0, p_one);
            Ok(true)
        } else {
            self.consume(r, p_one, MAX_TOTAL - p_one);
            Ok(false)
        }
    }

    /// Bytes consumed beyond the end of the input (implicit zero padding).
    pub(crate) fn overrun(&self) -> usize {
        self.pos.saturating_sub(self.input.len())
    }
}
