//! Adaptive multi-symbol range coder over exact integer frequency tables.
//!
//! The coder keeps a 64-bit interval width that is renormalized byte-wise to
//! stay at or above 2^56, so every table with `total < 2^32` is represented
//! with a per-symbol excess below `2^-23` bits. Carries out of the low end are
//! propagated into the bytes already emitted.

use crate::bitio::{BitCursor, BitString};
use crate::error::{decode, domain, Error, Result};

const TOP: u64 = 1 << 56;

/// Bits of codelength the coder may spend beyond the ideal
/// `Σ log₂(total/weight)` over a whole stream.
pub const OVERHEAD_BITS: f64 = 48.0;

/// Cumulative-frequency view of a distribution over `0..symbol_count()`.
pub trait FrequencyView {
    fn symbol_count(&self) -> usize;

    fn total(&self) -> u64;

    /// `(cumulative weight below s, weight of s)`.
    fn interval(&self, s: usize) -> (u64, u64);

    /// The symbol `s` with `cum(s) ≤ target < cum(s) + weight(s)`, with its interval.
    fn locate(&self, target: u64) -> (usize, u64, u64);
}

/// A static table of cumulative frequencies `c₀ = 0 ≤ c₁ ≤ … ≤ c_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulativeTable {
    cumulative: Vec<u64>,
}

impl CumulativeTable {
    pub fn from_weights(weights: &[u64]) -> Result<Self> {
        if weights.is_empty() {
            return domain("frequency table needs at least one symbol");
        }
        let mut cumulative = Vec::with_capacity(weights.len() + 1);
        let mut acc = 0u64;
        cumulative.push(0);
        for &w in weights {
            acc = acc
                .checked_add(w)
                .filter(|&t| t < 1 << 32)
                .ok_or_else(|| Error::Resource("frequency total must stay below 2^32".into()))?;
            cumulative.push(acc);
        }
        if acc == 0 {
            return domain("frequency table has zero total");
        }
        Ok(Self { cumulative })
    }

    pub fn weight(&self, s: usize) -> u64 {
        self.cumulative[s + 1] - self.cumulative[s]
    }
}

impl FrequencyView for CumulativeTable {
    fn symbol_count(&self) -> usize {
        self.cumulative.len() - 1
    }

    fn total(&self) -> u64 {
        *self.cumulative.last().expect("non-empty")
    }

    fn interval(&self, s: usize) -> (u64, u64) {
        (self.cumulative[s], self.weight(s))
    }

    fn locate(&self, target: u64) -> (usize, u64, u64) {
        // last index with cumulative[idx] ≤ target
        let s = self.cumulative.partition_point(|&c| c <= target) - 1;
        (s, self.cumulative[s], self.weight(s))
    }
}

/// Range encoder state.
#[derive(Clone, Debug)]
pub struct Encoder {
    low: u64,
    range: u64,
    out: Vec<u8>,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Self {
        Self {
            low: 0,
            range: u64::MAX,
            out: Vec::new(),
        }
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    /// Bytes emitted so far (excluding the final flush).
    pub fn bytes_emitted(&self) -> usize {
        self.out.len()
    }

    /// Narrows the interval to the sub-interval of `s` under `freq`.
    pub fn encode<F: FrequencyView + ?Sized>(&mut self, freq: &F, s: usize) -> Result<()> {
        if s >= freq.symbol_count() {
            return domain(format!("symbol {s} outside table of {} symbols", freq.symbol_count()));
        }
        let total = freq.total();
        if total == 0 || total >= 1 << 32 {
            return Err(Error::Resource(format!("frequency total {total} outside [1, 2^32)")));
        }
        let (cum, weight) = freq.interval(s);
        if weight == 0 {
            return domain(format!("symbol {s} has zero weight"));
        }
        let r = self.range / total;
        let offset = r * cum;
        // The top symbol absorbs the division remainder.
        self.range = if cum + weight == total {
            self.range - offset
        } else {
            r * weight
        };
        let (low, carry) = self.low.overflowing_add(offset);
        self.low = low;
        if carry {
            self.propagate_carry();
        }
        while self.range < TOP {
            self.out.push((self.low >> 56) as u8);
            self.low <<= 8;
            self.range <<= 8;
        }
        Ok(())
    }

    fn propagate_carry(&mut self) {
        for byte in self.out.iter_mut().rev() {
            let (b, overflow) = byte.overflowing_add(1);
            *byte = b;
            if !overflow {
                return;
            }
        }
        unreachable!("carry escaped the coded interval");
    }

    /// Flushes the shortest byte string that identifies the final interval.
    pub fn finish_bytes(mut self) -> Vec<u8> {
        let low = u128::from(self.low);
        let range = u128::from(self.range);
        for k in 0..=8u32 {
            let step = 1u128 << (64 - 8 * k);
            let v = low.div_ceil(step) * step;
            if v - low < range {
                if v >> 64 != 0 {
                    self.propagate_carry();
                }
                let v = v as u64;
                for i in 0..k {
                    self.out.push((v >> (56 - 8 * i)) as u8);
                }
                return self.out;
            }
        }
        unreachable!("an 8-byte value always lies in the interval");
    }

    pub fn finish(self) -> BitString {
        BitString::from_bytes(self.finish_bytes())
    }
}

/// A source of coded bytes; reads past the end yield zeros.
pub trait ByteSource {
    /// Next byte and whether it came from real data.
    fn next_byte(&mut self) -> (u8, bool);
}

/// Byte source over a byte slice.
#[derive(Clone, Debug)]
pub struct SliceSource<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> SliceSource<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }
}

impl ByteSource for SliceSource<'_> {
    fn next_byte(&mut self) -> (u8, bool) {
        match self.data.get(self.pos) {
            Some(&b) => {
                self.pos += 1;
                (b, true)
            }
            None => (0, false),
        }
    }
}

impl ByteSource for BitCursor<'_> {
    fn next_byte(&mut self) -> (u8, bool) {
        self.read_byte_padded()
    }
}

/// Range decoder state mirroring [`Encoder`].
#[derive(Clone, Debug)]
pub struct Decoder<S: ByteSource> {
    code: u64,
    range: u64,
    source: S,
    padded_reads: u32,
}

impl<S: ByteSource> Decoder<S> {
    pub fn new(mut source: S) -> Result<Self> {
        let mut code = 0u64;
        let mut padded_reads = 0;
        for _ in 0..8 {
            let (b, real) = source.next_byte();
            padded_reads += u32::from(!real);
            code = (code << 8) | u64::from(b);
        }
        let dec = Self {
            code,
            range: u64::MAX,
            source,
            padded_reads,
        };
        if dec.code >= dec.range {
            return decode("range-coded stream starts outside the unit interval");
        }
        Ok(dec)
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    /// Decodes the next symbol; `freq` must equal the table the encoder used.
    pub fn decode<F: FrequencyView + ?Sized>(&mut self, freq: &F) -> Result<usize> {
        let total = freq.total();
        if total == 0 || total >= 1 << 32 {
            return Err(Error::Resource(format!("frequency total {total} outside [1, 2^32)")));
        }
        let r = self.range / total;
        let target = (self.code / r).min(total - 1);
        let (s, cum, weight) = freq.locate(target);
        let offset = r * cum;
        self.code -= offset;
        self.range = if cum + weight == total {
            self.range - offset
        } else {
            r * weight
        };
        while self.range < TOP {
            let (b, real) = self.source.next_byte();
            self.padded_reads += u32::from(!real);
            if self.padded_reads > 8 {
                return decode("range-coded stream is truncated");
            }
            self.code = (self.code << 8) | u64::from(b);
            self.range <<= 8;
        }
        if self.code >= self.range {
            return decode("range-coded stream is corrupt");
        }
        Ok(s)
    }

    pub fn into_source(self) -> S {
        self.source
    }
}
