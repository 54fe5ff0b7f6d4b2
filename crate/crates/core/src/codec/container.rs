//! Byte layout of a censoring-code container.
//!
//! ```text
//! "ENVC" | version 0x01 | mode | f64 BE params (alpha, c_env) or (mu)
//! bit stream: Elias(n+1) [Elias(K̂+1)] Elias(|C1|+1) C1 C2, zero-padded
//! ```

use crate::bitio::{elias_decode, elias_encode_into, BitCursor, BitString};
use crate::error::{Error, Result};

use super::CodecParams;

pub const MAGIC: [u8; 4] = *b"ENVC";
pub const VERSION: u8 = 0x01;

const MODE_FIXED: u8 = 0x00;
const MODE_ADAPTIVE: u8 = 0x01;

/// A decoded container: parameters, declared length and the two code parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Container {
    pub params: CodecParams,
    pub len: u64,
    /// The constant cutoff, present in adaptive mode only.
    pub adaptive_cutoff: Option<u64>,
    /// Concatenated Elias codewords of the censored symbols.
    pub c1: BitString,
    /// Range-coded censored stream.
    pub c2: BitString,
}

fn format<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Format(msg.into()))
}

impl Container {
    /// Size of the fixed byte header preceding the bit stream.
    pub fn header_bytes(&self) -> usize {
        match self.params {
            CodecParams::FixedSchedule { .. } => 6 + 16,
            CodecParams::Adaptive { .. } => 6 + 8,
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.header_bytes() + (self.c1.len() + self.c2.len()) / 8 + 16);
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        match self.params {
            CodecParams::FixedSchedule { alpha, c_env } => {
                out.push(MODE_FIXED);
                out.extend_from_slice(&alpha.to_be_bytes());
                out.extend_from_slice(&c_env.to_be_bytes());
            }
            CodecParams::Adaptive { mu } => {
                out.push(MODE_ADAPTIVE);
                out.extend_from_slice(&mu.to_be_bytes());
            }
        }
        let mut bits = BitString::with_capacity(self.c1.len() + self.c2.len() + 200);
        elias_encode_into(self.len + 1, &mut bits)?;
        if let CodecParams::Adaptive { .. } = self.params {
            let cutoff = self
                .adaptive_cutoff
                .ok_or_else(|| Error::Domain("adaptive container without cutoff".into()))?;
            elias_encode_into(cutoff + 1, &mut bits)?;
        }
        elias_encode_into(self.c1.len() as u64 + 1, &mut bits)?;
        bits.append(&self.c1);
        bits.append(&self.c2);
        out.extend_from_slice(bits.as_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 6 {
            return format("container shorter than its header");
        }
        if bytes[..4] != MAGIC {
            return format("bad magic");
        }
        if bytes[4] != VERSION {
            return format(format!("unsupported version {:#04x}", bytes[4]));
        }
        let read_f64 = |at: usize| -> Result<f64> {
            bytes
                .get(at..at + 8)
                .map(|b| f64::from_be_bytes(b.try_into().expect("8 bytes")))
                .ok_or_else(|| Error::Format("truncated parameter block".into()))
        };
        let (params, body) = match bytes[5] {
            MODE_FIXED => (
                CodecParams::FixedSchedule {
                    alpha: read_f64(6)?,
                    c_env: read_f64(14)?,
                },
                22,
            ),
            MODE_ADAPTIVE => (CodecParams::Adaptive { mu: read_f64(6)? }, 14),
            other => return format(format!("unknown mode {other:#04x}")),
        };
        params
            .validate()
            .map_err(|e| Error::Format(format!("invalid parameters: {e}")))?;

        let bits = BitString::from_bytes(bytes[body..].to_vec());
        let mut cursor = bits.cursor();
        let len = elias_decode(&mut cursor)? - 1;
        let adaptive_cutoff = match params {
            CodecParams::Adaptive { .. } => Some(elias_decode(&mut cursor)? - 1),
            CodecParams::FixedSchedule { .. } => None,
        };
        let c1_len = elias_decode(&mut cursor)? - 1;
        let c1_len = usize::try_from(c1_len)
            .ok()
            .filter(|&l| l <= cursor.remaining())
            .ok_or_else(|| Error::Decode("C1 extends past the end of the container".into()))?;
        let c1 = take_bits(&mut cursor, c1_len)?;
        // C2 is byte-granular; what follows it is container padding.
        let rest = cursor.remaining();
        let c2 = take_bits(&mut cursor, rest - rest % 8)?;
        if cursor.read_bits((rest % 8) as u32)? != 0 {
            return Err(Error::Decode("nonzero container padding".into()));
        }
        Ok(Self {
            params,
            len,
            adaptive_cutoff,
            c1,
            c2,
        })
    }
}

fn take_bits(cursor: &mut BitCursor<'_>, count: usize) -> Result<BitString> {
    let mut out = BitString::with_capacity(count);
    let mut left = count;
    while left >= 64 {
        out.push_bits(cursor.read_bits(64)?, 64);
        left -= 64;
    }
    out.push_bits(cursor.read_bits(left as u32)?, left as u32);
    Ok(out)
}
