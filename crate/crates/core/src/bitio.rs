//! Bit strings, a bit cursor, and the Elias delta code for positive integers.
//!
//! Bits are packed most-significant-bit first within each byte.

use std::fmt;

use crate::error::{decode, domain, Result};

/// An ordered sequence of bits with an explicit length.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Wraps whole bytes; the length is `8 * bytes.len()`.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len = bytes.len() * 8;
        Self { bytes, len }
    }

    /// Parses a string of `'0'`/`'1'` characters; other characters are rejected.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut out = Self::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return domain(format!("invalid bit character {c:?}")),
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let idx = self.len / 8;
        if idx == self.bytes.len() {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[idx] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the `count` low-order bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        for shift in (0..count).rev() {
            self.push((value >> shift) & 1 == 1);
        }
    }

    pub fn push_byte(&mut self, byte: u8) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(byte);
            self.len += 8;
        } else {
            self.push_bits(u64::from(byte), 8);
        }
    }

    pub fn append(&mut self, other: &BitString) {
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for i in 0..other.len {
                self.push(other.get(i));
            }
        }
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range");
        self.bytes[index / 8] & (0x80 >> (index % 8)) != 0
    }

    /// Packed bytes; bits past `len` in the last byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn cursor(&self) -> BitCursor<'_> {
        BitCursor::new(self)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Read position within a [`BitString`], optionally restricted to a window.
#[derive(Clone, Debug)]
pub struct BitCursor<'a> {
    source: &'a BitString,
    position: usize,
    end: usize,
}

impl<'a> BitCursor<'a> {
    pub fn new(source: &'a BitString) -> Self {
        Self {
            source,
            position: 0,
            end: source.len(),
        }
    }

    /// A cursor over `[start, start + len)` of `source`.
    pub fn window(source: &'a BitString, start: usize, len: usize) -> Result<Self> {
        match start.checked_add(len) {
            Some(end) if end <= source.len() => Ok(Self {
                source,
                position: start,
                end,
            }),
            _ => decode(format!(
                "window [{start}, +{len}) exceeds {} available bits",
                source.len()
            )),
        }
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn remaining(&self) -> usize {
        self.end - self.position
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.position >= self.end {
            return decode("unexpected end of bit stream");
        }
        let bit = self.source.get(self.position);
        self.position += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, count: u32) -> Result<u64> {
        debug_assert!(count <= 64);
        if (count as usize) > self.remaining() {
            return decode("unexpected end of bit stream");
        }
        let mut value = 0u64;
        for _ in 0..count {
            value = (value << 1) | u64::from(self.read_bit()?);
        }
        Ok(value)
    }

    /// Reads 8 bits, substituting zeros for bits past the end of the window.
    /// Returns whether any real bits were available.
    pub fn read_byte_padded(&mut self) -> (u8, bool) {
        let mut byte = 0u8;
        let available = self.position < self.end;
        for _ in 0..8 {
            byte <<= 1;
            if self.position < self.end {
                byte |= u8::from(self.source.get(self.position));
                self.position += 1;
            }
        }
        (byte, available)
    }
}

/// The accounting length `⌊log j + 2 log(1 + log j) + 1⌋` (binary logs).
///
/// Always at least the true delta codeword length, but not equal to it in
/// general (for example `j = 3`).
pub fn elias_length_bound(j: u64) -> Result<u32> {
    if j == 0 {
        return domain("Elias code is defined for positive integers only");
    }
    let lg = (j as f64).log2();
    Ok((lg + 2.0 * (1.0 + lg).log2() + 1.0).floor() as u32)
}

/// Exact bit length of the delta codeword for `j`.
pub fn elias_codeword_len(j: u64) -> Result<u32> {
    if j == 0 {
        return domain("Elias code is defined for positive integers only");
    }
    let width = 64 - j.leading_zeros();
    let prefix = 31 - width.leading_zeros();
    Ok(2 * prefix + width)
}

/// Appends the Elias delta codeword of `j` to `out`.
pub fn elias_encode_into(j: u64, out: &mut BitString) -> Result<()> {
    if j == 0 {
        return domain("Elias code is defined for positive integers only");
    }
    let width = 64 - j.leading_zeros();
    let prefix = 31 - width.leading_zeros();
    out.push_bits(0, prefix);
    out.push_bits(u64::from(width), prefix + 1);
    out.push_bits(j, width - 1);
    Ok(())
}

pub fn elias_encode(j: u64) -> Result<BitString> {
    let mut out = BitString::with_capacity(elias_codeword_len(j)? as usize);
    elias_encode_into(j, &mut out)?;
    Ok(out)
}

pub fn elias_decode(cursor: &mut BitCursor<'_>) -> Result<u64> {
    let mut prefix = 0u32;
    while !cursor.read_bit()? {
        prefix += 1;
        if prefix > 6 {
            return decode("malformed Elias prefix");
        }
    }
    let width = (1u64 << prefix) | cursor.read_bits(prefix)?;
    if width > 64 {
        return decode(format!("Elias codeword announces {width}-bit value"));
    }
    let width = width as u32;
    let low = cursor.read_bits(width - 1)?;
    Ok(if width == 64 {
        (1 << 63) | low
    } else {
        (1 << (width - 1)) | low
    })
}
