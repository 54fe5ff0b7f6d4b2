//! Censoring codes for sequences of positive integers.
//!
//! Symbols above a cutoff are replaced by the escape `0` in an adaptively
//! range-coded stream (C2) and shipped verbatim as Elias codewords (C1). The
//! cutoff either follows the schedule `⌊(4·C·i/(α−1))^{1/α}⌋` or is the
//! constant `⌈μ·Z_n⌉` computed from the number of distinct symbols.

mod container;
mod state;

use std::collections::HashSet;

pub use container::{Container, MAGIC, VERSION};
pub use state::CensorState;

use crate::arith::{Decoder, Encoder};
use crate::bitio::{elias_decode, elias_encode_into, BitCursor, BitString};
use crate::error::{decode, domain, Error, Result};

/// Longest accepted input.
pub const MAX_LEN: u64 = 1 << 30;

/// Codec configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CodecParams {
    /// Cutoff grows as `⌊(4·c_env·i/(alpha−1))^{1/alpha}⌋`.
    FixedSchedule { alpha: f64, c_env: f64 },
    /// Constant cutoff `⌈mu·Z_n⌉`.
    Adaptive { mu: f64 },
}

impl CodecParams {
    pub fn fixed(alpha: f64, c_env: f64) -> Result<Self> {
        let p = Self::FixedSchedule { alpha, c_env };
        p.validate()?;
        Ok(p)
    }

    pub fn adaptive(mu: f64) -> Result<Self> {
        let p = Self::Adaptive { mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::FixedSchedule { alpha, c_env } => {
                if !(alpha > 1.0 && alpha.is_finite()) {
                    return domain(format!("alpha must be a finite real > 1, got {alpha}"));
                }
                if !(c_env > 0.0 && c_env.is_finite()) {
                    return domain(format!("c_env must be a finite real > 0, got {c_env}"));
                }
            }
            Self::Adaptive { mu } => {
                if !(mu > 0.0 && mu.is_finite()) {
                    return domain(format!("mu must be a finite real > 0, got {mu}"));
                }
            }
        }
        Ok(())
    }
}

/// The scheduled cutoff at position `i ≥ 1`: the largest `k` with
/// `k^alpha ≤ 4·c_env·i/(alpha−1)`. Saturates at `u64::MAX`.
pub fn cutoff_schedule(alpha: f64, c_env: f64, i: u64) -> Result<u64> {
    CodecParams::fixed(alpha, c_env)?;
    if i == 0 {
        return domain("positions start at 1");
    }
    let bound = 4.0 * c_env * i as f64 / (alpha - 1.0);
    let estimate = bound.powf(alpha.recip()).floor();
    if estimate >= u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    let mut k = estimate as u64;
    // The root estimate may be off by one near exact powers.
    while k > 0 && (k as f64).powf(alpha) > bound {
        k -= 1;
    }
    while ((k + 1) as f64).powf(alpha) <= bound {
        k += 1;
    }
    Ok(k)
}

/// Number of distinct values in `x`.
pub fn distinct_count(x: &[u64]) -> u64 {
    x.iter().collect::<HashSet<_>>().len() as u64
}

/// Observation of the model right before one symbol is coded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub position: u64,
    pub cutoff: u64,
    pub escape_weight: u64,
    pub total: u64,
    /// The coded in-model symbol (`0` for an escape).
    pub coded: u64,
}

/// Per-part code lengths of one encoded sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodelengthReport {
    pub total_bits: u64,
    pub header_bits: u64,
    pub c1_bits: u64,
    pub c2_bits: u64,
    pub censored_count: u64,
}

/// Cutoff source for one container.
enum Schedule {
    Fixed { alpha: f64, c_env: f64 },
    Constant(u64),
}

impl Schedule {
    fn at(&self, i: u64) -> Result<u64> {
        match *self {
            Self::Fixed { alpha, c_env } => cutoff_schedule(alpha, c_env, i),
            Self::Constant(k) => Ok(k),
        }
    }
}

/// Sets up the schedule and model for a sequence of length `len`, checking
/// that the largest doubled total stays representable.
fn prepare(params: &CodecParams, len: u64, adaptive_cutoff: Option<u64>) -> Result<(Schedule, CensorState)> {
    params.validate()?;
    if len >= MAX_LEN {
        return Err(Error::Resource(format!("sequence length {len} ≥ 2^30")));
    }
    let (schedule, capacity) = match *params {
        CodecParams::FixedSchedule { alpha, c_env } => {
            let last = if len == 0 {
                0
            } else {
                cutoff_schedule(alpha, c_env, len)?
            };
            (Schedule::Fixed { alpha, c_env }, last)
        }
        CodecParams::Adaptive { .. } => {
            let k = adaptive_cutoff.ok_or_else(|| Error::Format("missing adaptive cutoff".into()))?;
            (Schedule::Constant(k), k)
        }
    };
    if len > 0 {
        let peak = (2 * (len - 1)).checked_add(capacity).and_then(|t| t.checked_add(1));
        if !peak.is_some_and(|t| t < 1 << 32) {
            return Err(Error::Resource(format!(
                "cutoff {capacity} at length {len} exceeds the 2^32 frequency budget"
            )));
        }
    }
    Ok((schedule, CensorState::new(capacity)))
}

fn adaptive_cutoff(mu: f64, x: &[u64]) -> Result<u64> {
    let k = (mu * distinct_count(x) as f64).ceil();
    if k >= (1u64 << 32) as f64 {
        return Err(Error::Resource(format!("adaptive cutoff {k} exceeds 2^32")));
    }
    Ok(k as u64)
}

fn step(state: &CensorState, coded: u64) -> Step {
    Step {
        position: state.position(),
        cutoff: state.cutoff(),
        escape_weight: state.escape_weight(),
        total: state.doubled_total(),
        coded,
    }
}

/// Encodes `x`, reporting the model state before every coded symbol.
pub fn encode_traced(x: &[u64], params: &CodecParams, mut observe: impl FnMut(Step)) -> Result<Container> {
    if let Some(i) = x.iter().position(|&v| v == 0) {
        return domain(format!("symbol 0 at index {i}: inputs must be positive"));
    }
    let len = x.len() as u64;
    let fixed_cutoff = match *params {
        CodecParams::Adaptive { mu } => {
            params.validate()?;
            Some(adaptive_cutoff(mu, x)?)
        }
        CodecParams::FixedSchedule { .. } => None,
    };
    let (schedule, mut state) = prepare(params, len, fixed_cutoff)?;
    let mut c1 = BitString::new();
    let mut coder = Encoder::new();
    for (i, &v) in (1..).zip(x) {
        state.raise_cutoff(schedule.at(i)?);
        let coded = if v <= state.cutoff() {
            v
        } else {
            elias_encode_into(v, &mut c1)?;
            0
        };
        observe(step(&state, coded));
        coder.encode(&state, coded as usize)?;
        state.record(v);
    }
    Ok(Container {
        params: *params,
        len,
        adaptive_cutoff: fixed_cutoff,
        c1,
        c2: coder.finish(),
    })
}

pub fn encode(x: &[u64], params: &CodecParams) -> Result<Container> {
    encode_traced(x, params, |_| {})
}

pub fn encode_to_bytes(x: &[u64], params: &CodecParams) -> Result<Vec<u8>> {
    encode(x, params)?.to_bytes()
}

/// Decodes a container, reporting the model state before every decoded symbol.
pub fn decode_traced(container: &Container, mut observe: impl FnMut(Step)) -> Result<Vec<u64>> {
    let (schedule, mut state) = prepare(&container.params, container.len, container.adaptive_cutoff)?;
    let mut censored = container.c1.cursor();
    let mut coder = Decoder::new(BitCursor::new(&container.c2))?;
    let mut out = Vec::with_capacity(container.len.min(1 << 16) as usize);
    for i in 1..=container.len {
        state.raise_cutoff(schedule.at(i)?);
        let coded = coder.decode(&state)? as u64;
        observe(step(&state, coded));
        let v = if coded == 0 {
            let v = elias_decode(&mut censored)?;
            if v <= state.cutoff() {
                return decode(format!("censored value {v} at position {i} is within the cutoff"));
            }
            v
        } else {
            coded
        };
        state.record(v);
        out.push(v);
    }
    if censored.remaining() != 0 {
        return decode(format!("{} unread bits left in C1", censored.remaining()));
    }
    Ok(out)
}

pub fn decode_container(container: &Container) -> Result<Vec<u64>> {
    decode_traced(container, |_| {})
}

pub fn decode_bytes(bytes: &[u8]) -> Result<Vec<u64>> {
    decode_container(&Container::from_bytes(bytes)?)
}

/// Encodes `x` and measures the size of each container part.
pub fn codelength_report(x: &[u64], params: &CodecParams) -> Result<CodelengthReport> {
    let container = encode(x, params)?;
    let total_bits = 8 * container.to_bytes()?.len() as u64;
    let c1_bits = container.c1.len() as u64;
    let c2_bits = container.c2.len() as u64;
    let censored_count = {
        let mut cursor = container.c1.cursor();
        let mut count = 0;
        while cursor.remaining() > 0 {
            elias_decode(&mut cursor)?;
            count += 1;
        }
        count
    };
    Ok(CodelengthReport {
        total_bits,
        header_bits: total_bits - c1_bits - c2_bits,
        c1_bits,
        c2_bits,
        censored_count,
    })
}

/// Encodes and decodes `x` in lockstep, failing on the first step where the
/// decoder's model differs from the encoder's.
pub fn shadow_check(x: &[u64], params: &CodecParams) -> Result<()> {
    let mut encoder_steps = Vec::with_capacity(x.len());
    let container = encode_traced(x, params, |s| encoder_steps.push(s))?;
    let bytes = container.to_bytes()?;
    let mut index = 0usize;
    let mut mismatch = None;
    let decoded = decode_traced(&Container::from_bytes(&bytes)?, |s| {
        if mismatch.is_none() && encoder_steps.get(index) != Some(&s) {
            mismatch = Some(index);
        }
        index += 1;
    })?;
    if let Some(i) = mismatch {
        return decode(format!("decoder state diverged at step {}", i + 1));
    }
    if decoded != x {
        return decode("decoded sequence differs from input");
    }
    Ok(())
}
