//! Envelope functions dominating the marginal of a memoryless source, and
//! their tail sums `F̄(u) = Σ_{k>u} f(k)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::special::power_tail;

/// A non-increasing function `f: {1,2,...} → [0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Envelope {
    /// `1 ∧ c·k^{−alpha}`.
    PowerLaw {
        alpha: f64,
        c: f64,
    },
    /// `1 ∧ c·e^{−alpha·k}`.
    Exponential {
        alpha: f64,
        c: f64,
    },
    /// `1` on `{1..m}`, `0` beyond.
    FiniteUniform {
        m: u64,
    },
    Table(EnvelopeTable),
}

/// Tabulated envelope: each listed value holds from its key up to the next
/// key, keys below the first map to `1` and keys past the last map to `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeTable {
    entries: Vec<(u64, f64)>,
}

impl EnvelopeTable {
    pub fn new(entries: Vec<(u64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return domain("envelope table is empty");
        }
        let mut prev: Option<(u64, f64)> = None;
        for &(k, v) in &entries {
            if k == 0 {
                return domain("envelope table keys start at 1");
            }
            if !(0.0..=1.0).contains(&v) {
                return domain(format!("envelope value {v} at k={k} outside [0, 1]"));
            }
            if let Some((pk, pv)) = prev {
                if k <= pk {
                    return domain(format!("envelope table keys must ascend ({pk} then {k})"));
                }
                if v > pv {
                    return domain(format!("envelope table increases at k={k}"));
                }
            }
            prev = Some((k, v));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    fn value(&self, k: u64) -> f64 {
        let idx = self.entries.partition_point(|&(key, _)| key <= k);
        match idx {
            0 => 1.0,
            i if i == self.entries.len() && k > self.entries[i - 1].0 => 0.0,
            i => self.entries[i - 1].1,
        }
    }

    fn tail(&self, u: u64) -> f64 {
        let first = self.entries[0].0;
        let mut sum = if u + 1 < first { (first - 1 - u) as f64 } else { 0.0 };
        for (i, &(k, v)) in self.entries.iter().enumerate() {
            let end = self.entries.get(i + 1).map_or(k, |&(next, _)| next - 1);
            let start = k.max(u + 1);
            if start <= end {
                sum += (end - start + 1) as f64 * v;
            }
        }
        sum
    }
}

impl FromStr for EnvelopeTable {
    type Err = Error;

    /// Parses one `k f(k)` pair per line; blank lines and `#` comments are skipped.
    fn from_str(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Format(format!("line {}: expected `k f(k)`", line_no + 1));
            let mut fields = line.split_whitespace();
            let k = fields.next().and_then(|t| t.parse::<u64>().ok()).ok_or_else(bad)?;
            let v = fields.next().and_then(|t| t.parse::<f64>().ok()).ok_or_else(bad)?;
            if fields.next().is_some() {
                return Err(bad());
            }
            entries.push((k, v));
        }
        Self::new(entries)
    }
}

/// Largest `k ≥ 0` with `k^alpha ≤ bound`.
fn integer_root(bound: f64, alpha: f64) -> u64 {
    if bound < 1.0 {
        return 0;
    }
    let estimate = bound.powf(alpha.recip()).floor();
    if estimate >= u64::MAX as f64 {
        return u64::MAX;
    }
    let mut k = estimate as u64;
    while k > 0 && (k as f64).powf(alpha) > bound {
        k -= 1;
    }
    while ((k + 1) as f64).powf(alpha) <= bound {
        k += 1;
    }
    k
}

impl Envelope {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::PowerLaw { alpha, c } => {
                if !(alpha > 1.0 && alpha.is_finite()) {
                    return domain(format!(
                        "power-law envelope needs alpha > 1 to be summable, got {alpha}"
                    ));
                }
                if !(c > 0.0 && c.is_finite()) {
                    return domain(format!("envelope constant must be positive, got {c}"));
                }
            }
            Self::Exponential { alpha, c } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return domain(format!("exponential envelope needs alpha > 0, got {alpha}"));
                }
                if !(c > 0.0 && c.is_finite()) {
                    return domain(format!("envelope constant must be positive, got {c}"));
                }
            }
            Self::FiniteUniform { m } => {
                if m == 0 {
                    return domain("finite alphabet must be non-empty");
                }
            }
            Self::Table(_) => {}
        }
        Ok(())
    }

    /// Largest `k` where the envelope is capped at `1` by the `1 ∧ ·` operation.
    fn saturation_point(&self) -> u64 {
        match *self {
            Self::PowerLaw { alpha, c } => integer_root(c, alpha),
            Self::Exponential { alpha, c } => {
                if c < 1.0 {
                    0
                } else {
                    let mut k = (c.ln() / alpha).floor() as u64;
                    while k > 0 && c * (-alpha * k as f64).exp() < 1.0 {
                        k -= 1;
                    }
                    while c * (-alpha * (k + 1) as f64).exp() >= 1.0 {
                        k += 1;
                    }
                    k
                }
            }
            Self::FiniteUniform { m } => m,
            Self::Table(_) => 0,
        }
    }

    /// `f(k)` for `k ≥ 1`.
    pub fn value(&self, k: u64) -> f64 {
        debug_assert!(k >= 1);
        match self {
            Self::PowerLaw { alpha, c } => (c * (k as f64).powf(-alpha)).min(1.0),
            Self::Exponential { alpha, c } => (c * (-alpha * k as f64).exp()).min(1.0),
            Self::FiniteUniform { m } => f64::from(u8::from(k <= *m)),
            Self::Table(t) => t.value(k),
        }
    }

    /// `F̄(u) = Σ_{k>u} f(k)`.
    pub fn tail_sum(&self, u: u64) -> Result<f64> {
        self.validate()?;
        let saturated = self.saturation_point();
        let flat = saturated.saturating_sub(u) as f64;
        let past = u.max(saturated);
        Ok(match *self {
            Self::PowerLaw { alpha, c } => flat + c * power_tail(alpha, past + 1),
            Self::Exponential { alpha, c } => flat + c * (-alpha * (past + 1) as f64).exp() / -(-alpha).exp_m1(),
            Self::FiniteUniform { .. } => flat,
            Self::Table(ref t) => t.tail(u),
        })
    }

    /// `[F̄(0), F̄(1), ..., F̄(upto)]`, built downward from `F̄(upto)` so every
    /// entry is a sum of non-negative terms.
    pub fn tail_sums(&self, upto: u64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; upto as usize + 1];
        let mut acc = self.tail_sum(upto)?;
        out[upto as usize] = acc;
        for u in (1..=upto).rev() {
            acc += self.value(u);
            out[u as usize - 1] = acc;
        }
        Ok(out)
    }
}

impl fmt::Display for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerLaw { alpha, c } => write!(f, "powerlaw(alpha={alpha}, c={c})"),
            Self::Exponential { alpha, c } => write!(f, "exponential(alpha={alpha}, c={c})"),
            Self::FiniteUniform { m } => write!(f, "uniform(m={m})"),
            Self::Table(t) => write!(f, "table({} entries)", t.entries.len()),
        }
    }
}
