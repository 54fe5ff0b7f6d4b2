//! Memoryless source samplers, exact entropies and Monte-Carlo measurement
//! of codelengths.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`; trial `t`
//! uses stream `t`. Uniform reals are `(next_u64 >> 11)·2^{−53}`.

use std::fmt;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{censoring_redundancy_bound, regret_upper_bound, zeta};
use crate::codec::{codelength_report, distinct_count, CodecParams};
use crate::envelope::Envelope;
use crate::error::{domain, Result};
use crate::special::{power_log_tail, power_tail, CompensatedSum, LOG2_E};

/// Zipf probabilities are tabulated up to this symbol; beyond it the
/// inverse CDF searches the exact tail sums.
const ZIPF_TABLE: usize = 1 << 16;

/// `Y` of the sparse source is capped here; the cap absorbs mass `2^{−127}`.
const SPARSE_MAX_Y: u32 = 128;

/// A memoryless source on the positive integers.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceKind {
    /// `P(k) = k^{−alpha}/ζ(alpha)`.
    Zipf { alpha: f64 },
    /// `P(k) = (1 − e^{−alpha})·e^{−alpha(k−1)}`.
    Geometric { alpha: f64 },
    /// Zipf rank `k` placed at `(k−1)·m + θ_k`, with `θ_k` uniform on
    /// `{1..m}` and fixed by `theta_seed`.
    ThetaShifted { alpha: f64, m: u64, theta_seed: u64 },
    /// `max(1, ⌊2^{Y/alpha}⌋)` with `P(Y = y) = 2^{−y}`.
    SparseGeometric { alpha: f64 },
    /// Uniform on `{1..m}`.
    FiniteUniform { m: u64 },
}

/// A source together with the seed of its random stream.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub seed: u64,
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zipf { alpha } => write!(f, "zipf({alpha})"),
            Self::Geometric { alpha } => write!(f, "geometric({alpha})"),
            Self::ThetaShifted { alpha, m, theta_seed } => write!(f, "theta({alpha}, m={m}, seed={theta_seed})"),
            Self::SparseGeometric { alpha } => write!(f, "sparse({alpha})"),
            Self::FiniteUniform { m } => write!(f, "uniform({m})"),
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn sparse_value(alpha: f64, y: u32) -> u64 {
    let v = (f64::from(y) / alpha).exp2().floor();
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        (v as u64).max(1)
    }
}

fn sparse_probability(y: u32) -> f64 {
    if y == SPARSE_MAX_Y {
        (1.0 - f64::from(y)).exp2()
    } else {
        (-f64::from(y)).exp2()
    }
}

impl SourceKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Zipf { alpha } | Self::ThetaShifted { alpha, .. } => {
                if !(alpha > 1.0 && alpha.is_finite()) {
                    return domain(format!("zipf exponent must exceed 1, got {alpha}"));
                }
            }
            Self::Geometric { alpha } | Self::SparseGeometric { alpha } => {
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return domain(format!("rate must be positive, got {alpha}"));
                }
            }
            Self::FiniteUniform { .. } => {}
        }
        match *self {
            Self::ThetaShifted { m: 0, .. } | Self::FiniteUniform { m: 0 } => domain("m must be positive"),
            _ => Ok(()),
        }
    }

    fn theta(theta_seed: u64, m: u64, rank: u64) -> u64 {
        1 + splitmix64(theta_seed ^ splitmix64(rank)) % m
    }

    /// `P(X = k)`.
    pub fn probability(&self, k: u64) -> Result<f64> {
        self.validate()?;
        if k == 0 {
            return Ok(0.0);
        }
        Ok(match *self {
            Self::Zipf { alpha } => (k as f64).powf(-alpha) / zeta(alpha)?,
            Self::Geometric { alpha } => -(-alpha).exp_m1() * (-alpha * (k - 1) as f64).exp(),
            Self::ThetaShifted { alpha, m, theta_seed } => {
                let rank = (k - 1) / m + 1;
                if (rank - 1) * m + Self::theta(theta_seed, m, rank) == k {
                    (rank as f64).powf(-alpha) / zeta(alpha)?
                } else {
                    0.0
                }
            }
            Self::SparseGeometric { alpha } => (1..=SPARSE_MAX_Y)
                .filter(|&y| sparse_value(alpha, y) == k)
                .map(sparse_probability)
                .sum(),
            Self::FiniteUniform { m } => {
                if k <= m {
                    1.0 / m as f64
                } else {
                    0.0
                }
            }
        })
    }

    /// Entropy of one draw, in bits.
    pub fn entropy_rate(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Self::Zipf { alpha } | Self::ThetaShifted { alpha, .. } => {
                let z = zeta(alpha)?;
                // Σ P(k)(α log₂k + log₂ζ)
                z.log2() + alpha / z * power_log_tail(alpha, 1) * LOG2_E
            }
            Self::Geometric { alpha } => {
                // H = h(q)/(1 − q) with q = e^{−α}
                let q = (-alpha).exp();
                let one_minus_q = -(-alpha).exp_m1();
                let h = -(one_minus_q * one_minus_q.log2()) + q * alpha * LOG2_E;
                h / one_minus_q
            }
            Self::SparseGeometric { alpha } => {
                // Group the possible Y values by the symbol they produce.
                let mut groups: Vec<(u64, f64)> = Vec::new();
                for y in 1..=SPARSE_MAX_Y {
                    let x = sparse_value(alpha, y);
                    match groups.iter_mut().find(|(v, _)| *v == x) {
                        Some(g) => g.1 += sparse_probability(y),
                        None => groups.push((x, sparse_probability(y))),
                    }
                }
                groups.iter().map(|&(_, p)| -p * p.log2()).sum()
            }
            Self::FiniteUniform { m } => (m as f64).log2(),
        })
    }

    /// Smallest `C` with `P(k) ≤ C·k^{−alpha}` over the symbols carrying
    /// non-negligible mass, for sources with a power-law envelope.
    pub fn powerlaw_envelope_constant(&self, alpha: f64) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Self::Zipf { alpha: a } if a == alpha => 1.0 / zeta(alpha)?,
            Self::SparseGeometric { alpha: a } => {
                let mut best = 0.0f64;
                // symbols saturated at u64::MAX are an artifact of the cap
                for x in (1..=SPARSE_MAX_Y).map(|y| sparse_value(a, y)).filter(|&x| x < u64::MAX) {
                    best = best.max(self.probability(x)? * (x as f64).powf(alpha));
                }
                best
            }
            _ => return domain(format!("no closed-form power-law envelope for {self} at alpha={alpha}")),
        })
    }
}

/// Inverse-CDF sampler for one source.
#[derive(Clone, Debug)]
pub struct Sampler {
    kind: SourceKind,
    zeta: f64,
    /// `CDF(k)` at index `k − 1` for Zipf-based sources.
    cdf: Vec<f64>,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (-53f64).exp2()
}

impl Sampler {
    pub fn new(kind: &SourceKind) -> Result<Self> {
        kind.validate()?;
        let (zeta, cdf) = match *kind {
            SourceKind::Zipf { alpha } | SourceKind::ThetaShifted { alpha, .. } => {
                let z = zeta(alpha)?;
                let mut acc = CompensatedSum::default();
                let cdf = (1..=ZIPF_TABLE)
                    .map(|k| {
                        acc.add((k as f64).powf(-alpha) / z);
                        acc.value()
                    })
                    .collect();
                (z, cdf)
            }
            _ => (1.0, Vec::new()),
        };
        Ok(Self {
            kind: kind.clone(),
            zeta,
            cdf,
        })
    }

    /// Smallest Zipf rank whose CDF reaches `u`.
    fn zipf_rank(&self, alpha: f64, u: f64) -> u64 {
        let idx = self.cdf.partition_point(|&c| c < u);
        if idx < self.cdf.len() {
            return idx as u64 + 1;
        }
        // Tail: smallest k with P(X > k) ≤ 1 − u.
        let v = 1.0 - u;
        let survival = |k: u64| power_tail(alpha, k + 1) / self.zeta;
        let mut lo = ZIPF_TABLE as u64;
        let mut hi = lo;
        loop {
            if hi > u64::MAX / 4 {
                return u64::MAX;
            }
            hi *= 2;
            if survival(hi) <= v {
                break;
            }
            lo = hi;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if survival(mid) <= v {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        match self.kind {
            SourceKind::Zipf { alpha } => self.zipf_rank(alpha, uniform(rng)),
            SourceKind::ThetaShifted { alpha, m, theta_seed } => {
                let rank = self.zipf_rank(alpha, uniform(rng));
                (rank - 1)
                    .checked_mul(m)
                    .and_then(|b| b.checked_add(SourceKind::theta(theta_seed, m, rank)))
                    .unwrap_or(u64::MAX)
            }
            SourceKind::Geometric { alpha } => {
                // P(X > k) = e^{−αk}
                let v = 1.0 - uniform(rng);
                let k = (-v.ln() / alpha).floor() + 1.0;
                if k >= u64::MAX as f64 {
                    u64::MAX
                } else {
                    k as u64
                }
            }
            SourceKind::SparseGeometric { alpha } => {
                let mut y = 1;
                loop {
                    let word = rng.next_u64();
                    y += word.trailing_zeros();
                    if word != 0 || y >= SPARSE_MAX_Y {
                        break;
                    }
                }
                sparse_value(alpha, y.min(SPARSE_MAX_Y))
            }
            SourceKind::FiniteUniform { m } => ((u128::from(rng.next_u64()) * u128::from(m)) >> 64) as u64 + 1,
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `n` draws from stream `trial` of the source.
pub fn sample_trial(spec: &SourceSpec, n: usize, trial: u64) -> Result<Vec<u64>> {
    let sampler = Sampler::new(&spec.kind)?;
    Ok(draw_many(&sampler, spec.seed, n, trial))
}

fn draw_many(sampler: &Sampler, seed: u64, n: usize, trial: u64) -> Vec<u64> {
    let mut rng = trial_rng(seed, trial);
    (0..n).map(|_| sampler.draw(&mut rng)).collect()
}

/// `n` draws from the first stream of the source.
pub fn sample(spec: &SourceSpec, n: usize) -> Result<Vec<u64>> {
    sample_trial(spec, n, 0)
}

pub fn entropy_rate(kind: &SourceKind) -> Result<f64> {
    kind.entropy_rate()
}

/// Monte-Carlo summary of the number of distinct symbols.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZnStatistics {
    pub mean: f64,
    /// Fraction of trials with `Z_n ≤ mean/2`.
    pub below_half_mean: f64,
    pub min: u64,
    pub max: u64,
}

pub fn zn_statistics(spec: &SourceSpec, n: usize, trials: u64) -> Result<ZnStatistics> {
    if trials == 0 {
        return domain("need at least one trial");
    }
    let sampler = Sampler::new(&spec.kind)?;
    let counts: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| distinct_count(&draw_many(&sampler, spec.seed, n, t)))
        .collect();
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / trials as f64;
    let below = counts.iter().filter(|&&c| (c as f64) <= mean / 2.0).count();
    Ok(ZnStatistics {
        mean,
        below_half_mean: below as f64 / trials as f64,
        min: *counts.iter().min().expect("trials ≥ 1"),
        max: *counts.iter().max().expect("trials ≥ 1"),
    })
}

/// Theoretical value printed next to a measured redundancy.
#[derive(Clone, Debug, PartialEq)]
pub enum Comparator {
    None,
    /// Leading redundancy term of the scheduled censoring code.
    Censoring {
        alpha: f64,
        c: f64,
    },
    /// Regret upper bound of an envelope class.
    Regret(Envelope),
}

impl Comparator {
    pub fn bits(&self, n: u64) -> Result<Option<f64>> {
        Ok(match self {
            Self::None => None,
            Self::Censoring { alpha, c } => Some(censoring_redundancy_bound(*alpha, *c, n)?),
            Self::Regret(env) => Some(regret_upper_bound(env, n)?.value),
        })
    }
}

pub const CSV_HEADER: &str = "n,trials,mean_bits,std_bits,entropy_bits,mean_redundancy,bound_bits";

/// Codelength statistics of one codec on one source.
#[derive(Clone, Debug, PartialEq)]
pub struct RedundancyReport {
    pub n: u64,
    pub trials: u64,
    pub mean_bits: f64,
    pub std_bits: f64,
    /// `n·H(P)`.
    pub entropy_bits: f64,
    pub mean_redundancy: f64,
    pub bound_bits: Option<f64>,
    pub mean_c1_bits: f64,
    pub mean_c2_bits: f64,
    pub mean_censored: f64,
}

impl RedundancyReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{}",
            self.n,
            self.trials,
            self.mean_bits,
            self.std_bits,
            self.entropy_bits,
            self.mean_redundancy,
            self.bound_bits.map_or_else(String::new, |b| format!("{b:.6}")),
        )
    }
}

/// Encodes `trials` independent samples of length `n` and compares the mean
/// container size with `n·H`.
pub fn empirical_redundancy(
    spec: &SourceSpec,
    params: &CodecParams,
    n: usize,
    trials: u64,
    comparator: &Comparator,
) -> Result<RedundancyReport> {
    if trials == 0 {
        return domain("need at least one trial");
    }
    params.validate()?;
    let sampler = Sampler::new(&spec.kind)?;
    let entropy_bits = n as f64 * spec.kind.entropy_rate()?;
    let reports = (0..trials)
        .into_par_iter()
        .map(|t| codelength_report(&draw_many(&sampler, spec.seed, n, t), params))
        .collect::<Result<Vec<_>>>()?;
    let count = trials as f64;
    let mean_of =
        |f: &dyn Fn(&crate::codec::CodelengthReport) -> u64| reports.iter().map(|r| f(r) as f64).sum::<f64>() / count;
    let mean_bits = mean_of(&|r| r.total_bits);
    let std_bits = if trials > 1 {
        let ss: f64 = reports.iter().map(|r| (r.total_bits as f64 - mean_bits).powi(2)).sum();
        (ss / (count - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(RedundancyReport {
        n: n as u64,
        trials,
        mean_bits,
        std_bits,
        entropy_bits,
        mean_redundancy: mean_bits - entropy_bits,
        bound_bits: comparator.bits(n as u64)?,
        mean_c1_bits: mean_of(&|r| r.c1_bits),
        mean_c2_bits: mean_of(&|r| r.c2_bits),
        mean_censored: mean_of(&|r| r.censored_count),
    })
}
