//! Special functions and numerical integration shared by the model and bound code.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

pub const LOG2_E: f64 = std::f64::consts::LOG2_E;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

/// `log₂ Γ(x)` for `x > 0`.
pub fn log2_gamma(x: f64) -> f64 {
    ln_gamma(x) * LOG2_E
}

/// Even-index Bernoulli numbers divided by the matching factorial:
/// `B_{2j} / (2j)!` for `j = 1..=7`.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
];

/// Start of the Euler–Maclaurin tail; terms below it are summed directly.
const EM_START: u64 = 16;

/// `Σ_{k ≥ from} k^{-s}` for `s > 1`, `from ≥ 1`.
///
/// Terms below `max(from, 16)` are added directly; the rest is the
/// Euler–Maclaurin expansion with seven Bernoulli corrections, whose remainder
/// is far below `1e-15` for every admissible `s`.
pub fn power_tail(s: f64, from: u64) -> f64 {
    debug_assert!(s > 1.0 && from >= 1);
    let start = from.max(EM_START);
    let mut head = 0.0;
    for k in (from..start).rev() {
        head += (k as f64).powf(-s);
    }
    let m = start as f64;
    let mut tail = m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
    let mut rising = s;
    let mut pow = m.powf(-s - 1.0);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail += c * rising * pow;
        let i = 2 * j as u32 + 1;
        rising *= (s + f64::from(i)) * (s + f64::from(i) + 1.0);
        pow /= m * m;
    }
    head + tail
}

/// `Σ_{k ≥ from} k^{-s} ln k` for `s > 1`, via the `s`-derivative of the
/// expansion used in [`power_tail`].
pub fn power_log_tail(s: f64, from: u64) -> f64 {
    debug_assert!(s > 1.0 && from >= 1);
    let start = from.max(EM_START);
    let mut head = 0.0;
    for k in (from..start).rev() {
        let kf = k as f64;
        head += kf.powf(-s) * kf.ln();
    }
    let m = start as f64;
    let lm = m.ln();
    let mut tail = m.powf(1.0 - s) * (lm / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0))) + 0.5 * m.powf(-s) * lm;
    // P_j(s) = s (s+1) ... (s+2j-2); P_j'(s) = P_j(s) Σ 1/(s+i).
    let mut rising = s;
    let mut harmonic = 1.0 / s;
    let mut pow = m.powf(-s - 1.0);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        tail += c * pow * rising * (lm - harmonic);
        let i = f64::from(2 * j as u32 + 1);
        rising *= (s + i) * (s + i + 1.0);
        harmonic += 1.0 / (s + i) + 1.0 / (s + i + 1.0);
        pow /= m * m;
    }
    head + tail
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1], as published.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Result of an adaptive integration: value and estimated absolute error.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Bisects the segment with the largest error estimate until the total
/// estimate is below `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<Quadrature> {
    const MAX_SEGMENTS: usize = 4000;
    if !(a.is_finite() && b.is_finite()) {
        return domain("integration bounds must be finite");
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    let (value, error) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let (mut total, mut total_err) = (value, error);
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Resource(format!(
                "quadrature did not converge within {MAX_SEGMENTS} segments (error estimate {total_err:e})"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = kronrod15(&f, worst.a, mid);
        let (rv, re) = kronrod15(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        if !total.is_finite() {
            return domain("integrand is not finite on the interval");
        }
    }
    // Re-add from the segments to shed drift accumulated by the running update.
    let mut sum = CompensatedSum::default();
    let mut err = 0.0;
    for s in heap.iter() {
        sum.add(s.value);
        err += s.error;
    }
    Ok(Quadrature {
        value: sum.value(),
        error: err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force partial sum plus the midpoint of the integral bracket
    /// `[∫_{N+1}^∞, ∫_N^∞]` for the remainder.
    fn bracketed_power_sum(s: f64, from: u64, terms: u64) -> (f64, f64) {
        let mut sum = CompensatedSum::default();
        let end = from + terms;
        for k in from..end {
            sum.add((k as f64).powf(-s));
        }
        // ∫_end^∞ x^{-s} ≤ Σ_{k≥end} k^{-s} ≤ end^{-s} + ∫_end^∞ x^{-s}
        let lo = (end as f64).powf(1.0 - s) / (s - 1.0);
        let width = (end as f64).powf(-s);
        (sum.value() + lo + 0.5 * width, 0.5 * width)
    }

    #[test]
    fn power_tail_matches_series_oracle() {
        for &s in &[1.5, 2.0, 2.5, 3.0, 7.0] {
            for &from in &[1u64, 2, 11, 100, 12_345] {
                let (oracle, slack) = bracketed_power_sum(s, from, 2_000_000);
                let got = power_tail(s, from);
                assert!(
                    (got - oracle).abs() <= slack + 1e-12,
                    "s={s} from={from}: {got} vs {oracle} ± {slack}"
                );
            }
        }
    }

    #[test]
    fn zeta_two_and_four_closed_forms() {
        let pi = std::f64::consts::PI;
        assert!((power_tail(2.0, 1) - pi * pi / 6.0).abs() < 1e-14);
        assert!((power_tail(4.0, 1) - pi.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn log_tail_matches_finite_difference() {
        for &s in &[1.3, 2.0, 3.5] {
            for &from in &[1u64, 5, 40] {
                let h = 1e-5;
                let fd = -(power_tail(s + h, from) - power_tail(s - h, from)) / (2.0 * h);
                let got = power_log_tail(s, from);
                assert!((got - fd).abs() < 1e-7 * got.abs().max(1.0), "s={s}: {got} vs {fd}");
            }
        }
    }

    #[test]
    fn log_tail_known_value() {
        // -ζ'(2) = 0.93754825431584375370...
        assert!((power_log_tail(2.0, 1) - 0.937_548_254_315_843_8).abs() < 1e-13);
    }

    #[test]
    fn quadrature_closed_forms() {
        let q = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 0.0).unwrap();
        assert!((q.value - 2.0).abs() < 1e-12);
        let q = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-10, 0.0).unwrap();
        assert!((q.value - 2.0 / 3.0).abs() < 1e-9);
        let q = integrate(|x| (-x).exp(), 0.0, 50.0, 1e-12, 0.0).unwrap();
        assert!((q.value - (1.0 - (-50.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn gamma_values() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((ln_gamma(0.5) - sqrt_pi.ln()).abs() < 1e-15);
        assert!((log2_gamma(5.0) - 24f64.log2()).abs() < 1e-13);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-14).abs() < 1e-20);
    }
}
