//! Numerical evaluation of redundancy and regret bounds for envelope classes.
//!
//! Every value is in bits. Natural-log constants that enter the formulas are
//! kept explicit: `LOG2_E` converts nats, and `2 ln 2` is the factor from
//! `ln(1 − x) ≥ −(2 ln 2)·x` on `[0, ½]`. The leading terms for the
//! power-law upper bound and the exponential class are exact in nats (they
//! come from optimizing the regret bound written with natural logs), so they
//! are evaluated with `ln n` and scaled by `LOG2_E`.

use std::f64::consts::{E, LN_2, PI};
use std::fmt;

use crate::envelope::Envelope;
use crate::error::{domain, Result};
use crate::special::{integrate, power_tail, LOG2_E};

/// Tail mass of `e^{−u}` beyond this point is below `1e−26`.
const EXP_CUTOFF: f64 = 61.0;

/// Integer minimization is exhaustive up to this cutoff.
pub const EXHAUSTIVE_SCAN_LIMIT: u64 = 1_000_000;

const QUAD_REL_TOL: f64 = 1e-10;

/// One evaluated bound with its inputs and validity status.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: f64,
    pub params: Vec<(&'static str, f64)>,
    pub valid: bool,
    pub messages: Vec<String>,
}

impl BoundReport {
    fn new(name: &'static str, value: f64, params: Vec<(&'static str, f64)>) -> Self {
        Self {
            name,
            value,
            params,
            valid: true,
            messages: Vec::new(),
        }
    }

    fn require(&mut self, condition: bool, message: impl Into<String>) {
        if !condition {
            self.valid = false;
            self.messages.push(message.into());
        }
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<20} {:>14.6} bits", self.name, self.value)?;
        write!(f, "  {}", if self.valid { "valid" } else { "INVALID" })?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        for m in &self.messages {
            write!(f, " ({m})")?;
        }
        Ok(())
    }
}

/// `ζ(alpha) = Σ_{k≥1} k^{−alpha}`.
pub fn zeta(alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha <= 1.0 {
        return domain(format!("zeta needs alpha > 1, got {alpha}"));
    }
    Ok(power_tail(alpha, 1))
}

/// `∫_0^upper g(t)/t^{1+s} dt` for `g(t) ~ t` near 0, with `0 < s < 1`.
///
/// The substitution `t = v^{1/(1−s)}` removes the `t^{−s}` singularity:
/// the integrand becomes `g(t)/t / (1−s)`.
fn singular_integral(s: f64, upper: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let q = 1.0 / (1.0 - s);
    let v_max = upper.powf(1.0 - s);
    let quad = integrate(
        |v| {
            let t = v.powf(q);
            if t == 0.0 {
                return 0.0;
            }
            g(t) / t * q
        },
        0.0,
        v_max,
        QUAD_REL_TOL,
        0.0,
    )?;
    Ok(quad.value)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return domain(format!("alpha must be a finite real > 1, got {alpha}"));
    }
    Ok(())
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return domain(format!("{name} must be a finite real > 0, got {value}"));
    }
    Ok(())
}

/// Leading constant of the power-law redundancy lower bound:
/// `(1/α) ∫_1^∞ u^{1/α − 1} (1 − e^{−1/(ζ(α)u)}) du`.
pub fn redundancy_lower_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let z = zeta(alpha)?;
    // t = 1/u turns the range into (0, 1].
    let integral = singular_integral(alpha.recip(), 1.0, |t| -(-t / z).exp_m1())?;
    Ok(integral / alpha)
}

/// `∫_0^∞ (1 − e^{−u}) u^{−1−1/α} du`, the constant governing the expected
/// number of distinct symbols.
pub fn distinct_count_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let s = alpha.recip();
    let head = singular_integral(s, 1.0, |t| -(-t).exp_m1())?;
    // On [1, ∞): ∫ u^{−1−s} = 1/s, minus the exponentially small part.
    let damped = integrate(|u| (-u).exp() * u.powf(-1.0 - s), 1.0, EXP_CUTOFF, QUAD_REL_TOL, 0.0)?;
    Ok(head + 1.0 / s - damped.value)
}

/// The objective minimized by [`regret_upper_bound`] at cutoff `u`.
fn regret_objective(n: u64, tail: f64, u: u64) -> f64 {
    n as f64 * tail * LOG2_E + (u - 1) as f64 / 2.0 * (n as f64).log2() + 2.0
}

/// `min_{1≤u≤n} [n·F̄(u)·log₂e + (u−1)/2·log₂n] + 2`.
///
/// Exhaustive for `u ≤ 10⁶`; beyond that a golden-section search over the
/// integers followed by a local scan.
pub fn regret_upper_bound(env: &Envelope, n: u64) -> Result<BoundReport> {
    env.validate()?;
    if n == 0 {
        return domain("length must be at least 1");
    }
    let scan_to = n.min(EXHAUSTIVE_SCAN_LIMIT);
    let tails = env.tail_sums(scan_to)?;
    let (mut best_u, mut best) = (1, f64::INFINITY);
    for u in 1..=scan_to {
        let v = regret_objective(n, tails[u as usize], u);
        if v < best {
            best = v;
            best_u = u;
        }
    }
    if n > scan_to {
        let eval = |u: u64| env.tail_sum(u).map(|t| regret_objective(n, t, u));
        let (mut lo, mut hi) = (scan_to, n);
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        while hi - lo > 64 {
            let width = (hi - lo) as f64;
            let m1 = hi - (ratio * width) as u64;
            let m2 = lo + (ratio * width) as u64;
            if eval(m1)? <= eval(m2)? {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        for u in lo..=hi {
            let v = eval(u)?;
            if v < best {
                best = v;
                best_u = u;
            }
        }
    }
    Ok(BoundReport::new(
        "regret_upper",
        best,
        vec![("n", n as f64), ("u", best_u as f64)],
    ))
}

/// Lower and upper leading terms for the power-law class `1 ∧ C·k^{−α}`.
pub fn powerlaw_bounds(alpha: f64, c: f64, n: u64) -> Result<(BoundReport, BoundReport)> {
    check_alpha(alpha)?;
    check_positive("C", c)?;
    let nf = n as f64;
    let z = zeta(alpha)?;
    let mass = c * z;
    let m = mass.powf(alpha.recip()).floor().max(1.0);
    let lower_value = nf.powf(alpha.recip()) * redundancy_lower_constant(alpha)? * m.log2();
    let params = vec![("alpha", alpha), ("C", c), ("n", nf)];
    let mut lower = BoundReport::new("powerlaw_lower", lower_value, params.clone());
    lower.require(mass >= 2f64.powf(alpha), "C·ζ(alpha) < 2^alpha");
    lower.require(m >= 2.0, "⌊(C·ζ(alpha))^{1/alpha}⌋ < 2 gives a trivial bound");
    let upper_value =
        (2.0 * c * nf / (alpha - 1.0)).powf(alpha.recip()) * nf.ln().max(0.0).powf(1.0 - alpha.recip()) * LOG2_E;
    let upper = BoundReport::new("powerlaw_upper", upper_value, params);
    Ok((lower, upper))
}

/// Leading term of the expected redundancy of the censoring code with the
/// scheduled cutoffs on the power-law class: `(4Cn/(α−1))^{1/α}·log₂n`.
pub fn censoring_redundancy_bound(alpha: f64, c: f64, n: u64) -> Result<f64> {
    check_alpha(alpha)?;
    check_positive("C", c)?;
    let nf = n as f64;
    Ok((4.0 * c * nf / (alpha - 1.0)).powf(alpha.recip()) * nf.log2())
}

/// Leading term of the expected Elias cost of the censored symbols:
/// `2C/((α−1)λ^{α−1})·n^{1/α}·log₂n` with `λ = (4C/(α−1))^{1/α}`.
pub fn censored_cost_bound(alpha: f64, c: f64, n: u64) -> Result<f64> {
    check_alpha(alpha)?;
    check_positive("C", c)?;
    let nf = n as f64;
    let lambda = (4.0 * c / (alpha - 1.0)).powf(alpha.recip());
    Ok(2.0 * c / ((alpha - 1.0) * lambda.powf(alpha - 1.0)) * nf.powf(alpha.recip()) * nf.log2())
}

/// Lower and upper leading terms for the exponential class `1 ∧ C·e^{−α·k}`.
pub fn exponential_bounds(alpha: f64, c: f64, n: u64) -> Result<(BoundReport, BoundReport)> {
    check_positive("alpha", alpha)?;
    check_positive("C", c)?;
    let ln_n = (n as f64).ln();
    let squared = ln_n * ln_n * LOG2_E;
    let params = vec![("alpha", alpha), ("C", c), ("n", n as f64)];
    let mut lower = BoundReport::new("exponential_lower", squared / (8.0 * alpha), params.clone());
    lower.require(c > (2.0 * alpha).exp(), "C ≤ e^{2·alpha}");
    let upper = BoundReport::new("exponential_upper", squared / (2.0 * alpha), params);
    Ok((lower, upper))
}

/// Free parameters of the Bayesian redundancy lower bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesperateParams {
    /// Number of two-symbol blocks used by the prior.
    pub p: u64,
    pub lambda: f64,
    pub epsilon: f64,
}

impl DesperateParams {
    pub fn new(p: u64, lambda: f64, epsilon: f64) -> Result<Self> {
        if p == 0 {
            return domain("p must be a positive integer");
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return domain(format!("lambda must lie in (0, 1), got {lambda}"));
        }
        check_positive("epsilon", epsilon)?;
        Ok(Self { p, lambda, epsilon })
    }
}

/// Running sums `c(p) = Σ_{k≤p} f(2k)` and `Σ_{i≤p} log₂ f(2i)`.
struct BlockSums<'a> {
    env: &'a Envelope,
    p: u64,
    mass: f64,
    log_mass: f64,
}

impl<'a> BlockSums<'a> {
    fn new(env: &'a Envelope) -> Self {
        Self {
            env,
            p: 0,
            mass: 0.0,
            log_mass: 0.0,
        }
    }

    fn advance(&mut self) -> f64 {
        self.p += 1;
        let f = self.env.value(2 * self.p);
        self.mass += f;
        self.log_mass += f.log2();
        f
    }
}

fn desperate_report(n: u64, dp: &DesperateParams, sums: &BlockSums<'_>, f_last: f64) -> BoundReport {
    let DesperateParams { p, lambda, epsilon } = *dp;
    let nf = n as f64;
    let c = sums.mass;
    let factor = 1.0 / (1.0 + c / (lambda * lambda * nf * f_last))
        * (1.0 - 4.0 / PI * (5.0 * c / ((1.0 - lambda) * epsilon * nf * f_last)).sqrt());
    let per_block = 0.5 * (nf * (1.0 - lambda) * PI / (2.0 * c * E)).log2() - epsilon;
    let sum = 0.5 * sums.log_mass + p as f64 * per_block;
    let mut report = BoundReport::new(
        "desperate_lower",
        factor * sum,
        vec![("n", nf), ("p", p as f64), ("lambda", lambda), ("epsilon", epsilon)],
    );
    report.require(c > 1.0, format!("c(p) = {c} ≤ 1"));
    report.require(
        f_last > 0.0 && nf > c / f_last * 10.0 / (epsilon * (1.0 - lambda)),
        "n ≤ c(p)/f(2p) · 10/(epsilon(1 − lambda))",
    );
    if !report.value.is_finite() {
        report.valid = false;
    }
    report
}

/// Bayesian lower bound on the minimax redundancy for a given block count.
pub fn desperate_lower_bound(env: &Envelope, n: u64, dp: &DesperateParams) -> Result<BoundReport> {
    env.validate()?;
    DesperateParams::new(dp.p, dp.lambda, dp.epsilon)?;
    let mut sums = BlockSums::new(env);
    let mut f_last = 0.0;
    while sums.p < dp.p {
        f_last = sums.advance();
    }
    Ok(desperate_report(n, dp, &sums, f_last))
}

/// The largest valid [`desperate_lower_bound`] over block counts `p`.
///
/// Valid `p` form a contiguous range because `c(p)/f(2p)` grows with `p`;
/// the scan stops once the length condition fails past that range. Returns
/// the `p = 1` report, marked invalid, when no `p` qualifies.
pub fn best_desperate_lower_bound(env: &Envelope, n: u64, lambda: f64, epsilon: f64) -> Result<BoundReport> {
    env.validate()?;
    DesperateParams::new(1, lambda, epsilon)?;
    let mut sums = BlockSums::new(env);
    let mut best: Option<BoundReport> = None;
    let mut first = None;
    loop {
        let f_last = sums.advance();
        let dp = DesperateParams {
            p: sums.p,
            lambda,
            epsilon,
        };
        let report = desperate_report(n, &dp, &sums, f_last);
        let length_ok = f_last > 0.0 && (n as f64) > sums.mass / f_last * 10.0 / (epsilon * (1.0 - lambda));
        if first.is_none() {
            first = Some(report.clone());
        }
        if report.valid && best.as_ref().is_none_or(|b| report.value > b.value) {
            best = Some(report);
        }
        if !length_ok || sums.p >= n {
            break;
        }
    }
    Ok(best.or(first).expect("at least one block evaluated"))
}

/// Leading terms of `E[Z_n]` when `c_lo·k^{−α} ≤ P(k) ≤ c_hi·k^{−α}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DistinctBounds {
    /// `c_lo^{1/α}·A/α`, to be multiplied by `n^{1/α}(1 − o(1))`.
    pub lower_constant: f64,
    /// `(2 ln 2 · c_hi)^{1/α}·A/α`.
    pub upper_constant: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn expected_distinct_bounds(alpha: f64, c_lo: f64, c_hi: f64, n: u64) -> Result<DistinctBounds> {
    check_alpha(alpha)?;
    check_positive("c_lo", c_lo)?;
    if !(c_hi >= c_lo && c_hi.is_finite()) {
        return domain(format!("need c_lo ≤ c_hi, got {c_lo} > {c_hi}"));
    }
    let s = alpha.recip();
    let a = distinct_count_constant(alpha)?;
    let lower_constant = c_lo.powf(s) * a / alpha;
    let upper_constant = (2.0 * LN_2 * c_hi).powf(s) * a / alpha;
    let scale = (n as f64).powf(s);
    Ok(DistinctBounds {
        lower_constant,
        upper_constant,
        lower: lower_constant * scale,
        upper: upper_constant * scale,
    })
}

/// Bound on the expected Elias cost of transmitting the set of distinct
/// symbols: `2(1 + ∫_1^∞ (1 − e^{−K x^{−α}}) log₂ x dx)` with `K = 2 ln 2·C·n`.
pub fn dictionary_length_bound(alpha: f64, c: f64, n: u64) -> Result<f64> {
    check_alpha(alpha)?;
    check_positive("C", c)?;
    let k = 2.0 * LN_2 * c * n as f64;
    if k == 0.0 {
        return Ok(2.0);
    }
    let s = alpha.recip();
    let ln_k = k.ln();
    // With u = K x^{−α} the integral is (K^s/α²) ∫_0^K (1−e^{−u}) u^{−1−s} log₂(K/u) du.
    let head_end = k.min(1.0);
    let head = singular_integral(s, head_end, |t| -(-t).exp_m1() * (ln_k - t.ln()))?;
    let body = if k > 1.0 {
        // ∫_1^K u^{−1−s} ln(K/u) du in closed form, less the damped part.
        let plain = ln_k / s - (1.0 - k.powf(-s)) / (s * s);
        let damped = integrate(
            |u| (-u).exp() * u.powf(-1.0 - s) * (ln_k - u.ln()),
            1.0,
            k.min(EXP_CUTOFF),
            QUAD_REL_TOL,
            0.0,
        )?;
        plain - damped.value
    } else {
        0.0
    };
    let integral = k.powf(s) / (alpha * alpha) * (head + body) * LOG2_E;
    Ok(2.0 * (1.0 + integral))
}
