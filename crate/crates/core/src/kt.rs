//! Krichevsky–Trofimov mixture over a finite alphabet and exact minimax
//! regret (Shtarkov sums) of memoryless sources.

use crate::error::{domain, Error, Result};
use crate::special::{ln_gamma, log2_gamma, CompensatedSum, LOG2_E};

/// Default cap on the number of types enumerated by [`shtarkov_regret_exact`].
pub const DEFAULT_TYPE_BUDGET: u64 = 10_000_000;

/// Occurrence counts of symbols `0..alphabet_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountVector {
    counts: Vec<u64>,
    total: u64,
}

impl CountVector {
    pub fn zeros(alphabet_size: usize) -> Result<Self> {
        Self::new(vec![0; alphabet_size])
    }

    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return domain("alphabet must contain at least one symbol");
        }
        let total = counts.iter().sum();
        Ok(Self { counts, total })
    }

    /// Counts of `symbols`, each of which must be below `alphabet_size`.
    pub fn from_sequence(alphabet_size: usize, symbols: &[usize]) -> Result<Self> {
        let mut cv = Self::zeros(alphabet_size)?;
        for &s in symbols {
            cv.increment(s)?;
        }
        Ok(cv)
    }

    pub fn increment(&mut self, symbol: usize) -> Result<()> {
        match self.counts.get_mut(symbol) {
            Some(c) => {
                *c += 1;
                self.total += 1;
                Ok(())
            }
            None => domain(format!(
                "symbol {symbol} outside alphabet of size {}",
                self.counts.len()
            )),
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }
}

/// A base-2 log-probability; `-∞` stands for probability zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value > 0.0 {
            return domain(format!("{value} is not a base-2 log-probability"));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Ideal codelength in bits.
    pub fn bits(self) -> f64 {
        -self.0
    }
}

/// A non-negative rational `numerator / denominator`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// KT predictive probability of `symbol` given `counts`:
/// `(2·n_j + 1) / (2·n + alphabet_size)`.
pub fn kt_conditional(counts: &CountVector, symbol: usize) -> Result<Ratio> {
    let Some(&c) = counts.counts.get(symbol) else {
        return domain(format!(
            "symbol {symbol} outside alphabet of size {}",
            counts.alphabet_size()
        ));
    };
    Ok(Ratio {
        numerator: 2 * c + 1,
        denominator: 2 * counts.total + counts.alphabet_size() as u64,
    })
}

/// `log₂` of the KT mixture probability of any sequence with these counts.
pub fn kt_log_marginal(counts: &CountVector) -> LogProb {
    let half_k = counts.alphabet_size() as f64 / 2.0;
    let ln_half = ln_gamma(0.5);
    let mut ln = ln_gamma(half_k) - ln_gamma(counts.total as f64 + half_k);
    for &c in &counts.counts {
        if c > 0 {
            ln += ln_gamma(c as f64 + 0.5) - ln_half;
        }
    }
    LogProb(ln.min(0.0) * LOG2_E)
}

/// Upper bound on the pointwise regret of the KT mixture over an
/// `alphabet_size`-ary alphabet at length `n`:
/// `log₂ Γ(n+m/2)Γ(1/2) / (Γ(n+1/2)Γ(m/2))`.
pub fn kt_pointwise_regret_bound(alphabet_size: u64, n: u64) -> Result<f64> {
    if alphabet_size == 0 {
        return domain("alphabet size must be positive");
    }
    let (m, n) = (alphabet_size as f64, n as f64);
    Ok(log2_gamma(n + m / 2.0) + log2_gamma(0.5) - log2_gamma(n + 0.5) - log2_gamma(m / 2.0))
}

/// Number of types (compositions of `n` into `m` ordered non-negative parts),
/// saturating at `u64::MAX`.
pub fn type_count(m: u64, n: u64) -> u64 {
    // C(n+m-1, m-1), built as a running product of exact binomials.
    let k = m.saturating_sub(1).min(n);
    let top = n + m - 1;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(top - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Exact minimax regret `log₂ Σ_x sup_P Pⁿ(x)` of memoryless sources over
/// `m` symbols at length `n`, by enumeration of types.
pub fn shtarkov_regret_exact(m: u64, n: u64) -> Result<f64> {
    shtarkov_regret_exact_with_budget(m, n, DEFAULT_TYPE_BUDGET)
}

pub fn shtarkov_regret_exact_with_budget(m: u64, n: u64, budget: u64) -> Result<f64> {
    if m == 0 || n == 0 {
        return domain("alphabet size and length must be positive");
    }
    let types = type_count(m, n);
    if types > budget {
        return Err(Error::Resource(format!(
            "{types} types for m={m}, n={n} exceed the enumeration budget of {budget}"
        )));
    }
    // ln of multinomial(n; c) Π (c_j/n)^{c_j} = [ln n! − n ln n] + Σ_j g(c_j)
    // with g(c) = c ln c − ln c!  (0 ln 0 = 0).
    let g: Vec<f64> = (0..=n)
        .map(|c| {
            let cf = c as f64;
            let clnc = if c == 0 { 0.0 } else { cf * cf.ln() };
            clnc - ln_gamma(cf + 1.0)
        })
        .collect();
    let nf = n as f64;
    let base = ln_gamma(nf + 1.0) - nf * nf.ln();
    let mut sum = CompensatedSum::default();
    enumerate_types(&g, m as usize, n as usize, base, &mut sum);
    Ok(sum.value().log2())
}

fn enumerate_types(g: &[f64], parts: usize, remaining: usize, acc: f64, sum: &mut CompensatedSum) {
    if parts == 1 {
        sum.add((acc + g[remaining]).exp());
        return;
    }
    if parts == 2 {
        for c in 0..=remaining {
            sum.add((acc + g[c] + g[remaining - c]).exp());
        }
        return;
    }
    for c in 0..=remaining {
        enumerate_types(g, parts - 1, remaining - c, acc + g[c], sum);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_strings(m: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
        let total = m.pow(n as u32);
        (0..total).map(move |mut code| {
            let mut s = vec![0; n];
            for slot in s.iter_mut() {
                *slot = code % m;
                code /= m;
            }
            s
        })
    }

    /// Maximum-likelihood probability of a string: Π (n_j/n)^{n_j}.
    fn ml_log2(counts: &[u64]) -> f64 {
        let n: u64 = counts.iter().sum();
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| c as f64 * (c as f64 / n as f64).log2())
            .sum()
    }

    /// Shtarkov sum by brute force over all m^n strings.
    fn shtarkov_brute(m: usize, n: usize) -> f64 {
        all_strings(m, n)
            .map(|s| ml_log2(CountVector::from_sequence(m, &s).unwrap().counts()).exp2())
            .sum::<f64>()
            .log2()
    }

    #[test]
    fn conditional_examples() {
        let cv = CountVector::zeros(2).unwrap();
        assert_eq!(kt_conditional(&cv, 0).unwrap().to_f64(), 0.5);
        let cv = CountVector::new(vec![2, 0]).unwrap();
        assert_eq!(
            kt_conditional(&cv, 0).unwrap(),
            Ratio {
                numerator: 5,
                denominator: 6
            }
        );
        let cv = CountVector::new(vec![2, 1, 0]).unwrap();
        assert_eq!(
            kt_conditional(&cv, 0).unwrap(),
            Ratio {
                numerator: 5,
                denominator: 9
            }
        );
        assert!(kt_conditional(&cv, 3).is_err());
    }

    #[test]
    fn conditionals_sum_to_one_exactly() {
        let cv = CountVector::new(vec![4, 0, 7, 1, 1]).unwrap();
        let mut num = 0;
        let mut den = 0;
        for j in 0..5 {
            let r = kt_conditional(&cv, j).unwrap();
            num += r.numerator;
            den = r.denominator;
        }
        assert_eq!(num, den);
    }

    #[test]
    fn marginal_examples() {
        let m = |c: Vec<u64>| kt_log_marginal(&CountVector::new(c).unwrap()).value();
        assert!((m(vec![1, 0]) + 1.0).abs() < 1e-12);
        assert!((m(vec![2, 0]) - (3.0f64 / 8.0).log2()).abs() < 1e-12);
        assert!((m(vec![1, 1]) - (1.0f64 / 8.0).log2()).abs() < 1e-12);
        assert_eq!(m(vec![0, 0, 0]), 0.0);
    }

    #[test]
    fn marginal_normalizes_exhaustively() {
        for (m, n) in [(2, 16), (3, 10), (4, 8), (5, 6), (16, 4), (2, 1), (7, 5)] {
            let total: f64 = all_strings(m, n)
                .map(|s| {
                    kt_log_marginal(&CountVector::from_sequence(m, &s).unwrap())
                        .value()
                        .exp2()
                })
                .sum();
            assert!((total - 1.0).abs() < 1e-9, "m={m} n={n}: {total}");
        }
    }

    #[test]
    fn chain_rule_along_sequences() {
        let seqs: [&[usize]; 3] = [&[0, 1, 1, 2, 0, 0, 3, 1], &[2, 2, 2, 2, 2], &[3, 0, 1, 2]];
        for seq in seqs {
            let mut cv = CountVector::zeros(4).unwrap();
            let mut acc = 0.0;
            for &s in seq {
                acc += kt_conditional(&cv, s).unwrap().to_f64().log2();
                cv.increment(s).unwrap();
            }
            assert!((acc - kt_log_marginal(&cv).value()).abs() < 1e-10);
        }
    }

    #[test]
    fn shtarkov_examples() {
        assert_eq!(shtarkov_regret_exact(1, 5).unwrap(), 0.0);
        assert!((shtarkov_regret_exact(2, 1).unwrap() - 1.0).abs() < 1e-14);
        assert!((shtarkov_regret_exact(2, 2).unwrap() - 2.5f64.log2()).abs() < 1e-14);
    }

    #[test]
    fn shtarkov_matches_brute_force() {
        for (m, n) in [(2, 12), (3, 8), (4, 6), (5, 5), (6, 3)] {
            let exact = shtarkov_regret_exact(m as u64, n as u64).unwrap();
            let brute = shtarkov_brute(m, n);
            assert!((exact - brute).abs() < 1e-10, "m={m} n={n}: {exact} vs {brute}");
        }
    }

    #[test]
    fn shtarkov_budget() {
        assert_eq!(type_count(3, 8), 45);
        assert_eq!(type_count(1, 100), 1);
        assert_eq!(type_count(5, 0), 1);
        match shtarkov_regret_exact_with_budget(3, 8, 44) {
            Err(Error::Resource(msg)) => assert!(msg.contains("44")),
            other => panic!("expected resource error, got {other:?}"),
        }
        assert!(shtarkov_regret_exact(0, 3).is_err());
    }

    #[test]
    fn pointwise_bound_examples() {
        assert!(kt_pointwise_regret_bound(2, 0).unwrap().abs() < 1e-14);
        assert!((kt_pointwise_regret_bound(2, 1).unwrap() - 1.0).abs() < 1e-13);
        assert!(shtarkov_regret_exact(3, 8).unwrap() <= kt_pointwise_regret_bound(3, 8).unwrap());
    }

    #[test]
    fn regret_ordering_exhaustive() {
        for (m, n) in [(2usize, 16usize), (3, 10), (4, 8), (16, 4), (2, 5), (6, 6)] {
            let rstar = shtarkov_regret_exact(m as u64, n as u64).unwrap();
            let kt_max = all_strings(m, n)
                .map(|s| {
                    let cv = CountVector::from_sequence(m, &s).unwrap();
                    ml_log2(cv.counts()) - kt_log_marginal(&cv).value()
                })
                .fold(f64::MIN, f64::max);
            let bound = kt_pointwise_regret_bound(m as u64, n as u64).unwrap();
            assert!(rstar <= kt_max + 1e-12, "m={m} n={n}");
            assert!(kt_max <= bound + 1e-12, "m={m} n={n}");
        }
    }

    #[test]
    fn log_prob_rejects_positive() {
        assert!(LogProb::new(0.5).is_err());
        assert!(LogProb::new(f64::NEG_INFINITY).is_ok());
    }
}
