//! Interval estimates and paired tests for block error rates.

use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};

/// Two-sided standard normal quantile for `confidence`.
pub fn z_value(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    normal.inverse_cdf(0.5 + confidence / 2.0)
}

/// Wilson score interval for `successes` out of `n`. `n = 0` gives `(0, 1)`.
pub fn wilson_interval(successes: u64, n: u64, confidence: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = z_value(confidence);
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub fn wilson95(successes: u64, n: u64) -> (f64, f64) {
    wilson_interval(successes, n, 0.95)
}

/// Exact two-sided McNemar p-value from the discordant counts: `b` pairs
/// where only the first system failed and `c` where only the second did.
pub fn mcnemar_exact(b: u64, c: u64) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    let binom = Binomial::new(0.5, n).expect("valid binomial");
    (2.0 * binom.cdf(b.min(c))).min(1.0)
}

/// Discordant counts of two paired failure vectors over their common prefix.
pub fn discordant(first: &[bool], second: &[bool]) -> (u64, u64) {
    first
        .iter()
        .zip(second)
        .fold((0, 0), |(b, c), (&x, &y)| (b + (x && !y) as u64, c + (!x && y) as u64))
}

/// Whether `a` has a lower error rate than `b` at the 5% level, judged by
/// disjoint Wilson intervals or, for paired data, the exact McNemar test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub only_a_failed: u64,
    pub only_b_failed: u64,
    pub mcnemar_p: f64,
}

impl Comparison {
    pub fn new(a_fail: &[bool], b_fail: &[bool]) -> Self {
        let count = |v: &[bool]| v.iter().filter(|&&f| f).count() as u64;
        let (only_a_failed, only_b_failed) = discordant(a_fail, b_fail);
        Self {
            a: wilson95(count(a_fail), a_fail.len() as u64),
            b: wilson95(count(b_fail), b_fail.len() as u64),
            only_a_failed,
            only_b_failed,
            mcnemar_p: mcnemar_exact(only_a_failed, only_b_failed),
        }
    }

    pub fn intervals_disjoint(&self) -> bool {
        self.a.1 < self.b.0 || self.b.1 < self.a.0
    }

    /// `a` fails less often than `b`, significantly.
    pub fn a_better(&self) -> bool {
        let fewer = self.only_a_failed < self.only_b_failed;
        fewer && (self.intervals_disjoint() || self.mcnemar_p < 0.05)
    }
}
