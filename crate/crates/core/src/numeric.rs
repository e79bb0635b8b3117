//! Small numeric helpers shared by the ensemble and sampling code.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum into this one, keeping both error terms.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Exact `n choose k`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // Each partial product is itself a binomial coefficient, so the
        // division is exact.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exact multinomial coefficient `(Σ counts)! / Π counts!`.
pub fn multinomial(counts: &[u64]) -> BigUint {
    let mut total = 0u64;
    let mut acc = BigUint::one();
    for &c in counts {
        total += c;
        acc *= binomial(total, c);
    }
    acc
}

pub fn ln_factorial(n: u64) -> f64 {
    statrs::function::factorial::ln_factorial(n)
}

/// Nearest `f64` to a big integer, `+inf` past the double range.
pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `p^k` with the convention `0^0 = 1`.
pub fn pow_count(p: f64, k: u64) -> f64 {
    if k == 0 {
        1.0
    } else if k <= i32::MAX as u64 {
        p.powi(k as i32)
    } else {
        p.powf(k as f64)
    }
}

/// `k·ln p` with the convention `0·ln 0 = 0`; `-inf` for an impossible count.
pub fn count_ln_prob(p: f64, k: u64) -> f64 {
    if k == 0 {
        0.0
    } else if p == 0.0 {
        f64::NEG_INFINITY
    } else {
        k as f64 * p.ln()
    }
}
