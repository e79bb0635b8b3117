//! Statistical weights over vote configurations: the multiplicity function
//! `g = M^N · N! · Π p_k^{N_k} / N_k!`, the multinomial mass it scales, and
//! the binomial marginal of a single party's count.
//!
//! Up to [`EXACT_ELECTOR_LIMIT`] electors the factorial ratios are exact big
//! integers; above it everything runs in log space.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ElectoralSystem, Tally};
use crate::numeric::{self, big_to_f64, count_ln_prob, ln_factorial, pow_count};

/// Largest elector count evaluated through exact factorials.
pub const EXACT_ELECTOR_LIMIT: u64 = 150;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedTally {
    pub tally: Tally,
    pub multiplicity: f64,
    pub pmf: f64,
}

impl WeightedTally {
    pub fn new(tally: Tally, sys: &ElectoralSystem) -> Result<Self> {
        let pmf = multinomial_pmf(&tally, sys)?;
        let multiplicity = pmf * state_count(sys);
        Ok(Self { tally, multiplicity, pmf })
    }
}

/// `M^N`, the number of equally weighted ordered votes.
pub fn state_count(sys: &ElectoralSystem) -> f64 {
    (sys.parties() as f64).powf(sys.electors() as f64)
}

pub fn multinomial_pmf(tally: &Tally, sys: &ElectoralSystem) -> Result<f64> {
    sys.check_counts(tally.counts())?;
    Ok(pmf_of_counts(tally.counts(), sys.probs(), sys.electors()))
}

pub fn multiplicity(tally: &Tally, sys: &ElectoralSystem) -> Result<f64> {
    sys.check_counts(tally.counts())?;
    let counts = tally.counts();
    if sys.electors() <= EXACT_ELECTOR_LIMIT {
        let pmf = pmf_of_counts(counts, sys.probs(), sys.electors());
        Ok(pmf * state_count(sys))
    } else {
        let ln_pmf = ln_pmf_of_counts(counts, sys.probs(), sys.electors());
        Ok((ln_pmf + sys.electors() as f64 * (sys.parties() as f64).ln()).exp())
    }
}

fn pmf_of_counts(counts: &[u64], probs: &[f64], electors: u64) -> f64 {
    if counts.iter().zip(probs).any(|(&c, &p)| c > 0 && p == 0.0) {
        return 0.0;
    }
    if electors <= EXACT_ELECTOR_LIMIT {
        let coefficient = big_to_f64(&numeric::multinomial(counts));
        let power: f64 = counts.iter().zip(probs).map(|(&c, &p)| pow_count(p, c)).product();
        // Tiny probabilities can underflow the product while the log-space
        // value is still representable.
        if power >= f64::MIN_POSITIVE {
            return coefficient * power;
        }
    }
    ln_pmf_of_counts(counts, probs, electors).exp()
}

fn ln_pmf_of_counts(counts: &[u64], probs: &[f64], electors: u64) -> f64 {
    let mut ln = ln_factorial(electors);
    for (&c, &p) in counts.iter().zip(probs) {
        ln += count_ln_prob(p, c) - ln_factorial(c);
    }
    ln
}

/// Probability that party `party` (1-based) receives exactly `count` of the
/// `N` electors.
pub fn binomial_marginal(party: usize, count: u64, sys: &ElectoralSystem) -> Result<f64> {
    if party == 0 || party > sys.parties() {
        return Err(Error::IndexOutOfRange { index: party, parties: sys.parties() });
    }
    let n = sys.electors();
    if count > n {
        return Err(Error::CountOutOfRange { count, electors: n });
    }
    let p = sys.probs()[party - 1];
    Ok(binomial_pmf(n, count, p))
}

pub(crate) fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    if (k > 0 && p == 0.0) || (k < n && q == 0.0) {
        return 0.0;
    }
    if n <= EXACT_ELECTOR_LIMIT {
        let power = pow_count(p, k) * pow_count(q, n - k);
        if power >= f64::MIN_POSITIVE {
            return big_to_f64(&numeric::binomial(n, k)) * power;
        }
    }
    let ln = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
        + count_ln_prob(p, k)
        + count_ln_prob(q, n - k);
    ln.exp()
}

/// Per-system lookup tables for streaming the multinomial mass over many
/// tallies in `O(M)` per tally.
#[derive(Debug, Clone)]
pub struct PmfKernel {
    parties: usize,
    ln_mode: bool,
    // exact mode: N! as f64 and 1/k!; log mode: ln N! and ln k!
    top: f64,
    per_count: Vec<f64>,
    // per party, indexed by count: p^c (exact) or c·ln p (log)
    powers: Vec<Vec<f64>>,
}

impl PmfKernel {
    pub fn new(sys: &ElectoralSystem) -> Self {
        let n = sys.electors();
        let ln_mode = n > EXACT_ELECTOR_LIMIT
            || sys.probs().iter().any(|&p| p > 0.0 && pow_count(p, n) < f64::MIN_POSITIVE);
        let counts = 0..=n;
        let (top, per_count) = if ln_mode {
            (ln_factorial(n), counts.clone().map(ln_factorial).collect())
        } else {
            (
                big_to_f64(&numeric::factorial(n)),
                counts.clone().map(|c| 1.0 / big_to_f64(&numeric::factorial(c))).collect(),
            )
        };
        let powers = sys
            .probs()
            .iter()
            .map(|&p| {
                counts
                    .clone()
                    .map(|c| if ln_mode { count_ln_prob(p, c) } else { pow_count(p, c) })
                    .collect()
            })
            .collect();
        Self { parties: sys.parties(), ln_mode, top, per_count, powers }
    }

    /// Multinomial mass of `counts`, which must already belong to the system.
    pub fn pmf(&self, counts: &[u64]) -> f64 {
        debug_assert_eq!(counts.len(), self.parties);
        if self.ln_mode {
            let mut ln = self.top;
            for (k, &c) in counts.iter().enumerate() {
                ln += self.powers[k][c as usize] - self.per_count[c as usize];
            }
            ln.exp()
        } else {
            let mut acc = self.top;
            for (k, &c) in counts.iter().enumerate() {
                acc *= self.powers[k][c as usize] * self.per_count[c as usize];
            }
            acc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Compositions;
    use crate::model::{validate_system, PartyDistribution};
    use crate::numeric::CompensatedSum;

    fn table2() -> ElectoralSystem {
        validate_system(5, &[0.1, 0.3, 0.6]).unwrap()
    }

    fn g(counts: &[u64]) -> f64 {
        multiplicity(&Tally::new(counts.to_vec()), &table2()).unwrap()
    }

    #[test]
    fn table_two_multiplicities() {
        // 243 · 0.6^5 and 243 · 5 · 0.1 · 0.6^4
        assert!((g(&[0, 0, 5]) - 18.895_68).abs() < 1e-10);
        assert!((g(&[1, 0, 4]) - 15.746_4).abs() < 1e-10);
        assert!((g(&[0, 0, 5]) - 18.9).abs() <= 0.05);
    }

    #[test]
    fn certain_outcome_absorbs_everything() {
        let sys = validate_system(6, &[1.0, 0.0, 0.0]).unwrap();
        let g = multiplicity(&Tally::new(vec![6, 0, 0]), &sys).unwrap();
        assert_eq!(g, 3f64.powi(6));
        assert_eq!(multiplicity(&Tally::new(vec![5, 1, 0]), &sys).unwrap(), 0.0);
    }

    #[test]
    fn pmf_examples() {
        let p = multinomial_pmf(&Tally::new(vec![0, 0, 5]), &table2()).unwrap();
        assert!((p - 0.077_76).abs() < 1e-15);
        let sys = validate_system(2, &[0.5, 0.5]).unwrap();
        assert_eq!(multinomial_pmf(&Tally::new(vec![1, 1]), &sys).unwrap(), 0.5);
        let sys = validate_system(2, &[0.0, 1.0]).unwrap();
        assert_eq!(multinomial_pmf(&Tally::new(vec![1, 1]), &sys).unwrap(), 0.0);
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(
            multiplicity(&Tally::new(vec![5, 0]), &table2()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            multinomial_pmf(&Tally::new(vec![1, 0, 0, 4]), &table2()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn marginal_examples() {
        let sys = table2();
        assert!((binomial_marginal(1, 1, &sys).unwrap() - 0.328_05).abs() < 1e-15);
        assert!((binomial_marginal(3, 5, &sys).unwrap() - 0.077_76).abs() < 1e-15);
        let sys = validate_system(4, &[0.0, 1.0]).unwrap();
        assert_eq!(binomial_marginal(1, 0, &sys).unwrap(), 1.0);
        assert_eq!(binomial_marginal(1, 2, &sys).unwrap(), 0.0);
    }

    #[test]
    fn marginal_errors() {
        let sys = table2();
        assert_eq!(
            binomial_marginal(0, 1, &sys),
            Err(Error::IndexOutOfRange { index: 0, parties: 3 })
        );
        assert_eq!(
            binomial_marginal(4, 1, &sys),
            Err(Error::IndexOutOfRange { index: 4, parties: 3 })
        );
        assert_eq!(
            binomial_marginal(1, 6, &sys),
            Err(Error::CountOutOfRange { count: 6, electors: 5 })
        );
    }

    #[test]
    fn multiplicities_total_three_to_the_fifth() {
        let sys = table2();
        let total: CompensatedSum = Compositions::new(5, 3)
            .unwrap()
            .map(|t| multiplicity(&t, &sys).unwrap())
            .collect();
        assert!((total.value() - 243.0).abs() <= 243.0 * 1e-12);
    }

    #[test]
    fn log_space_matches_exact_path_across_threshold() {
        // N = 150 is exact, N = 151 runs in log space; compare both against
        // each other's formulation on the same tally.
        for n in [150u64, 151, 300] {
            let sys = validate_system(n as i64, &[0.2, 0.3, 0.5]).unwrap();
            let counts = vec![n / 5, 3 * n / 10, n - n / 5 - 3 * n / 10];
            let exact = big_to_f64(&numeric::multinomial(&counts))
                * counts.iter().zip(sys.probs()).map(|(&c, &p)| p.powi(c as i32)).product::<f64>();
            let ln = ln_pmf_of_counts(&counts, sys.probs(), n).exp();
            let ours = multinomial_pmf(&Tally::new(counts.clone()), &sys).unwrap();
            assert!((ours - exact).abs() <= 1e-11 * exact, "n={n}");
            assert!((ln - exact).abs() <= 1e-11 * exact, "n={n}");
        }
    }

    #[test]
    fn large_systems_stay_finite() {
        let sys = ElectoralSystem::new(1000, PartyDistribution::uniform(2).unwrap()).unwrap();
        let p = binomial_marginal(1, 500, &sys).unwrap();
        // 1/sqrt(500·π) to leading order
        assert!((p - 0.025_225_018_178_2).abs() < 1e-6);
        let p = multinomial_pmf(&Tally::new(vec![500, 500]), &sys).unwrap();
        assert!(p.is_finite() && p > 0.0);
    }

    #[test]
    fn kernel_agrees_with_direct_evaluation() {
        for (n, probs) in [
            (5i64, vec![0.1, 0.3, 0.6]),
            (9, vec![0.0, 0.25, 0.75]),
            (12, vec![0.05, 0.15, 0.3, 0.5]),
            (160, vec![0.5, 0.5]),
        ] {
            let sys = validate_system(n, &probs).unwrap();
            let kernel = PmfKernel::new(&sys);
            for tally in Compositions::new(n as u64, probs.len()).unwrap().take(2000) {
                let direct = multinomial_pmf(&tally, &sys).unwrap();
                let fast = kernel.pmf(tally.counts());
                assert!(
                    (direct - fast).abs() <= 1e-12 * direct.max(1e-300),
                    "{tally} {direct} {fast}"
                );
            }
        }
    }

    #[test]
    fn weighted_tally_scales_by_state_count() {
        let w = WeightedTally::new(Tally::new(vec![1, 2, 2]), &table2()).unwrap();
        assert!((w.multiplicity - w.pmf * 243.0).abs() <= 1e-12 * w.multiplicity);
        assert!((0.0..=1.0).contains(&w.pmf));
    }
}
