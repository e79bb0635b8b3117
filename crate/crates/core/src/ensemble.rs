//! Ensemble averages over the full composition space.
//!
//! The directional average of `x̄·x̄` over isotropic party orientations keeps
//! only the diagonal terms, so it reduces to `Σ x_k²`. The one angular
//! integral that reduction rests on is checked numerically by
//! [`spherical_cross_term`].

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{check_cap, Compositions};
use crate::distribution::{state_count, PmfKernel};
use crate::error::{Error, Result};
use crate::model::{excess_of_counts, ElectoralSystem, Tally};
use crate::numeric::CompensatedSum;

/// Default number of Simpson intervals on `[0, π]`.
pub const DEFAULT_QUADRATURE_RESOLUTION: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    /// `⟨{x̄·x̄}⟩`, electors².
    pub variance: f64,
    /// `⟨{N̄·1̄}⟩`, electors.
    pub mean_alignment: f64,
    /// `Σ g·{x̄·x̄}`.
    pub weighted_sum: f64,
    /// `Σ g`, which is `M^N`.
    pub total_weight: f64,
}

/// `Σ_k (N_k − p_k N)²`.
pub fn directional_self_product(tally: &Tally, sys: &ElectoralSystem) -> Result<f64> {
    sys.check_counts(tally.counts())?;
    Ok(self_product_of_counts(tally.counts(), sys))
}

fn self_product_of_counts(counts: &[u64], sys: &ElectoralSystem) -> f64 {
    excess_of_counts(counts, sys).iter().map(|x| x * x).sum()
}

/// Mass-weighted sums `(Σ pmf·f, Σ pmf)` over every composition.
#[derive(Debug, Clone, Copy, Default)]
struct PartialSums {
    weighted: CompensatedSum,
    weight: CompensatedSum,
}

impl PartialSums {
    fn merge(mut self, other: PartialSums) -> PartialSums {
        self.weighted.merge(&other.weighted);
        self.weight.merge(&other.weight);
        self
    }
}

fn sweep<F>(iter: &mut Compositions, kernel: &PmfKernel, f: &F) -> PartialSums
where
    F: Fn(&[u64]) -> f64,
{
    let mut sums = PartialSums::default();
    while let Some(counts) = iter.next_counts() {
        let w = kernel.pmf(counts);
        if w == 0.0 {
            continue;
        }
        sums.weight.add(w);
        sums.weighted.add(w * f(counts));
    }
    sums
}

/// Streams the composition space once, in parallel slices keyed on the last
/// party's count. Slices are reduced in index order so the result does not
/// depend on the thread count.
fn weighted_sums<F>(sys: &ElectoralSystem, cap: u64, f: F) -> Result<PartialSums>
where
    F: Fn(&[u64]) -> f64 + Sync,
{
    let (n, m) = (sys.electors(), sys.parties());
    check_cap(n, m, cap)?;
    let kernel = PmfKernel::new(sys);
    if m == 1 {
        return Ok(sweep(&mut Compositions::new(n, m)?, &kernel, &f));
    }
    let slices: Vec<PartialSums> = (0..=n)
        .into_par_iter()
        .map(|last| {
            let mut iter = Compositions::with_last(n, m, last).expect("m >= 2");
            sweep(&mut iter, &kernel, &f)
        })
        .collect();
    Ok(slices.into_iter().fold(PartialSums::default(), PartialSums::merge))
}

/// `Σ f·g / Σ g` over every tally of the system.
pub fn magnitudal_average<F>(sys: &ElectoralSystem, cap: u64, f: F) -> Result<f64>
where
    F: Fn(&[u64]) -> f64 + Sync,
{
    let sums = weighted_sums(sys, cap, f)?;
    Ok(sums.weighted.value() / sums.weight.value())
}

/// Exhaustive evaluation of the dual ensemble average and the alignment
/// denominator.
pub fn brute_force_report(sys: &ElectoralSystem, cap: u64) -> Result<EnsembleReport> {
    let sums = weighted_sums(sys, cap, |counts| self_product_of_counts(counts, sys))?;
    let mass = sums.weight.value();
    let variance = sums.weighted.value() / mass;
    let mean_alignment =
        magnitudal_average(sys, cap, |counts| counts.iter().sum::<u64>() as f64)?;
    // Σ g = M^N·Σ pmf; multiplying through keeps the sums in range for large N.
    let scale = state_count(sys);
    Ok(EnsembleReport {
        variance,
        mean_alignment,
        weighted_sum: sums.weighted.value() * scale,
        total_weight: mass * scale,
    })
}

/// Isotropic average of `k̂·l̂` for two unit vectors in `m` dimensions:
/// `∫₀^π cos φ sinᵐ⁻² φ dφ / ∫₀^π sinᵐ⁻² φ dφ`, by composite Simpson.
/// An odd `resolution` is rounded up to the next even interval count.
pub fn spherical_cross_term(m: usize, resolution: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidArguments(format!("dimension must be at least 2, got {m}")));
    }
    if resolution < 64 {
        return Err(Error::InvalidArguments(format!(
            "resolution must be at least 64 intervals, got {resolution}"
        )));
    }
    let power = (m - 2) as i32;
    let numerator = simpson(|phi| phi.cos() * phi.sin().powi(power), 0.0, PI, resolution);
    let denominator = simpson(|phi| phi.sin().powi(power), 0.0, PI, resolution);
    Ok(numerator / denominator)
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let intervals = intervals + intervals % 2;
    let h = (b - a) / intervals as f64;
    let mut acc = CompensatedSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for i in 1..intervals {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(weight * f(a + i as f64 * h));
    }
    acc.value() * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::DEFAULT_ENUMERATION_CAP as CAP;
    use crate::model::validate_system;

    fn table2() -> ElectoralSystem {
        validate_system(5, &[0.1, 0.3, 0.6]).unwrap()
    }

    #[test]
    fn self_product_examples() {
        let sys = table2();
        let v = |c: Vec<u64>| directional_self_product(&Tally::new(c), &sys).unwrap();
        assert!((v(vec![0, 0, 5]) - 6.5).abs() < 1e-12);
        assert!((v(vec![5, 0, 0]) - 31.5).abs() < 1e-12);
        let sys = validate_system(4, &[0.5, 0.25, 0.25]).unwrap();
        assert_eq!(directional_self_product(&Tally::new(vec![2, 1, 1]), &sys).unwrap(), 0.0);
    }

    #[test]
    fn table_two_report() {
        let r = brute_force_report(&table2(), CAP).unwrap();
        assert!((r.variance - 2.7).abs() <= 2.7 * 1e-12);
        assert!((r.total_weight - 243.0).abs() <= 243.0 * 1e-12);
        assert!((r.weighted_sum - 656.1).abs() <= 1e-9);
        assert!((r.mean_alignment - 5.0).abs() <= 5.0 * 1e-12);
    }

    #[test]
    fn trivial_averages() {
        let sys = table2();
        assert!((magnitudal_average(&sys, CAP, |_| 1.0).unwrap() - 1.0).abs() < 1e-15);
        let total = magnitudal_average(&sys, CAP, |c| c.iter().sum::<u64>() as f64).unwrap();
        assert!((total - 5.0).abs() < 1e-14);
    }

    #[test]
    fn single_elector_and_single_party() {
        let sys = validate_system(1, &[0.2, 0.5, 0.3]).unwrap();
        let r = brute_force_report(&sys, CAP).unwrap();
        let expected = 1.0 - (0.04 + 0.25 + 0.09);
        assert!((r.variance - expected).abs() < 1e-14);
        let sys = validate_system(3, &[1.0]).unwrap();
        assert_eq!(brute_force_report(&sys, CAP).unwrap().variance, 0.0);
    }

    #[test]
    fn cap_propagates() {
        assert!(matches!(
            brute_force_report(&table2(), 20),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn quadrature_examples() {
        assert!(spherical_cross_term(3, 1024).unwrap().abs() <= 1e-12);
        assert!(spherical_cross_term(2, 1024).unwrap().abs() <= 1e-9);
        assert!(spherical_cross_term(10, 4096).unwrap().abs() <= 1e-9);
        for m in 2..=16 {
            let v = spherical_cross_term(m, DEFAULT_QUADRATURE_RESOLUTION).unwrap();
            assert!(v.abs() <= 1e-9, "m={m}: {v}");
        }
    }

    #[test]
    fn quadrature_rejects_bad_arguments() {
        assert!(spherical_cross_term(1, 1024).is_err());
        assert!(spherical_cross_term(3, 32).is_err());
    }

    #[test]
    fn simpson_integrates_known_kernels() {
        // ∫₀^π sin²φ dφ = π/2 and ∫₀^π |cos φ| sin φ dφ = 1
        let v = simpson(|x| x.sin().powi(2), 0.0, PI, 1024);
        assert!((v - PI / 2.0).abs() < 1e-12);
        let v = simpson(|x| x.cos().abs() * x.sin(), 0.0, PI, 4096);
        assert!((v - 1.0).abs() < 1e-6);
    }
}
