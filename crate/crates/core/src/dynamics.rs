//! Closed-form dynamic attributes of an electoral system.
//!
//! The fractional fluctuation separates into a volatility that depends only
//! on the elector count and a flexibility that depends only on the outcome
//! probabilities:
//!
//! ```text
//! F = V · L,   V = 1/√N,   L = √(1 − Σ p_k²)
//! S = 1 − V,   R = 1 − L
//! ```

use serde::{Deserialize, Serialize};

use crate::ensemble::brute_force_report;
use crate::error::{Error, Result};
use crate::model::{ElectoralSystem, PartyDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicAttributes {
    pub fractional_fluctuation: f64,
    pub volatility: f64,
    pub flexibility: f64,
    pub stability: f64,
    pub rigidity: f64,
}

/// `∂L/∂p_k` for `k = 1..M−1`, with `p_M = 1 − Σ_{k<M} p_k` dependent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlexibilityGradient {
    pub partials: Vec<f64>,
}

pub fn volatility(electors: u64) -> f64 {
    1.0 / (electors as f64).sqrt()
}

pub fn stability(electors: u64) -> f64 {
    1.0 - volatility(electors)
}

pub fn flexibility(dist: &PartyDistribution) -> f64 {
    (1.0 - dist.sum_of_squares()).max(0.0).sqrt()
}

pub fn rigidity(dist: &PartyDistribution) -> f64 {
    1.0 - flexibility(dist)
}

pub fn closed_form_attributes(sys: &ElectoralSystem) -> DynamicAttributes {
    let volatility = volatility(sys.electors());
    let flexibility = flexibility(sys.distribution());
    DynamicAttributes {
        fractional_fluctuation: volatility * flexibility,
        volatility,
        flexibility,
        stability: 1.0 - volatility,
        rigidity: 1.0 - flexibility,
    }
}

/// `√⟨{x̄·x̄}⟩ / ⟨{N̄·1̄}⟩` by exhaustive enumeration.
pub fn brute_force_fractional_fluctuation(sys: &ElectoralSystem, cap: u64) -> Result<f64> {
    let report = brute_force_report(sys, cap)?;
    Ok(report.variance.max(0.0).sqrt() / report.mean_alignment)
}

/// `(0, √((m−1)/m))`.
pub fn flexibility_bounds(m: usize) -> Result<(f64, f64)> {
    if m == 0 {
        return Err(Error::InvalidArguments("at least one outcome is required".into()));
    }
    Ok((0.0, ((m - 1) as f64 / m as f64).sqrt()))
}

/// `(1 − √((m−1)/m), 1)`.
pub fn rigidity_bounds(m: usize) -> Result<(f64, f64)> {
    let (_, upper) = flexibility_bounds(m)?;
    Ok((1.0 - upper, 1.0))
}

pub fn flexibility_gradient(dist: &PartyDistribution) -> Result<FlexibilityGradient> {
    let spread = 1.0 - dist.sum_of_squares();
    if spread <= f64::EPSILON {
        return Err(Error::DegenerateDistribution);
    }
    let norm = spread.sqrt();
    let probs = dist.probs();
    let (&pivot, rest) = probs.split_last().expect("distribution is non-empty");
    Ok(FlexibilityGradient { partials: rest.iter().map(|p| (pivot - p) / norm).collect() })
}
