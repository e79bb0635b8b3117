//! Domain types: the outcome distribution, the electoral system, single vote
//! configurations (tallies) and their order-forgetting partition shapes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `|Σ p − 1|`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Event probabilities of the `M` possible outcomes of one elector's vote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PartyDistribution {
    probs: Vec<f64>,
}

impl PartyDistribution {
    /// Checks the probabilities against the simplex. Nothing is renormalized.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        for (i, &p) in probs.iter().enumerate() {
            // NaN fails this comparison too.
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::ProbabilityOutOfRange { index: i + 1, value: p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { sum, tolerance: NORMALIZATION_TOLERANCE });
        }
        Ok(Self { probs })
    }

    /// Equal probability `1/m` for each of `m` outcomes.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyDistribution);
        }
        Self::new(vec![1.0 / m as f64; m])
    }

    /// Uniformly distributed point on the probability simplex (flat Dirichlet),
    /// drawn by normalizing independent unit exponentials.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyDistribution);
        }
        let draws: Vec<f64> = (0..m)
            .map(|_| {
                let u: f64 = rng.random();
                -(1.0 - u).ln()
            })
            .collect();
        let total: f64 = draws.iter().sum();
        if total <= 0.0 {
            return Self::uniform(m);
        }
        Self::new(draws.into_iter().map(|d| d / total).collect())
    }

    pub fn parties(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum()
    }
}

impl TryFrom<Vec<f64>> for PartyDistribution {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<PartyDistribution> for Vec<f64> {
    fn from(dist: PartyDistribution) -> Self {
        dist.probs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct ElectoralSystem {
    electors: u64,
    dist: PartyDistribution,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    electors: i64,
    probs: Vec<f64>,
}

impl TryFrom<RawSystem> for ElectoralSystem {
    type Error = Error;

    fn try_from(raw: RawSystem) -> Result<Self> {
        validate_system(raw.electors, &raw.probs)
    }
}

impl From<ElectoralSystem> for RawSystem {
    fn from(sys: ElectoralSystem) -> Self {
        RawSystem { electors: sys.electors as i64, probs: sys.dist.probs }
    }
}

/// Validates raw user input into an [`ElectoralSystem`].
pub fn validate_system(electors: i64, probs: &[f64]) -> Result<ElectoralSystem> {
    if electors < 1 {
        return Err(Error::NonPositiveElectors(electors));
    }
    let dist = PartyDistribution::new(probs.to_vec())?;
    Ok(ElectoralSystem { electors: electors as u64, dist })
}

impl ElectoralSystem {
    pub fn new(electors: u64, dist: PartyDistribution) -> Result<Self> {
        if electors == 0 {
            return Err(Error::NonPositiveElectors(0));
        }
        Ok(Self { electors, dist })
    }

    pub fn electors(&self) -> u64 {
        self.electors
    }

    pub fn parties(&self) -> usize {
        self.dist.parties()
    }

    pub fn probs(&self) -> &[f64] {
        self.dist.probs()
    }

    pub fn distribution(&self) -> &PartyDistribution {
        &self.dist
    }

    /// Checks that a raw count vector is a vote configuration of this system.
    pub fn check_counts(&self, counts: &[u64]) -> Result<()> {
        if counts.len() != self.parties() {
            return Err(Error::DimensionMismatch { expected: self.parties(), found: counts.len() });
        }
        let total: u64 = counts.iter().sum();
        if total != self.electors {
            return Err(Error::TallyTotalMismatch { expected: self.electors, found: total });
        }
        Ok(())
    }
}

/// One vote configuration: electors aligned with each party, in party order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tally(Vec<u64>);

impl Tally {
    pub fn new(counts: Vec<u64>) -> Self {
        Tally(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn parties(&self) -> usize {
        self.0.len()
    }

    pub fn into_counts(self) -> Vec<u64> {
        self.0
    }

    pub fn shape(&self) -> PartitionShape {
        PartitionShape::from_counts(&self.0)
    }
}

impl From<Vec<u64>> for Tally {
    fn from(counts: Vec<u64>) -> Self {
        Tally(counts)
    }
}

impl std::fmt::Display for Tally {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write_bracketed(f, &self.0)
    }
}

/// Non-increasing arrangement of a tally's counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PartitionShape(Vec<u64>);

impl PartitionShape {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArguments(format!(
                "partition parts must be non-increasing, got {parts:?}"
            )));
        }
        Ok(PartitionShape(parts))
    }

    pub fn from_counts(counts: &[u64]) -> Self {
        let mut parts = counts.to_vec();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        PartitionShape(parts)
    }

    pub fn parts(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for PartitionShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write_bracketed(f, &self.0)
    }
}

fn write_bracketed(f: &mut std::fmt::Formatter<'_>, xs: &[u64]) -> std::fmt::Result {
    f.write_str("[")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("]")
}

/// Expected counts `N·p_k`.
pub fn equilibrium_coordinates(sys: &ElectoralSystem) -> Vec<f64> {
    let n = sys.electors() as f64;
    sys.probs().iter().map(|p| n * p).collect()
}

/// Deviation of a tally from equilibrium, `N_k − p_k·N`.
pub fn excess_coordinates(tally: &Tally, sys: &ElectoralSystem) -> Result<Vec<f64>> {
    sys.check_counts(tally.counts())?;
    Ok(excess_of_counts(tally.counts(), sys))
}

pub(crate) fn excess_of_counts(counts: &[u64], sys: &ElectoralSystem) -> Vec<f64> {
    let n = sys.electors() as f64;
    counts.iter().zip(sys.probs()).map(|(&c, p)| c as f64 - p * n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2() -> ElectoralSystem {
        validate_system(5, &[0.1, 0.3, 0.6]).unwrap()
    }

    #[test]
    fn accepts_valid_systems() {
        let sys = table2();
        assert_eq!(sys.electors(), 5);
        assert_eq!(sys.parties(), 3);
        let one = validate_system(1, &[1.0]).unwrap();
        assert_eq!((one.electors(), one.parties()), (1, 1));
    }

    #[test]
    fn rejects_each_error_class() {
        assert_eq!(validate_system(0, &[1.0]), Err(Error::NonPositiveElectors(0)));
        assert_eq!(validate_system(-3, &[1.0]), Err(Error::NonPositiveElectors(-3)));
        assert_eq!(validate_system(5, &[]), Err(Error::EmptyDistribution));
        assert!(matches!(
            validate_system(5, &[1.5, -0.5]),
            Err(Error::ProbabilityOutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            validate_system(5, &[0.5, f64::NAN]),
            Err(Error::ProbabilityOutOfRange { index: 2, .. })
        ));
        assert!(matches!(validate_system(5, &[0.5, 0.6]), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn normalization_tolerance_is_absolute_1e9() {
        assert!(validate_system(2, &[0.5, 0.5 + 5e-10]).is_ok());
        assert!(validate_system(2, &[0.5, 0.5 + 5e-9]).is_err());
    }

    #[test]
    fn zero_probabilities_are_allowed() {
        assert!(validate_system(3, &[0.0, 0.0, 1.0]).is_ok());
    }

    #[test]
    fn equilibrium_examples() {
        assert_eq!(equilibrium_coordinates(&table2()), vec![0.5, 1.5, 3.0]);
        let two = ElectoralSystem::new(30, PartyDistribution::uniform(2).unwrap()).unwrap();
        assert_eq!(equilibrium_coordinates(&two), vec![15.0, 15.0]);
        assert_eq!(equilibrium_coordinates(&validate_system(7, &[1.0]).unwrap()), vec![7.0]);
    }

    #[test]
    fn excess_examples() {
        let sys = table2();
        let x = excess_coordinates(&Tally::new(vec![0, 0, 5]), &sys).unwrap();
        assert_eq!(x, vec![-0.5, -1.5, 2.0]);
        let x = excess_coordinates(&Tally::new(vec![5, 0, 0]), &sys).unwrap();
        assert_eq!(x, vec![4.5, -1.5, -3.0]);
        let sys = validate_system(4, &[0.25, 0.25, 0.5]).unwrap();
        let x = excess_coordinates(&Tally::new(vec![1, 1, 2]), &sys).unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn excess_rejects_foreign_tallies() {
        let sys = table2();
        assert_eq!(
            excess_coordinates(&Tally::new(vec![5, 0]), &sys),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        );
        assert_eq!(
            excess_coordinates(&Tally::new(vec![1, 1, 1]), &sys),
            Err(Error::TallyTotalMismatch { expected: 5, found: 3 })
        );
    }

    #[test]
    fn shapes_sort_non_increasing() {
        let shape = Tally::new(vec![1, 0, 4]).shape();
        assert_eq!(shape.parts(), &[4, 1, 0]);
        assert_eq!(shape.to_string(), "[4,1,0]");
        assert!(PartitionShape::new(vec![1, 2]).is_err());
    }

    #[test]
    fn serde_validates_on_the_way_in() {
        let sys = table2();
        let json = serde_json::to_string(&sys).unwrap();
        assert_eq!(json, r#"{"electors":5,"probs":[0.1,0.3,0.6]}"#);
        let back: ElectoralSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sys);
        assert!(serde_json::from_str::<ElectoralSystem>(r#"{"electors":5,"probs":[0.5,0.6]}"#).is_err());
        assert!(serde_json::from_str::<ElectoralSystem>(r#"{"electors":0,"probs":[1.0]}"#).is_err());
    }
}
