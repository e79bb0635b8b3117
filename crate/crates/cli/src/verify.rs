//! Self-check suite: every closed form against its exhaustive or numerical
//! counterpart, with a per-check summary.

use electorate_core::combinatorics::Compositions;
use electorate_core::dynamics::flexibility;
use electorate_core::{
    binomial_marginal, brute_force_fractional_fluctuation, brute_force_report,
    closed_form_attributes, enumerate_partitions, estimate_variance, flexibility_bounds,
    flexibility_gradient, multinomial_pmf, partition_count, spherical_cross_term,
    validate_system, ElectoralSystem, Error, PartyDistribution,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::to_json;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub max_electors: u64,
    pub max_parties: usize,
    pub points: usize,
    pub seed: u64,
    /// Monte Carlo trials per spot check; `None` skips them.
    pub trials: Option<u64>,
    pub cap: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            max_electors: 8,
            max_parties: 4,
            points: 25,
            seed: 0,
            trials: None,
            cap: electorate_core::DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub description: &'static str,
    pub cases: usize,
    pub max_abs_deviation: f64,
    pub max_rel_deviation: f64,
    pub tolerance: f64,
    /// Whether `tolerance` bounds the absolute or the relative deviation.
    pub tolerance_kind: &'static str,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    #[serde(rename = "parameters")]
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[derive(Clone, Copy)]
enum Tolerance {
    Absolute(f64),
    Relative(f64),
}

struct Check {
    name: &'static str,
    description: &'static str,
    tolerance: Tolerance,
    cases: usize,
    max_abs: f64,
    max_rel: f64,
    failed: bool,
}

impl Check {
    fn new(name: &'static str, description: &'static str, tolerance: Tolerance) -> Self {
        Self { name, description, tolerance, cases: 0, max_abs: 0.0, max_rel: 0.0, failed: false }
    }

    fn compare(&mut self, actual: f64, expected: f64) {
        self.cases += 1;
        let abs = (actual - expected).abs();
        // Relative deviation is undefined against an exact zero and left out.
        let rel = (expected != 0.0).then(|| abs / expected.abs());
        if !abs.is_finite() {
            self.failed = true;
        }
        self.max_abs = self.max_abs.max(abs);
        self.max_rel = self.max_rel.max(rel.unwrap_or(0.0));
        let ok = match (self.tolerance, rel) {
            (Tolerance::Absolute(t), _) => abs <= t,
            (Tolerance::Relative(t), Some(rel)) => rel <= t,
            (Tolerance::Relative(_), None) => abs == 0.0,
        };
        self.failed |= !ok;
    }

    fn require(&mut self, condition: bool) {
        self.compare(if condition { 0.0 } else { 1.0 }, 0.0);
    }

    fn fail(&mut self) {
        self.cases += 1;
        self.failed = true;
    }

    fn finish(self) -> CheckResult {
        let (tolerance, tolerance_kind) = match self.tolerance {
            Tolerance::Absolute(t) => (t, "absolute"),
            Tolerance::Relative(t) => (t, "relative"),
        };
        CheckResult {
            name: self.name,
            description: self.description,
            cases: self.cases,
            max_abs_deviation: self.max_abs,
            max_rel_deviation: self.max_rel,
            tolerance,
            tolerance_kind,
            passed: !self.failed && self.cases > 0,
        }
    }
}

fn cell_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn reference_system() -> ElectoralSystem {
    validate_system(5, &[0.1, 0.3, 0.6]).expect("valid reference system")
}

fn partition_check() -> CheckResult {
    let mut c = Check::new(
        "partition_counts",
        "partition counts c(5, M) for M = 1..5 and the shapes of 5 into 3 parts",
        Tolerance::Absolute(0.0),
    );
    for (m, expected) in (1..=5).zip([1u32, 3, 5, 6, 7]) {
        c.require(partition_count(5, m).is_ok_and(|k| k == expected.into()));
    }
    let shapes: Vec<Vec<u64>> = enumerate_partitions(5, 3)
        .map(|s| s.shapes.iter().map(|p| p.parts().to_vec()).collect())
        .unwrap_or_default();
    c.require(shapes == [vec![5, 0, 0], vec![4, 1, 0], vec![3, 2, 0], vec![3, 1, 1], vec![2, 2, 1]]);
    c.finish()
}

fn reference_ensemble_check(cap: u64) -> CheckResult {
    let mut c = Check::new(
        "reference_ensemble",
        "N=5, p=(0.1,0.3,0.6): 21 tallies, total multiplicity 243, weighted sum 656.1, variance 2.7",
        Tolerance::Relative(1e-12),
    );
    let sys = reference_system();
    c.require(Compositions::new(5, 3).map(|it| it.count() == 21).unwrap_or(false));
    match brute_force_report(&sys, cap) {
        Ok(r) => {
            c.compare(r.total_weight, 243.0);
            c.compare(r.weighted_sum, 656.1);
            c.compare(r.variance, 2.7);
        }
        Err(_) => c.fail(),
    }
    c.finish()
}

fn fluctuation_sweep(opts: &VerifyOptions) -> [CheckResult; 2] {
    let mut fluct = Check::new(
        "fractional_fluctuation_oracle",
        "exhaustive sqrt<{x.x}>/<{N.1}> against (1/sqrt N) sqrt(1 - sum p^2) over random simplex points",
        Tolerance::Absolute(1e-9),
    );
    let mut var = Check::new(
        "variance_identity",
        "exhaustive <{x.x}> against N (1 - sum p^2)",
        Tolerance::Relative(1e-9),
    );
    for n in 1..=opts.max_electors {
        for m in 1..=opts.max_parties {
            let mut rng = cell_rng(opts.seed, (n << 16) | m as u64);
            for _ in 0..opts.points {
                let sys = match PartyDistribution::random(m, &mut rng).and_then(|d| ElectoralSystem::new(n, d)) {
                    Ok(sys) => sys,
                    Err(_) => {
                        fluct.fail();
                        continue;
                    }
                };
                let closed = closed_form_attributes(&sys).fractional_fluctuation;
                match brute_force_fractional_fluctuation(&sys, opts.cap) {
                    Ok(brute) => fluct.compare(brute, closed),
                    Err(_) => fluct.fail(),
                }
                match brute_force_report(&sys, opts.cap) {
                    Ok(r) => var.compare(r.variance, n as f64 * (1.0 - sys.distribution().sum_of_squares())),
                    Err(_) => var.fail(),
                }
            }
        }
    }
    [fluct.finish(), var.finish()]
}

fn marginal_check() -> CheckResult {
    let mut c = Check::new(
        "binomial_marginals",
        "multinomial mass summed over tallies with N_k = c against the binomial marginal, N=5, p=(0.1,0.3,0.6)",
        Tolerance::Relative(1e-9),
    );
    let sys = reference_system();
    for party in 1..=3 {
        let mut by_count = [0.0; 6];
        for tally in Compositions::new(5, 3).expect("m >= 1") {
            by_count[tally.counts()[party - 1] as usize] += multinomial_pmf(&tally, &sys).unwrap_or(f64::NAN);
        }
        for (count, &mass) in by_count.iter().enumerate() {
            match binomial_marginal(party, count as u64, &sys) {
                Ok(b) => c.compare(mass, b),
                Err(_) => c.fail(),
            }
        }
    }
    c.finish()
}

fn quadrature_check() -> CheckResult {
    let mut c = Check::new(
        "isotropic_cross_term",
        "Simpson quadrature of the isotropic average of k.l on the M-sphere, M = 2..16",
        Tolerance::Absolute(1e-9),
    );
    for m in 2..=16 {
        match spherical_cross_term(m, 4096) {
            Ok(v) => c.compare(v, 0.0),
            Err(_) => c.fail(),
        }
    }
    c.finish()
}

fn constrained_flexibility(free: &[f64]) -> f64 {
    let last = 1.0 - free.iter().sum::<f64>();
    let sq: f64 = free.iter().map(|p| p * p).sum::<f64>() + last * last;
    (1.0 - sq).max(0.0).sqrt()
}

fn gradient_checks(opts: &VerifyOptions) -> [CheckResult; 3] {
    let mut fd = Check::new(
        "flexibility_gradient",
        "analytic constrained partials of L against central differences (step 1e-6), M = 2..6",
        Tolerance::Absolute(1e-6),
    );
    let mut zero = Check::new(
        "zero_gradient_at_uniform",
        "constrained gradient of L vanishes at p_k = 1/M, M = 2..6",
        Tolerance::Absolute(1e-12),
    );
    let mut bound = Check::new(
        "flexibility_upper_bound",
        "L at uniform p equals sqrt((M-1)/M), M = 1..16",
        Tolerance::Relative(1e-12),
    );
    let h = 1e-6;
    for m in 2..=6usize {
        let mut rng = cell_rng(opts.seed, 0xF00D_0000 | m as u64);
        for _ in 0..opts.points {
            let Ok(dist) = PartyDistribution::random(m, &mut rng) else {
                fd.fail();
                continue;
            };
            let Ok(grad) = flexibility_gradient(&dist) else {
                fd.fail();
                continue;
            };
            let free = &dist.probs()[..m - 1];
            for k in 0..m - 1 {
                let mut up = free.to_vec();
                let mut down = free.to_vec();
                up[k] += h;
                down[k] -= h;
                let numeric = (constrained_flexibility(&up) - constrained_flexibility(&down)) / (2.0 * h);
                fd.compare(grad.partials[k], numeric);
            }
        }
        match PartyDistribution::uniform(m).and_then(|d| flexibility_gradient(&d)) {
            Ok(g) => g.partials.iter().for_each(|&d| zero.compare(d, 0.0)),
            Err(_) => zero.fail(),
        }
    }
    for m in 1..=16 {
        match (PartyDistribution::uniform(m), flexibility_bounds(m)) {
            (Ok(d), Ok((_, upper))) => bound.compare(flexibility(&d), upper),
            _ => bound.fail(),
        }
    }
    [fd.finish(), zero.finish(), bound.finish()]
}

fn monte_carlo_check(trials: u64, seed: u64) -> CheckResult {
    let mut c = Check::new(
        "monte_carlo_variance",
        "sampled <{x.x}> within 4 standard errors of N (1 - sum p^2); deviation reported in standard errors",
        Tolerance::Absolute(4.0),
    );
    let systems: [Result<ElectoralSystem, Error>; 3] = [
        validate_system(5, &[0.1, 0.3, 0.6]),
        validate_system(200, &[0.1, 0.3, 0.6]),
        PartyDistribution::uniform(2).and_then(|d| ElectoralSystem::new(30, d)),
    ];
    for sys in systems {
        let Ok(sys) = sys else {
            c.fail();
            continue;
        };
        let expected = sys.electors() as f64 * (1.0 - sys.distribution().sum_of_squares());
        match estimate_variance(&sys, trials, seed) {
            Ok(est) if est.std_error > 0.0 => c.compare((est.mean - expected) / est.std_error, 0.0),
            _ => c.fail(),
        }
    }
    c.finish()
}

pub fn run(opts: &VerifyOptions) -> Result<VerifyReport, Error> {
    if opts.max_electors < 1 || opts.max_parties < 1 {
        return Err(Error::InvalidArguments("--max-electors and --max-parties must be at least 1".into()));
    }
    if opts.points < 1 {
        return Err(Error::InvalidArguments("--points must be at least 1".into()));
    }
    let mut checks = vec![partition_check(), reference_ensemble_check(opts.cap)];
    checks.extend(fluctuation_sweep(opts));
    checks.push(marginal_check());
    checks.push(quadrature_check());
    checks.extend(gradient_checks(opts));
    if let Some(trials) = opts.trials {
        checks.push(monte_carlo_check(trials, opts.seed));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { seed: opts.seed, options: opts.clone(), checks, passed })
}
