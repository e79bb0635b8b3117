//! Density data behind the stability and rigidity plots: the binomial
//! marginal of each party's count, over its support, for a sweep of elector
//! counts (stability) or outcome counts (rigidity).

use electorate_core::{binomial_marginal, ElectoralSystem, Error, PartyDistribution};
use serde::Serialize;

use crate::output::{num, to_csv, to_json, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureKind {
    /// Abscissa `N_k/N`, equilibrium at `p_k`.
    Stability,
    /// Abscissa `(N_k − p_k N)/N`, equilibrium at 0.
    Rigidity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityPoint {
    pub count: u64,
    pub abscissa: f64,
    pub density: f64,
}

/// One party's curve for one parameter value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve {
    pub electors: u64,
    pub parties: usize,
    pub party: usize,
    pub probability: f64,
    pub equilibrium: f64,
    pub points: Vec<DensityPoint>,
}

/// Points of zero density (counts a party cannot reach) are left out.
pub fn density_curves(kind: FigureKind, sys: &ElectoralSystem) -> Result<Vec<DensityCurve>, Error> {
    let n = sys.electors();
    let nf = n as f64;
    (1..=sys.parties())
        .map(|party| {
            let p = sys.probs()[party - 1];
            let mut points = Vec::with_capacity(n as usize + 1);
            for count in 0..=n {
                let density = binomial_marginal(party, count, sys)?;
                if density == 0.0 {
                    continue;
                }
                let abscissa = match kind {
                    FigureKind::Stability => count as f64 / nf,
                    FigureKind::Rigidity => (count as f64 - p * nf) / nf,
                };
                points.push(DensityPoint { count, abscissa, density });
            }
            let equilibrium = match kind {
                FigureKind::Stability => p,
                FigureKind::Rigidity => 0.0,
            };
            Ok(DensityCurve { electors: n, parties: sys.parties(), party, probability: p, equilibrium, points })
        })
        .collect()
}

/// Stability sweep: fixed distribution, one curve set per elector count.
pub fn stability_figure(electors: &[u64], dist: &PartyDistribution) -> Result<Vec<DensityCurve>, Error> {
    let mut curves = Vec::new();
    for &n in electors {
        let sys = ElectoralSystem::new(n, dist.clone())?;
        curves.extend(density_curves(FigureKind::Stability, &sys)?);
    }
    Ok(curves)
}

/// Rigidity sweep: fixed elector count, uniform probabilities over each
/// outcome count.
pub fn rigidity_figure(electors: u64, parties: &[usize]) -> Result<Vec<DensityCurve>, Error> {
    let mut curves = Vec::new();
    for &m in parties {
        let sys = ElectoralSystem::new(electors, PartyDistribution::uniform(m)?)?;
        curves.extend(density_curves(FigureKind::Rigidity, &sys)?);
    }
    Ok(curves)
}

pub fn render(kind: FigureKind, curves: &[DensityCurve], format: Format) -> String {
    let kind_name = match kind {
        FigureKind::Stability => "stability",
        FigureKind::Rigidity => "rigidity",
    };
    match format {
        Format::Json => to_json(&serde_json::json!({ "kind": kind_name, "curves": curves })),
        Format::Csv | Format::Text => {
            let rows: Vec<Vec<String>> = curves
                .iter()
                .flat_map(|c| {
                    c.points.iter().map(move |pt| {
                        vec![
                            kind_name.to_string(),
                            c.electors.to_string(),
                            c.parties.to_string(),
                            c.party.to_string(),
                            num(c.probability),
                            pt.count.to_string(),
                            num(pt.abscissa),
                            num(pt.density),
                            num(c.equilibrium),
                        ]
                    })
                })
                .collect();
            to_csv(
                &[
                    "kind",
                    "electors",
                    "parties",
                    "party",
                    "probability",
                    "count",
                    "abscissa",
                    "density",
                    "equilibrium",
                ],
                &rows,
            )
        }
    }
}
