use chrono::{DateTime, SecondsFormat, Utc};
use electorate_core::{
    brute_force_report, closed_form_attributes, flexibility_bounds, rigidity_bounds,
    DynamicAttributes, ElectoralSystem, EnsembleReport, Error,
};
use serde::{Deserialize, Serialize};

use crate::output::{join_nums, num, to_csv, to_json, Format};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub flexibility: [f64; 2],
    pub rigidity: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub system: ElectoralSystem,
    pub attributes: DynamicAttributes,
    pub brute_force: Option<EnsembleReport>,
    pub bounds: Bounds,
    pub timestamp: String,
}

/// `SOURCE_DATE_EPOCH` pins the timestamp for reproducible output.
pub fn current_timestamp() -> String {
    let pinned = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0));
    pinned.unwrap_or_else(Utc::now).to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// With `verify`, the exhaustive ensemble is attached or the cap error is
/// returned.
pub fn analyze(
    sys: &ElectoralSystem,
    verify: bool,
    cap: u64,
    timestamp: String,
) -> Result<AnalysisRecord, Error> {
    let m = sys.parties();
    let flexibility = flexibility_bounds(m)?;
    let rigidity = rigidity_bounds(m)?;
    let brute_force = if verify { Some(brute_force_report(sys, cap)?) } else { None };
    Ok(AnalysisRecord {
        system: sys.clone(),
        attributes: closed_form_attributes(sys),
        brute_force,
        bounds: Bounds {
            flexibility: [flexibility.0, flexibility.1],
            rigidity: [rigidity.0, rigidity.1],
        },
        timestamp,
    })
}

const CSV_HEADER: [&str; 18] = [
    "electors",
    "probs",
    "fractional_fluctuation",
    "volatility",
    "flexibility",
    "stability",
    "rigidity",
    "brute_force_variance",
    "brute_force_mean_alignment",
    "brute_force_weighted_sum",
    "brute_force_total_weight",
    "brute_force_fractional_fluctuation",
    "flexibility_lower",
    "flexibility_upper",
    "rigidity_lower",
    "rigidity_upper",
    "parties",
    "timestamp",
];

pub fn render(record: &AnalysisRecord, format: Format) -> String {
    match format {
        Format::Json => to_json(record),
        Format::Csv => render_csv(record),
        Format::Text => render_text(record),
    }
}

fn render_csv(r: &AnalysisRecord) -> String {
    let a = &r.attributes;
    let bf = |f: fn(&EnsembleReport) -> f64| r.brute_force.as_ref().map(f).map(num).unwrap_or_default();
    let row = vec![
        r.system.electors().to_string(),
        join_nums(r.system.probs()),
        num(a.fractional_fluctuation),
        num(a.volatility),
        num(a.flexibility),
        num(a.stability),
        num(a.rigidity),
        bf(|e| e.variance),
        bf(|e| e.mean_alignment),
        bf(|e| e.weighted_sum),
        bf(|e| e.total_weight),
        bf(|e| e.variance.sqrt() / e.mean_alignment),
        num(r.bounds.flexibility[0]),
        num(r.bounds.flexibility[1]),
        num(r.bounds.rigidity[0]),
        num(r.bounds.rigidity[1]),
        r.system.parties().to_string(),
        r.timestamp.clone(),
    ];
    to_csv(&CSV_HEADER, &[row])
}

fn render_text(r: &AnalysisRecord) -> String {
    let a = &r.attributes;
    let mut s = String::new();
    s.push_str(&format!(
        "electors N = {}, parties M = {}, p = [{}]\n",
        r.system.electors(),
        r.system.parties(),
        join_nums(r.system.probs())
    ));
    s.push_str(&format!("fractional fluctuation F = {}\n", num(a.fractional_fluctuation)));
    s.push_str(&format!("volatility V = {}\n", num(a.volatility)));
    s.push_str(&format!("flexibility L = {}  (bounds [{}, {}])\n", num(a.flexibility), num(r.bounds.flexibility[0]), num(r.bounds.flexibility[1])));
    s.push_str(&format!("stability S = {}\n", num(a.stability)));
    s.push_str(&format!("rigidity R = {}  (bounds [{}, {}])\n", num(a.rigidity), num(r.bounds.rigidity[0]), num(r.bounds.rigidity[1])));
    if let Some(e) = &r.brute_force {
        s.push_str(&format!(
            "exhaustive: variance = {} (= {} / {}), mean alignment = {}, F = {}\n",
            num(e.variance),
            num(e.weighted_sum),
            num(e.total_weight),
            num(e.mean_alignment),
            num(e.variance.sqrt() / e.mean_alignment)
        ));
    }
    s.push_str(&format!("timestamp {}\n", r.timestamp));
    s
}
