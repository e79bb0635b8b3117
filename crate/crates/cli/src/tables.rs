//! Tabular reports: partition sets per party count, the per-tally ensemble
//! ledger of a small system, and stability/rigidity brackets for the branches
//! of a multiply-branched government.

use electorate_core::combinatorics::check_cap;
use electorate_core::dynamics::{rigidity_bounds, stability};
use electorate_core::numeric::CompensatedSum;
use electorate_core::{
    directional_self_product, enumerate_partitions, multiplicity, partition_count,
    ElectoralSystem, Error, PartitionShape, Tally,
};
use serde::Serialize;

use crate::output::{num, to_csv, to_json, Format};

// ---------------------------------------------------------------------------
// partitions

#[derive(Debug, Clone, Serialize)]
pub struct PartitionColumn {
    pub parties: usize,
    pub shapes: Vec<PartitionShape>,
    pub cardinality: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionTable {
    pub electors: u64,
    pub columns: Vec<PartitionColumn>,
}

/// One column per party count `1..=max_parties`.
pub fn partition_table(electors: u64, max_parties: usize) -> Result<PartitionTable, Error> {
    if max_parties == 0 {
        return Err(Error::InvalidArguments("--max-parties must be at least 1".into()));
    }
    let columns = (1..=max_parties)
        .map(|m| {
            let set = enumerate_partitions(electors, m)?;
            Ok(PartitionColumn {
                parties: m,
                cardinality: partition_count(electors, m)?.to_string(),
                shapes: set.shapes,
            })
        })
        .collect::<Result<_, Error>>()?;
    Ok(PartitionTable { electors, columns })
}

pub fn render_partitions(table: &PartitionTable, format: Format) -> String {
    match format {
        Format::Json => to_json(table),
        Format::Csv => {
            let mut rows = Vec::new();
            for col in &table.columns {
                for (i, shape) in col.shapes.iter().enumerate() {
                    rows.push(vec![
                        "shape".to_string(),
                        col.parties.to_string(),
                        (i + 1).to_string(),
                        shape.to_string(),
                    ]);
                }
                rows.push(vec![
                    "cardinality".to_string(),
                    col.parties.to_string(),
                    String::new(),
                    col.cardinality.clone(),
                ]);
            }
            to_csv(&["record", "parties", "index", "value"], &rows)
        }
        Format::Text => {
            let headers: Vec<String> = table
                .columns
                .iter()
                .map(|c| format!("N={}, M={}", table.electors, c.parties))
                .collect();
            let depth = table.columns.iter().map(|c| c.shapes.len()).max().unwrap_or(0);
            let mut grid: Vec<Vec<String>> = vec![headers];
            for row in 0..depth {
                grid.push(
                    table
                        .columns
                        .iter()
                        .map(|c| c.shapes.get(row).map(ToString::to_string).unwrap_or_default())
                        .collect(),
                );
            }
            grid.push(table.columns.iter().map(|c| format!("c = {}", c.cardinality)).collect());
            render_grid(&grid, Some(depth + 1))
        }
    }
}

fn render_grid(grid: &[Vec<String>], rule_before: Option<usize>) -> String {
    let cols = grid.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|j| grid.iter().filter_map(|r| r.get(j)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let rule = widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-");
    let mut out = String::new();
    for (i, row) in grid.iter().enumerate() {
        if i == 1 || Some(i) == rule_before {
            out.push_str(&rule);
            out.push('\n');
        }
        let cells: Vec<String> = (0..cols)
            .map(|j| format!("{:<w$}", row.get(j).map(String::as_str).unwrap_or(""), w = widths[j]))
            .collect();
        out.push_str(cells.join(" | ").trim_end());
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// per-tally ensemble ledger

#[derive(Debug, Clone, Serialize)]
pub struct LedgerRow {
    pub tally: Tally,
    pub multiplicity: f64,
    pub excess_self_product: f64,
    pub product: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleLedger {
    pub system: ElectoralSystem,
    pub rows: Vec<LedgerRow>,
    pub total_multiplicity: f64,
    pub total_product: f64,
    pub variance: f64,
}

/// Every tally grouped by partition shape (largest shape first), each
/// shape's permutations in decreasing lexicographic order.
pub fn ensemble_ledger(sys: &ElectoralSystem, cap: u64) -> Result<EnsembleLedger, Error> {
    let (n, m) = (sys.electors(), sys.parties());
    check_cap(n, m, cap)?;
    let shapes = enumerate_partitions(n, m)?.shapes;
    let mut rows = Vec::new();
    let mut total_g = CompensatedSum::new();
    let mut total_product = CompensatedSum::new();
    for shape in shapes {
        for counts in distinct_permutations(shape.parts()) {
            let tally = Tally::new(counts);
            let g = multiplicity(&tally, sys)?;
            let sq = directional_self_product(&tally, sys)?;
            total_g.add(g);
            total_product.add(g * sq);
            rows.push(LedgerRow { tally, multiplicity: g, excess_self_product: sq, product: g * sq });
        }
    }
    let (total_multiplicity, total_product) = (total_g.value(), total_product.value());
    Ok(EnsembleLedger {
        system: sys.clone(),
        rows,
        total_multiplicity,
        total_product,
        variance: total_product / total_multiplicity,
    })
}

/// Distinct permutations of a non-increasing sequence, in decreasing
/// lexicographic order.
fn distinct_permutations(parts: &[u64]) -> Vec<Vec<u64>> {
    let mut current = parts.to_vec();
    let mut out = vec![current.clone()];
    // Step to the lexicographic predecessor until the sequence is ascending.
    loop {
        let Some(i) = (1..current.len()).rev().find(|&i| current[i - 1] > current[i]) else {
            return out;
        };
        let pivot = i - 1;
        let j = (i..current.len()).rev().find(|&j| current[j] < current[pivot]).expect("exists");
        current.swap(pivot, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

pub fn render_ledger(ledger: &EnsembleLedger, format: Format, paper_rounding: bool) -> String {
    let fmt = |x: f64| if paper_rounding { format!("{x:.1}") } else { num(x) };
    match format {
        Format::Json => to_json(ledger),
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = ledger
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.tally.to_string(),
                        fmt(r.multiplicity),
                        num(r.excess_self_product),
                        fmt(r.product),
                    ]
                })
                .collect();
            rows.push(vec![
                "Sum".into(),
                fmt(ledger.total_multiplicity),
                String::new(),
                fmt(ledger.total_product),
            ]);
            to_csv(&["tally", "g", "excess_self_product", "product"], &rows)
        }
        Format::Text => {
            let sys = &ledger.system;
            let mut out = format!(
                "# N = {}, M = {}, p = [{}]\n\
                 # g = multiplicity, x.x = directional self-product of the excess vector\n\
                 # x.x is printed unrounded{}\n",
                sys.electors(),
                sys.parties(),
                crate::output::join_nums(sys.probs()),
                if paper_rounding { "; g and g*x.x are rounded to one decimal" } else { "" }
            );
            let mut grid = vec![vec!["tally".to_string(), "g".into(), "x.x".into(), "g*x.x".into()]];
            for r in &ledger.rows {
                grid.push(vec![
                    r.tally.to_string(),
                    fmt(r.multiplicity),
                    num(r.excess_self_product),
                    fmt(r.product),
                ]);
            }
            grid.push(vec![
                "Sum".into(),
                fmt(ledger.total_multiplicity),
                String::new(),
                fmt(ledger.total_product),
            ]);
            out.push_str(&render_grid(&grid, Some(grid.len() - 1)));
            out.push_str(&format!(
                "variance = {} / {} = {}\n",
                fmt(ledger.total_product),
                fmt(ledger.total_multiplicity),
                num(ledger.variance)
            ));
            out
        }
    }
}

// ---------------------------------------------------------------------------
// branch brackets

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchSpec {
    pub name: String,
    pub n_low: u64,
    pub n_high: u64,
    pub m_low: u64,
    /// `None` stands for an unbounded outcome count.
    pub m_high: Option<u64>,
}

impl BranchSpec {
    pub fn new(name: &str, n: (u64, u64), m: (u64, Option<u64>)) -> Result<Self, Error> {
        let bad = n.0 < 1 || n.0 > n.1 || m.0 < 1 || m.1.is_some_and(|hi| hi < m.0);
        if bad {
            return Err(Error::InvalidArguments(format!("invalid brackets for branch {name}")));
        }
        Ok(Self { name: name.into(), n_low: n.0, n_high: n.1, m_low: m.0, m_high: m.1 })
    }

    pub fn stability(&self) -> [f64; 2] {
        [stability(self.n_low), stability(self.n_high)]
    }

    /// Lower end from uniform probabilities over the largest outcome count;
    /// upper end from a single certain outcome.
    pub fn rigidity(&self) -> [f64; 2] {
        let lower = match self.m_high {
            Some(m) => rigidity_bounds(m as usize).expect("m >= 1").0,
            None => 0.0,
        };
        [lower, 1.0]
    }
}

/// Executive, judicial and the two legislative chambers.
pub fn builtin_branches() -> Vec<(BranchSpec, Reference)> {
    let b = |name, n, m| BranchSpec::new(name, n, m).expect("valid built-in brackets");
    vec![
        (b("President / Vice-President", (1, 2), (1, None)), Reference::new([0.00, 0.29], [0.00, 1.00])),
        (b("Supreme Court", (6, 9), (1, Some(9))), Reference::new([0.59, 0.67], [0.00, 1.00])),
        (b("Senate", (51, 101), (1, Some(101))), Reference::new([0.86, 0.90], [0.01, 1.00])),
        (b("House of Representatives", (218, 430), (1, Some(430))), Reference::new([0.93, 0.95], [0.00, 1.00])),
    ]
}

/// Two-decimal reference brackets the computed values are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reference {
    pub stability: [f64; 2],
    pub rigidity: [f64; 2],
}

impl Reference {
    const fn new(stability: [f64; 2], rigidity: [f64; 2]) -> Self {
        Self { stability, rigidity }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRow {
    pub spec: BranchSpec,
    pub stability: [f64; 2],
    pub rigidity: [f64; 2],
    pub reference: Reference,
    /// Endpoints whose two-decimal rounding differs from the reference.
    pub deviations: Vec<String>,
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn branch_rows() -> Vec<BranchRow> {
    builtin_branches()
        .into_iter()
        .map(|(spec, reference)| {
            let stability = spec.stability();
            let rigidity = spec.rigidity();
            let mut deviations = Vec::new();
            let endpoints = [
                ("stability lower", stability[0], reference.stability[0]),
                ("stability upper", stability[1], reference.stability[1]),
                ("rigidity lower", rigidity[0], reference.rigidity[0]),
                ("rigidity upper", rigidity[1], reference.rigidity[1]),
            ];
            for (label, value, printed) in endpoints {
                if (round2(value) - printed).abs() > 1e-9 {
                    deviations.push(format!(
                        "{label}: computed {} rounds to {:.2}, reference shows {printed:.2}",
                        num(value),
                        round2(value)
                    ));
                }
            }
            BranchRow { spec, stability, rigidity, reference, deviations }
        })
        .collect()
}

fn bracket(x: [f64; 2]) -> String {
    format!("[{:.4}, {:.4}]", x[0], x[1])
}

fn bracket2(x: [f64; 2]) -> String {
    format!("[{:.2}, {:.2}]", x[0], x[1])
}

fn m_range(spec: &BranchSpec) -> String {
    match spec.m_high {
        Some(hi) => format!("[{}, {hi}]", spec.m_low),
        None => format!("[{}, inf)", spec.m_low),
    }
}

pub fn render_branches(rows: &[BranchRow], format: Format) -> String {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let records: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.spec.name.clone(),
                        r.spec.n_low.to_string(),
                        r.spec.n_high.to_string(),
                        r.spec.m_low.to_string(),
                        r.spec.m_high.map(|m| m.to_string()).unwrap_or_else(|| "inf".into()),
                        num(r.stability[0]),
                        num(r.stability[1]),
                        num(r.rigidity[0]),
                        num(r.rigidity[1]),
                        r.deviations.join("; "),
                    ]
                })
                .collect();
            to_csv(
                &[
                    "branch",
                    "n_low",
                    "n_high",
                    "m_low",
                    "m_high",
                    "stability_low",
                    "stability_high",
                    "rigidity_low",
                    "rigidity_high",
                    "deviations",
                ],
                &records,
            )
        }
        Format::Text => {
            let mut grid = vec![vec![
                "branch".to_string(),
                "N".into(),
                "M".into(),
                "stability".into(),
                "rigidity".into(),
                "stability (2 dp)".into(),
                "rigidity (2 dp)".into(),
            ]];
            for r in rows {
                grid.push(vec![
                    r.spec.name.clone(),
                    format!("[{}, {}]", r.spec.n_low, r.spec.n_high),
                    m_range(&r.spec),
                    bracket(r.stability),
                    bracket(r.rigidity),
                    bracket2([round2(r.stability[0]), round2(r.stability[1])]),
                    bracket2([round2(r.rigidity[0]), round2(r.rigidity[1])]),
                ]);
            }
            let mut out = render_grid(&grid, None);
            out.push_str(
                "# stability = 1 - 1/sqrt(N) at the bracket ends; rigidity lower end = \
                 1 - sqrt((M-1)/M) at the largest outcome count, upper end = 1 (one outcome)\n",
            );
            for r in rows {
                for d in &r.deviations {
                    out.push_str(&format!("# deviation from reference, {}: {d}\n", r.spec.name));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use electorate_core::{validate_system, DEFAULT_ENUMERATION_CAP};

    #[test]
    fn partition_grid_has_cardinality_row() {
        let t = partition_table(5, 5).unwrap();
        let c: Vec<&str> = t.columns.iter().map(|c| c.cardinality.as_str()).collect();
        assert_eq!(c, ["1", "3", "5", "6", "7"]);
        let text = render_partitions(&t, Format::Text);
        assert!(text.lines().last().unwrap().starts_with("c = 1 "));
        assert!(text.contains("[2,2,1]"));
        let t = partition_table(0, 1).unwrap();
        assert_eq!(t.columns[0].shapes.len(), 1);
        assert_eq!(t.columns[0].shapes[0].parts(), &[0]);
        assert!(partition_table(5, 0).is_err());
    }

    #[test]
    fn ledger_matches_reference_layout() {
        let sys = validate_system(5, &[0.1, 0.3, 0.6]).unwrap();
        let l = ensemble_ledger(&sys, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(l.rows.len(), 21);
        let order: Vec<String> = l.rows.iter().take(9).map(|r| r.tally.to_string()).collect();
        assert_eq!(
            order,
            [
                "[5,0,0]", "[0,5,0]", "[0,0,5]", "[4,1,0]", "[4,0,1]", "[1,4,0]", "[1,0,4]",
                "[0,4,1]", "[0,1,4]"
            ]
        );
        assert_eq!(l.rows.last().unwrap().tally.to_string(), "[1,2,2]");
        assert!((l.total_multiplicity - 243.0).abs() < 243.0 * 1e-12);
        assert!((l.total_product - 656.1).abs() < 1e-9);
        assert!((l.variance - 2.7).abs() < 1e-12);
    }

    #[test]
    fn paper_rounding_prints_one_decimal() {
        let sys = validate_system(5, &[0.1, 0.3, 0.6]).unwrap();
        let l = ensemble_ledger(&sys, DEFAULT_ENUMERATION_CAP).unwrap();
        let csv = render_ledger(&l, Format::Csv, true);
        assert!(csv.contains("\"[0,0,5]\",18.9,6.5,122.8\n"));
        assert!(csv.ends_with("Sum,243.0,,656.1\n"));
    }

    #[test]
    fn distinct_permutation_orders() {
        assert_eq!(distinct_permutations(&[2, 2, 1]), vec![vec![2, 2, 1], vec![2, 1, 2], vec![1, 2, 2]]);
        assert_eq!(distinct_permutations(&[1, 1]), vec![vec![1, 1]]);
        assert_eq!(distinct_permutations(&[3, 1, 0]).len(), 6);
    }

    #[test]
    fn branch_brackets() {
        let rows = branch_rows();
        let senate = &rows[2];
        assert!((senate.stability[0] - 0.8600).abs() < 5e-5);
        assert!((senate.stability[1] - 0.9005).abs() < 5e-5);
        assert_eq!(rows[0].rigidity, [0.0, 1.0]);
        // Supreme Court and Senate lower rigidity endpoints do not round to
        // the reference digits; the other endpoints all do.
        let flagged: Vec<usize> = rows.iter().map(|r| r.deviations.len()).collect();
        assert_eq!(flagged, [0, 1, 1, 0]);
        assert!(rows[1].deviations[0].starts_with("rigidity lower"));
    }

    #[test]
    fn branch_spec_validation() {
        assert!(BranchSpec::new("x", (0, 2), (1, None)).is_err());
        assert!(BranchSpec::new("x", (3, 2), (1, None)).is_err());
        assert!(BranchSpec::new("x", (1, 2), (3, Some(2))).is_err());
    }
}
