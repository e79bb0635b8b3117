use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use electorate::analyze::{analyze, current_timestamp, render};
use electorate::figure::{self, FigureKind};
use electorate::output::{emit, join_nums, num, to_json, Format};
use electorate::tables::{
    branch_rows, ensemble_ledger, partition_table, render_branches, render_ledger,
    render_partitions,
};
use electorate::verify::{self, VerifyOptions};
use electorate::CliError;
use electorate_core::{
    estimate_marginal, estimate_variance, validate_system, ElectoralSystem, PartyDistribution,
    DEFAULT_ENUMERATION_CAP,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "electorate", version, about = "Stability and rigidity of electoral systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form attributes of one system, optionally checked exhaustively.
    Analyze {
        #[command(flatten)]
        system: SystemArgs,
        /// Also enumerate every tally and report the exhaustive ensemble.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Partition sets, the ensemble ledger, or branch brackets.
    #[command(subcommand)]
    Table(TableCommand),
    /// Density data for the stability or rigidity plots.
    #[command(subcommand)]
    Figure(FigureCommand),
    /// Run the built-in self-check suite.
    Verify {
        #[arg(long, default_value_t = 8)]
        max_electors: u64,
        #[arg(long, default_value_t = 4)]
        max_parties: usize,
        /// Random simplex points per (N, M) cell.
        #[arg(long, default_value_t = 25)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add Monte Carlo spot checks with this many trials each.
        #[arg(long)]
        trials: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Monte Carlo estimate of the ensemble variance or a party marginal.
    Mc {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Estimate P(N_party = count) instead of the variance (1-based).
        #[arg(long, requires = "count")]
        party: Option<usize>,
        #[arg(long, requires = "party")]
        count: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Subcommand)]
enum TableCommand {
    /// Partitions of N into at most M parts, for M = 1..max.
    Partitions {
        #[arg(short = 'n', long, default_value_t = 5)]
        electors: u64,
        #[arg(long, default_value_t = 5)]
        max_parties: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Per-tally multiplicity and excess self-product with column sums.
    Table2 {
        #[arg(short = 'n', long, default_value_t = 5, allow_negative_numbers = true)]
        electors: i64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.1,0.3,0.6")]
        probs: Vec<f64>,
        /// Round g and g*x.x to one decimal.
        #[arg(long)]
        paper_rounding: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Stability and rigidity brackets for the branches of government.
    Branches {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Subcommand)]
enum FigureCommand {
    /// Marginal densities against N_k/N for a sweep of elector counts.
    Stability {
        #[arg(short = 'n', long, value_delimiter = ',', default_value = "1,6,15,200")]
        electors: Vec<u64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.1,0.3,0.6")]
        probs: Vec<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Marginal densities against the excess fraction for a sweep of outcome counts.
    Rigidity {
        #[arg(short = 'n', long, default_value_t = 30)]
        electors: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,9,500")]
        parties: Vec<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct SystemArgs {
    #[arg(short = 'n', long, allow_negative_numbers = true)]
    electors: i64,
    /// Comma-separated outcome probabilities.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "uniform", required_unless_present = "uniform")]
    probs: Option<Vec<f64>>,
    /// Equal probabilities over this many outcomes.
    #[arg(long)]
    uniform: Option<usize>,
}

impl SystemArgs {
    fn system(&self) -> Result<ElectoralSystem, CliError> {
        let probs = match (&self.probs, self.uniform) {
            (Some(p), _) => p.clone(),
            (None, Some(m)) => PartyDistribution::uniform(m)?.probs().to_vec(),
            (None, None) => return Err(CliError::Usage("one of --probs or --uniform is required".into())),
        };
        Ok(validate_system(self.electors, &probs)?)
    }
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Largest number of tallies an exhaustive enumeration may visit.
    #[arg(long, env = "ELECTORATE_CAP", default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn emit(&self, text: &str) -> Result<(), CliError> {
        emit(text, self.out.as_deref())
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Analyze { system, verify, common } => {
            let sys = system.system()?;
            let record = analyze(&sys, verify, common.cap, current_timestamp())?;
            common.emit(&render(&record, common.format.unwrap_or(Format::Json)))?;
        }
        Command::Table(TableCommand::Partitions { electors, max_parties, common }) => {
            let table = partition_table(electors, max_parties)?;
            common.emit(&render_partitions(&table, common.format.unwrap_or(Format::Text)))?;
        }
        Command::Table(TableCommand::Table2 { electors, probs, paper_rounding, common }) => {
            let sys = validate_system(electors, &probs)?;
            let ledger = ensemble_ledger(&sys, common.cap)?;
            common.emit(&render_ledger(&ledger, common.format.unwrap_or(Format::Text), paper_rounding))?;
        }
        Command::Table(TableCommand::Branches { common }) => {
            common.emit(&render_branches(&branch_rows(), common.format.unwrap_or(Format::Text)))?;
        }
        Command::Figure(FigureCommand::Stability { electors, probs, common }) => {
            let dist = PartyDistribution::new(probs)?;
            let curves = figure::stability_figure(&electors, &dist)?;
            common.emit(&figure::render(FigureKind::Stability, &curves, common.format.unwrap_or(Format::Csv)))?;
        }
        Command::Figure(FigureCommand::Rigidity { electors, parties, common }) => {
            let curves = figure::rigidity_figure(electors, &parties)?;
            common.emit(&figure::render(FigureKind::Rigidity, &curves, common.format.unwrap_or(Format::Csv)))?;
        }
        Command::Verify { max_electors, max_parties, points, seed, trials, common } => {
            let opts = VerifyOptions { max_electors, max_parties, points, seed, trials, cap: common.cap };
            let report = verify::run(&opts)?;
            match common.format.unwrap_or(Format::Json) {
                Format::Json => common.emit(&report.to_json())?,
                _ => {
                    let mut s = String::new();
                    for c in &report.checks {
                        s.push_str(&format!(
                            "{} {} cases={} max_abs={} max_rel={} tol={} ({})\n",
                            if c.passed { "PASS" } else { "FAIL" },
                            c.name,
                            c.cases,
                            num(c.max_abs_deviation),
                            num(c.max_rel_deviation),
                            num(c.tolerance),
                            c.tolerance_kind
                        ));
                    }
                    s.push_str(if report.passed { "all checks passed\n" } else { "some checks failed\n" });
                    common.emit(&s)?;
                }
            }
            return Ok(report.passed);
        }
        Command::Mc { system, trials, seed, party, count, common } => {
            let sys = system.system()?;
            let (quantity, est, exact) = match (party, count) {
                (Some(k), Some(c)) => (
                    "marginal",
                    estimate_marginal(&sys, k, c, trials, seed)?,
                    electorate_core::binomial_marginal(k, c, &sys)?,
                ),
                _ => (
                    "variance",
                    estimate_variance(&sys, trials, seed)?,
                    sys.electors() as f64 * (1.0 - sys.distribution().sum_of_squares()),
                ),
            };
            let z = if est.std_error > 0.0 { (est.mean - exact) / est.std_error } else { 0.0 };
            let text = match common.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&json!({
                    "system": sys,
                    "quantity": quantity,
                    "party": party,
                    "count": count,
                    "estimate": est,
                    "exact": exact,
                    "standard_errors_from_exact": z,
                })),
                _ => format!(
                    "N = {}, p = [{}]\n{quantity}: estimate {} +/- {} ({} trials, seed {}), exact {}, z = {}\n",
                    sys.electors(),
                    join_nums(sys.probs()),
                    num(est.mean),
                    num(est.std_error),
                    est.trials,
                    est.seed,
                    num(exact),
                    num(z)
                ),
            };
            common.emit(&text)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.kind().to_string());
            eprintln!("{}", err.to_json());
            eprint!("{}", e.render());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
