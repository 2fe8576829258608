//! Batch command-line surface: enumeration, relation generation, solving,
//! rank/dimension tables, numeric verification, and table export.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use polylog::constalg::ConstSymbol;
use polylog::error::{Error, Result};
use polylog::indexcore::{count_convergent, enumerate_convergent, IntegralIndex};
use polylog::numverify::Evaluator;
use polylog::relgen::{self, Method};
use polylog::solver::{
    self, export_residual, export_table, import_table, relations_for_weight, ClosedFormTable,
    PivotPolicy, RankReport, SolveConfig, VerifyPolicy,
};

#[derive(Parser)]
#[command(
    name = "polylog",
    about = "Exact closed forms for log-kernel integrals over [0,1]",
    version
)]
struct Cli {
    /// Optional key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the number of convergent integrals of a weight.
    Count { weight: u32 },
    /// List all convergent integral names of a weight.
    Enumerate { weight: u32 },
    /// Generate and print the relations of a weight.
    Relations {
        weight: u32,
        /// Restrict to one generating method (IBP, FT, GP, SR, CI, MI, 2F1).
        #[arg(long)]
        method: Option<String>,
        /// Numerically check each printed relation.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Solve all weights up to the maximum and write the closed-form table.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Write the table export here (default: stdout).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the closed form of one integral (e.g. i2231).
    ClosedForm {
        name: String,
        /// Read a previously exported table instead of solving.
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-check every stored closed form of a weight by quadrature.
    Verify {
        weight: u32,
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the cumulative per-method rank table.
    Table1 {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the per-weight dimension bounds for new constants.
    Table2 {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Export the solved table (full grammar or per-weight residual style).
    Export {
        #[arg(long, value_enum, default_value_t = ExportStyle::Full)]
        style: ExportStyle,
        /// Weight for residual-style export.
        #[arg(long)]
        weight: Option<u32>,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExportStyle {
    Full,
    Residual,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Structured,
}

/// Flags shared by the pipeline commands; unset values fall back to the
/// config file, then to the defaults (weight 8, 40 digits).
#[derive(Args)]
struct RunArgs {
    /// Highest weight to solve (>= 2).
    #[arg(long)]
    max_weight: Option<u32>,
    /// Working precision in decimal digits (>= 20).
    #[arg(long)]
    digits: Option<u32>,
    /// Comma-separated method subset, e.g. "IBP,FT,GP".
    #[arg(long)]
    methods: Option<String>,
    /// Numerically check every generated relation at every weight.
    #[arg(long)]
    strict_verify: bool,
    /// Skip numeric relation checking entirely.
    #[arg(long, conflicts_with = "strict_verify")]
    no_verify: bool,
    /// Pivot policy: lex-latest (default) or lex-earliest.
    #[arg(long)]
    pivot: Option<String>,
    /// Comma-separated weights at which the second multiple-integral
    /// family is skipped.
    #[arg(long)]
    disable_mi2: Option<String>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

struct RunConfig {
    max_weight: u32,
    cfg: SolveConfig,
    format: OutputFormat,
}

fn parse_methods(s: &str) -> Result<BTreeSet<Method>> {
    s.split(',')
        .map(|tok| tok.trim().parse::<Method>())
        .collect()
}

fn parse_weights(s: &str) -> Result<BTreeSet<u32>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad weight {tok:?}")))
        })
        .collect()
}

fn load_config_file(path: &PathBuf) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad config line {line:?}")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn resolve(run: &RunArgs, config: &Option<PathBuf>) -> Result<RunConfig> {
    let mut max_weight = run.max_weight;
    let mut digits = run.digits;
    let mut methods = match &run.methods {
        Some(s) => Some(parse_methods(s)?),
        None => None,
    };
    let mut pivot = match &run.pivot {
        Some(s) => Some(PivotPolicy::from_str(s)?),
        None => None,
    };
    let mut disable_mi2 = match &run.disable_mi2 {
        Some(s) => Some(parse_weights(s)?),
        None => None,
    };
    let mut verify = if run.strict_verify {
        Some(VerifyPolicy::Strict)
    } else if run.no_verify {
        Some(VerifyPolicy::Off)
    } else {
        None
    };
    let mut format = run.format;

    if let Some(path) = config {
        for (k, v) in load_config_file(path)? {
            match k.as_str() {
                "max-weight" => {
                    let w = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad max-weight {v:?}")))?;
                    max_weight.get_or_insert(w);
                }
                "digits" => {
                    let d = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad digits {v:?}")))?;
                    digits.get_or_insert(d);
                }
                "methods" => {
                    let m = parse_methods(&v)?;
                    methods.get_or_insert(m);
                }
                "pivot" => {
                    let p = PivotPolicy::from_str(&v)?;
                    pivot.get_or_insert(p);
                }
                "disable-mi2" => {
                    let w = parse_weights(&v)?;
                    disable_mi2.get_or_insert(w);
                }
                "verify" => {
                    let p = match v.as_str() {
                        "off" => VerifyPolicy::Off,
                        "standard" => VerifyPolicy::Standard,
                        "strict" => VerifyPolicy::Strict,
                        _ => return Err(Error::Parse(format!("bad verify policy {v:?}"))),
                    };
                    verify.get_or_insert(p);
                }
                "format" => {
                    let f = match v.as_str() {
                        "text" => OutputFormat::Text,
                        "structured" => OutputFormat::Structured,
                        _ => return Err(Error::Parse(format!("bad format {v:?}"))),
                    };
                    format.get_or_insert(f);
                }
                _ => return Err(Error::Parse(format!("unknown config key {k:?}"))),
            }
        }
    }

    let max_weight = max_weight.unwrap_or(8);
    let digits = digits.unwrap_or(40);
    if max_weight < 2 {
        return Err(Error::Parse("max weight must be >= 2".into()));
    }
    if digits < 20 {
        return Err(Error::Parse("digits must be >= 20".into()));
    }
    Ok(RunConfig {
        max_weight,
        cfg: SolveConfig {
            policy: pivot.unwrap_or_default(),
            verify: verify.unwrap_or_default(),
            digits,
            disable_mi2: disable_mi2.unwrap_or_default(),
            methods,
        },
        format: format.unwrap_or(OutputFormat::Text),
    })
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_or_solve(table: &Option<PathBuf>, rc: &RunConfig) -> Result<ClosedFormTable> {
    match table {
        Some(path) => import_table(&std::fs::read_to_string(path)?),
        None => Ok(solver::solve_up_to(rc.max_weight, &rc.cfg)?.0),
    }
}

fn print_rank_report(r: &RankReport, format: OutputFormat) {
    match format {
        OutputFormat::Text => {
            let ranks: Vec<String> = r
                .cumulative
                .iter()
                .map(|&(_, rank)| rank.to_string())
                .collect();
            println!(
                "weight {:2}: {} | {}   (new constants: {})",
                r.weight,
                ranks.join(" "),
                r.total_unknowns,
                r.new_constants
            );
        }
        OutputFormat::Structured => {
            for &(m, rank) in &r.cumulative {
                println!("rank {} {} {}", r.weight, m, rank);
            }
            println!("unknowns {} {}", r.weight, r.total_unknowns);
            println!("new-constants {} {}", r.weight, r.new_constants);
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Count { weight } => {
            if weight == 0 {
                return Err(Error::Parse("weight must be >= 1".into()));
            }
            println!("{}", count_convergent(weight));
        }
        Command::Enumerate { weight } => {
            if weight == 0 {
                return Err(Error::Parse("weight must be >= 1".into()));
            }
            for idx in enumerate_convergent(weight) {
                println!("{idx}");
            }
        }
        Command::Relations {
            weight,
            method,
            verify,
            run,
        } => {
            let rc = resolve(&run, &cli.config)?;
            let rels = match method {
                Some(name) => relgen::generate(weight, name.parse()?)?,
                None => relations_for_weight(weight, &rc.cfg)?,
            };
            let ev = verify.then(|| Evaluator::with_digits(rc.cfg.digits));
            for rel in &rels {
                println!("{rel}");
                if let Some(ev) = &ev {
                    relgen::check_relation(ev, rel)?;
                }
            }
            if verify {
                eprintln!("all {} relations verified numerically", rels.len());
            }
        }
        Command::Solve { run, output } => {
            let rc = resolve(&run, &cli.config)?;
            let (table, reports) = solver::solve_up_to(rc.max_weight, &rc.cfg)?;
            for r in &reports {
                print_rank_report(r, rc.format);
            }
            emit(&output, &export_table(&table))?;
        }
        Command::ClosedForm { name, table, run } => {
            let rc = resolve(&run, &cli.config)?;
            let idx: IntegralIndex = name.parse()?;
            let rc = RunConfig {
                max_weight: rc.max_weight.max(idx.weight()),
                ..rc
            };
            let t = load_or_solve(&table, &rc)?;
            let expr = t.closed_form(idx)?;
            match rc.format {
                OutputFormat::Text => println!("{idx} = {expr}"),
                OutputFormat::Structured => println!("{expr}"),
            }
        }
        Command::Verify { weight, table, run } => {
            let rc = resolve(&run, &cli.config)?;
            let rc = RunConfig {
                max_weight: rc.max_weight.max(weight),
                ..rc
            };
            let t = load_or_solve(&table, &rc)?;
            let ev = Evaluator::with_digits(rc.cfg.digits);
            t.bind_evaluator(&ev);
            let threshold = -((rc.cfg.digits as i64) - 10);
            let mut n = 0usize;
            for idx in enumerate_convergent(weight) {
                let expr = t.closed_form(idx)?;
                // Skip entries that *define* a named constant: their
                // residual is zero by construction.
                if let Some((m, q)) = expr.terms().next() {
                    if expr.num_terms() == 1
                        && q == &polylog::constalg::rat(1, 1)
                        && matches!(m.factors(), [(ConstSymbol::Named(_), 1)])
                    {
                        continue;
                    }
                }
                let resid = ev.check_closed_form(idx, expr)?;
                let bound = rug::Float::with_val(64, threshold).exp10();
                if resid.clone().abs() >= bound {
                    return Err(Error::Numeric(format!(
                        "{idx}: residual {} exceeds 1e{threshold}",
                        ev.to_decimal(&resid)
                    )));
                }
                n += 1;
            }
            println!("verified {n} closed forms of weight {weight} (residual < 1e{threshold})");
        }
        Command::Table1 { run } => {
            let rc = resolve(&run, &cli.config)?;
            let reports = solver::table1_counts(rc.max_weight, &rc.cfg)?;
            for r in &reports {
                print_rank_report(r, rc.format);
            }
        }
        Command::Table2 { run } => {
            let rc = resolve(&run, &cli.config)?;
            for (w, dim) in solver::table2_dims(rc.max_weight, &rc.cfg)? {
                println!("weight {w:2}: {dim}");
            }
        }
        Command::Export {
            style,
            weight,
            table,
            output,
            run,
        } => {
            let rc = resolve(&run, &cli.config)?;
            let t = load_or_solve(&table, &rc)?;
            let text = match style {
                ExportStyle::Full => export_table(&t),
                ExportStyle::Residual => {
                    let w = weight
                        .ok_or_else(|| Error::Parse("residual export needs --weight".into()))?;
                    export_residual(&t, w)
                }
            };
            emit(&output, &text)?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Precondition(_) | Error::NotSolved(_) => 2,
        Error::Inconsistent(_) | Error::GammaPresent(_) => 3,
        Error::Numeric(_) => 4,
        Error::Io(_) => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
