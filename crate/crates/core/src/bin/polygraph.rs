use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polygraph::diagram::{to_dot, Circuit};
use polygraph::format::{parse, PolyFile};
use polygraph::rewrite::{find_matches, normalize, TraceStatus};
use polygraph::termination::{check_polygraph, Overall, VerificationMode};
use serde_json::json;

#[derive(Parser)]
#[command(version, about = "Rewrite circuits and certify termination of polygraphs")]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for grid verification.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Also print Graphviz dot for the circuits involved.
    #[arg(long, global = true)]
    emit_dot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// One JSON object per line.
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and report what it declares.
    Check { file: PathBuf },
    /// Rewrite a term until no rule applies or the budget runs out.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(long, default_value_t = 1000)]
        budget: usize,
    },
    /// List the occurrences of a rule's left-hand side in a term.
    Match {
        file: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(long)]
        rule: String,
    },
    /// Check that every rule decreases under the file's interpretation.
    Verify {
        file: PathBuf,
        /// `grid:B` or `affine`.
        #[arg(long, default_value = "grid:4", value_parser = parse_mode)]
        mode: VerificationMode,
    },
}

fn parse_mode(s: &str) -> Result<VerificationMode, String> {
    if s == "affine" {
        return Ok(VerificationMode::AffineExact);
    }
    let bound = s
        .strip_prefix("grid:")
        .ok_or_else(|| format!("expected `grid:B` or `affine`, got `{s}`"))?;
    let bound: u64 = bound.parse().map_err(|e| format!("bad bound `{bound}`: {e}"))?;
    if bound == 0 {
        return Err("grid bound must be positive".into());
    }
    Ok(VerificationMode::BoundedGrid { bound })
}

fn load(path: &Path) -> Result<PolyFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}:{e}", path.display()))
}

fn term(file: &PolyFile, text: &str) -> Result<Circuit, String> {
    file.term(text).map_err(|e| format!("term:{e}"))
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    let records = cli.format == Format::Records;
    match &cli.command {
        Command::Check { file } => {
            let f = load(file)?;
            let sig = f.signature();
            for w in &f.warnings {
                eprintln!("warning: {w}");
            }
            if records {
                let rec = json!({
                    "generators": sig.len(),
                    "rules": f.polygraph.rules().len(),
                    "interpretation": f.interpretation.is_some(),
                    "warnings": f.warnings,
                });
                println!("{rec}");
            } else {
                println!(
                    "{}: {} generators, {} rules, {}",
                    file.display(),
                    sig.len(),
                    f.polygraph.rules().len(),
                    if f.interpretation.is_some() { "interpreted" } else { "no interpretation" }
                );
            }
            if cli.emit_dot {
                for r in f.polygraph.rules() {
                    print!("{}", to_dot(r.lhs(), sig));
                    print!("{}", to_dot(r.rhs(), sig));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Normalize { file, term: t, budget } => {
            let f = load(file)?;
            let sig = f.signature();
            let start = term(&f, t)?;
            let trace = normalize(&start, &f.polygraph, *budget);
            let status = match trace.status {
                TraceStatus::Normalized => "normalized",
                TraceStatus::BudgetExhausted => "budget exhausted",
            };
            if records {
                for (i, s) in trace.steps.iter().enumerate() {
                    let rec = json!({
                        "step": i + 1,
                        "rule": s.rule,
                        "nodes": s.occurrence.nodes,
                        "result": s.result.display(sig).to_string(),
                    });
                    println!("{rec}");
                }
                let rec = json!({
                    "status": status,
                    "steps": trace.steps.len(),
                    "normal_form": trace.last().display(sig).to_string(),
                });
                println!("{rec}");
            } else {
                println!("start: {}", trace.start.display(sig));
                for (i, s) in trace.steps.iter().enumerate() {
                    println!(
                        "{}. {} at {:?}: {}",
                        i + 1,
                        s.rule,
                        s.occurrence.nodes,
                        s.result.display(sig)
                    );
                }
                println!("{status} after {} steps", trace.steps.len());
            }
            if cli.emit_dot {
                print!("{}", to_dot(trace.last(), sig));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Match { file, term: t, rule } => {
            let f = load(file)?;
            let sig = f.signature();
            let target = term(&f, t)?;
            let r = f
                .polygraph
                .rule(rule)
                .ok_or_else(|| format!("no rule named `{rule}`"))?;
            let occs = find_matches(&target, r);
            for o in &occs {
                if records {
                    let rec = json!({
                        "rule": rule,
                        "nodes": o.nodes,
                        "left": o.left,
                        "right": o.right,
                        "above": o.above.display(sig).to_string(),
                        "below": o.below.display(sig).to_string(),
                    });
                    println!("{rec}");
                } else {
                    println!(
                        "{:?}: above {}, left {}, right {}, below {}",
                        o.nodes,
                        o.above.display(sig),
                        o.left,
                        o.right,
                        o.below.display(sig)
                    );
                }
            }
            if !records {
                println!("{} occurrences of {rule}", occs.len());
            }
            if cli.emit_dot {
                print!("{}", to_dot(&target, sig));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { file, mode } => {
            let f = load(file)?;
            let a = f
                .interpretation
                .as_ref()
                .ok_or_else(|| format!("{}: no interpretation declared", file.display()))?;
            let report = check_polygraph(&f.polygraph, a, *mode).map_err(|e| e.to_string())?;
            if records {
                for v in &report.verdicts {
                    println!("{}", serde_json::to_string(v).expect("verdicts serialize"));
                }
            } else {
                print!("{report}");
            }
            Ok(match report.overall {
                Overall::Refuted { .. } => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
