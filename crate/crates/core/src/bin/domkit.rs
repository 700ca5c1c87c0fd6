//! Command-line front end: seeded verification scenarios, pointwise Levi
//! analysis, automorphism-dimension enumeration, and the exceptional-point
//! fiber profile.
//!
//! Exit codes: 0 = success (all checks passed, or analysis produced output),
//! 1 = a verification scenario ran and failed, 2 = usage or infrastructure
//! error (bad arguments, unreadable config, broken references).

use clap::{Parser, Subcommand, ValueEnum};
use domkit::catalog;
use domkit::expr::Expr;
use domkit::harness::{
    self, profile_exceptional, render_reports, Report, RunConfig,
};
use domkit::levi::{LeviError, LeviProbe, LeviReport};
use domkit::reinhardt::enumerate_dims;
use domkit::Complex64;
use std::collections::BTreeMap;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "domkit",
    version,
    about = "Numerical verification toolkit for two rigid domains and a dimension count"
)]
struct Cli {
    /// Base sample count (default: 10000 for identity checks, 2000 for scans).
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Seed for all sample streams; runs with the same seed are reproducible.
    #[arg(long, global = true, default_value_t = harness::DEFAULT_SEED)]
    seed: u64,

    /// Global tolerance override for every check without a per-check entry.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// TOML file with a [tolerances] table of per-check overrides.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,

    /// Record wall-clock runtimes per check (reports are then no longer
    /// byte-identical between runs).
    #[arg(long, global = true)]
    timings: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification scenario and report every check.
    Verify {
        #[arg(value_enum)]
        scenario: Scenario,
    },
    /// Levi analysis of a domain boundary at one point.
    Levi {
        /// Domain reference: `builtin:<name>` or a path to a TOML domain file.
        #[arg(long)]
        domain: String,
        /// Point, e.g. "(0.5+0.5*i, 0.25)"; components are constant
        /// expressions.
        #[arg(long)]
        point: String,
    },
    /// Achievable automorphism dimensions for Reinhardt forms in C^n.
    Enumerate {
        /// Ambient dimension n (1 through 8).
        #[arg(long)]
        dim: usize,
        /// Drop the structures ruled out by the hyperbolicity exclusions.
        #[arg(long)]
        exclusions: bool,
    },
    /// Fiber-extent profile near the exceptional boundary point (1, 0).
    Profile {
        /// Strictly decreasing base distances, e.g. "1e-1,1e-2,1e-3".
        #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3])]
        eps: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    #[value(name = "theorem1")]
    Theorem1,
    #[value(name = "theorem2")]
    Theorem2,
    #[value(name = "lemma-a")]
    LemmaA,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// Runs the selected command; `Err` carries an infrastructure/usage problem
/// (exit 2), `Ok` the final exit code.
fn run(cli: Cli) -> Result<ExitCode, String> {
    let mut cfg = RunConfig {
        seed: cli.seed,
        samples: cli.samples,
        tol: cli.tol,
        tol_overrides: BTreeMap::new(),
        timings: cli.timings,
    };
    if let Some(path) = &cli.config {
        cfg.tol_overrides = harness::load_config(path).map_err(|e| e.to_string())?;
    }
    let markdown = matches!(cli.format, Format::Md);

    match &cli.command {
        Command::Verify { scenario } => {
            let reports: Vec<Report> = match scenario {
                Scenario::Theorem1 => vec![harness::run_theorem1(&cfg).map_err(|e| e.to_string())?],
                Scenario::Theorem2 => vec![harness::run_theorem2(&cfg).map_err(|e| e.to_string())?],
                Scenario::LemmaA => vec![harness::run_lemma_a(&cfg).map_err(|e| e.to_string())?],
                Scenario::All => harness::run_all(&cfg).map_err(|e| e.to_string())?,
            };
            emit(&render_reports(&reports, markdown), cli.out.as_deref())?;
            if reports.iter().all(Report::passed) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Levi { domain, point } => {
            let spec = catalog::resolve_domain(domain).map_err(|e| e.to_string())?;
            let z = parse_point(point)?;
            let probe = LeviProbe::new(&spec);
            match probe.report(&z) {
                Ok(report) => {
                    let text = if markdown {
                        levi_markdown(&spec.name, &report)
                    } else {
                        to_json_line(&report)?
                    };
                    emit(&text, cli.out.as_deref())?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e @ LeviError::DegenerateGradient { .. }) => {
                    let text = if markdown {
                        format!("Levi analysis of `{}` skipped: {e}\n", spec.name)
                    } else {
                        to_json_line(&serde_json::json!({
                            "domain": spec.name,
                            "skipped": e.to_string(),
                        }))?
                    };
                    emit(&text, cli.out.as_deref())?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Enumerate { dim, exclusions } => {
            let table = enumerate_dims(*dim, *exclusions).map_err(|e| e.to_string())?;
            let text = if markdown {
                table.to_markdown()
            } else {
                to_json_line(&table)?
            };
            emit(&text, cli.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Profile { eps } => {
            let table = profile_exceptional(eps).map_err(|e| e.to_string())?;
            let text = if markdown {
                table.to_markdown()
            } else {
                to_json_line(&table)?
            };
            emit(&text, cli.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn to_json_line<T: serde::Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| e.to_string())
}

fn emit(text: &str, out: Option<&str>) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("writing `{path}`: {e}")),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses "(c1, c2, ...)" where each component is a constant expression
/// (numbers, `i`, arithmetic, functions — no variables).
fn parse_point(text: &str) -> Result<Vec<Complex64>, String> {
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(trimmed);
    let mut parts: Vec<String> = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| format!("unbalanced parentheses in point `{text}`"))?;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced parentheses in point `{text}`"));
    }
    parts.push(cur);
    parts
        .iter()
        .map(|p| {
            let src = p.trim();
            let expr =
                Expr::parse(src, 0).map_err(|e| format!("point component `{src}`: {e}"))?;
            expr.eval(&[])
                .map_err(|e| format!("point component `{src}`: {e}"))
        })
        .collect()
}

fn levi_markdown(domain: &str, r: &LeviReport) -> String {
    let fmt_vec = |v: &[Complex64]| {
        let body: Vec<String> = v
            .iter()
            .map(|c| format!("{:+.6e}{:+.6e}i", c.re, c.im))
            .collect();
        format!("({})", body.join(", "))
    };
    let eigen: Vec<String> = r.eigenvalues.iter().map(|e| format!("{e:.6e}")).collect();
    format!(
        "Levi analysis of `{domain}` at {point}\n\n\
         - boundary residual: {residual:.3e}\n\
         - gradient: {grad}\n\
         - restricted eigenvalues (ascending): [{eigen}]\n\
         - rank: {rank}\n\
         - signature: {pos} positive, {neg} negative, {zero} zero\n",
        point = fmt_vec(&r.point),
        residual = r.residual,
        grad = fmt_vec(&r.grad),
        eigen = eigen.join(", "),
        rank = r.rank,
        pos = r.signature.pos,
        neg = r.signature.neg,
        zero = r.signature.zero,
    )
}
