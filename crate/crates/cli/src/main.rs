//! Command-line front end: parse a homogeneous polynomial, decompose it into
//! powers of linear forms (optionally with tangential or cactus structure),
//! and print the result as text or JSON. Exit status 0 means a verified
//! decomposition, 1 a usage or input error, 2 an honest search failure.

mod parse;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use apolar::decompose::{self, DecompositionReport, DriveOutcome};
use apolar::{Config, DegreeCap};
use clap::Parser;

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum CliMode {
    /// Sum of d-th powers of linear forms.
    Waring,
    /// Powers plus tangential pieces L^(d-1)·M.
    Tangential,
    /// Powers of linear forms times low-degree cofactors, with support
    /// points and multiplicities.
    Cactus,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum CliDegreeCap {
    /// Search bases inside monomials of degree at most the input degree.
    D,
    /// Raise the cap to the current rank when that is larger.
    R,
}

/// Decompose a homogeneous polynomial into powers of linear forms.
#[derive(Parser, Debug)]
#[command(name = "apolar", version, about, long_about = None)]
struct Cli {
    /// The polynomial, e.g. "x^3 - 3x y^2 + (x+y)^3". Multiplication may be
    /// written as '*' or by juxtaposition; coefficients may be integers,
    /// fractions like 3/4, or decimals (read exactly).
    polynomial: String,

    /// What to decompose into.
    #[arg(long, value_enum, default_value_t = CliMode::Waring)]
    mode: CliMode,

    /// Seed for the randomized parts of the search; a fixed seed gives a
    /// reproducible run.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Stop the rank search at this rank instead of the ambient dimension.
    #[arg(long, value_name = "R")]
    max_rank: Option<usize>,

    /// Degree cap for the monomial bases tried at each rank.
    #[arg(long, value_enum, default_value_t = CliDegreeCap::D)]
    degree_cap: CliDegreeCap,

    /// Solve attempts per candidate basis.
    #[arg(long, value_name = "N")]
    attempts: Option<u32>,

    /// Relative residual accepted as a match (default 1e-8).
    #[arg(long, value_name = "T")]
    tol: Option<f64>,

    /// Print the report as JSON instead of text.
    #[arg(long)]
    json: bool,

    /// Comma-separated variable order, e.g. --vars x,y,z. Default is the
    /// order of first appearance in the input.
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    vars: Option<Vec<String>>,

    /// Do not decompose; check a previously saved JSON report against the
    /// polynomial and report the residual.
    #[arg(long, value_name = "FILE")]
    verify_only: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&cli))
}

fn run(cli: &Cli) -> u8 {
    let (poly, vars) = match parse::parse_polynomial(&cli.polynomial, cli.vars.as_deref()) {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {}", e.message);
            eprintln!("  {}", cli.polynomial);
            eprintln!("  {}^", " ".repeat(e.position));
            return 1;
        }
    };

    let mut config = Config::default();
    config.max_rank = cli.max_rank;
    config.degree_cap = match cli.degree_cap {
        CliDegreeCap::D => DegreeCap::InputDegree,
        CliDegreeCap::R => DegreeCap::Rank,
    };
    if let Some(a) = cli.attempts {
        config.attempts = a;
    }
    if let Some(t) = cli.tol {
        config.verify_tol = t;
    }

    if let Some(path) = &cli.verify_only {
        return verify_saved_report(cli, path, &poly, config.verify_tol);
    }

    let outcome = match cli.mode {
        CliMode::Waring => decompose::waring(&poly, &config, cli.seed),
        CliMode::Tangential => decompose::tangential(&poly, &config, cli.seed),
        CliMode::Cactus => decompose::cactus(&poly, &config, cli.seed),
    };

    match outcome {
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
        Ok(DriveOutcome::Success(report)) => {
            if cli.json {
                println!("{}", to_json(&report));
            } else {
                print!("{}", render::report_text(&report, &vars));
            }
            0
        }
        Ok(DriveOutcome::Failure(failure)) => {
            if cli.json {
                println!("{}", to_json(&failure));
            } else {
                eprint!("{}", render::failure_text(&failure));
            }
            2
        }
    }
}

fn verify_saved_report(cli: &Cli, path: &PathBuf, poly: &apolar::Polynomial, tol: f64) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            return 1;
        }
    };
    let report: DecompositionReport = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {} is not a decomposition report: {e}", path.display());
            return 1;
        }
    };
    match decompose::verify(&report, poly) {
        Ok(residual) => {
            let ok = residual <= tol;
            if cli.json {
                println!(
                    "{{\"residual\":{},\"tol\":{},\"ok\":{}}}",
                    serde_json::json!(residual),
                    serde_json::json!(tol),
                    ok
                );
            } else if ok {
                println!("residual {residual:e} within tolerance {tol:e}");
            } else {
                println!("residual {residual:e} EXCEEDS tolerance {tol:e}");
            }
            if ok {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}
