use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use qcorr::report::{emit_report, Format, ReportDocument};
use qcorr::scenario::{
    load_scenario, paper_scenario, parse_params, run_scenario, scenario_to_json,
    DecompositionFilter, Scenario, ScenarioError,
};
use qcorr::selftest::{run_selftest, DEFAULT_TRIALS};

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Total, classical and entanglement correlation densities"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file.
    Run {
        file: PathBuf,
        /// Report only this decomposition (a name from the file, or `spectral`).
        #[arg(long)]
        decomposition: Option<String>,
    },
    /// Evaluate a built-in example: i, ii, iii, iii-mixed, appendix, appendix-px.
    PaperExample {
        id: String,
        /// Overrides such as `w1=0.5,w2=0.5,w3=0,w4=0` or `a=0.3`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        decomposition: Option<String>,
        /// Print the generated scenario file instead of running it.
        #[arg(long, hide = true)]
        emit_scenario: bool,
    },
    /// Parse and validate a scenario file without evaluating it.
    Validate { file: PathBuf },
    /// Randomized checks of the structural identities.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
    },
}

fn filter(decomposition: Option<String>) -> DecompositionFilter {
    decomposition
        .map(DecompositionFilter::Only)
        .unwrap_or_default()
}

fn print_report(report: &ReportDocument, format: Format) -> ExitCode {
    print!("{}", emit_report(report, format));
    if report.has_engine_failure() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn fail(err: ScenarioError, format: Format) -> ExitCode {
    match format {
        Format::Json => {
            let mut obj = json!({ "error": { "kind": err.kind(), "message": err.to_string() } });
            if let ScenarioError::Parse { line, column, .. } = &err {
                obj["error"]["line"] = json!(line);
                obj["error"]["column"] = json!(column);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&obj).expect("error serializes")
            );
        }
        Format::Table => eprintln!("qcorr: {err}"),
    }
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let result = match cli.command {
        Command::Run {
            file,
            decomposition,
        } => load_scenario(&file)
            .and_then(|s| run_scenario(&s, &filter(decomposition)))
            .map(|r| print_report(&r, format)),
        Command::PaperExample {
            id,
            params,
            decomposition,
            emit_scenario,
        } => parse_params(&params)
            .and_then(|p| paper_scenario(&id, &p))
            .and_then(|file| {
                if emit_scenario {
                    print!("{}", scenario_to_json(&file));
                    return Ok(ExitCode::SUCCESS);
                }
                let s = Scenario::from_file(file)?;
                run_scenario(&s, &filter(decomposition)).map(|r| print_report(&r, format))
            }),
        Command::Validate { file } => load_scenario(&file).map(|s| {
            match format {
                Format::Json => println!("{}", json!({ "valid": true, "name": s.file.name })),
                Format::Table => println!("{}: valid", file.display()),
            }
            ExitCode::SUCCESS
        }),
        Command::Selftest { seed, trials } => {
            let r = run_selftest(seed, trials);
            match format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&r).expect("report serializes")
                ),
                Format::Table => print!("{}", r.render()),
            }
            Ok(if r.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
    };
    result.unwrap_or_else(|e| fail(e, format))
}
