//! `mdii` — rapid assessment of digital tools against a hierarchical
//! inclusiveness index with LLM judges.
//!
//! Exit codes: 0 success, 1 validation failure, 2 fatal I/O, 3 insufficient
//! data for reports.

use clap::{Parser, Subcommand};
use mdii_core::analytics::OverallVariant;
use mdii_core::dossier::{completeness, load_baseline, load_dossier};
use mdii_core::run::{
    render_reports, resume, run_sweep, BackendMode, Granularity, RunConfig, RunError, SweepOptions,
    SweepOutcome,
};
use mdii_core::schema::{load_schema, SchemaError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_VALIDATION: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_INSUFFICIENT_DATA: u8 = 3;

#[derive(Parser)]
#[command(name = "mdii", version, about = "LLM-judge rapid assessment for the MDII")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a schema file, and dossiers against it.
    Validate {
        #[arg(long)]
        schema: PathBuf,
        /// Dossier files to check against the schema (repeatable).
        #[arg(long = "dossier")]
        dossiers: Vec<PathBuf>,
    },
    /// Run a full sweep (providers x temperatures x tools x units).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue a partial run in the output directory.
        #[arg(long)]
        resume: bool,
        /// Stop after this many requests (resume later to finish).
        #[arg(long)]
        max_requests: Option<usize>,
        /// Worker pool width.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Assess one tool with one provider (selected by model id).
    Assess {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tool: String,
        #[arg(long)]
        provider: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render reports from an existing transcript.
    Report {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Dossiers for the completeness table (repeatable, optional).
        #[arg(long = "dossier")]
        dossiers: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Which overall percentage feeds the analytics: hierarchical | flat.
        #[arg(long, default_value = "hierarchical")]
        overall: String,
        /// Unit granularity of the transcript: indicator | subdimension.
        #[arg(long, default_value = "indicator")]
        granularity: String,
    },
    /// Replay a recorded transcript through the full pipeline.
    Replay {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { schema, dossiers } => cmd_validate(&schema, &dossiers),
        Command::Sweep {
            config,
            out,
            resume: do_resume,
            max_requests,
            workers,
        } => cmd_sweep(&config, out, do_resume, max_requests, workers),
        Command::Assess {
            config,
            tool,
            provider,
            out,
        } => cmd_assess(&config, &tool, &provider, out),
        Command::Report {
            transcript,
            baseline,
            schema,
            dossiers,
            out,
            overall,
            granularity,
        } => cmd_report(&transcript, &baseline, &schema, &dossiers, &out, &overall, &granularity),
        Command::Replay {
            transcript,
            config,
            out,
        } => cmd_replay(&transcript, &config, out),
    };
    ExitCode::from(code)
}

fn cmd_validate(schema_path: &Path, dossier_paths: &[PathBuf]) -> u8 {
    let schema = match load_schema(schema_path) {
        Ok(schema) => schema,
        Err(SchemaError::Io(e)) => {
            eprintln!("error: cannot read {}: {e}", schema_path.display());
            return EXIT_IO;
        }
        Err(SchemaError::Parse(e)) => {
            eprintln!("invalid: {}: {e}", schema_path.display());
            return EXIT_VALIDATION;
        }
        Err(SchemaError::Validation(violations)) => {
            eprintln!("invalid: {}:", schema_path.display());
            for v in violations {
                eprintln!("  {v}");
            }
            return EXIT_VALIDATION;
        }
    };
    println!(
        "schema OK: {} mega-groups, {} dimensions, {} subdimensions, {} indicators",
        schema.mega_groups.len(),
        schema.dimensions.len(),
        schema.subdimensions.len(),
        schema.indicators.len()
    );
    let mut failed = false;
    for path in dossier_paths {
        match load_dossier(path, &schema) {
            Ok(dossier) => {
                let report = completeness(&dossier, &schema);
                println!(
                    "dossier {} OK: {} unanswered of {} indicators",
                    dossier.tool_id,
                    report.unanswered_count,
                    schema.indicators.len()
                );
            }
            Err(e) => {
                eprintln!("invalid: {}: {e}", path.display());
                failed = true;
            }
        }
    }
    if failed {
        EXIT_VALIDATION
    } else {
        EXIT_OK
    }
}

fn load_config(path: &Path) -> Result<RunConfig, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_IO
    })?;
    serde_json::from_str(&text).map_err(|e| {
        eprintln!("invalid config {}: {e}", path.display());
        EXIT_VALIDATION
    })
}

fn exit_code_for(err: &RunError) -> u8 {
    match err {
        RunError::Io(_) | RunError::Transcript(_) => EXIT_IO,
        RunError::InsufficientData(_) => EXIT_INSUFFICIENT_DATA,
        _ => EXIT_VALIDATION,
    }
}

fn print_outcome(outcome: &SweepOutcome) -> u8 {
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    println!(
        "run {}: {} requests in manifest, {} processed now ({} done, {} failed)",
        outcome.manifest.run_id,
        outcome.manifest.requests.len(),
        outcome.dispatched,
        outcome.done,
        outcome.failed
    );
    for path in &outcome.report_paths {
        println!("wrote {}", path.display());
    }
    if outcome.report.is_none() {
        eprintln!("insufficient data for reports (see report_notes.txt)");
        return EXIT_INSUFFICIENT_DATA;
    }
    EXIT_OK
}

fn cmd_sweep(
    config_path: &Path,
    out: Option<PathBuf>,
    do_resume: bool,
    max_requests: Option<usize>,
    workers: usize,
) -> u8 {
    let mut config = match load_config(config_path) {
        Ok(config) => config,
        Err(code) => return code,
    };
    if let Some(out) = out {
        config.output_dir = out;
    }
    let options = SweepOptions {
        max_requests,
        workers,
    };
    let result = if do_resume {
        resume(&config.output_dir, &options)
    } else {
        run_sweep(&config, &options)
    };
    match result {
        Ok(outcome) => print_outcome(&outcome),
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn cmd_assess(config_path: &Path, tool: &str, provider: &str, out: Option<PathBuf>) -> u8 {
    let mut config = match load_config(config_path) {
        Ok(config) => config,
        Err(code) => return code,
    };
    if let Some(out) = out {
        config.output_dir = out;
    }
    config.providers.retain(|p| p.model_id == provider);
    if config.providers.is_empty() {
        eprintln!("error: no provider with model_id {provider} in config");
        return EXIT_VALIDATION;
    }
    // narrow the dossier list to the requested tool
    let schema = match load_schema(&config.schema_path) {
        Ok(schema) => schema,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let mut kept = Vec::new();
    for path in &config.dossier_paths {
        match load_dossier(path, &schema) {
            Ok(dossier) if dossier.tool_id == tool => kept.push(path.clone()),
            Ok(_) => {}
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        }
    }
    if kept.is_empty() {
        eprintln!("error: no dossier for tool {tool} in config");
        return EXIT_VALIDATION;
    }
    config.dossier_paths = kept;
    match run_sweep(&config, &SweepOptions::default()) {
        Ok(outcome) => {
            for warning in &outcome.warnings {
                eprintln!("warning: {warning}");
            }
            println!(
                "assessed {tool} with {provider}: {} done, {} failed",
                outcome.done, outcome.failed
            );
            for path in &outcome.report_paths {
                println!("wrote {}", path.display());
            }
            // single-tool runs cannot produce alignment tables; that is expected
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_report(
    transcript: &Path,
    baseline_path: &Path,
    schema_path: &Path,
    dossier_paths: &[PathBuf],
    out: &Path,
    overall: &str,
    granularity: &str,
) -> u8 {
    let overall = match overall {
        "hierarchical" => OverallVariant::Hierarchical,
        "flat" => OverallVariant::Flat,
        other => {
            eprintln!("error: unknown overall variant {other:?} (hierarchical | flat)");
            return EXIT_VALIDATION;
        }
    };
    let granularity = match granularity {
        "indicator" => Granularity::Indicator,
        "subdimension" => Granularity::Subdimension,
        other => {
            eprintln!("error: unknown granularity {other:?} (indicator | subdimension)");
            return EXIT_VALIDATION;
        }
    };
    let schema = match load_schema(schema_path) {
        Ok(schema) => schema,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let baseline = match load_baseline(baseline_path) {
        Ok(baseline) => baseline,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let mut completeness_reports = Vec::new();
    for path in dossier_paths {
        match load_dossier(path, &schema) {
            Ok(dossier) => completeness_reports.push(completeness(&dossier, &schema)),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        }
    }
    match render_reports(
        transcript,
        &baseline,
        &schema,
        &completeness_reports,
        overall,
        granularity,
        out,
    ) {
        Ok((report, paths)) => {
            for path in &paths {
                println!("wrote {}", path.display());
            }
            if report.is_none() {
                eprintln!("insufficient data for reports (see report_notes.txt)");
                EXIT_INSUFFICIENT_DATA
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn cmd_replay(transcript: &Path, config_path: &Path, out: Option<PathBuf>) -> u8 {
    let mut config = match load_config(config_path) {
        Ok(config) => config,
        Err(code) => return code,
    };
    config.backend_mode = BackendMode::Replay {
        path: transcript.clone(),
    };
    if let Some(out) = out {
        config.output_dir = out;
    }
    match run_sweep(&config, &SweepOptions::default()) {
        Ok(outcome) => print_outcome(&outcome),
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
