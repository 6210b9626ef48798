use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pbqc_lab::{emit_table, report::table_selectors, Command, LabError, Overrides};

#[derive(Parser)]
#[command(name = "pbqc-lab", version, about = "Position-verification attack experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Honest run of the configured protocol.
    RunProtocol(Common),
    /// Run the configured attack.
    RunAttack(Common),
    /// Success rates of the two-station strategies.
    Rates(Common),
    /// Perfect-cheating search with a two-qubit resource.
    #[command(name = "search-2q")]
    Search2q(Common),
    /// Perfect-cheating search with a qubit-qutrit resource.
    #[command(name = "search-3l")]
    Search3l(Common),
    /// Whether the claimed position lies inside the verifiers' hull.
    Feasibility(Common),
    /// Check the stabilizer residual tables.
    VerifyStabilizers(Common),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Report,
    Table,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides [run] seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides [output] dir.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "report")]
    format: Format,
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::RunProtocol(c) => (Command::RunProtocol, c),
        Cmd::RunAttack(c) => (Command::RunAttack, c),
        Cmd::Rates(c) => (Command::Rates, c),
        Cmd::Search2q(c) => (Command::Search2q, c),
        Cmd::Search3l(c) => (Command::Search3l, c),
        Cmd::Feasibility(c) => (Command::Feasibility, c),
        Cmd::VerifyStabilizers(c) => (Command::VerifyStabilizers, c),
    };
    match run(command, &common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pbqc-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command, common: &Common) -> Result<(), LabError> {
    let overrides = Overrides { seed: common.seed, out: common.out.clone() };
    let (report, written) = pbqc_lab::run(command, &common.config, &overrides)?;
    if common.quiet {
        return Ok(());
    }
    let text = match common.format {
        Format::Report => report.render(),
        Format::Table => {
            let selectors = if report.config.output.tables.is_empty() { table_selectors(&report) } else { report.config.output.tables.clone() };
            let mut text = String::new();
            for sel in selectors {
                text.push_str(&format!("# {sel}\n{}", emit_table(&report, &sel)?));
            }
            text
        }
    };
    // a closed pipe (e.g. `| head`) is not a failure of the run
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    eprintln!("report written to {}", written.report.display());
    Ok(())
}
