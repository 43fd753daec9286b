use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gentropy_cli::{gen_fixtures, load_config, run, CliError};

/// Compare entropy families on seeded thresholding, registration and
/// clustering benchmarks.
#[derive(Parser, Debug)]
#[command(name = "bench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run experiments and write reports.
    Run(RunArgs),
    /// Write the seeded fixtures and a `manifest.jsonl` sidecar.
    GenFixtures(GenArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExperimentArg {
    Threshold,
    Register,
    Cluster,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Markdown,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TimingArg {
    Wall,
    Off,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    /// Seed or comma-separated seeds.
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core. `1` is the reference for timings.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    experiment: Option<ExperimentArg>,
    /// Comma-separated entropies, e.g. `shannon,renyi:2,tsallis:0.5`.
    #[arg(long)]
    families: Option<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// `off` writes NA for times so reruns are byte-identical.
    #[arg(long, value_enum)]
    timing: Option<TimingArg>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    common: Common,
}

fn overrides(common: &Common) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    if let Some(s) = &common.seed {
        out.push(("seed", s.clone()));
    }
    if let Some(o) = &common.out {
        out.push(("out", o.display().to_string()));
    }
    if let Some(j) = common.jobs {
        out.push(("jobs", j.to_string()));
    }
    out
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn execute(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Run(args) => {
            let mut o = overrides(&args.common);
            if let Some(e) = args.experiment {
                o.push(("experiment", value_name(e)));
            }
            if let Some(f) = &args.families {
                o.push(("families", f.clone()));
            }
            if let Some(f) = args.format {
                o.push(("format", value_name(f)));
            }
            if let Some(t) = args.timing {
                o.push(("timing", value_name(t)));
            }
            let cfg = load_config(&args.common.config, &o)?;
            let written = run(&cfg)?;
            Ok(format!("wrote {} report rows in {} files under {}", written.rows, written.files.len(), cfg.out.display()))
        }
        Command::GenFixtures(args) => {
            let cfg = load_config(&args.common.config, &overrides(&args.common))?;
            let n = gen_fixtures(&cfg)?;
            Ok(format!("wrote {n} fixtures under {}", cfg.out.display()))
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(message) => {
            println!("{message}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("bench: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
