use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use stripwave::config::RunConfig;
use stripwave::run::{run_fields, run_fullwave, run_narrow_compare, run_tem_compare, ResultBundle};
use stripwave::selftest::{run_selftest, SelftestOptions};
use stripwave::Error;

const EXIT_SELFTEST: u8 = 4;

#[derive(Parser)]
#[command(name = "stripwave", version, about = "Dipole-excited currents and fields on a strip above a ground plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for CSV tables and manifest.txt
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = all cores)
    #[arg(long, value_name = "N", default_value_t = 0)]
    threads: usize,
    /// Dotted key override, e.g. solver.m_max=2 (repeatable)
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Full-wave surface currents K_x, K_y and total current I
    Fullwave(Common),
    /// Narrow-strip against full-wave total current
    NarrowCompare(Common),
    /// Narrow-strip current against the TEM thin-wire current
    TemCompare(Common),
    /// E and H at the configured probes
    Fields(Common),
    /// Built-in identity checks
    Selftest(Common),
}

fn load(common: &Common) -> Result<RunConfig, Error> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    RunConfig::load(path)?.with_overrides(&common.overrides)
}

fn init_threads(n: usize) -> Result<(), Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn execute(common: &Common, f: fn(&RunConfig) -> Result<ResultBundle, Error>) -> Result<(), Error> {
    let cfg = load(common)?;
    init_threads(common.threads)?;
    let bundle = f(&cfg)?;
    let files = bundle.write(&common.out, &cfg)?;
    for (k, v) in &bundle.diagnostics {
        println!("{k} = {v}");
    }
    println!("wrote {} files to {}", files.len(), common.out.display());
    Ok(())
}

fn selftest(common: &Common) -> Result<bool, Error> {
    let mut opts = SelftestOptions::default();
    for item in &common.overrides {
        match item.split_once('=') {
            Some(("tail_constant", v)) => {
                opts.tail_constant = v
                    .parse()
                    .map_err(|_| Error::Config(format!("tail_constant '{v}' is not a number")))?
            }
            _ => return Err(Error::Config(format!("selftest accepts only tail_constant=<value>, got '{item}'"))),
        }
    }
    init_threads(common.threads)?;
    let report = run_selftest(&opts);
    print!("{}", report.render());
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fullwave(c) => execute(c, run_fullwave),
        Command::NarrowCompare(c) => execute(c, run_narrow_compare),
        Command::TemCompare(c) => execute(c, run_tem_compare),
        Command::Fields(c) => execute(c, run_fields),
        Command::Selftest(c) => match selftest(c) {
            Ok(true) => Ok(()),
            Ok(false) => {
                eprintln!("selftest failed");
                return ExitCode::from(EXIT_SELFTEST);
            }
            Err(e) => Err(e),
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
