//! `centerlab` command-line tool.
//!
//! Exit codes: 0 all checks passed, 1 usage or input error, 2 computation
//! failed, 3 at least one check failed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use centerlab::repro::{
    builtin_instance, center_report, property_report, replay_property, run_repro_with, CenterInstance, PropertyInstance,
    PropertyKind, RunConfig, NAMES,
};
use centerlab::report::{Format, Report};
use centerlab::Error;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "centerlab", version, about = "Restricted centers and ball intersection checks")]
struct Cli {
    /// Seed for every sampler; defaults to the instance's own seed.
    #[arg(long, global = true, env = "CENTERLAB_SEED")]
    seed: Option<u64>,
    /// Override the main tolerance of the command.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the number of trials or samples.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Md,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Md => Format::Md,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Central,
    Ac,
    AlmostConstrained,
    Mideal,
}

impl From<KindArg> for PropertyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Central => PropertyKind::Central,
            KindArg::Ac => PropertyKind::Ac,
            KindArg::AlmostConstrained => PropertyKind::AlmostConstrained,
            KindArg::Mideal => PropertyKind::Mideal,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a center problem and probe its δ-centers.
    Center { instance: PathBuf },
    /// Check a subspace property.
    Property {
        #[arg(value_enum)]
        kind: KindArg,
        #[arg(required_unless_present = "replay")]
        instance: Option<PathBuf>,
        /// Re-run the counterexample recorded in an earlier JSON report.
        #[arg(long, conflicts_with = "instance")]
        replay: Option<PathBuf>,
    },
    /// Run a built-in reproduction.
    Repro {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(NAMES))]
        name: String,
        /// Print the built-in instance and exit.
        #[arg(long)]
        dump_instance: bool,
        /// Use this instance file instead of the built-in one.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn input<T>(r: centerlab::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(e.to_string()))
}

/// Writes next to the target and renames, so readers never see half a file.
fn write_atomic(path: &Path, body: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(body.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(cli: &Cli, body: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => write_atomic(path, body).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<Option<Report>, Failure> {
    let cfg = RunConfig { seed: cli.seed, tol: cli.tol, trials: cli.trials };
    let report = match &cli.command {
        Command::Center { instance } => {
            let inst = input(CenterInstance::from_json(&read(instance)?))?;
            center_report(&inst, &cfg)?
        }
        Command::Property { kind, instance, replay } => match (instance, replay) {
            (_, Some(old)) => {
                let text = read(old)?;
                let _: Report = input(serde_json::from_str(&text).map_err(Error::from))?;
                replay_property(&text, &cfg)?
            }
            (Some(path), None) => {
                let inst = input(PropertyInstance::from_json(&read(path)?))?;
                property_report((*kind).into(), &inst, &cfg)?
            }
            (None, None) => return Err(Failure::Usage("an instance file or --replay is required".into())),
        },
        Command::Repro { name, dump_instance, instance } => {
            if *dump_instance {
                emit(cli, builtin_instance(name).expect("name checked by the parser"))?;
                return Ok(None);
            }
            let text = instance.as_deref().map(read).transpose()?;
            if let Some(t) = &text {
                input(serde_json::from_str::<serde_json::Value>(t).map_err(Error::from))?;
            }
            run_repro_with(name, text.as_deref(), &cfg)?
        }
    };
    Ok(Some(report))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(report)) => {
            let body = match report.render(cli.format.into()) {
                Ok(b) => b,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Err(Failure::Usage(msg) | Failure::Compute(msg)) = emit(&cli, &body) {
                eprintln!("error: {msg}");
                return ExitCode::from(1);
            }
            for c in report.failures() {
                eprintln!("FAIL {}: expected {}, computed {}", c.name, c.expected, c.computed);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
