use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use butterfly_cli::commands::{CliError, Command};
use butterfly_cli::output::Report;
use clap::{Parser, ValueEnum};
use serde_json::Value;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Svg,
}

/// Spectra of the almost Mathieu operator at rational frequencies.
#[derive(Parser, Debug)]
#[command(name = "butterfly", version)]
struct Cli {
    /// Worker threads; overrides BUTTERFLY_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// SVG width in pixels.
    #[arg(long, global = true, default_value_t = 1200)]
    width: u32,
    /// SVG height in pixels.
    #[arg(long, global = true, default_value_t = 800)]
    height: u32,
    #[command(subcommand)]
    command: Command,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, String> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("BUTTERFLY_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| format!("BUTTERFLY_THREADS must be a positive integer, got {v:?}"))?),
            Err(_) => None,
        },
    };
    match n {
        Some(0) => Err("thread count must be at least 1".into()),
        n => Ok(n),
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn emit(path: Option<&PathBuf>, body: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(body)?;
            w.flush()
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body)?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match thread_count(cli.threads) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        }
        Ok(None) => {}
        Err(msg) => return usage(&msg),
    }
    if cli.format == Format::Svg && !cli.command.has_plot() {
        return usage(&format!("svg output is not available for {}", cli.command.name()));
    }

    let mut config = cli.command.config();
    if let Value::Object(m) = &mut config {
        m.insert("seed".into(), cli.seed.into());
    }
    let report = |results: Value, failures: Vec<String>| Report {
        command: cli.command.name(),
        config: config.clone(),
        results,
        failures,
        version: env!("CARGO_PKG_VERSION"),
    };

    let out = match cli.command.run(cli.seed) {
        Ok(out) => out,
        Err(CliError::Usage(msg)) => return usage(&msg),
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            let body = report(Value::Null, vec![msg]).to_json();
            let _ = io::stdout().lock().write_all(body.as_bytes());
            return ExitCode::from(1);
        }
    };

    let failures = out.failures.clone();
    let body = match cli.format {
        Format::Json => report(out.results, out.failures).to_json().into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            let table = out.table.unwrap_or_default();
            if let Err(e) = table.write_csv(&mut buf) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            buf
        }
        Format::Svg => out.plot.unwrap_or_default().to_svg(cli.width, cli.height).into_bytes(),
    };
    if let Err(e) = emit(cli.output.as_ref(), &body) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if !failures.is_empty() {
        if cli.format != Format::Json {
            for f in &failures {
                eprintln!("failure: {f}");
            }
        }
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
