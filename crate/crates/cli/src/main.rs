//! `qlearn` experiment runner.

mod commands;
mod config;
mod fixtures;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use commands::{
    CertifyArgs, CoveringArgs, Format, KhintchineArgs, LearnArgs, Outcome, QraArgs, QuoteArgs,
    RunContext, SweepArgs,
};
use config::{Checker, ConfigError, Source};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "qlearn", version, about = "Learning quantum measurements and states: complexity experiments")]
struct Cli {
    /// TOML config file. Flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Result file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Manifest file (default: next to --out, or stderr).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo Rademacher complexity over a grid of d and n.
    SweepRademacher(SweepArgs),
    /// Certify (or refute) ε-shattering of a point set.
    Certify(CertifyArgs),
    /// Fit an effect or a state by empirical risk minimization.
    Learn(LearnArgs),
    /// Greedy covering-number estimate of a class on random points.
    Covering(CoveringArgs),
    /// Sample-complexity bound from a complexity value.
    Quote(QuoteArgs),
    /// Random access codes: verify, build or probe.
    Qra(QraArgs),
    /// Trace-norm Khintchine ratio of a Rademacher series.
    Khintchine(KhintchineArgs),
}

impl Command {
    fn section(&self) -> &'static str {
        match self {
            Command::SweepRademacher(_) => "sweep_rademacher",
            Command::Certify(_) => "certify",
            Command::Learn(_) => "learn",
            Command::Covering(_) => "covering",
            Command::Quote(_) => "quote",
            Command::Qra(_) => "qra",
            Command::Khintchine(_) => "khintchine",
        }
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: Value,
    wall_clock_seconds: f64,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    summary: Value,
}

struct Globals {
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    manifest: Option<PathBuf>,
    format: Option<Format>,
}

fn globals(cli: &Cli, source: &Source) -> Result<Globals, ConfigError> {
    let f = &source.file;
    let format = match cli.format.as_ref().or(f.format.as_ref()) {
        None => None,
        Some(s) => Some(s.parse::<Format>().map_err(|e| {
            ConfigError(format!("{}: {e}", source.locate("", "format", cli.format.is_some())))
        })?),
    };
    let threads = cli.threads.or(f.threads);
    if threads == Some(0) {
        return Err(ConfigError(format!(
            "{}: must be positive",
            source.locate("", "threads", cli.threads.is_some())
        )));
    }
    Ok(Globals {
        seed: cli.seed.or(f.seed),
        threads,
        out: cli.out.clone().or_else(|| f.out.clone()),
        manifest: cli.manifest.clone().or_else(|| f.manifest.clone()),
        format,
    })
}

/// Merges the command's flags with its config table and runs it.
fn dispatch(cli: &Cli, source: &Source, g: &Globals) -> Result<(Outcome, Value)> {
    macro_rules! run {
        ($args:expr, $f:path) => {{
            let section = cli.command.section();
            let (merged, from_flags) = source.merge(section, $args)?;
            let echo = serde_json::to_value(&merged)?;
            let ctx = RunContext {
                check: Checker {
                    source,
                    section,
                    from_flags,
                },
                seed: g.seed,
                format: g.format,
            };
            ($f(&ctx, &merged)?, echo)
        }};
    }
    Ok(match &cli.command {
        Command::SweepRademacher(a) => run!(a, commands::sweep_rademacher),
        Command::Certify(a) => run!(a, commands::certify),
        Command::Learn(a) => run!(a, commands::learn),
        Command::Covering(a) => run!(a, commands::covering),
        Command::Quote(a) => run!(a, commands::quote),
        Command::Qra(a) => run!(a, commands::qra),
        Command::Khintchine(a) => run!(a, commands::khintchine),
    })
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    match err.downcast_ref::<qlearn::Error>() {
        Some(
            qlearn::Error::InvalidParameter(_)
            | qlearn::Error::InvalidDimension(_)
            | qlearn::Error::InvalidRank { .. }
            | qlearn::Error::TooManyPoints { .. }
            | qlearn::Error::UnsupportedClass(_)
            | qlearn::Error::InvalidSchattenExponent(_),
        ) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn write_text(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn manifest_path(g: &Globals) -> Option<PathBuf> {
    g.manifest.clone().or_else(|| {
        g.out.as_ref().map(|o| {
            let mut s = o.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let started = Instant::now();
    let prepared = Source::load(cli.config.as_deref()).and_then(|s| {
        let g = globals(&cli, &s)?;
        Ok((s, g))
    });
    let (source, g) = match prepared {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(t) = g.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }

    let result = dispatch(&cli, &source, &g);
    let (code, summary, error, echo) = match &result {
        Ok((outcome, echo)) => {
            if let Err(e) = write_text(g.out.as_ref(), &outcome.payload) {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_FAILURE);
            }
            (outcome.exit as u8, outcome.summary.clone(), None, echo.clone())
        }
        Err(e) => {
            eprintln!("{}", format!("{e:#}").trim_end());
            (exit_code_for(e), Value::Null, Some(format!("{e:#}")), Value::Null)
        }
    };

    let manifest = RunManifest {
        tool: "qlearn",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.section(),
        config: json!({
            "config_file": source.path,
            "seed": g.seed,
            "threads": g.threads,
            "out": g.out,
            "format": g.format,
            "settings": echo,
        }),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        exit_code: code,
        error,
        summary,
    };
    let text = match qlearn::wire::to_json(&manifest) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: manifest: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    match manifest_path(&g) {
        Some(p) => {
            if let Err(e) = std::fs::write(&p, text) {
                eprintln!("error: writing {}: {e}", p.display());
                return ExitCode::from(EXIT_FAILURE);
            }
        }
        None => eprint!("{text}"),
    }
    ExitCode::from(code)
}
