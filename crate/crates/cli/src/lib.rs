//! Command-line front end for `alpha-forge`.
//!
//! [`run`] parses arguments, merges an optional TOML config file, runs one
//! subcommand and renders its report as JSON, CSV or text. It never touches
//! the process's stdout or exit status, so tests drive it directly.
//!
//! Exit codes: `0` success, `2` domain or range error, `64` usage error.

pub mod args;
mod commands;
#[cfg(test)]
mod end_to_end;
pub mod report;

use std::ffi::OsString;
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use alpha_forge::{Error, Parallelism};

pub use args::{Cli, Command, Format, WORKERS_ENV};
pub use report::{fmt_f64, Report, RunMeta, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Exit code plus the text destined for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Outcome {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match apply_config(argv) {
        Ok(a) => a,
        Err(msg) => return Outcome::usage(format!("error: {msg}\n")),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    execute(&cli)
}

fn execute(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let workers = g.workers.unwrap_or_else(|| Parallelism::default().workers);
    let par = Parallelism::new(workers, g.segment_size);
    let start = Instant::now();
    let report = match dispatch(cli, &par) {
        Ok(r) => r,
        Err(Error::Parse(msg)) => return Outcome::usage(format!("error: {msg}\n")),
        Err(e) => {
            return Outcome {
                code: EXIT_DOMAIN,
                stdout: String::new(),
                stderr: format!("{e}\n"),
            }
        }
    };
    let meta = RunMeta {
        workers: par.workers,
        seconds: start.elapsed().as_secs_f64(),
    };
    let meta = (!g.reproducible).then_some(&meta);
    if let Some(path) = &g.export {
        if let Err(e) = std::fs::write(path, report.to_csv(g.reproducible)) {
            return Outcome {
                code: EXIT_DOMAIN,
                stdout: String::new(),
                stderr: format!("cannot write {}: {e}\n", path.display()),
            };
        }
    }
    let stdout = match g.format() {
        Format::Json => report.to_json(meta),
        Format::Csv => report.to_csv(g.reproducible),
        Format::Text => report.to_text(g.reproducible),
    };
    Outcome {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn config_of<T: Serialize>(globals: &args::GlobalArgs, a: &T) -> Value {
    let mut v = serde_json::to_value(a).expect("argument structs serialize");
    if let (Value::Object(m), Value::Object(g)) = (&mut v, serde_json::to_value(globals).expect("globals serialize")) {
        m.extend(g);
        m.insert("format".into(), serde_json::to_value(globals.format()).expect("format serializes"));
    }
    v
}

fn dispatch(cli: &Cli, par: &Parallelism) -> alpha_forge::Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Alpha(a) => commands::alpha(a, config_of(g, a), par),
        Command::Rho(a) => commands::rho(a, config_of(g, a)),
        Command::Predict(a) => commands::predict_cmd(a, config_of(g, a)),
        Command::Census(a) => commands::census(a, config_of(g, a), par),
        Command::ExperimentT42(a) => commands::experiment(a, config_of(g, a), par),
        Command::Avg(a) => commands::avg(a, config_of(g, a), par),
        Command::Field(a) => commands::field(a, config_of(g, a), par),
        Command::Psi(a) => commands::psi(a, config_of(g, a), par),
    }
}

/// Expands `--config FILE` into flags placed right after the subcommand
/// name, ahead of the user's own flags so that the latter override them.
///
/// Top-level keys apply to every subcommand; a `[name]` table applies to
/// that subcommand only. Keys are flag names with `-` or `_`.
fn apply_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let Some(s) = a.to_str() else { continue };
        if s == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.into());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let Some(pos) = argv
        .iter()
        .position(|a| a.to_str().is_some_and(|s| Command::NAMES.contains(&s)))
    else {
        return Ok(argv);
    };
    let sub = argv[pos].to_str().unwrap_or_default().to_string();
    let table = read_config(Path::new(&path))?;
    let mut flags = Vec::new();
    for (k, v) in &table {
        match v {
            toml::Value::Table(t) if k == &sub => {
                for (k2, v2) in t {
                    push_flag(&mut flags, k2, v2)?;
                }
            }
            toml::Value::Table(_) => {}
            _ => push_flag(&mut flags, k, v)?,
        }
    }
    let mut out = argv;
    out.splice(pos + 1..pos + 1, flags);
    Ok(out)
}

fn read_config(path: &Path) -> Result<toml::Table, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    text.parse::<toml::Table>()
        .map_err(|e| format!("bad config {}: {e}", path.display()))
}

fn push_flag(out: &mut Vec<OsString>, key: &str, v: &toml::Value) -> Result<(), String> {
    let flag = format!("--{}", key.replace('_', "-"));
    if flag == "--config" {
        return Err("a config file cannot name another config file".into());
    }
    let scalar = |v: &toml::Value| -> Result<String, String> {
        match v {
            toml::Value::String(s) => Ok(s.clone()),
            toml::Value::Integer(i) => Ok(i.to_string()),
            toml::Value::Float(f) => Ok(f.to_string()),
            other => Err(format!("config key {key:?} has unsupported value {other}")),
        }
    };
    match v {
        toml::Value::Boolean(true) => out.push(flag.into()),
        toml::Value::Boolean(false) => {}
        toml::Value::Array(items) => {
            let joined = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?.join(",");
            out.push(flag.into());
            out.push(joined.into());
        }
        other => {
            out.push(flag.into());
            out.push(scalar(other)?.into());
        }
    }
    Ok(())
}
