//! ICCMA-style solver front end.
//!
//! ```text
//! afgnn-solver -p DC-CO -f graph.af -fo iccma23 -a 3 -m dc-co.model [--timeout 39]
//! afgnn-solver --problems
//! afgnn-solver --formats
//! ```
//!
//! Flags are parsed by hand: `-fo` is a multi-letter single-dash flag, which
//! clap's short options cannot express.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use afgnn::solver::{run_query, InputFormat, Query};
use afgnn::Task;
use anyhow::{anyhow, bail, Context, Result};

const USAGE: &str = "\
afgnn-solver: approximate acceptance via grounded shortcut and GNN inference

USAGE:
    afgnn-solver -p <task> -f <file> -fo <format> -a <argument> -m <model> [--timeout <seconds>]
    afgnn-solver --problems
    afgnn-solver --formats

OPTIONS:
    -p <task>            DC-CO, DC-ST, DS-PR or DS-ST
    -f <file>            argumentation framework
    -fo <format>         iccma23 (alias i23) or apx
    -a <argument>        query argument: 1-based id, or name for apx input
    -m <model>           model file trained for <task>
    --timeout <seconds>  answer with the grounded-only fallback if inference
                         has not finished in time
    --problems           list supported tasks
    --formats            list supported input formats
";

enum Command {
    Usage,
    Problems,
    Formats,
    Solve(Query),
}

fn parse_args(args: &[String]) -> Result<Command> {
    if args.is_empty() {
        return Ok(Command::Usage);
    }
    let mut task = None;
    let mut file = None;
    let mut format = None;
    let mut argument = None;
    let mut model = None;
    let mut timeout = None;
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let mut value = || {
            it.next()
                .cloned()
                .ok_or_else(|| anyhow!("flag `{flag}` needs a value"))
        };
        match flag.as_str() {
            "--problems" => return Ok(Command::Problems),
            "--formats" => return Ok(Command::Formats),
            "-h" | "--help" => return Ok(Command::Usage),
            "-p" => task = Some(value()?.parse::<Task>()?),
            "-f" => file = Some(PathBuf::from(value()?)),
            "-fo" => format = Some(value()?.parse::<InputFormat>().map_err(|e| anyhow!(e))?),
            "-a" => argument = Some(value()?),
            "-m" => model = Some(PathBuf::from(value()?)),
            "--timeout" => {
                let raw = value()?;
                let secs: f64 = raw
                    .parse()
                    .ok()
                    .filter(|s: &f64| s.is_finite() && *s >= 0.0)
                    .ok_or_else(|| anyhow!("invalid timeout `{raw}`"))?;
                timeout = Some(Duration::from_secs_f64(secs));
            }
            other => bail!("unknown flag `{other}`"),
        }
    }
    Ok(Command::Solve(Query {
        task: task.context("missing -p <task>")?,
        file: file.context("missing -f <file>")?,
        format: format.unwrap_or(InputFormat::Iccma23),
        argument: argument.context("missing -a <argument>")?,
        model: model.context("missing -m <model>")?,
        timeout,
    }))
}

fn run(args: &[String]) -> Result<()> {
    match parse_args(args)? {
        Command::Usage => print!("{USAGE}"),
        Command::Problems => {
            let ids: Vec<&str> = Task::ALL.iter().map(|t| t.as_str()).collect();
            println!("{}", ids.join(","));
        }
        Command::Formats => println!("iccma23,apx"),
        Command::Solve(q) => println!("{}", run_query(&q)?.decision),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
