//! `sbrw`: command-line access to simplicial branching random walks.
//!
//! Complexes are read from `{"maximal_faces": [[ids...], ...]}` files. Tables
//! are written as CSV and reports as JSON, to `--out` or stdout, with every
//! float printed to 12 significant digits. Exit status is 0 on success, 1 on
//! invalid input or an unmet numerical precondition and 2 on usage errors.

mod args;
mod commands;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{ArborealCommand, Cli, Command, DirichletCommand, LowerCommand};

fn inputs(command: &Command) -> Vec<&Path> {
    match command {
        Command::Betti(a) => vec![&a.input.complex],
        Command::Gap(a) => vec![&a.input.complex],
        Command::Hodge(a) => vec![&a.input.complex],
        Command::Simulate(a) => vec![&a.input.complex],
        Command::HeatKernel(a) => vec![&a.input.complex],
        Command::Limit(a) => vec![&a.input.complex],
        Command::FirstVisit(a) => vec![&a.input.complex],
        Command::SeriesCheck(a) => vec![&a.input.complex],
        Command::Recurrence(a) => vec![&a.input.complex],
        Command::Arboreal(_) => vec![],
        Command::Dirichlet(DirichletCommand::Solve(a) | DirichletCommand::Diagnose(a)) => {
            vec![&a.input.complex, &a.boundary]
        }
        Command::Lower(LowerCommand::Kernel(a) | LowerCommand::Check(a)) => vec![&a.input.complex],
    }
    .into_iter()
    .map(PathBuf::as_path)
    .collect()
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::Betti(_) => "betti",
        Command::Gap(_) => "gap",
        Command::Hodge(_) => "hodge",
        Command::Simulate(_) => "simulate",
        Command::HeatKernel(_) => "heat-kernel",
        Command::Limit(_) => "limit",
        Command::FirstVisit(_) => "first-visit",
        Command::SeriesCheck(_) => "series-check",
        Command::Recurrence(_) => "recurrence",
        Command::Arboreal(ArborealCommand::Density { .. }) => "arboreal density",
        Command::Arboreal(ArborealCommand::Moments { .. }) => "arboreal moments",
        Command::Arboreal(ArborealCommand::Classify { .. }) => "arboreal classify",
        Command::Arboreal(ArborealCommand::Gfun { .. }) => "arboreal gfun",
        Command::Dirichlet(DirichletCommand::Solve(_)) => "dirichlet solve",
        Command::Dirichlet(DirichletCommand::Diagnose(_)) => "dirichlet diagnose",
        Command::Lower(LowerCommand::Kernel(_)) => "lower kernel",
        Command::Lower(LowerCommand::Check(_)) => "lower check",
    }
}

fn manifest(cli: &Cli, argv: &[String], output: &[u8]) -> anyhow::Result<serde_json::Value> {
    let files = inputs(&cli.command)
        .into_iter()
        .map(|p| {
            let bytes = std::fs::read(p)?;
            Ok(json!({ "path": p.display().to_string(), "sha256": io::sha256_hex(&bytes) }))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let canonical = match inputs(&cli.command).first() {
        Some(path) => Some(io::ComplexFile::canonical(&io::read_complex(path)?).to_json()),
        None => None,
    };
    let seed = match &cli.command {
        Command::Simulate(a) => Some(a.seed),
        _ => None,
    };
    Ok(json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand_name(&cli.command),
        "arguments": argv[1..],
        "inputs": files,
        "canonical_complex": canonical,
        "seed": seed,
        "output_sha256": io::sha256_hex(output),
    }))
}

fn execute(cli: &Cli, argv: &[String]) -> anyhow::Result<bool> {
    let out = commands::run(&cli.command)?;
    io::emit(cli.out.as_ref(), &out.bytes)?;
    if let Some(path) = &cli.manifest {
        let m = manifest(cli, argv, &out.bytes)?;
        std::fs::write(path, io::json_bytes(&m))?;
    }
    Ok(!out.failed)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match execute(&cli, &argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("{}", json!({ "error": chain.join(": ") }));
            ExitCode::from(1)
        }
    }
}
