use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use affinelag::cli;
use affinelag::twisted::Ring;

/// Exact-arithmetic engine for twisted cohomology of integral affine data
/// and Lagrangian realizability of torus-bundle Chern classes.
#[derive(Parser)]
#[command(name = "affinelag", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Problem file (JSON)
    file: PathBuf,
    /// Emit the report as JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TaskArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Coefficient ring for cohomology tasks
    #[arg(long, value_parser = ring_parser, default_value = "Z")]
    ring: Ring,
    /// Include coboundary witnesses in the report
    #[arg(long)]
    witness: bool,
    /// Run the task for every basis class of the chern group
    #[arg(long)]
    all_basis: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check the complex, system and affine invariants
    Validate(CommonArgs),
    /// Twisted cohomology groups of the system, all degrees
    Cohomology(TaskArgs),
    /// Radiance obstruction class, radiance and strong integrality
    Radiance(TaskArgs),
    /// Dazord-Delzant obstruction for the chern class(es)
    Obstruction(TaskArgs),
    /// Realizable subgroup of the chern group
    Realizable(TaskArgs),
    /// Second-page differential on the radiance class
    D2 {
        /// Problem file (JSON); not needed with --hopf
        file: Option<PathBuf>,
        /// Emit the report as JSON instead of text
        #[arg(long)]
        json: bool,
        /// Run the built-in Hopf model check instead of a file
        #[arg(long)]
        hopf: bool,
        /// Run for every basis class of the chern group
        #[arg(long)]
        all_basis: bool,
    },
    /// Write a problem file for a named model
    Generate {
        /// Model expression, e.g. circle(2), standard_torus(3), zn(1,1,1),
        /// hyperbolic_y, product(circle(1),holonomy_circle([[1,0],[-1,1]]))
        model: String,
        /// Output path; stdout when omitted
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn ring_parser(s: &str) -> Result<Ring, String> {
    match s {
        "Z" => Ok(Ring::Z),
        "Q" => Ok(Ring::Q),
        other => Err(format!("ring must be Z or Q, got `{other}`")),
    }
}

fn read_file(path: &PathBuf) -> Result<String, cli::CliError> {
    fs::read_to_string(path)
        .map_err(|e| cli::CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn run_on_file(
    sub: cli::Subcommand,
    common: &CommonArgs,
    flags: cli::Flags,
) -> Result<String, cli::CliError> {
    let text = read_file(&common.file)?;
    let file = cli::parse(&text)?;
    let report = cli::run(sub, &file, &flags)?;
    Ok(if common.json {
        report.render_json()
    } else {
        report.render_text()
    })
}

fn dispatch(command: Command) -> Result<String, cli::CliError> {
    match command {
        Command::Validate(common) => {
            run_on_file(cli::Subcommand::Validate, &common, cli::Flags::default())
        }
        Command::Cohomology(args) => run_on_file(
            cli::Subcommand::Cohomology,
            &args.common,
            cli::Flags {
                ring: args.ring,
                witness: args.witness,
                all_basis: args.all_basis,
            },
        ),
        Command::Radiance(args) => run_on_file(
            cli::Subcommand::Radiance,
            &args.common,
            cli::Flags {
                ring: args.ring,
                witness: args.witness,
                all_basis: args.all_basis,
            },
        ),
        Command::Obstruction(args) => run_on_file(
            cli::Subcommand::Obstruction,
            &args.common,
            cli::Flags {
                ring: args.ring,
                witness: args.witness,
                all_basis: args.all_basis,
            },
        ),
        Command::Realizable(args) => run_on_file(
            cli::Subcommand::Realizable,
            &args.common,
            cli::Flags {
                ring: args.ring,
                witness: args.witness,
                all_basis: args.all_basis,
            },
        ),
        Command::D2 {
            file,
            json,
            hopf,
            all_basis,
        } => {
            if hopf {
                let report = cli::run_hopf();
                return Ok(if json {
                    report.render_json()
                } else {
                    report.render_text()
                });
            }
            let file = file.ok_or_else(|| {
                cli::CliError::Task("d2 needs a problem file unless --hopf is given".into())
            })?;
            run_on_file(
                cli::Subcommand::D2,
                &CommonArgs { file, json },
                cli::Flags {
                    all_basis,
                    ..cli::Flags::default()
                },
            )
        }
        Command::Generate { model, output } => {
            let text = cli::run_generate(&model)?;
            match output {
                Some(path) => {
                    fs::write(&path, &text).map_err(|e| {
                        cli::CliError::Task(format!("cannot write {}: {e}", path.display()))
                    })?;
                    Ok(format!("wrote {}\n", path.display()))
                }
                None => Ok(text),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
