use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qherm_cli::commands::{self, Failure, Method, Options, Outcome};
use qherm_cli::config::Config;

/// Spectral tools for tridiagonal lattice chains with asymmetric couplings.
#[derive(Parser)]
#[command(name = "qherm", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide quasi-Hermiticity and verify the intertwining identity
    Check(Common),
    /// Compute the spectrum via the metric route, the root oracle, or both
    Spectrum(Common),
    /// Emit the metric diagonal and the symmetrized matrix
    Transform(Common),
    /// Locate the reality-breaking threshold along a parameter sweep
    Sweep(Common),
    /// Evaluate a closed-form model from the analytic config section
    Analytic(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Symmetrize,
    Oracle,
}

#[derive(Args)]
struct Common {
    /// Path of the JSON config file
    #[arg(long)]
    config: PathBuf,
    /// Solver route for `spectrum` (other commands ignore this)
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Override the free metric scale Q_1 (default from the config, else 1)
    #[arg(long)]
    q1: Option<f64>,
    /// Override the solver tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Write the result document here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

fn fail(message: &str, code: u8) -> ExitCode {
    eprintln!("qherm: {message}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    // Exit code 2 belongs to "not quasi-Hermitian" in this tool, so clap's
    // default usage-error exit cannot be used; usage problems are code 1.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    type Command = fn(&Config, &Options) -> Result<Outcome, Failure>;
    let (common, run): (&Common, Command) = match &cli.cmd {
        Cmd::Check(c) => (c, commands::cmd_check as _),
        Cmd::Spectrum(c) => (c, commands::cmd_spectrum as _),
        Cmd::Transform(c) => (c, commands::cmd_transform as _),
        Cmd::Sweep(c) => (c, commands::cmd_sweep as _),
        Cmd::Analytic(c) => (c, commands::cmd_analytic as _),
    };

    let text = match fs::read_to_string(&common.config) {
        Ok(text) => text,
        Err(e) => return fail(&format!("{}: {e}", common.config.display()), 1),
    };
    let cfg = match Config::parse(&text) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&format!("{e:#}"), 1),
    };
    let opts = Options {
        method: match common.method {
            MethodArg::Auto => Method::Auto,
            MethodArg::Symmetrize => Method::Symmetrize,
            MethodArg::Oracle => Method::Oracle,
        },
        q1: common.q1,
        tol: common.tol,
    };

    match run(&cfg, &opts) {
        Ok(Outcome { doc, exit }) => {
            let rendered = doc.render();
            match &common.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &rendered) {
                        return fail(&format!("{}: {e}", path.display()), 1);
                    }
                }
                None => print!("{rendered}"),
            }
            ExitCode::from(exit as u8)
        }
        Err(failure) => fail(&failure.message, failure.exit as u8),
    }
}
