use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use layerspec::{run, Command, Invocation};

#[derive(Parser)]
#[command(name = "layerspec", version, about = "Curved quantum layers: geometry checks, bound-state certificates, spectra")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Clone)]
struct Common {
    /// run configuration (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// report directory; overrides output.dir
    #[arg(long)]
    out: Option<PathBuf>,
    /// overwrite existing reports
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Sub {
    /// Chart summary and curvature samples
    Describe {
        #[command(flatten)]
        common: Common,
        /// print the fully resolved configuration and exit
        #[arg(long)]
        defaults: bool,
    },
    /// Hypothesis report
    Check(Common),
    /// Total Gauss curvature and total squared mean curvature
    Totals(Common),
    /// Search the trial families for a negative shifted form
    Certify(Common),
    /// Lowest partial-wave eigenvalues of an axisymmetric layer
    Spectrum(Common),
    /// Hemisphere-capped cylinder: radial bounds and the full layer spectrum
    Counterexample(Common),
    /// List the built-in surfaces
    Catalog(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, defaults) = match cli.command {
        Sub::Describe { common, defaults } => (Command::Describe, common, defaults),
        Sub::Check(c) => (Command::Check, c, false),
        Sub::Totals(c) => (Command::Totals, c, false),
        Sub::Certify(c) => (Command::Certify, c, false),
        Sub::Spectrum(c) => (Command::Spectrum, c, false),
        Sub::Counterexample(c) => (Command::Counterexample, c, false),
        Sub::Catalog(c) => (Command::Catalog, c, false),
    };
    let inv = Invocation { command, config: common.config, out: common.out, force: common.force, defaults };
    match run(&inv) {
        Ok(o) => {
            // a closed pipe is not a failure of the run
            let mut w = std::io::stdout().lock();
            let _ = writeln!(w, "{}", o.summary);
            for f in &o.files {
                let _ = writeln!(w, "wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
