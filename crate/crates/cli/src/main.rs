//! `preproj`: command-line driver for the preprojective-algebra engine.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use preproj::verify::Fault;

use commands::{CliError, Output};
use config::{Config, Overrides};

#[derive(Parser, Debug)]
#[command(name = "preproj", version, about = "Hochschild calculus of preprojective algebras of Dynkin quivers")]
struct Cli {
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Settings {
    /// `key = value` file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Dynkin type, e.g. A3, D4, E6.
    #[arg(long = "type", global = true)]
    quiver_type: Option<String>,
    /// Truncation N of the bar complexes; degrees 0..N-1 are computed.
    #[arg(long, global = true)]
    max_degree: Option<String>,
    /// Period index m of the duality.
    #[arg(long, global = true)]
    period: Option<String>,
    /// text or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<String>,
    /// Largest label index for synthetic metadata.
    #[arg(long, global = true)]
    index_bound: Option<String>,
    #[arg(long, global = true)]
    shift_bound: Option<String>,
}

impl Settings {
    fn overrides(&self) -> Overrides {
        let mut o = Overrides::new();
        let mut put = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                o.insert(k.to_string(), v.clone());
            }
        };
        put("type", &self.quiver_type);
        put("max-degree", &self.max_degree);
        put("period", &self.period);
        put("format", &self.format);
        put("out", &self.out.as_ref().map(|p| p.display().to_string()));
        put("threads", &self.threads);
        put("index-bound", &self.index_bound);
        put("shift-bound", &self.shift_bound);
        o
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coxeter data: h, exponents, ν, P, r±, C.
    QuiverInfo,
    /// Build the algebra and check its Hilbert series.
    Algebra,
    /// Bigraded dimensions of HH^n and HH_n for n < N.
    Hh,
    /// Evaluate a table cell, e.g. `eval iota 'z[0,0]' 'omega[1,3]'`.
    Eval {
        /// iota, bracket, lie or connes.
        op: String,
        a: String,
        b: Option<String>,
        /// Coxeter number for synthetic metadata.
        #[arg(long)]
        coxeter: Option<String>,
        /// synthetic or engine.
        #[arg(long)]
        meta: Option<String>,
        /// printed or corrected.
        #[arg(long)]
        reading: Option<String>,
    },
    /// Check the calculus axioms and the tables against the engine.
    Verify {
        /// Corrupt one operation to exercise the failure path.
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
}

fn run(cli: Cli) -> Result<(Output, Config), CliError> {
    let file = match &cli.settings.config {
        Some(path) => config::read_file(path).map_err(CliError::Usage)?,
        None => Overrides::new(),
    };
    let mut flags = cli.settings.overrides();
    if let Command::Eval { coxeter, meta, reading, .. } = &cli.command {
        for (k, v) in [("coxeter", coxeter), ("meta", meta), ("reading", reading)] {
            if let Some(v) = v {
                flags.insert(k.into(), v.clone());
            }
        }
    }
    let cfg = Config::resolve(&file, &flags).map_err(CliError::Usage)?;
    rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global().ok();
    let out = match &cli.command {
        Command::QuiverInfo => commands::quiver_info(&cfg),
        Command::Algebra => commands::algebra(&cfg),
        Command::Hh => commands::hh(&cfg),
        Command::Eval { op, a, b, .. } => commands::eval(&cfg, op, a, b.as_deref()),
        Command::Verify { inject_fault } => commands::verify(&cfg, *inject_fault),
    }?;
    Ok((out, cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, cfg)) => {
            let rendered = out.render(cfg.format);
            match &cfg.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{rendered}"),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
