use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use scansim::experiment::{EngineSelection, ModeSelection};
use scansim_cli::commands::{self, Overrides, FIXTURES_ENV};
use scansim_cli::service::{self, AppState};

#[derive(Parser)]
#[command(name = "scansim", version, about = "Scanning keyboard models under switch noise")]
struct Cli {
    /// Directory searched for layout fixtures before the built-ins.
    #[arg(long, global = true, env = FIXTURES_ENV)]
    fixtures: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Slow,
    Fast,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Analytic,
    Montecarlo,
    Both,
}

#[derive(clap::Args)]
struct SpecArgs {
    /// Experiment spec (TOML).
    spec: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo runs per sweep point.
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    layout: Option<String>,
    #[arg(long)]
    phrase: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
}

impl SpecArgs {
    fn overrides(&self, out: Option<PathBuf>) -> Overrides {
        Overrides {
            seed: self.seed,
            runs: self.runs,
            out,
            layout: self.layout.clone(),
            phrase: self.phrase.clone(),
            mode: self.mode.map(|m| match m {
                Mode::Slow => ModeSelection::Slow,
                Mode::Fast => ModeSelection::Fast,
                Mode::Both => ModeSelection::Both,
            }),
            engine: self.engine.map(|e| match e {
                EngineArg::Analytic => EngineSelection::Analytic,
                EngineArg::Montecarlo => EngineSelection::Montecarlo,
                EngineArg::Both => EngineSelection::Both,
            }),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and emit CSV.
    Sweep {
        #[command(flatten)]
        spec: SpecArgs,
        /// Output file; stdout when neither this nor the spec sets one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal click probability and information rate of a single button.
    Capacity {
        #[arg(long, value_delimiter = ',', default_value = "0")]
        d: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        g: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        f: Vec<f64>,
    },
    /// Compare analytic distributions with Monte Carlo. Exits 1 on failure.
    Validate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, hide = true, default_value_t = 0)]
        scan_offset: usize,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, env = "SCANSIM_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Static files served for paths outside the API.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    let fixtures = cli.fixtures.as_deref();
    match cli.command {
        Command::Sweep { spec: args, out } => {
            let spec = commands::load_spec(&args.spec, &args.overrides(out))?;
            let layout = commands::spec_layout(&spec, &args.spec, fixtures)?;
            let csv = commands::sweep(&spec, &layout)?;
            if spec.output.is_none() {
                print!("{csv}");
            }
        }
        Command::Capacity { d, g, f } => print!("{}", commands::capacity_table(&d, &g, &f)?),
        Command::Validate { spec: args, scan_offset } => {
            let spec = commands::load_spec(&args.spec, &args.overrides(None))?;
            let layout = commands::spec_layout(&spec, &args.spec, fixtures)?;
            let report = commands::validate_spec(&spec, &layout, scan_offset)?;
            print!("{}", report.render());
            if !report.pass {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Serve { port, host, static_dir } => {
            let state = AppState::new(cli.fixtures.clone());
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(service::serve(SocketAddr::new(host, port), state, static_dir))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
