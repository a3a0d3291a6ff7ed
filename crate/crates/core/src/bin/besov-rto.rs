use std::path::PathBuf;
use std::process::ExitCode;

use besov_rto::runner::{diagnose, discretization_sweep, run_experiment, Problem, RunConfig};
use besov_rto::wavelet::WaveletFamily;
use besov_rto::Result;
use clap::{Args, Parser, Subcommand};

/// Besov-prior posterior sampling with randomize-then-optimize.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its output directory.
    Run(Overrides),
    /// Run one problem at several resolutions and compare the means.
    Sweep {
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated signal lengths, e.g. 32,64,128.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
    },
    /// Recompute chain diagnostics from a run directory.
    Diagnose {
        #[arg(long)]
        samples: PathBuf,
    },
}

/// JSON config plus flags that override its fields.
#[derive(Args)]
struct Overrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<Problem>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    wavelet: Option<WaveletFamily>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl Overrides {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        c.problem = self.problem.unwrap_or(c.problem);
        c.n = self.n.unwrap_or(c.n);
        c.wavelet = self.wavelet.unwrap_or(c.wavelet);
        c.s = self.s.unwrap_or(c.s);
        c.p = self.p.unwrap_or(c.p);
        c.lambda = self.lambda.unwrap_or(c.lambda);
        c.n_samples = self.n_samples.unwrap_or(c.n_samples);
        c.eta = self.eta.or(c.eta);
        c.seed = self.seed.unwrap_or(c.seed);
        c.workers = self.workers.unwrap_or(c.workers);
        c.output_dir = self.output_dir.unwrap_or(c.output_dir);
        c.validate()?;
        Ok(c)
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run(overrides) => {
            let config = overrides.resolve()?;
            let outcome = run_experiment(&config)?;
            println!(
                "{}: acceptance rate {:.4}, median ESS {}, wrote {}",
                outcome.manifest.version,
                outcome.manifest.acceptance_rate,
                outcome.stats.ess_median.map_or("n/a".into(), |e| format!("{e:.1}")),
                config.output_dir.display()
            );
        }
        Command::Sweep { overrides, sizes } => {
            let config = overrides.resolve()?;
            let report = discretization_sweep(&config, &sizes)?;
            for (n, row) in report.sizes.iter().zip(&report.differences) {
                let cells: Vec<String> = row.iter().map(|d| format!("{d:.4}")).collect();
                println!("n={n:<6} {}", cells.join(" "));
            }
        }
        Command::Diagnose { samples } => {
            let stats = diagnose(&samples)?;
            println!("{}", serde_json::to_string_pretty(&stats)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
