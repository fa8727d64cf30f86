//! `busemann`: runs single trajectories and ensembles of the stochastic
//! Busemann subgradient method, the verification suites, and rate tables.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 on usage or configuration errors.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use busemann::verify::{Suite, VerifyOptions};
use busemann::Error;
use clap::{Args, Parser, Subcommand};

use commands::Outcome;
use manifest::ExperimentManifest;

#[derive(Parser)]
#[command(name = "busemann", version, about = "Stochastic Busemann subgradient experiments")]
struct Cli {
    /// Worker threads for replica ensembles.
    #[arg(long, env = "SB_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ManifestArgs {
    /// Experiment manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Overrides `run_config.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `replicas`.
    #[arg(long)]
    replicas: Option<usize>,
    /// Overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ManifestArgs {
    fn load(&self) -> busemann::Result<ExperimentManifest> {
        let mut m = ExperimentManifest::load(&self.manifest)?;
        if let Some(seed) = self.seed {
            m.run_config.seed = seed;
        }
        if let Some(r) = self.replicas {
            if r == 0 {
                return Err(Error::Usage("replicas must be at least 1".into()));
            }
            m.replicas = r;
        }
        if let Some(out) = &self.out {
            m.output_dir = out.clone();
        }
        Ok(m)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory; writes trajectory.csv and summary.json.
    Run(ManifestArgs),
    /// Run an ensemble; writes per-step means and standard errors.
    Mc(ManifestArgs),
    /// Run a verification suite and write its report.
    Verify {
        /// geometry, integrands, fejer, rates or all.
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
        /// Replicas for the ensemble-based checks.
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Replace the oracle by one that overstates the speed bound.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Print rates for the strongly convex case.
    Rates {
        /// Rate inputs (JSON with keys L, T, b, alpha, schedule).
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.1")]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.1")]
        lambda: Vec<f64>,
        /// Also write rates.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> busemann::Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Usage("SB_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot configure the thread pool: {e}")))?;
    }
    match cli.command {
        Command::Run(args) => commands::run(&args.load()?),
        Command::Mc(args) => commands::mc(&args.load()?),
        Command::Verify {
            suite,
            seed,
            replicas,
            out,
            inject_fault,
        } => {
            let mut opts = VerifyOptions {
                seed,
                inject_speed_fault: inject_fault,
                ..VerifyOptions::default()
            };
            if let Some(r) = replicas {
                opts.replicas = r;
            }
            commands::verify(suite, &opts, &out)
        }
        Command::Rates {
            manifest,
            eps,
            lambda,
            out,
        } => commands::rates(&manifest, &eps, &lambda, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
