//! The `dynmix` command line: simulate data, fit the dynamic mixture model,
//! and summarize stored chains.

mod error;
mod manifest;
mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dynmix::diagnostics::{summarize_draw_matrix, summarize_parameters, MIN_HPD_DRAWS};
use dynmix::gibbs::{
    run_chains_with_progress, run_fit_with_progress, ChainStore, DataMode, FitConfig,
};
use dynmix::io::{self as dio, PriorOverrides};
use dynmix::mixture::MixturePriors;
use dynmix::poly_dlm::DlmPriors;
use dynmix::synthdata::{generate, Design, WeightCurve};
use dynmix::Link;

pub use error::{exit, CliError};
pub use manifest::{FitManifest, SimulateManifest, SOFTWARE};
use output::{sha256_hex, write_atomic};

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Parser)]
#[command(
    name = "dynmix",
    version,
    about = "Gaussian mixtures with dynamic weights"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a synthetic series and its true weights.
    Simulate(SimulateArgs),
    /// Fit the model to a series.
    Fit(FitArgs),
    /// Recompute medians and HPD intervals from stored draws.
    Summarize(SummarizeArgs),
    /// Re-run a fit from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// bernoulli, binomial:<n>, gaussian or mixture.
    #[arg(long)]
    pub design: Design,
    /// linear, parabolic, sinusoidal or steps.
    #[arg(long)]
    pub curve: WeightCurve,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub length: u64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with one value per row, or index,value rows.
    #[arg(long)]
    pub data: PathBuf,
    /// mixture, bernoulli, binomial:<n> or gaussian.
    #[arg(long, default_value = "mixture")]
    pub mode: DataMode,
    /// logit or probit; identity in gaussian mode.
    #[arg(long)]
    pub link: Option<Link>,
    #[arg(long, default_value_t = 220_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 20_000)]
    pub burn: usize,
    #[arg(long, default_value_t = 200)]
    pub thin: usize,
    /// Polynomial order of the dynamic model.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u64).range(0..=i64::MAX as u64))]
    pub seed: u64,
    /// TOML file of prior hyperparameters.
    #[arg(long)]
    pub priors: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Posterior mass of the HPD intervals.
    #[arg(long, default_value_t = 0.9)]
    pub mass: f64,
    /// Write every kept curve draw to alpha.csv instead of its summary.
    #[arg(long)]
    pub full_draws: bool,
    /// Independent chains, seeded seed, seed+1, …
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    pub chains: u64,
    /// Suppress progress lines.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// chain.csv from a fit.
    #[arg(long)]
    pub chain: PathBuf,
    /// alpha.csv written with --full-draws.
    #[arg(long)]
    pub alpha: Option<PathBuf>,
    #[arg(long, default_value_t = 0.9)]
    pub mass: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Data file to use instead of the recorded path.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub quiet: bool,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Fit(a) => fit(&a),
        Command::Summarize(a) => summarize(&a),
        Command::Replay(a) => replay(&a),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

fn check_mass(mass: f64) -> Result<()> {
    if mass > 0.0 && mass < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--mass {mass} must lie in (0, 1)")))
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let start = Instant::now();
    let len = usize::try_from(args.length)
        .map_err(|_| CliError::Usage("--length is too large".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let data = generate(&mut rng, args.design, args.curve, len)?;
    create_dir(&args.out)?;

    let mut data_csv = Vec::new();
    dio::write_series(&mut data_csv, "y", &data.y)?;
    write_atomic(&args.out.join("data.csv"), &data_csv)?;
    let mut truth_csv = Vec::new();
    dio::write_truth(&mut truth_csv, &data.alpha, data.z.as_deref())?;
    write_atomic(&args.out.join("truth.csv"), &truth_csv)?;

    let manifest = SimulateManifest {
        software: SOFTWARE.into(),
        command: "simulate".into(),
        design: args.design.to_string(),
        curve: args.curve.to_string(),
        length: args.length,
        seed: args.seed,
        data_sha256: sha256_hex(&data_csv),
        truth_sha256: sha256_hex(&truth_csv),
        duration_seconds: start.elapsed().as_secs_f64(),
    };
    manifest.write(&args.out.join("manifest.toml"))
}

/// Resolves the full configuration of a fit from its flags and priors file.
pub fn fit_config(args: &FitArgs, y: &[f64]) -> Result<FitConfig> {
    let link = args.link.unwrap_or(if args.mode == DataMode::Gaussian {
        Link::Identity
    } else {
        Link::Logit
    });
    let mut config = FitConfig {
        iterations: args.iters,
        burn_in: args.burn,
        thin: args.thin,
        link,
        order: args.p,
        seed: args.seed,
        mode: args.mode,
        priors: DlmPriors::standard(args.p),
        ..FitConfig::default()
    };
    config.check_link()?;
    let overrides = match &args.priors {
        Some(path) => {
            let bytes = read_file(path)?;
            let text = String::from_utf8(bytes).map_err(|_| {
                CliError::Usage(format!("{}: priors file is not UTF-8", path.display()))
            })?;
            PriorOverrides::parse(&text, args.p.max(1))?
        }
        None => PriorOverrides::default(),
    };
    if args.p == 0 {
        return Err(CliError::Usage("--p must be at least 1".into()));
    }
    overrides.apply_dlm(&mut config.priors)?;
    if args.mode == DataMode::Mixture {
        let mut mp = MixturePriors::from_data(y)?;
        overrides.apply_mixture(&mut mp)?;
        config.mixture_priors = Some(mp);
    } else if overrides.has_mixture_keys() {
        return Err(CliError::Usage(format!(
            "component priors given for {} mode",
            args.mode
        )));
    }
    config.validate()?;
    Ok(config)
}

pub fn fit(args: &FitArgs) -> Result<()> {
    check_mass(args.output.mass)?;
    let bytes = read_file(&args.data)?;
    let y = dio::read_series(bytes.as_slice())?;
    let config = fit_config(args, &y)?;
    let data_path = fs::canonicalize(&args.data).unwrap_or_else(|_| args.data.clone());
    execute(&config, &y, &bytes, &data_path, &args.output, &args.out)
}

pub fn replay(args: &ReplayArgs) -> Result<()> {
    let manifest = FitManifest::read(&args.manifest)?;
    let data_path = args.data.clone().unwrap_or_else(|| manifest.data.clone());
    let bytes = read_file(&data_path)?;
    if sha256_hex(&bytes) != manifest.data_sha256 {
        return Err(dynmix::Error::Data(format!(
            "{} does not match the recorded checksum",
            data_path.display()
        ))
        .into());
    }
    let y = dio::read_series(bytes.as_slice())?;
    let output = OutputArgs {
        mass: manifest.mass,
        full_draws: manifest.full_draws,
        chains: manifest.chains,
        quiet: args.quiet,
    };
    execute(&manifest.config, &y, &bytes, &data_path, &output, &args.out)
}

fn execute(
    config: &FitConfig,
    y: &[f64],
    data_bytes: &[u8],
    data_path: &Path,
    output: &OutputArgs,
    out: &Path,
) -> Result<()> {
    check_mass(output.mass)?;
    config.validate()?;
    if config.kept_draws() < MIN_HPD_DRAWS {
        return Err(CliError::Usage(format!(
            "the settings keep {} draws; summaries need at least {MIN_HPD_DRAWS}",
            config.kept_draws()
        )));
    }
    create_dir(out)?;
    let start = Instant::now();
    let total = config.iterations;
    let quiet = output.quiet;
    let chains = output.chains as usize;
    let stores: Vec<ChainStore> = if chains == 1 {
        vec![run_fit_with_progress(config, y, |i| {
            if !quiet {
                eprintln!("iteration {i}/{total}");
            }
        })?]
    } else {
        run_chains_with_progress(config, y, chains, |c, i| {
            if !quiet {
                eprintln!("chain {}: iteration {i}/{total}", c + 1);
            }
        })
        .into_iter()
        .collect::<dynmix::Result<_>>()?
    };
    for (c, store) in stores.iter().enumerate() {
        let suffix = if chains == 1 {
            String::new()
        } else {
            format!("-{}", c + 1)
        };
        write_fit_outputs(out, &suffix, store, output)?;
    }
    let manifest = FitManifest {
        software: SOFTWARE.into(),
        command: "fit".into(),
        data: data_path.to_path_buf(),
        data_sha256: sha256_hex(data_bytes),
        mass: output.mass,
        full_draws: output.full_draws,
        chains: output.chains,
        kept_draws: config.kept_draws(),
        nonfinite_proposals: stores.iter().map(|s| s.nonfinite_proposals).sum(),
        duration_seconds: start.elapsed().as_secs_f64(),
        config: config.clone(),
    };
    manifest.write(&out.join("manifest.toml"))
}

fn write_fit_outputs(
    out: &Path,
    suffix: &str,
    store: &ChainStore,
    opts: &OutputArgs,
) -> Result<()> {
    let params = summarize_parameters(&store.parameters, opts.mass)?;
    let curve = summarize_draw_matrix(&store.curve, opts.mass)?;

    let mut buf = Vec::new();
    dio::write_chain(&mut buf, &store.parameters)?;
    write_atomic(&out.join(format!("chain{suffix}.csv")), &buf)?;

    buf.clear();
    if opts.full_draws {
        dio::write_curve_draws(&mut buf, &store.curve)?;
    } else {
        dio::write_curve_summary(&mut buf, &curve)?;
    }
    write_atomic(&out.join(format!("alpha{suffix}.csv")), &buf)?;

    buf.clear();
    dio::write_summary(&mut buf, &params, Some(&curve))?;
    write_atomic(&out.join(format!("summary{suffix}.csv")), &buf)?;

    if let Some(rates) = &store.acceptance {
        buf.clear();
        dio::write_series(&mut buf, "acceptance", rates)?;
        write_atomic(&out.join(format!("acceptance{suffix}.csv")), &buf)?;
    }
    Ok(())
}

pub fn summarize(args: &SummarizeArgs) -> Result<()> {
    check_mass(args.mass)?;
    let chain = dio::read_chain(read_file(&args.chain)?.as_slice())?;
    let params = summarize_parameters(&chain, args.mass)?;
    let curve = match &args.alpha {
        Some(path) => {
            let rows = dio::read_curve_draws(read_file(path)?.as_slice())?;
            if rows.len() != chain.len() {
                return Err(dynmix::Error::Data(format!(
                    "{} holds {} draws, the chain holds {}",
                    path.display(),
                    rows.len(),
                    chain.len()
                ))
                .into());
            }
            Some(summarize_draw_matrix(&rows, args.mass)?)
        }
        None => None,
    };
    let mut buf = Vec::new();
    dio::write_summary(&mut buf, &params, curve.as_deref())?;
    match &args.out {
        Some(path) => write_atomic(path, &buf),
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}
