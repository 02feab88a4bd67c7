use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use soda_cli::commands::{self, to_json};
use soda_cli::config::RunConfig;
use soda_cli::formats::DataFormat;
use soda_cli::synth::SynthConfig;
use soda_core::eval::Metric;
use soda_core::{BoundConfig, Error, EvalOptions, FitOptions, Result};

/// Exit codes: 0 success, 1 usage error, 2 data or runtime error,
/// 3 bound verification failure.
const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_DATA: i32 = 2;
const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Parser)]
#[command(name = "soda", version, about = "Streaming discriminant analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit a discriminant model in one pass over a labeled feature stream
    Train(CommonArgs),
    /// Rank a gallery for each query and report CMC / mAP retrieval metrics
    Eval(EvalArgs),
    /// Audit the sketch accuracy guarantees against exact batch computation
    Verify(VerifyArgs),
    /// Generate a synthetic two-view identification dataset
    Synth(SynthArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// key=value config file; explicit flags take precedence over its entries
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Number of retained sketch rows (the streaming memory budget)
    #[arg(long, value_name = "ROWS")]
    sketch_size: Option<usize>,
    /// Dimension of the intermediate subspace (defaults to min(sketch, dim))
    #[arg(long, value_name = "K")]
    reduced_dim: Option<usize>,
    /// Number of discriminant directions to keep
    #[arg(long, value_name = "R")]
    components: Option<usize>,
    /// Regularizer added to the within-class scatter
    #[arg(long, value_name = "EPS")]
    ridge: Option<f64>,
    /// Distance used for ranking: euclidean or cosine
    #[arg(long)]
    metric: Option<Metric>,
    /// Seed for every randomized step
    #[arg(long)]
    seed: Option<u64>,
    /// Training or verification input stream (CSV or binary)
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Model file to write (train) or read (eval)
    #[arg(long, value_name = "PATH")]
    model: Option<PathBuf>,
    /// Query samples for evaluation
    #[arg(long, value_name = "PATH")]
    query: Option<PathBuf>,
    /// Gallery samples for evaluation
    #[arg(long, value_name = "PATH")]
    gallery: Option<PathBuf>,
    /// Report destination (train/eval/verify: JSON file; synth: directory)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Also write the CMC curve as a rank,rate CSV file
    #[arg(long, value_name = "PATH")]
    cmc_out: Option<PathBuf>,
    /// Skip gallery entries that share the query's identity and camera
    #[arg(long)]
    exclude_same_camera: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Refuse inputs larger than this many matrix cells (rows times dims)
    #[arg(long, default_value_t = 50_000_000)]
    max_cells: u64,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of identities (split into training and evaluation halves)
    #[arg(long, default_value_t = 10)]
    classes: usize,
    /// Samples per identity per view
    #[arg(long, default_value_t = 20)]
    per_class: usize,
    /// Feature dimension
    #[arg(long, default_value_t = 16)]
    dim: usize,
    /// Scale of the identity-mean cloud
    #[arg(long, default_value_t = 3.0)]
    between_spread: f64,
    /// Per-sample noise scale
    #[arg(long, default_value_t = 1.0)]
    within_spread: f64,
    /// Scale of the shared second-view offset (defaults to within-spread)
    #[arg(long)]
    offset_scale: Option<f64>,
    /// Output encoding: csv or sodf
    #[arg(long, default_value = "csv")]
    format: DataFormat,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            }
        }
    }
}

fn resolve(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.sketch_size {
        cfg.sketch_size = Some(v);
    }
    if let Some(v) = common.reduced_dim {
        cfg.reduced_dim = Some(v);
    }
    if let Some(v) = common.components {
        cfg.n_components = Some(v);
    }
    if let Some(v) = common.ridge {
        cfg.ridge = Some(v);
    }
    if let Some(v) = common.metric {
        cfg.metric = v;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    for (flag, slot) in [
        (&common.input, &mut cfg.input),
        (&common.model, &mut cfg.model),
        (&common.query, &mut cfg.query),
        (&common.gallery, &mut cfg.gallery),
        (&common.out, &mut cfg.out),
    ] {
        if flag.is_some() {
            *slot = flag.clone();
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Writes the report JSON to `--out` when given, otherwise to stdout.
fn emit(out: Option<&PathBuf>, json: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{json}\n"))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Cmd::Train(common) => {
            let cfg = resolve(&common)?;
            let input = RunConfig::require_path(&cfg.input, "--input")?;
            let model = RunConfig::require_path(&cfg.model, "--model")?;
            let sketch_size = cfg.require_sketch_size()?;
            let options = FitOptions {
                reduced_dim: cfg.reduced_dim,
                n_components: cfg.n_components,
                ridge: cfg.ridge,
            };
            let report = commands::cmd_train(&input, &model, sketch_size, &options)?;
            emit(cfg.out.as_ref(), &to_json(&report)?)?;
            Ok(EXIT_OK)
        }
        Cmd::Eval(args) => {
            let cfg = resolve(&args.common)?;
            let model = RunConfig::require_path(&cfg.model, "--model")?;
            let query = RunConfig::require_path(&cfg.query, "--query")?;
            let gallery = RunConfig::require_path(&cfg.gallery, "--gallery")?;
            let options = EvalOptions {
                metric: cfg.metric,
                exclude_same_camera: args.exclude_same_camera,
            };
            let report =
                commands::cmd_eval(&model, &query, &gallery, &options, args.cmc_out.as_deref())?;
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            emit(cfg.out.as_ref(), &to_json(&report)?)?;
            Ok(EXIT_OK)
        }
        Cmd::Verify(args) => {
            let cfg = resolve(&args.common)?;
            let input = RunConfig::require_path(&cfg.input, "--input")?;
            let config = BoundConfig {
                sketch_size: cfg.require_sketch_size()?,
                reduced_dim: cfg.reduced_dim,
                ridge: cfg.ridge,
                seed: cfg.seed,
            };
            let report = commands::cmd_verify(&input, &config, args.max_cells)?;
            emit(cfg.out.as_ref(), &to_json(&report)?)?;
            if report.all_pass {
                Ok(EXIT_OK)
            } else {
                eprintln!("verification failed: an applicable bound check did not hold");
                Ok(EXIT_VERIFY_FAILED)
            }
        }
        Cmd::Synth(args) => {
            let cfg = resolve(&args.common)?;
            let out_dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let config = SynthConfig {
                classes: args.classes,
                per_class: args.per_class,
                dim: args.dim,
                between_spread: args.between_spread,
                within_spread: args.within_spread,
                offset_scale: args.offset_scale,
                seed: cfg.seed,
            };
            let report = commands::cmd_synth(&config, args.format, &out_dir)?;
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            println!("{}", to_json(&report)?);
            Ok(EXIT_OK)
        }
    }
}
