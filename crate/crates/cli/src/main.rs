//! `mtbias`: validate a corpus, add name-augmented instances, and run the
//! compute / analyze / report stages.
//!
//! Exit codes: 0 success, 1 validation or analysis failure, 2 usage error,
//! 3 partial completion (some methods skipped for missing inputs).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use mtbias::bias::{BinaryGender, Cue, NameTable};
use mtbias::dataset::{validate_corpus, Severity};
use mtbias::metrics::{Method, DEFAULT_ALPHA_GRID, DEFAULT_ENTAILMENT_THRESHOLD};
use mtbias::pipeline::{self, AlphaSetting, Dependent, RunConfig};
use mtbias::Executor;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "mtbias", version, about = "Sampling-based gender-bias evaluation for machine translation")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every file referenced by a manifest.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Treat warnings as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Write the instances plus name-augmented copies to a new instances file.
    AugmentNames {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Extra or replacement names as `lang:M=Name` or `lang:F=Name`.
        #[arg(long = "name", value_name = "LANG:G=NAME")]
        names: Vec<String>,
    },
    /// Per-instance metrics, normalisation and per-system aggregates.
    Compute(RunArgs),
    /// Cue effects, rank correlations and quality-binned summaries.
    Analyze(RunArgs),
    /// Ranking, relative-entropy and effect tables plus violin data.
    Report(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory shared by all stages.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated subset of se, s3e, ge, shannon.
    #[arg(long, value_delimiter = ',', default_value = "se,s3e,ge,shannon")]
    methods: Vec<String>,
    /// S3E exponent, or `tune` to pick it from --alpha-grid.
    #[arg(long, default_value = "1")]
    alpha: String,
    #[arg(long, value_delimiter = ',')]
    alpha_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_ENTAILMENT_THRESHOLD)]
    entail_threshold: f64,
    #[arg(long, default_value_t = 1e-6)]
    similarity_floor: f64,
    #[arg(long, default_value_t = mtbias::bias::DEFAULT_NORM_TOLERANCE)]
    norm_tolerance: f64,
    #[arg(long, default_value_t = 5)]
    bins: usize,
    /// Reference level override, `cue=level` (e.g. `Names=no name`).
    #[arg(long = "reference", value_name = "CUE=LEVEL")]
    references: Vec<String>,
    /// Dependent variable of the effect analysis.
    #[arg(long, default_value = "norm", value_parser = ["norm", "raw"])]
    dependent: String,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut c = RunConfig::new(&self.manifest, &self.out);
        c.methods = self
            .methods
            .iter()
            .map(|m| m.parse::<Method>().map_err(|e| anyhow!("{e}")))
            .collect::<anyhow::Result<_>>()?;
        c.alpha = match self.alpha.as_str() {
            "tune" => AlphaSetting::Tune(self.alpha_grid.clone().unwrap_or_else(|| DEFAULT_ALPHA_GRID.to_vec())),
            a => AlphaSetting::Fixed(a.parse().map_err(|_| anyhow!("--alpha expects a number or `tune`, got `{a}`"))?),
        };
        c.entailment_threshold = self.entail_threshold;
        c.similarity_floor = self.similarity_floor;
        c.norm_tolerance = self.norm_tolerance;
        c.bins = self.bins;
        for r in &self.references {
            let (cue, level) = r
                .split_once('=')
                .ok_or_else(|| anyhow!("--reference expects cue=level, got `{r}`"))?;
            let cue = Cue::from_name(cue).ok_or_else(|| anyhow!("unknown cue `{cue}`"))?;
            c.references.insert(cue, level.trim().to_string());
        }
        c.dependent = if self.dependent == "raw" { Dependent::Raw } else { Dependent::Norm };
        c.jobs = self.jobs;
        c.seed = self.seed;
        c.validate().map_err(|e| anyhow!("{e}"))?;
        Ok(c)
    }
}

/// An error together with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: EXIT_USAGE, error }
}

fn failure(error: mtbias::Error) -> Failure {
    let code = match error {
        mtbias::Error::MissingStage { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    };
    Failure {
        code,
        error: error.into(),
    }
}

fn require_manifest(path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(anyhow!("manifest {} not found", path.display())))
    }
}

fn parse_name(spec: &str, table: &mut NameTable) -> anyhow::Result<()> {
    let (lang, rest) = spec.split_once(':').context("expected LANG:G=NAME")?;
    let (gender, name) = rest.split_once('=').context("expected LANG:G=NAME")?;
    let gender = match gender {
        "M" | "m" => BinaryGender::M,
        "F" | "f" => BinaryGender::F,
        g => bail!("gender must be M or F, got `{g}`"),
    };
    table.insert(lang, gender, name);
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate {
            manifest,
            report,
            strict,
        } => {
            require_manifest(&manifest)?;
            let result = validate_corpus(&manifest);
            for issue in &result.issues {
                let tag = match issue.severity {
                    Severity::Error => "error",
                    Severity::Warning => "warning",
                };
                eprintln!("{tag}: {}: {}", issue.location, issue.message);
            }
            let json = format!("{}\n", result.to_json());
            match report {
                Some(p) => std::fs::write(&p, json)
                    .with_context(|| format!("writing {}", p.display()))
                    .map_err(|e| Failure {
                        code: EXIT_FAILURE,
                        error: e,
                    })?,
                None => print!("{json}"),
            }
            Ok(if result.passes(strict) { 0 } else { EXIT_FAILURE })
        }
        Command::AugmentNames { manifest, out, names } => {
            require_manifest(&manifest)?;
            let mut table = NameTable::default();
            for n in &names {
                parse_name(n, &mut table).map_err(usage)?;
            }
            let added = pipeline::augment_names(&manifest, &out, &table).map_err(failure)?;
            log::info!("added {added} name-augmented instances");
            Ok(0)
        }
        Command::Compute(args) => {
            require_manifest(&args.manifest)?;
            let config = args.config().map_err(usage)?;
            let exec = Executor::with_jobs(config.jobs).map_err(failure)?;
            let summary = pipeline::compute(&config, &exec).map_err(failure)?;
            log::info!("{} metric records", summary.records);
            Ok(if summary.is_partial() { EXIT_PARTIAL } else { 0 })
        }
        Command::Analyze(args) => {
            require_manifest(&args.manifest)?;
            let config = args.config().map_err(usage)?;
            let exec = Executor::with_jobs(config.jobs).map_err(failure)?;
            let summary = pipeline::analyze(&config, &exec).map_err(failure)?;
            log::info!(
                "{} effect estimates, {} correlations, {} binned panels",
                summary.effects,
                summary.correlations,
                summary.panels
            );
            Ok(0)
        }
        Command::Report(args) => {
            require_manifest(&args.manifest)?;
            let config = args.config().map_err(usage)?;
            let summary = pipeline::report(&config).map_err(failure)?;
            for f in &summary.files {
                log::info!("wrote {}", f.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
