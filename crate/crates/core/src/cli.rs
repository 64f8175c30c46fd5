//! Command-line front end. The binary only forwards `std::env::args` to
//! [`run`]; every subcommand delegates to the library.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cohort::{
    estimate_reference_from_manifest, evaluate_cohort, sweep_cohort, threshold_grid,
    CohortManifest, CohortOptions, CohortReport, Objective, DEFAULT_BINS,
};
use crate::error::{Error, Result};
use crate::metrics::{
    binarize, evaluate_pair_within, MetricConfig, SubjectMetrics, DEFAULT_REFERENCE_R,
    DEFAULT_THRESHOLD,
};
use crate::synth::{generate_cohort, write_cohort, CohortSpec, NoiseMode, NoiseModel, GENERATOR};
use crate::volume::{
    as_binary_mask, as_probability_map, read_nifti_file, DEFAULT_BINARY_TOLERANCE,
    DEFAULT_CLAMP_EPSILON,
};

#[derive(Debug, Parser)]
#[command(name = "ndsc", version, about = "Dice and normalised Dice scores for 3D segmentation masks")]
pub struct Cli {
    /// Suppress warnings and per-subject log lines.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for per-subject work (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one prediction against one ground truth.
    Evaluate(EvaluateArgs),
    /// Score a manifest of subjects and report load bias.
    Cohort(CohortArgs),
    /// Mean lesion load of a manifest's ground truths.
    EstimateRef(EstimateRefArgs),
    /// Mean DSC/nDSC over a threshold grid.
    Sweep(SweepArgs),
    /// Write a synthetic cohort (NIfTI files + manifest).
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    /// The prediction is a probability map to binarise at --threshold.
    #[arg(long)]
    pub prob: bool,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long = "ref", default_value_t = DEFAULT_REFERENCE_R)]
    pub reference: f64,
    #[arg(long)]
    pub roi: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CohortArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long = "ref", conflicts_with_all = ["ref_manifest", "self_ref"])]
    pub reference: Option<f64>,
    /// Estimate r from the ground truths of this (training) manifest.
    #[arg(long, conflicts_with = "self_ref")]
    pub ref_manifest: Option<PathBuf>,
    /// Estimate r from the evaluated cohort itself.
    #[arg(long)]
    pub self_ref: bool,
    /// Threshold for probability predictions (default 0.35).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Exit 2 when any subject is skipped.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct EstimateRefArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// `lo:hi:step`
    #[arg(long)]
    pub thresholds: String,
    #[arg(long = "ref", default_value_t = DEFAULT_REFERENCE_R)]
    pub reference: f64,
    #[arg(long, value_enum)]
    pub optimize: OptimizeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizeArg {
    Dsc,
    Ndsc,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub subjects: usize,
    /// `x,y,z`
    #[arg(long)]
    pub dims: String,
    /// `lo:hi`
    #[arg(long)]
    pub loads: String,
    #[arg(long = "fp")]
    pub fp_rate: f64,
    #[arg(long = "fn")]
    pub fn_rate: f64,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub blobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Det,
    Stoch,
}

/// Output of `evaluate`.
#[derive(Debug, Serialize)]
pub struct PairReport {
    pub reference_r: f64,
    pub threshold: Option<f64>,
    #[serde(flatten)]
    pub metrics: SubjectMetrics,
}

#[derive(Debug, Serialize)]
struct ReferenceReport {
    reference_r: f64,
    subjects: usize,
}

#[derive(Debug, Serialize)]
struct SynthReport<'a> {
    manifest: PathBuf,
    generator: &'static str,
    subjects: Vec<SynthSubjectLine<'a>>,
}

#[derive(Debug, Serialize)]
struct SynthSubjectLine<'a> {
    id: &'a str,
    target_load: f64,
    positives: usize,
}

struct Context {
    quiet: bool,
    format: Format,
    output: Option<PathBuf>,
    jobs: Option<usize>,
}

impl Context {
    fn warn(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("warning: {}", msg.as_ref());
        }
    }

    fn log(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn emit(&self, bytes: &[u8]) -> Result<()> {
        match &self.output {
            Some(path) => fs::write(path, bytes).map_err(|e| Error::io(path, e)),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes)?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidParameter(format!("{what} must look like lo:hi, got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    Ok((
        parts[0].trim().parse().map_err(|_| bad())?,
        parts[1].trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_range(s: &str) -> Result<(f64, f64, f64)> {
    let bad = || Error::InvalidParameter(format!("thresholds must look like lo:hi:step, got {s:?}"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts[..] {
        [lo, hi, step] => Ok((lo, hi, step)),
        _ => Err(bad()),
    }
}

fn parse_dims(s: &str) -> Result<[usize; 3]> {
    let bad = || Error::InvalidParameter(format!("dims must look like x,y,z, got {s:?}"));
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts[..] {
        [x, y, z] => Ok([x, y, z]),
        _ => Err(bad()),
    }
}

fn subject_csv(id: &str, m: &SubjectMetrics) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "lesion_load", "h", "kappa", "dsc", "ndsc", "precision", "recall"])?;
    let mut row = vec![id.to_string()];
    row.extend(
        [m.lesion_load, m.h, m.kappa, m.dsc, m.ndsc, m.precision, m.recall]
            .iter()
            .map(|v| v.to_string()),
    );
    w.write_record(&row)?;
    w.into_inner()
        .map_err(|e| Error::Stream(e.into_error()))
}

fn cmd_evaluate(ctx: &Context, args: &EvaluateArgs) -> Result<()> {
    let cfg = MetricConfig::new(args.reference)?;
    let gt = as_binary_mask(&read_nifti_file(&args.gt)?, DEFAULT_BINARY_TOLERANCE)?;
    let pred_volume = read_nifti_file(&args.pred)?;
    let (pred, threshold) = if args.prob {
        if !(0.0..=1.0).contains(&args.threshold) {
            return Err(Error::InvalidParameter(format!(
                "threshold {} outside [0, 1]",
                args.threshold
            )));
        }
        let pm = as_probability_map(&pred_volume, DEFAULT_CLAMP_EPSILON)?;
        (binarize(&pm, args.threshold), Some(args.threshold))
    } else {
        (as_binary_mask(&pred_volume, DEFAULT_BINARY_TOLERANCE)?, None)
    };
    let roi = match &args.roi {
        Some(p) => Some(as_binary_mask(&read_nifti_file(p)?, DEFAULT_BINARY_TOLERANCE)?),
        None => None,
    };
    let metrics = evaluate_pair_within(&gt, &pred, roi.as_ref(), &cfg)?;
    let report = PairReport {
        reference_r: cfg.reference_r(),
        threshold,
        metrics,
    };
    let bytes = match ctx.format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => subject_csv(&file_id(&args.pred), &report.metrics)?,
        Format::Text => {
            let m = &report.metrics;
            format!(
                "lesion_load {}\nh           {}\nkappa       {}\ndsc         {}\nndsc        {}\nprecision   {}\nrecall      {}\n",
                m.lesion_load, m.h, m.kappa, m.dsc, m.ndsc, m.precision, m.recall
            )
            .into_bytes()
        }
    };
    ctx.emit(&bytes)
}

fn file_id(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.strip_suffix(".nii").unwrap_or(&name).to_string()
}

fn check_reference(r: f64, source: &str) -> Result<f64> {
    if r > 0.0 && r < 1.0 {
        Ok(r)
    } else {
        Err(Error::InvalidParameter(format!(
            "reference r estimated from {source} is {r}; it must lie in (0, 1)"
        )))
    }
}

fn cmd_cohort(ctx: &Context, args: &CohortArgs) -> Result<u8> {
    let manifest = CohortManifest::from_path(&args.manifest)?;
    let reference = if let Some(r) = args.reference {
        r
    } else if let Some(path) = &args.ref_manifest {
        let train = CohortManifest::from_path(path)?;
        check_reference(estimate_reference_from_manifest(&train)?, "--ref-manifest")?
    } else if args.self_ref {
        ctx.warn(
            "estimating r from the evaluated cohort itself; use --ref-manifest with a training split for unbiased comparisons",
        );
        check_reference(estimate_reference_from_manifest(&manifest)?, "the cohort")?
    } else {
        DEFAULT_REFERENCE_R
    };
    let cfg = MetricConfig::new(reference)?;
    let needs_threshold = manifest
        .subjects
        .iter()
        .any(|s| s.pred_kind == crate::cohort::PredKind::Probability);
    let threshold = match (args.threshold, needs_threshold) {
        (Some(t), _) => Some(t),
        (None, true) => Some(DEFAULT_THRESHOLD),
        (None, false) => None,
    };
    let manifest = manifest.with_threshold(threshold)?;
    let report = evaluate_cohort(
        &manifest,
        &cfg,
        &CohortOptions {
            bins: args.bins,
            jobs: ctx.jobs,
        },
    )?;
    for r in &report.per_subject {
        ctx.log(format!(
            "{}: load={} dsc={:.4} ndsc={:.4}",
            r.id, r.metrics.lesion_load, r.metrics.dsc, r.metrics.ndsc
        ));
    }
    for s in &report.skipped {
        ctx.warn(format!("skipped {}: {}", s.id, s.reason));
    }
    ctx.emit(&render_report(ctx.format, &report)?)?;
    Ok(if args.strict && !report.skipped.is_empty() {
        2
    } else {
        0
    })
}

fn render_report(format: Format, report: &CohortReport) -> Result<Vec<u8>> {
    Ok(match format {
        Format::Json => report.to_json()?.into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
        Format::Text => report.to_text().into_bytes(),
    })
}

fn cmd_estimate_ref(ctx: &Context, args: &EstimateRefArgs) -> Result<()> {
    let manifest = CohortManifest::from_path(&args.manifest)?;
    let r = estimate_reference_from_manifest(&manifest)?;
    if r == 0.0 {
        ctx.warn("every ground truth is empty; r must lie in (0, 1) before use");
    }
    let report = ReferenceReport {
        reference_r: r,
        subjects: manifest.subjects.len(),
    };
    let bytes = match ctx.format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => format!("reference_r,subjects\n{},{}\n", r, report.subjects).into_bytes(),
        Format::Text => format!("{r}\n").into_bytes(),
    };
    ctx.emit(&bytes)
}

fn cmd_sweep(ctx: &Context, args: &SweepArgs) -> Result<()> {
    let (lo, hi, step) = parse_range(&args.thresholds)?;
    let thresholds = threshold_grid(lo, hi, step)?;
    let cfg = MetricConfig::new(args.reference)?;
    let objective = match args.optimize {
        OptimizeArg::Dsc => Objective::Dsc,
        OptimizeArg::Ndsc => Objective::Ndsc,
    };
    let manifest = CohortManifest::from_path(&args.manifest)?;
    let report = sweep_cohort(
        &manifest,
        &thresholds,
        &cfg,
        objective,
        &CohortOptions {
            bins: DEFAULT_BINS,
            jobs: ctx.jobs,
        },
    )?;
    for s in &report.skipped {
        ctx.warn(format!("skipped {}: {}", s.id, s.reason));
    }
    let bytes = match ctx.format {
        Format::Json => report.to_json()?.into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            buf
        }
        Format::Text => report.to_text().into_bytes(),
    };
    ctx.emit(&bytes)
}

fn cmd_synth(ctx: &Context, args: &SynthArgs) -> Result<()> {
    let mode = match args.mode {
        ModeArg::Det => NoiseMode::Deterministic,
        ModeArg::Stoch => NoiseMode::Stochastic,
    };
    let spec = CohortSpec {
        subjects: args.subjects,
        dims: parse_dims(&args.dims)?,
        load_range: parse_pair(&args.loads, "loads")?,
        blob_count: args.blobs,
        noise: NoiseModel::new(args.fp_rate, args.fn_rate, mode, args.seed)?,
        seed: args.seed,
    };
    let subjects = match ctx.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(|| generate_cohort(&spec))?,
        None => generate_cohort(&spec)?,
    };
    let manifest = write_cohort(&args.out, &spec, &subjects)?;
    for s in &subjects {
        ctx.log(format!(
            "{}: target load {} ({} positives)",
            s.id,
            s.spec.target_load,
            s.gt.positive_count()
        ));
    }
    let report = SynthReport {
        manifest,
        generator: GENERATOR,
        subjects: subjects
            .iter()
            .map(|s| SynthSubjectLine {
                id: &s.id,
                target_load: s.spec.target_load,
                positives: s.gt.positive_count(),
            })
            .collect(),
    };
    let bytes = match ctx.format {
        Format::Json => json_bytes(&report)?,
        Format::Csv => {
            let mut out = String::from("id,target_load,positives\n");
            for s in &report.subjects {
                out.push_str(&format!("{},{},{}\n", s.id, s.target_load, s.positives));
            }
            out.into_bytes()
        }
        Format::Text => format!("{}\n", report.manifest.display()).into_bytes(),
    };
    ctx.emit(&bytes)
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let ctx = Context {
        quiet: cli.quiet,
        format: cli.format,
        output: cli.output.clone(),
        jobs: cli.jobs,
    };
    let result = match &cli.command {
        Command::Evaluate(a) => cmd_evaluate(&ctx, a).map(|_| 0),
        Command::Cohort(a) => cmd_cohort(&ctx, a),
        Command::EstimateRef(a) => cmd_estimate_ref(&ctx, a).map(|_| 0),
        Command::Sweep(a) => cmd_sweep(&ctx, a).map(|_| 0),
        Command::Synth(a) => cmd_synth(&ctx, a).map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
