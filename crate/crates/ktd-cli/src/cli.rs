//! Subcommand definitions and implementations.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ktd_apps::{
    complete, denoise as denoise_op, downsample_mask, psnr, relative_error, super_resolve,
    Acceleration, CompletionConfig, CompletionState, Smoothing,
};
use ktd_core::synth::{preset_sigmas, random_ktd_tensor, SpectrumPreset};
use ktd_core::{
    ktd_decompose, model_to_bytes, pt_ktd, DecomposeMethod, DenseTensor, KtdModel, SketchConfig,
};

use crate::gridspec::{parse_dims, parse_grid};
use crate::image::read_image;
use crate::record::{append_records, IterEntry, RunRecord};
use crate::{failure, usage, Result};

#[derive(Parser, Debug)]
#[command(
    name = "ktd",
    version,
    about = "Kronecker tensor decomposition toolbox: synthesize, decompose, complete, denoise, super-resolve, benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic tensor of known Kronecker structure
    Synth(SynthArgs),
    /// Decompose a tensor (or image) into a .ktdm model
    Decompose(DecomposeArgs),
    /// Recover missing entries by alternating low-rank fits and masking
    Complete(CompleteArgs),
    /// Split a tensor into a low-rank reconstruction plus residual
    Denoise(DenoiseArgs),
    /// Fill in a regularly down-sampled image
    Superres(SuperresArgs),
    /// Sweep methods x ranks x seeds over synthetic tensors
    Bench(BenchArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodFlag {
    /// deterministic truncated SVDs
    Ktd,
    /// randomized SVDs with power iteration
    Rktd,
    /// randomized under an explicit pass budget
    Rfktd,
    /// prior multilinear compression of the rearranged tensor
    Ptktd,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumFlag {
    Exact,
    Geometric,
    FlatNoise,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothingFlag {
    None,
    Box3,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccelFlag {
    Plain,
    Relaxed,
}

#[derive(Args, Debug, Clone)]
pub struct SketchFlags {
    /// Extra sketch columns beyond the target rank
    #[arg(long, default_value_t = 5)]
    pub oversampling: usize,
    /// Power iterations of the randomized range finder
    #[arg(long, default_value_t = 1)]
    pub power: usize,
    /// Total data passes; selects the pass-efficient path
    #[arg(long)]
    pub passes: Option<usize>,
    /// RNG seed (KTD_SEED env is the default)
    #[arg(long, env = "KTD_SEED", default_value_t = 0)]
    pub seed: u64,
}

impl SketchFlags {
    fn config(&self, rank: usize) -> SketchConfig {
        SketchConfig {
            rank,
            oversampling: self.oversampling,
            power_q: self.power,
            pass_budget: self.passes,
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Tensor extents, e.g. 20,20,20,20
    #[arg(long)]
    pub dims: String,
    /// Block grid, e.g. 4,4,4,4x5,5,5,5
    #[arg(long)]
    pub grid: String,
    /// Number of Kronecker terms
    #[arg(long)]
    pub rank: usize,
    #[arg(long, value_enum, default_value_t = SpectrumFlag::Exact)]
    pub spectrum: SpectrumFlag,
    /// Ratio of the geometric spectrum
    #[arg(long, default_value_t = 0.5)]
    pub ratio: f64,
    /// Magnitude of the trailing terms of the flat-noise spectrum
    #[arg(long, default_value_t = 1e-3)]
    pub noise_level: f64,
    #[arg(long, env = "KTD_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth sigma list destination (default: <out>.sigmas.json)
    #[arg(long)]
    pub sigmas_out: Option<PathBuf>,
    /// Where to append the run record
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Input .ten tensor or binary PGM/PPM image
    pub input: PathBuf,
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, value_enum, default_value_t = MethodFlag::Ktd)]
    pub method: MethodFlag,
    /// Multilinear ranks for ptktd, e.g. 5,5,5,5 (default: rank, clamped)
    #[arg(long)]
    pub ml_ranks: Option<String>,
    #[command(flatten)]
    pub sketch: SketchFlags,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompleteArgs {
    /// Input .ten tensor or binary PGM/PPM image (treated as ground truth
    /// when --missing-frac hides entries)
    pub input: PathBuf,
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, value_enum, default_value_t = MethodFlag::Rktd)]
    pub method: MethodFlag,
    /// Hide this fraction of entries uniformly at random (seeded)
    #[arg(long, conflicts_with = "mask")]
    pub missing_frac: Option<f64>,
    /// Explicit 0/1 mask tensor (.ten)
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = SmoothingFlag::Box3)]
    pub smoothing: SmoothingFlag,
    #[arg(long, value_enum, default_value_t = AccelFlag::Relaxed)]
    pub accel: AccelFlag,
    #[command(flatten)]
    pub sketch: SketchFlags,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DenoiseArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, value_enum, default_value_t = MethodFlag::Rktd)]
    pub method: MethodFlag,
    #[command(flatten)]
    pub sketch: SketchFlags,
    #[arg(long)]
    pub out: PathBuf,
    /// Residual destination (input minus reconstruction)
    #[arg(long)]
    pub residual_out: Option<PathBuf>,
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SuperresArgs {
    /// Full-resolution input; the down-sampling is simulated from it
    pub input: PathBuf,
    #[arg(long)]
    pub grid: String,
    #[arg(long)]
    pub rank: usize,
    /// Keep every k-th pixel along the two leading modes
    #[arg(long)]
    pub downsample: usize,
    #[arg(long, value_enum, default_value_t = MethodFlag::Rktd)]
    pub method: MethodFlag,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = SmoothingFlag::Box3)]
    pub smoothing: SmoothingFlag,
    #[arg(long, value_enum, default_value_t = AccelFlag::Plain)]
    pub accel: AccelFlag,
    #[command(flatten)]
    pub sketch: SketchFlags,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub dims: String,
    #[arg(long)]
    pub grid: String,
    /// Exact rank of the synthetic input tensors
    #[arg(long)]
    pub synth_rank: usize,
    /// Comma-separated methods, e.g. ktd,rktd
    #[arg(long, default_value = "ktd,rktd")]
    pub methods: String,
    /// Comma-separated decomposition ranks
    #[arg(long, default_value = "5,10")]
    pub ranks: String,
    /// Number of seeds (0..n)
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// Timing repetitions per cell
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[command(flatten)]
    pub sketch: SketchFlags,
    /// Worker threads for independent runs
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Print the sweep plan without executing
    #[arg(long)]
    pub dry_run: bool,
    /// Append the record table to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum InputKind {
    Tensor,
    Image,
}

fn load_input(path: &Path) -> Result<(DenseTensor, InputKind)> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("ten") => {
            let t = tensor_core::io::read_tensor(path)
                .map_err(|e| usage(format!("--input: {e}")))?;
            Ok((t, InputKind::Tensor))
        }
        Some("pgm") | Some("ppm") => {
            let (t, _format) = read_image(path)?;
            Ok((t, InputKind::Image))
        }
        other => Err(usage(format!(
            "input {}: unsupported extension {other:?}; expected .ten, .pgm or .ppm",
            path.display()
        ))),
    }
}

fn save_like_input(kind: &InputKind, path: &Path, t: &DenseTensor) -> Result<Vec<u8>> {
    match kind {
        InputKind::Tensor => {
            let bytes = tensor_core::io::to_bytes(t);
            std::fs::write(path, &bytes)
                .map_err(|e| failure(format!("{}: {e}", path.display())))?;
            Ok(bytes)
        }
        InputKind::Image => {
            let bytes = crate::image::image_to_bytes(t)?;
            std::fs::write(path, &bytes)
                .map_err(|e| failure(format!("{}: {e}", path.display())))?;
            Ok(bytes)
        }
    }
}

fn method_of(flag: MethodFlag, passes: Option<usize>) -> DecomposeMethod {
    match (flag, passes) {
        (MethodFlag::Ktd, _) => DecomposeMethod::Deterministic,
        (MethodFlag::Ptktd, _) => DecomposeMethod::TuckerFirst,
        (MethodFlag::Rfktd, _) => DecomposeMethod::PassEfficient,
        // an explicit pass budget routes the plain randomized method through
        // the pass-efficient path
        (MethodFlag::Rktd, Some(_)) => DecomposeMethod::PassEfficient,
        (MethodFlag::Rktd, None) => DecomposeMethod::Randomized,
    }
}

fn method_tag(flag: MethodFlag) -> &'static str {
    match flag {
        MethodFlag::Ktd => "ktd",
        MethodFlag::Rktd => "rktd",
        MethodFlag::Rfktd => "rfktd",
        MethodFlag::Ptktd => "ptktd",
    }
}

fn spectrum_of(flag: SpectrumFlag, ratio: f64, noise_level: f64) -> SpectrumPreset {
    match flag {
        SpectrumFlag::Exact => SpectrumPreset::Exact,
        SpectrumFlag::Geometric => SpectrumPreset::Geometric { ratio },
        SpectrumFlag::FlatNoise => SpectrumPreset::FlatNoise { level: noise_level },
    }
}

fn smoothing_of(flag: SmoothingFlag) -> Smoothing {
    match flag {
        SmoothingFlag::None => Smoothing::None,
        SmoothingFlag::Box3 => Smoothing::Box3 { modes: vec![0, 1] },
    }
}

fn accel_of(flag: AccelFlag) -> Acceleration {
    match flag {
        AccelFlag::Plain => Acceleration::None,
        AccelFlag::Relaxed => Acceleration::relaxed(),
    }
}

/// Uniformly random 0/1 mask keeping `keep` of the entries, seeded.
fn random_mask(dims: &[usize], keep: f64, seed: u64) -> DenseTensor {
    let len: usize = dims.iter().product();
    let draw = randla::gaussian_sketch(len, 1, seed);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| draw[(b, 0)].partial_cmp(&draw[(a, 0)]).unwrap());
    let mut data = vec![0.0; len];
    for &i in order.iter().take((len as f64 * keep).round() as usize) {
        data[i] = 1.0;
    }
    DenseTensor::new(dims.to_vec(), data).expect("mask dims consistent")
}

fn model_metrics(x: &DenseTensor, model: &KtdModel, peak_override: Option<f64>) -> Result<(f64, f64, f64)> {
    let approx = model.reconstruct().map_err(|e| failure(format!("{e}")))?;
    let rel = relative_error(x, &approx).map_err(|e| failure(format!("{e}")))?;
    let peak = peak_override.unwrap_or_else(|| {
        let m = x.data().iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        if m > 0.0 {
            m
        } else {
            1.0
        }
    });
    let psnr_db = psnr(x, &approx, peak).map_err(|e| failure(format!("{e}")))?;
    let ratio = model.storage_scalars() as f64 / x.len() as f64;
    Ok((rel, psnr_db, ratio))
}

fn emit(record: RunRecord, file: Option<&Path>) -> Result<()> {
    println!("{}", record.to_line());
    if let Some(path) = file {
        append_records(path, std::slice::from_ref(&record))?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(args) => run_synth(args),
        Command::Decompose(args) => run_decompose(args),
        Command::Complete(args) => run_complete(args),
        Command::Denoise(args) => run_denoise(args),
        Command::Superres(args) => run_superres(args),
        Command::Bench(args) => run_bench(args),
    }
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let dims = parse_dims(&args.dims).map_err(|e| usage(format!("--dims: {e}")))?;
    let grid = parse_grid(&args.grid)?;
    grid.validate_for(&dims).map_err(|e| usage(format!("--grid: {e}")))?;
    if args.rank == 0 {
        return Err(usage("--rank must be >= 1".to_string()));
    }
    let sigmas = preset_sigmas(
        spectrum_of(args.spectrum, args.ratio, args.noise_level),
        args.rank,
    );
    let start = Instant::now();
    let (x, _truth) = random_ktd_tensor(&grid, &sigmas, args.seed, true)
        .map_err(|e| usage(format!("synthesis: {e}")))?;
    let synth_ms = start.elapsed().as_secs_f64() * 1e3;

    let bytes = tensor_core::io::to_bytes(&x);
    std::fs::write(&args.out, &bytes)
        .map_err(|e| failure(format!("{}: {e}", args.out.display())))?;
    let sigmas_path = args
        .sigmas_out
        .clone()
        .unwrap_or_else(|| args.out.with_extension("sigmas.json"));
    let sigmas_json = serde_json::json!({ "schema": "ktd-sigmas/1", "sigmas": sigmas });
    let sigmas_bytes = serde_json::to_vec(&sigmas_json).expect("sigma list serializes");
    std::fs::write(&sigmas_path, &sigmas_bytes)
        .map_err(|e| failure(format!("{}: {e}", sigmas_path.display())))?;

    let mut record = RunRecord::new("synth", args.seed);
    record.set_config("dims", args.dims.clone());
    record.set_config("grid", args.grid.clone());
    record.set_config("rank", args.rank as u64);
    record.set_config("spectrum", format!("{:?}", args.spectrum).to_lowercase());
    record.set_timing("synth", synth_ms);
    record.set_metric("sigma_max", sigmas[0]);
    record.add_artifact(&args.out, &bytes);
    record.add_artifact(&sigmas_path, &sigmas_bytes);
    emit(record, args.record.as_deref())
}

fn run_decompose(args: DecomposeArgs) -> Result<()> {
    let (x, kind) = load_input(&args.input)?;
    let grid = parse_grid(&args.grid)?;
    grid.validate_for(x.dims()).map_err(|e| usage(format!("--grid: {e}")))?;
    if args.rank == 0 {
        return Err(usage("--rank must be >= 1".to_string()));
    }
    let cfg = args.sketch.config(args.rank);
    let method = method_of(args.method, args.sketch.passes);

    let start = Instant::now();
    let model = match (args.method, &args.ml_ranks) {
        (MethodFlag::Ptktd, Some(spec)) => {
            let ml = parse_dims(spec).map_err(|e| usage(format!("--ml-ranks: {e}")))?;
            pt_ktd(&x, &grid, args.rank, &ml, &cfg).map_err(|e| failure(format!("{e}")))?
        }
        (_, Some(_)) => {
            return Err(usage("--ml-ranks only applies to --method ptktd".to_string()))
        }
        _ => ktd_decompose(&x, &grid, args.rank, method, &cfg)
            .map_err(|e| failure(format!("{e}")))?,
    };
    let total_ms = start.elapsed().as_secs_f64() * 1e3;

    let peak = match kind {
        InputKind::Image => Some(255.0),
        InputKind::Tensor => None,
    };
    let (rel, psnr_db, ratio) = model_metrics(&x, &model, peak)?;

    let bytes = model_to_bytes(&model);
    std::fs::write(&args.out, &bytes)
        .map_err(|e| failure(format!("{}: {e}", args.out.display())))?;

    let mut record = RunRecord::new("decompose", cfg.seed);
    record.set_config("input", args.input.display().to_string());
    record.set_config("grid", args.grid.clone());
    record.set_config("rank", args.rank as u64);
    record.set_config("method", method_tag(args.method));
    record.set_config("method_tag", model.meta.method.tag());
    record.set_config("oversampling", args.sketch.oversampling as u64);
    record.set_config("power", args.sketch.power as u64);
    if let Some(v) = args.sketch.passes {
        record.set_config("passes", v as u64);
    }
    record.set_timing("rearrange", model.meta.timings.rearrange_ms);
    record.set_timing("tucker", model.meta.timings.tucker_ms);
    record.set_timing("factor", model.meta.timings.factor_ms);
    record.set_timing("assemble", model.meta.timings.assemble_ms);
    record.set_timing("total", total_ms);
    record.set_metric("rel_error", rel);
    record.set_metric("psnr_db", psnr_db);
    record.set_metric("compression_ratio", ratio);
    record.set_metric("passes", model.meta.passes as f64);
    record.set_metric("terms", model.num_terms() as f64);
    record.add_artifact(&args.out, &bytes);
    emit(record, args.record.as_deref())
}

#[allow(clippy::too_many_lines)]
fn run_complete(args: CompleteArgs) -> Result<()> {
    let (x, kind) = load_input(&args.input)?;
    let grid = parse_grid(&args.grid)?;
    grid.validate_for(x.dims()).map_err(|e| usage(format!("--grid: {e}")))?;

    let (mask, have_truth) = match (&args.missing_frac, &args.mask) {
        (Some(frac), None) => {
            if !(0.0..1.0).contains(frac) {
                return Err(usage(format!(
                    "--missing-frac must be in [0, 1), got {frac}"
                )));
            }
            (random_mask(x.dims(), 1.0 - frac, args.sketch.seed), true)
        }
        (None, Some(path)) => {
            let m = tensor_core::io::read_tensor(path)
                .map_err(|e| usage(format!("--mask: {e}")))?;
            (m, false)
        }
        (None, None) => {
            return Err(usage(
                "one of --missing-frac or --mask is required".to_string(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    let mut state = CompletionState::new(x.clone(), mask).map_err(|e| usage(format!("{e}")))?;
    if have_truth {
        state = state
            .with_ground_truth(x.clone())
            .map_err(|e| usage(format!("{e}")))?;
    }
    let cfg = CompletionConfig::new(
        grid,
        args.rank,
        method_of(args.method, args.sketch.passes),
        args.sketch.config(args.rank),
    )
    .with_max_iters(args.max_iters)
    .with_tol(args.tol)
    .with_smoothing(smoothing_of(args.smoothing))
    .with_acceleration(accel_of(args.accel));

    let start = Instant::now();
    let restored = complete(&mut state, &cfg).map_err(|e| failure(format!("{e}")))?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;

    let bytes = save_like_input(&kind, &args.out, &restored)?;

    let mut record = RunRecord::new("complete", args.sketch.seed);
    record.set_config("input", args.input.display().to_string());
    record.set_config("grid", args.grid.clone());
    record.set_config("rank", args.rank as u64);
    record.set_config("method", method_tag(args.method));
    if let Some(frac) = args.missing_frac {
        record.set_config("missing_frac", frac);
    }
    record.set_config("max_iters", args.max_iters as u64);
    record.set_config("smoothing", format!("{:?}", args.smoothing).to_lowercase());
    record.set_config("accel", format!("{:?}", args.accel).to_lowercase());
    record.set_timing("total", total_ms);
    record.set_metric("iterations", state.history.len() as f64);
    if let Some(last) = state.history.last() {
        record.set_metric("final_rel_change", last.rel_change);
        if let Some(err) = last.rel_error {
            record.set_metric("held_out_rel_error", err);
        }
    }
    let max_obs_dev = state
        .history
        .iter()
        .map(|s| s.observed_deviation)
        .fold(0.0f64, f64::max);
    record.set_metric("max_observed_deviation", max_obs_dev);
    record.history = Some(
        state
            .history
            .iter()
            .map(|s| IterEntry {
                rel_change: s.rel_change,
                rel_error: s.rel_error,
            })
            .collect(),
    );
    record.add_artifact(&args.out, &bytes);
    emit(record, args.record.as_deref())
}

fn run_denoise(args: DenoiseArgs) -> Result<()> {
    let (x, kind) = load_input(&args.input)?;
    let grid = parse_grid(&args.grid)?;
    grid.validate_for(x.dims()).map_err(|e| usage(format!("--grid: {e}")))?;
    let cfg = args.sketch.config(args.rank);
    let method = method_of(args.method, args.sketch.passes);

    let start = Instant::now();
    let (restored, residual) =
        denoise_op(&x, &grid, args.rank, method, &cfg).map_err(|e| failure(format!("{e}")))?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;

    let bytes = save_like_input(&kind, &args.out, &restored)?;
    let mut record = RunRecord::new("denoise", cfg.seed);
    record.set_config("input", args.input.display().to_string());
    record.set_config("grid", args.grid.clone());
    record.set_config("rank", args.rank as u64);
    record.set_config("method", method_tag(args.method));
    record.set_timing("total", total_ms);
    record.set_metric(
        "residual_fraction",
        residual.frobenius_norm() / x.frobenius_norm().max(f64::MIN_POSITIVE),
    );
    record.add_artifact(&args.out, &bytes);
    if let Some(res_path) = &args.residual_out {
        // the residual is signed, keep it as a tensor regardless of input kind
        let res_bytes = tensor_core::io::to_bytes(&residual);
        std::fs::write(res_path, &res_bytes)
            .map_err(|e| failure(format!("{}: {e}", res_path.display())))?;
        record.add_artifact(res_path, &res_bytes);
    }
    emit(record, args.record.as_deref())
}

fn run_superres(args: SuperresArgs) -> Result<()> {
    let (x, kind) = load_input(&args.input)?;
    let grid = parse_grid(&args.grid)?;
    grid.validate_for(x.dims()).map_err(|e| usage(format!("--grid: {e}")))?;
    if args.downsample == 0 {
        return Err(usage("--downsample must be >= 1".to_string()));
    }
    let mask = downsample_mask(x.dims(), args.downsample).map_err(|e| usage(format!("{e}")))?;
    let observed = mask.data().iter().filter(|&&m| m == 1.0).count();

    let mut state = CompletionState::new(x.clone(), mask).map_err(|e| usage(format!("{e}")))?;
    state = state
        .with_ground_truth(x.clone())
        .map_err(|e| usage(format!("{e}")))?;
    let cfg = CompletionConfig::new(
        grid,
        args.rank,
        method_of(args.method, args.sketch.passes),
        args.sketch.config(args.rank),
    )
    .with_max_iters(args.max_iters)
    .with_tol(args.tol)
    .with_smoothing(smoothing_of(args.smoothing))
    .with_acceleration(accel_of(args.accel));

    let start = Instant::now();
    let restored = super_resolve(&mut state, &cfg).map_err(|e| failure(format!("{e}")))?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;

    let bytes = save_like_input(&kind, &args.out, &restored)?;
    let mut record = RunRecord::new("superres", args.sketch.seed);
    record.set_config("input", args.input.display().to_string());
    record.set_config("grid", args.grid.clone());
    record.set_config("rank", args.rank as u64);
    record.set_config("downsample", args.downsample as u64);
    record.set_config("method", method_tag(args.method));
    record.set_timing("total", total_ms);
    record.set_metric("iterations", state.history.len() as f64);
    record.set_metric("observed_pixels", observed as f64);
    if let Some(last) = state.history.last() {
        if let Some(err) = last.rel_error {
            record.set_metric("held_out_rel_error", err);
        }
    }
    record.history = Some(
        state
            .history
            .iter()
            .map(|s| IterEntry {
                rel_change: s.rel_change,
                rel_error: s.rel_error,
            })
            .collect(),
    );
    record.add_artifact(&args.out, &bytes);
    emit(record, args.record.as_deref())
}

fn parse_methods(spec: &str) -> Result<Vec<MethodFlag>> {
    spec.split(',')
        .map(|tok| match tok.trim() {
            "ktd" => Ok(MethodFlag::Ktd),
            "rktd" => Ok(MethodFlag::Rktd),
            "rfktd" => Ok(MethodFlag::Rfktd),
            "ptktd" => Ok(MethodFlag::Ptktd),
            other => Err(usage(format!("--methods: unknown method {other:?}"))),
        })
        .collect()
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let dims = parse_dims(&args.dims).map_err(|e| usage(format!("--dims: {e}")))?;
    let grid = parse_grid(&args.grid)?;
    grid.validate_for(&dims).map_err(|e| usage(format!("--grid: {e}")))?;
    let methods = parse_methods(&args.methods)?;
    let ranks = parse_dims(&args.ranks).map_err(|e| usage(format!("--ranks: {e}")))?;
    if args.synth_rank == 0 || args.trials == 0 || args.seeds == 0 {
        return Err(usage(
            "--synth-rank, --trials and --seeds must all be >= 1".to_string(),
        ));
    }

    struct Cell {
        method: MethodFlag,
        rank: usize,
        seed: u64,
        trial: usize,
    }
    let mut plan = Vec::new();
    for &method in &methods {
        for &rank in &ranks {
            for seed in 0..args.seeds {
                for trial in 0..args.trials {
                    plan.push(Cell {
                        method,
                        rank,
                        seed,
                        trial,
                    });
                }
            }
        }
    }

    if args.dry_run {
        println!(
            "plan: {} runs over dims {:?} grid {}",
            plan.len(),
            dims,
            args.grid
        );
        for cell in &plan {
            println!(
                "plan: method={} rank={} seed={} trial={}",
                method_tag(cell.method),
                cell.rank,
                cell.seed,
                cell.trial
            );
        }
        return Ok(());
    }

    // one synthetic tensor per seed, shared across the sweep
    let sigmas = preset_sigmas(SpectrumPreset::Exact, args.synth_rank);
    let mut tensors: BTreeMap<u64, DenseTensor> = BTreeMap::new();
    for seed in 0..args.seeds {
        let (x, _) = random_ktd_tensor(&grid, &sigmas, seed, true)
            .map_err(|e| usage(format!("synthesis: {e}")))?;
        tensors.insert(seed, x);
    }

    let run_cell = |cell: &Cell| -> Result<RunRecord> {
        let x = &tensors[&cell.seed];
        let mut cfg = args.sketch.config(cell.rank);
        cfg.seed = cell.seed;
        let method = method_of(cell.method, args.sketch.passes.or(match cell.method {
            MethodFlag::Rfktd => Some(3),
            _ => None,
        }));
        if let (MethodFlag::Rfktd, None) = (cell.method, args.sketch.passes) {
            cfg.pass_budget = Some(3);
        }
        let start = Instant::now();
        let model = ktd_decompose(x, &grid, cell.rank, method, &cfg)
            .map_err(|e| failure(format!("{e}")))?;
        let total_ms = start.elapsed().as_secs_f64() * 1e3;
        let (rel, psnr_db, ratio) = model_metrics(x, &model, None)?;

        let mut record = RunRecord::new("bench", cell.seed);
        record.set_config("method", method_tag(cell.method));
        record.set_config("method_tag", model.meta.method.tag());
        record.set_config("rank", cell.rank as u64);
        record.set_config("trial", cell.trial as u64);
        record.set_config("dims", args.dims.clone());
        record.set_config("grid", args.grid.clone());
        record.set_config("synth_rank", args.synth_rank as u64);
        record.set_timing("factor", model.meta.timings.factor_ms);
        record.set_timing("rearrange", model.meta.timings.rearrange_ms);
        record.set_timing("total", total_ms);
        record.set_metric("rel_error", rel);
        record.set_metric("psnr_db", psnr_db);
        record.set_metric("compression_ratio", ratio);
        record.set_metric("passes", model.meta.passes as f64);
        Ok(record)
    };

    let records: Vec<RunRecord> = if args.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build()
            .map_err(|e| failure(format!("worker pool: {e}")))?;
        let results: Vec<Result<RunRecord>> =
            pool.install(|| {
                use rayon::prelude::*;
                plan.par_iter().map(run_cell).collect()
            });
        results.into_iter().collect::<Result<Vec<_>>>()?
    } else {
        plan.iter().map(run_cell).collect::<Result<Vec<_>>>()?
    };

    for record in &records {
        println!("{}", record.to_line());
    }
    if let Some(path) = &args.out {
        append_records(path, &records)?;
    }
    Ok(())
}
