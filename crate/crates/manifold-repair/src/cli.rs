//! Command-line interface: `generate`, `mlop`, `rmlop`, `detect-holes`,
//! `metrics`, and the `repro` recipes.
//!
//! Every run is deterministic under a fixed `--seed` and independent of
//! `--threads`. Parse and validation problems exit with code 2, numerical
//! aborts with 3, I/O failures with 4.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::holefinder::detect_holes;
use crate::holes::{validate_holes, HoleSpec};
use crate::io::{
    self, read_cloud, read_config, resolve_seed, write_cloud, write_holes, write_report,
    write_run_log_csv, CloudFormat, GeneratorSection, InputSection, RunConfig, SketchSetting,
};
use crate::metrics::compute_report;
use crate::mlop::{run_mlop, OptimizerConfig, RunLog};
use crate::neighborhoods::fill_distance;
use crate::rmlop::{
    init_q_biased, run_rmlop, run_rmlop_from, RepairConfig, RepairOutcome,
    DEFAULT_COVERAGE_GRID_DENSITY,
};
use crate::rng::{DeterministicRng, STREAM_SCAN_SAMPLE};
use crate::synth::{generate, punch_hole, GeneratorSpec};

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints help/version on stdout (success) and usage errors
            // on stderr; the latter are user mistakes → exit 2.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        // Results are bitwise-independent of the pool size; this only caps
        // parallelism. Ignore the error if a pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

#[derive(Parser)]
#[command(
    name = "manifold-repair",
    version = io::version_string(),
    about = "Resample, denoise, and repair manifold point clouds"
)]
struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic surface and write the cloud to a file.
    Generate(GenerateArgs),
    /// Resample/denoise a cloud (no hole filling).
    Mlop(MlopArgs),
    /// Resample with hole repair.
    Rmlop(RmlopArgs),
    /// Locate holes in a cloud and write them as JSON.
    DetectHoles(DetectArgs),
    /// Evaluate a cloud: uniformity, oracle distance, hole coverage.
    Metrics(MetricsArgs),
    /// Run a named end-to-end reproduction recipe.
    Repro(ReproArgs),
}

#[derive(Args)]
struct SourceOpts {
    /// Input cloud file (csv, xyz, or ply).
    #[arg(long)]
    input: Option<PathBuf>,
    /// TOML run configuration (flags override its values).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input format override when the extension is ambiguous.
    #[arg(long)]
    format: Option<String>,
    /// Base RNG seed (also settable via MANIFOLD_REPAIR_SEED).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OptimOpts {
    /// Number of output points.
    #[arg(long)]
    q_count: Option<usize>,
    /// Iteration cap.
    #[arg(long)]
    iters: Option<usize>,
    /// Stop early when the median gradient norm falls below this.
    #[arg(long)]
    grad_tol: Option<f64>,
    /// Sketch dimension: "auto", "off", or an integer.
    #[arg(long = "sketch-m")]
    sketch_m: Option<String>,
    /// Step clip as a multiple of h2.
    #[arg(long)]
    step_clip: Option<f64>,
    /// Log every k-th iteration.
    #[arg(long)]
    log_every: Option<usize>,
}

#[derive(Args)]
struct HoleOpts {
    /// Hole as "c1,..,cn:r" (repeatable).
    #[arg(long = "hole")]
    holes: Vec<String>,
    /// JSON file with an array of {center, radius} holes.
    #[arg(long)]
    holes_json: Option<PathBuf>,
}

#[derive(Args)]
struct RepairOpts {
    /// Skip the plain resampling pre-pass.
    #[arg(long)]
    no_prepass: bool,
    /// Pre-pass iteration count.
    #[arg(long)]
    prepass_iters: Option<usize>,
    /// Hole-band width: points with weight > 1 − eps are "inside".
    #[arg(long)]
    eps_nb: Option<f64>,
    /// Use the published literal balance constants.
    #[arg(long)]
    literal_ck: bool,
    /// Combine multi-hole weights with the literal per-hole min-max rule.
    #[arg(long)]
    literal_multihole: bool,
    /// Probe grid density for per-iteration coverage tracking.
    #[arg(long)]
    coverage_grid: Option<usize>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: SourceOpts,
    /// Surface kind: cylinder2d, cylinder6d, cone, circle, disk, annulus,
    /// plane.
    #[arg(long)]
    kind: Option<String>,
    /// Number of points.
    #[arg(long)]
    count: Option<usize>,
    /// Uniform noise amplitude a for U(−a, a) per coordinate.
    #[arg(long)]
    noise: Option<f64>,
    /// Radius (cylinder2d, cylinder6d, circle, disk).
    #[arg(long)]
    radius: Option<f64>,
    /// Inner radius (annulus).
    #[arg(long)]
    inner: Option<f64>,
    /// Outer radius (annulus).
    #[arg(long)]
    outer: Option<f64>,
    /// Width (plane).
    #[arg(long)]
    width: Option<f64>,
    /// Height (plane).
    #[arg(long)]
    height: Option<f64>,
    /// Ambient dimension.
    #[arg(long)]
    ambient: Option<usize>,
    /// Punch this hole out of the sample, "c1,..,cn:r" (repeatable).
    #[arg(long = "hole")]
    holes: Vec<String>,
    /// Output cloud file.
    #[arg(long, short)]
    output: PathBuf,
    /// Keep only the first three coordinates when writing PLY.
    #[arg(long)]
    ply_project3: bool,
}

#[derive(Args)]
struct MlopArgs {
    #[command(flatten)]
    source: SourceOpts,
    #[command(flatten)]
    optim: OptimOpts,
    /// Output directory for q_final.csv, log.csv, report.json.
    #[arg(long, short, default_value = "mlop-out")]
    output: PathBuf,
}

#[derive(Args)]
struct RmlopArgs {
    #[command(flatten)]
    source: SourceOpts,
    #[command(flatten)]
    optim: OptimOpts,
    #[command(flatten)]
    holes: HoleOpts,
    #[command(flatten)]
    repair: RepairOpts,
    /// Output directory for clouds, weights, log, holes, report.
    #[arg(long, short, default_value = "rmlop-out")]
    output: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    source: SourceOpts,
    #[command(flatten)]
    optim: OptimOpts,
    /// Output directory for holes.json and labels.csv.
    #[arg(long, short, default_value = "detect-out")]
    output: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    source: SourceOpts,
    #[command(flatten)]
    holes: HoleOpts,
    /// Analytic surface to measure distance-to-truth against.
    #[arg(long)]
    oracle: Option<String>,
    /// Probe grid density for hole coverage.
    #[arg(long)]
    grid_density: Option<usize>,
    /// Locality scale for coverage probes (default: fill distance based).
    #[arg(long)]
    h2: Option<f64>,
    /// Report file; prints to stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReproArgs {
    /// Recipe: cylinder2d, cylinder6d, cone-2holes, bunny, dragon-1hole,
    /// dragon-2holes.
    name: String,
    /// Base RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Scan model PLY file (required by bunny/dragon recipes).
    #[arg(long)]
    ply: Option<PathBuf>,
    /// Override the recipe's default hole(s), "c1,..,cn:r" (repeatable).
    #[arg(long = "hole")]
    holes: Vec<String>,
    /// Output directory (default: repro-<name>).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Generate(args) => run_generate(args),
        Command::Mlop(args) => run_mlop_cmd(args),
        Command::Rmlop(args) => run_rmlop_cmd(args),
        Command::DetectHoles(args) => run_detect(args),
        Command::Metrics(args) => run_metrics(args),
        Command::Repro(args) => run_repro(args),
    }
}

// ---------------------------------------------------------------------------
// Flag plumbing
// ---------------------------------------------------------------------------

/// Parses "c1,..,cn:r" into a hole spec.
fn parse_hole_flag(text: &str) -> Result<HoleSpec> {
    let (coords, radius) = text.rsplit_once(':').ok_or_else(|| {
        Error::invalid(format!("--hole needs the form c1,..,cn:r, got '{text}'"))
    })?;
    let center: Vec<f64> = coords
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("--hole: bad coordinate '{t}'")))
        })
        .collect::<Result<_>>()?;
    let radius: f64 = radius
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("--hole: bad radius '{radius}'")))?;
    HoleSpec::new(center, radius)
}

/// Loads the config file (or a default) and applies source flags.
fn merge_source(source: &SourceOpts) -> Result<RunConfig> {
    let mut config = match &source.config {
        Some(path) => read_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(input) = &source.input {
        // An explicit --input replaces whatever source the config declared.
        config.generator = None;
        config.input = Some(InputSection {
            path: input.display().to_string(),
            format: source.format.clone(),
        });
    } else if let (Some(fmt), Some(section)) = (&source.format, config.input.as_mut()) {
        section.format = Some(fmt.clone());
    }
    if config.input.is_none() && config.generator.is_none() {
        return Err(Error::invalid(
            "no input source: pass --input FILE or --config with [input]/[generator]",
        ));
    }
    Ok(config)
}

fn merge_optim(config: &mut RunConfig, optim: &OptimOpts) -> Result<()> {
    if let Some(v) = optim.q_count {
        config.optimizer.q_count = Some(v);
    }
    if let Some(v) = optim.iters {
        config.optimizer.max_iters = Some(v);
    }
    if let Some(v) = optim.grad_tol {
        config.optimizer.grad_tol = Some(v);
    }
    if let Some(text) = &optim.sketch_m {
        let setting = match text.parse::<usize>() {
            Ok(m) => SketchSetting::Dim(m),
            Err(_) => SketchSetting::Named(text.clone()),
        };
        setting.to_mode()?; // validate the spelling now, not at run time
        config.optimizer.sketch = Some(setting);
    }
    if let Some(v) = optim.step_clip {
        config.optimizer.step_clip = Some(v);
    }
    if let Some(v) = optim.log_every {
        config.optimizer.log_every = Some(v);
    }
    Ok(())
}

fn merge_holes(config: &mut RunConfig, holes: &HoleOpts) -> Result<()> {
    if !holes.holes.is_empty() && holes.holes_json.is_some() {
        return Err(Error::invalid("pass either --hole or --holes-json, not both"));
    }
    if !holes.holes.is_empty() {
        let parsed: Vec<HoleSpec> = holes
            .holes
            .iter()
            .map(|t| parse_hole_flag(t))
            .collect::<Result<_>>()?;
        config.holes = Some(parsed);
        config.holes_path = None;
    } else if let Some(path) = &holes.holes_json {
        config.holes = None;
        config.holes_path = Some(path.display().to_string());
    }
    Ok(())
}

fn merge_repair(config: &mut RunConfig, repair: &RepairOpts) {
    if repair.no_prepass {
        config.repair.prepass = Some(false);
    }
    if let Some(v) = repair.prepass_iters {
        config.repair.prepass_iters = Some(v);
    }
    if let Some(v) = repair.eps_nb {
        config.repair.eps_nb = Some(v);
    }
    if repair.literal_ck {
        config.repair.literal_ck = Some(true);
    }
    if repair.literal_multihole {
        config.repair.literal_multihole = Some(true);
    }
    if let Some(v) = repair.coverage_grid {
        config.repair.coverage_grid_density = Some(v);
    }
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)?;
    Ok(())
}

/// Writes a cloud as CSV with one extra trailing column (hole weights,
/// scores, ...), 17 significant digits like every text writer here.
fn write_cloud_with_column(
    cloud: &PointCloud,
    extra: &[f64],
    header: &str,
    path: &Path,
) -> Result<()> {
    if extra.len() != cloud.count() {
        return Err(Error::invalid(format!(
            "extra column has {} values for {} points",
            extra.len(),
            cloud.count()
        )));
    }
    let n = cloud.ambient_dim();
    let mut out = String::new();
    for i in 0..n {
        out.push_str(&format!("x{i},"));
    }
    out.push_str(header);
    out.push('\n');
    for (p, v) in cloud.iter_points().zip(extra) {
        for c in p {
            out.push_str(&format!("{c:.16e},"));
        }
        out.push_str(&format!("{v:.16e}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Shared tail of `mlop`/`rmlop`: write clouds, log, optional weights, and
/// the metrics report.
#[allow(clippy::too_many_arguments)]
fn write_run_artifacts(
    outdir: &Path,
    config: &RunConfig,
    p: &PointCloud,
    q: &PointCloud,
    log: &RunLog,
    tau: Option<&[f64]>,
    holes: &[HoleSpec],
    grid_density: usize,
) -> Result<()> {
    ensure_dir(outdir)?;
    write_cloud(p, &outdir.join("p.csv"), Some(CloudFormat::Csv), false)?;
    write_cloud(q, &outdir.join("q_final.csv"), Some(CloudFormat::Csv), false)?;
    write_run_log_csv(log, &outdir.join("log.csv"))?;
    if let Some(tau) = tau {
        write_cloud_with_column(q, tau, "tau", &outdir.join("tau.csv"))?;
    }
    if !holes.is_empty() {
        write_holes(holes, &outdir.join("holes.json"))?;
    }
    let oracle = config.oracle_kind()?;
    let report = compute_report(q, oracle.as_ref(), holes, grid_density, None, Some(log))?;
    write_report(&report, config, &outdir.join("report.json"))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_generate(args: GenerateArgs) -> Result<()> {
    let mut config = match &args.source.config {
        Some(path) => read_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(kind) = &args.kind {
        let count = args.count.or(config.generator.as_ref().map(|g| g.count));
        let count =
            count.ok_or_else(|| Error::invalid("generate needs --count with --kind"))?;
        config.input = None;
        config.generator = Some(GeneratorSection {
            kind: kind.clone(),
            count,
            noise: args.noise,
            radius: args.radius,
            inner: args.inner,
            outer: args.outer,
            width: args.width,
            height: args.height,
            ambient: args.ambient,
            punch: args
                .holes
                .iter()
                .map(|t| parse_hole_flag(t))
                .collect::<Result<_>>()?,
        });
    } else if !args.holes.is_empty() {
        if let Some(gen) = &mut config.generator {
            gen.punch = args
                .holes
                .iter()
                .map(|t| parse_hole_flag(t))
                .collect::<Result<_>>()?;
        }
    }
    let gen = config
        .generator
        .clone()
        .ok_or_else(|| Error::invalid("generate needs --kind or a [generator] config"))?;
    let seed = resolve_seed(args.source.seed, config.seed)?;
    let cloud = generate(&gen.to_spec(seed)?)?;
    let format = args
        .source
        .format
        .as_deref()
        .map(CloudFormat::from_name)
        .transpose()?;
    write_cloud(&cloud, &args.output, format, args.ply_project3)?;
    println!(
        "wrote {} points (n = {}) to {}",
        cloud.count(),
        cloud.ambient_dim(),
        args.output.display()
    );
    Ok(())
}

fn run_mlop_cmd(args: MlopArgs) -> Result<()> {
    let mut config = merge_source(&args.source)?;
    merge_optim(&mut config, &args.optim)?;
    let seed = resolve_seed(args.source.seed, config.seed)?;
    let p = config.load_cloud(seed)?;
    let optimizer = config.optimizer_config(None, seed)?;
    let (q, log) = run_mlop(&p, &optimizer)?;
    write_run_artifacts(
        &args.output,
        &config,
        &p,
        &q,
        &log,
        None,
        &[],
        DEFAULT_COVERAGE_GRID_DENSITY,
    )?;
    println!(
        "mlop: {} -> {} points in {} iterations; artifacts in {}",
        p.count(),
        q.count(),
        log.records.last().map(|r| r.iteration + 1).unwrap_or(0),
        args.output.display()
    );
    Ok(())
}

fn run_rmlop_cmd(args: RmlopArgs) -> Result<()> {
    let mut config = merge_source(&args.source)?;
    merge_optim(&mut config, &args.optim)?;
    merge_holes(&mut config, &args.holes)?;
    merge_repair(&mut config, &args.repair);
    let seed = resolve_seed(args.source.seed, config.seed)?;
    let p = config.load_cloud(seed)?;
    let holes = config.load_holes(&p)?;
    let repair = config.repair_config(None, seed)?;
    let outcome = run_rmlop(&p, &holes, &repair)?;
    let tau = outcome.weights.as_ref().map(|w| w.tau_bar.as_slice());
    write_run_artifacts(
        &args.output,
        &config,
        &p,
        &outcome.q,
        &outcome.log,
        tau,
        &holes,
        repair.coverage_grid_density,
    )?;
    println!(
        "rmlop: {} holes, {} -> {} points; artifacts in {}",
        holes.len(),
        p.count(),
        outcome.q.count(),
        args.output.display()
    );
    Ok(())
}

fn run_detect(args: DetectArgs) -> Result<()> {
    let mut config = merge_source(&args.source)?;
    merge_optim(&mut config, &args.optim)?;
    let seed = resolve_seed(args.source.seed, config.seed)?;
    let p = config.load_cloud(seed)?;
    let optimizer = config.optimizer_config(None, seed)?;
    let detection = detect_holes(&p, &optimizer)?;
    ensure_dir(&args.output)?;
    write_holes(&detection.holes, &args.output.join("holes.json"))?;
    // Labels as numeric codes next to the scores so external tools can
    // color the cloud: 0 interior, 1 manifold boundary, 2 hole boundary,
    // 3 outlier.
    let codes: Vec<f64> = detection
        .classification
        .labels
        .iter()
        .map(|l| *l as u8 as f64)
        .collect();
    write_cloud_with_column(
        &detection.q,
        &codes,
        "label",
        &args.output.join("labels.csv"),
    )?;
    write_cloud_with_column(
        &detection.q,
        &detection.classification.scores,
        "score",
        &args.output.join("scores.csv"),
    )?;
    write_run_log_csv(&detection.log, &args.output.join("log.csv"))?;
    println!(
        "detect-holes: {} hole(s); artifacts in {}",
        detection.holes.len(),
        args.output.display()
    );
    for (k, hole) in detection.holes.iter().enumerate() {
        println!(
            "  hole {k}: radius {:.4} at [{}]",
            hole.radius,
            hole.center
                .iter()
                .map(|c| format!("{c:.4}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    Ok(())
}

fn run_metrics(args: MetricsArgs) -> Result<()> {
    let mut config = merge_source(&args.source)?;
    merge_holes(&mut config, &args.holes)?;
    if let Some(oracle) = &args.oracle {
        config.metrics.oracle = Some(oracle.clone());
    }
    if let Some(v) = args.grid_density {
        config.metrics.grid_density = Some(v);
    }
    let seed = resolve_seed(args.source.seed, config.seed)?;
    let cloud = config.load_cloud(seed)?;
    let holes = config.load_holes(&cloud)?;
    let oracle = config.oracle_kind()?;
    let grid = config
        .metrics
        .grid_density
        .unwrap_or(DEFAULT_COVERAGE_GRID_DENSITY);
    let report = compute_report(&cloud, oracle.as_ref(), &holes, grid, args.h2, None)?;
    match &args.output {
        Some(path) => {
            write_report(&report, &config, path)?;
            println!("wrote report to {}", path.display());
        }
        None => {
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::invalid(format!("cannot serialize report: {e}")))?;
            println!("{text}");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Reproduction recipes
// ---------------------------------------------------------------------------

/// A fully assembled experiment: inputs, holes, and optimizer settings.
#[derive(Debug)]
pub struct Recipe {
    /// Recipe name as given on the command line.
    pub name: String,
    /// The (noisy, punched) input cloud.
    pub p: PointCloud,
    /// Hole specifications for the repair phase.
    pub holes: Vec<HoleSpec>,
    /// Full repair settings (seeded).
    pub config: RepairConfig,
    /// Sample `Q₀` with probability ∝ 1 + τ̄ instead of uniformly
    /// (slightly densifies the rim on the scan recipes).
    pub biased_init: bool,
    /// Echo of the source for the report.
    pub run_config: RunConfig,
}

/// Fixed parameters of the synthetic recipes: counts, iterations, noise,
/// and hole sizes relative to the sampled cloud's fill distance.
struct SynthRecipe {
    kind_name: &'static str,
    j: usize,
    i: usize,
    iters: usize,
    noise: f64,
    /// Hole radii as multiples of the fill distance, one per hole.
    hole_h0: &'static [f64],
    /// Parameter-space centers, one per hole.
    hole_params: &'static [&'static [f64]],
}

const PI: f64 = std::f64::consts::PI;

const CYLINDER2D_RECIPE: SynthRecipe = SynthRecipe {
    kind_name: "cylinder2d",
    j: 790,
    i: 230,
    iters: 70,
    noise: 0.1,
    hole_h0: &[6.0],
    // Mid-parameters: t = 1 of [0, 2], u = 0.8π of [0.1π, 1.5π].
    hole_params: &[&[1.0, 0.8 * PI]],
};

const CYLINDER6D_RECIPE: SynthRecipe = SynthRecipe {
    kind_name: "cylinder6d",
    j: 1180,
    i: 460,
    iters: 100,
    noise: 0.2,
    hole_h0: &[6.0],
    // Mid-parameters: t = 1, all five angles at 0.35π of [0.1π, 0.6π].
    hole_params: &[&[1.0, 0.35 * PI, 0.35 * PI, 0.35 * PI, 0.35 * PI, 0.35 * PI]],
};

const CONE_RECIPE: SynthRecipe = SynthRecipe {
    kind_name: "cone",
    j: 850,
    i: 140,
    iters: 200,
    noise: 0.2,
    hole_h0: &[4.0, 4.0],
    // Two well-separated spots: near both ends of the axis, opposite
    // angular sides, on the wide (small-R) part of the shell family.
    hole_params: &[&[0.4, 0.5, 0.4 * PI], &[1.6, 0.5, 1.2 * PI]],
};

/// Number of points to sample from a scan model before punching.
const SCAN_P_COUNT: usize = 1000;
/// Q budget of the scan recipes.
const SCAN_Q_COUNT: usize = 350;
/// Repair iterations of the scan recipes.
const SCAN_ITERS: usize = 30;
/// Scan hole radius as a multiple of the sampled cloud's fill distance.
const SCAN_HOLE_H0: f64 = 4.0;

/// Builds one of the named recipes. Scan recipes (`bunny`, `dragon-*`)
/// require a PLY path; `hole_overrides` replaces the default hole
/// placement when non-empty.
pub fn build_recipe(
    name: &str,
    seed: u64,
    ply: Option<&Path>,
    hole_overrides: &[HoleSpec],
) -> Result<Recipe> {
    match name {
        "cylinder2d" => build_synth_recipe(name, &CYLINDER2D_RECIPE, seed, hole_overrides),
        "cylinder6d" => build_synth_recipe(name, &CYLINDER6D_RECIPE, seed, hole_overrides),
        "cone-2holes" => build_synth_recipe(name, &CONE_RECIPE, seed, hole_overrides),
        "bunny" | "dragon-1hole" | "dragon-2holes" => {
            let ply = ply.ok_or_else(|| {
                Error::invalid(format!("recipe '{name}' needs --ply PATH to a scan model"))
            })?;
            build_scan_recipe(name, ply, seed, hole_overrides)
        }
        other => Err(Error::invalid(format!(
            "unknown recipe '{other}' (expected cylinder2d, cylinder6d, cone-2holes, \
             bunny, dragon-1hole, or dragon-2holes)"
        ))),
    }
}

fn base_config(q_count: usize, iters: usize, seed: u64) -> RepairConfig {
    let mut base = OptimizerConfig::new(q_count);
    base.max_iters = iters;
    base.seed = seed;
    RepairConfig::new(base)
}

fn build_synth_recipe(
    name: &str,
    recipe: &SynthRecipe,
    seed: u64,
    hole_overrides: &[HoleSpec],
) -> Result<Recipe> {
    let section = GeneratorSection {
        kind: recipe.kind_name.to_string(),
        count: recipe.j,
        noise: Some(recipe.noise),
        ..GeneratorSection::default()
    };
    let kind = section.surface_kind()?;
    let spec = GeneratorSpec {
        kind: kind.clone(),
        count: recipe.j,
        noise: recipe.noise,
        seed,
        holes: Vec::new(),
    };
    let sampled = generate(&spec)?;
    // Hole radii are multiples of the *noise-free* sample's fill distance.
    // In R^60 the per-coordinate noise dominates nearest-neighbor
    // distances (‖Δnoise‖ ≈ a·√(2n/3) ≈ 0.6 here), and a hole sized by the
    // noisy fill distance would sever the surface instead of puncturing
    // it. The clean sample shares the parameter draws, so its fill
    // distance measures the actual sampling resolution.
    let clean = generate(&GeneratorSpec {
        kind: kind.clone(),
        count: recipe.j,
        noise: 0.0,
        seed,
        holes: Vec::new(),
    })?;
    let h0 = fill_distance(&clean)?;

    let holes: Vec<HoleSpec> = if hole_overrides.is_empty() {
        recipe
            .hole_params
            .iter()
            .zip(recipe.hole_h0)
            .map(|(params, factor)| {
                let center = kind.surface_point(params)?;
                HoleSpec::new(center, factor * h0)
            })
            .collect::<Result<_>>()?
    } else {
        hole_overrides.to_vec()
    };
    validate_holes(&holes, &sampled)?;

    let mut p = sampled;
    for hole in &holes {
        p = punch_hole(&p, hole)?;
    }
    if p.count() < recipe.i {
        return Err(Error::insufficient(format!(
            "punching left {} points, fewer than q_count {}",
            p.count(),
            recipe.i
        )));
    }

    let run_config = RunConfig {
        seed: Some(seed),
        generator: Some(section),
        holes: Some(holes.clone()),
        ..RunConfig::default()
    };
    Ok(Recipe {
        name: name.to_string(),
        p,
        holes,
        config: base_config(recipe.i, recipe.iters, seed),
        biased_init: false,
        run_config,
    })
}

/// Deterministic stand-ins for the scan recipes' documented hole spots
/// ("neck", "head", "tail"): the sampled point farthest from the centroid,
/// and for a second hole the point farthest from the first. Extremities of
/// a scan are exactly these maximizers, and the choice needs no model
/// knowledge.
fn extremal_hole_centers(cloud: &PointCloud, n_holes: usize) -> Vec<Vec<f64>> {
    let n = cloud.ambient_dim();
    let mut centroid = vec![0.0; n];
    for p in cloud.iter_points() {
        for (c, v) in centroid.iter_mut().zip(p) {
            *c += v;
        }
    }
    for c in &mut centroid {
        *c /= cloud.count() as f64;
    }
    let farthest_from = |target: &[f64]| -> Vec<f64> {
        cloud
            .iter_points()
            .max_by(|a, b| {
                let da: f64 = a.iter().zip(target).map(|(x, t)| (x - t) * (x - t)).sum();
                let db: f64 = b.iter().zip(target).map(|(x, t)| (x - t) * (x - t)).sum();
                da.partial_cmp(&db).expect("finite coordinates")
            })
            .expect("nonempty cloud")
            .to_vec()
    };
    let first = farthest_from(&centroid);
    let mut centers = vec![first.clone()];
    if n_holes > 1 {
        centers.push(farthest_from(&first));
    }
    centers
}

fn build_scan_recipe(
    name: &str,
    ply: &Path,
    seed: u64,
    hole_overrides: &[HoleSpec],
) -> Result<Recipe> {
    let scan = read_cloud(ply, None)?;
    let sampled = if scan.count() > SCAN_P_COUNT {
        let mut rng = DeterministicRng::new(seed, STREAM_SCAN_SAMPLE);
        let mut idx = rng.sample_indices(scan.count(), SCAN_P_COUNT);
        idx.sort_unstable();
        scan.select(&idx)?
    } else {
        scan
    };
    let h0 = fill_distance(&sampled)?;

    let n_holes = if name == "dragon-2holes" { 2 } else { 1 };
    let holes: Vec<HoleSpec> = if hole_overrides.is_empty() {
        extremal_hole_centers(&sampled, n_holes)
            .into_iter()
            .map(|c| HoleSpec::new(c, SCAN_HOLE_H0 * h0))
            .collect::<Result<_>>()?
    } else {
        hole_overrides.to_vec()
    };
    validate_holes(&holes, &sampled)?;

    let mut p = sampled;
    for hole in &holes {
        p = punch_hole(&p, hole)?;
    }
    if p.count() < SCAN_Q_COUNT {
        return Err(Error::insufficient(format!(
            "punching left {} points, fewer than q_count {}",
            p.count(),
            SCAN_Q_COUNT
        )));
    }

    let run_config = RunConfig {
        seed: Some(seed),
        input: Some(InputSection {
            path: ply.display().to_string(),
            format: Some("ply".to_string()),
        }),
        holes: Some(holes.clone()),
        ..RunConfig::default()
    };
    Ok(Recipe {
        name: name.to_string(),
        p,
        holes,
        config: base_config(SCAN_Q_COUNT, SCAN_ITERS, seed),
        biased_init: true,
        run_config,
    })
}

/// Runs a built recipe to completion.
pub fn execute_recipe(recipe: &Recipe) -> Result<(PointCloud, RepairOutcome)> {
    let q0 = if recipe.biased_init {
        init_q_biased(
            &recipe.p,
            recipe.config.base.q_count,
            &recipe.holes,
            recipe.config.eps_nb,
            recipe.config.literal_multihole,
            recipe.config.base.seed,
        )?
    } else {
        crate::mlop::init_q(
            &recipe.p,
            recipe.config.base.q_count,
            recipe.config.base.seed,
        )?
    };
    let outcome = run_rmlop_from(&recipe.p, q0.clone(), &recipe.holes, &recipe.config)?;
    Ok((q0, outcome))
}

fn run_repro(args: ReproArgs) -> Result<()> {
    let seed = resolve_seed(args.seed, None)?;
    let overrides: Vec<HoleSpec> = args
        .holes
        .iter()
        .map(|t| parse_hole_flag(t))
        .collect::<Result<_>>()?;
    let recipe = build_recipe(&args.name, seed, args.ply.as_deref(), &overrides)?;
    let outdir = args
        .output
        .unwrap_or_else(|| PathBuf::from(format!("repro-{}", recipe.name)));
    let (q0, outcome) = execute_recipe(&recipe)?;

    ensure_dir(&outdir)?;
    write_cloud(&q0, &outdir.join("q0.csv"), Some(CloudFormat::Csv), false)?;
    let tau = outcome.weights.as_ref().map(|w| w.tau_bar.as_slice());
    write_run_artifacts(
        &outdir,
        &recipe.run_config,
        &recipe.p,
        &outcome.q,
        &outcome.log,
        tau,
        &recipe.holes,
        recipe.config.coverage_grid_density,
    )?;
    let coverage_first = outcome
        .log
        .records
        .first()
        .map(|r| r.hole_coverage.clone())
        .unwrap_or_default();
    let coverage_last = outcome
        .log
        .records
        .last()
        .map(|r| r.hole_coverage.clone())
        .unwrap_or_default();
    println!(
        "repro {}: {} holes, J = {}, I = {}; coverage {:?} -> {:?}; artifacts in {}",
        recipe.name,
        recipe.holes.len(),
        recipe.p.count(),
        outcome.q.count(),
        coverage_first,
        coverage_last,
        outdir.display()
    );
    Ok(())
}

/// Used by tests to confirm every subcommand carries help text.
pub fn debug_assert_help() {
    Cli::command().debug_assert();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        debug_assert_help();
    }

    #[test]
    fn hole_flag_parses_center_and_radius() {
        let hole = parse_hole_flag("1.0,2.5,-3:0.75").unwrap();
        assert_eq!(hole.center, vec![1.0, 2.5, -3.0]);
        assert_eq!(hole.radius, 0.75);
        assert!(parse_hole_flag("1.0,2.5").is_err(), "missing radius");
        assert!(parse_hole_flag("a,b:1").is_err(), "bad coords");
        assert!(parse_hole_flag("1,2:zero").is_err(), "bad radius");
        assert!(parse_hole_flag("1,2:-1").is_err(), "negative radius");
    }

    #[test]
    fn unknown_recipes_are_rejected() {
        let err = build_recipe("teapot", 1, None, &[]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("teapot"));
    }

    #[test]
    fn scan_recipes_require_a_ply_path() {
        for name in ["bunny", "dragon-1hole", "dragon-2holes"] {
            let err = build_recipe(name, 1, None, &[]).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{name}");
            assert!(err.to_string().contains("--ply"), "{name}: {err}");
        }
    }

    #[test]
    fn synthetic_recipes_pin_the_published_budgets() {
        let r = build_recipe("cylinder2d", 7, None, &[]).unwrap();
        assert_eq!(r.config.base.q_count, 230);
        assert_eq!(r.config.base.max_iters, 70);
        assert_eq!(r.holes.len(), 1);
        assert!(r.p.count() <= 790, "punching removes points");
        assert!(r.p.count() >= 700, "hole should not swallow the cloud");
        assert_eq!(r.p.ambient_dim(), 60);

        let r = build_recipe("cone-2holes", 7, None, &[]).unwrap();
        assert_eq!(r.config.base.q_count, 140);
        assert_eq!(r.config.base.max_iters, 200);
        assert_eq!(r.holes.len(), 2);
        let sep: f64 = r.holes[0]
            .center
            .iter()
            .zip(&r.holes[1].center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(
            sep > r.holes[0].radius + r.holes[1].radius,
            "holes must be disjoint: separation {sep}"
        );

        let r = build_recipe("cylinder6d", 7, None, &[]).unwrap();
        assert_eq!((r.config.base.q_count, r.config.base.max_iters), (460, 100));
        assert!(r.p.count() <= 1180);
    }

    #[test]
    fn extremal_centers_pick_opposite_ends() {
        // A dumbbell: two blobs far apart; hole 1 lands in one blob and
        // hole 2 in the other.
        let mut rows = Vec::new();
        for k in 0..20 {
            let t = k as f64 * 0.01;
            rows.push(vec![t, 0.0]);
            rows.push(vec![10.0 + t, 0.0]);
        }
        let cloud = PointCloud::from_rows(&rows).unwrap();
        let centers = extremal_hole_centers(&cloud, 2);
        assert_eq!(centers.len(), 2);
        let gap = (centers[0][0] - centers[1][0]).abs();
        assert!(gap > 9.0, "ends should be in different blobs: {centers:?}");
    }
}
