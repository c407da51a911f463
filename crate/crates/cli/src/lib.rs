//! Command-line front end for synthesizing and certifying polyhedral
//! invariant sets of switched linear systems from sampled trajectories.
//!
//! Every command that writes an artifact also writes `<out>.manifest.json`,
//! which `polyinv replay` uses to rerun the command and check the outputs.

pub mod manifest;
pub mod render;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyinv_core::certify::{contraction_certificate, scenario_certificate};
use polyinv_core::experiments::{
    bench_row, bound_curves, row_seed, BenchConfig, BenchRow, CurveConfig, Grid, DEFAULT_EPSILON_GRID,
};
use polyinv_core::geometry::{MAX_DIM, MIN_DIM};
use polyinv_core::invariance::{data_driven_invariant_set, IterationConfig, IterationTrace};
use polyinv_core::system::{generate_stable_system, sample_observations, CERTIFICATE_PRODUCT_LENGTH};
use polyinv_core::{Error, Polytope, RandomSource, Result, SampleSet, SwitchedLinearSystem};
use serde::Serialize;

use manifest::{output_digest, OutputRecord, RunManifest};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "polyinv", version, about = "Data-driven invariant sets for switched linear systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random stable switched system.
    GenSystem(GenSystemArgs),
    /// Draw observation pairs from a system.
    Sample(SampleArgs),
    /// Compute the sample-based invariant set.
    Synthesize(SynthesizeArgs),
    /// Certify a contraction rate for a polytope.
    Certify(CertifyArgs),
    /// Compare sample-based and model-based sets over a grid of (n, M).
    BenchTable(BenchTableArgs),
    /// Contraction-rate curves of both certificates against the sample count.
    BoundCurves(BoundCurvesArgs),
    /// Draw planar polytopes as SVG.
    Render(RenderArgs),
    /// Rerun a recorded command and check its outputs are unchanged.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenSystemArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub modes: usize,
    #[arg(long, default_value_t = 0.95)]
    pub decay: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long = "N")]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct IterationArgs {
    /// Stopping tolerance on the largest proposed gauge.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Initial polytope (default: the unit hypercube).
    #[arg(long)]
    pub init: Option<PathBuf>,
}

impl IterationArgs {
    fn config(&self) -> IterationConfig {
        IterationConfig {
            tolerance: self.tol,
            max_iterations: self.max_iter,
            record_iterates: false,
        }
    }

    fn initial(&self, n: usize) -> Result<Polytope> {
        match &self.init {
            Some(path) => {
                let p = Polytope::load(path)?;
                if p.dim() != n {
                    return Err(Error::Dimension { expected: n, found: p.dim() });
                }
                Ok(p)
            }
            None => Polytope::unit_box(n),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SynthesizeArgs {
    #[arg(long)]
    pub samples: PathBuf,
    #[command(flatten)]
    pub iteration: IterationArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Trace CSV path (default: `<out>.trace.csv`).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMode {
    Contraction,
    Scenario,
}

#[derive(Debug, Args, Serialize)]
pub struct CertifyArgs {
    #[arg(long)]
    pub polytope: PathBuf,
    #[arg(long, value_enum)]
    pub mode: CertifyMode,
    /// Violation level of the contraction certificate.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.001)]
    pub beta: f64,
    /// Sample count of the contraction certificate (default: size of `--samples`).
    #[arg(long = "N")]
    pub count: Option<u64>,
    /// Mode count of the contraction certificate (default: from `--samples`).
    #[arg(long)]
    pub modes: Option<usize>,
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[command(flatten)]
    pub iteration: IterationArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchTableArgs {
    #[arg(long, default_value = "2,3,4")]
    pub dims: String,
    #[arg(long, default_value = "4,6")]
    pub modes: String,
    #[arg(long = "N", default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.95)]
    pub decay: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundCurvesArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub modes: usize,
    #[arg(long, default_value_t = 0.001)]
    pub beta: f64,
    /// Comma-separated violation levels, each converted to a sample count.
    #[arg(long, conflicts_with = "n_grid")]
    pub eps_grid: Option<String>,
    /// Comma-separated sample counts.
    #[arg(long = "N-grid")]
    pub n_grid: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.95)]
    pub decay: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct RenderArgs {
    /// Polytope JSON files, drawn in order (repeatable).
    #[arg(long, required = true)]
    pub polytope: Vec<PathBuf>,
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

/// Process exit code of an error: 2 usage, input or replay mismatch,
/// 3 nonconvergence, 4 numerical failure.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Argument(_) | Error::Dimension { .. } | Error::Validation(_) | Error::Parse(_) | Error::Io(_) => 2,
        Error::Nonconvergence { .. } => 3,
        Error::Numerical(_) | Error::Degeneracy(_) => 4,
    }
}

/// Parses `args` (without the program name), runs the command, reports errors
/// on stderr and returns the exit code.
pub fn main_with_args(args: &[String]) -> u8 {
    let argv = std::iter::once("polyinv".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    match run(cli.command, args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command. `argv` is recorded in the manifest.
pub fn run(command: Command, argv: &[String]) -> Result<()> {
    let start = Instant::now();
    let (name, flags, record) = match &command {
        Command::GenSystem(a) => ("gen-system", to_flags(a)?, gen_system(a)?),
        Command::Sample(a) => ("sample", to_flags(a)?, sample(a)?),
        Command::Synthesize(a) => ("synthesize", to_flags(a)?, synthesize(a)?),
        Command::Certify(a) => ("certify", to_flags(a)?, certify(a)?),
        Command::BenchTable(a) => ("bench-table", to_flags(a)?, bench_table(a)?),
        Command::BoundCurves(a) => ("bound-curves", to_flags(a)?, bound_curves_cmd(a)?),
        Command::Render(a) => ("render", to_flags(a)?, render(a)?),
        Command::Replay(a) => return replay(a),
    };
    let outputs = record
        .outputs
        .iter()
        .map(|p| {
            Ok(OutputRecord {
                path: p.clone(),
                sha256: output_digest(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        command: name.to_string(),
        argv: argv.to_vec(),
        flags,
        seed: record.seed,
        inputs: record.inputs,
        outputs,
        tool_version: TOOL_VERSION.to_string(),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    manifest.save(&RunManifest::path_for(&record.outputs[0]))
}

struct Produced {
    seed: Option<u64>,
    inputs: Vec<PathBuf>,
    /// The first entry names the manifest.
    outputs: Vec<PathBuf>,
}

fn to_flags<T: Serialize>(args: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(args)?)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn gen_system(a: &GenSystemArgs) -> Result<Produced> {
    let sys = generate_stable_system(a.n, a.modes, a.decay, &mut RandomSource::new(a.seed))?;
    sys.save(&a.out)?;
    let bound = sys.product_norm_bound(CERTIFICATE_PRODUCT_LENGTH).powf(1.0 / CERTIFICATE_PRODUCT_LENGTH as f64);
    println!("certified decay bound: {bound:.6}");
    Ok(Produced {
        seed: Some(a.seed),
        inputs: vec![],
        outputs: vec![a.out.clone()],
    })
}

fn sample(a: &SampleArgs) -> Result<Produced> {
    let sys = SwitchedLinearSystem::load(&a.system)?;
    let set = sample_observations(&sys, a.count, &mut RandomSource::new(a.seed))?;
    set.save(&a.out)?;
    println!("pairs: {}", set.len());
    Ok(Produced {
        seed: Some(a.seed),
        inputs: vec![a.system.clone()],
        outputs: vec![a.out.clone()],
    })
}

fn trace_path(a: &SynthesizeArgs) -> PathBuf {
    a.trace.clone().unwrap_or_else(|| {
        let mut name = a.out.as_os_str().to_owned();
        name.push(".trace.csv");
        PathBuf::from(name)
    })
}

fn synthesize(a: &SynthesizeArgs) -> Result<Produced> {
    let samples = SampleSet::load(&a.samples)?;
    let initial = a.iteration.initial(samples.dim())?;
    let cfg = a.iteration.config();
    let trace_out = trace_path(a);
    let (set, trace) = match data_driven_invariant_set(&samples, &initial, &cfg) {
        Ok(done) => done,
        Err(Error::Nonconvergence { iterations, trace }) => {
            write_text(&trace_out, &trace.to_csv())?;
            eprintln!("trace written to {}", trace_out.display());
            return Err(Error::Nonconvergence { iterations, trace });
        }
        Err(e) => return Err(e),
    };
    set.save(&a.out)?;
    write_text(&trace_out, &trace.to_csv())?;
    report_iteration(&trace, &set);
    let mut inputs = vec![a.samples.clone()];
    inputs.extend(a.iteration.init.clone());
    Ok(Produced {
        seed: Some(samples.seed()),
        inputs,
        outputs: vec![a.out.clone(), trace_out],
    })
}

fn report_iteration(trace: &IterationTrace, set: &Polytope) {
    println!("iterations: {}", trace.iterations());
    println!("vertices: {}", set.vertices().len());
}

fn certify(a: &CertifyArgs) -> Result<Produced> {
    let polytope = Polytope::load(&a.polytope)?;
    let samples = a.samples.as_ref().map(SampleSet::load).transpose()?;
    let mut inputs = vec![a.polytope.clone()];
    inputs.extend(a.samples.clone());
    let json = match a.mode {
        CertifyMode::Contraction => {
            let epsilon = a
                .epsilon
                .ok_or_else(|| Error::Argument("contraction mode needs --epsilon".into()))?;
            let count = a
                .count
                .or(samples.as_ref().map(|s| s.len() as u64))
                .ok_or_else(|| Error::Argument("contraction mode needs --N or --samples".into()))?;
            let modes = a
                .modes
                .or(samples.as_ref().map(SampleSet::mode_count))
                .ok_or_else(|| Error::Argument("contraction mode needs --modes or --samples".into()))?;
            let cert = contraction_certificate(&polytope, epsilon, count, modes)?;
            match cert.lambda() {
                Some(l) => println!("contraction rate: {l:.6}"),
                None => println!("inconclusive"),
            }
            cert.to_json()?
        }
        CertifyMode::Scenario => {
            let samples = samples.ok_or_else(|| Error::Argument("scenario mode needs --samples".into()))?;
            inputs.extend(a.iteration.init.clone());
            let initial = a.iteration.initial(samples.dim())?;
            let cert = scenario_certificate(&samples, &initial, &a.iteration.config(), a.beta)?;
            if !cert.set.same_vertices(&polytope, 1e-9) {
                return Err(Error::Validation(format!(
                    "{} is not the set synthesized from {}",
                    a.polytope.display(),
                    a.samples.as_ref().unwrap().display()
                )));
            }
            println!("supporting pairs: {}", cert.support_count());
            println!("almost-invariance level: {:.6}", cert.almost_invariance_level);
            match cert.lambda_epsilon() {
                Some(l) => println!("contraction rate: {l:.6}"),
                None => println!("vacuous"),
            }
            cert.to_json()?
        }
    };
    write_text(&a.out, &format!("{json}\n"))?;
    Ok(Produced {
        seed: None,
        inputs,
        outputs: vec![a.out.clone()],
    })
}

fn parse_list<T: std::str::FromStr>(flag: &str, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::Argument(format!("--{flag}: cannot parse {s:?}"))))
        .collect()
}

fn optional_field<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn bench_table(a: &BenchTableArgs) -> Result<Produced> {
    let dims: Vec<usize> = parse_list("dims", &a.dims)?;
    let modes: Vec<usize> = parse_list("modes", &a.modes)?;
    if dims.is_empty() || modes.is_empty() {
        return Err(Error::Argument("--dims and --modes must be nonempty".into()));
    }
    if let Some(n) = dims.iter().find(|n| !(MIN_DIM..=MAX_DIM).contains(*n)) {
        return Err(Error::Argument(format!("n = {n} outside {MIN_DIM}..={MAX_DIM}")));
    }
    let iteration = IterationConfig {
        tolerance: a.tol,
        max_iterations: a.max_iter,
        record_iterates: false,
    };
    iteration.validate()?;
    let configs: Vec<BenchConfig> = dims
        .iter()
        .flat_map(|&n| modes.iter().map(move |&m| (n, m)))
        .map(|(n, m)| BenchConfig {
            n,
            modes: m,
            samples: a.count,
            decay: a.decay,
            seed: row_seed(a.seed, n, m),
            iteration: iteration.clone(),
        })
        .collect();
    let rows = parallel_map(&configs, bench_row);

    let mut csv = String::from("n,M,k_tilde,V_tilde,k_star,V_star,lambda_star,ms\n");
    for (cfg, row) in configs.iter().zip(rows) {
        match row {
            Ok(BenchRow {
                k_tilde,
                v_tilde,
                k_star,
                v_star,
                lambda_star,
                ms,
                ..
            }) => csv.push_str(&format!(
                "{},{},{k_tilde},{v_tilde},{k_star},{v_star},{lambda_star},{ms:.3}\n",
                cfg.n, cfg.modes
            )),
            Err(e) => {
                eprintln!("row (n = {}, M = {}) failed: {e}", cfg.n, cfg.modes);
                csv.push_str(&format!("{},{},,,,,,\n", cfg.n, cfg.modes));
            }
        }
    }
    write_text(&a.out, &csv)?;
    print!("{csv}");
    Ok(Produced {
        seed: Some(a.seed),
        inputs: vec![],
        outputs: vec![a.out.clone()],
    })
}

/// Applies `f` to every item on scoped worker threads; results keep input order.
fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    if workers <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| scope.spawn(|| part.iter().map(&f).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn bound_curves_cmd(a: &BoundCurvesArgs) -> Result<Produced> {
    let grid = match (&a.eps_grid, &a.n_grid) {
        (Some(text), None) => Grid::Epsilon(parse_list("eps-grid", text)?),
        (None, Some(text)) => Grid::Samples(parse_list("N-grid", text)?),
        (None, None) => Grid::Epsilon(DEFAULT_EPSILON_GRID.to_vec()),
        (Some(_), Some(_)) => return Err(Error::Argument("give either --eps-grid or --N-grid".into())),
    };
    let points = bound_curves(&CurveConfig {
        n: a.n,
        modes: a.modes,
        beta: a.beta,
        decay: a.decay,
        seed: a.seed,
        grid,
        iteration: IterationConfig {
            tolerance: a.tol,
            max_iterations: a.max_iter,
            record_iterates: false,
        },
    })?;
    let mut csv = String::from("curve,N,value\n");
    for p in &points {
        csv.push_str(&format!("{},{},{}\n", p.curve.label(), p.samples, optional_field(p.value)));
    }
    write_text(&a.out, &csv)?;
    print!("{csv}");
    Ok(Produced {
        seed: Some(a.seed),
        inputs: vec![],
        outputs: vec![a.out.clone()],
    })
}

fn render(a: &RenderArgs) -> Result<Produced> {
    let polytopes = a.polytope.iter().map(Polytope::load).collect::<Result<Vec<_>>>()?;
    let samples = a.samples.as_ref().map(SampleSet::load).transpose()?;
    let svg = render::render_svg(&polytopes, samples.as_ref())?;
    write_text(&a.out, &svg)?;
    let mut inputs = a.polytope.clone();
    inputs.extend(a.samples.clone());
    Ok(Produced {
        seed: None,
        inputs,
        outputs: vec![a.out.clone()],
    })
}

fn replay(a: &ReplayArgs) -> Result<()> {
    let recorded = RunManifest::load(&a.manifest)?;
    let argv = std::iter::once("polyinv".to_string()).chain(recorded.argv.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Validation(format!("manifest argv: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(Error::Validation("a manifest cannot record a replay".into()));
    }
    run(cli.command, &recorded.argv)?;
    let mut changed = Vec::new();
    for out in &recorded.outputs {
        if output_digest(&out.path)? != out.sha256 {
            changed.push(out.path.display().to_string());
        }
    }
    if !changed.is_empty() {
        return Err(Error::Validation(format!("replay changed {}", changed.join(", "))));
    }
    println!("replay reproduced {} output(s)", recorded.outputs.len());
    Ok(())
}
