//! `binmi` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 usage, parse or
//! format errors, 3 dimension errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use binmi::bench::{self, BenchBackend, BenchCase, Preset};
use binmi::{
    generate, io, mi_all_pairs, mi_all_pairs_naive, Backend, BinaryMatrix, EngineConfig, Error,
    GenSpec, LogMode, SparseBinaryMatrix,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "binmi",
    version,
    about = "All-pairs mutual information for binary datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the MI matrix of a dataset.
    Compute(ComputeArgs),
    /// Write a synthetic Bernoulli dataset.
    Generate(GenerateArgs),
    /// Time backends on a preset grid or a case file.
    Bench(BenchArgs),
    /// Time backends across a list of densities at a fixed size.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Bmi,
    Triplets,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComputeBackend {
    Dense,
    Sparse,
    Direct,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Epsilon,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Table1,
    Rows,
    Cols,
    Sparsity,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_enum, default_value = "dense")]
    backend: ComputeBackend,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    #[arg(long, default_value_t = 1e-12)]
    epsilon: f64,
    #[arg(long)]
    no_diagonal: bool,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Digits after the decimal point.
    #[arg(long, default_value_t = 9)]
    precision: usize,
    /// Worker threads; 0 uses all available cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    /// Output format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("grid").required(true).args(["preset", "cases"]))]
struct BenchArgs {
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    /// CSV with header backend,n_rows,n_cols,density,seed[,repeats].
    #[arg(long)]
    cases: Option<PathBuf>,
    /// Row-count multiplier applied to preset grids.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 100_000)]
    rows: usize,
    #[arg(long, default_value_t = 1000)]
    cols: usize,
    #[arg(long, value_delimiter = ',', default_values_t = bench::SWEEP_DENSITIES)]
    densities: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values = ["optimized-dense", "optimized-sparse"])]
    backends: Vec<BenchBackend>,
    #[arg(long, default_value_t = bench::PRESET_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long)]
    output: PathBuf,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Dimension(_) => 3,
            Error::Domain(_)
            | Error::Parse { .. }
            | Error::Format { .. }
            | Error::Length { .. }
            | Error::Validation { .. } => 2,
            Error::Consistency(_) | Error::Io { .. } => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn infer_format(path: &Path, explicit: Option<Format>) -> Result<Format, Failure> {
    if let Some(f) = explicit {
        return Ok(f);
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Format::Csv),
        Some("bmi") => Ok(Format::Bmi),
        Some("txt" | "tri" | "triplets") => Ok(Format::Triplets),
        _ => Err(usage(format!(
            "{}: cannot infer format from extension, pass --format",
            path.display()
        ))),
    }
}

enum Loaded {
    Dense(BinaryMatrix),
    Sparse(SparseBinaryMatrix),
}

impl Loaded {
    fn shape(&self) -> (usize, usize, f64) {
        match self {
            Loaded::Dense(m) => (m.n_rows(), m.n_cols(), m.density()),
            Loaded::Sparse(s) => (s.n_rows(), s.n_cols(), s.density()),
        }
    }
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure {
            code: 1,
            message: format!("cannot start thread pool: {e}"),
        })
}

fn compute(args: ComputeArgs) -> Result<(), Failure> {
    let cfg = EngineConfig {
        mode: match args.mode {
            Mode::Exact => LogMode::Exact,
            Mode::Epsilon => LogMode::Epsilon,
        },
        epsilon: args.epsilon,
        include_diagonal: !args.no_diagonal,
    };
    cfg.validate()?;

    let data = match infer_format(&args.input, args.format)? {
        Format::Csv => Loaded::Dense(io::read_csv(&args.input)?),
        Format::Bmi => Loaded::Dense(io::read_bmi(&args.input)?),
        Format::Triplets => Loaded::Sparse(io::read_triplets(&args.input)?),
    };
    let (n, m, density) = data.shape();

    let pool = thread_pool(args.threads)?;
    let start = Instant::now();
    let mi = pool.install(|| -> Result<_, Error> {
        match (args.backend, &data) {
            (ComputeBackend::Naive, Loaded::Dense(d)) => mi_all_pairs_naive(d, &cfg),
            (ComputeBackend::Naive, Loaded::Sparse(s)) => mi_all_pairs_naive(&s.to_dense(), &cfg),
            (b, loaded) => {
                let backend = match b {
                    ComputeBackend::Sparse => Backend::Sparse,
                    ComputeBackend::Direct => Backend::Direct,
                    _ => Backend::Dense,
                };
                match loaded {
                    Loaded::Dense(d) => mi_all_pairs(d, &cfg, backend),
                    Loaded::Sparse(s) => mi_all_pairs(s, &cfg, backend),
                }
            }
        }
    })?;
    let elapsed = start.elapsed().as_secs_f64();

    match &args.output {
        Some(path) => io::write_mi_matrix(&mi, path, args.precision)?,
        None => print!("{}", io::format_mi_matrix(&mi, args.precision)),
    }
    eprintln!("n={n} m={m} density={density:.6} elapsed={elapsed:.6}s");
    Ok(())
}

fn generate_cmd(args: GenerateArgs) -> Result<(), Failure> {
    let format = infer_format(&args.output, args.format)?;
    let spec = GenSpec::new(args.rows, args.cols, args.density, args.seed);
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let m = generate(&spec)?;
    match format {
        Format::Csv => io::write_csv(&m, &args.output)?,
        Format::Bmi => io::write_bmi(&m, &args.output)?,
        Format::Triplets => io::write_triplets(&m.to_sparse(), &args.output)?,
    }
    eprintln!(
        "wrote {}x{} matrix with {} ones to {}",
        m.n_rows(),
        m.n_cols(),
        m.count_ones(),
        args.output.display()
    );
    Ok(())
}

fn run_and_emit(cases: &[BenchCase], output: &Path) -> Result<(), Failure> {
    let report = bench::run_grid_with(cases, |r| {
        eprintln!(
            "{:<16} {:>7}x{:<5} density {:<6} rep {} {:>10.6}s",
            r.case.backend.name(),
            r.case.n_rows,
            r.case.n_cols,
            r.case.density,
            r.rep,
            r.seconds
        );
    })?;
    let summary_path = bench::emit_table(&report, output)?;
    print!("{}", bench::summarize(&report).to_csv());
    eprintln!(
        "report: {}  summary: {}",
        output.display(),
        summary_path.display()
    );
    bench::check_consistency(&report).map_err(|message| Failure { code: 1, message })
}

fn bench_cmd(args: BenchArgs) -> Result<(), Failure> {
    if args.repeats == 0 {
        return Err(usage("--repeats must be at least 1"));
    }
    if !(args.scale > 0.0 && args.scale.is_finite()) {
        return Err(usage("--scale must be positive"));
    }
    let cases = match (args.preset, &args.cases) {
        (Some(p), _) => {
            let preset = match p {
                PresetArg::Table1 => Preset::Table1,
                PresetArg::Rows => Preset::Rows,
                PresetArg::Cols => Preset::Cols,
                PresetArg::Sparsity => Preset::Sparsity,
            };
            preset.cases(args.scale, args.repeats)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: 1,
                message: format!("{}: {e}", path.display()),
            })?;
            bench::parse_cases(&text, path, args.repeats)?
        }
        (None, None) => unreachable!("clap requires --preset or --cases"),
    };
    run_and_emit(&cases, &args.output)
}

fn sweep_cmd(args: SweepArgs) -> Result<(), Failure> {
    if args.repeats == 0 {
        return Err(usage("--repeats must be at least 1"));
    }
    let mut cases = Vec::new();
    for &density in &args.densities {
        for &backend in &args.backends {
            let case = BenchCase {
                backend,
                n_rows: args.rows,
                n_cols: args.cols,
                density,
                seed: args.seed,
                repeats: args.repeats,
            };
            case.gen_spec()
                .validate()
                .map_err(|e| usage(e.to_string()))?;
            cases.push(case);
        }
    }
    if cases.is_empty() {
        return Err(usage("no densities or backends given"));
    }
    run_and_emit(&cases, &args.output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Generate(a) => generate_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("binmi: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
