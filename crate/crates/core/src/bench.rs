//! Wall-clock harness comparing the MI backends on generated datasets.
//!
//! Dataset generation and representation conversion happen before the
//! clock starts; each repetition times one full MI matrix computation.
//! The headline number per case is the median over repetitions.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use crate::datagen::{generate, GenSpec};
use crate::error::{Error, Result};
use crate::mi::{mi_all_pairs, mi_all_pairs_naive, Backend, Dataset, EngineConfig, MIMatrix};

pub const REPORT_HEADER: &str = "backend,n_rows,n_cols,density,seed,rep,seconds,checksum";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BenchBackend {
    /// One exact-mode pairwise computation per column pair.
    NaivePairwise,
    /// Three popcount passes (`g11`, `g00`, `g01`).
    DirectGram,
    /// One bit-packed popcount pass plus complement identities.
    OptimizedDense,
    /// Index-list `g11` plus complement identities.
    OptimizedSparse,
}

impl BenchBackend {
    pub const ALL: [BenchBackend; 4] = [
        BenchBackend::NaivePairwise,
        BenchBackend::DirectGram,
        BenchBackend::OptimizedDense,
        BenchBackend::OptimizedSparse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchBackend::NaivePairwise => "naive-pairwise",
            BenchBackend::DirectGram => "direct-gram",
            BenchBackend::OptimizedDense => "optimized-dense",
            BenchBackend::OptimizedSparse => "optimized-sparse",
        }
    }
}

impl fmt::Display for BenchBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchBackend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown backend {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchCase {
    pub backend: BenchBackend,
    pub n_rows: usize,
    pub n_cols: usize,
    pub density: f64,
    pub seed: u64,
    pub repeats: usize,
}

impl BenchCase {
    pub fn gen_spec(&self) -> GenSpec {
        GenSpec::new(self.n_rows, self.n_cols, self.density, self.seed)
    }

    fn dataset_key(&self) -> (usize, usize, u64, u64) {
        (self.n_rows, self.n_cols, self.density.to_bits(), self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub case: BenchCase,
    pub rep: usize,
    pub seconds: f64,
    /// Sum of all MI matrix entries.
    pub checksum: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

/// Computes the MI matrix of a prepared dataset with `backend`.
fn compute(backend: BenchBackend, data: Dataset<'_>) -> Result<MIMatrix> {
    let cfg = EngineConfig::default();
    match (backend, data) {
        (BenchBackend::NaivePairwise, Dataset::Dense(m)) => mi_all_pairs_naive(m, &cfg),
        (BenchBackend::DirectGram, d) => mi_all_pairs(d, &cfg, Backend::Direct),
        (BenchBackend::OptimizedDense, d) => mi_all_pairs(d, &cfg, Backend::Dense),
        (BenchBackend::OptimizedSparse, d) => mi_all_pairs(d, &cfg, Backend::Sparse),
        (BenchBackend::NaivePairwise, Dataset::Sparse(s)) => {
            mi_all_pairs_naive(&s.to_dense(), &cfg)
        }
    }
}

/// Runs `case.repeats` timed repetitions on the case's generated dataset.
pub fn run_case(case: &BenchCase) -> Result<Vec<BenchRecord>> {
    if case.repeats == 0 {
        return Err(Error::Domain("repeats must be at least 1".into()));
    }
    let dense = generate(&case.gen_spec())?;
    let sparse = (case.backend == BenchBackend::OptimizedSparse).then(|| dense.to_sparse());
    let data = match &sparse {
        Some(s) => Dataset::Sparse(s),
        None => Dataset::Dense(&dense),
    };
    (0..case.repeats)
        .map(|rep| {
            let start = Instant::now();
            let mi = compute(case.backend, data)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok(BenchRecord {
                case: *case,
                rep,
                seconds,
                checksum: mi.checksum(),
            })
        })
        .collect()
}

/// Runs cases sequentially, calling `on_record` after each repetition.
pub fn run_grid_with(
    cases: &[BenchCase],
    mut on_record: impl FnMut(&BenchRecord),
) -> Result<BenchReport> {
    let mut records = Vec::new();
    for case in cases {
        for rec in run_case(case)? {
            on_record(&rec);
            records.push(rec);
        }
    }
    Ok(BenchReport { records })
}

pub fn run_grid(cases: &[BenchCase]) -> Result<BenchReport> {
    run_grid_with(cases, |_| {})
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

/// One dataset of a report with per-backend timings.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n_rows: usize,
    pub n_cols: usize,
    pub density: f64,
    pub seed: u64,
    /// Aligned with [`Summary::backends`]; `None` where the backend was not run.
    pub median_seconds: Vec<Option<f64>>,
    pub min_seconds: Vec<Option<f64>>,
}

/// Pivot of a report: rows are datasets in first-seen order, columns are
/// backends.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub backends: Vec<BenchBackend>,
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub fn median(&self, row: usize, backend: BenchBackend) -> Option<f64> {
        let k = self.backends.iter().position(|&b| b == backend)?;
        self.rows[row].median_seconds[k]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n_rows,n_cols,density,seed");
        for b in &self.backends {
            s.push(',');
            s.push_str(b.name());
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{}",
                r.n_rows, r.n_cols, r.density, r.seed
            ));
            for m in &r.median_seconds {
                match m {
                    Some(t) => s.push_str(&format!(",{t:.6}")),
                    None => s.push(','),
                }
            }
            s.push('\n');
        }
        s
    }
}

pub fn summarize(report: &BenchReport) -> Summary {
    let mut backends: Vec<BenchBackend> = report.records.iter().map(|r| r.case.backend).collect();
    backends.sort();
    backends.dedup();

    let mut keys: Vec<(usize, usize, u64, u64)> = Vec::new();
    for r in &report.records {
        let k = r.case.dataset_key();
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let rows = keys
        .iter()
        .map(|&key| {
            let times = |b: BenchBackend| -> Vec<f64> {
                report
                    .records
                    .iter()
                    .filter(|r| r.case.backend == b && r.case.dataset_key() == key)
                    .map(|r| r.seconds)
                    .collect()
            };
            let (n_rows, n_cols, density, seed) = key;
            SummaryRow {
                n_rows,
                n_cols,
                density: f64::from_bits(density),
                seed,
                median_seconds: backends.iter().map(|&b| median(&times(b))).collect(),
                min_seconds: backends
                    .iter()
                    .map(|&b| times(b).into_iter().min_by(f64::total_cmp))
                    .collect(),
            }
        })
        .collect();
    Summary { backends, rows }
}

/// Checks that every record of the same dataset has a checksum within
/// `1e-6 · m²` of the first record for that dataset.
pub fn check_consistency(report: &BenchReport) -> std::result::Result<(), String> {
    for (k, a) in report.records.iter().enumerate() {
        let first = report
            .records
            .iter()
            .take(k)
            .find(|b| b.case.dataset_key() == a.case.dataset_key());
        if let Some(b) = first {
            let m = a.case.n_cols as f64;
            let tol = 1e-6 * m * m;
            if (a.checksum - b.checksum).abs() > tol {
                return Err(format!(
                    "{} vs {} on {}x{} density {}: checksums {} and {} differ by more than {tol}",
                    a.case.backend,
                    b.case.backend,
                    a.case.n_rows,
                    a.case.n_cols,
                    a.case.density,
                    a.checksum,
                    b.checksum
                ));
            }
        }
    }
    Ok(())
}

pub fn report_csv(report: &BenchReport) -> String {
    let mut s = String::from(REPORT_HEADER);
    s.push('\n');
    for r in &report.records {
        let c = &r.case;
        s.push_str(&format!(
            "{},{},{},{},{},{},{:.9},{}\n",
            c.backend, c.n_rows, c.n_cols, c.density, c.seed, r.rep, r.seconds, r.checksum
        ));
    }
    s
}

/// Path of the pivoted summary written next to a report.
pub fn summary_path(report_path: &Path) -> PathBuf {
    report_path.with_extension("summary.csv")
}

/// Writes the per-record CSV to `path` and the pivoted summary to
/// [`summary_path`]. Returns the summary path.
pub fn emit_table(report: &BenchReport, path: impl AsRef<Path>) -> Result<PathBuf> {
    let path = path.as_ref();
    std::fs::write(path, report_csv(report)).map_err(|e| Error::io(path, e))?;
    let summary = summary_path(path);
    std::fs::write(&summary, summarize(report).to_csv()).map_err(|e| Error::io(&summary, e))?;
    Ok(summary)
}

/// Parses a case file: header `backend,n_rows,n_cols,density,seed[,repeats]`
/// followed by one case per line. `default_repeats` fills a missing column.
pub fn parse_cases(text: &str, path: &Path, default_repeats: usize) -> Result<Vec<BenchCase>> {
    let err = |line: usize, column: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| err(1, 1, "empty case file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let expected = ["backend", "n_rows", "n_cols", "density", "seed"];
    if cols.len() < 5
        || cols[..5] != expected
        || (cols.len() == 6 && cols[5] != "repeats")
        || cols.len() > 6
    {
        return Err(err(
            hline,
            1,
            "header must be backend,n_rows,n_cols,density,seed[,repeats]".into(),
        ));
    }
    let mut cases = Vec::new();
    for (line_no, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != cols.len() {
            return Err(err(
                line_no,
                1,
                format!("expected {} fields, found {}", cols.len(), f.len()),
            ));
        }
        fn num<T: FromStr>(s: &str) -> Option<T> {
            s.parse().ok()
        }
        let bad = |k: usize| err(line_no, k + 1, format!("invalid value {:?}", f[k]));
        let case = BenchCase {
            backend: f[0].parse().map_err(|e: String| err(line_no, 1, e))?,
            n_rows: num(f[1]).ok_or_else(|| bad(1))?,
            n_cols: num(f[2]).ok_or_else(|| bad(2))?,
            density: num(f[3]).ok_or_else(|| bad(3))?,
            seed: num(f[4]).ok_or_else(|| bad(4))?,
            repeats: match f.get(5) {
                Some(s) => num(s).ok_or_else(|| bad(5))?,
                None => default_repeats,
            },
        };
        case.gen_spec()
            .validate()
            .map_err(|e| err(line_no, 1, e.to_string()))?;
        if case.repeats == 0 {
            return Err(bad(5));
        }
        cases.push(case);
    }
    if cases.is_empty() {
        return Err(err(hline, 1, "no cases".into()));
    }
    Ok(cases)
}

/// Named experiment grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Three dataset sizes at 90% sparsity, every backend.
    Table1,
    /// Row scaling at 1000 columns.
    Rows,
    /// Column scaling at 100,000 rows.
    Cols,
    /// Density sweep at 100,000 × 1000.
    Sparsity,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "table1" => Ok(Preset::Table1),
            "rows" => Ok(Preset::Rows),
            "cols" => Ok(Preset::Cols),
            "sparsity" => Ok(Preset::Sparsity),
            _ => Err(format!("unknown preset {s:?}")),
        }
    }
}

pub const PRESET_SEED: u64 = 42;
pub const SWEEP_DENSITIES: [f64; 5] = [0.5, 0.1, 0.05, 0.01, 0.005];

/// Scales a row count, never going below `min(base, 1000)`.
fn scale_rows(base: usize, scale: f64) -> usize {
    let scaled = (base as f64 * scale).round() as usize;
    scaled.max(base.min(1000)).max(1)
}

impl Preset {
    /// Cases for this grid with row counts multiplied by `scale`.
    pub fn cases(self, scale: f64, repeats: usize) -> Vec<BenchCase> {
        use BenchBackend::*;
        let case = |backend, rows: usize, n_cols, density| BenchCase {
            backend,
            n_rows: scale_rows(rows, scale),
            n_cols,
            density,
            seed: PRESET_SEED,
            repeats,
        };
        let gram_backends = [DirectGram, OptimizedDense, OptimizedSparse];
        let mut out = Vec::new();
        match self {
            Preset::Table1 => {
                for (rows, cols) in [(1000, 100), (100_000, 100), (100_000, 1000)] {
                    for b in BenchBackend::ALL {
                        out.push(case(b, rows, cols, 0.1));
                    }
                }
            }
            Preset::Rows => {
                for rows in [1000, 10_000, 20_000, 50_000, 100_000] {
                    for b in gram_backends {
                        out.push(case(b, rows, 1000, 0.1));
                    }
                }
            }
            Preset::Cols => {
                for cols in [100, 500, 1000, 2000, 5000] {
                    for b in gram_backends {
                        out.push(case(b, 100_000, cols, 0.1));
                    }
                }
            }
            Preset::Sparsity => {
                for d in SWEEP_DENSITIES {
                    for b in [OptimizedDense, OptimizedSparse] {
                        out.push(case(b, 100_000, 1000, d));
                    }
                }
            }
        }
        out
    }
}
