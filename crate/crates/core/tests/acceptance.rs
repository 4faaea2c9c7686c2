//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any failed.

use std::time::{Duration, Instant};

use binmi::bench::{check_consistency, median, run_case, BenchBackend, BenchCase, BenchReport};
use binmi::{
    binary_entropy, generate, gram_complete_direct, gram_complete_optimized, gram_ones,
    io::format_mi_matrix, mi_all_pairs, mi_pairwise_naive, Backend, BinaryMatrix, EngineConfig,
    GenSpec, MIMatrix,
};

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    run: fn() -> Outcome,
    budget: Option<Duration>,
}

fn exact() -> EngineConfig {
    EngineConfig::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn columns(cols: &[&[u8]]) -> BinaryMatrix {
    let rows: Vec<Vec<u8>> = (0..cols[0].len())
        .map(|r| cols.iter().map(|c| c[r]).collect())
        .collect();
    BinaryMatrix::from_rows(&rows).unwrap()
}

fn gram_identity() -> Outcome {
    const DENSITIES: [f64; 5] = [0.0, 0.05, 0.5, 0.95, 1.0];
    let mut count = 0;
    for k in 0..120usize {
        let density = DENSITIES[k % 5];
        // Row counts sweep 1..=500 and column counts 1..=64, hitting both ends.
        let n = match k % 24 {
            0 => 1,
            1 => 500,
            _ => 1 + (k * 97 + 13) % 500,
        };
        let m = match k % 17 {
            0 => 1,
            1 => 64,
            _ => 1 + (k * 31 + 7) % 64,
        };
        let d = generate(&GenSpec::new(n, m, density, 1000 + k as u64)).unwrap();
        let direct = gram_complete_direct(&d);
        let optimized = gram_complete_optimized(gram_ones(&d), d.column_sums(), n as u64)
            .map_err(|e| e.to_string())?;
        ensure(direct == optimized, || {
            format!("mismatch on {n}x{m} density {density}")
        })?;
        optimized.validate().map_err(|e| e.to_string())?;
        count += 1;
    }
    Ok(format!("{count} matrices, exact integer equality"))
}

fn oracle_equivalence() -> Outcome {
    const DENSITIES: [f64; 3] = [0.05, 0.5, 0.95];
    let mut worst = 0.0f64;
    for k in 0..20usize {
        let density = DENSITIES[k % 3];
        let d = generate(&GenSpec::new(500, 64, density, 2000 + k as u64)).unwrap();
        let cols: Vec<Vec<u8>> = (0..64).map(|j| d.column_values(j)).collect();
        let sparse = d.to_sparse();
        let results = [
            mi_all_pairs(&d, &exact(), Backend::Dense).unwrap(),
            mi_all_pairs(&sparse, &exact(), Backend::Sparse).unwrap(),
            mi_all_pairs(&d, &exact(), Backend::Direct).unwrap(),
        ];
        for i in 0..64 {
            for j in 0..64 {
                let oracle = mi_pairwise_naive(&cols[i], &cols[j]).unwrap();
                for mi in &results {
                    worst = worst.max((mi.get(i, j) - oracle).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-10, || {
        format!("max deviation {worst:e} > 1e-10")
    })?;
    Ok(format!("20 matrices x 3 backends, max deviation {worst:e}"))
}

fn golden_values() -> Outcome {
    // Frozen from a high-precision enumeration of the four cells.
    const SKEWED: f64 = 0.311_278_124_459_132_9;
    let pair = |x: &[u8], y: &[u8]| {
        mi_all_pairs(&columns(&[x, y]), &exact(), Backend::Dense)
            .unwrap()
            .get(0, 1)
    };
    let same = pair(&[0, 1, 0, 1], &[0, 1, 0, 1]);
    ensure(same == 1.0, || {
        format!("identical balanced columns gave {same}")
    })?;
    let indep = pair(&[0, 0, 1, 1], &[0, 1, 0, 1]);
    ensure(indep == 0.0, || format!("independent pattern gave {indep}"))?;
    let skew = pair(&[0, 0, 1, 1], &[0, 1, 1, 1]);
    let naive = mi_pairwise_naive(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
    ensure(
        (skew - SKEWED).abs() <= 1e-12 && (naive - SKEWED).abs() <= 1e-12,
        || format!("skewed pair gave {skew} (naive {naive}), expected {SKEWED}"),
    )?;
    Ok(format!("1.0, 0.0, {skew:.15}"))
}

fn mi_bytes(mi: &MIMatrix) -> Vec<u8> {
    format_mi_matrix(mi, 17).into_bytes()
}

fn invariant_suite() -> Outcome {
    let mut checked = 0;
    for (k, density) in [0.05, 0.3, 0.5, 0.9].into_iter().enumerate() {
        let d = generate(&GenSpec::new(400, 48, density, 3000 + k as u64)).unwrap();
        let m = d.n_cols();
        let mi = mi_all_pairs(&d, &exact(), Backend::Dense).unwrap();
        let p1: Vec<f64> = d
            .column_sums()
            .iter()
            .map(|&s| s as f64 / d.n_rows() as f64)
            .collect();
        for (i, &p) in p1.iter().enumerate() {
            let h = binary_entropy(p).unwrap();
            ensure((mi.get(i, i) - h).abs() <= 1e-12, || {
                format!("diagonal {i}: {} vs entropy {h}", mi.get(i, i))
            })?;
            for j in 0..m {
                let v = mi.get(i, j);
                ensure(v.to_bits() == mi.get(j, i).to_bits(), || {
                    format!("asymmetry at ({i}, {j})")
                })?;
                ensure(
                    v >= -1e-9 && v <= mi.get(i, i).min(mi.get(j, j)) + 1e-9,
                    || format!("bound violated at ({i}, {j}): {v}"),
                )?;
            }
        }

        // Complementing one column permutes its four cells.
        let flip = k * 7 % m;
        let flipped =
            BinaryMatrix::from_fn(d.n_rows(), m, |r, c| d.get(r, c) ^ (c == flip)).unwrap();
        let mi_flip = mi_all_pairs(&flipped, &exact(), Backend::Dense).unwrap();
        let dev = max_dev(&mi, &mi_flip);
        ensure(dev <= 1e-12, || {
            format!("complement invariance off by {dev:e}")
        })?;

        // Stacking the data on itself leaves every probability unchanged.
        let n = d.n_rows();
        let doubled = BinaryMatrix::from_fn(2 * n, m, |r, c| d.get(r % n, c)).unwrap();
        let mi_dup = mi_all_pairs(&doubled, &exact(), Backend::Dense).unwrap();
        let dev = max_dev(&mi, &mi_dup);
        ensure(dev <= 1e-12, || format!("row duplication off by {dev:e}"))?;

        for backend in [Backend::Dense, Backend::Sparse, Backend::Direct] {
            let outputs: Vec<Vec<u8>> = [1, 8]
                .into_iter()
                .map(|threads| {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build()
                        .unwrap();
                    let mi = pool.install(|| mi_all_pairs(&d, &exact(), backend).unwrap());
                    let dir = tempfile::tempdir().unwrap();
                    let path = dir.path().join("mi.csv");
                    binmi::io::write_mi_matrix(&mi, &path, 17).unwrap();
                    std::fs::read(&path).unwrap()
                })
                .collect();
            ensure(
                outputs[0] == outputs[1] && outputs[0] == mi_bytes(&mi),
                || format!("{backend:?}: output differs between 1 and 8 threads"),
            )?;
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} matrices: symmetry, diagonal, bounds, complement, duplication, 1 vs 8 threads"
    ))
}

fn max_dev(a: &MIMatrix, b: &MIMatrix) -> f64 {
    a.values()
        .as_slice()
        .iter()
        .zip(b.values().as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn case(backend: BenchBackend, n_rows: usize, n_cols: usize, density: f64) -> BenchCase {
    BenchCase {
        backend,
        n_rows,
        n_cols,
        density,
        seed: 42,
        repeats: 3,
    }
}

fn timed(c: BenchCase) -> Result<(f64, f64), String> {
    let recs = run_case(&c).map_err(|e| e.to_string())?;
    let secs: Vec<f64> = recs.iter().map(|r| r.seconds).collect();
    Ok((median(&secs).unwrap(), recs[0].checksum))
}

fn speedup_vs_naive() -> Outcome {
    let (naive, c1) = timed(case(BenchBackend::NaivePairwise, 100_000, 100, 0.1))?;
    let (dense, c2) = timed(case(BenchBackend::OptimizedDense, 100_000, 100, 0.1))?;
    ensure((c1 - c2).abs() <= 1e-6 * 100.0 * 100.0, || {
        format!("checksums {c1} vs {c2}")
    })?;
    let ratio = naive / dense;
    ensure(ratio >= 20.0, || {
        format!("naive {naive:.4}s / dense {dense:.4}s = {ratio:.1}x < 20x")
    })?;
    Ok(format!("naive {naive:.4}s, dense {dense:.5}s, {ratio:.0}x"))
}

fn optimization_benefit() -> Outcome {
    let (direct, c1) = timed(case(BenchBackend::DirectGram, 100_000, 1000, 0.1))?;
    let (dense, c2) = timed(case(BenchBackend::OptimizedDense, 100_000, 1000, 0.1))?;
    ensure((c1 - c2).abs() <= 1e-6 * 1000.0 * 1000.0, || {
        format!("checksums {c1} vs {c2}")
    })?;
    let ratio = direct / dense;
    ensure(ratio >= 1.5, || {
        format!("direct {direct:.3}s / dense {dense:.3}s = {ratio:.2}x < 1.5x")
    })?;
    Ok(format!(
        "direct {direct:.3}s, dense {dense:.3}s, {ratio:.2}x"
    ))
}

fn sparsity_sweep() -> Outcome {
    let densities = binmi::bench::SWEEP_DENSITIES;
    let mut report = BenchReport::default();
    let mut medians = Vec::new();
    for d in densities {
        for backend in [BenchBackend::OptimizedDense, BenchBackend::OptimizedSparse] {
            let recs = run_case(&case(backend, 20_000, 500, d)).map_err(|e| e.to_string())?;
            if backend == BenchBackend::OptimizedSparse {
                let secs: Vec<f64> = recs.iter().map(|r| r.seconds).collect();
                medians.push(median(&secs).unwrap());
            }
            report.records.extend(recs);
        }
    }
    check_consistency(&report)?;
    let inversions = medians.windows(2).filter(|w| w[1] > w[0]).count();
    let shown: Vec<String> = densities
        .iter()
        .zip(&medians)
        .map(|(d, t)| format!("{d}:{t:.4}s"))
        .collect();
    ensure(inversions <= 1, || {
        format!(
            "{inversions} inversions in sparse medians [{}]",
            shown.join(", ")
        )
    })?;
    Ok(format!(
        "sparse medians [{}], {inversions} inversion(s), checksums consistent",
        shown.join(", ")
    ))
}

fn main() {
    let criteria = [
        Criterion {
            name: "gram identity",
            run: gram_identity,
            budget: Some(Duration::from_secs(30)),
        },
        Criterion {
            name: "oracle equivalence",
            run: oracle_equivalence,
            budget: Some(Duration::from_secs(60)),
        },
        Criterion {
            name: "golden values",
            run: golden_values,
            budget: None,
        },
        Criterion {
            name: "invariant suite",
            run: invariant_suite,
            budget: None,
        },
        Criterion {
            name: "speedup vs naive pairwise (>= 20x)",
            run: speedup_vs_naive,
            budget: Some(Duration::from_secs(300)),
        },
        Criterion {
            name: "optimization benefit vs direct gram (>= 1.5x)",
            run: optimization_benefit,
            budget: None,
        },
        Criterion {
            name: "sparsity sweep shape",
            run: sparsity_sweep,
            budget: None,
        },
    ];

    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(budget)) = (&outcome, c.budget) {
            if elapsed > budget {
                outcome = Err(format!("took {elapsed:.1?}, budget {budget:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS  {} ({elapsed:.2?}): {detail}", c.name),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {} ({elapsed:.2?}): {detail}", c.name);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
