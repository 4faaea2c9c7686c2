//! All-pairs mutual information from co-occurrence counts.
//!
//! The pipeline is counts → joint probabilities and marginals → one
//! four-term sum per column pair:
//!
//! ```text
//! MI(i, j) = Σ_{a,b ∈ {0,1}} P_ab(i, j) · log2(P_ab(i, j) / (P_a(i) · P_b(j)))
//! ```
//!
//! with the terms added in the order (1,1), (1,0), (0,1), (0,0). Values are
//! in bits. Each entry of the upper triangle is computed by exactly one
//! task and mirrored, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::binmat::{BinaryMatrix, SparseBinaryMatrix};
use crate::error::{Error, Result};
use crate::gram::{gram_complete_direct, gram_set, gram_set_sparse, GramSet};

/// Dense square matrix of `f64`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl FloatMatrix {
    pub fn from_vec(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} values do not form a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn from_upper_rows(dim: usize, upper: Vec<Vec<f64>>) -> Self {
        let mut data = vec![0.0; dim * dim];
        for (i, seg) in upper.into_iter().enumerate() {
            data[i * dim + i..(i + 1) * dim].copy_from_slice(&seg);
        }
        for i in 0..dim {
            for j in 0..i {
                data[i * dim + j] = data[j * dim + i];
            }
        }
        Self { dim, data }
    }
}

/// Joint probabilities of the four cells and per-column marginals.
/// `p10` is the transpose of `p01`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilitySet {
    pub p11: FloatMatrix,
    pub p00: FloatMatrix,
    pub p01: FloatMatrix,
    pub p1: Vec<f64>,
    pub p0: Vec<f64>,
}

impl ProbabilitySet {
    pub fn dim(&self) -> usize {
        self.p1.len()
    }

    #[inline]
    pub fn p10(&self, i: usize, j: usize) -> f64 {
        self.p01.get(j, i)
    }
}

/// Mutual information between every pair of columns, in bits.
#[derive(Debug, Clone, PartialEq)]
pub struct MIMatrix {
    values: FloatMatrix,
}

impl MIMatrix {
    pub fn new(values: FloatMatrix) -> Self {
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.dim()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn values(&self) -> &FloatMatrix {
        &self.values
    }

    /// Sum of all entries in row-major order.
    pub fn checksum(&self) -> f64 {
        self.values.as_slice().iter().sum()
    }
}

/// How zero probabilities inside the logarithm are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogMode {
    /// `0 · log 0 = 0`: a cell with no rows contributes nothing.
    #[default]
    Exact,
    /// Every term is `P · log2((P + ε) / (E + ε))`.
    Epsilon,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub mode: LogMode,
    /// Stabilizer for [`LogMode::Epsilon`]; ignored in exact mode.
    pub epsilon: f64,
    /// When false the diagonal of the result is zeroed.
    pub include_diagonal: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            mode: LogMode::Exact,
            epsilon: 1e-12,
            include_diagonal: true,
        }
    }
}

impl EngineConfig {
    pub fn epsilon(epsilon: f64) -> Self {
        Self {
            mode: LogMode::Epsilon,
            epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Domain(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Which route produces the Gram set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Bit-packed `g11` plus the closed-form complements.
    #[default]
    Dense,
    /// Index-list `g11` plus the closed-form complements.
    Sparse,
    /// Three independent popcount passes, no complement identities.
    Direct,
}

/// A dataset in either representation.
#[derive(Debug, Clone, Copy)]
pub enum Dataset<'a> {
    Dense(&'a BinaryMatrix),
    Sparse(&'a SparseBinaryMatrix),
}

impl<'a> From<&'a BinaryMatrix> for Dataset<'a> {
    fn from(m: &'a BinaryMatrix) -> Self {
        Dataset::Dense(m)
    }
}

impl<'a> From<&'a SparseBinaryMatrix> for Dataset<'a> {
    fn from(s: &'a SparseBinaryMatrix) -> Self {
        Dataset::Sparse(s)
    }
}

/// Divides every count by `n`; marginals come from the diagonals.
pub fn probabilities(g: &GramSet) -> ProbabilitySet {
    let n = g.n as f64;
    let scale = |m: &crate::gram::CountMatrix| FloatMatrix {
        dim: m.dim(),
        data: m.as_slice().iter().map(|&c| c as f64 / n).collect(),
    };
    let m = g.dim();
    ProbabilitySet {
        p11: scale(&g.g11),
        p00: scale(&g.g00),
        p01: scale(&g.g01),
        p1: (0..m).map(|j| g.g11.get(j, j) as f64 / n).collect(),
        p0: (0..m).map(|j| g.g00.get(j, j) as f64 / n).collect(),
    }
}

#[inline]
fn term(p: f64, e: f64, cfg: &EngineConfig) -> f64 {
    match cfg.mode {
        LogMode::Exact => {
            if p == 0.0 {
                0.0
            } else {
                p * (p / e).log2()
            }
        }
        LogMode::Epsilon => p * ((p + cfg.epsilon) / (e + cfg.epsilon)).log2(),
    }
}

/// Four-cell MI from joint probabilities and the two marginals
/// `(P(X=1), P(X=0))`, `(P(Y=1), P(Y=0))`.
#[inline]
fn mi_cells(
    p11: f64,
    p10: f64,
    p01: f64,
    p00: f64,
    x: (f64, f64),
    y: (f64, f64),
    cfg: &EngineConfig,
) -> f64 {
    let (x1, x0) = x;
    let (y1, y0) = y;
    term(p11, x1 * y1, cfg)
        + term(p10, x1 * y0, cfg)
        + term(p01, x0 * y1, cfg)
        + term(p00, x0 * y0, cfg)
}

pub fn mi_from_probabilities(p: &ProbabilitySet, cfg: &EngineConfig) -> MIMatrix {
    let m = p.dim();
    let upper: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (i..m)
                .map(|j| {
                    if i == j && !cfg.include_diagonal {
                        return 0.0;
                    }
                    mi_cells(
                        p.p11.get(i, j),
                        p.p10(i, j),
                        p.p01.get(i, j),
                        p.p00.get(i, j),
                        (p.p1[i], p.p0[i]),
                        (p.p1[j], p.p0[j]),
                        cfg,
                    )
                })
                .collect()
        })
        .collect();
    MIMatrix::new(FloatMatrix::from_upper_rows(m, upper))
}

/// Gram set of `data` via `backend`, converting representation if needed.
pub fn gram_for(data: Dataset<'_>, backend: Backend) -> GramSet {
    match (backend, data) {
        (Backend::Dense, Dataset::Dense(m)) => gram_set(m),
        (Backend::Dense, Dataset::Sparse(s)) => gram_set(&s.to_dense()),
        (Backend::Sparse, Dataset::Sparse(s)) => gram_set_sparse(s),
        (Backend::Sparse, Dataset::Dense(m)) => gram_set_sparse(&m.to_sparse()),
        (Backend::Direct, Dataset::Dense(m)) => gram_complete_direct(m),
        (Backend::Direct, Dataset::Sparse(s)) => gram_complete_direct(&s.to_dense()),
    }
}

/// Mutual information between every pair of columns of `data`.
pub fn mi_all_pairs<'a>(
    data: impl Into<Dataset<'a>>,
    cfg: &EngineConfig,
    backend: Backend,
) -> Result<MIMatrix> {
    cfg.validate()?;
    let g = gram_for(data.into(), backend);
    Ok(mi_from_probabilities(&probabilities(&g), cfg))
}

/// Exact-mode MI of two binary vectors by direct row iteration.
pub fn mi_pairwise_naive(x: &[u8], y: &[u8]) -> Result<f64> {
    mi_pairwise_naive_with(x, y, &EngineConfig::default())
}

/// [`mi_pairwise_naive`] under an arbitrary log mode.
pub fn mi_pairwise_naive_with(x: &[u8], y: &[u8], cfg: &EngineConfig) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Dimension(format!(
            "vectors must have equal nonzero length, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    // counts[2 * x + y]
    let mut counts = [0u64; 4];
    for (&a, &b) in x.iter().zip(y) {
        if a > 1 || b > 1 {
            return Err(Error::Domain(format!("non-binary values ({a}, {b})")));
        }
        counts[usize::from(2 * a + b)] += 1;
    }
    let [n00, n01, n10, n11] = counts;
    let n = x.len() as f64;
    let prob = |c: u64| c as f64 / n;
    Ok(mi_cells(
        prob(n11),
        prob(n10),
        prob(n01),
        prob(n00),
        (prob(n10 + n11), prob(n00 + n01)),
        (prob(n01 + n11), prob(n00 + n10)),
        cfg,
    ))
}

/// Full matrix by calling the pairwise routine on every column pair of the
/// upper triangle, single-threaded.
pub fn mi_all_pairs_naive(m: &BinaryMatrix, cfg: &EngineConfig) -> Result<MIMatrix> {
    cfg.validate()?;
    let cols: Vec<Vec<u8>> = (0..m.n_cols()).map(|j| m.column_values(j)).collect();
    let d = cols.len();
    let mut upper = Vec::with_capacity(d);
    for i in 0..d {
        let mut seg = Vec::with_capacity(d - i);
        for j in i..d {
            seg.push(if i == j && !cfg.include_diagonal {
                0.0
            } else {
                mi_pairwise_naive_with(&cols[i], &cols[j], cfg)?
            });
        }
        upper.push(seg);
    }
    Ok(MIMatrix::new(FloatMatrix::from_upper_rows(d, upper)))
}

/// `H(p) = −p·log2 p − (1−p)·log2(1−p)` with `0·log 0 = 0`.
pub fn binary_entropy(p1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::Domain(format!("probability {p1} outside [0, 1]")));
    }
    let h = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(h(p1) + h(1.0 - p1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, GenSpec};

    // High-precision enumeration of the four cells, evaluated independently.
    const MI_0011_0111: f64 = 0.311_278_124_459_132_9;
    const H_075: f64 = 0.811_278_124_459_132_8;
    const MI_FIXTURE: f64 = 0.251_629_167_387_822_87;

    fn columns(cols: &[&[u8]]) -> BinaryMatrix {
        let rows: Vec<Vec<u8>> = (0..cols[0].len())
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect();
        BinaryMatrix::from_rows(&rows).unwrap()
    }

    fn exact() -> EngineConfig {
        EngineConfig::default()
    }

    #[test]
    fn probabilities_fixture() {
        let m = BinaryMatrix::from_rows(&[[1, 0], [0, 1], [1, 1]]).unwrap();
        let p = probabilities(&gram_set(&m));
        assert_eq!(
            p.p11.as_slice(),
            &[2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0]
        );
        assert_eq!(p.p1, vec![2.0 / 3.0, 2.0 / 3.0]);
    }

    #[test]
    fn probabilities_all_zeros() {
        let p = probabilities(&gram_set(&BinaryMatrix::zeros(6, 3).unwrap()));
        assert!(p.p11.as_slice().iter().all(|&x| x == 0.0));
        assert!(p.p00.as_slice().iter().all(|&x| x == 1.0));
        assert!(p.p1.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn probabilities_partition_unity() {
        let m = generate(&GenSpec::new(137, 9, 0.3, 4)).unwrap();
        let p = probabilities(&gram_set(&m));
        for i in 0..9 {
            assert!((p.p1[i] + p.p0[i] - 1.0).abs() <= 1e-12);
            assert_eq!(p.p1[i], p.p11.get(i, i));
            for j in 0..9 {
                let s = p.p11.get(i, j) + p.p00.get(i, j) + p.p01.get(i, j) + p.p10(i, j);
                assert!((s - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn golden_values() {
        let balanced = columns(&[&[0, 1, 0, 1], &[0, 1, 0, 1]]);
        let mi = mi_all_pairs(&balanced, &exact(), Backend::Dense).unwrap();
        assert_eq!(mi.get(0, 1), 1.0);

        let indep = columns(&[&[0, 0, 1, 1], &[0, 1, 0, 1]]);
        let mi = mi_all_pairs(&indep, &exact(), Backend::Dense).unwrap();
        assert_eq!(mi.get(0, 1), 0.0);

        let skew = columns(&[&[0, 0, 1, 1], &[0, 1, 1, 1]]);
        let mi = mi_all_pairs(&skew, &exact(), Backend::Dense).unwrap();
        assert!((mi.get(0, 1) - MI_0011_0111).abs() <= 1e-12);
        let naive = mi_pairwise_naive(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
        assert!((naive - MI_0011_0111).abs() <= 1e-12);
        assert!((mi.get(1, 1) - H_075).abs() <= 1e-12);
    }

    #[test]
    fn constant_column_has_zero_mi() {
        let m = columns(&[&[0, 0, 0, 0, 0], &[1, 0, 1, 1, 0]]);
        for backend in [Backend::Dense, Backend::Sparse, Backend::Direct] {
            let mi = mi_all_pairs(&m, &exact(), backend).unwrap();
            assert_eq!(mi.get(0, 1), 0.0);
            assert_eq!(mi.get(0, 0), 0.0);
        }
    }

    #[test]
    fn fixture_matches_naive() {
        let m = BinaryMatrix::from_rows(&[[1, 0], [0, 1], [1, 1]]).unwrap();
        let mi = mi_all_pairs(&m, &exact(), Backend::Dense).unwrap();
        let naive = mi_pairwise_naive(&[1, 0, 1], &[0, 1, 1]).unwrap();
        assert!((mi.get(0, 1) - naive).abs() <= 1e-12);
        assert!((naive - MI_FIXTURE).abs() <= 1e-12);
    }

    #[test]
    fn single_column_holds_its_entropy() {
        let m = columns(&[&[1, 1, 0, 1]]);
        let mi = mi_all_pairs(&m, &exact(), Backend::Dense).unwrap();
        assert_eq!(mi.dim(), 1);
        assert!((mi.get(0, 0) - H_075).abs() <= 1e-12);
    }

    #[test]
    fn no_diagonal_zeroes_it() {
        let m = generate(&GenSpec::new(40, 5, 0.5, 1)).unwrap();
        let cfg = EngineConfig {
            include_diagonal: false,
            ..exact()
        };
        let mi = mi_all_pairs(&m, &cfg, Backend::Dense).unwrap();
        let full = mi_all_pairs(&m, &exact(), Backend::Dense).unwrap();
        for i in 0..5 {
            assert_eq!(mi.get(i, i), 0.0);
            for j in (0..5).filter(|&j| j != i) {
                assert_eq!(mi.get(i, j), full.get(i, j));
            }
        }
        let naive = mi_all_pairs_naive(&m, &cfg).unwrap();
        assert_eq!(naive.get(2, 2), 0.0);
    }

    #[test]
    fn backends_agree() {
        let m = generate(&GenSpec::new(200, 30, 0.4, 17)).unwrap();
        let dense = mi_all_pairs(&m, &exact(), Backend::Dense).unwrap();
        let sparse = mi_all_pairs(&m.to_sparse(), &exact(), Backend::Sparse).unwrap();
        let direct = mi_all_pairs(&m, &exact(), Backend::Direct).unwrap();
        let naive = mi_all_pairs_naive(&m, &exact()).unwrap();
        for i in 0..30 {
            for j in 0..30 {
                assert!((dense.get(i, j) - sparse.get(i, j)).abs() <= 1e-12);
                assert!((dense.get(i, j) - direct.get(i, j)).abs() <= 1e-12);
                assert!((dense.get(i, j) - naive.get(i, j)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn naive_edge_cases() {
        assert_eq!(
            mi_pairwise_naive(&[0, 1, 0, 1], &[0, 1, 0, 1]).unwrap(),
            1.0
        );
        assert_eq!(
            mi_pairwise_naive(&[0, 1, 1, 0], &[1, 0, 0, 1]).unwrap(),
            1.0
        );
        assert!(matches!(
            mi_pairwise_naive(&[0, 1], &[1]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            mi_pairwise_naive(&[], &[]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            mi_pairwise_naive(&[2], &[1]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn epsilon_mode_close_to_exact() {
        let m = generate(&GenSpec::new(150, 12, 0.1, 23)).unwrap();
        let e = mi_all_pairs(&m, &exact(), Backend::Dense).unwrap();
        let s = mi_all_pairs(&m, &EngineConfig::epsilon(1e-12), Backend::Dense).unwrap();
        for (a, b) in e.values().as_slice().iter().zip(s.values().as_slice()) {
            assert!((a - b).abs() <= 1e-6);
        }
        let bad = EngineConfig::epsilon(0.0);
        assert!(matches!(
            mi_all_pairs(&m, &bad, Backend::Dense),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn epsilon_mode_zero_cells_vanish() {
        // P = 0 terms are exactly zero in epsilon mode too.
        let cfg = EngineConfig::epsilon(1e-3);
        let v = mi_pairwise_naive_with(&[0, 0, 0, 0], &[0, 1, 0, 1], &cfg).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.75).unwrap() - H_075).abs() <= 1e-15);
        assert!(matches!(binary_entropy(1.01), Err(Error::Domain(_))));
        assert!(matches!(binary_entropy(-0.1), Err(Error::Domain(_))));
        assert!(matches!(binary_entropy(f64::NAN), Err(Error::Domain(_))));
    }
}
