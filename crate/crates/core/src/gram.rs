//! Co-occurrence count matrices of a binary dataset.
//!
//! For columns `i` and `j`, `g11[i][j]` counts rows where both are one,
//! `g00[i][j]` rows where both are zero, and `g01[i][j]` rows where `i` is
//! zero and `j` is one (`g10` is the transpose of `g01`).
//!
//! Only `g11 = DᵀD` needs a pass over the data. With `n` rows and column
//! sums `v` the remaining three follow entrywise:
//!
//! ```text
//! g00[i][j] = n - v[i] - v[j] + g11[i][j]
//! g01[i][j] = v[j] - g11[i][j]
//! ```
//!
//! [`gram_complete_direct`] computes all three by popcount over the
//! complemented columns instead and exists to check those identities and
//! to serve as the four-product baseline in benchmarks.

use rayon::prelude::*;

use crate::binmat::{tail_mask, BinaryMatrix, SparseBinaryMatrix};
use crate::error::{Error, Result};
use crate::kernel::{self, Cell};

/// Dense square matrix of 64-bit counts, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    dim: usize,
    data: Vec<u64>,
}

impl CountMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0; dim * dim],
        }
    }

    /// Builds from row-major data; `data.len()` must equal `dim * dim`.
    pub fn from_vec(dim: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} values do not form a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(r) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::Dimension(format!(
                "row {r} of a {dim}x{dim} matrix has wrong length"
            )));
        }
        Self::from_vec(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.data
            .chunks(self.dim.max(1))
            .map(<[u64]>::to_vec)
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut data = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j];
            }
        }
        Self { dim: d, data }
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn diagonal(&self) -> Vec<u64> {
        (0..self.dim).map(|j| self.get(j, j)).collect()
    }

    /// Assembles a full matrix from per-row upper-triangle segments:
    /// `upper[i]` holds entries `(i, i..dim)`. The lower triangle is the mirror.
    fn from_upper_rows(dim: usize, upper: Vec<Vec<u64>>) -> Self {
        let mut data = vec![0; dim * dim];
        for (i, seg) in upper.into_iter().enumerate() {
            debug_assert_eq!(seg.len(), dim - i);
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

/// The four co-occurrence count matrices of a dataset plus its row count
/// and column sums. `g10` is not stored; see [`GramSet::g10`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramSet {
    pub n: u64,
    pub v: Vec<u64>,
    pub g11: CountMatrix,
    pub g00: CountMatrix,
    pub g01: CountMatrix,
}

impl GramSet {
    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// Rows where column `i` is one and column `j` is zero.
    #[inline]
    pub fn g10(&self, i: usize, j: usize) -> u64 {
        self.g01.get(j, i)
    }

    /// Checks the structural invariants: symmetry of `g11`/`g00`, the
    /// diagonal identities, entry bounds and the four-cell partition.
    pub fn validate(&self) -> Result<()> {
        let m = self.dim();
        let n = self.n;
        let fail = |msg: String| Err(Error::Consistency(msg));
        if self.g11.dim() != m || self.g00.dim() != m || self.g01.dim() != m {
            return fail("count matrices do not match the column-sum length".into());
        }
        for i in 0..m {
            if self.g11.get(i, i) != self.v[i] || self.g00.get(i, i) != n - self.v[i] {
                return fail(format!("diagonal mismatch at column {i}"));
            }
            if self.g01.get(i, i) != 0 {
                return fail(format!("g01 diagonal nonzero at column {i}"));
            }
            for j in 0..m {
                let (a, b, c, d) = (
                    self.g11.get(i, j),
                    self.g00.get(i, j),
                    self.g01.get(i, j),
                    self.g10(i, j),
                );
                if a > n || b > n || c > n || d > n {
                    return fail(format!("entry ({i}, {j}) exceeds n = {n}"));
                }
                if a + b + c + d != n {
                    return fail(format!("cells at ({i}, {j}) do not partition {n} rows"));
                }
                if a != self.g11.get(j, i) || b != self.g00.get(j, i) {
                    return fail(format!("asymmetry at ({i}, {j})"));
                }
            }
        }
        Ok(())
    }
}

/// Column blocking for the pair driver: tiles of `TILE_COLS × TILE_COLS`
/// column pairs are swept `CHUNK_WORDS` words at a time so both tiles stay
/// cache resident.
const TILE_COLS: usize = 32;
const CHUNK_WORDS: usize = 512;

/// Counts `cell` for column pairs of `m`. Returns, for every `i`, the
/// entries `(i, j)` for `j` in `i..m` when `upper` is set, else `0..m`.
fn pair_counts(m: &BinaryMatrix, cell: Cell, upper: bool) -> Vec<Vec<u64>> {
    let n_cols = m.n_cols();
    let wpc = m.words_per_col();
    let tail = tail_mask(m.n_rows());
    let n_tiles = n_cols.div_ceil(TILE_COLS);

    let tiles: Vec<Vec<Vec<u64>>> = (0..n_tiles)
        .into_par_iter()
        .map(|ti| {
            let i0 = ti * TILE_COLS;
            let i1 = (i0 + TILE_COLS).min(n_cols);
            let j_start = |i: usize| if upper { i } else { 0 };
            let mut acc: Vec<Vec<u64>> = (i0..i1).map(|i| vec![0; n_cols - j_start(i)]).collect();
            let first_j_tile = if upper { ti } else { 0 };
            for tj in first_j_tile..n_tiles {
                let j0 = tj * TILE_COLS;
                let j1 = (j0 + TILE_COLS).min(n_cols);
                for w0 in (0..wpc).step_by(CHUNK_WORDS) {
                    let w1 = (w0 + CHUNK_WORDS).min(wpc);
                    let mask = if w1 == wpc { tail } else { u64::MAX };
                    for i in i0..i1 {
                        let a = &m.column(i)[w0..w1];
                        let row = &mut acc[i - i0];
                        let off = j_start(i);
                        for j in j0.max(off)..j1 {
                            row[j - off] += kernel::count(cell, a, &m.column(j)[w0..w1], mask);
                        }
                    }
                }
            }
            acc
        })
        .collect();
    tiles.into_iter().flatten().collect()
}

/// `g11 = DᵀD`: entry `(i, j)` counts rows where columns `i` and `j` are
/// both one. Computed by AND + popcount on the upper triangle and mirrored.
pub fn gram_ones(m: &BinaryMatrix) -> CountMatrix {
    CountMatrix::from_upper_rows(m.n_cols(), pair_counts(m, Cell::Ones, true))
}

/// Same result as [`gram_ones`] on the dense equivalent, computed from the
/// sparse index lists. Work is proportional to `Σ_rows k_r²` where `k_r`
/// is the number of ones in row `r`.
pub fn gram_ones_sparse(s: &SparseBinaryMatrix) -> CountMatrix {
    let n_cols = s.n_cols();
    let (row_ptr, row_cols) = s.row_lists();
    let upper: Vec<Vec<u64>> = (0..n_cols)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![0u64; n_cols - i];
            for &r in s.col_indices(i) {
                let cols = &row_cols[row_ptr[r as usize]..row_ptr[r as usize + 1]];
                let pos = cols.partition_point(|&c| (c as usize) < i);
                for &j in &cols[pos..] {
                    acc[j as usize - i] += 1;
                }
            }
            acc
        })
        .collect();
    CountMatrix::from_upper_rows(n_cols, upper)
}

/// Derives `g00` and `g01` from `g11`, the column sums `v` and the row
/// count `n` with integer arithmetic only.
///
/// Fails with [`Error::Consistency`] if `g11` is not symmetric, its
/// diagonal differs from `v`, some `v[j] > n`, or a derived entry falls
/// outside `[0, n]`.
pub fn gram_complete_optimized(g11: CountMatrix, v: Vec<u64>, n: u64) -> Result<GramSet> {
    let m = g11.dim();
    if v.len() != m {
        return Err(Error::Consistency(format!(
            "{} column sums for a {m}x{m} Gram matrix",
            v.len()
        )));
    }
    if let Some(j) = (0..m).find(|&j| v[j] > n || g11.get(j, j) != v[j]) {
        return Err(Error::Consistency(format!(
            "column {j}: sum {} and Gram diagonal {} inconsistent with n = {n}",
            v[j],
            g11.get(j, j)
        )));
    }
    if !g11.is_symmetric() {
        return Err(Error::Consistency("g11 is not symmetric".into()));
    }

    let n_i = i128::from(n);
    let checked = |value: i128, what: &str, i: usize, j: usize| -> Result<u64> {
        if (0..=n_i).contains(&value) {
            Ok(value as u64)
        } else {
            Err(Error::Consistency(format!(
                "{what}[{i}][{j}] = {value} outside [0, {n}]"
            )))
        }
    };

    let mut g00 = Vec::with_capacity(m * m);
    let mut g01 = Vec::with_capacity(m * m);
    for (i, &vi) in v.iter().enumerate() {
        let vi = i128::from(vi);
        for (j, &vj) in v.iter().enumerate() {
            let both = i128::from(g11.get(i, j));
            let vj = i128::from(vj);
            g00.push(checked(n_i - vi - vj + both, "g00", i, j)?);
            g01.push(checked(vj - both, "g01", i, j)?);
        }
    }
    Ok(GramSet {
        n,
        v,
        g00: CountMatrix { dim: m, data: g00 },
        g01: CountMatrix { dim: m, data: g01 },
        g11,
    })
}

/// Computes `g11`, `g00` and `g01` with three independent popcount passes
/// over `(col, col)`, `(¬col, ¬col)` and `(¬col, col)`.
pub fn gram_complete_direct(m: &BinaryMatrix) -> GramSet {
    let n_cols = m.n_cols();
    let g11 = CountMatrix::from_upper_rows(n_cols, pair_counts(m, Cell::Ones, true));
    let g00 = CountMatrix::from_upper_rows(n_cols, pair_counts(m, Cell::Zeros, true));
    let g01 = CountMatrix {
        dim: n_cols,
        data: pair_counts(m, Cell::ZeroOne, false).concat(),
    };
    GramSet {
        n: m.n_rows() as u64,
        v: g11.diagonal(),
        g11,
        g00,
        g01,
    }
}

/// Optimized Gram set of a dense matrix: one AND + popcount pass.
pub fn gram_set(m: &BinaryMatrix) -> GramSet {
    gram_complete_optimized(gram_ones(m), m.column_sums(), m.n_rows() as u64)
        .expect("counts from a valid matrix are consistent")
}

/// Optimized Gram set of a sparse matrix.
pub fn gram_set_sparse(s: &SparseBinaryMatrix) -> GramSet {
    gram_complete_optimized(gram_ones_sparse(s), s.column_sums(), s.n_rows() as u64)
        .expect("counts from a valid matrix are consistent")
}
