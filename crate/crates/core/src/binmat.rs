//! Dense bit-packed and sparse index-list representations of an `n × m`
//! binary dataset (rows are samples, columns are variables).
//!
//! The dense form packs each column into `ceil(n / 64)` little-endian
//! 64-bit words: bit `r` of word `w` holds row `w * 64 + r`. Bits past the
//! last row are always zero, so popcounts over whole words are exact.

use crate::error::{Error, Result};

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n_rows: usize) -> usize {
    n_rows.div_ceil(WORD_BITS)
}

/// Mask of the valid bits in the final word of a column.
#[inline]
pub(crate) fn tail_mask(n_rows: usize) -> u64 {
    match n_rows % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Column-major, bit-packed binary matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    words_per_col: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BinaryMatrix")
            .field("n_rows", &self.n_rows)
            .field("n_cols", &self.n_cols)
            .field("ones", &self.count_ones())
            .finish()
    }
}

fn check_shape(n_rows: usize, n_cols: usize) -> Result<()> {
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::Dimension(format!(
            "matrix must have at least one row and one column, got {n_rows}x{n_cols}"
        )));
    }
    Ok(())
}

impl BinaryMatrix {
    /// Builds a matrix from row vectors of `0`/`1` values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        check_shape(n_rows, n_cols)?;
        let mut m = Self::zeros(n_rows, n_cols)?;
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::Dimension(format!(
                    "row {r} has {} values, expected {n_cols}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => m.set(r, c),
                    other => {
                        return Err(Error::Domain(format!(
                            "value {other} at row {r}, column {c} is not binary"
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    /// All-zeros matrix.
    pub fn zeros(n_rows: usize, n_cols: usize) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        let words_per_col = words_for(n_rows);
        Ok(Self {
            n_rows,
            n_cols,
            words_per_col,
            words: vec![0; words_per_col * n_cols],
        })
    }

    /// Builds a matrix by evaluating `f(row, col)` for every cell in
    /// row-major order (row 0 col 0, row 0 col 1, ...).
    pub fn from_fn(
        n_rows: usize,
        n_cols: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut m = Self::zeros(n_rows, n_cols)?;
        for r in 0..n_rows {
            for c in 0..n_cols {
                if f(r, c) {
                    m.set(r, c);
                }
            }
        }
        Ok(m)
    }

    /// Wraps raw column-major words. Fails if the length is wrong or any
    /// padding bit is set.
    pub fn from_column_words(n_rows: usize, n_cols: usize, words: Vec<u64>) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        let words_per_col = words_for(n_rows);
        if words.len() != words_per_col * n_cols {
            return Err(Error::Dimension(format!(
                "expected {} words for a {n_rows}x{n_cols} matrix, got {}",
                words_per_col * n_cols,
                words.len()
            )));
        }
        let m = Self {
            n_rows,
            n_cols,
            words_per_col,
            words,
        };
        if let Some(j) = m.first_dirty_column() {
            return Err(Error::Domain(format!(
                "column {j} has bits set beyond row {}",
                n_rows - 1
            )));
        }
        Ok(m)
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize) {
        self.words[c * self.words_per_col + r / WORD_BITS] |= 1u64 << (r % WORD_BITS);
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn words_per_col(&self) -> usize {
        self.words_per_col
    }

    /// All packed words, column after column.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Packed words of column `j`.
    #[inline]
    pub fn column(&self, j: usize) -> &[u64] {
        let start = j * self.words_per_col;
        &self.words[start..start + self.words_per_col]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.n_rows && c < self.n_cols, "index out of bounds");
        self.words[c * self.words_per_col + r / WORD_BITS] >> (r % WORD_BITS) & 1 == 1
    }

    /// Column `j` unpacked into one byte (`0` or `1`) per row.
    pub fn column_values(&self, j: usize) -> Vec<u8> {
        (0..self.n_rows).map(|r| self.get(r, j) as u8).collect()
    }

    /// Row `r` as `0`/`1` bytes.
    pub fn row_values(&self, r: usize) -> Vec<u8> {
        (0..self.n_cols).map(|c| self.get(r, c) as u8).collect()
    }

    /// Number of ones in each column (the vector `v`).
    pub fn column_sums(&self) -> Vec<u64> {
        self.words
            .chunks_exact(self.words_per_col)
            .map(|col| col.iter().map(|w| u64::from(w.count_ones())).sum())
            .collect()
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Fraction of cells equal to one.
    pub fn density(&self) -> f64 {
        self.count_ones() as f64 / (self.n_rows as f64 * self.n_cols as f64)
    }

    /// Index of the first column with a nonzero padding bit, if any.
    pub fn first_dirty_column(&self) -> Option<usize> {
        let mask = tail_mask(self.n_rows);
        (0..self.n_cols).find(|&j| self.column(j)[self.words_per_col - 1] & !mask != 0)
    }

    /// Copy of the matrix with rows reordered: output row `i` is input row `order[i]`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_rows {
            return Err(Error::Dimension(format!(
                "permutation has {} entries, matrix has {} rows",
                order.len(),
                self.n_rows
            )));
        }
        Self::from_fn(self.n_rows, self.n_cols, |r, c| self.get(order[r], c))
    }

    pub fn to_sparse(&self) -> SparseBinaryMatrix {
        let mut col_ptr = Vec::with_capacity(self.n_cols + 1);
        let mut row_idx = Vec::with_capacity(self.count_ones() as usize);
        col_ptr.push(0);
        for j in 0..self.n_cols {
            for (w, &word) in self.column(j).iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    row_idx.push((w * WORD_BITS + b) as u32);
                    bits &= bits - 1;
                }
            }
            col_ptr.push(row_idx.len());
        }
        SparseBinaryMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            col_ptr,
            row_idx,
        }
    }
}

/// Compressed-column binary matrix: for each column, the strictly
/// increasing row indices holding a one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
}

impl SparseBinaryMatrix {
    /// Builds from per-column row-index lists, which must be strictly
    /// increasing and within `[0, n_rows)`.
    pub fn new(n_rows: usize, col_indices: Vec<Vec<u32>>) -> Result<Self> {
        let n_cols = col_indices.len();
        check_shape(n_rows, n_cols)?;
        check_row_range(n_rows)?;
        let mut col_ptr = Vec::with_capacity(n_cols + 1);
        let mut row_idx = Vec::with_capacity(col_indices.iter().map(Vec::len).sum());
        col_ptr.push(0);
        for (j, col) in col_indices.into_iter().enumerate() {
            for (k, &r) in col.iter().enumerate() {
                if r as usize >= n_rows {
                    return Err(Error::Dimension(format!(
                        "row index {r} in column {j} out of range for {n_rows} rows"
                    )));
                }
                if k > 0 && col[k - 1] >= r {
                    return Err(Error::Domain(format!(
                        "column {j} indices not strictly increasing at position {k}"
                    )));
                }
            }
            row_idx.extend_from_slice(&col);
            col_ptr.push(row_idx.len());
        }
        Ok(Self {
            n_rows,
            n_cols,
            col_ptr,
            row_idx,
        })
    }

    /// Builds from unordered `(row, col)` coordinates of the ones.
    /// Duplicate coordinates are rejected.
    pub fn from_entries(
        n_rows: usize,
        n_cols: usize,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        check_shape(n_rows, n_cols)?;
        check_row_range(n_rows)?;
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); n_cols];
        for (r, c) in entries {
            if r >= n_rows || c >= n_cols {
                return Err(Error::Dimension(format!(
                    "entry ({r}, {c}) out of range for a {n_rows}x{n_cols} matrix"
                )));
            }
            cols[c].push(r as u32);
        }
        for (j, col) in cols.iter_mut().enumerate() {
            col.sort_unstable();
            if let Some(w) = col.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Domain(format!("duplicate entry ({}, {j})", w[0])));
            }
        }
        Self::new(n_rows, cols)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Total number of ones.
    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Sorted row indices of the ones in column `j`.
    #[inline]
    pub fn col_indices(&self, j: usize) -> &[u32] {
        &self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]]
    }

    pub fn column_sums(&self) -> Vec<u64> {
        self.col_ptr
            .windows(2)
            .map(|w| (w[1] - w[0]) as u64)
            .collect()
    }

    pub fn density(&self) -> f64 {
        self.nnz() as f64 / (self.n_rows as f64 * self.n_cols as f64)
    }

    /// Iterates `(row, col)` coordinates in column-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_cols)
            .flat_map(move |j| self.col_indices(j).iter().map(move |&r| (r as usize, j)))
    }

    /// Row-major transpose: for each row, the increasing column indices of its ones.
    pub(crate) fn row_lists(&self) -> (Vec<usize>, Vec<u32>) {
        let mut row_ptr = vec![0usize; self.n_rows + 1];
        for &r in &self.row_idx {
            row_ptr[r as usize + 1] += 1;
        }
        for i in 0..self.n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut fill = row_ptr.clone();
        let mut col_idx = vec![0u32; self.row_idx.len()];
        for j in 0..self.n_cols {
            for &r in self.col_indices(j) {
                col_idx[fill[r as usize]] = j as u32;
                fill[r as usize] += 1;
            }
        }
        (row_ptr, col_idx)
    }

    pub fn to_dense(&self) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(self.n_rows, self.n_cols)
            .expect("sparse matrix shape already validated");
        for (r, c) in self.entries() {
            m.set(r, c);
        }
        m
    }
}

fn check_row_range(n_rows: usize) -> Result<()> {
    if n_rows > u32::MAX as usize + 1 {
        return Err(Error::Dimension(format!(
            "{n_rows} rows exceeds the sparse row-index range"
        )));
    }
    Ok(())
}
