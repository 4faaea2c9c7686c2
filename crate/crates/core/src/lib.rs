//! All-pairs mutual information for binary datasets.
//!
//! For an `n × m` binary matrix `D`, the mutual information between every
//! pair of columns follows from four co-occurrence count matrices. Only
//! one of them, `DᵀD`, requires touching the data; the other three are
//! closed-form functions of it, the column sums and `n`. This crate
//! computes `DᵀD` with bit-packed AND + popcount (or sorted index lists for
//! very sparse data) and assembles the MI matrix from it.
//!
//! ```
//! use binmi::{mi_all_pairs, Backend, BinaryMatrix, EngineConfig};
//!
//! let d = BinaryMatrix::from_rows(&[[0, 0], [1, 1], [0, 0], [1, 1]]).unwrap();
//! let mi = mi_all_pairs(&d, &EngineConfig::default(), Backend::Dense).unwrap();
//! assert_eq!(mi.get(0, 1), 1.0);
//! ```
//!
//! Memory: the MI matrix and each count matrix are dense `m × m` arrays of
//! 8-byte values, so a full run holds roughly `7 · 8 · m²` bytes at peak
//! (about 5.6 GB at `m = 10 000`). Keep `m` within what that allows.

pub mod bench;
pub mod binmat;
pub mod datagen;
pub mod error;
pub mod gram;
pub mod io;
mod kernel;
pub mod mi;

pub use binmat::{BinaryMatrix, SparseBinaryMatrix};
pub use datagen::{generate, GenSpec, SplitMix64};
pub use error::{Error, Result};
pub use gram::{
    gram_complete_direct, gram_complete_optimized, gram_ones, gram_ones_sparse, CountMatrix,
    GramSet,
};
pub use mi::{
    binary_entropy, mi_all_pairs, mi_all_pairs_naive, mi_from_probabilities, mi_pairwise_naive,
    mi_pairwise_naive_with, probabilities, Backend, Dataset, EngineConfig, FloatMatrix, LogMode,
    MIMatrix, ProbabilitySet,
};
