//! Deterministic Bernoulli datasets.
//!
//! Cells are drawn in row-major order from a single splitmix64 stream
//! seeded with the spec seed. A cell is one when the top 53 bits of its
//! draw, read as a fraction in `[0, 1)`, fall below the density.

use crate::binmat::BinaryMatrix;
use crate::error::{Error, Result};

/// The splitmix64 generator (Steele, Lea & Flood). One `u64` of state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Shape, density (probability of a one) and seed of a generated dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub n_rows: usize,
    pub n_cols: usize,
    pub density: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(n_rows: usize, n_cols: usize, density: f64, seed: u64) -> Self {
        Self {
            n_rows,
            n_cols,
            density,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rows == 0 || self.n_cols == 0 {
            return Err(Error::Dimension(format!(
                "generated matrix must be at least 1x1, got {}x{}",
                self.n_rows, self.n_cols
            )));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::Domain(format!(
                "density {} outside [0, 1]",
                self.density
            )));
        }
        Ok(())
    }
}

pub fn generate(spec: &GenSpec) -> Result<BinaryMatrix> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let density = spec.density;
    BinaryMatrix::from_fn(spec.n_rows, spec.n_cols, |_, _| rng.next_f64() < density)
}
