//! Word-level popcount kernels over pairs of packed columns.
//!
//! Each kernel has one portable body; on x86_64 the same body is also
//! compiled with AVX-512 VPOPCNTDQ and with AVX2/POPCNT enabled, and the
//! best supported variant is selected at runtime. Enabling the features
//! lets LLVM vectorize the popcount. Results are integers, so every variant
//! returns the same count.

use std::sync::OnceLock;

/// Which cell of the 2×2 contingency table a kernel counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cell {
    /// `a & b`
    Ones,
    /// `!a & !b`
    Zeros,
    /// `!a & b`
    ZeroOne,
}

/// Counts rows in `a`/`b` (same length) falling into `cell`. `tail` masks
/// the valid bits of the final word; it only matters when `a` and `b`
/// cover the end of the column.
#[inline]
pub(crate) fn count(cell: Cell, a: &[u64], b: &[u64], tail: u64) -> u64 {
    debug_assert_eq!(a.len(), b.len());
    #[cfg(target_arch = "x86_64")]
    {
        match level() {
            // SAFETY: the required features were detected at runtime.
            Level::Avx512 => return unsafe { count_avx512(cell, a, b, tail) },
            Level::Avx2 => return unsafe { count_avx2(cell, a, b, tail) },
            Level::Portable => {}
        }
    }
    count_portable(cell, a, b, tail)
}

#[cfg(target_arch = "x86_64")]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Level {
    Avx512,
    Avx2,
    Portable,
}

#[cfg(target_arch = "x86_64")]
fn level() -> Level {
    use std::arch::is_x86_feature_detected as has;
    static LEVEL: OnceLock<Level> = OnceLock::new();
    *LEVEL.get_or_init(|| {
        if has!("avx512f") && has!("avx512vpopcntdq") {
            Level::Avx512
        } else if has!("avx2") && has!("popcnt") {
            Level::Avx2
        } else {
            Level::Portable
        }
    })
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f,avx512vpopcntdq,popcnt")]
unsafe fn count_avx512(cell: Cell, a: &[u64], b: &[u64], tail: u64) -> u64 {
    count_body(cell, a, b, tail)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2,popcnt")]
unsafe fn count_avx2(cell: Cell, a: &[u64], b: &[u64], tail: u64) -> u64 {
    count_body(cell, a, b, tail)
}

#[allow(dead_code)]
fn count_portable(cell: Cell, a: &[u64], b: &[u64], tail: u64) -> u64 {
    count_body(cell, a, b, tail)
}

#[inline(always)]
fn count_body(cell: Cell, a: &[u64], b: &[u64], tail: u64) -> u64 {
    let Some(last) = a.len().checked_sub(1) else {
        return 0;
    };
    let (a_head, b_head) = (&a[..last], &b[..last]);
    let (x, y) = (a[last], b[last]);
    match cell {
        Cell::Ones => reduce(a_head, b_head, |x, y| x & y) + u64::from((x & y).count_ones()),
        Cell::Zeros => {
            reduce(a_head, b_head, |x, y| !x & !y) + u64::from((!x & !y & tail).count_ones())
        }
        Cell::ZeroOne => {
            reduce(a_head, b_head, |x, y| !x & y) + u64::from((!x & tail & y).count_ones())
        }
    }
}

#[inline(always)]
fn reduce(a: &[u64], b: &[u64], op: impl Fn(u64, u64) -> u64) -> u64 {
    let mut acc = [0u64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            acc[k] += u64::from(op(x[k], y[k]).count_ones());
        }
    }
    let rest: u64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(&x, &y)| u64::from(op(x, y).count_ones()))
        .sum();
    acc.iter().sum::<u64>() + rest
}
