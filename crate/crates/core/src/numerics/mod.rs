//! Small numerical kernels shared across the crate: deterministic
//! summation, double-double arithmetic for lattice searches, adaptive
//! Gauss-Kronrod quadrature and a Halton low-discrepancy sequence.

mod dd;
pub mod quad;

pub use dd::Dd;

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation. The association order depends only on the
/// slice length, so results are reproducible bit for bit.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Radical inverse of `index` in the given prime `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut acc = 0.0;
    while index > 0 {
        acc += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    acc
}

/// `dim`-dimensional Halton point with index `i` (bases 2, 3, 5, 7, 11, 13).
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    assert!(dim <= PRIMES.len(), "halton: at most 6 dimensions");
    PRIMES[..dim]
        .iter()
        .map(|&b| radical_inverse(i + 1, b))
        .collect()
}

/// Quintic smoothstep: 0 below `lo`, 1 above `hi`, C² in between.
pub fn smoothstep(x: f64, lo: f64, hi: f64) -> f64 {
    if x <= lo {
        0.0
    } else if x >= hi {
        1.0
    } else {
        let t = (x - lo) / (hi - lo);
        t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

/// `atan(t) / t`, continuous at `t = 0`.
pub fn atan_over(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 3.0
    } else {
        t.atan() / t
    }
}
