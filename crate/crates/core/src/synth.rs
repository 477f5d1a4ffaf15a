//! Seeded generators for test instances.

use rand::Rng;

use crate::bitcore::RealFunctionTable;
use crate::error::Result;
use crate::estimate::stream_rng;
use crate::nonclassical::TorusPolynomial;

/// Entries uniform in `[-1, 1)`.
pub fn random_table(dim: u32, seed: u64) -> Result<RealFunctionTable> {
    let mut rng = stream_rng(seed, 0);
    let values = (0..1u64 << dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    RealFunctionTable::new(dim, values)
}

/// Entries uniform in `{-1, 1}`.
pub fn random_sign_table(dim: u32, seed: u64) -> Result<RealFunctionTable> {
    let mut rng = stream_rng(seed, 0);
    let values = (0..1u64 << dim)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    RealFunctionTable::new(dim, values)
}

/// Entries uniform in `{-1, 0, 1}`.
pub fn random_ternary_table(dim: u32, seed: u64) -> Result<RealFunctionTable> {
    let mut rng = stream_rng(seed, 0);
    let values = (0..1u64 << dim).map(|_| f64::from(rng.random_range(-1i8..=1))).collect();
    RealFunctionTable::new(dim, values)
}

/// A random non-classical polynomial of degree at most `d`: a sum of terms
/// `c x_S / 2^k` with `|S| + k - 1 <= d`, each of which has degree
/// `|S| + k - 1`.
pub fn random_torus_polynomial(dim: u32, d: u32, terms: usize, seed: u64) -> Result<TorusPolynomial> {
    let mut rng = stream_rng(seed, 0);
    let q = d + 1;
    let mut acc = TorusPolynomial::zero(dim)?.lifted(q)?;
    for _ in 0..terms {
        let k = rng.random_range(1..=d + 1);
        let max_size = (d + 1 - k).min(dim);
        let size = rng.random_range(0..=max_size);
        let mut subset = 0u64;
        while subset.count_ones() < size {
            subset |= 1 << rng.random_range(0..dim);
        }
        let c = rng.random_range(1..1u64 << k);
        let term = TorusPolynomial::from_fn(dim, q, |x| {
            if x & subset == subset {
                i128::from(c << (q - k))
            } else {
                0
            }
        })?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}
