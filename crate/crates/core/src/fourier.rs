//! Characters, the Walsh-Hadamard transform and level weights.
//!
//! Coefficients are expectations: `coeffs[S] = E_x[f(x) chi_S(x)]`. The
//! butterfly works on unnormalized sums and divides by `2^m` once.

use std::ops::{Add, Sub};

use rayon::prelude::*;
use serde::Serialize;

use crate::bitcore::{compensated_sum, BitVector, RealFunctionTable};
use crate::error::{Error, Result};

/// Largest dimension accepted by [`wht`].
pub const MAX_WHT_DIM: u32 = 28;

/// Half-blocks at least this long are split across threads.
const PAR_THRESHOLD: usize = 1 << 13;

/// `chi_S(x) = (-1)^{|S ∧ x|}`.
pub fn character_eval(subset: &BitVector, x: &BitVector) -> Result<i32> {
    let both = subset.and(x)?;
    Ok(if both.weight() % 2 == 0 { 1 } else { -1 })
}

#[inline]
pub(crate) fn chi(subset: u64, x: u64) -> f64 {
    if (subset & x).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// In-place unnormalized Walsh-Hadamard butterfly:
/// `data[S] <- sum_x data[x] chi_S(x)`.
///
/// Every output is produced by the same sequence of additions whatever the
/// thread count.
pub fn butterfly<T>(data: &mut [T])
where
    T: Copy + Send + Sync + Add<Output = T> + Sub<Output = T>,
{
    let n = data.len();
    assert!(n.is_power_of_two(), "butterfly length must be a power of two");
    let mut half = 1;
    while half < n {
        let step = |block: &mut [T]| {
            let (lo, hi) = block.split_at_mut(half);
            if half >= PAR_THRESHOLD {
                lo.par_iter_mut().zip(hi.par_iter_mut()).for_each(|(a, b)| {
                    let (u, v) = (*a, *b);
                    *a = u + v;
                    *b = u - v;
                });
            } else {
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (u, v) = (*a, *b);
                    *a = u + v;
                    *b = u - v;
                }
            }
        };
        if n >= PAR_THRESHOLD && half < PAR_THRESHOLD {
            data.par_chunks_mut(2 * half).for_each(step);
        } else {
            data.chunks_mut(2 * half).for_each(step);
        }
        half *= 2;
    }
}

/// Fourier coefficients of a table, indexed by integer-encoded subsets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierSpectrum {
    dim: u32,
    coeffs: Vec<f64>,
}

impl FourierSpectrum {
    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, subset: u64) -> f64 {
        self.coeffs[subset as usize]
    }

    /// `sum_S coeffs[S]^2`.
    pub fn total_weight(&self) -> f64 {
        compensated_sum(self.coeffs.iter().map(|c| c * c))
    }

    /// `sum_S coeffs[S]^4`; for real `f` this is `||f||_{U_2}^4`.
    pub fn sum_fourth_powers(&self) -> f64 {
        compensated_sum(self.coeffs.iter().map(|c| {
            let sq = c * c;
            sq * sq
        }))
    }

    /// Largest `|coeff|`, with the smallest subset encoding among ties.
    pub fn argmax_abs(&self) -> (u64, f64) {
        let mut best = (0u64, self.coeffs[0]);
        for (s, &c) in self.coeffs.iter().enumerate().skip(1) {
            if c.abs() > best.1.abs() {
                best = (s as u64, c);
            }
        }
        best
    }

    /// The `k` largest coefficients by magnitude, descending; ties keep
    /// ascending subset order.
    pub fn top(&self, k: usize) -> Vec<(u64, f64)> {
        let mut entries: Vec<(u64, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(s, &c)| (s as u64, c))
            .collect();
        entries.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        entries.truncate(k);
        entries
    }

    /// `W_{<=d}[f]`.
    pub fn level_weight(&self, d: u32) -> Result<f64> {
        if d > self.dim {
            return Err(Error::InvalidArgument(format!(
                "level {d} exceeds dimension {}",
                self.dim
            )));
        }
        Ok(compensated_sum(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(s, _)| s.count_ones() <= d)
                .map(|(_, c)| c * c),
        ))
    }

    /// Reconstructs `f = sum_S coeffs[S] chi_S`.
    pub fn inverse(&self) -> Result<RealFunctionTable> {
        let mut values = self.coeffs.clone();
        butterfly(&mut values);
        RealFunctionTable::new(self.dim, values)
    }
}

fn check_wht_dim(dim: u32) -> Result<()> {
    if dim > MAX_WHT_DIM {
        Err(Error::DimensionTooLarge {
            what: "the Walsh-Hadamard transform",
            dim,
            limit: MAX_WHT_DIM,
        })
    } else {
        Ok(())
    }
}

/// Normalized Walsh-Hadamard transform.
pub fn wht(f: &RealFunctionTable) -> Result<FourierSpectrum> {
    check_wht_dim(f.dim())?;
    let mut coeffs = f.values().to_vec();
    butterfly(&mut coeffs);
    let scale = 1.0 / f.len() as f64;
    coeffs.iter_mut().for_each(|c| *c *= scale);
    Ok(FourierSpectrum {
        dim: f.dim(),
        coeffs,
    })
}

/// Inverse of [`wht`].
pub fn inverse_wht(spec: &FourierSpectrum) -> Result<RealFunctionTable> {
    spec.inverse()
}

/// Builds a spectrum from coefficients, e.g. to synthesize a function.
pub fn spectrum_from_coeffs(dim: u32, coeffs: Vec<f64>) -> Result<FourierSpectrum> {
    check_wht_dim(dim)?;
    let table = RealFunctionTable::new(dim, coeffs)?;
    Ok(FourierSpectrum {
        dim,
        coeffs: table.into_values(),
    })
}

pub fn level_weight(spec: &FourierSpectrum, d: u32) -> Result<f64> {
    spec.level_weight(d)
}

/// Level-d inequality metrics for a `{-1, 0, 1}`-valued function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelInequalityReport {
    pub level: u32,
    /// `E[|f|]`.
    pub alpha: f64,
    /// `W_{<=d}[f]`.
    pub weight: f64,
    /// `W / alpha^2`.
    pub ratio: f64,
    /// `alpha^2 * #{S : |S| <= d}`, which `weight` never exceeds.
    pub explicit_bound: f64,
    /// `ln(1/alpha)`.
    pub log_inv_alpha: f64,
    /// `c` with `ratio = ln(1/alpha)^c`, when `ln(1/alpha) > 1` and
    /// `ratio > 0`. Monitoring only.
    pub polylog_exponent: Option<f64>,
}

fn subsets_up_to(dim: u32, d: u32) -> f64 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for i in 0..=d.min(dim) {
        total += binom;
        binom = binom * (dim - i) as u128 / (i + 1) as u128;
    }
    total as f64
}

pub fn level_inequality_report(f: &RealFunctionTable, d: u32) -> Result<LevelInequalityReport> {
    if let Some((index, &value)) = f
        .values()
        .iter()
        .enumerate()
        .find(|(_, &v)| v != 0.0 && v != 1.0 && v != -1.0)
    {
        return Err(Error::ValueOutOfRange {
            index,
            value,
            allowed: "{-1, 0, 1}",
        });
    }
    let alpha = f.l1_mean();
    if alpha == 0.0 {
        return Err(Error::InvalidArgument(
            "level inequality needs E[|f|] > 0".into(),
        ));
    }
    let weight = wht(f)?.level_weight(d)?;
    let ratio = weight / (alpha * alpha);
    let explicit_bound = alpha * alpha * subsets_up_to(f.dim(), d);
    // |f^(S)| <= alpha for every S, so this cannot fail short of rounding.
    assert!(
        weight <= explicit_bound * (1.0 + 1e-12),
        "level weight {weight} exceeds alpha^2 * #subsets = {explicit_bound}"
    );
    let log_inv_alpha = (1.0 / alpha).ln();
    let polylog_exponent = (log_inv_alpha > 1.0 && ratio > 0.0)
        .then(|| ratio.ln() / log_inv_alpha.ln());
    Ok(LevelInequalityReport {
        level: d,
        alpha,
        weight,
        ratio,
        explicit_bound,
        log_inv_alpha,
        polylog_exponent,
    })
}

/// Direct `O(4^m)` evaluation of one coefficient, for cross-checks.
pub fn coefficient_direct(f: &RealFunctionTable, subset: u64) -> f64 {
    compensated_sum(
        f.values()
            .iter()
            .enumerate()
            .map(|(x, &v)| v * chi(subset, x as u64)),
    ) / f.len() as f64
}
