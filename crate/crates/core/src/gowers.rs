//! Multiplicative derivatives and Gowers uniformity norms.
//!
//! `||f||_{U_s}^{2^s} = E_{x,h_1..h_s} prod_{T ⊆ [s]} f(x ⊕ h_T)` for real
//! tables. Exact values for `s >= 3` run the derivative recursion
//! `||f||_{U_s}^{2^s} = E_{h_1..h_{s-2}} ||∂_{h_1..h_{s-2}} f||_{U_2}^4` with
//! the inner `U_2` taken from the spectrum (`sum_S f^(S)^4`). Monte Carlo
//! samples only the outer directions.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitcore::{compensated_sum, low_mask, BitVector, CompensatedSum, RealFunctionTable};
use crate::error::{check_dim, Error, Result};
use crate::estimate::{stream_rng, EstimateMode, Mode, SampleSummary};
use crate::fourier::{butterfly, wht};

/// Largest dimension for the exact `U_2` (one transform).
pub const MAX_EXACT_U2_DIM: u32 = 24;

/// Exact `U_s`, `s >= 3`, runs `2^{dim (s-1)}` work; this caps the exponent.
pub const EXACT_WORK_BUDGET_LOG2: u32 = 30;

/// Outer-direction tuples handled per reduction chunk.
const CHUNK: u64 = 256;

/// A Gowers norm value with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GowersEstimate {
    pub s: u32,
    /// `||f||_{U_s}^{2^s}`.
    pub value_pow: f64,
    /// `||f||_{U_s}`, or 0 when a Monte Carlo `value_pow` came out negative.
    pub value: f64,
    pub mode: EstimateMode,
    pub samples: u64,
    pub seed: Option<u64>,
    /// 95% half-width on `value_pow`; 0 in exact mode.
    pub ci_radius: f64,
    pub clipped: bool,
}

impl GowersEstimate {
    fn from_pow(s: u32, value_pow: f64, mode: EstimateMode, samples: u64, seed: Option<u64>, ci_radius: f64) -> Self {
        let clipped = value_pow < 0.0;
        let value = if clipped {
            0.0
        } else {
            value_pow.powf(1.0 / f64::from(1u32 << s))
        };
        Self {
            s,
            value_pow,
            value,
            mode,
            samples,
            seed,
            ci_radius,
            clipped,
        }
    }
}

/// `x ↦ f(x ⊕ h) f(x)` (complex conjugation is the identity on real tables).
pub fn derivative(f: &RealFunctionTable, h: &BitVector) -> Result<RealFunctionTable> {
    check_dim(f.dim(), h.dim())?;
    RealFunctionTable::new(f.dim(), derive(f.values(), h.bits()))
}

/// Iterated derivative `∂_{h_1} ∂_{h_2} ... f`.
pub fn derivative_many(f: &RealFunctionTable, directions: &[BitVector]) -> Result<RealFunctionTable> {
    let mut current = f.clone();
    for h in directions.iter().rev() {
        current = derivative(&current, h)?;
    }
    Ok(current)
}

fn derive(values: &[f64], h: u64) -> Vec<f64> {
    let h = h as usize;
    values
        .iter()
        .enumerate()
        .map(|(x, &v)| values[x ^ h] * v)
        .collect()
}

fn derive_into(values: &[f64], h: u64, out: &mut [f64]) {
    let h = h as usize;
    for (x, slot) in out.iter_mut().enumerate() {
        *slot = values[x ^ h] * values[x];
    }
}

/// `||g||_{U_2}^4 = sum_S g^(S)^4` using a scratch buffer.
fn u2_pow_in_place(scratch: &mut [f64]) -> f64 {
    butterfly(scratch);
    let scale = 1.0 / scratch.len() as f64;
    compensated_sum(scratch.iter().map(|&c| {
        let sq = (c * scale) * (c * scale);
        sq * sq
    }))
}

/// `||∂_{h_1..h_k} f||_{U_2}^4`, with `scratch`/`spare` of table length.
fn derived_u2_pow(f: &[f64], directions: &[u64], scratch: &mut Vec<f64>, spare: &mut Vec<f64>) -> f64 {
    scratch.copy_from_slice(f);
    for &h in directions {
        derive_into(scratch, h, spare);
        std::mem::swap(scratch, spare);
    }
    u2_pow_in_place(scratch)
}

fn check_order(s: u32) -> Result<()> {
    if s == 0 {
        Err(Error::InvalidArgument("Gowers order s must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Exact `U_s` norm.
pub fn gowers_norm_exact(f: &RealFunctionTable, s: u32) -> Result<GowersEstimate> {
    check_order(s)?;
    let m = f.dim();
    let value_pow = match s {
        1 => {
            let mean = f.mean();
            mean * mean
        }
        2 => {
            if m > MAX_EXACT_U2_DIM {
                return Err(Error::BudgetExceeded {
                    cost_log2: m,
                    budget_log2: MAX_EXACT_U2_DIM,
                });
            }
            wht(f)?.sum_fourth_powers()
        }
        _ => {
            let cost = m * (s - 1);
            if m > MAX_EXACT_U2_DIM || cost > EXACT_WORK_BUDGET_LOG2 {
                return Err(Error::BudgetExceeded {
                    cost_log2: cost,
                    budget_log2: EXACT_WORK_BUDGET_LOG2,
                });
            }
            exact_recursion(f, s)
        }
    };
    let mut est = GowersEstimate::from_pow(s, value_pow, EstimateMode::Exact, 0, None, 0.0);
    if s == 1 {
        est.value = f.mean().abs();
    }
    Ok(est)
}

/// Average of `||∂_h f||_{U_2}^4` over every outer tuple, reduced in fixed
/// chunks so the result does not depend on the thread count.
fn exact_recursion(f: &RealFunctionTable, s: u32) -> f64 {
    let m = f.dim();
    let outer = s - 2;
    let tuples: u64 = 1u64 << (m * outer);
    let mask = low_mask(m);
    let chunks = tuples.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut scratch = vec![0.0; f.len()];
            let mut spare = vec![0.0; f.len()];
            let mut directions = vec![0u64; outer as usize];
            let mut acc = CompensatedSum::new();
            for t in c * CHUNK..((c + 1) * CHUNK).min(tuples) {
                for (i, h) in directions.iter_mut().enumerate() {
                    *h = (t >> (m * i as u32)) & mask;
                }
                acc.add(derived_u2_pow(f.values(), &directions, &mut scratch, &mut spare));
            }
            acc.total()
        })
        .collect();
    compensated_sum(partials) / tuples as f64
}

/// Monte Carlo `U_s` for `s >= 3`: sample `i` draws its outer directions
/// from stream `i` of `seed`, then takes the exact inner `U_2`.
pub fn gowers_norm_mc(f: &RealFunctionTable, s: u32, samples: u64, seed: u64) -> Result<GowersEstimate> {
    if s < 3 {
        return Err(Error::InvalidArgument(format!(
            "Monte Carlo needs s >= 3 (exact is always feasible for s = {s})"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let m = f.dim();
    if m > MAX_EXACT_U2_DIM {
        return Err(Error::DimensionTooLarge {
            what: "the inner U_2 transform",
            dim: m,
            limit: MAX_EXACT_U2_DIM,
        });
    }
    let outer = (s - 2) as usize;
    let mask = low_mask(m);
    let chunks = samples.div_ceil(CHUNK);
    let values: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut scratch = vec![0.0; f.len()];
            let mut spare = vec![0.0; f.len()];
            let mut directions = vec![0u64; outer];
            (c * CHUNK..((c + 1) * CHUNK).min(samples))
                .map(|i| {
                    let mut rng = stream_rng(seed, i);
                    for h in directions.iter_mut() {
                        *h = rng.random::<u64>() & mask;
                    }
                    derived_u2_pow(f.values(), &directions, &mut scratch, &mut spare)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let summary = SampleSummary::from_samples(&values);
    Ok(GowersEstimate::from_pow(
        s,
        summary.mean,
        EstimateMode::MonteCarlo,
        samples,
        Some(seed),
        summary.ci95(),
    ))
}

/// Dispatches on `mode`; `s <= 2` is always computed exactly.
pub fn gowers_norm(f: &RealFunctionTable, s: u32, mode: Mode) -> Result<GowersEstimate> {
    match mode {
        Mode::MonteCarlo { samples, seed } if s >= 3 => gowers_norm_mc(f, s, samples, seed),
        _ => gowers_norm_exact(f, s),
    }
}

/// Brute-force `E_{x,h_1..h_s} prod_T f(x ⊕ h_T)` over all
/// `2^{dim (s+1)}` configurations. Oracle for small tables.
pub fn gowers_pow_direct(f: &RealFunctionTable, s: u32) -> Result<f64> {
    check_order(s)?;
    let m = f.dim();
    let cost = m * (s + 1);
    if cost > 26 {
        return Err(Error::BudgetExceeded {
            cost_log2: cost,
            budget_log2: 26,
        });
    }
    let mask = low_mask(m);
    let vals = f.values();
    let configs: u64 = 1 << (m * s);
    let per_x: Vec<f64> = (0..f.len() as u64)
        .into_par_iter()
        .map(|x| {
            let mut acc = CompensatedSum::new();
            let mut hs = vec![0u64; s as usize];
            for c in 0..configs {
                for (i, h) in hs.iter_mut().enumerate() {
                    *h = (c >> (m * i as u32)) & mask;
                }
                let mut prod = 1.0;
                for t in 0u32..1 << s {
                    let mut p = x;
                    for (i, h) in hs.iter().enumerate() {
                        if t >> i & 1 == 1 {
                            p ^= h;
                        }
                    }
                    prod *= vals[p as usize];
                }
                acc.add(prod);
            }
            acc.total()
        })
        .collect();
    Ok(compensated_sum(per_x) / (f.len() as f64 * configs as f64))
}

/// Exact integer `sum_{x,h_1..h_d} prod_{T ⊆ [d]} F(x ⊕ h_T)` for a
/// `{-1, 0, 1}`-valued table `F`. Equal to `2^{m(d+1)} ||F||_{U_d}^{2^d}`.
pub fn parallelepiped_sum(values: &[i8], dim: u32, d: u32) -> Result<i128> {
    if values.len() != 1usize << dim {
        return Err(Error::TableLength {
            dim,
            expected: 1usize << dim,
            found: values.len(),
        });
    }
    if values.iter().any(|v| !(-1..=1).contains(v)) {
        return Err(Error::InvalidArgument(
            "parallelepiped sums take {-1, 0, 1} tables".into(),
        ));
    }
    // Intermediate sums stay below 2^{m(d+2)}; the outer loop costs 2^{m(d-1)}.
    if dim * (d + 2) > 124 || (d >= 3 && dim * (d - 1) > EXACT_WORK_BUDGET_LOG2) || dim > MAX_EXACT_U2_DIM {
        return Err(Error::BudgetExceeded {
            cost_log2: dim * (d.max(1) - 1).max(1),
            budget_log2: EXACT_WORK_BUDGET_LOG2,
        });
    }
    let wide: Vec<i64> = values.iter().map(|&v| i64::from(v)).collect();
    Ok(match d {
        0 => wide.iter().map(|&v| i128::from(v)).sum(),
        1 => {
            let s: i128 = wide.iter().map(|&v| i128::from(v)).sum();
            s * s
        }
        _ => {
            let outer = d - 2;
            let tuples: u64 = 1u64 << (dim * outer);
            let mask = low_mask(dim);
            let chunks = tuples.div_ceil(CHUNK);
            let partials: Vec<i128> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut scratch = vec![0i64; wide.len()];
                    let mut spare = vec![0i64; wide.len()];
                    let mut total = 0i128;
                    for t in c * CHUNK..((c + 1) * CHUNK).min(tuples) {
                        scratch.copy_from_slice(&wide);
                        for i in 0..outer {
                            let h = ((t >> (dim * i)) & mask) as usize;
                            for (x, slot) in spare.iter_mut().enumerate() {
                                *slot = scratch[x ^ h] * scratch[x];
                            }
                            std::mem::swap(&mut scratch, &mut spare);
                        }
                        butterfly(&mut scratch);
                        total += scratch
                            .iter()
                            .map(|&w| {
                                let sq = i128::from(w) * i128::from(w);
                                sq * sq
                            })
                            .sum::<i128>();
                    }
                    total
                })
                .collect();
            let sum: i128 = partials.into_iter().sum();
            // sum_S W(S)^4 = 2^m * sum_{x,h,h'} F F F F.
            debug_assert_eq!(sum % (1i128 << dim), 0);
            sum >> dim
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(dim: u32, seed: u64) -> RealFunctionTable {
        crate::synth::random_table(dim, seed).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let chi = RealFunctionTable::character(4, 0b0101).unwrap();
        for h in 0..16 {
            let d = derivative(&chi, &BitVector::new(h, 4).unwrap()).unwrap();
            let c = if (h & 0b0101).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            assert!(d.values().iter().all(|&v| v == c));
        }
        let f = table(4, 1);
        let d0 = derivative(&f, &BitVector::zero(4)).unwrap();
        for (a, b) in d0.values().iter().zip(f.values()) {
            assert_eq!(*a, b * b);
        }
        let z = RealFunctionTable::from_fn(4, |x| if x == 0 { 1.0 } else { 0.0 }).unwrap();
        let dz = derivative(&z, &"1000".parse().unwrap()).unwrap();
        assert!(dz.values().iter().all(|&v| v == 0.0));
        assert!(derivative(&z, &BitVector::zero(3)).is_err());
    }

    #[test]
    fn derivatives_commute() {
        let f = table(5, 2);
        let (a, b) = (BitVector::new(0b10110, 5).unwrap(), BitVector::new(0b01011, 5).unwrap());
        let ab = derivative(&derivative(&f, &a).unwrap(), &b).unwrap();
        let ba = derivative(&derivative(&f, &b).unwrap(), &a).unwrap();
        for (x, y) in ab.values().iter().zip(ba.values()) {
            assert!((x - y).abs() <= 1e-15);
        }
    }

    #[test]
    fn constant_one_has_unit_norm_for_every_order() {
        let one = RealFunctionTable::constant(4, 1.0).unwrap();
        for s in 1..=4 {
            let e = gowers_norm_exact(&one, s).unwrap();
            assert_eq!(e.value, 1.0);
            assert_eq!(e.mode, EstimateMode::Exact);
        }
    }

    #[test]
    fn characters_have_unit_u2() {
        let chi = RealFunctionTable::character(6, 0b100101).unwrap();
        assert_eq!(gowers_norm_exact(&chi, 2).unwrap().value, 1.0);
        assert_eq!(gowers_norm_exact(&chi, 3).unwrap().value, 1.0);
    }

    #[test]
    fn u2_fourier_route_matches_direct_enumeration() {
        for seed in 0..5 {
            let f = table(5, seed);
            let fourier = gowers_norm_exact(&f, 2).unwrap().value_pow;
            let direct = gowers_pow_direct(&f, 2).unwrap();
            assert!((fourier - direct).abs() <= 1e-10 * direct.abs());
        }
    }

    #[test]
    fn u3_recursion_matches_direct_enumeration() {
        for seed in 0..3 {
            let f = table(4, seed + 10);
            let rec = gowers_norm_exact(&f, 3).unwrap().value_pow;
            let direct = gowers_pow_direct(&f, 3).unwrap();
            assert!((rec - direct).abs() <= 1e-10 * direct.abs(), "{rec} vs {direct}");
        }
    }

    #[test]
    fn u1_is_absolute_mean() {
        let f = table(6, 3);
        let e = gowers_norm_exact(&f, 1).unwrap();
        assert_eq!(e.value, f.mean().abs());
        assert!((gowers_pow_direct(&f, 1).unwrap() - e.value_pow).abs() < 1e-12);
    }

    #[test]
    fn budget_errors_point_to_monte_carlo() {
        let f = RealFunctionTable::constant(16, 1.0).unwrap();
        let err = gowers_norm_exact(&f, 3).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(err.to_string().contains("--mode mc"));
        assert!(gowers_norm_exact(&f, 0).is_err());
    }

    #[test]
    fn mc_is_exact_on_constant_and_characters() {
        let one = RealFunctionTable::constant(6, 1.0).unwrap();
        let e = gowers_norm_mc(&one, 3, 100, 9).unwrap();
        assert_eq!((e.value_pow, e.ci_radius), (1.0, 0.0));
        let chi = RealFunctionTable::character(6, 0b11).unwrap();
        let e = gowers_norm_mc(&chi, 4, 50, 9).unwrap();
        assert_eq!(e.value_pow, 1.0);
        assert_eq!(e.seed, Some(9));
        assert!(gowers_norm_mc(&chi, 2, 50, 9).is_err());
        assert!(gowers_norm_mc(&chi, 3, 0, 9).is_err());
    }

    #[test]
    fn mc_is_deterministic_per_seed() {
        let f = table(6, 4);
        let a = gowers_norm_mc(&f, 3, 300, 5).unwrap();
        let b = gowers_norm_mc(&f, 3, 300, 5).unwrap();
        assert_eq!(a, b);
        let c = gowers_norm_mc(&f, 3, 300, 6).unwrap();
        assert_ne!(a.value_pow, c.value_pow);
    }

    #[test]
    fn clipping_is_flagged() {
        let e = GowersEstimate::from_pow(3, -1e-3, EstimateMode::MonteCarlo, 10, Some(0), 1e-2);
        assert!(e.clipped);
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn integer_parallelepiped_sums_match_float_norms() {
        let mut rng = stream_rng(77, 0);
        let values: Vec<i8> = (0..64).map(|_| rng.random_range(-1..=1)).collect();
        let real = RealFunctionTable::new(6, values.iter().map(|&v| f64::from(v)).collect()).unwrap();
        for d in 1..=3u32 {
            let exact = parallelepiped_sum(&values, 6, d).unwrap() as f64;
            let scale = 2f64.powi(6 * (d as i32 + 1));
            let norm_pow = gowers_norm_exact(&real, d).unwrap().value_pow;
            assert!((exact / scale - norm_pow).abs() < 1e-12, "d={d}");
        }
        assert_eq!(
            parallelepiped_sum(&values, 6, 0).unwrap(),
            values.iter().map(|&v| i128::from(v)).sum::<i128>()
        );
    }
}
