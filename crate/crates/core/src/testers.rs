//! Property testers on the middle slice: the quadruple (linearity) test,
//! the d-Gowers test, exact and sampled pass rates, and linear decoding
//! through the Fourier spectrum of the reweighted sign function.
//!
//! Exact pass rates are integer counts. With `F = (-1)^f 1_U`,
//! `sum_{x,h_1..h_d} prod_T F(x ⊕ h_T)` is the signed count of
//! parallelepipeds inside the slice and the same sum for `1_U` is their
//! total, so `passes = (total + signed) / 2`. Both sums come from
//! [`parallelepiped_sum`]. The quadruple test is the case `d = 2`
//! (`y = x ⊕ h_1`, `z = x ⊕ h_2`).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitcore::RealFunctionTable;
use crate::error::{Error, Result};
use crate::estimate::{proportion_ci95, stream_rng, EstimateMode, Mode};
use crate::fourier::{butterfly, wht};
use crate::gowers::parallelepiped_sum;
use crate::slicemodel::{big_to_f64, domain_members, sample_conditioned, DomainSpec, SampleShape};

/// Monte Carlo trials handled per random stream.
const TRIALS_PER_STREAM: u64 = 1024;

/// A Boolean function on the middle slice of `{0,1}^{2n}`, stored as a
/// full table whose off-slice entries are ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceFunction {
    n: u32,
    values: Vec<bool>,
}

impl SliceFunction {
    pub fn new(n: u32, values: Vec<bool>) -> Result<Self> {
        let dim = 2 * n;
        if dim > 28 {
            return Err(Error::DimensionTooLarge {
                what: "slice function tables",
                dim,
                limit: 28,
            });
        }
        if values.len() != 1usize << dim {
            return Err(Error::TableLength {
                dim,
                expected: 1usize << dim,
                found: values.len(),
            });
        }
        let slice = DomainSpec::slice(n)?;
        let values = values
            .into_iter()
            .enumerate()
            .map(|(x, v)| v && slice.contains(x as u64))
            .collect();
        Ok(Self { n, values })
    }

    /// From a 0/1 table over an even dimension.
    pub fn from_table(dim: u32, values: Vec<bool>) -> Result<Self> {
        if !dim.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "slice functions need an even dimension, got {dim}"
            )));
        }
        Self::new(dim / 2, values)
    }

    pub fn from_fn(n: u32, f: impl Fn(u64) -> bool) -> Result<Self> {
        Self::new(n, (0..1u64 << (2 * n)).map(f).collect())
    }

    /// `b ⊕ L_S` with `L_S(x) = ⊕_{i in S} x_i`.
    pub fn affine(n: u32, subset: u64, b: bool) -> Result<Self> {
        Self::from_fn(n, |x| ((x & subset).count_ones() % 2 == 1) ^ b)
    }

    /// `L_S` with exactly `round(flip_rate * |U|)` slice points flipped,
    /// chosen uniformly by `seed`.
    pub fn planted_linear(n: u32, subset: u64, flip_rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip_rate) {
            return Err(Error::InvalidArgument(format!(
                "flip rate must be in [0, 1], got {flip_rate}"
            )));
        }
        let mut f = Self::affine(n, subset, false)?;
        let members = domain_members(&DomainSpec::slice(n)?)?;
        let flips = (flip_rate * members.len() as f64).round() as usize;
        let mut rng = stream_rng(seed, 0);
        for i in index::sample(&mut rng, members.len(), flips) {
            let x = members[i] as usize;
            f.values[x] = !f.values[x];
        }
        Ok(f)
    }

    /// Independent fair bits on the slice.
    pub fn random(n: u32, seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, 0);
        let slice = DomainSpec::slice(n)?;
        let values: Vec<bool> = (0..1u64 << (2 * n))
            .map(|x| slice.contains(x) && rng.random::<bool>())
            .collect();
        Self::new(n, values)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> u32 {
        2 * self.n
    }

    #[inline]
    pub fn eval(&self, x: u64) -> bool {
        self.values[x as usize]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn domain(&self) -> DomainSpec {
        DomainSpec::Slice { n: self.n }
    }

    /// `(-1)^{f(x)} 1_U(x)` as small integers.
    pub fn signed_indicator(&self) -> Vec<i8> {
        let slice = self.domain();
        self.values
            .iter()
            .enumerate()
            .map(|(x, &v)| match (slice.contains(x as u64), v) {
                (false, _) => 0,
                (true, false) => 1,
                (true, true) => -1,
            })
            .collect()
    }

    fn slice_indicator(&self) -> Vec<i8> {
        let slice = self.domain();
        (0..self.values.len() as u64)
            .map(|x| i8::from(slice.contains(x)))
            .collect()
    }
}

/// A pass rate with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestOutcome {
    pub pass_rate: f64,
    pub mode: EstimateMode,
    /// Configurations enumerated (exact) or sampled (Monte Carlo).
    pub trials: u64,
    pub passes: u64,
    pub seed: Option<u64>,
    /// 95% half-width; 0 in exact mode.
    pub ci_radius: f64,
}

impl TestOutcome {
    fn exact(passes: u64, total: u64) -> Self {
        Self {
            pass_rate: passes as f64 / total as f64,
            mode: EstimateMode::Exact,
            trials: total,
            passes,
            seed: None,
            ci_radius: 0.0,
        }
    }

    /// `pass_rate - 1/2`.
    pub fn advantage(&self) -> f64 {
        self.pass_rate - 0.5
    }
}

fn to_u64(v: i128, what: &str) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::InvalidArgument(format!("{what} count {v} does not fit in 64 bits")))
}

/// Exact `(passes, total)` for the `d`-Gowers test.
pub fn gowers_test_counts(f: &SliceFunction, d: u32) -> Result<(u64, u64)> {
    if d == 0 {
        return Err(Error::InvalidArgument("test order d must be at least 1".into()));
    }
    let signed = parallelepiped_sum(&f.signed_indicator(), f.dim(), d)?;
    let total = parallelepiped_sum(&f.slice_indicator(), f.dim(), d)?;
    debug_assert_eq!((total + signed) % 2, 0);
    Ok((to_u64((total + signed) / 2, "pass")?, to_u64(total, "total")?))
}

fn mc_pass_rate(f: &SliceFunction, shape: SampleShape, trials: u64, seed: u64) -> Result<TestOutcome> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let domain = f.domain();
    let streams = trials.div_ceil(TRIALS_PER_STREAM);
    let per_stream: Vec<u64> = (0..streams)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c);
            let count = TRIALS_PER_STREAM.min(trials - c * TRIALS_PER_STREAM);
            let mut passes = 0u64;
            for _ in 0..count {
                let sample = sample_conditioned(&domain, shape, &mut rng)?;
                let pts: Vec<u64> = sample.points.iter().map(|p| p.bits()).collect();
                let parity = match shape {
                    SampleShape::Quadruple => {
                        f.eval(pts[0]) ^ f.eval(pts[1]) ^ f.eval(pts[2]) ^ f.eval(pts[0] ^ pts[1] ^ pts[2])
                    }
                    SampleShape::Parallelepiped(d) => (0u64..1 << d).fold(false, |acc, t| {
                        let v = pts[1..]
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| t >> i & 1 == 1)
                            .fold(pts[0], |v, (_, h)| v ^ h);
                        acc ^ f.eval(v)
                    }),
                };
                if !parity {
                    passes += 1;
                }
            }
            Ok(passes)
        })
        .collect::<Result<Vec<_>>>()?;
    let passes: u64 = per_stream.iter().sum();
    Ok(TestOutcome {
        pass_rate: passes as f64 / trials as f64,
        mode: EstimateMode::MonteCarlo,
        trials,
        passes,
        seed: Some(seed),
        ci_radius: proportion_ci95(passes, trials),
    })
}

/// `Pr[f(x) ⊕ f(y) ⊕ f(z) = f(x ⊕ y ⊕ z)]` over `x, y, z, x ⊕ y ⊕ z` in
/// the slice.
pub fn linearity_pass_rate(f: &SliceFunction, mode: Mode) -> Result<TestOutcome> {
    match mode {
        Mode::Exact => {
            let (passes, total) = gowers_test_counts(f, 2)?;
            Ok(TestOutcome::exact(passes, total))
        }
        Mode::MonteCarlo { samples, seed } => mc_pass_rate(f, SampleShape::Quadruple, samples, seed),
    }
}

/// Pass rate of the parity check `sum_T f(x ⊕ h_T) = 0` over
/// parallelepipeds conditioned to lie in the slice.
pub fn gowers_test_pass_rate(f: &SliceFunction, d: u32, mode: Mode) -> Result<TestOutcome> {
    match mode {
        Mode::Exact => {
            let (passes, total) = gowers_test_counts(f, d)?;
            Ok(TestOutcome::exact(passes, total))
        }
        Mode::MonteCarlo { samples, seed } => {
            if d == 0 {
                return Err(Error::InvalidArgument("test order d must be at least 1".into()));
            }
            mc_pass_rate(f, SampleShape::Parallelepiped(d), samples, seed)
        }
    }
}

/// Brute-force `(passes, total)` for the quadruple test: `x, y, z` range
/// over the slice and `x ⊕ y ⊕ z` is looked up in a membership table.
pub fn linearity_counts_enumerated(f: &SliceFunction) -> Result<(u64, u64)> {
    let slice = f.domain();
    let members = domain_members(&slice)?;
    let member: Vec<bool> = (0..1u64 << f.dim()).map(|x| slice.contains(x)).collect();
    let (passes, total) = members
        .par_iter()
        .map(|&x| {
            let mut passes = 0u64;
            let mut total = 0u64;
            for &y in &members {
                let xy = x ^ y;
                let lhs = f.eval(x) ^ f.eval(y);
                for &z in &members {
                    let w = xy ^ z;
                    if member[w as usize] {
                        total += 1;
                        if lhs ^ f.eval(z) == f.eval(w) {
                            passes += 1;
                        }
                    }
                }
            }
            (passes, total)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((passes, total))
}

/// Exact probability that all `2^d` vertices of a uniform parallelepiped
/// lie in the slice, against the bound `density^{2^d}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelepipedCheck {
    pub n: u32,
    pub d: u32,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub probability: BigRational,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub bound: BigRational,
    pub probability_f64: f64,
    pub bound_f64: f64,
}

impl ParallelepipedCheck {
    pub fn holds(&self) -> bool {
        self.probability >= self.bound
    }

    pub fn is_equality(&self) -> bool {
        self.probability == self.bound
    }
}

pub fn parallelepiped_probability_check(n: u32, d: u32) -> Result<ParallelepipedCheck> {
    let slice = DomainSpec::slice(n)?;
    let dim = 2 * n;
    let ones: Vec<i8> = (0..1u64 << dim).map(|x| i8::from(slice.contains(x))).collect();
    let count = parallelepiped_sum(&ones, dim, d)?;
    let count = BigInt::from(count);
    let probability = BigRational::new(count, BigInt::one() << (dim * (d + 1)));
    let density = slice.density();
    let bound = (0..1u32 << d).fold(BigRational::one(), |acc, _| acc * &density);
    let check = ParallelepipedCheck {
        n,
        d,
        probability_f64: big_to_f64(&probability),
        bound_f64: big_to_f64(&bound),
        probability,
        bound,
    };
    assert!(
        check.holds(),
        "parallelepiped probability {} below density^(2^d) = {}",
        check.probability,
        check.bound
    );
    Ok(check)
}

/// Result of decoding a slice function to an affine parity `b ⊕ L_S`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearDecoding {
    pub subset: u64,
    pub sign_bit: u8,
    /// `f'^(S)` for the reweighted sign function.
    pub coefficient: f64,
    /// Exact fraction of the slice where `f = b ⊕ L_S`.
    pub agreement: f64,
    /// `1/2 + |coefficient| / (2 E[1_D])`, which equals `agreement`.
    pub agreement_from_coefficient: f64,
    pub residue_density: f64,
}

/// Builds `f'(x) = (-1)^{f(x)} 1_U(x) E[1_D] / E[1_U]` with
/// `D = D_{2n, k_residue}`, and returns the subset maximizing
/// `|f'^(S)|` (smallest encoding among ties) with `b` set by the sign.
///
/// The argmax runs on the integer transform of `(-1)^f 1_U`, which is
/// `f'` up to a positive constant, so ties are exact.
pub fn decode_linear(f: &SliceFunction, k_residue: u32) -> Result<LinearDecoding> {
    let dim = f.dim();
    if dim > 24 {
        return Err(Error::DimensionTooLarge {
            what: "linear decoding",
            dim,
            limit: 24,
        });
    }
    let slice = f.domain();
    let residue = DomainSpec::residue(f.n(), k_residue)?;
    let mut w: Vec<i64> = f.signed_indicator().into_iter().map(i64::from).collect();
    butterfly(&mut w);
    let mut best = 0usize;
    for (s, &v) in w.iter().enumerate().skip(1) {
        if v.abs() > w[best].abs() {
            best = s;
        }
    }
    let subset = best as u64;
    let sign_bit = u8::from(w[best] < 0);
    let slice_count = slice.count();
    let residue_density = big_to_f64(&residue.density());
    // f'^(S) = W(S) E[1_D] / (2^m E[1_U]) = W(S) E[1_D] / |U|.
    let coefficient = w[best] as f64 * residue_density / slice_count.to_f64().unwrap_or(f64::NAN);

    let members = domain_members(&slice)?;
    let agree = members
        .iter()
        .filter(|&&x| f.eval(x) == (((x & subset).count_ones() % 2 == 1) ^ (sign_bit == 1)))
        .count();
    let agreement = big_to_f64(&BigRational::new(
        BigInt::from(agree),
        BigInt::from(slice_count),
    ));
    Ok(LinearDecoding {
        subset,
        sign_bit,
        coefficient,
        agreement,
        agreement_from_coefficient: 0.5 + coefficient.abs() / (2.0 * residue_density),
        residue_density,
    })
}

/// `eps = sum_S F^(S)^4` and the largest `|F^(S)|`, which is at least
/// `sqrt(eps)` for `|F| <= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierLowerBoundCheck {
    pub eps: f64,
    pub max_coeff: f64,
    pub argmax: u64,
}

impl FourierLowerBoundCheck {
    pub fn holds(&self) -> bool {
        self.max_coeff >= self.eps.max(0.0).sqrt() * (1.0 - 1e-12)
    }
}

pub fn max_fourier_lower_bound_check(table: &RealFunctionTable) -> Result<FourierLowerBoundCheck> {
    if let Some((index, &value)) = table.values().iter().enumerate().find(|(_, v)| v.abs() > 1.0) {
        return Err(Error::ValueOutOfRange {
            index,
            value,
            allowed: "[-1, 1]",
        });
    }
    let spec = wht(table)?;
    let (argmax, c) = spec.argmax_abs();
    let check = FourierLowerBoundCheck {
        eps: spec.sum_fourth_powers(),
        max_coeff: c.abs(),
        argmax,
    };
    assert!(
        check.holds(),
        "max |F^(S)| = {} below sqrt(eps) = {}",
        check.max_coeff,
        check.eps.sqrt()
    );
    Ok(check)
}

/// The decoding bar `1/2 + sqrt(eps)/200` where `eps = pass_rate - 1/2`.
/// `None` when the pass rate does not exceed 1/2.
pub fn linearity_decoding_bar(pass_rate: f64) -> Option<f64> {
    let eps = pass_rate - 0.5;
    (eps > 0.0).then(|| 0.5 + eps.sqrt() / 200.0)
}

/// Exact number of ordered slice triples `(x, y, z)` with `x ⊕ y ⊕ z` in
/// the slice, as a fraction of `|U|^3`.
pub fn quadruple_acceptance_rate(n: u32) -> Result<BigRational> {
    let f = SliceFunction::from_fn(n, |_| false)?;
    let (_, total) = gowers_test_counts(&f, 2)?;
    let size = DomainSpec::slice(n)?.count();
    let cube: BigUint = &size * &size * &size;
    Ok(BigRational::new(BigInt::from(total), cube.into()))
}
