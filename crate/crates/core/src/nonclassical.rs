//! Torus-valued (non-classical) polynomials stored as exact dyadic tables.
//!
//! A value `k / 2^q` is kept as its numerator `k in [0, 2^q)`. Degrees are
//! verified, never assumed: `p` has degree `<= d` iff every order-`(d+1)`
//! additive derivative vanishes. Because
//! `∂_{a⊕b} g = ∂_a g(· ⊕ b) + ∂_b g` and derivatives commute with shifts,
//! it suffices to check derivatives along standard basis directions, with
//! repetition.
//!
//! Phases `e^{2πi k/2^q}` are summed exactly in `Z[ω]`, `ω = e^{2πi/2^q}`,
//! using the basis `1, ω, .., ω^{2^{q-1}-1}` and `ω^{2^{q-1}} = -1`.

use num_complex::Complex64;
use serde::Serialize;

use crate::bitcore::{low_mask, CompensatedSum};
use crate::error::{check_dim, Error, Result};
use crate::slicemodel::DomainSpec;

/// Largest denominator exponent.
pub const MAX_DENOMINATOR_BITS: u32 = 62;

/// Largest table dimension for torus polynomials.
pub const MAX_TORUS_DIM: u32 = 24;

/// Work cap (as `log2`) for exhaustive all-direction degree checks.
pub const EXHAUSTIVE_DEGREE_BUDGET_LOG2: u32 = 30;

/// A function `{0,1}^dim -> [0, 1)` with values in `2^{-q} Z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusPolynomial {
    dim: u32,
    q: u32,
    numerators: Vec<u64>,
    claimed_degree: Option<u32>,
}

impl TorusPolynomial {
    pub fn new(dim: u32, q: u32, numerators: Vec<u64>) -> Result<Self> {
        if dim > MAX_TORUS_DIM {
            return Err(Error::DimensionTooLarge {
                what: "torus polynomials",
                dim,
                limit: MAX_TORUS_DIM,
            });
        }
        if q > MAX_DENOMINATOR_BITS {
            return Err(Error::InvalidArgument(format!(
                "denominator 2^{q} exceeds 2^{MAX_DENOMINATOR_BITS}"
            )));
        }
        if numerators.len() != 1usize << dim {
            return Err(Error::TableLength {
                dim,
                expected: 1usize << dim,
                found: numerators.len(),
            });
        }
        if let Some(index) = numerators.iter().position(|&k| k >> q != 0) {
            return Err(Error::InvalidArgument(format!(
                "numerator {} at index {index} is not below 2^{q}",
                numerators[index]
            )));
        }
        Ok(Self {
            dim,
            q,
            numerators,
            claimed_degree: None,
        })
    }

    /// Tabulates `x ↦ num(x) / 2^q mod 1`; `num` may be negative.
    pub fn from_fn(dim: u32, q: u32, num: impl Fn(u64) -> i128) -> Result<Self> {
        if dim > MAX_TORUS_DIM {
            return Err(Error::DimensionTooLarge {
                what: "torus polynomials",
                dim,
                limit: MAX_TORUS_DIM,
            });
        }
        let modulus = 1i128 << q;
        Self::new(
            dim,
            q,
            (0..1u64 << dim)
                .map(|x| num(x).rem_euclid(modulus) as u64)
                .collect(),
        )
    }

    pub fn zero(dim: u32) -> Result<Self> {
        Self::new(dim, 0, vec![0; 1usize << dim])
    }

    /// `L_S(x) / 2`, the classical parity embedded in the torus.
    pub fn parity(dim: u32, subset: u64) -> Result<Self> {
        Self::from_fn(dim, 1, |x| i128::from((x & subset).count_ones() % 2))
    }

    /// `f(x) / 2` for a 0/1 table.
    pub fn from_boolean(dim: u32, bits: &[bool]) -> Result<Self> {
        Self::new(dim, 1, bits.iter().map(|&b| u64::from(b)).collect())
    }

    pub fn with_claimed_degree(mut self, d: u32) -> Self {
        self.claimed_degree = Some(d);
        self
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Denominator exponent: values live in `2^{-q} Z / Z`.
    pub fn denominator_bits(&self) -> u32 {
        self.q
    }

    pub fn numerators(&self) -> &[u64] {
        &self.numerators
    }

    pub fn claimed_degree(&self) -> Option<u32> {
        self.claimed_degree
    }

    pub fn value_f64(&self, x: u64) -> f64 {
        self.numerators[x as usize] as f64 / (1u64 << self.q) as f64
    }

    /// Same function with denominator `2^q'`, `q' >= q`.
    pub fn lifted(&self, q: u32) -> Result<Self> {
        if q < self.q || q > MAX_DENOMINATOR_BITS {
            return Err(Error::InvalidArgument(format!(
                "cannot lift denominator 2^{} to 2^{q}",
                self.q
            )));
        }
        let shift = q - self.q;
        Ok(Self {
            dim: self.dim,
            q,
            numerators: self.numerators.iter().map(|&k| k << shift).collect(),
            claimed_degree: self.claimed_degree,
        })
    }

    /// Smallest denominator representing the same function.
    pub fn reduced(&self) -> Self {
        let mut q = self.q;
        let mut nums = self.numerators.clone();
        while q > 0 && nums.iter().all(|k| k & 1 == 0) {
            nums.iter_mut().for_each(|k| *k >>= 1);
            q -= 1;
        }
        Self {
            dim: self.dim,
            q,
            numerators: nums,
            claimed_degree: self.claimed_degree,
        }
    }

    /// Equality as functions into the torus.
    pub fn same_function(&self, other: &Self) -> bool {
        let (a, b) = (self.reduced(), other.reduced());
        a.dim == b.dim && a.q == b.q && a.numerators == b.numerators
    }

    fn combine(&self, other: &Self, op: impl Fn(u64, u64, u64) -> u64) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let q = self.q.max(other.q);
        let (a, b) = (self.lifted(q)?, other.lifted(q)?);
        let mask = low_mask(q);
        Ok(Self {
            dim: self.dim,
            q,
            numerators: a
                .numerators
                .iter()
                .zip(&b.numerators)
                .map(|(&u, &v)| op(u, v, mask))
                .collect(),
            claimed_degree: None,
        })
    }

    /// Pointwise sum mod 1.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |u, v, mask| u.wrapping_add(v) & mask)
    }

    /// Pointwise difference mod 1.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |u, v, mask| u.wrapping_sub(v) & mask)
    }

    pub fn is_zero(&self) -> bool {
        self.numerators.iter().all(|&k| k == 0)
    }
}

fn derive_into(src: &[u64], h: usize, mask: u64, out: &mut [u64]) {
    for (x, slot) in out.iter_mut().enumerate() {
        *slot = src[x ^ h].wrapping_sub(src[x]) & mask;
    }
}

/// `x ↦ p(x ⊕ h) - p(x) mod 1`.
pub fn additive_derivative(p: &TorusPolynomial, h: &crate::bitcore::BitVector) -> Result<TorusPolynomial> {
    check_dim(p.dim, h.dim())?;
    let mut out = vec![0; p.numerators.len()];
    derive_into(&p.numerators, h.index(), low_mask(p.q), &mut out);
    TorusPolynomial::new(p.dim, p.q, out)
}

/// Whether every order-`(d+1)` derivative along basis directions (with
/// repetition) vanishes, i.e. whether `p` has degree at most `d`.
pub fn verify_degree(p: &TorusPolynomial, d: u32) -> bool {
    let directions: Vec<usize> = (0..p.dim).map(|i| 1usize << i).collect();
    vanishes_on_multisets(p, d + 1, &directions)
}

/// Same property checked over every multiset of `d + 1` directions in the
/// whole cube. Oracle for [`verify_degree`].
pub fn verify_degree_exhaustive(p: &TorusPolynomial, d: u32) -> Result<bool> {
    let points = 1u64 << p.dim;
    // C(2^dim + d, d + 1) multisets, each costing 2^dim.
    let mut multisets = 1f64;
    for i in 0..=d {
        multisets = multisets * (points + u64::from(i)) as f64 / f64::from(i + 1);
    }
    let cost = (multisets * points as f64).log2().ceil() as u32;
    if cost > EXHAUSTIVE_DEGREE_BUDGET_LOG2 {
        return Err(Error::BudgetExceeded {
            cost_log2: cost,
            budget_log2: EXHAUSTIVE_DEGREE_BUDGET_LOG2,
        });
    }
    let directions: Vec<usize> = (0..points as usize).collect();
    Ok(vanishes_on_multisets(p, d + 1, &directions))
}

/// Depth-first over non-decreasing direction sequences of length `order`,
/// carrying the partial derivative table down the recursion.
fn vanishes_on_multisets(p: &TorusPolynomial, order: u32, directions: &[usize]) -> bool {
    let mask = low_mask(p.q);
    let len = p.numerators.len();
    let mut stack: Vec<Vec<u64>> = (0..order).map(|_| vec![0; len]).collect();

    fn go(
        start: usize,
        prev: &[u64],
        stack: &mut [Vec<u64>],
        directions: &[usize],
        mask: u64,
    ) -> bool {
        let (head, tail) = stack.split_at_mut(1);
        let out = &mut head[0];
        for (i, &h) in directions.iter().enumerate().skip(start) {
            derive_into(prev, h, mask, out);
            if tail.is_empty() {
                if out.iter().any(|&k| k != 0) {
                    return false;
                }
            } else if !go(i, out, tail, directions, mask) {
                return false;
            }
        }
        true
    }

    if order == 0 {
        return p.is_zero();
    }
    go(0, &p.numerators, &mut stack, directions, mask)
}

/// Smallest `d` with [`verify_degree`]; constants (including zero) have
/// degree 0.
pub fn degree(p: &TorusPolynomial) -> u32 {
    // Degree is bounded by dim + q - 1 on the cube.
    let cap = p.dim + p.q.max(1);
    (0..=cap)
        .find(|&d| verify_degree(p, d))
        .unwrap_or(cap)
}

/// `x ↦ j (|x| - a) / 2^d mod 1` on `{0,1}^{2n}`, claimed degree `d`.
pub fn weight_polynomial(n: u32, j: u64, d: u32, a: i64) -> Result<TorusPolynomial> {
    if d > MAX_DENOMINATOR_BITS || j >> d != 0 {
        return Err(Error::InvalidArgument(format!(
            "weight polynomial needs 0 <= j < 2^d, got j={j}, d={d}"
        )));
    }
    Ok(TorusPolynomial::from_fn(2 * n, d, |x| {
        i128::from(j) * (i128::from(x.count_ones()) - i128::from(a))
    })?
    .with_claimed_degree(d))
}

/// An exact element of `Z[ω]`, `ω = e^{2πi/2^q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicSum {
    q: u32,
    coeffs: Vec<i64>,
}

impl CyclotomicSum {
    pub fn new(q: u32) -> Self {
        let len = if q == 0 { 1 } else { 1usize << (q - 1) };
        Self {
            q,
            coeffs: vec![0; len],
        }
    }

    /// Adds `c ω^k`.
    pub fn add_root(&mut self, k: u64, c: i64) {
        if self.q == 0 {
            self.coeffs[0] += c;
            return;
        }
        let half = 1u64 << (self.q - 1);
        let k = k & low_mask(self.q);
        if k < half {
            self.coeffs[k as usize] += c;
        } else {
            self.coeffs[(k - half) as usize] -= c;
        }
    }

    pub fn add_integer(&mut self, c: i64) {
        self.coeffs[0] += c;
    }

    /// Exact test, the basis being linearly independent over `Q`.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Whether the sum equals the integer `c`.
    pub fn equals_integer(&self, c: i64) -> bool {
        self.coeffs[0] == c && self.coeffs[1..].iter().all(|&v| v == 0)
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let w = root_of_unity(k as u64, self.q);
                re.add(c as f64 * w.re);
                im.add(c as f64 * w.im);
            }
        }
        Complex64::new(re.total(), im.total())
    }
}

/// `e^{2πi k / 2^q}`, exact on the axes and diagonals.
pub fn root_of_unity(k: u64, q: u32) -> Complex64 {
    if q == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let k = k & low_mask(q);
    // Position in eighths of a turn when it is an integer.
    if q <= 3 || k.is_multiple_of(1u64 << (q - 3)) {
        let eighth = if q <= 3 { k << (3 - q) } else { k >> (q - 3) };
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (re, im) = match eighth {
            0 => (1.0, 0.0),
            1 => (r, r),
            2 => (0.0, 1.0),
            3 => (-r, r),
            4 => (-1.0, 0.0),
            5 => (-r, -r),
            6 => (0.0, -1.0),
            _ => (r, -r),
        };
        return Complex64::new(re, im);
    }
    let angle = std::f64::consts::TAU * k as f64 / (1u64 << q) as f64;
    Complex64::new(angle.cos(), angle.sin())
}

/// Checks pointwise on `{0,1}^dim` that
/// `1_{|x| ≡ 0 mod 2^d} = 2^{-d} sum_{j < 2^d} e^{2πi j|x|/2^d}`, exactly.
pub fn residue_decomposition_check(dim: u32, d: u32) -> Result<bool> {
    if dim > 20 {
        return Err(Error::DimensionTooLarge {
            what: "residue decomposition check",
            dim,
            limit: 20,
        });
    }
    if d > 16 {
        return Err(Error::InvalidArgument(format!("d = {d} too large")));
    }
    // The sum depends on x only through |x|; evaluating per weight and
    // then per point keeps the pointwise claim literal.
    let per_weight: Vec<bool> = (0..=dim)
        .map(|w| {
            let mut sum = CyclotomicSum::new(d);
            for j in 0..1u64 << d {
                sum.add_root(j * u64::from(w), 1);
            }
            let indicator = i64::from(u64::from(w) % (1u64 << d) == 0);
            sum.equals_integer(indicator << d)
        })
        .collect();
    Ok((0..1u64 << dim).all(|x| per_weight[x.count_ones() as usize]))
}

/// `E_{x in domain}[(-1)^{f(x)} e^{2πi p(x)}]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub domain: DomainSpec,
    pub points: u64,
}

impl CorrelationReport {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Exact phase sum `sum_{x in domain} e^{2πi (p(x) + f(x)/2)}` in `Z[ω]`
/// and the number of points.
fn phase_sum(f: Option<&[bool]>, p: &TorusPolynomial, domain: &DomainSpec) -> Result<(CyclotomicSum, u64)> {
    check_dim(p.dim(), domain.dim())?;
    if let Some(bits) = f {
        if bits.len() != p.numerators.len() {
            return Err(Error::TableLength {
                dim: p.dim,
                expected: p.numerators.len(),
                found: bits.len(),
            });
        }
    }
    let p = if f.is_some() && p.q == 0 { p.lifted(1)? } else { p.clone() };
    if p.q > 24 {
        return Err(Error::InvalidArgument(format!(
            "exact phase sums need denominators up to 2^24, got 2^{}",
            p.q
        )));
    }
    let half = if p.q == 0 { 0 } else { 1u64 << (p.q - 1) };
    let mut sum = CyclotomicSum::new(p.q);
    let mut points = 0u64;
    for (x, &k) in p.numerators.iter().enumerate() {
        if domain.contains(x as u64) {
            let flip = f.is_some_and(|b| b[x]);
            sum.add_root(if flip { k + half } else { k }, 1);
            points += 1;
        }
    }
    Ok((sum, points))
}

/// Correlation of `(-1)^f` (or the constant 1 when `f` is `None`) with
/// `e^{2πi p}` over a domain.
pub fn correlation(f: Option<&[bool]>, p: &TorusPolynomial, domain: &DomainSpec) -> Result<CorrelationReport> {
    let (sum, points) = phase_sum(f, p, domain)?;
    if points == 0 {
        return Err(Error::EmptyDomain(domain.to_string()));
    }
    let value = sum.to_complex() / points as f64;
    Ok(CorrelationReport {
        re: value.re,
        im: value.im,
        magnitude: value.norm().min(1.0),
        domain: *domain,
        points,
    })
}

/// Outcome of the residue search for a biased polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiasedRankWitness {
    pub j: u64,
    /// `|E_x e^{2πi (P(x) + j(|x| - a)/2^d)}|` over the cube.
    pub residue_bias: f64,
    /// `|E_{x in U} e^{2πi P(x)}|`.
    pub slice_bias: f64,
    /// `|E_{x in D} e^{2πi P(x)}|`, `D = D_{2n, d+1}`.
    pub residue_class_bias: f64,
    pub residue_density: f64,
    /// `delta E[1_D] / 2`.
    pub threshold: f64,
    /// Biases for every `j` in `0..2^d`.
    pub profile: Vec<f64>,
    pub shifted_degree_ok: bool,
}

/// Searches `j in 0..2^d` for a large cube bias of
/// `P + j(|x| - a)/2^d`, `a = n mod 2^d`.
///
/// If `|E_{x in D}[e^{2πiP}]| >= delta/2` then expanding `1_D` into the
/// `2^d` phases `e^{2πi j(|x|-a)/2^d}` forces some `j` to reach
/// `delta E[1_D] / 2`; a miss means the instance is outside that regime
/// and is reported as [`Error::RegimeNotMet`] with the full profile.
pub fn biased_rank_witness(p: &TorusPolynomial, n: u32, d: u32, delta: f64) -> Result<BiasedRankWitness> {
    if p.dim() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: p.dim(),
        });
    }
    if d == 0 || d > 20 {
        return Err(Error::InvalidArgument(format!("degree d must be in 1..=20, got {d}")));
    }
    if !verify_degree(p, d) {
        return Err(Error::InvalidArgument(format!(
            "polynomial does not have degree <= {d}"
        )));
    }
    let slice = DomainSpec::slice(n)?;
    let residue = DomainSpec::residue(n, d + 1)?;
    let slice_bias = correlation(None, p, &slice)?.magnitude;
    if slice_bias < delta {
        return Err(Error::RegimeNotMet {
            message: format!("slice bias {slice_bias} is below delta = {delta}"),
            profile: vec![slice_bias],
        });
    }
    let residue_class_bias = correlation(None, p, &residue)?.magnitude;
    let residue_density = residue.density_f64();
    let threshold = delta * residue_density / 2.0;
    let a = i64::from(n % (1u32 << d));
    let cube = DomainSpec::cube(2 * n)?;
    let mut profile = Vec::with_capacity(1 << d);
    let mut best: Option<(u64, f64)> = None;
    for j in 0..1u64 << d {
        let shifted = p.add(&weight_polynomial(n, j, d, a)?)?;
        let bias = correlation(None, &shifted, &cube)?.magnitude;
        profile.push(bias);
        if best.is_none_or(|(_, b)| bias > b) {
            best = Some((j, bias));
        }
    }
    let (j, residue_bias) = best.expect("at least one residue");
    if residue_bias < threshold {
        return Err(Error::RegimeNotMet {
            message: format!(
                "best residue bias {residue_bias} (j={j}) is below delta*E[1_D]/2 = {threshold}"
            ),
            profile,
        });
    }
    let shifted = p.add(&weight_polynomial(n, j, d, a)?)?;
    let shifted_degree_ok = verify_degree(&shifted, d);
    assert!(shifted_degree_ok, "P + j(|x|-a)/2^d lost degree <= {d}");
    Ok(BiasedRankWitness {
        j,
        residue_bias,
        slice_bias,
        residue_class_bias,
        residue_density,
        threshold,
        profile,
        shifted_degree_ok,
    })
}
