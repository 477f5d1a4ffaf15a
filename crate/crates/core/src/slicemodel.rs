//! The middle slice `U_{2n}`, residue-class unions `D_{2n,k}`, their
//! normalized indicators and the dense-model distance between them, plus
//! exhaustive oracles for the atom-algebra counting arguments.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitcore::{low_mask, BitVector, RealFunctionTable, MAX_POINT_DIM};
use crate::error::{check_dim, Error, Result};
use crate::estimate::Mode;
use crate::gowers::{gowers_norm, GowersEstimate};

/// Largest table built by [`indicator`].
pub const MAX_INDICATOR_DIM: u32 = 28;

/// Proposals a rejection sampler may burn without an acceptance.
pub const STALL_LIMIT: u64 = 10_000_000;

/// `C(n, k)` exactly.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub(crate) fn big_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Where functions live: the cube, the middle slice, or a residue class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Cube { dim: u32 },
    /// `{x in {0,1}^{2n} : |x| = n}`.
    Slice { n: u32 },
    /// `{x in {0,1}^{2n} : |x| ≡ n (mod 2^{k-1})}`.
    Residue { n: u32, k: u32 },
}

impl DomainSpec {
    pub fn slice(n: u32) -> Result<Self> {
        Self::Slice { n }.validated()
    }

    pub fn residue(n: u32, k: u32) -> Result<Self> {
        Self::Residue { n, k }.validated()
    }

    pub fn cube(dim: u32) -> Result<Self> {
        Self::Cube { dim }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.dim() > MAX_POINT_DIM {
            return Err(Error::DimensionTooLarge {
                what: "domains",
                dim: self.dim(),
                limit: MAX_POINT_DIM,
            });
        }
        if let DomainSpec::Residue { k, .. } = self {
            if !(1..=32).contains(&k) {
                return Err(Error::InvalidArgument(format!(
                    "residue parameter k must be in 1..=32, got {k}"
                )));
            }
        }
        Ok(self)
    }

    pub fn dim(&self) -> u32 {
        match *self {
            DomainSpec::Cube { dim } => dim,
            DomainSpec::Slice { n } | DomainSpec::Residue { n, .. } => 2 * n,
        }
    }

    /// `2^{k-1}` for residue classes.
    pub fn modulus(&self) -> Option<u64> {
        match *self {
            DomainSpec::Residue { k, .. } => Some(1u64 << (k - 1)),
            _ => None,
        }
    }

    /// The residue `a = n mod 2^{k-1}`.
    pub fn residue_class(&self) -> Option<u64> {
        match *self {
            DomainSpec::Residue { n, .. } => self.modulus().map(|m| u64::from(n) % m),
            _ => None,
        }
    }

    #[inline]
    pub fn contains_weight(&self, w: u32) -> bool {
        match *self {
            DomainSpec::Cube { dim } => w <= dim,
            DomainSpec::Slice { n } => w == n,
            DomainSpec::Residue { n, k } => {
                let m = 1u64 << (k - 1);
                u64::from(w) % m == u64::from(n) % m && w <= 2 * n
            }
        }
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        self.contains_weight(x.count_ones())
    }

    /// Number of points, exactly.
    pub fn count(&self) -> BigUint {
        let dim = self.dim();
        (0..=dim)
            .filter(|&w| self.contains_weight(w))
            .map(|w| binomial(dim, w))
            .sum()
    }

    /// `count / 2^dim`, exactly.
    pub fn density(&self) -> BigRational {
        let total = BigUint::one() << self.dim();
        BigRational::new(self.count().into(), total.into())
    }

    pub fn density_f64(&self) -> f64 {
        big_to_f64(&self.density())
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Cube { dim } => write!(f, "cube(dim={dim})"),
            DomainSpec::Slice { n } => write!(f, "slice(2n={})", 2 * n),
            DomainSpec::Residue { n, k } => write!(f, "residue(2n={}, k={k})", 2 * n),
        }
    }
}

/// 0/1 indicator of the domain, or the indicator divided by its density.
pub fn indicator(spec: &DomainSpec, normalized: bool) -> Result<RealFunctionTable> {
    let dim = spec.dim();
    if dim > MAX_INDICATOR_DIM {
        return Err(Error::DimensionTooLarge {
            what: "indicator tables",
            dim,
            limit: MAX_INDICATOR_DIM,
        });
    }
    let density = spec.density();
    if density.is_zero() {
        return Err(Error::EmptyDomain(spec.to_string()));
    }
    let height = if normalized {
        big_to_f64(&density.recip())
    } else {
        1.0
    };
    RealFunctionTable::from_fn(dim, |x| if spec.contains(x) { height } else { 0.0 })
}

/// `1_U / E[1_U] - 1_D / E[1_D]` at dimension `2n`.
pub fn dense_model_difference(n: u32, k: u32) -> Result<RealFunctionTable> {
    let f = indicator(&DomainSpec::slice(n)?, true)?;
    let g = indicator(&DomainSpec::residue(n, k)?, true)?;
    f.zip_with(&g, |a, b| a - b)
}

/// `||1_U/E[1_U] - 1_D/E[1_D]||_{U_s}` for `s <= k`.
pub fn dense_model_distance(n: u32, k: u32, s: u32, mode: Mode) -> Result<GowersEstimate> {
    if s == 0 || s > k {
        return Err(Error::InvalidArgument(format!(
            "dense-model distance needs 1 <= s <= k, got s={s}, k={k}"
        )));
    }
    let diff = dense_model_difference(n, k)?;
    let mut est = gowers_norm(&diff, s, mode)?;
    if s == 1 {
        // Both indicators are normalized to mean 1.
        est.value_pow = 0.0;
        est.value = 0.0;
    }
    Ok(est)
}

/// Recovers `|x ∧ z| mod 2^{j-1}` from `|x ⊕ z|`, `|x|`, `|z|` mod `2^j`.
///
/// # Panics
/// If the recovered value disagrees with the direct count, which would
/// contradict the weight identity `|x ⊕ z| = |x| + |z| - 2|x ∧ z|`.
pub fn weight_intersection_residue(x: &BitVector, z: &BitVector, j: u32) -> Result<u64> {
    if j == 0 || j > 32 {
        return Err(Error::InvalidArgument(format!("j must be in 1..=32, got {j}")));
    }
    let m = 1u64 << j;
    let b = u64::from(x.xor(z)?.weight()) % m;
    let c = u64::from(x.weight()) % m;
    let d = u64::from(z.weight()) % m;
    let numerator = (c + d + m - b) % m;
    assert!(numerator.is_multiple_of(2), "c + d - b must be even");
    let half_modulus = m / 2;
    let recovered = (numerator / 2) % half_modulus;
    let direct = u64::from(x.and(z)?.weight()) % half_modulus;
    assert_eq!(recovered, direct, "intersection residue mismatch for {x} and {z}");
    Ok(recovered)
}

/// One atom of the algebra generated by the supports of `x_1..x_t`: the
/// coordinates whose membership pattern across the generators is
/// `pattern` (bit `i` set iff the coordinate lies in `supp(x_{i+1})`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atom {
    pub pattern: u32,
    pub support: BitVector,
}

impl Atom {
    pub fn size(&self) -> u32 {
        self.support.weight()
    }
}

/// The Boolean algebra generated by a list of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomAlgebra {
    dim: u32,
    generators: Vec<BitVector>,
    atoms: Vec<Atom>,
}

impl AtomAlgebra {
    pub fn new(dim: u32, generators: Vec<BitVector>) -> Result<Self> {
        for g in &generators {
            check_dim(dim, g.dim())?;
        }
        let t = generators.len();
        if t > 16 {
            return Err(Error::InvalidArgument(format!(
                "at most 16 generators supported, got {t}"
            )));
        }
        let mut supports = vec![0u64; 1 << t];
        for i in 0..dim {
            let pattern = generators
                .iter()
                .enumerate()
                .fold(0usize, |p, (j, g)| p | (usize::from(g.get(i)) << j));
            supports[pattern] |= 1 << i;
        }
        let atoms = supports
            .into_iter()
            .enumerate()
            .map(|(pattern, bits)| Atom {
                pattern: pattern as u32,
                support: BitVector::new(bits, dim).expect("support within dimension"),
            })
            .collect();
        Ok(Self {
            dim,
            generators,
            atoms,
        })
    }

    pub fn from_strings(generators: &[&str]) -> Result<Self> {
        let gens: Vec<BitVector> = generators.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        let dim = gens
            .first()
            .map(BitVector::dim)
            .ok_or_else(|| Error::InvalidArgument("from_strings needs a generator".into()))?;
        Self::new(dim, gens)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn generators(&self) -> &[BitVector] {
        &self.generators
    }

    /// All `2^t` atoms, indexed by pattern; some may be empty.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Nonempty atoms.
    pub fn nonempty_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().filter(|a| a.size() > 0)
    }

    /// `Span(x_1..x_t)` listed by coefficient vector; index `c` is
    /// `⊕_{i : c_i = 1} x_i`.
    pub fn span(&self) -> Vec<BitVector> {
        (0u32..1 << self.generators.len())
            .map(|c| {
                let bits = self
                    .generators
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| c >> i & 1 == 1)
                    .fold(0u64, |acc, (_, g)| acc ^ g.bits());
                BitVector::new(bits, self.dim).expect("span element within dimension")
            })
            .collect()
    }

    /// Whether `S` is a union of atoms.
    pub fn contains_set(&self, subset: &BitVector) -> bool {
        self.atoms.iter().all(|a| {
            let inter = a.support.bits() & subset.bits();
            inter == 0 || inter == a.support.bits()
        })
    }
}

/// Exact `Pr_x[|x ⊕ z| = w for every (z, w) in constraints]` over the
/// uniform cube of the algebra's dimension.
pub fn joint_slice_probability(algebra: &AtomAlgebra, constraints: &[(BitVector, u32)]) -> Result<BigRational> {
    let dim = algebra.dim();
    if dim > 20 {
        return Err(Error::DimensionTooLarge {
            what: "exhaustive joint probabilities",
            dim,
            limit: 20,
        });
    }
    for (z, _) in constraints {
        check_dim(dim, z.dim())?;
    }
    let pairs: Vec<(u64, u32)> = constraints.iter().map(|(z, w)| (z.bits(), *w)).collect();
    let hits: u64 = (0..1u64 << dim)
        .into_par_iter()
        .filter(|x| pairs.iter().all(|&(z, w)| (x ^ z).count_ones() == w))
        .count() as u64;
    Ok(BigRational::new(
        BigUint::from(hits).into(),
        (BigUint::one() << dim).into(),
    ))
}

/// Constraints `|x ⊕ z| = n` for the span elements selected by `members`
/// (indices into [`AtomAlgebra::span`]); `None` selects the whole span.
pub fn slice_constraints(algebra: &AtomAlgebra, members: Option<&[usize]>) -> Result<Vec<(BitVector, u32)>> {
    if !algebra.dim().is_multiple_of(2) {
        return Err(Error::InvalidArgument(
            "slice constraints need an even dimension".into(),
        ));
    }
    let n = algebra.dim() / 2;
    let span = algebra.span();
    match members {
        None => Ok(span.into_iter().map(|z| (z, n)).collect()),
        Some(idx) => idx
            .iter()
            .map(|&i| {
                span.get(i)
                    .map(|z| (*z, n))
                    .ok_or_else(|| Error::InvalidArgument(format!("span index {i} out of range")))
            })
            .collect(),
    }
}

/// `probability * n^{2^{t-1}}`, the scale-free form of the joint slice
/// probability for `t >= 1` generators. Monitoring only.
pub fn joint_probability_scaled(probability: &BigRational, n: u32, t: u32) -> f64 {
    let exponent = if t == 0 { 0.5 } else { f64::from(1u32 << (t - 1)) };
    big_to_f64(probability) * f64::from(n).powf(exponent)
}

/// Checks exhaustively that the weights `|x ⊕ z|`, `z` in the span, fix
/// every atom intersection `|x ∧ x_b|`.
pub fn atom_weight_determinism_check(algebra: &AtomAlgebra) -> Result<bool> {
    let dim = algebra.dim();
    let t = algebra.generators().len();
    if dim > 16 || t > 3 {
        return Err(Error::InvalidArgument(format!(
            "determinism check supports dim <= 16 and t <= 3, got dim={dim}, t={t}"
        )));
    }
    if t == 0 {
        return Ok(true);
    }
    let span: Vec<u64> = algebra.span().iter().map(BitVector::bits).collect();
    let atoms: Vec<u64> = algebra.atoms().iter().map(|a| a.support.bits()).collect();
    let mut seen: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
    for x in 0..1u64 << dim {
        let key: Vec<u32> = span.iter().map(|z| (x ^ z).count_ones()).collect();
        let value: Vec<u32> = atoms.iter().map(|a| (x & a).count_ones()).collect();
        match seen.get(&key) {
            Some(prev) if *prev != value => return Ok(false),
            Some(_) => {}
            None => {
                seen.insert(key, value);
            }
        }
    }
    Ok(true)
}

/// Size of the orbit of `S` under permutations preserving every atom:
/// `prod_B C(|B|, |S ∩ B|)`.
pub fn orbit_size(subset: &BitVector, algebra: &AtomAlgebra) -> Result<BigUint> {
    check_dim(algebra.dim(), subset.dim())?;
    Ok(algebra
        .atoms()
        .iter()
        .map(|a| {
            let inter = (a.support.bits() & subset.bits()).count_ones();
            binomial(a.size(), inter)
        })
        .product())
}

/// Orbit of `S` by breadth-first closure under transpositions of
/// coordinates inside a common atom, which generate the atom-preserving
/// group.
pub fn orbit_enumerate(subset: &BitVector, algebra: &AtomAlgebra) -> Result<HashSet<u64>> {
    check_dim(algebra.dim(), subset.dim())?;
    if algebra.dim() > 16 {
        return Err(Error::DimensionTooLarge {
            what: "orbit enumeration",
            dim: algebra.dim(),
            limit: 16,
        });
    }
    let mut transpositions = Vec::new();
    for atom in algebra.atoms() {
        let coords: Vec<u32> = atom.support.support().collect();
        for (i, &a) in coords.iter().enumerate() {
            for &b in &coords[i + 1..] {
                transpositions.push((a, b));
            }
        }
    }
    let mut orbit = HashSet::from([subset.bits()]);
    let mut queue = VecDeque::from([subset.bits()]);
    while let Some(s) = queue.pop_front() {
        for &(a, b) in &transpositions {
            let (ba, bb) = (s >> a & 1, s >> b & 1);
            if ba != bb {
                let image = s ^ (1 << a) ^ (1 << b);
                if orbit.insert(image) {
                    queue.push_back(image);
                }
            }
        }
    }
    Ok(orbit)
}

/// Shape of a conditioned sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleShape {
    /// `(x, y, z)` with `x, y, z, x ⊕ y ⊕ z` in the domain.
    Quadruple,
    /// `(x, h_1..h_d)` with every `x ⊕ h_T` in the domain.
    Parallelepiped(u32),
}

impl SampleShape {
    /// Points drawn per proposal.
    pub fn arity(&self) -> usize {
        match *self {
            SampleShape::Quadruple => 3,
            SampleShape::Parallelepiped(d) => d as usize + 1,
        }
    }
}

/// Uniform point of the domain. Slices shuffle a fixed-weight word; other
/// domains reject from the cube.
pub fn random_domain_point<R: Rng + ?Sized>(domain: &DomainSpec, rng: &mut R) -> Result<u64> {
    let dim = domain.dim();
    match *domain {
        DomainSpec::Slice { n } => Ok(index::sample(rng, dim as usize, n as usize)
            .iter()
            .fold(0u64, |acc, i| acc | 1 << i)),
        _ => {
            let mask = low_mask(dim);
            for _ in 0..STALL_LIMIT {
                let x = rng.random::<u64>() & mask;
                if domain.contains(x) {
                    return Ok(x);
                }
            }
            Err(Error::SamplerStall {
                what: format!("uniform point of {domain}"),
                proposals: STALL_LIMIT,
            })
        }
    }
}

/// A conditioned sample together with the proposals it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionedSample {
    pub points: Vec<BitVector>,
    pub proposals: u64,
}

/// Rejection sampler for conditioned configurations.
///
/// Proposals draw the base point and its `arity - 1` neighbours (`y, z` or
/// `x ⊕ h_i`) independently and uniformly from the domain, then accept iff
/// the remaining vertices also lie in the domain. The proposal law is
/// uniform on `domain^{arity}`, so the accepted law is uniform on the
/// constrained set.
pub fn sample_conditioned<R: Rng + ?Sized>(
    domain: &DomainSpec,
    shape: SampleShape,
    rng: &mut R,
) -> Result<ConditionedSample> {
    let dim = domain.dim();
    for proposals in 1..=STALL_LIMIT {
        let base = random_domain_point(domain, rng)?;
        match shape {
            SampleShape::Quadruple => {
                let y = random_domain_point(domain, rng)?;
                let z = random_domain_point(domain, rng)?;
                if domain.contains(base ^ y ^ z) {
                    let points = [base, y, z]
                        .iter()
                        .map(|&p| BitVector::new(p, dim))
                        .collect::<Result<_>>()?;
                    return Ok(ConditionedSample { points, proposals });
                }
            }
            SampleShape::Parallelepiped(d) => {
                let mut hs = Vec::with_capacity(d as usize);
                for _ in 0..d {
                    hs.push(random_domain_point(domain, rng)? ^ base);
                }
                if all_vertices_in(domain, base, &hs) {
                    let mut points = vec![BitVector::new(base, dim)?];
                    for h in hs {
                        points.push(BitVector::new(h, dim)?);
                    }
                    return Ok(ConditionedSample { points, proposals });
                }
            }
        }
    }
    Err(Error::SamplerStall {
        what: format!("{shape:?} in {domain}"),
        proposals: STALL_LIMIT,
    })
}

/// Whether `x ⊕ h_T` lies in the domain for every `T`.
pub fn all_vertices_in(domain: &DomainSpec, x: u64, hs: &[u64]) -> bool {
    (0u64..1 << hs.len()).all(|t| {
        let v = hs
            .iter()
            .enumerate()
            .filter(|(i, _)| t >> i & 1 == 1)
            .fold(x, |acc, (_, h)| acc ^ h);
        domain.contains(v)
    })
}

/// All members of a domain in ascending encoding.
pub fn domain_members(domain: &DomainSpec) -> Result<Vec<u64>> {
    let dim = domain.dim();
    if dim > MAX_INDICATOR_DIM {
        return Err(Error::DimensionTooLarge {
            what: "domain enumeration",
            dim,
            limit: MAX_INDICATOR_DIM,
        });
    }
    Ok((0..1u64 << dim).filter(|&x| domain.contains(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::stream_rng;
    use crate::gowers::gowers_pow_direct;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn ratio(p: u64, q: u64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigUint::from(6u32));
        assert_eq!(binomial(64, 32).to_string(), "1832624140942590534");
        assert_eq!(binomial(3, 5), BigUint::zero());
    }

    #[test]
    fn indicator_examples() {
        let s = indicator(&DomainSpec::slice(2).unwrap(), false).unwrap();
        assert_eq!(s.values().iter().filter(|&&v| v == 1.0).count(), 6);
        assert_eq!(s.len(), 16);

        let r = DomainSpec::residue(2, 2).unwrap();
        assert_eq!(r.density(), ratio(1, 2));
        let t = indicator(&r, false).unwrap();
        for x in 0..16u64 {
            assert_eq!(t.get(x), if x.count_ones() % 2 == 0 { 1.0 } else { 0.0 });
        }

        let d = DomainSpec::slice(4).unwrap().density();
        assert_eq!(d, ratio(70, 256));
        assert_eq!(big_to_f64(&d), 0.2734375);
    }

    #[test]
    fn normalized_indicators_have_unit_mean() {
        for n in 2..=6 {
            for spec in [DomainSpec::slice(n).unwrap(), DomainSpec::residue(n, 2).unwrap(), DomainSpec::residue(n, 3).unwrap()] {
                let t = indicator(&spec, true).unwrap();
                assert!((t.mean() - 1.0).abs() <= 1e-14, "{spec}");
            }
        }
    }

    #[test]
    fn residue_class_structure() {
        for n in 1..=6 {
            for k in 1..=4 {
                let spec = DomainSpec::residue(n, k).unwrap();
                let d = spec.density_f64();
                assert!(d >= 1.0 / f64::from(1u32 << k) && d <= 1.0);
                let slice = DomainSpec::slice(n).unwrap();
                for x in 0..1u64 << (2 * n) {
                    let w = u64::from(x.count_ones());
                    let m = 1u64 << (k - 1);
                    assert_eq!(spec.contains(x), w % m == u64::from(n) % m);
                    if slice.contains(x) {
                        assert!(spec.contains(x));
                    }
                }
            }
        }
    }

    #[test]
    fn dense_model_examples() {
        let e = dense_model_distance(4, 2, 1, Mode::Exact).unwrap();
        assert_eq!(e.value, 0.0);
        let e = dense_model_distance(4, 2, 2, Mode::Exact).unwrap();
        let direct = gowers_pow_direct(&dense_model_difference(4, 2).unwrap(), 2).unwrap();
        assert!(e.value > 0.0);
        assert!((e.value_pow - direct).abs() <= 1e-10 * direct);
        assert!(dense_model_distance(4, 2, 3, Mode::Exact).is_err());
    }

    #[test]
    fn intersection_residue_examples() {
        assert_eq!(weight_intersection_residue(&bv("1100"), &bv("1010"), 2).unwrap(), 1);
        let x = bv("11101000");
        assert_eq!(
            weight_intersection_residue(&x, &x, 3).unwrap(),
            u64::from(x.weight()) % 4
        );
        assert!(weight_intersection_residue(&x, &x, 0).is_err());
    }

    #[test]
    fn joint_probability_examples() {
        let alg = AtomAlgebra::from_strings(&["1100"]).unwrap();
        let constraints = slice_constraints(&alg, None).unwrap();
        assert_eq!(joint_slice_probability(&alg, &constraints).unwrap(), ratio(4, 16));

        let empty = AtomAlgebra::new(4, vec![]).unwrap();
        let c = slice_constraints(&empty, None).unwrap();
        assert_eq!(
            joint_slice_probability(&empty, &c).unwrap(),
            DomainSpec::slice(2).unwrap().density()
        );

        let contradictory = [(BitVector::zero(4), 2), (bv("1100"), 1)];
        assert_eq!(joint_slice_probability(&alg, &contradictory).unwrap(), ratio(0, 1));
    }

    #[test]
    fn joint_probability_witnesses() {
        let x1 = bv("1100").bits();
        let witnesses: Vec<String> = (0..16u64)
            .filter(|x| x.count_ones() == 2 && (x ^ x1).count_ones() == 2)
            .map(|x| BitVector::new(x, 4).unwrap().to_string())
            .collect();
        let mut expected = vec!["1010", "1001", "0110", "0101"];
        expected.sort();
        let mut got = witnesses.clone();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn determinism_examples() {
        let alg = AtomAlgebra::from_strings(&["11110000"]).unwrap();
        assert!(atom_weight_determinism_check(&alg).unwrap());
        let alg = AtomAlgebra::from_strings(&["11001100", "10101010"]).unwrap();
        assert!(alg.nonempty_atoms().count() == 4);
        assert!(atom_weight_determinism_check(&alg).unwrap());
        let alg = AtomAlgebra::new(8, vec![]).unwrap();
        assert!(atom_weight_determinism_check(&alg).unwrap());
    }

    #[test]
    fn orbit_examples() {
        let alg = AtomAlgebra::from_strings(&["1100"]).unwrap();
        assert_eq!(orbit_size(&bv("1100"), &alg).unwrap(), BigUint::one());
        assert_eq!(orbit_size(&bv("1000"), &alg).unwrap(), BigUint::from(2u32));
        assert_eq!(orbit_enumerate(&bv("1000"), &alg).unwrap(), HashSet::from([0b01, 0b10]));
        assert_eq!(orbit_size(&BitVector::zero(4), &alg).unwrap(), BigUint::one());
    }

    #[test]
    fn atoms_partition_coordinates() {
        let alg = AtomAlgebra::from_strings(&["11010010", "01110100", "10011001"]).unwrap();
        let union = alg.atoms().iter().fold(0u64, |acc, a| {
            assert_eq!(acc & a.support.bits(), 0);
            acc | a.support.bits()
        });
        assert_eq!(union, 0xff);
        assert_eq!(alg.atoms().iter().map(Atom::size).sum::<u32>(), 8);
        assert_eq!(alg.span().len(), 8);
    }

    #[test]
    fn sampled_quadruples_satisfy_constraints() {
        let slice = DomainSpec::slice(2).unwrap();
        let mut rng = stream_rng(3, 0);
        for _ in 0..200 {
            let s = sample_conditioned(&slice, SampleShape::Quadruple, &mut rng).unwrap();
            let [x, y, z] = [s.points[0].bits(), s.points[1].bits(), s.points[2].bits()];
            for p in [x, y, z, x ^ y ^ z] {
                assert_eq!(p.count_ones(), 2);
            }
        }
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let slice = DomainSpec::slice(5).unwrap();
        let draw = |seed| {
            let mut rng = stream_rng(seed, 0);
            (0..20)
                .map(|_| sample_conditioned(&slice, SampleShape::Parallelepiped(2), &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(1), draw(1));
        assert_ne!(draw(1), draw(2));
    }

    #[test]
    fn slice_points_are_uniform_enough() {
        let slice = DomainSpec::slice(2).unwrap();
        let mut rng = stream_rng(11, 0);
        let mut counts = HashMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            *counts.entry(random_domain_point(&slice, &mut rng).unwrap()).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 6);
        for &c in counts.values() {
            // expected 10_000, sd ~ 91
            assert!((c as i64 - 10_000).abs() < 500, "{c}");
        }
    }
}
