//! Exhaustive invariant checks at small dimensions (at most 8 for table
//! based checks, 12 for the cheap weight-only ones). Every check is
//! deterministic.

use std::collections::HashSet;

use serde::Serialize;

use crate::bitcore::{BitVector, RealFunctionTable};
use crate::error::Result;
use crate::estimate::stream_rng;
use crate::fourier::{butterfly, wht};
use crate::gowers::{derivative, gowers_norm_exact, gowers_pow_direct};
use crate::nonclassical::{
    correlation, degree, residue_decomposition_check, verify_degree, weight_polynomial, TorusPolynomial,
};
use crate::slicemodel::{
    joint_slice_probability, orbit_enumerate, orbit_size, slice_constraints, weight_intersection_residue,
    AtomAlgebra, DomainSpec,
};
use crate::synth::{random_table, random_torus_polynomial};
use crate::testers::{
    gowers_test_counts, linearity_counts_enumerated, max_fourier_lower_bound_check,
    parallelepiped_probability_check, SliceFunction,
};

/// One named invariant and whether it held.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match body() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Orbit closed form against breadth-first enumeration for every subset
/// of the given algebra. Returns the number of subsets checked.
pub fn orbit_agreement(algebra: &AtomAlgebra) -> Result<(bool, u64)> {
    let dim = algebra.dim();
    let mut checked = 0;
    for s in 0..1u64 << dim {
        let subset = BitVector::new(s, dim)?;
        let closed = orbit_size(&subset, algebra)?;
        let orbit = orbit_enumerate(&subset, algebra)?;
        checked += 1;
        if closed != orbit.len().into() {
            return Ok((false, checked));
        }
        if algebra.contains_set(&subset) && orbit.len() != 1 {
            return Ok((false, checked));
        }
    }
    Ok((true, checked))
}

/// Runs every check in a fixed order.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check("xor-group-laws-dim4", || {
            let v = |x: u64| BitVector::new(x, 4);
            let zero = BitVector::zero(4);
            let mut ok = true;
            for a in 0..16u64 {
                ok &= v(a)?.xor(&zero)? == v(a)? && v(a)?.xor(&v(a)?)? == zero;
                for b in 0..16u64 {
                    let ab = v(a)?.xor(&v(b)?)?;
                    ok &= ab == v(b)?.xor(&v(a)?)?;
                    for c in 0..16u64 {
                        ok &= ab.xor(&v(c)?)? == v(a)?.xor(&v(b)?.xor(&v(c)?)?)?;
                    }
                }
            }
            Ok((ok, "256 pairs, 4096 triples".into()))
        }),
        check("xor-weight-identity-dim8", || {
            let mut violations = 0;
            for a in 0..256u64 {
                for b in 0..256u64 {
                    let lhs = i64::from((a ^ b).count_ones());
                    let rhs = i64::from(a.count_ones()) + i64::from(b.count_ones())
                        - 2 * i64::from((a & b).count_ones());
                    violations += u32::from(lhs != rhs);
                }
            }
            Ok((violations == 0, format!("{violations} violations")))
        }),
        check("parseval-dim8", || {
            let mut worst = 0f64;
            for seed in 0..200 {
                let f = random_table(8, seed)?;
                let energy = f.map(|v| v * v)?.mean();
                let total = wht(&f)?.total_weight();
                worst = worst.max((total - energy).abs() / energy);
            }
            Ok((worst <= 1e-12, format!("worst relative error {worst:e}")))
        }),
        check("wht-involution-dim8", || {
            let mut ok = true;
            for seed in 0..50 {
                let f = random_table(8, 1000 + seed)?;
                let mut data = f.values().to_vec();
                butterfly(&mut data);
                butterfly(&mut data);
                ok &= data
                    .iter()
                    .zip(f.values())
                    .all(|(a, b)| (a - 256.0 * b).abs() <= 1e-12 * 256.0);
                let back = wht(&f)?.inverse()?;
                ok &= back.values().iter().zip(f.values()).all(|(a, b)| (a - b).abs() <= 1e-12);
            }
            Ok((ok, "50 tables".into()))
        }),
        check("coefficient-bounded-by-l1-dim8", || {
            let mut ok = true;
            for seed in 0..50 {
                let f = random_table(8, 2000 + seed)?;
                let alpha = f.l1_mean();
                ok &= wht(&f)?.coeffs().iter().all(|c| c.abs() <= alpha * (1.0 + 1e-12));
            }
            Ok((ok, "50 tables".into()))
        }),
        check("level-weight-monotone-dim8", || {
            let mut ok = true;
            for seed in 0..20 {
                let spec = wht(&random_table(8, 3000 + seed)?)?;
                let mut prev = 0.0;
                for d in 0..=8 {
                    let w = spec.level_weight(d)?;
                    ok &= w >= prev;
                    prev = w;
                }
                ok &= rel_close(prev, spec.total_weight(), 1e-12);
            }
            Ok((ok, "20 tables, d = 0..=8".into()))
        }),
        check("u2-two-routes-dim6", || {
            let mut worst = 0f64;
            for seed in 0..20 {
                let f = random_table(6, 4000 + seed)?;
                let a = gowers_norm_exact(&f, 2)?.value_pow;
                let b = gowers_pow_direct(&f, 2)?;
                worst = worst.max((a - b).abs() / b.abs());
            }
            Ok((worst <= 1e-10, format!("worst relative error {worst:e}")))
        }),
        check("gowers-monotone-dim8", || {
            let mut ok = true;
            for seed in 0..20 {
                let f = random_table(8, 5000 + seed)?;
                let u1 = gowers_norm_exact(&f, 1)?.value;
                let u2 = gowers_norm_exact(&f, 2)?.value;
                let u3 = gowers_norm_exact(&f, 3)?.value;
                ok &= u1 <= u2 + 1e-9 && u2 <= u3 + 1e-9;
            }
            Ok((ok, "20 tables".into()))
        }),
        check("unit-norm-iff-low-degree-phase-dim4", || {
            // ||(-1)^P||_{U_s} = 1 exactly when P has degree < s.
            let mut mismatches = 0;
            for bits in 0u64..1 << 16 {
                let f = RealFunctionTable::from_fn(4, |x| if bits >> x & 1 == 1 { -1.0 } else { 1.0 })?;
                let p = TorusPolynomial::from_fn(4, 1, |x| i128::from(bits >> x & 1))?;
                for s in [2u32, 3] {
                    let v = gowers_norm_exact(&f, s)?.value_pow;
                    let unit = (v - 1.0).abs() <= 1e-12;
                    mismatches += u32::from(v > 1.0 + 1e-12 || unit != verify_degree(&p, s - 1));
                }
            }
            Ok((mismatches == 0, format!("{mismatches} mismatches over 65536 sign functions")))
        }),
        check("derivatives-commute-dim6", || {
            let f = random_table(6, 6000)?;
            let mut ok = true;
            for a in (0..64).step_by(7) {
                for b in (0..64).step_by(5) {
                    let (ha, hb) = (BitVector::new(a, 6)?, BitVector::new(b, 6)?);
                    let ab = derivative(&derivative(&f, &ha)?, &hb)?;
                    let ba = derivative(&derivative(&f, &hb)?, &ha)?;
                    ok &= ab.values().iter().zip(ba.values()).all(|(x, y)| (x - y).abs() <= 1e-15);
                }
            }
            Ok((ok, "117 direction pairs".into()))
        }),
        check("intersection-residue-dim8", || {
            let mut cases = 0u64;
            for x in 0..256 {
                for z in 0..256 {
                    for j in 1..=3 {
                        weight_intersection_residue(&BitVector::new(x, 8)?, &BitVector::new(z, 8)?, j)?;
                        cases += 1;
                    }
                }
            }
            Ok((true, format!("{cases} cases")))
        }),
        check("orbit-closed-form-dim6", || {
            let mut checked = 0;
            for dim in 1..=6u32 {
                for a in 0..1u64 << dim {
                    for b in (0..1u64 << dim).step_by(3) {
                        let alg = AtomAlgebra::new(dim, vec![BitVector::new(a, dim)?, BitVector::new(b, dim)?])?;
                        let (ok, n) = orbit_agreement(&alg)?;
                        checked += n;
                        if !ok {
                            return Ok((false, format!("mismatch for generators {a:#x}, {b:#x}")));
                        }
                    }
                }
            }
            Ok((true, format!("{checked} subsets")))
        }),
        check("residue-classes-dim12", || {
            let mut ok = true;
            for n in 1..=6 {
                for k in 1..=4 {
                    let spec = DomainSpec::residue(n, k)?;
                    let d = spec.density_f64();
                    ok &= d >= 1.0 / f64::from(1u32 << k) && d <= 1.0;
                    let m = 1u64 << (k - 1);
                    ok &= (0..1u64 << (2 * n)).all(|x| {
                        spec.contains(x) == (u64::from(x.count_ones()) % m == u64::from(n) % m)
                            && (!DomainSpec::Slice { n }.contains(x) || spec.contains(x))
                    });
                }
            }
            Ok((ok, "2n = 2..=12, k = 1..=4".into()))
        }),
        check("joint-probability-t0-is-density", || {
            let mut ok = true;
            for n in 1..=5 {
                let alg = AtomAlgebra::new(2 * n, vec![])?;
                let p = joint_slice_probability(&alg, &slice_constraints(&alg, None)?)?;
                ok &= p == DomainSpec::slice(n)?.density();
            }
            Ok((ok, "2n = 2..=10".into()))
        }),
        check("parallelepiped-probability", || {
            let mut detail = Vec::new();
            for n in 2..=4 {
                for d in 1..=2 {
                    let c = parallelepiped_probability_check(n, d)?;
                    if !c.holds() || (d == 1 && !c.is_equality()) {
                        return Ok((false, format!("fails at 2n={} d={d}", 2 * n)));
                    }
                    detail.push(format!("2n={} d={d}: {}", 2 * n, c.probability));
                }
            }
            Ok((true, detail.join("; ")))
        }),
        check("fourier-max-lower-bound-dim6", || {
            for seed in 0..200 {
                if !max_fourier_lower_bound_check(&random_table(6, 7000 + seed)?)?.holds() {
                    return Ok((false, format!("seed {seed}")));
                }
            }
            Ok((true, "200 tables".into()))
        }),
        check("quadruple-count-two-routes-2n8", || {
            let mut ok = true;
            for seed in 0..4 {
                let f = SliceFunction::random(4, seed)?;
                ok &= gowers_test_counts(&f, 2)? == linearity_counts_enumerated(&f)?;
            }
            Ok((ok, "4 random slice functions".into()))
        }),
        check("weight-polynomial-degrees", || {
            let mut ok = true;
            for n in [3u32, 4] {
                for d in 1..=3 {
                    for j in (1..1u64 << d).step_by(2) {
                        let p = weight_polynomial(n, j, d, 0)?;
                        ok &= verify_degree(&p, d) && !verify_degree(&p, d - 1);
                    }
                }
            }
            Ok((ok, "2n in {6, 8}, d = 1..=3, odd j".into()))
        }),
        check("residue-decomposition", || {
            let mut ok = true;
            for dim in 1..=12 {
                for d in 1..=3 {
                    ok &= residue_decomposition_check(dim, d)?;
                }
            }
            Ok((ok, "dim 1..=12, d = 1..=3".into()))
        }),
        check("degree-closure", || {
            let mut ok = true;
            for seed in 0..30u64 {
                let d = 1 + (seed % 3) as u32;
                let p = random_torus_polynomial(6, d, 4, 8000 + seed)?;
                let r = random_torus_polynomial(6, d, 4, 9000 + seed)?;
                ok &= verify_degree(&p, d) && verify_degree(&r, d);
                ok &= verify_degree(&p.add(&r)?, d);
                let deg = degree(&p);
                ok &= (deg..=deg + 2).all(|e| verify_degree(&p, e));
            }
            Ok((ok, "30 random pairs, dim 6".into()))
        }),
        check("correlation-matches-empty-coefficient", || {
            let mut rng_seed = 0u64;
            let mut ok = true;
            for _ in 0..20 {
                rng_seed += 1;
                let mut rng = stream_rng(rng_seed, 0);
                let bits: Vec<bool> = (0..256).map(|_| rand::Rng::random(&mut rng)).collect();
                let signs = RealFunctionTable::from_boolean(8, &bits)?;
                let c = correlation(Some(&bits), &TorusPolynomial::zero(8)?, &DomainSpec::cube(8)?)?;
                ok &= (c.re - wht(&signs)?.coeff(0)).abs() <= 1e-12 && c.im == 0.0 && c.magnitude <= 1.0;
            }
            Ok((ok, "20 random functions, dim 8".into()))
        }),
        check("sampler-support-2n4", || {
            let slice = DomainSpec::slice(2)?;
            let mut rng = stream_rng(42, 0);
            let mut seen = HashSet::new();
            for _ in 0..2000 {
                let s = crate::slicemodel::sample_conditioned(
                    &slice,
                    crate::slicemodel::SampleShape::Quadruple,
                    &mut rng,
                )?;
                let (x, y, z) = (s.points[0].bits(), s.points[1].bits(), s.points[2].bits());
                if ![x, y, z, x ^ y ^ z].iter().all(|&p| slice.contains(p)) {
                    return Ok((false, "constraint violated".into()));
                }
                seen.insert((x, y, z));
            }
            Ok((true, format!("{} distinct accepted triples", seen.len())))
        }),
    ]
}
