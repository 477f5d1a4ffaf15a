use proptest::prelude::*;
use slicelab::fourier::{coefficient_direct, wht};
use slicelab::gowers::{gowers_norm_exact, gowers_pow_direct, parallelepiped_sum};
use slicelab::nonclassical::{verify_degree, verify_degree_exhaustive, TorusPolynomial};
use slicelab::{BitVector, RealFunctionTable};

fn table(dim: u32) -> impl Strategy<Value = RealFunctionTable> {
    prop::collection::vec(-1.0f64..1.0, 1usize << dim).prop_map(move |v| RealFunctionTable::new(dim, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval(f in table(7)) {
        let energy = f.map(|v| v * v).unwrap().mean();
        let total = wht(&f).unwrap().total_weight();
        prop_assert!((energy - total).abs() <= 1e-12 * energy);
    }

    #[test]
    fn transform_matches_direct_coefficients(f in table(5), s in 0u64..32) {
        let fast = wht(&f).unwrap().coeff(s);
        prop_assert!((fast - coefficient_direct(&f, s)).abs() <= 1e-13);
    }

    #[test]
    fn xor_weight_identity(a in 0u64..1 << 20, b in 0u64..1 << 20) {
        let (x, y) = (BitVector::new(a, 20).unwrap(), BitVector::new(b, 20).unwrap());
        let lhs = x.xor(&y).unwrap().weight();
        prop_assert_eq!(lhs + 2 * x.and(&y).unwrap().weight(), x.weight() + y.weight());
    }

    #[test]
    fn u3_recursion_matches_enumeration(f in table(4)) {
        let a = gowers_norm_exact(&f, 3).unwrap().value_pow;
        let b = gowers_pow_direct(&f, 3).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300));
    }

    #[test]
    fn integer_sums_match_float_norm(v in prop::collection::vec(-1i8..=1, 64)) {
        let f = RealFunctionTable::new(6, v.iter().map(|&x| f64::from(x)).collect()).unwrap();
        let exact = parallelepiped_sum(&v, 6, 2).unwrap() as f64 / (64.0 * 64.0 * 64.0);
        let float = gowers_norm_exact(&f, 2).unwrap().value_pow;
        prop_assert!((exact - float).abs() <= 1e-12);
    }

    #[test]
    fn fast_degree_check_agrees_with_exhaustive(nums in prop::collection::vec(0u64..8, 16), d in 0u32..5) {
        let p = TorusPolynomial::new(4, 3, nums).unwrap();
        prop_assert_eq!(verify_degree(&p, d), verify_degree_exhaustive(&p, d).unwrap());
    }
}
