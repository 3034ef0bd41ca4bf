use bilex::audit::{
    check_lemma1, collision_probability, guessing_probability, statistical_distance,
    OutputDistribution,
};
use bilex::charsum::{single_sum, PairwiseSum};
use bilex::ec::{Curve, Point};
use bilex::extract::f_k;
use bilex::field::FiniteField;
use bilex::fp::{lsb, PrimeField};
use bilex::fpn::ExtField;
use num_complex::Complex64;
use proptest::prelude::*;

const PRIMES: &[u64] = &[
    2,
    3,
    5,
    7,
    11,
    13,
    101,
    1009,
    65_521,
    1_000_000_007,
    (1 << 61) - 1,
];

fn fields() -> Vec<ExtField> {
    [(2, 2), (2, 3), (2, 4), (3, 2), (5, 2), (7, 3), (11, 2)]
        .iter()
        .map(|&(p, n)| ExtField::with_degree(p, n).unwrap())
        .collect()
}

proptest! {
    #[test]
    fn prime_field_axioms(pi in 0..PRIMES.len(), a: u64, b: u64, c: u64) {
        let f = PrimeField::new(PRIMES[pi]).unwrap();
        let (a, b, c) = (f.reduce(a), f.reduce(b), f.reduce(c));
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a + (-a), f.zero());
        if !f.is_zero(&a) {
            prop_assert_eq!(a * a.inv().unwrap(), f.one());
        }
        prop_assert_eq!(a.pow(f.modulus() - 1), if f.is_zero(&a) { f.zero() } else { f.one() });
    }

    #[test]
    fn lsb_is_residue_mod_power_of_two(pi in 0..PRIMES.len(), x: u64, k in 0u32..64) {
        let f = PrimeField::new(PRIMES[pi]).unwrap();
        let x = f.reduce(x);
        let m = f.bits();
        match lsb(x, k) {
            Ok(bits) => {
                prop_assert!(k <= m);
                prop_assert_eq!(bits.value(), x.value() % (1u128 << k) as u64);
                prop_assert_eq!(bits.len(), k);
            }
            Err(_) => prop_assert!(k > m),
        }
    }

    #[test]
    fn extension_field_axioms(fi in 0usize..7, a: u64, b: u64, c: u64) {
        let fs = fields();
        let f = &fs[fi];
        let q = f.order();
        let (a, b, c) = (f.element_at(a % q), f.element_at(b % q), f.element_at(c % q));
        prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
        prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
        prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
        if !f.is_zero(&a) {
            prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        }
        // trace is additive and Frobenius-invariant
        prop_assert_eq!(f.trace(&f.add(&a, &b)), f.trace(&a) + f.trace(&b));
        prop_assert_eq!(f.trace(&f.pow(&a, f.characteristic())), f.trace(&a));
        prop_assert_eq!(f.index_of(&f.element_at(f.index_of(&a))), f.index_of(&a));
    }

    #[test]
    fn f_k_depends_only_on_the_product(x1 in 1u64..1009, x2 in 1u64..1009, t in 1u64..1009, k in 0u32..=10) {
        let f = PrimeField::new(1009).unwrap();
        let (x1, x2, t) = (f.reduce(x1), f.reduce(x2), f.reduce(t));
        let a = f_k(x1, x2, k).unwrap();
        prop_assert_eq!(&a, &f_k(x1 * t, x2 * t.inv().unwrap(), k).unwrap());
        prop_assert_eq!(&a, &f_k(x2, x1, k).unwrap());
        prop_assert!(a.value() < 1 << k);
    }

    #[test]
    fn scalar_multiplication_is_additive(n in 0u64..5000, m in 0u64..5000, seed in 0usize..1000) {
        let f = PrimeField::new(1009).unwrap();
        let c = Curve::new(f, f.reduce(1), f.reduce(6)).unwrap();
        let pts = c.enumerate().unwrap();
        let p = &pts[seed % pts.len()];
        let lhs = c.scalar_mul(n + m, p);
        let rhs = c.add(&c.scalar_mul(n, p), &c.scalar_mul(m, p)).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!(c.is_on_curve(&lhs));
        prop_assert_eq!(c.scalar_mul(pts.len() as u64, p), Point::Infinity);
    }

    #[test]
    fn distribution_statistics_chain(counts in prop::collection::vec(0u64..50, 1..40)) {
        prop_assume!(counts.iter().any(|&c| c > 0));
        let d = OutputDistribution::from_counts(&counts);
        let n = counts.len() as f64;
        let col = collision_probability(&d).unwrap();
        let guess = guessing_probability(&d).unwrap();
        let sd = statistical_distance(&d).unwrap();
        prop_assert!(col >= 1.0 / n - 1e-12);
        prop_assert!(guess * guess <= col + 1e-12 && col <= guess + 1e-12);
        prop_assert!((0.0..1.0).contains(&sd));
        prop_assert!(check_lemma1(&d).unwrap().holds);
    }

    #[test]
    fn pairwise_sum_matches_naive_within_tolerance(xs in prop::collection::vec(-1.0f64..1.0, 0..500)) {
        let acc: PairwiseSum = xs.iter().map(|&x| Complex64::new(x, -x)).collect();
        let s = acc.finish();
        let naive: f64 = xs.iter().sum();
        prop_assert_eq!(s.terms, xs.len() as u64);
        prop_assert!((s.re - naive).abs() <= 1e-9 * xs.len().max(1) as f64);
        prop_assert_eq!(s.im, -s.re);
    }

    #[test]
    fn single_sum_is_invariant_under_the_subgroup(a in 0u64..1009, qi in 0usize..6, xi: usize) {
        let f = PrimeField::new(1009).unwrap();
        let q = [1u64, 2, 8, 63, 252, 1008][qi];
        let g = f.subgroup_of_order(q, 1).unwrap();
        let x0 = g.elements()[xi % g.elements().len()];
        let s = single_sum(f.reduce(a), &g);
        prop_assert!(single_sum(f.reduce(a) * x0, &g).approx_eq(s.value()));
        prop_assert!(s.norm() <= (1009f64).sqrt() + 1e-9 * q as f64 || a == 0);
    }
}
