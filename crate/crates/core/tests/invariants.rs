use butterfly_core::ddouble::discriminant_dd;
use butterfly_core::experiments::box_count;
use butterfly_core::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn coprime() -> impl Strategy<Value = ReducedRational> {
    (1i64..=25, 1i64..=25).prop_filter_map("p < q", |(p, q)| (p < q).then(|| ReducedRational::from_i64(p, q)))
}

fn intervals() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-5.0f64..5.0, 0.0f64..1.0).prop_map(|(a, w)| (a, a + w)), 0..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn set_union_and_intersection_bound_measure(a in intervals(), b in intervals()) {
        let (a, b) = (SpectralSet::from_intervals(a), SpectralSet::from_intervals(b));
        let (u, i) = (a.union(&b), a.intersect(&b));
        let tol = 1e-12;
        prop_assert!((u.measure() + i.measure() - a.measure() - b.measure()).abs() < tol);
        prop_assert!(i.is_subset_of(&a, tol) && i.is_subset_of(&b, tol));
        prop_assert!(a.is_subset_of(&u, tol) && b.is_subset_of(&u, tol));
    }

    #[test]
    fn merged_sets_are_ordered_and_disjoint(a in intervals()) {
        let m = SpectralSet::from_intervals(a).merged();
        for w in m.bands.windows(2) {
            prop_assert!(w[0].hi < w[1].lo);
        }
    }

    #[test]
    fn chambers_identity_holds(alpha in coprime(), lambda in 0.5f64..2.0, t in 0.0f64..1.0, x in -1.0f64..1.0, y in -0.5f64..0.5) {
        let (w, _) = OperatorSpec::almost_mathieu(alpha.clone(), lambda, 0.0).unwrap().spectral_window();
        let e = Complex64::new(x * w.abs(), y);
        let q = alpha.period().unwrap() as i32;
        let r = chambers_residual(&alpha, lambda, e, 2.0 * PI * t).unwrap();
        prop_assert!(r <= 1e-9 * e.norm().powi(q).max(1.0), "residual {r}");
    }

    #[test]
    fn double_double_discriminant_agrees_with_binary64(alpha in coprime(), lambda in 0.5f64..2.0, theta in 0.0f64..6.28, x in -3.0f64..3.0) {
        let spec = OperatorSpec::almost_mathieu(alpha.clone(), lambda, theta).unwrap();
        let z = Complex64::new(x, 0.3);
        let d64: Complex64 = discriminant(&spec, z);
        let dd = discriminant_dd(&alpha, lambda, theta, z).unwrap();
        let q = spec.period() as f64;
        prop_assert!((d64 - dd).norm() <= 1e-12 * q * d64.norm().max(1.0));
    }

    #[test]
    fn periodic_spectrum_has_q_ordered_bands(alpha in coprime(), lambda in 0.5f64..3.0, theta in 0.0f64..6.28) {
        let spec = OperatorSpec::almost_mathieu(alpha.clone(), lambda, theta).unwrap();
        let s = spectrum_bands(&spec).unwrap();
        prop_assert_eq!(s.len(), spec.period());
        for b in &s.bands {
            prop_assert!(b.lo <= b.hi);
        }
        for w in s.bands.windows(2) {
            prop_assert!(w[0].hi <= w[1].lo + 1e-12);
        }
        let (lo, hi) = spec.spectral_window();
        prop_assert!(s.lowest().unwrap() >= lo - 1e-9 && s.highest().unwrap() <= hi + 1e-9);
    }

    #[test]
    fn inverse_blocks_are_unimodular(base in (1i64..4, 2i64..6), k in 3i64..12, e in -2.0f64..2.0, eps in 0.01f64..0.5) {
        let (p, q) = base;
        prop_assume!(p < q && num_integer::gcd(p, q) == 1);
        let (pt, qt) = (k * p + 1, k * q + 1);
        prop_assume!(num_integer::gcd(pt, qt) == 1);
        let ip = IntermediatePotential::with_l0(
            ReducedRational::from_i64(p, q), ReducedRational::from_i64(pt, qt), 0.25, 2, Branch::Negative,
        ).unwrap();
        for t in inverse_blocks(&ip, e, eps) {
            prop_assert!((t.det() - Complex64::new(1.0, 0.0)).norm() < 1e-8 * t.frobenius().powi(2).max(1.0));
        }
    }

    #[test]
    fn convergents_satisfy_the_recurrence(ns in prop::collection::vec(1u32..50, 1..10)) {
        let quotients: Vec<BigInt> = ns.iter().map(|&n| BigInt::from(n)).collect();
        let cf = convergents(&quotients).unwrap();
        let (mut p0, mut q0, mut p1, mut q1) = (BigInt::from(1), BigInt::from(0), BigInt::from(0), BigInt::from(1));
        for (n, c) in quotients.iter().zip(&cf.convergents) {
            let (p2, q2) = (n * &p1 + &p0, n * &q1 + &q0);
            prop_assert_eq!(c.numer(), &p2);
            prop_assert_eq!(c.denom(), &q2);
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
        }
    }

    #[test]
    fn box_counts_grow_as_scales_shrink(a in intervals(), s in 0.01f64..1.0) {
        let set = SpectralSet::from_intervals(a);
        prop_assert!(box_count(&set, s / 2.0) >= box_count(&set, s));
    }

    #[test]
    fn admissible_chains_pass(seed in 0u64..1000, n in 1usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = random_admissible_chain(&mut rng, n, 0.5);
        let cert = product_growth(&chain, 0.5).unwrap();
        prop_assert_eq!(cert.verdict, Verdict::Pass);
        prop_assert!(cert.ln_lower <= cert.ln_norm_final && cert.ln_norm_final <= cert.ln_upper);
    }
}
