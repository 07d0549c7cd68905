use butterfly_core::*;
use num_complex::Complex64;
use std::f64::consts::PI;

fn r(p: i64, q: i64) -> ReducedRational {
    ReducedRational::from_i64(p, q)
}

#[test]
fn free_operator_spectrum_is_the_interval() {
    let s = spectrum_bands(&OperatorSpec::free()).unwrap();
    assert_eq!(s.len(), 1);
    assert!((s.bands[0].lo + 2.0).abs() < 1e-12 && (s.bands[0].hi - 2.0).abs() < 1e-12);
    assert!((ids_eval(&OperatorSpec::free(), 0.0).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn half_period_bands_match_closed_form() {
    // D(E) = E^2 - lambda^2 cos^2(theta) - 2
    for (lambda, theta) in [(2.0, 0.0), (1.0, 0.3), (0.5, 1.1)] {
        let spec = OperatorSpec::almost_mathieu(r(1, 2), lambda, theta).unwrap();
        let c = (lambda * f64::cos(theta)).powi(2);
        let (inner, outer) = (c.sqrt(), (4.0 + c).sqrt());
        let s = spectrum_bands(&spec).unwrap();
        let want = [(-outer, -inner), (inner, outer)];
        for (b, (lo, hi)) in s.bands.iter().zip(want) {
            assert!((b.lo - lo).abs() < 1e-9 && (b.hi - hi).abs() < 1e-9, "{b:?} vs ({lo}, {hi})");
        }
        for e in [-1.7, 0.2, 2.5] {
            let d: f64 = discriminant(&spec, e);
            assert!((d - (e * e - c - 2.0)).abs() < 1e-12);
        }
    }
}

#[test]
fn free_lyapunov_and_green_function() {
    let free = OperatorSpec::free();
    let g = lyapunov(&free, Complex64::new(3.0, 0.0)).gamma;
    assert!((g - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-12);
    assert_eq!(lyapunov(&free, Complex64::new(1.0, 0.0)).gamma, 0.0);

    let z = Complex64::new(0.4, 0.7);
    let root = (z * z - 4.0).sqrt();
    let mu = [(z + root) / 2.0, (z - root) / 2.0].into_iter().min_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let g11 = green_halfline(&free, 1, 1, z).unwrap().value;
    assert!((g11 + mu).norm() < 1e-12, "{g11} vs {}", -mu);
    let g15 = green_halfline(&free, 1, 5, z).unwrap().value;
    assert!((g15 + mu.powi(5)).norm() < 1e-12);
}

#[test]
fn last_wilkinson_sum_is_reciprocal_period() {
    for (p, q) in [(1, 2), (1, 3), (2, 5), (3, 8), (5, 13)] {
        let s = last_wilkinson_sum(&r(p, q)).unwrap();
        assert!((s - 1.0 / q as f64).abs() < 1e-10 / q as f64, "{p}/{q}: {s}");
    }
}

#[test]
fn union_measure_tracks_four_minus_two_lambda() {
    let m = spectral_union_s(&r(8, 13), 1.0).unwrap().measure();
    assert!((m - 2.0).abs() <= 0.3, "{m}");
    let small = spectral_union_s(&r(21, 34), 2.0).unwrap().measure();
    assert!(small < 0.5, "{small}");
}

#[test]
fn chambers_relation_at_rational_points() {
    for (p, q) in [(1, 3), (2, 7), (5, 11)] {
        for theta in [0.0, 0.4, PI / 3.0] {
            let res = chambers_residual(&r(p, q), 1.5, Complex64::new(0.7, 0.2), theta).unwrap();
            assert!(res < 1e-12, "{p}/{q} theta {theta}: {res}");
        }
    }
}

#[test]
fn rationals_reduce() {
    let a = reduce_fraction(6, 21).unwrap();
    assert_eq!((a.numer().to_string(), a.denom().to_string()), ("2".into(), "7".into()));
    assert!(reduce_fraction(1, 0).is_err());
}

#[test]
fn alpha_construction_round_trips() {
    let (cf, cert) = construct_alpha(10.0, 3).unwrap();
    assert!(cert.pass);
    assert_eq!(verify_conditions(&cf, 10.0, 3).unwrap(), cert);
    for l in &cert.levels {
        assert!(l.holds());
        assert!(l.q_next > l.q_j.pow(l.j as u32));
    }
}

#[test]
fn intermediate_potential_step_one() {
    let ip = build_intermediate(&r(1, 2), &r(13, 27), 0.25, 1.0).unwrap();
    let rep = green_comparison(&ip, 0.0, 0.1).unwrap();
    assert!(rep.step_i_holds(), "{rep:?}");
}

#[test]
fn butterfly_row_count() {
    let d = butterfly_generate(20, 2.0, ThetaMode::Union, 500).unwrap();
    let want: u64 = (1..=20u64).map(|q| q * (1..=q).filter(|&p| num_integer::gcd(p, q) == 1).count() as u64).sum();
    assert_eq!(d.rows.len() as u64, want);
}
