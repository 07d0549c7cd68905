//! Seeded invariant suites run by `verify`.
//!
//! Samples are drawn serially from one seeded stream per suite and the
//! per-sample work is mapped in parallel with results collected in order,
//! so every report is independent of the thread count.

use std::f64::consts::PI;

use butterfly_core::bands::{jdelta_from_landscape, IdsEvaluator, JDeltaVariant};
use butterfly_core::ddouble::discriminant_with_slope_dd;
use butterfly_core::experiments::{
    box_count, butterfly_generate, measure_decay, reduced_rationals, ThetaMode,
};
use butterfly_core::interpolation::{
    build_intermediate, green_comparison, inverse_blocks, Branch, IntermediatePotential,
};
use butterfly_core::{
    chambers_residual, construct_alpha, discriminant, green_identities_check,
    last_wilkinson_sum, product_growth, random_admissible_chain, spectral_union_s,
    spectrum_bands, surace_deviation, verify_conditions, ChambersLandscape, Mat2, Mat2C,
    OperatorSpec, ReducedRational, SpectralSet, Verdict,
};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const SUITES: [&str; 14] = [
    "chambers", "wilkinson", "jdelta", "bands", "products", "greens", "surace", "interp",
    "alpha", "butterfly", "decay", "boxes", "sets", "determinism",
];

/// Failure messages kept per suite.
const MAX_REPORTED: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub cases: usize,
    pub passed: usize,
    /// Largest observed `metric / tolerance`; at most 1 when every case passes.
    pub worst_ratio: f64,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.passed == self.cases
    }
}

/// One checked case: `ratio <= 1` passes, `None` is a hard failure.
struct Case {
    label: String,
    ratio: Option<f64>,
}

impl Case {
    fn new(label: String, metric: f64, tol: f64) -> Self {
        let ratio = metric / tol;
        Self { label, ratio: (!ratio.is_nan()).then_some(ratio) }
    }

    fn flag(label: String, holds: bool) -> Self {
        Self { label, ratio: Some(if holds { 0.0 } else { f64::INFINITY }) }
    }

    fn error(label: String, err: impl std::fmt::Display) -> Self {
        Self { label: format!("{label}: {err}"), ratio: None }
    }

    fn passes(&self) -> bool {
        self.ratio.is_some_and(|r| r <= 1.0)
    }
}

fn tally(suite: &'static str, cases: Vec<Case>) -> SuiteResult {
    let passed = cases.iter().filter(|c| c.passes()).count();
    let worst_ratio = cases.iter().map(|c| c.ratio.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let failures = cases
        .iter()
        .filter(|c| !c.passes())
        .take(MAX_REPORTED)
        .map(|c| match c.ratio {
            Some(r) => format!("{} (ratio {r:.3e})", c.label),
            None => c.label.clone(),
        })
        .collect();
    SuiteResult { suite, cases: cases.len(), passed, worst_ratio, failures }
}

fn rng_for(seed: u64, suite: &str) -> ChaCha8Rng {
    let salt = suite.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

fn rat(p: u64, q: u64) -> ReducedRational {
    ReducedRational::from_i64(p as i64, q as i64)
}

fn pick_rational(rng: &mut impl Rng, pool: &[(u64, u64)]) -> (u64, u64) {
    *pool.choose(rng).expect("nonempty pool")
}

/// `|D - Delta + 2 (lambda/2)^q cos q theta| <= 1e-9 max(1, |E|^q)`.
pub fn chambers(seed: u64, samples: usize, qmax: u64) -> SuiteResult {
    let mut rng = rng_for(seed, "chambers");
    let pool = reduced_rationals(qmax);
    let draws: Vec<_> = (0..samples)
        .map(|_| {
            let (p, q) = pick_rational(&mut rng, &pool);
            let lambda = rng.gen_range(0.5..=2.0);
            let theta = rng.gen_range(0.0..2.0 * PI);
            let w = 2.0 + lambda;
            let im = if rng.gen_bool(0.5) { rng.gen_range(0.0..1.0) } else { 0.0 };
            (p, q, lambda, theta, Complex64::new(rng.gen_range(-w..w), im))
        })
        .collect();
    let cases = draws
        .par_iter()
        .map(|&(p, q, lambda, theta, e)| {
            let label = format!("{p}/{q} lambda={lambda} theta={theta} E={e}");
            match chambers_residual(&rat(p, q), lambda, e, theta) {
                Ok(res) => Case::new(label, res, 1e-9 * e.norm().powi(q as i32).max(1.0)),
                Err(err) => Case::error(label, err),
            }
        })
        .collect();
    tally("chambers", cases)
}

/// `sum 1/|Delta'(E_nu)| = 1/q` to relative `1e-8`, every reduced `p/q`.
pub fn wilkinson(qmax: u64) -> SuiteResult {
    let cases = reduced_rationals(qmax)
        .par_iter()
        .map(|&(p, q)| {
            let label = format!("{p}/{q}");
            match last_wilkinson_sum(&rat(p, q)) {
                Ok(s) => Case::new(label, (s * q as f64 - 1.0).abs(), 1e-8),
                Err(err) => Case::error(label, err),
            }
        })
        .collect();
    tally("wilkinson", cases)
}

/// `meas{|Delta| <= delta} <= 2 e delta / q` on a log grid of `delta`.
pub fn jdelta(qmax: u64, deltas: usize) -> SuiteResult {
    let grid: Vec<f64> = (0..deltas)
        .map(|i| 10f64.powf(-4.0 + 4.0 * i as f64 / (deltas.max(2) - 1) as f64))
        .collect();
    let cases = reduced_rationals(qmax)
        .par_iter()
        .flat_map_iter(|&(p, q)| {
            let land = ChambersLandscape::new(&rat(p, q), 2.0);
            grid.iter()
                .map(|&d| {
                    let label = format!("{p}/{q} delta={d}");
                    let sets = land.as_ref().map_err(Clone::clone).and_then(|l| {
                        jdelta_from_landscape(l, d, JDeltaVariant::Level)
                    });
                    match sets {
                        Ok(s) => Case::new(label, s.measure, s.bound.expect("level bound")),
                        Err(err) => Case::error(label, err),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    tally("jdelta", cases)
}

/// `q` ordered disjoint bands with `|D| = 2` at the edges, nondecreasing
/// IDS, and inclusion in the union over phases.
pub fn bands(seed: u64, samples: usize, qmax: u64) -> SuiteResult {
    let mut rng = rng_for(seed, "bands");
    let pool = reduced_rationals(qmax);
    let draws: Vec<_> = (0..samples)
        .map(|_| {
            let (p, q) = pick_rational(&mut rng, &pool);
            (p, q, rng.gen_range(0.0..=3.0), rng.gen_range(0.0..2.0 * PI))
        })
        .collect();
    let cases = draws
        .par_iter()
        .map(|&(p, q, lambda, theta)| {
            let label = format!("{p}/{q} lambda={lambda} theta={theta}");
            match band_case(p, q, lambda, theta) {
                Ok(ratio) => Case { label, ratio: Some(ratio) },
                Err(err) => Case::error(label, err),
            }
        })
        .collect();
    tally("bands", cases)
}

fn band_case(p: u64, q: u64, lambda: f64, theta: f64) -> butterfly_core::Result<f64> {
    let spec = OperatorSpec::almost_mathieu(rat(p, q), lambda, theta)?;
    let set = spectrum_bands(&spec)?;
    let b = &set.bands;
    if b.len() != q as usize || b.iter().any(|x| !(x.lo <= x.hi)) {
        return Ok(f64::INFINITY);
    }
    if b.windows(2).any(|w| w[0].hi > w[1].lo) {
        return Ok(f64::INFINITY);
    }
    let mut ratio: f64 = 0.0;
    for x in b.iter().flat_map(|x| [x.lo, x.hi]) {
        let (d, slope) = discriminant_with_slope_dd(&rat(p, q), lambda, theta, x)?;
        // the Sturm count places an edge within O(q eps) of the true one
        let tol = 1e-9 + 4.0 * q as f64 * f64::EPSILON * slope.to_f64().abs() * (x.abs() + lambda + 2.0);
        ratio = ratio.max((d.to_f64().abs() - 2.0).abs() / tol);
    }
    let (lo, hi) = spec.spectral_window();
    let ids = IdsEvaluator::new(&spec)?;
    let mut last = -1.0;
    for i in 0..=64 {
        let v = ids.eval(lo + (hi - lo) * i as f64 / 64.0);
        if v < last || !(0.0..=1.0).contains(&v) {
            return Ok(f64::INFINITY);
        }
        last = v;
    }
    if !set.is_subset_of(&spectral_union_s(&rat(p, q), lambda)?, 1e-9) {
        return Ok(f64::INFINITY);
    }
    Ok(ratio)
}

/// Random admissible chains certify the two-sided growth bound.
pub fn products(seed: u64, chains: usize, max_len: usize, beta: f64) -> SuiteResult {
    let cases = (0..chains)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, "products");
            rng.set_stream(i as u64);
            let n = rng.gen_range(1..=max_len);
            let chain = random_admissible_chain(&mut rng, n, beta);
            let label = format!("chain {i} (N = {n})");
            match product_growth(&chain, beta) {
                Ok(cert) => {
                    let holds = matches!(cert.verdict, Verdict::Pass)
                        && cert.ln_lower <= cert.ln_norm_final
                        && cert.ln_norm_final <= cert.ln_upper;
                    Case::flag(format!("{label}: {:?}", cert.verdict), holds)
                }
                Err(err) => Case::error(label, err),
            }
        })
        .collect();
    tally("products", cases)
}

/// Factorization, power identity, `l2` identity and the Floquet
/// cross-check on random operators.
pub fn greens(seed: u64, samples: usize) -> SuiteResult {
    let mut rng = rng_for(seed, "greens");
    let pool = reduced_rationals(12);
    let draws: Vec<_> = (0..samples)
        .map(|_| {
            let (p, q) = pick_rational(&mut rng, &pool);
            let lambda = rng.gen_range(0.0..=3.0);
            let theta = rng.gen_range(0.0..2.0 * PI);
            let w = 2.0 + lambda;
            let z = Complex64::new(rng.gen_range(-w..w), rng.gen_range(0.1..=1.0));
            (p, q, lambda, theta, z, rng.gen_range(1..=5usize))
        })
        .collect();
    let cases = draws
        .par_iter()
        .map(|&(p, q, lambda, theta, z, m)| {
            let label = format!("{p}/{q} lambda={lambda} theta={theta} z={z} m={m}");
            let rep = OperatorSpec::almost_mathieu(rat(p, q), lambda, theta)
                .and_then(|spec| green_identities_check(&spec, z, m));
            match rep {
                Ok(r) => {
                    let l2 = (r.l2_sum - r.l2_identity).abs() / r.l2_identity.abs().max(1e-300);
                    let worst = [
                        r.factorization_residual,
                        r.power_modulus_residual,
                        r.floquet_residual,
                        l2,
                    ]
                    .into_iter()
                    .fold(0.0, f64::max);
                    let bounded = r.l2_sum <= r.l2_bound * (1.0 + 1e-8);
                    if r.pass && bounded {
                        Case::new(label, worst, 1e-8)
                    } else {
                        Case::flag(label, false)
                    }
                }
                Err(err) => Case::error(label, err),
            }
        })
        .collect();
    tally("greens", cases)
}

/// Grid-measured `meas{|gamma(E + i eps) - gamma(E)| >= eta} <= pi eps / eta`.
pub fn surace(seed: u64, pairs: usize) -> SuiteResult {
    let mut rng = rng_for(seed, "surace");
    let draws: Vec<_> = (0..pairs)
        .map(|_| (10f64.powf(rng.gen_range(-3.0..=-1.0)), rng.gen_range(0.05..=0.5)))
        .collect();
    let spec = OperatorSpec::almost_mathieu(rat(13, 21), 2.0, 0.0).expect("valid operator");
    let cases = draws
        .par_iter()
        .map(|&(eps, eta)| {
            let label = format!("eps={eps} eta={eta}");
            match surace_deviation(&spec, eps, eta, 4000) {
                Ok(r) => Case::new(label, r.measured, r.bound + r.slack),
                Err(err) => Case::error(label, err),
            }
        })
        .collect();
    tally("surace", cases)
}

fn zero_drift_case(p: u64, q: u64) -> butterfly_core::Result<f64> {
    let ip = IntermediatePotential::with_l0(rat(p, q), rat(p, q), 0.5, q, Branch::Negative)?;
    let spec = OperatorSpec::almost_mathieu(rat(p, q), 2.0, 0.0)?;
    let z = Complex64::new(-3.1, 0.01);
    let d: Complex64 = discriminant(&spec, z);
    let want = spec
        .period_values()
        .iter()
        .fold(Mat2C::identity(), |acc, &v| acc.mul(&Mat2::inverse_transfer(z, v)));
    let mut worst: f64 = 0.0;
    for blk in inverse_blocks(&ip, z.re, z.im) {
        worst = worst.max((blk.trace() - d).norm() / d.norm().max(1.0));
        let diff = Mat2C::new(blk.a11 - want.a11, blk.a12 - want.a12, blk.a21 - want.a21, blk.a22 - want.a22);
        worst = worst.max(diff.frobenius() / want.frobenius());
    }
    Ok(worst)
}

/// Zero-drift degeneration, unimodular inverse blocks, and step (i) of the
/// Green comparison.
pub fn interp(seed: u64, samples: usize) -> SuiteResult {
    let mut cases: Vec<Case> = [(1, 2), (1, 3), (2, 5), (3, 7)]
        .par_iter()
        .map(|&(p, q)| {
            let label = format!("zero drift {p}/{q}");
            match zero_drift_case(p, q) {
                Ok(w) => Case::new(label, w, 1e-10),
                Err(err) => Case::error(label, err),
            }
        })
        .collect();

    let label = "step (i) 1/2 vs 13/27".to_string();
    cases.push(
        match build_intermediate(&rat(1, 2), &rat(13, 27), 0.25, 1.0)
            .and_then(|ip| green_comparison(&ip, 0.0, 0.1))
        {
            Ok(rep) => Case::new(label, rep.lhs_i, rep.rhs_i),
            Err(err) => Case::error(label, err),
        },
    );

    let mut rng = rng_for(seed, "interp");
    let draws: Vec<_> = (0..samples)
        .map(|_| {
            let (p, q) = pick_rational(&mut rng, &reduced_rationals(5));
            let k = rng.gen_range(2..=12u64);
            (p, q, k, rng.gen_range(-4.0..4.0), rng.gen_range(0.01..=1.0))
        })
        .collect();
    cases.par_extend(draws.par_iter().map(|&(p, q, k, e, eps)| {
        let (a, b) = unimodular_offset(p, q);
        let fine = ReducedRational::from_i64((k * p) as i64 + a, (k * q) as i64 + b);
        let label = format!("det of blocks {p}/{q} vs {fine} E={e} eps={eps}");
        match IntermediatePotential::with_l0(rat(p, q), fine.clone(), 0.5, 1, Branch::Negative) {
            Ok(ip) => {
                let worst = inverse_blocks(&ip, e, eps)
                    .iter()
                    .map(|m| (m.det() - 1.0).norm() / m.frobenius().powi(2).max(1.0))
                    .fold(0.0, f64::max);
                Case::new(label, worst, 1e-10)
            }
            Err(err) => Case::error(label, err),
        }
    }));
    tally("interp", cases)
}

/// `(a, b)` with `p b - q a = 1` and `0 <= b < q`, so that `(kp+a)/(kq+b)`
/// approaches `p/q` with `|(kp+a)/(kq+b) - p/q| = 1/(q(kq+b))`.
pub fn unimodular_offset(p: u64, q: u64) -> (i64, i64) {
    let (p, q) = (p as i64, q as i64);
    if q == 1 {
        return (-1, 0);
    }
    let (mut r0, mut r1, mut s0, mut s1) = (p.rem_euclid(q), q, 1i64, 0i64);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    let b = s0.rem_euclid(q);
    (((p * b - 1) / q), b)
}

/// Constructed frequencies round-trip and grow as `q_{j+1} > q_j^j`.
pub fn alpha(cs: &[f64], j_maxes: &[usize]) -> SuiteResult {
    let jobs: Vec<(f64, usize)> = cs.iter().flat_map(|&c| j_maxes.iter().map(move |&j| (c, j))).collect();
    let cases = jobs
        .par_iter()
        .map(|&(c, j_max)| {
            let label = format!("C={c} j_max={j_max}");
            let round = construct_alpha(c, j_max).and_then(|(cf, cert)| {
                let again = verify_conditions(&cf, c, j_max)?;
                let grows = cert.levels.iter().all(|l| l.q_next > l.q_j.pow(l.j as u32));
                Ok(cert.pass && again.pass && again == cert && grows)
            });
            match round {
                Ok(holds) => Case::flag(label, holds),
                Err(err) => Case::error(label, err),
            }
        })
        .collect();
    tally("alpha", cases)
}

/// Row counts `sum q phi(q)` in both modes, ordered finite rows.
pub fn butterfly(qmax: u64) -> SuiteResult {
    let want: usize = reduced_rationals(qmax).iter().map(|&(_, q)| q as usize).sum();
    let cases = [ThetaMode::Union, ThetaMode::Fixed { theta: 0.0 }, ThetaMode::Fixed { theta: 1.0 }]
        .par_iter()
        .map(|&mode| {
            let label = format!("qmax={qmax} {mode:?}");
            match butterfly_generate(qmax, 2.0, mode, qmax) {
                Ok(ds) => {
                    let ordered = ds.rows.iter().all(|r| r.lo <= r.hi && r.lo.is_finite() && r.hi.is_finite());
                    Case::flag(
                        format!("{label}: {} rows, {} failures", ds.rows.len(), ds.failures.len()),
                        ordered && ds.failures.is_empty() && ds.rows.len() == want,
                    )
                }
                Err(err) => Case::error(label, err),
            }
        })
        .collect();
    tally("butterfly", cases)
}

/// The measure of `S(pt/qt) cap J_delta(1/2)` decays along `k/(2k+1)`.
pub fn decay(kmax: u64) -> SuiteResult {
    let family: Vec<ReducedRational> = (3..=kmax).map(|k| rat(k, 2 * k + 1)).collect();
    let label = format!("1/2, delta = 0.5, k = 3..={kmax}");
    let case = match measure_decay(&rat(1, 2), 0.5, JDeltaVariant::Level, &family, 50.0) {
        Ok(r) => Case::flag(
            format!("{label}: rate {:.4}, R^2 {:.4}", r.fitted_rate, r.r_squared),
            r.fitted_rate < 0.0 && r.r_squared >= 0.9,
        ),
        Err(err) => Case::error(label, err),
    };
    tally("decay", vec![case])
}

fn random_set(rng: &mut impl Rng, n: usize) -> SpectralSet {
    let mut x = rng.gen_range(-4.0..-3.0);
    let mut iv = Vec::with_capacity(n);
    for _ in 0..n {
        x += rng.gen_range(0.0..0.3);
        let len = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..0.2) };
        iv.push((x, x + len));
        x += len;
    }
    SpectralSet::from_intervals(iv)
}

/// Box counts: `N(2s) <= N(s) <= 2 N(2s)` on dyadic scales and
/// `N(s) s >= meas`.
pub fn boxes(seed: u64, samples: usize) -> SuiteResult {
    let mut rng = rng_for(seed, "boxes");
    let sets: Vec<SpectralSet> = (0..samples).map(|i| random_set(&mut rng, 1 + i % 40)).collect();
    let cases = sets
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let holds = (1..16).all(|k| {
                let fine = (0.5f64).powi(k + 1);
                let (n, n2) = (box_count(s, fine), box_count(s, 2.0 * fine));
                n2 <= n && n <= 2 * n2 && n as f64 * fine >= s.merged().measure() * (1.0 - 1e-12)
            });
            Case::flag(format!("random set {i}"), holds)
        })
        .collect();
    tally("boxes", cases)
}

/// Interval-set algebra: intersection and union measures satisfy
/// inclusion-exclusion, and merging is idempotent.
pub fn sets(seed: u64, samples: usize) -> SuiteResult {
    let mut rng = rng_for(seed, "sets");
    let pairs: Vec<_> = (0..samples).map(|i| (random_set(&mut rng, 1 + i % 25), random_set(&mut rng, 1 + i % 17))).collect();
    let cases = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let (a, b) = (a.merged(), b.merged());
            let ie = (a.union(&b).measure() + a.intersect(&b).measure() - a.measure() - b.measure()).abs();
            let idem = a.merged() == a;
            let sub = a.intersect(&b).is_subset_of(&a, 1e-12) && a.is_subset_of(&a.union(&b), 1e-12);
            if idem && sub {
                Case::new(format!("pair {i}"), ie, 1e-12)
            } else {
                Case::flag(format!("pair {i}"), false)
            }
        })
        .collect();
    tally("sets", cases)
}

/// A parallel computation repeated under a single-thread pool agrees bit
/// for bit with the current pool.
pub fn determinism() -> SuiteResult {
    let run = || butterfly_generate(12, 2.0, ThetaMode::Union, 12).map(|d| d.rows);
    let here = run();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().map(|pool| pool.install(run));
    let case = match (here, single) {
        (Ok(a), Ok(Ok(b))) => Case::flag("butterfly qmax 12".into(), a == b),
        (Err(e), _) | (_, Ok(Err(e))) => Case::error("butterfly qmax 12".into(), e),
        (_, Err(e)) => Case::error("thread pool".into(), e),
    };
    tally("determinism", vec![case])
}

/// The named suite at its `verify` size.
pub fn run_suite(name: &str, seed: u64) -> Option<SuiteResult> {
    Some(match name {
        "chambers" => chambers(seed, 1000, 60),
        "wilkinson" => wilkinson(40),
        "jdelta" => jdelta(30, 10),
        "bands" => bands(seed, 200, 30),
        "products" => products(seed, 1000, 200, 0.5),
        "greens" => greens(seed, 100),
        "surace" => surace(seed, 20),
        "interp" => interp(seed, 50),
        "alpha" => alpha(&[1.0, 10.0], &[1, 3]),
        "butterfly" => butterfly(30),
        "decay" => decay(12),
        "boxes" => boxes(seed, 200),
        "sets" => sets(seed, 200),
        "determinism" => determinism(),
        _ => return None,
    })
}
