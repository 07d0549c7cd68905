//! Acceptance run: one PASS/FAIL line per criterion, each with its
//! tolerance and time limit. Exits nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use butterfly_cli::suites::{self, SuiteResult};
use butterfly_core::bands::JDeltaVariant;
use butterfly_core::experiments::{box_counting_dimension, geometric_scales, measure_decay};
use butterfly_core::{construct_alpha, spectral_union_s, verify_conditions, ReducedRational};

const SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(r: SuiteResult) -> Outcome {
    let mut detail = format!("{}/{} cases, worst ratio {:.3e}", r.passed, r.cases, r.worst_ratio);
    if let Some(f) = r.failures.first() {
        detail.push_str(&format!("; first failure: {f}"));
    }
    Outcome { pass: r.ok(), detail }
}

fn rat(p: i64, q: i64) -> ReducedRational {
    ReducedRational::from_i64(p, q)
}

fn decay() -> Outcome {
    let family: Vec<_> = (3..=40).map(|k| rat(k, 2 * k + 1)).collect();
    match measure_decay(&rat(1, 2), 0.5, JDeltaVariant::Level, &family, 50.0) {
        Ok(r) => Outcome {
            pass: r.fitted_rate < 0.0 && r.r_squared >= 0.9,
            detail: format!("rate {:.5}, R^2 {:.4} (need rate < 0, R^2 >= 0.9)", r.fitted_rate, r.r_squared),
        },
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn dimension() -> Outcome {
    let est = spectral_union_s(&rat(987, 1597), 2.0)
        .and_then(|s| box_counting_dimension(&s, &geometric_scales(1e-1, 1e-6, 21)));
    match est {
        Ok(b) => Outcome {
            pass: (0.4..=0.6).contains(&b.estimate),
            detail: format!("S(987/1597, 2): estimate {:.4}, R^2 {:.4} (need [0.4, 0.6])", b.estimate, b.r_squared),
        },
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn measure_limit() -> Outcome {
    match spectral_union_s(&rat(233, 377), 1.0) {
        Ok(s) => {
            let m = s.measure();
            Outcome { pass: (m - 2.0).abs() <= 0.2, detail: format!("meas S(233/377, 1) = {m:.6} (need |m - 2| <= 0.2)") }
        }
        Err(e) => Outcome { pass: false, detail: e.to_string() },
    }
}

fn alpha() -> Outcome {
    let run = || -> butterfly_core::Result<Outcome> {
        let (cf, cert) = construct_alpha(10.0, 3)?;
        let again = verify_conditions(&cf, 10.0, 3)?;
        let margins = again.levels.iter().all(|l| l.holds());
        let grows = cert.levels.iter().all(|l| l.q_next > l.q_j.pow(l.j as u32));
        let digits: Vec<usize> = cf.convergents.iter().map(|c| c.denom().to_string().len()).collect();
        Ok(Outcome {
            pass: cert.pass && again == cert && margins && grows,
            detail: format!(
                "{} levels, denominators with {digits:?} digits, round trip {}, q_(j+1) > q_j^j {}",
                cert.levels.len(),
                again == cert,
                grows
            ),
        })
    };
    run().unwrap_or_else(|e| Outcome { pass: false, detail: e.to_string() })
}

fn verify_run(threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_butterfly"))
        .args(["verify", "--suite", "all", "--seed", "7", "--threads", threads])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit {:?} at {threads} threads", out.status.code()));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let runs: Result<Vec<_>, _> = ["1", "1", "4", "2"].iter().map(|t| verify_run(t)).collect();
    match runs {
        Ok(runs) => {
            let same = runs.windows(2).all(|w| w[0] == w[1]);
            Outcome {
                pass: same && !runs[0].is_empty(),
                detail: format!("{} runs at 1, 1, 4, 2 threads, {} bytes, identical {same}", runs.len(), runs[0].len()),
            }
        }
        Err(e) => Outcome { pass: false, detail: e },
    }
}

fn main() {
    type Check = Box<dyn Fn() -> Outcome>;
    let criteria: Vec<(&str, u64, Check)> = vec![
        ("Chambers identity, 1e3 samples, q <= 60, residual <= 1e-9 max(1,|E|^q)", 5, Box::new(|| suite(suites::chambers(SEED, 1000, 60)))),
        ("Last-Wilkinson sum = 1/q to relative 1e-8, q <= 40", 30, Box::new(|| suite(suites::wilkinson(40)))),
        ("J_delta^c measure <= 2 e delta / q, q <= 30, 10 deltas", 60, Box::new(|| suite(suites::jdelta(30, 10)))),
        ("product sandwich and |B_n| <= beta |A_n|, 1e3 chains, beta = 1/2, N <= 200", 20, Box::new(|| suite(suites::products(SEED, 1000, 200, 0.5)))),
        ("Green identities at relative 1e-8, 100 samples", 60, Box::new(|| suite(suites::greens(SEED, 100)))),
        ("Lyapunov deviation set <= pi eps / eta + slack, 20 pairs", 60, Box::new(|| suite(suites::surace(SEED, 20)))),
        ("measure decay along k/(2k+1), k = 3..40", 600, Box::new(decay)),
        ("box-counting dimension of S(F_16/F_17, 2) in [0.4, 0.6]", 600, Box::new(dimension)),
        ("meas S(233/377, 1) within 0.2 of 2", 120, Box::new(measure_limit)),
        ("construct_alpha(C = 10, j_max = 3) round trip", 30, Box::new(alpha)),
        ("zero-drift identities to 1e-10 and step (i) for 1/2, 13/27", 120, Box::new(|| suite(suites::interp(SEED, 0)))),
        ("verify --suite all --seed 7 byte-identical across runs and threads", 1500, Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2}: {} {name}: {} [{:.2} s, limit {limit} s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
