//! Measure decay near a rational, box-counting dimension, the two-family
//! covering bound on Hausdorff dimension, and butterfly datasets.

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::bands::{jdelta_from_landscape, spectral_union_s, spectrum_bands, ChambersLandscape, JDeltaVariant};
use crate::error::{Error, Result};
use crate::operator::OperatorSpec;
use crate::rational::ReducedRational;
use crate::sets::SpectralSet;

/// Least-squares line `y = intercept + slope x` with its `R^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit { slope, intercept: my - slope * mx, r_squared })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub approximant: ReducedRational,
    pub qt: u64,
    /// `meas(S(pt/qt, 2) intersected with J_delta)`.
    pub measure: f64,
    /// `|pt/qt - p/q| < C^{-q} delta^2` at the configured `C`.
    pub admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub base: ReducedRational,
    pub delta: f64,
    pub variant: u8,
    pub eta_c: f64,
    pub rows: Vec<DecayRow>,
    /// Slope of `ln(measure)` against `qt`.
    pub fitted_rate: f64,
    /// `exp(intercept)` of the same fit.
    pub fitted_prefactor: f64,
    pub r_squared: f64,
    /// Fewer than two positive measures, or a nonnegative rate.
    pub inconclusive: bool,
}

/// `meas(S(pt/qt, 2) cap J_delta(p/q))` for every approximant, with a
/// log-linear fit against `qt`. Rows failing the admissibility gate are
/// flagged and still computed.
pub fn measure_decay(
    base: &ReducedRational,
    delta: f64,
    variant: JDeltaVariant,
    approximants: &[ReducedRational],
    eta_c: f64,
) -> Result<DecayReport> {
    let land = ChambersLandscape::new(base, 2.0)?;
    let jc = jdelta_from_landscape(&land, delta, variant)?.complement;
    let q = land.period() as i32;
    let eta = eta_c.powi(-q) * delta * delta;
    let mut rows: Vec<DecayRow> = approximants
        .par_iter()
        .map(|a| {
            let qt = a.denom().to_u64().unwrap_or(u64::MAX);
            let gap = base.abs_diff(a).to_f64().unwrap_or(f64::INFINITY);
            let admissible = a != base && gap < eta;
            match spectral_union_s(a, 2.0) {
                Ok(s) => {
                    let measure = (s.measure() - s.intersect(&jc).measure()).max(0.0);
                    DecayRow { approximant: a.clone(), qt, measure, admissible, error: None }
                }
                Err(e) => DecayRow {
                    approximant: a.clone(),
                    qt,
                    measure: f64::NAN,
                    admissible,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    rows.sort_by(|a, b| a.qt.cmp(&b.qt).then_with(|| a.approximant.numer().cmp(b.approximant.numer())));

    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.error.is_none() && r.measure > 0.0)
        .map(|r| (r.qt as f64, r.measure.ln()))
        .unzip();
    let fit = linear_fit(&xs, &ys);
    let (fitted_rate, fitted_prefactor, r_squared) = match fit {
        Some(f) => (f.slope, f.intercept.exp(), f.r_squared),
        None => (f64::NAN, f64::NAN, f64::NAN),
    };
    Ok(DecayReport {
        base: base.clone(),
        delta,
        variant: variant as u8,
        eta_c,
        rows,
        fitted_rate,
        fitted_prefactor,
        r_squared,
        inconclusive: !(fitted_rate < 0.0),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxCount {
    pub estimate: f64,
    pub r_squared: f64,
    /// `(scale, number of boxes)`.
    pub counts: Vec<(f64, u64)>,
}

/// Number of grid boxes `(k s, (k+1) s)` meeting the interior of an
/// interval of the set, plus those holding an isolated point.
pub fn box_count(s: &SpectralSet, scale: f64) -> u64 {
    let mut count = 0u64;
    let mut last: Option<i64> = None;
    for (a, b) in s.merged().intervals() {
        let lo = (a / scale).floor() as i64;
        let hi = if b > a { ((b / scale).ceil() as i64 - 1).max(lo) } else { lo };
        let start = match last {
            Some(l) if lo <= l => l + 1,
            _ => lo,
        };
        if hi >= start {
            count += (hi - start + 1) as u64;
        }
        last = Some(last.map_or(hi, |l| l.max(hi)));
    }
    count
}

/// Slope of `ln N(s)` against `ln(1/s)` over the given scales.
pub fn box_counting_dimension(s: &SpectralSet, scales: &[f64]) -> Result<BoxCount> {
    if scales.len() < 2 {
        return Err(Error::InvalidArgument("box counting needs at least two scales".into()));
    }
    if scales.windows(2).any(|w| !(w[1] < w[0])) || scales.iter().any(|&x| !(x >= 1e-12)) {
        return Err(Error::InvalidArgument(
            "scales must be strictly decreasing and at least 1e-12".into(),
        ));
    }
    if s.is_empty() {
        return Err(Error::InvalidArgument("box counting of the empty set".into()));
    }
    let counts: Vec<(f64, u64)> = scales.iter().map(|&h| (h, box_count(s, h))).collect();
    let xs: Vec<f64> = counts.iter().map(|(h, _)| -h.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, n)| (*n as f64).ln()).collect();
    let fit = linear_fit(&xs, &ys).expect("distinct scales");
    Ok(BoxCount { estimate: fit.slope, r_squared: fit.r_squared, counts })
}

/// `n` scales from `hi` down to `lo`, geometrically spaced.
pub fn geometric_scales(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    let r = (lo / hi).ln() / (n.max(2) - 1) as f64;
    (0..n.max(2)).map(|i| hi * (r * i as f64).exp()).collect()
}

/// One level of a two-family cover.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverLevel {
    pub n: usize,
    pub q: u64,
    pub qt: u64,
    pub first: Vec<(f64, f64)>,
    pub second: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverFamily {
    pub levels: Vec<CoverLevel>,
    pub c1: f64,
    pub c2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverBound {
    /// `max(1/(1 + beta1), 1/(1 + beta2))`.
    pub bound: f64,
    /// `2 max(C1, C2)^t`.
    pub c_t: f64,
    /// `sum |I|^t + sum |I~|^t` per level.
    pub sums: Vec<f64>,
}

fn total_length(iv: &[(f64, f64)]) -> f64 {
    iv.iter().map(|(a, b)| b - a).sum()
}

/// Upper bound on the Hausdorff dimension of a set covered, at every level
/// `n`, by at most `q_n` intervals of total length `< C1 / q_n^beta1` and at
/// most `qt_n` of total length `< C2 / qt_n^beta2`.
pub fn cover_dimension_bound(cf: &CoverFamily) -> Result<CoverBound> {
    if !(cf.beta1 > 0.0 && cf.beta2 > 0.0 && cf.c1 > 0.0 && cf.c2 > 0.0) {
        return Err(Error::InvalidArgument("cover constants must be positive".into()));
    }
    let t = (1.0 / (1.0 + cf.beta1)).max(1.0 / (1.0 + cf.beta2));
    let c_t = 2.0 * cf.c1.max(cf.c2).powf(t);
    let mut sums = Vec::with_capacity(cf.levels.len());
    for lvl in &cf.levels {
        let families = [
            (1u8, &lvl.first, lvl.q, cf.c1, cf.beta1),
            (2u8, &lvl.second, lvl.qt, cf.c2, cf.beta2),
        ];
        let mut sum = 0.0;
        for (family, iv, count, c, beta) in families {
            let ok = count >= 1
                && iv.len() as u64 <= count
                && iv.iter().all(|(a, b)| a <= b)
                && total_length(iv) < c / (count as f64).powf(beta);
            if !ok {
                return Err(Error::CoverHypothesis { n: lvl.n, family });
            }
            sum += iv.iter().map(|(a, b)| (b - a).powf(t)).sum::<f64>();
        }
        assert!(sum <= c_t * (1.0 + 1e-12), "Jensen step fails at level {}: {sum} > {c_t}", lvl.n);
        sums.push(sum);
    }
    Ok(CoverBound { bound: t, c_t, sums })
}

/// How the butterfly dataset picks the set drawn at each rational.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ThetaMode {
    /// The spectrum at one phase.
    Fixed { theta: f64 },
    /// The union over phases, split into its `q` pieces.
    Union,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ButterflyRow {
    pub p: u64,
    pub q: u64,
    pub band: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ButterflyFailure {
    pub p: u64,
    pub q: u64,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ButterflyDataset {
    pub lambda: f64,
    pub mode: ThetaMode,
    pub rows: Vec<ButterflyRow>,
    pub failures: Vec<ButterflyFailure>,
}

/// Default ceiling on `Qmax`.
pub const BUTTERFLY_QMAX_GUARD: u64 = 500;

/// All reduced `p/q` with `0 <= p < q <= qmax`, in `(q, p)` order.
pub fn reduced_rationals(qmax: u64) -> Vec<(u64, u64)> {
    (1..=qmax).flat_map(|q| (0..q).filter(move |&p| p.gcd(&q) == 1).map(move |p| (p, q))).collect()
}

fn butterfly_cell(p: u64, q: u64, lambda: f64, mode: ThetaMode) -> Result<Vec<(f64, f64)>> {
    let alpha = ReducedRational::from_i64(p as i64, q as i64);
    match mode {
        ThetaMode::Fixed { theta } => {
            Ok(spectrum_bands(&OperatorSpec::almost_mathieu(alpha, lambda, theta)?)?.intervals())
        }
        ThetaMode::Union => {
            let land = ChambersLandscape::new(&alpha, lambda)?;
            land.sublevel(2.0 + 2.0 * (lambda / 2.0).powi(q as i32))
        }
    }
}

pub fn butterfly_generate(qmax: u64, lambda: f64, mode: ThetaMode, guard: u64) -> Result<ButterflyDataset> {
    if qmax < 1 || qmax > guard {
        return Err(Error::InvalidArgument(format!("qmax must lie in [1, {guard}], got {qmax}")));
    }
    let cells: Vec<_> = reduced_rationals(qmax)
        .into_par_iter()
        .map(|(p, q)| ((p, q), butterfly_cell(p, q, lambda, mode)))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for ((p, q), cell) in cells {
        match cell {
            Ok(iv) => rows.extend(
                iv.into_iter()
                    .enumerate()
                    .map(|(i, (lo, hi))| ButterflyRow { p, q, band: i + 1, lo, hi }),
            ),
            Err(e) => failures.push(ButterflyFailure { p, q, error: e.to_string() }),
        }
    }
    Ok(ButterflyDataset { lambda, mode, rows, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> ReducedRational {
        ReducedRational::from_i64(p, q)
    }

    #[test]
    fn box_count_smooth_and_discrete() {
        let unit = SpectralSet::from_intervals([(0.0, 1.0)]);
        let scales = geometric_scales(0.5, 2f64.powi(-10), 10);
        let d = box_counting_dimension(&unit, &scales).unwrap();
        assert!((d.estimate - 1.0).abs() < 0.02, "{d:?}");

        let pts = SpectralSet::from_intervals((0..7).map(|i| (i as f64 * 0.37, i as f64 * 0.37)));
        let d = box_counting_dimension(&pts, &scales).unwrap();
        assert!(d.estimate.abs() < 0.05, "{d:?}");

        assert!(box_counting_dimension(&unit, &[0.1]).is_err());
        assert!(box_counting_dimension(&unit, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn box_count_shares_boxes() {
        let s = SpectralSet::from_intervals([(0.1, 0.2), (0.3, 0.4), (1.5, 2.0)]);
        assert_eq!(box_count(&s, 1.0), 2);
        assert_eq!(box_count(&s, 0.25), 4);
    }

    #[test]
    fn cover_bound_formula() {
        let level = |n: usize, q: u64| CoverLevel {
            n,
            q,
            qt: q,
            first: vec![(0.0, 0.5 / (q * q) as f64)],
            second: vec![(1.0, 1.0 + 0.5 / (q * q) as f64)],
        };
        let cf = CoverFamily { levels: vec![level(1, 4), level(2, 16)], c1: 1.0, c2: 1.0, beta1: 1.0, beta2: 1.0 };
        assert_eq!(cover_dimension_bound(&cf).unwrap().bound, 0.5);
        let cf = CoverFamily { beta2: 3.0, c2: 1.0, ..cf };
        let bad = cover_dimension_bound(&cf);
        assert!(matches!(bad, Err(Error::CoverHypothesis { n: 1, family: 2 })));
        let cf = CoverFamily { levels: vec![], ..cf };
        assert_eq!(cover_dimension_bound(&cf).unwrap().bound, 0.5);
    }

    #[test]
    fn butterfly_small() {
        let d = butterfly_generate(1, 2.0, ThetaMode::Union, BUTTERFLY_QMAX_GUARD).unwrap();
        let s = SpectralSet::from_intervals(d.rows.iter().map(|r| (r.lo, r.hi))).merged();
        assert_eq!(s.intervals().len(), 1);
        assert!((s.bands[0].lo + 4.0).abs() < 1e-12 && (s.bands[0].hi - 4.0).abs() < 1e-12);

        let d = butterfly_generate(2, 2.0, ThetaMode::Union, BUTTERFLY_QMAX_GUARD).unwrap();
        let half: Vec<_> = d.rows.iter().filter(|r| r.q == 2).map(|r| (r.lo, r.hi)).collect();
        let s = SpectralSet::from_intervals(half).merged();
        let r8 = 8f64.sqrt();
        assert!((s.bands[0].lo + r8).abs() < 1e-12 && (s.bands[0].hi - r8).abs() < 1e-12);
        assert!(butterfly_generate(501, 2.0, ThetaMode::Union, BUTTERFLY_QMAX_GUARD).is_err());
    }

    #[test]
    fn butterfly_row_count() {
        let want: u64 = (1..=50u64)
            .map(|q| q * (1..=q).filter(|&p| p.gcd(&q) == 1).count() as u64)
            .sum();
        let d = butterfly_generate(50, 2.0, ThetaMode::Union, BUTTERFLY_QMAX_GUARD).unwrap();
        assert!(d.failures.is_empty());
        assert_eq!(d.rows.len() as u64, want);
        let fixed = butterfly_generate(12, 2.0, ThetaMode::Fixed { theta: 0.3 }, 500).unwrap();
        let want: u64 = (1..=12u64)
            .map(|q| q * (1..=q).filter(|&p| p.gcd(&q) == 1).count() as u64)
            .sum();
        assert_eq!(fixed.rows.len() as u64, want);
    }

    #[test]
    fn decay_small_and_degenerate() {
        let approx: Vec<_> = (3..=8).map(|k| r(k, 2 * k + 1)).chain([r(1, 2)]).collect();
        let rep = measure_decay(&r(1, 2), 0.5, JDeltaVariant::Level, &approx, 50.0).unwrap();
        assert!(rep.rows.iter().all(|row| row.measure >= 0.0));
        assert!(rep.rows.windows(2).all(|w| w[0].qt <= w[1].qt));
        let degenerate = rep.rows.iter().find(|row| row.qt == 2).unwrap();
        assert!(!degenerate.admissible);

        let rep = measure_decay(&r(0, 1), 3.9, JDeltaVariant::Level, &[r(1, 7), r(1, 9)], 50.0).unwrap();
        assert!(rep.rows.iter().all(|row| row.measure < 0.05));
    }
}
