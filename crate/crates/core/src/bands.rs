//! Band structure of periodic operators and the sublevel sets of the
//! Chambers discriminant: `S`, `S_-`, the `J_delta` complements, the
//! Last-Wilkinson sum, the integrated density of states and the Holder
//! continuity of spectra in the frequency.

use std::f64::consts::{E, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::ddouble::{chambers_values_dd, refine_zero, trace_dd_real, Dd};
use crate::error::{Error, Result};
use crate::operator::{chambers_values, discriminant_scaled, OperatorSpec};
use crate::rational::ReducedRational;
use crate::scalar::Dual;
use crate::sets::{Band, Monotonicity, SpectralSet};

/// A critical value of `Delta` within this distance of a sublevel threshold
/// counts as sitting exactly on it.
pub const SNAP_TOL: f64 = 1e-11;

/// Critical values within this relative distance of a sublevel threshold
/// have their gap endpoints located in double-double.
const NEAR_CRITICAL: f64 = 1e-6;

/// Bands separated by less than this are made to touch.
pub const TOUCH_TOL: f64 = 1e-10;

/// `D(E)` over one period of potential values.
pub(crate) fn disc(values: &[f64], e: f64) -> f64 {
    discriminant_scaled(values, e).unscaled()
}

/// `(D(E), D'(E))`.
pub(crate) fn disc_dual(values: &[f64], e: f64) -> (f64, f64) {
    let d = discriminant_scaled(values, Dual::variable(e)).unscaled();
    (d.value, d.deriv)
}

/// Bisects a sign change of `g` on `[a, b]` down to adjacent floats and
/// returns the endpoint with the smaller residual. `a` is taken as the side
/// where `g <= 0` when `a_low`, otherwise as the side where `g > 0`.
pub(crate) fn bisect_oriented(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, a_low: bool) -> f64 {
    let (mut ga, mut gb) = (g(a), g(b));
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            break;
        }
        let gm = g(mid);
        if (gm <= 0.0) == a_low {
            a = mid;
            ga = gm;
        } else {
            b = mid;
            gb = gm;
        }
    }
    if ga.abs() <= gb.abs() {
        a
    } else {
        b
    }
}

/// [`bisect_oriented`] with the orientation read off `g(a)`.
pub(crate) fn bisect(g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let a_low = g(a) <= 0.0;
    bisect_oriented(g, a, b, a_low)
}

/// Pivots below this fraction of the diagonal scale make the bordered
/// count unreliable.
const PIVOT_TOL: f64 = 1e-6;

/// Number of eigenvalues below `x` of the `q x q` Jacobi matrix with
/// diagonal `values`, unit off-diagonal and corner entries `corner`, i.e. of
/// `H` acting on sequences with `psi(n + q) = corner psi(n)`.
///
/// The count is the inertia of a leading tridiagonal block (by its LDL^T
/// pivots) plus the sign of the Schur complement of the remaining site. A
/// near-singular block makes consecutive Schur terms cancel, so the sites
/// are then cyclically rotated, which leaves the Floquet spectrum unchanged,
/// until every pivot is well away from zero.
fn floquet_count(values: &[f64], corner: f64, x: f64) -> usize {
    let q = values.len();
    if q == 1 {
        return usize::from(values[0] + 2.0 * corner < x);
    }
    let (count, smallest) = bordered_count(values, corner, x, 0);
    if smallest >= PIVOT_TOL {
        return count;
    }
    let mut best = (smallest, count);
    for r in 1..q {
        let (count, smallest) = bordered_count(values, corner, x, r);
        if smallest >= PIVOT_TOL {
            return count;
        }
        if smallest > best.0 {
            best = (smallest, count);
        }
    }
    best.1
}

/// [`floquet_count`] with the sites rotated by `r`, and the smallest pivot
/// relative to the diagonal scale.
fn bordered_count(values: &[f64], corner: f64, x: f64, r: usize) -> (usize, f64) {
    let q = values.len();
    let v = |i: usize| values[(i + r) % q];
    let nudge = |p: f64, d: f64| {
        if p == 0.0 {
            -f64::EPSILON * (d.abs() + x.abs() + 2.0)
        } else {
            p
        }
    };
    let m = q - 1;
    // coupling of the last site to the block: corner at 0, one at m - 1
    let coupling = |i: usize| {
        let mut c = 0.0;
        if i == 0 {
            c += corner;
        }
        if i == m - 1 {
            c += 1.0;
        }
        c
    };
    let mut count = 0;
    let mut smallest = f64::INFINITY;
    let (mut p, mut z, mut quad) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..m {
        let t = v(i) - x;
        if i == 0 {
            p = nudge(t, v(i));
            z = coupling(0);
        } else {
            let l = 1.0 / p;
            p = nudge(t - l, v(i));
            z = coupling(i) - l * z;
        }
        smallest = smallest.min(p.abs() / (v(i).abs() + x.abs() + 2.0));
        quad += z * z / p;
        if p < 0.0 {
            count += 1;
        }
    }
    (count + usize::from(v(m) - x - quad < 0.0), smallest)
}

/// The `k`-th smallest (0-based) eigenvalue of the Floquet matrix, by
/// bisection on [`floquet_count`] down to adjacent floats.
fn floquet_eigenvalue(values: &[f64], corner: f64, k: usize, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if floquet_count(values, corner, mid) > k {
            b = mid;
        } else {
            a = mid;
        }
    }
    b
}

fn potential_range(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// The `q` bands `{ |D| <= 2 }` of the operator with the given period of
/// potential values, indexed from the bottom.
///
/// Band edges are the eigenvalues of the periodic (`D = 2`) and
/// antiperiodic (`D = -2`) problems, which are well conditioned even where
/// `D'` is astronomically large. Touching bands come out as a double
/// eigenvalue; gaps below [`TOUCH_TOL`] are closed so that such bands share
/// an endpoint exactly.
pub fn periodic_bands(values: &[f64]) -> Result<SpectralSet> {
    let q = values.len();
    let (vlo, vhi) = potential_range(values);
    let (lo, hi) = (vlo - 3.0, vhi + 3.0);
    let mut edges: Vec<f64> = (0..2 * q)
        .into_par_iter()
        .map(|i| floquet_eigenvalue(values, if i < q { 1.0 } else { -1.0 }, i % q, lo, hi))
        .collect();
    if edges.iter().any(|e| !e.is_finite() || *e >= hi) {
        return Err(Error::NotBracketed { lo, hi, level: 2.0 });
    }
    edges.sort_by(f64::total_cmp);
    for j in 1..q {
        let (a, b) = (edges[2 * j - 1], edges[2 * j]);
        if b - a <= TOUCH_TOL * a.abs().max(1.0) {
            let m = 0.5 * (a + b);
            edges[2 * j - 1] = m;
            edges[2 * j] = m;
        }
    }
    let bands = (1..=q)
        .map(|j| Band {
            lo: edges[2 * j - 2],
            hi: edges[2 * j - 1],
            index: j,
            monotonicity: Some(if (q - j) % 2 == 0 {
                Monotonicity::Increasing
            } else {
                Monotonicity::Decreasing
            }),
        })
        .collect();
    Ok(SpectralSet { bands })
}

/// The `q` bands of `spec`.
pub fn spectrum_bands(spec: &OperatorSpec) -> Result<SpectralSet> {
    periodic_bands(spec.period_values())
}

/// The Chambers discriminant of `p/q` at coupling `lambda`, split at its
/// `q - 1` critical points into `q` monotone pieces, each holding one zero.
#[derive(Clone, Debug)]
pub struct ChambersLandscape {
    values: Vec<f64>,
    /// The same potential in double-double, when `p/q` fits machine integers.
    values_dd: Option<Vec<Dd>>,
    lambda: f64,
    /// Bands of `{ |Delta| <= 2 }`.
    pub bands: SpectralSet,
    /// Zeros of `Delta`, increasing.
    pub zeros: Vec<f64>,
    /// Critical points of `Delta`, one per gap.
    pub critical: Vec<f64>,
}

impl ChambersLandscape {
    pub fn new(alpha: &ReducedRational, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("coupling must be positive, got {lambda}")));
        }
        let values = chambers_values(alpha, lambda)?;
        let bands = periodic_bands(&values)?;
        let zeros: Vec<f64> = bands
            .bands
            .par_iter()
            .map(|b| bisect(|e| disc(&values, e), b.lo, b.hi))
            .collect();
        let critical = bands
            .bands
            .par_windows(2)
            .map(|w| {
                let (a, b) = (w[0].hi, w[1].lo);
                if a >= b {
                    return Ok(a);
                }
                let slope = |e: f64| disc_dual(&values, e).1;
                let (sa, sb) = (slope(a), slope(b));
                if (sa < 0.0) == (sb < 0.0) {
                    return Err(Error::NotBracketed { lo: a, hi: b, level: 0.0 });
                }
                Ok(bisect(slope, a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        let q = values.len();
        if zeros.len() != q {
            return Err(Error::MissingZeros { expected: q, found: zeros.len() });
        }
        let values_dd = chambers_values_dd(alpha, lambda).ok();
        Ok(Self { values, values_dd, lambda, bands, zeros, critical })
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self, e: f64) -> f64 {
        disc(&self.values, e)
    }

    /// `Delta(E)` in double-double where available. Near a critical point
    /// `Delta` is flat and binary64 loses the digits that decide whether a
    /// gap of the sublevel set is open.
    pub fn delta_accurate(&self, e: f64) -> f64 {
        match &self.values_dd {
            Some(v) => trace_dd_real(v, e).to_f64(),
            None => self.delta(e),
        }
    }

    /// `(Delta(E), Delta'(E))`.
    pub fn delta_dual(&self, e: f64) -> (f64, f64) {
        disc_dual(&self.values, e)
    }

    /// `{ |Delta| <= s }` as `q` closed intervals, one around each zero.
    /// Neighbouring intervals share an endpoint when they meet at a
    /// critical point.
    pub fn sublevel(&self, s: f64) -> Result<Vec<(f64, f64)>> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidArgument(format!("sublevel threshold {s}")));
        }
        let q = self.period();
        let tol = SNAP_TOL * s.max(1.0);
        let g = |e: f64| self.delta(e).abs() - s;
        let outer = |start: f64, dir: f64| {
            let mut step = 1.0;
            let mut x = start + dir * step;
            while g(x) <= 0.0 {
                step *= 2.0;
                x = start + dir * step;
            }
            x
        };
        let far_lo = outer(self.zeros[0], -1.0);
        let far_hi = outer(self.zeros[q - 1], 1.0);
        (0..q)
            .into_par_iter()
            .map(|j| {
                let z = self.zeros[j];
                if s == 0.0 {
                    return Ok((z, z));
                }
                let g_acc = |e: f64| self.delta_accurate(e).abs() - s;
                let end = |c: Option<f64>, far: f64| -> f64 {
                    match c.map(|c| (c, g_acc(c))) {
                        Some((c, gc)) if gc <= tol => c,
                        Some((c, gc)) if gc <= NEAR_CRITICAL * s => bisect(g_acc, c, z),
                        Some((c, _)) => bisect(g, c, z),
                        None => bisect(g, far, z),
                    }
                };
                let left = end(j.checked_sub(1).map(|i| self.critical[i]), far_lo);
                let right = end(self.critical.get(j).copied(), far_hi);
                Ok((left, right))
            })
            .collect()
    }
}

/// `S(p/q, lambda) = { |Delta| <= 2 + 2 (lambda/2)^q }`, the union of the
/// spectra over all phases.
pub fn spectral_union_s(alpha: &ReducedRational, lambda: f64) -> Result<SpectralSet> {
    let land = ChambersLandscape::new(alpha, lambda)?;
    let s = 2.0 + 2.0 * (lambda / 2.0).powi(land.period() as i32);
    Ok(SpectralSet::from_intervals(land.sublevel(s)?).merged())
}

/// `S_-(p/q, lambda) = { |Delta| <= 2 - 2 (lambda/2)^q }`, the intersection
/// of the spectra over all phases. At `lambda = 2` it degenerates to the
/// `q` zeros of `Delta` (returned as zero-length bands); above it is empty.
pub fn sminus(alpha: &ReducedRational, lambda: f64) -> Result<SpectralSet> {
    if lambda > 2.0 {
        return Ok(SpectralSet::empty());
    }
    let land = ChambersLandscape::new(alpha, lambda)?;
    let s = if lambda == 2.0 {
        0.0
    } else {
        2.0 - 2.0 * (lambda / 2.0).powi(land.period() as i32)
    };
    Ok(SpectralSet::from_intervals(land.sublevel(s)?))
}

/// The `q` zeros of `Delta_{p/q,2}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SminusPoints {
    pub energies: Vec<f64>,
}

pub fn sminus_points(alpha: &ReducedRational) -> Result<SminusPoints> {
    Ok(SminusPoints { energies: refined_zeros(alpha)?.into_iter().map(|(e, _)| e).collect() })
}

/// Zeros of `Delta_{p/q,2}` and the slopes there, polished in
/// double-double: inside the outermost bands `Delta'` reaches `1e9` already
/// at `q ~ 35` and binary64 cannot resolve the sign of `Delta`.
fn refined_zeros(alpha: &ReducedRational) -> Result<Vec<(f64, f64)>> {
    let land = ChambersLandscape::new(alpha, 2.0)?;
    let values = chambers_values_dd(alpha, 2.0)?;
    Ok(land
        .zeros
        .par_iter()
        .zip(land.bands.bands.par_iter())
        .map(|(&z, b)| refine_zero(&values, z, b.lo, b.hi))
        .collect())
}

/// `sum_n 1 / |Delta'_{p/q,2}(E_n)|` over the zeros of `Delta`; equals `1/q`.
pub fn last_wilkinson_sum(alpha: &ReducedRational) -> Result<f64> {
    Ok(refined_zeros(alpha)?.iter().map(|&(_, d)| 1.0 / d.abs()).sum())
}

/// Which definition of `J_delta` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum JDeltaVariant {
    /// `{ |Delta_{p/q,2}| > delta }`.
    Level = 1,
    /// `{ dist(E, S_-(p/q, 2)) > delta }`.
    Distance = 2,
}

impl TryFrom<u8> for JDeltaVariant {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Self::Level),
            2 => Ok(Self::Distance),
            _ => Err(Error::InvalidArgument(format!("J_delta variant must be 1 or 2, got {v}"))),
        }
    }
}

/// `J_delta^c` for one rational at `lambda = 2`.
#[derive(Clone, Debug, Serialize)]
pub struct JDeltaSets {
    pub variant: JDeltaVariant,
    pub delta: f64,
    pub complement: SpectralSet,
    pub measure: f64,
    /// `2 e delta / q`, the bound on `meas(J^c)` for the level variant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_bound: Option<bool>,
}

impl JDeltaSets {
    /// Whether `e` belongs to `J_delta` (the unbounded set).
    pub fn in_j(&self, e: f64) -> bool {
        !self.complement.contains(e)
    }
}

pub fn jdelta_sets(alpha: &ReducedRational, delta: f64, variant: JDeltaVariant) -> Result<JDeltaSets> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let land = ChambersLandscape::new(alpha, 2.0)?;
    jdelta_from_landscape(&land, delta, variant)
}

pub fn jdelta_from_landscape(
    land: &ChambersLandscape,
    delta: f64,
    variant: JDeltaVariant,
) -> Result<JDeltaSets> {
    let complement = match variant {
        JDeltaVariant::Level => SpectralSet::from_intervals(land.sublevel(delta)?).merged(),
        JDeltaVariant::Distance => {
            SpectralSet::from_intervals(land.zeros.iter().map(|&e| (e - delta, e + delta))).merged()
        }
    };
    let measure = complement.measure();
    let (bound, within_bound) = match variant {
        JDeltaVariant::Level => {
            let b = 2.0 * E * delta / land.period() as f64;
            (Some(b), Some(measure <= b))
        }
        JDeltaVariant::Distance => (None, None),
    };
    Ok(JDeltaSets { variant, delta, complement, measure, bound, within_bound })
}

/// The bound `|E - E_nu| <= e |Delta(E)| / |Delta'(E)|` at one endpoint of
/// `{ |Delta| <= delta }`.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeCheck {
    pub energy: f64,
    pub zero: f64,
    pub band: usize,
    /// `e |Delta(E)| / |Delta'(E)| - |E - E_nu|`.
    pub margin: f64,
    /// The lower end of the first interval or the upper end of the last.
    pub extremal_outward: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeBoundReport {
    pub edges: Vec<EdgeCheck>,
    /// All edges other than the two outward extremal ones satisfy the bound.
    pub inward_pass: bool,
    pub all_pass: bool,
}

pub fn band_edge_bound_check(alpha: &ReducedRational, delta: f64) -> Result<EdgeBoundReport> {
    let land = ChambersLandscape::new(alpha, 2.0)?;
    let intervals = land.sublevel(delta)?;
    let q = intervals.len();
    let mut edges = Vec::with_capacity(2 * q);
    for (j, &(lo, hi)) in intervals.iter().enumerate() {
        let zero = land.zeros[j];
        for (energy, outward) in [(lo, j == 0), (hi, j + 1 == q)] {
            let (d, dp) = land.delta_dual(energy);
            let margin = E * d.abs() / dp.abs() - (energy - zero).abs();
            edges.push(EdgeCheck { energy, zero, band: j + 1, margin, extremal_outward: outward });
        }
    }
    let inward_pass = edges.iter().filter(|c| !c.extremal_outward).all(|c| c.margin >= 0.0);
    let all_pass = edges.iter().all(|c| c.margin >= 0.0);
    Ok(EdgeBoundReport { edges, inward_pass, all_pass })
}

/// Integrated density of states of a periodic operator, by Floquet counting.
#[derive(Clone, Debug)]
pub struct IdsEvaluator {
    values: Vec<f64>,
    bands: SpectralSet,
}

impl IdsEvaluator {
    pub fn new(spec: &OperatorSpec) -> Result<Self> {
        let values = spec.period_values().to_vec();
        let bands = periodic_bands(&values)?;
        Ok(Self { values, bands })
    }

    pub fn bands(&self) -> &SpectralSet {
        &self.bands
    }

    pub fn eval(&self, e: f64) -> f64 {
        let q = self.values.len() as f64;
        let below = self.bands.bands.partition_point(|b| b.hi <= e);
        let Some(band) = self.bands.bands.get(below).filter(|b| b.lo < e) else {
            return below as f64 / q;
        };
        let phase = (disc(&self.values, e) / 2.0).clamp(-1.0, 1.0).acos() / PI;
        let t = match band.monotonicity {
            Some(Monotonicity::Decreasing) => phase,
            _ => 1.0 - phase,
        };
        (below as f64 + t) / q
    }
}

/// `N(E)` for a periodic operator.
pub fn ids_eval(spec: &OperatorSpec, e: f64) -> Result<f64> {
    Ok(IdsEvaluator::new(spec)?.eval(e))
}

/// Distances from sample points of `S(alpha, lambda)` to `S(alpha2, lambda)`
/// against `6 sqrt(lambda |alpha - alpha2|)`.
#[derive(Clone, Debug, Serialize)]
pub struct HolderReport {
    pub bound: f64,
    pub samples: usize,
    pub max_distance: f64,
    /// `max_distance / bound`, zero when both vanish.
    pub max_ratio: f64,
    pub violations: usize,
}

pub fn holder_inclusion_check(
    alpha: &ReducedRational,
    alpha2: &ReducedRational,
    lambda: f64,
    n_samples: usize,
) -> Result<HolderReport> {
    use num_traits::ToPrimitive;
    let diff = alpha.abs_diff(alpha2).to_f64().unwrap_or(f64::INFINITY);
    let bound = 6.0 * (lambda * diff).sqrt();
    let s1 = spectral_union_s(alpha, lambda)?;
    let s2 = spectral_union_s(alpha2, lambda)?;
    let points = quantile_points(&s1, n_samples);
    let dists: Vec<f64> = points.iter().map(|&e| s2.distance(e)).collect();
    let max_distance = dists.iter().cloned().fold(0.0, f64::max);
    let violations = dists.iter().filter(|&&d| d > 0.0 && d >= bound).count();
    let max_ratio = if max_distance == 0.0 { 0.0 } else { max_distance / bound };
    Ok(HolderReport { bound, samples: points.len(), max_distance, max_ratio, violations })
}

/// `n` points spread evenly by measure over `s` (midpoint rule).
pub fn quantile_points(s: &SpectralSet, n: usize) -> Vec<f64> {
    let merged = s.merged();
    let total = merged.measure();
    if merged.is_empty() || n == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n);
    let mut band = 0;
    let mut before = 0.0;
    for k in 0..n {
        let target = total * (k as f64 + 0.5) / n as f64;
        while band + 1 < merged.len() && before + merged.bands[band].length() < target {
            before += merged.bands[band].length();
            band += 1;
        }
        let b = &merged.bands[band];
        out.push((b.lo + (target - before)).min(b.hi));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> ReducedRational {
        ReducedRational::from_i64(p, q)
    }

    fn am(p: i64, q: i64, lambda: f64, theta: f64) -> OperatorSpec {
        OperatorSpec::almost_mathieu(r(p, q), lambda, theta).unwrap()
    }

    fn close(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| (x.0 - y.0).abs() <= tol && (x.1 - y.1).abs() <= tol)
    }

    #[test]
    fn floquet_counts_free_chain() {
        // periodic eigenvalues of the free chain: 2 cos(2 pi k / q)
        let values = vec![0.0; 6];
        let mut want: Vec<f64> = (0..6).map(|k| 2.0 * (2.0 * PI * k as f64 / 6.0).cos()).collect();
        want.sort_by(f64::total_cmp);
        for (k, w) in want.iter().enumerate() {
            let e = floquet_eigenvalue(&values, 1.0, k, -3.0, 3.0);
            assert!((e - w).abs() < 1e-14, "{e} vs {w}");
        }
    }

    #[test]
    fn half_frequency_bands() {
        let s = spectrum_bands(&am(1, 2, 2.0, PI / 2.0)).unwrap();
        assert!(close(&s.intervals(), &[(-2.0, 0.0), (0.0, 2.0)], 1e-12));
        assert_eq!(s.bands[0].hi, s.bands[1].lo);
        let r8 = 8f64.sqrt();
        let s = spectrum_bands(&am(1, 2, 2.0, 0.0)).unwrap();
        assert!(close(&s.intervals(), &[(-r8, -2.0), (2.0, r8)], 1e-12));
        let s = spectrum_bands(&am(0, 1, 2.0, PI / 2.0)).unwrap();
        assert!(close(&s.intervals(), &[(-2.0, 2.0)], 1e-12));
    }

    #[test]
    fn union_over_phases() {
        let r8 = 8f64.sqrt();
        let s = spectral_union_s(&r(1, 2), 2.0).unwrap();
        assert!(close(&s.intervals(), &[(-r8, r8)], 1e-12));
        assert!((s.measure() - 4.0 * 2f64.sqrt()).abs() < 1e-12);
        let s = spectral_union_s(&r(0, 1), 2.0).unwrap();
        assert!(close(&s.intervals(), &[(-4.0, 4.0)], 1e-12));
        // lambda = 1: V(1) = -V(2) = -1/sqrt(2), so Delta = E^2 - 5/2 and the
        // threshold is 5/2; the two pieces touch at the critical point 0
        let s = spectral_union_s(&r(1, 2), 1.0).unwrap();
        let r5 = 5f64.sqrt();
        assert!(close(&s.intervals(), &[(-r5, r5)], 1e-12), "{:?}", s.intervals());
    }

    #[test]
    fn sminus_examples() {
        let p = sminus_points(&r(1, 2)).unwrap().energies;
        assert!((p[0] + 2.0).abs() < 1e-14 && (p[1] - 2.0).abs() < 1e-14);
        let p = sminus_points(&r(0, 1)).unwrap().energies;
        assert_eq!(p.len(), 1);
        assert!(p[0].abs() < 1e-15);
        let p = sminus_points(&r(1, 3)).unwrap().energies;
        assert_eq!(p.len(), 3);
        for i in 0..3 {
            assert!((p[i] + p[2 - i]).abs() < 1e-12);
        }
        assert!(sminus(&r(1, 3), 2.5).unwrap().is_empty());
    }

    #[test]
    fn last_wilkinson_examples() {
        assert!((last_wilkinson_sum(&r(0, 1)).unwrap() - 1.0).abs() < 1e-15);
        assert!((last_wilkinson_sum(&r(1, 2)).unwrap() - 0.5).abs() < 1e-14);
        assert!((last_wilkinson_sum(&r(2, 5)).unwrap() - 0.2).abs() < 1e-9);
    }

    #[test]
    fn jdelta_examples() {
        let j = jdelta_sets(&r(1, 2), 0.5, JDeltaVariant::Level).unwrap();
        let (a, b) = (3.5f64.sqrt(), 4.5f64.sqrt());
        assert!(close(&j.complement.intervals(), &[(-b, -a), (a, b)], 1e-12));
        assert!((j.measure - 2.0 * (b - a)).abs() < 1e-12);
        assert!((j.measure - 0.5011).abs() < 2e-4);
        assert_eq!(j.within_bound, Some(true));
        assert!((j.bound.unwrap() - E * 0.5).abs() < 1e-15);
        let j = jdelta_sets(&r(0, 1), 1.0, JDeltaVariant::Distance).unwrap();
        assert!(close(&j.complement.intervals(), &[(-1.0, 1.0)], 1e-15));
        let j = jdelta_sets(&r(1, 2), 0.1, JDeltaVariant::Distance).unwrap();
        assert!(close(&j.complement.intervals(), &[(-2.1, -1.9), (1.9, 2.1)], 1e-14));
        assert!((j.measure - 0.4).abs() < 1e-14);
        assert!(j.in_j(0.0) && !j.in_j(2.05));
    }

    #[test]
    fn edge_bound_examples() {
        let rep = band_edge_bound_check(&r(1, 2), 0.5).unwrap();
        let top = rep.edges.last().unwrap();
        assert!((top.energy - 4.5f64.sqrt()).abs() < 1e-12);
        let lhs = 4.5f64.sqrt() - 2.0;
        let rhs = E * 0.5 / (2.0 * 4.5f64.sqrt());
        assert!((top.margin - (rhs - lhs)).abs() < 1e-12);
        assert!((lhs - 0.1213).abs() < 1e-4 && (rhs - 0.3204).abs() < 1e-4);
        let rep = band_edge_bound_check(&r(2, 5), 0.2).unwrap();
        assert_eq!(rep.edges.len(), 10);
        assert!(rep.all_pass);
    }

    #[test]
    fn ids_examples() {
        assert!((ids_eval(&OperatorSpec::free(), 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((ids_eval(&am(1, 2, 2.0, 0.0), 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(ids_eval(&am(3, 7, 2.0, 0.4), -10.0).unwrap(), 0.0);
        assert_eq!(ids_eval(&am(3, 7, 2.0, 0.4), 10.0).unwrap(), 1.0);
    }

    #[test]
    fn holder_examples() {
        let rep = holder_inclusion_check(&r(1, 2), &r(13, 27), 2.0, 500).unwrap();
        assert!((rep.bound - 6.0 * (2.0f64 / 54.0).sqrt()).abs() < 1e-12);
        assert_eq!(rep.violations, 0);
        let rep = holder_inclusion_check(&r(2, 5), &r(2, 5), 2.0, 100).unwrap();
        assert_eq!(rep.max_distance, 0.0);
        let rep = holder_inclusion_check(&r(0, 1), &r(1, 100), 2.0, 500).unwrap();
        assert_eq!(rep.violations, 0);
    }
}
