//! A potential that follows the fine frequency `pt/qt` for `l0` periods of
//! the base frequency `p/q` and then freezes into a `q`-periodic tail.
//!
//! Written as `2 cos(2 pi (p/q) n + theta_n)` with the slowly drifting phase
//! `theta_n = theta + 2 pi (pt/qt - p/q) n`, the first `l0 q` sites are a
//! periodic operator with a slowly varying phase, so the one-period blocks
//! are hyperbolic whenever `E` stays away from every `sigma(p/q, 2, theta_n)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat2::{Mat2, Mat2C};
use crate::operator::discriminant;
use crate::operator::OperatorSpec;
use crate::rational::ReducedRational;
use crate::resolvent::halfline_column_full;

/// Default constant in `l0 = floor(ctilde qt sqrt(delta) / q)`.
pub const DEFAULT_CTILDE: f64 = 0.5;
/// Default `C` in the admissibility radius `eta = C^{-q} delta^2`.
pub const DEFAULT_ETA_C: f64 = 50.0;
/// Required boundary tail of the truncated solves, relative to the peak.
pub const TAIL_TOL: f64 = 1e-12;

/// Which side of the Chambers discriminant the energy sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `Delta(E) < -delta`, worked with `theta = 0`.
    Negative,
    /// `Delta(E) > delta`, worked with `theta = pi / q`.
    Positive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntermediatePotential {
    pub base: ReducedRational,
    pub fine: ReducedRational,
    pub delta: f64,
    pub l0: u64,
    pub ctilde: f64,
    pub branch: Branch,
    pub theta: f64,
    #[serde(skip)]
    small: (i64, i64, i64, i64),
}

impl IntermediatePotential {
    /// Uses the given `l0` instead of the `ctilde` rule.
    pub fn with_l0(
        base: ReducedRational,
        fine: ReducedRational,
        delta: f64,
        l0: u64,
        branch: Branch,
    ) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
        let q = base.period()? as i64;
        let qt = fine.period()? as i64;
        if l0 < 1 || l0 > qt as u64 {
            return Err(Error::ApproximantTooCoarse { l0, max: qt as u64 });
        }
        let (p, _) = base.small().ok_or_else(|| Error::PeriodTooLarge(base.to_string()))?;
        let (pt, _) = fine.small().ok_or_else(|| Error::PeriodTooLarge(fine.to_string()))?;
        let theta = match branch {
            Branch::Negative => 0.0,
            Branch::Positive => PI / q as f64,
        };
        Ok(Self { base, fine, delta, l0, ctilde: f64::NAN, branch, theta, small: (p, q, pt, qt) })
    }

    pub fn q(&self) -> i64 {
        self.small.1
    }

    pub fn qt(&self) -> i64 {
        self.small.3
    }

    /// Length `l0 q` of the drifting stretch.
    pub fn drift_len(&self) -> i64 {
        self.l0 as i64 * self.q()
    }

    /// `theta_n` reduced mod `2 pi`, computed from exact residues.
    pub fn theta_at(&self, n: i64) -> f64 {
        let (p, q, pt, qt) = self.small;
        let fine = (pt as i128 * n as i128).rem_euclid(qt as i128) as f64 / qt as f64;
        let base = (p as i128 * n as i128).rem_euclid(q as i128) as f64 / q as f64;
        self.theta + 2.0 * PI * (fine - base)
    }

    /// `V~(n)`.
    pub fn potential(&self, n: i64) -> f64 {
        let (p, q, _, _) = self.small;
        let phase = if n < self.drift_len() { self.theta_at(n) } else { self.theta_at(self.drift_len()) };
        let r = (p as i128 * n as i128).rem_euclid(q as i128) as f64;
        2.0 * (2.0 * PI * r / q as f64 + phase).cos()
    }

    /// `eta(p, q, delta) = C^{-q} delta^2`.
    pub fn eta(&self, c: f64) -> f64 {
        c.powi(-(self.q() as i32)) * self.delta * self.delta
    }

    /// Whether `|pt/qt - p/q| <= eta` at the given `C`.
    pub fn within_eta(&self, c: f64) -> bool {
        let gap = self.base.abs_diff(&self.fine).to_f64().unwrap_or(f64::INFINITY);
        gap <= self.eta(c)
    }

    /// Periodic operator `p/q` at the phase `theta_j`.
    fn frozen(&self, j: i64) -> Result<OperatorSpec> {
        OperatorSpec::almost_mathieu(self.base.clone(), 2.0, self.theta_at(j))
    }
}

/// `l0 = floor(ctilde qt sqrt(delta) / q)`, with the given branch.
pub fn build_intermediate_branch(
    base: &ReducedRational,
    fine: &ReducedRational,
    delta: f64,
    ctilde: f64,
    branch: Branch,
) -> Result<IntermediatePotential> {
    if !(ctilde > 0.0) {
        return Err(Error::InvalidArgument(format!("ctilde must be positive, got {ctilde}")));
    }
    let q = base.period()? as f64;
    let qt = fine.period()? as f64;
    let raw = (ctilde * qt * delta.sqrt() / q).floor();
    let l0 = if raw.is_finite() && raw >= 0.0 { raw as u64 } else { 0 };
    let mut ip = IntermediatePotential::with_l0(base.clone(), fine.clone(), delta, l0, branch)?;
    ip.ctilde = ctilde;
    Ok(ip)
}

pub fn build_intermediate(
    base: &ReducedRational,
    fine: &ReducedRational,
    delta: f64,
    ctilde: f64,
) -> Result<IntermediatePotential> {
    build_intermediate_branch(base, fine, delta, ctilde, Branch::Negative)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowReport {
    /// `-2 - 3 delta/4 - D_j` (or `D_j - 2 - 3 delta/4`) for `j = 0..=l0 q`.
    pub margins: Vec<f64>,
    pub worst: f64,
    pub ok: bool,
}

/// `D_{p/q,2,theta_j}(E)` stays beyond `-+(2 + 3 delta/4)` for `0 <= j <= l0 q`.
pub fn window_check(ip: &IntermediatePotential, e: f64) -> Result<WindowReport> {
    let level = 2.0 + 0.75 * ip.delta;
    let margins = (0..=ip.drift_len())
        .map(|j| {
            let d: f64 = discriminant(&ip.frozen(j)?, e);
            Ok(match ip.branch {
                Branch::Negative => -level - d,
                Branch::Positive => d - level,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(WindowReport { ok: worst > 0.0, margins, worst })
}

/// `T_j^{-1} = Q_{jq+1}^{-1} ... Q_{(j+1)q}^{-1}` for `j = 0..l0`, where
/// `Q_n^{-1} = (0, 1; -1, z - V~(n))`.
pub fn inverse_blocks(ip: &IntermediatePotential, e: f64, epsilon: f64) -> Vec<Mat2C> {
    let z = Complex64::new(e, epsilon);
    let q = ip.q();
    (0..ip.l0 as i64)
        .map(|j| {
            (1..=q).fold(Mat2C::identity(), |acc, k| {
                acc.mul(&Mat2::inverse_transfer(z, ip.potential(j * q + k)))
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    /// `|Tr T_j^{-1}| - (2 + delta/2)`.
    pub margins: Vec<f64>,
    /// `ln` of the dominant eigenvalue modulus of each block.
    pub gammas: Vec<f64>,
    /// `arccosh(1 + delta/4)`.
    pub gamma_floor: f64,
    pub worst: f64,
    pub ok: bool,
}

pub fn trace_margin_check(ip: &IntermediatePotential, e: f64, epsilon: f64) -> TraceReport {
    let blocks = inverse_blocks(ip, e, epsilon);
    let level = 2.0 + ip.delta / 2.0;
    let margins: Vec<f64> = blocks.iter().map(|b| b.trace().norm() - level).collect();
    let gammas = blocks
        .iter()
        .map(|b| {
            let t = b.trace();
            let root = (t * t - 4.0).sqrt();
            ((t + root).norm().max((t - root).norm()) / 2.0).ln()
        })
        .collect();
    let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    TraceReport {
        ok: worst > 0.0,
        margins,
        gammas,
        gamma_floor: (1.0 + ip.delta / 4.0).acosh(),
        worst,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub epsilon: f64,
    pub l0: u64,
    /// `|G(1, q qt)|` for the fine operator.
    pub lhs_i: f64,
    /// `(5 / eps^3) |G~(1, l0 q)|`.
    pub rhs_i: f64,
    /// `|G~(1, l0 q)|`.
    pub lhs_ii: f64,
    /// `(4 / eps) e^{-c' delta qt / q}`.
    pub rhs_ii: f64,
    /// Largest `c'` for which the second step holds.
    pub c_prime: f64,
    pub final_lhs: f64,
    /// `(20 / eps^4) e^{-c' delta qt / q}`.
    pub final_rhs: f64,
    pub window_ok: bool,
    pub trace_ok: bool,
    /// Truncation sizes used for the fine and intermediate solves.
    pub sizes: [usize; 2],
}

impl ComparisonReport {
    pub fn step_i_holds(&self) -> bool {
        self.lhs_i <= self.rhs_i
    }

    pub fn step_ii_holds(&self) -> bool {
        self.lhs_ii <= self.rhs_ii * (1.0 + 1e-12)
    }

    pub fn final_holds(&self) -> bool {
        self.final_lhs <= self.final_rhs * (1.0 + 1e-12)
    }
}

/// Evaluates both steps of the comparison between the fine operator and
/// `V~` at `E + i eps`, from certified truncated solves of size at least
/// `4 q qt + ceil(50 / eps)`.
pub fn green_comparison(ip: &IntermediatePotential, e: f64, epsilon: f64) -> Result<ComparisonReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let (q, qt) = (ip.q(), ip.qt());
    let z = Complex64::new(e, epsilon);
    let size = (4 * q * qt) as usize + (50.0 / epsilon).ceil() as usize;
    let fine = OperatorSpec::almost_mathieu(ip.fine.clone(), 2.0, ip.theta)?;
    let g = halfline_column_full(|n| fine.potential_eval(n), 1, z, size, TAIL_TOL)?;
    let gt = halfline_column_full(|n| ip.potential(n), 1, z, size, TAIL_TOL)?;

    let lhs_i = g[(q * qt - 1) as usize].norm();
    let lhs_ii = gt[(ip.drift_len() - 1) as usize].norm();
    let rhs_i = 5.0 / epsilon.powi(3) * lhs_ii;
    let scale = ip.delta * qt as f64 / q as f64;
    let c_prime = -(epsilon * lhs_ii / 4.0).ln() / scale;
    let decay = (-c_prime * scale).exp();
    Ok(ComparisonReport {
        epsilon,
        l0: ip.l0,
        lhs_i,
        rhs_i,
        lhs_ii,
        rhs_ii: 4.0 / epsilon * decay,
        c_prime,
        final_lhs: lhs_i,
        final_rhs: 20.0 / epsilon.powi(4) * decay,
        window_ok: window_check(ip, e)?.ok,
        trace_ok: trace_margin_check(ip, e, epsilon).ok,
        sizes: [g.len(), gt.len()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::delta as chambers_delta;

    fn r(p: i64, q: i64) -> ReducedRational {
        ReducedRational::from_i64(p, q)
    }

    #[test]
    fn l0_examples() {
        assert_eq!(build_intermediate(&r(1, 2), &r(13, 27), 0.25, 1.0).unwrap().l0, 6);
        assert_eq!(build_intermediate(&r(1, 2), &r(21, 43), 0.01, 1.0).unwrap().l0, 2);
        assert!(matches!(
            build_intermediate(&r(0, 1), &r(1, 3), 16.0, 1.0),
            Err(Error::ApproximantTooCoarse { l0: 12, max: 3 })
        ));
        assert!(matches!(
            build_intermediate(&r(1, 2), &r(1, 3), 0.01, 0.5),
            Err(Error::ApproximantTooCoarse { l0: 0, .. })
        ));
    }

    #[test]
    fn potential_follows_fine_then_freezes() {
        let ip = build_intermediate(&r(1, 2), &r(13, 27), 0.25, 1.0).unwrap();
        let fine = OperatorSpec::almost_mathieu(r(13, 27), 2.0, 0.0).unwrap();
        for n in 1..ip.drift_len() {
            assert!((ip.potential(n) - fine.potential_eval(n)).abs() < 1e-12);
        }
        let n0 = ip.drift_len();
        for n in n0..n0 + 20 {
            assert!((ip.potential(n) - ip.potential(n + 2)).abs() < 1e-12);
        }
    }

    #[test]
    fn window_examples() {
        // D_{1/2,2,theta}(0) = -4 - 2 cos(2 theta)
        let ip = build_intermediate(&r(1, 2), &r(13, 27), 0.3, 0.5).unwrap();
        let w = window_check(&ip, 0.0).unwrap();
        assert!(w.ok);
        for (j, m) in w.margins.iter().enumerate() {
            let d = -4.0 - 2.0 * (2.0 * ip.theta_at(j as i64)).cos();
            assert!((m - (-2.225 - d)).abs() < 1e-12);
        }
        assert!((w.margins[0] - 3.775).abs() < 1e-12);

        let ip = IntermediatePotential::with_l0(r(0, 1), r(1, 50), 0.5, 3, Branch::Negative).unwrap();
        let w = window_check(&ip, -3.0).unwrap();
        for (j, m) in w.margins.iter().enumerate() {
            let d = -3.0 - 2.0 * ip.theta_at(j as i64).cos();
            assert!((m - (-2.375 - d)).abs() < 1e-12);
        }
        assert!(w.ok);
    }

    #[test]
    fn inverse_block_examples() {
        let ip = IntermediatePotential::with_l0(r(0, 1), r(0, 1), 0.5, 1, Branch::Negative).unwrap();
        let b = inverse_blocks(&ip, 3.0, 0.0);
        assert_eq!(b.len(), 1);
        assert_eq!(b[0], Mat2C::from_real(0.0, 1.0, -1.0, 1.0));

        let ip = build_intermediate(&r(1, 2), &r(13, 27), 0.25, 1.0).unwrap();
        for blk in inverse_blocks(&ip, 0.3, 0.1) {
            assert!((blk.det() - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_drift_degenerates() {
        for (p, q) in [(1, 2), (1, 3), (2, 5)] {
            let ip = IntermediatePotential::with_l0(r(p, q), r(p, q), 0.5, q as u64, Branch::Negative)
                .unwrap();
            let spec = OperatorSpec::almost_mathieu(r(p, q), 2.0, 0.0).unwrap();
            let z = Complex64::new(-3.1, 0.01);
            let d: Complex64 = discriminant(&spec, z);
            for blk in inverse_blocks(&ip, z.re, z.im) {
                assert!((blk.trace() - d).norm() < 1e-10 * d.norm().max(1.0));
                let want = spec.period_values().iter().fold(Mat2C::identity(), |acc, &v| {
                    acc.mul(&Mat2::inverse_transfer(z, v))
                });
                assert!(blk.mul(&want.sl2_inverse()).frobenius() - 2f64.sqrt() < 1e-10);
            }
            let rep = green_comparison(&ip, -3.1, 0.5).unwrap();
            assert!(rep.step_i_holds());
            let g = crate::greens::green_halfline(&spec, 1, ip.drift_len(), z.re + Complex64::i() * 0.5);
            assert!((g.unwrap().value.norm() - rep.lhs_ii).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_examples() {
        let ip = build_intermediate(&r(1, 2), &r(13, 27), 0.25, 0.5).unwrap();
        let t = trace_margin_check(&ip, 0.0, 1e-3);
        assert!(t.ok, "{t:?}");
        assert!((t.margins[0] + 2.125 - 6.0).abs() < 0.25, "{t:?}");
        assert!(t.gammas.iter().all(|&g| g > t.gamma_floor));
    }

    #[test]
    fn comparison_example() {
        let ip = build_intermediate(&r(1, 2), &r(13, 27), 0.25, 1.0).unwrap();
        assert!(chambers_delta(&r(1, 2), 2.0, 0.0).unwrap() < -0.25);
        let rep = green_comparison(&ip, 0.0, 0.1).unwrap();
        assert!(rep.step_i_holds(), "{rep:?}");
        assert!(rep.step_ii_holds() && rep.final_holds());
        assert!(rep.c_prime > 0.0);
        assert!(rep.sizes[0] >= 4 * 2 * 27 + 500);
    }

    #[test]
    fn large_epsilon_bounds() {
        let ip = build_intermediate(&r(1, 2), &r(13, 27), 0.25, 1.0).unwrap();
        let rep = green_comparison(&ip, 0.4, 2.0).unwrap();
        assert!(rep.lhs_i <= 0.5 && rep.lhs_ii <= 0.5);
    }

    #[test]
    fn admissible_blocks_certify_growth() {
        use crate::products::{align_phases, eigensystem_2x2, product_growth, Verdict};
        let ip = build_intermediate(&r(1, 2), &r(10000, 20001), 0.25, DEFAULT_CTILDE).unwrap();
        assert!(ip.within_eta(DEFAULT_ETA_C));
        for e in [0.0, 0.5, -0.5] {
            let blocks = inverse_blocks(&ip, e, 0.0);
            let factors: Vec<_> = blocks.iter().map(|b| eigensystem_2x2(b).unwrap()).collect();
            let cert = product_growth(&align_phases(&factors), 0.5).unwrap();
            assert_eq!(cert.verdict, Verdict::Pass, "E = {e}");
            let sum: f64 = factors.iter().map(|f| f.gamma).sum();
            assert!(cert.ln_norm_final >= 0.5f64.ln() + 0.5 * sum);
        }
    }
}
