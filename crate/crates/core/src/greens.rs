//! Lyapunov exponents and half-line Green functions of periodic operators.
//!
//! The sign conventions follow `G = (H - z)^{-1}`. With that convention the
//! half-line Green function is `G^{[k,inf)}(k, l) = -psi(l) / psi(k - 1)` for
//! the solution `psi` decaying at `+inf`, which gives
//! `G(k, l) = -G(k, n) G^{[n+1,inf)}(n + 1, l)` and
//! `G(1, mq) = (-1)^(m-1) G(1, q)^m`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat2::Scaled;
use crate::operator::{monodromy, OperatorSpec};
use crate::resolvent::{halfline_column, halfline_column_full};

/// `|mu| - 1` below this counts as a unimodular (non-decaying) monodromy.
const UNIMODULAR_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LyapunovValue {
    pub gamma: f64,
    /// Bloch phase `arccos(D/2) / q`, for real energies in the spectrum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bloch_k: Option<f64>,
}

/// `ln |mu_max|` for a determinant-one matrix with the given trace.
fn ln_dominant(trace: Scaled<Complex64>) -> f64 {
    if trace.exp2 > 0 {
        // |t| > 2^256: mu_max = t (1 + O(t^-2))
        return trace.ln_abs();
    }
    let t = trace.unscaled();
    let root = (t * t - 4.0).sqrt();
    let mu = if (t + root).norm() >= (t - root).norm() { t + root } else { t - root };
    (mu.norm() / 2.0).ln()
}

/// `gamma(z) = max(0, ln Spr(Phi_q(z)) / q)`.
pub fn lyapunov(spec: &OperatorSpec, z: Complex64) -> LyapunovValue {
    let q = spec.period() as f64;
    let trace = monodromy(spec, z).trace();
    if z.im == 0.0 && trace.exp2 == 0 {
        let d = trace.mantissa.re;
        if d.abs() <= 2.0 {
            return LyapunovValue { gamma: 0.0, bloch_k: Some((d / 2.0).acos() / q) };
        }
    }
    LyapunovValue { gamma: (ln_dominant(trace) / q).max(0.0), bloch_k: None }
}

/// `G^{[k,inf)}(k, l; z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HalfLineGreen {
    pub value: Complex64,
    pub k: i64,
    pub l: i64,
    pub z: Complex64,
}

/// Ratios `r(n) = psi(n) / psi(n - 1)` of the solution decaying at `+inf`,
/// for `n = 1..=q` (and periodic beyond), together with the contracting
/// Floquet multiplier.
#[derive(Clone, Debug)]
pub struct DecayingSolution {
    pub ratios: Vec<Complex64>,
    pub multiplier: Complex64,
}

impl DecayingSolution {
    pub fn new(spec: &OperatorSpec, z: Complex64) -> Result<Self> {
        let unbounded = || Error::ResolventUnbounded { re: z.re, im: z.im };
        let values = spec.period_values();
        let q = values.len();
        let phi = monodromy(spec, z);
        let m = phi.mantissa;
        let scale = crate::scalar::pow2(-(phi.exp2.clamp(-1000, 1000) as i32));
        if ln_dominant(phi.trace()) <= UNIMODULAR_TOL {
            return Err(unbounded());
        }
        // contracting multiplier, and the same in mantissa units
        let t = phi.trace().unscaled();
        let root = (t * t - 4.0).sqrt();
        let big = if (t + root).norm() >= (t - root).norm() { (t + root) / 2.0 } else { (t - root) / 2.0 };
        let multiplier = if big.is_finite() { 1.0 / big } else { Complex64::new(0.0, 0.0) };
        let mu = multiplier * scale;
        // eigenvector (v0, v1) of Phi for mu; r(1) = psi(1)/psi(0) = v0/v1
        let cand1 = (m.a12, mu - m.a11);
        let cand2 = (mu - m.a22, m.a21);
        let (v0, v1) = if cand1.0.norm() + cand1.1.norm() >= cand2.0.norm() + cand2.1.norm() {
            cand1
        } else {
            cand2
        };
        if v1.norm() == 0.0 {
            return Err(unbounded());
        }
        let mut next = v0 / v1;
        let mut ratios = vec![Complex64::new(0.0, 0.0); q];
        // backward Riccati r(n) = -1 / (V(n) - z + r(n + 1)) contracts onto
        // the decaying solution; a few sweeps wash out eigenvector rounding
        for _ in 0..3 {
            for n in (1..=q).rev() {
                let denom = Complex64::new(values[n - 1], 0.0) - z + next;
                if denom.norm() == 0.0 {
                    return Err(unbounded());
                }
                next = -1.0 / denom;
                ratios[n - 1] = next;
            }
        }
        Ok(Self { ratios, multiplier })
    }

    pub fn ratio(&self, n: i64) -> Complex64 {
        let q = self.ratios.len() as i64;
        self.ratios[((n - 1).rem_euclid(q)) as usize]
    }

    /// `G^{[k,inf)}(k, l) = -prod_{n=k}^{l} r(n)`.
    pub fn green(&self, k: i64, l: i64) -> Complex64 {
        -(k..=l).fold(Complex64::new(1.0, 0.0), |acc, n| acc * self.ratio(n))
    }
}

pub fn green_halfline(spec: &OperatorSpec, k: i64, l: i64, z: Complex64) -> Result<HalfLineGreen> {
    if l < k {
        return Err(Error::InvalidArgument(format!("need l >= k, got k = {k}, l = {l}")));
    }
    let sol = DecayingSolution::new(spec, z)?;
    Ok(HalfLineGreen { value: sol.green(k, l), k, l, z })
}

/// Relative residuals of the half-line identities, each computed from
/// independent truncated resolvents.
#[derive(Clone, Debug, Serialize)]
pub struct GreenIdentityReport {
    pub z: Complex64,
    pub m: usize,
    pub period: usize,
    /// `G(1, mq)` from the truncated resolvent.
    pub g_1_mq: Complex64,
    /// `G(1, q)` from the truncated resolvent.
    pub g_1_q: Complex64,
    /// `|G(1,l) + G(1,n) G^{[n+1,inf)}(n+1,l)| / |G(1,l)|` at `l = mq`, `n = l/2`.
    pub factorization_residual: f64,
    /// `|G(1,mq) - (-1)^(m-1) G(1,q)^m| / |G(1,q)|^m`.
    pub power_residual: f64,
    /// Same in absolute values: `||G(1,mq)| - |G(1,q)|^m| / |G(1,q)|^m`.
    pub power_modulus_residual: f64,
    /// `sum_k |G(1,k)|^2`.
    pub l2_sum: f64,
    /// `Im G(1,1) / eps`, which the sum must equal.
    pub l2_identity: f64,
    /// `1 / eps^2`.
    pub l2_bound: f64,
    /// Largest relative gap between the Floquet and truncated values of
    /// `G(1, j)`, `j = 1..=mq`.
    pub floquet_residual: f64,
    pub pass: bool,
}

pub const IDENTITY_TOL: f64 = 1e-8;

/// Entries below this fraction of the peak certify that a truncation is
/// indistinguishable from the half line.
const TAIL_TOL: f64 = 1e-16;

pub fn green_identities_check(spec: &OperatorSpec, z: Complex64, m: usize) -> Result<GreenIdentityReport> {
    let eps = z.im;
    if !(eps > 0.0) || m == 0 {
        return Err(Error::InvalidArgument("need Im z > 0 and m >= 1".into()));
    }
    let q = spec.period();
    let l = m * q;
    let v = |n: i64| spec.potential_eval(n);
    let col = halfline_column_full(v, 1, z, 2048.max(2 * l), TAIL_TOL)?;
    let g = |j: usize| col[j - 1];
    let g_1_mq = g(l);
    let g_1_q = g(q);

    let factorization_residual = if l >= 2 {
        let n = l / 2;
        let tail = halfline_column(v, n as i64 + 1, l - n, z, 2048, TAIL_TOL)?;
        (g_1_mq + g(n) * tail[l - n - 1]).norm() / g_1_mq.norm()
    } else {
        0.0
    };

    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let pow = g_1_q.powu(m as u32);
    let power_residual = (g_1_mq - sign * pow).norm() / pow.norm();
    let power_modulus_residual = (g_1_mq.norm() - pow.norm()).abs() / pow.norm();

    let l2_sum: f64 = col.iter().map(|x| x.norm_sqr()).sum();
    let l2_identity = col[0].im / eps;
    let l2_bound = 1.0 / (eps * eps);

    let floquet_residual = match DecayingSolution::new(spec, z) {
        Ok(sol) => (1..=l)
            .map(|j| (sol.green(1, j as i64) - g(j)).norm() / g(j).norm())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };

    let pass = factorization_residual <= IDENTITY_TOL
        && power_residual <= IDENTITY_TOL
        && l2_sum <= l2_bound * (1.0 + 1e-12)
        && (l2_sum - l2_identity).abs() <= IDENTITY_TOL * l2_identity.abs().max(1.0)
        && floquet_residual <= IDENTITY_TOL;
    Ok(GreenIdentityReport {
        z,
        m,
        period: q,
        g_1_mq,
        g_1_q,
        factorization_residual,
        power_residual,
        power_modulus_residual,
        l2_sum,
        l2_identity,
        l2_bound,
        floquet_residual,
        pass,
    })
}

/// Grid estimate of `meas{ E : |gamma(E + i eps) - gamma(E)| >= eta }`.
#[derive(Clone, Debug, Serialize)]
pub struct SuraceReport {
    pub epsilon: f64,
    pub eta: f64,
    pub points: usize,
    pub mesh: f64,
    /// Count of flagged grid points times the mesh.
    pub measured: f64,
    /// `2 mesh` per boundary crossing of the flagged set.
    pub slack: f64,
    /// `pi eps / eta`.
    pub bound: f64,
    pub within_bound: bool,
}

pub fn surace_deviation(spec: &OperatorSpec, epsilon: f64, eta: f64, points: usize) -> Result<SuraceReport> {
    if !(epsilon > 0.0 && eta > 0.0) || points < 2 {
        return Err(Error::InvalidArgument("need eps, eta > 0 and at least 2 grid points".into()));
    }
    let (lo, hi) = match spec.lambda() {
        Some(lambda) => (-2.0 - lambda.abs(), 2.0 + lambda.abs()),
        None => spec.spectral_window(),
    };
    let mesh = (hi - lo) / (points - 1) as f64;
    let flagged: Vec<bool> = (0..points)
        .into_par_iter()
        .map(|i| {
            let e = lo + mesh * i as f64;
            let g0 = lyapunov(spec, Complex64::new(e, 0.0)).gamma;
            let g1 = lyapunov(spec, Complex64::new(e, epsilon)).gamma;
            (g1 - g0).abs() >= eta
        })
        .collect();
    let measured = flagged.iter().filter(|&&f| f).count() as f64 * mesh;
    let changes = flagged.windows(2).filter(|w| w[0] != w[1]).count();
    let slack = 2.0 * mesh * changes as f64;
    let bound = std::f64::consts::PI * epsilon / eta;
    Ok(SuraceReport {
        epsilon,
        eta,
        points,
        mesh,
        measured,
        slack,
        bound,
        within_bound: measured <= bound + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ReducedRational;

    fn am(p: i64, q: i64, lambda: f64, theta: f64) -> OperatorSpec {
        OperatorSpec::almost_mathieu(ReducedRational::from_i64(p, q), lambda, theta).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lyapunov_examples() {
        let free = OperatorSpec::free();
        let g = lyapunov(&free, c(3.0, 0.0)).gamma;
        assert!((g - 1.5f64.acosh()).abs() < 1e-15);
        assert!((g - 0.96242).abs() < 1e-5);
        let inside = lyapunov(&free, c(1.0, 0.0));
        assert_eq!(inside.gamma, 0.0);
        assert!((inside.bloch_k.unwrap() - (0.5f64).acos()).abs() < 1e-15);
        let g = lyapunov(&am(1, 2, 2.0, 0.0), c(0.0, 0.0)).gamma;
        assert!((g - 0.5 * 3f64.acosh()).abs() < 1e-14);
        assert!((g - 0.88137).abs() < 1e-5);
    }

    #[test]
    fn free_green_closed_form() {
        let free = OperatorSpec::free();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let g11 = green_halfline(&free, 1, 1, c(0.0, 1.0)).unwrap().value;
        assert!((g11 - c(0.0, g)).norm() < 1e-15);
        // G(1,2) = -G(1,1) G(2,2) = +g^2 with G = (H - z)^{-1}
        let g12 = green_halfline(&free, 1, 2, c(0.0, 1.0)).unwrap().value;
        assert!((g12 - c(g * g, 0.0)).norm() < 1e-15);
        assert!((g12.norm() - 0.3820).abs() < 1e-4);
    }

    #[test]
    fn green_bounded_by_inverse_epsilon() {
        let spec = am(3, 7, 2.0, 0.3);
        for &e in &[-3.0, -1.2, 0.0, 0.7, 2.5] {
            for l in 1..20 {
                let g = green_halfline(&spec, 1, l, c(e, 0.5)).unwrap().value;
                assert!(g.norm() <= 2.0);
            }
        }
    }

    #[test]
    fn spectrum_interior_is_rejected() {
        let r = green_halfline(&OperatorSpec::free(), 1, 1, c(0.5, 0.0));
        assert!(matches!(r, Err(Error::ResolventUnbounded { .. })));
    }

    #[test]
    fn identity_examples() {
        let rep = green_identities_check(&OperatorSpec::free(), c(0.0, 1.0), 2).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.g_1_mq - c(0.381966011250105, 0.0)).norm() < 1e-12);
        let rep = green_identities_check(&am(1, 2, 2.0, 0.0), c(0.1, 0.2), 3).unwrap();
        assert!(rep.pass, "{rep:?}");
        let rep = green_identities_check(&am(2, 5, 2.0, 0.9), c(-0.4, 1.0), 2).unwrap();
        assert!(rep.l2_sum <= 1.0);
    }

    #[test]
    fn surace_examples() {
        let rep = surace_deviation(&am(1, 2, 2.0, 0.0), 1e-9, 0.1, 2000).unwrap();
        assert_eq!(rep.measured, 0.0);
        let rep = surace_deviation(&am(1, 2, 2.0, 0.0), 0.01, 0.05, 10_000).unwrap();
        assert!(rep.within_bound, "{rep:?}");
        let rep = surace_deviation(&OperatorSpec::free(), 0.1, 0.5, 10_000).unwrap();
        assert!(rep.within_bound, "{rep:?}");
    }
}
