//! Growth of products of slowly varying hyperbolic `SL(2, C)` matrices.
//!
//! Each factor `T_n` has eigenvalues `exp(+-(gamma_n + i zeta_n))` and unit
//! eigenvectors `phi_n^+-`. When the eigenvectors drift slowly compared with
//! `gamma_n exp(-gamma_n)`, the orbit of `phi_1^+` stays close to the
//! expanding direction and
//! `(1 - beta) e^{(1-beta) sum gamma} <= |Phi_N phi_1^+| <= (1 + beta) e^{(1+beta) sum gamma}`.
//! The certificate tracks the coefficients of the orbit in the moving
//! eigenbasis, in log-scaled form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mat2::Mat2C;

/// `|det T - 1|` allowed for a factor.
pub const DET_TOL: f64 = 1e-10;

type Vec2 = [Complex64; 2];

fn norm2(v: &Vec2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

fn sub2(a: &Vec2, b: &Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn scale2(v: &Vec2, s: Complex64) -> Vec2 {
    [v[0] * s, v[1] * s]
}

/// Unit vector with its leading nonzero component real and positive.
fn canonical(v: Vec2) -> Vec2 {
    let n = norm2(&v);
    let lead = if v[0].norm() > 1e-14 * n { v[0] } else { v[1] };
    let phase = lead.conj() / lead.norm();
    scale2(&v, phase / n)
}

/// One factor with its eigen-decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicFactor {
    pub t: Mat2C,
    pub gamma: f64,
    pub zeta: f64,
    pub phi_plus: Vec2,
    pub phi_minus: Vec2,
}

impl HyperbolicFactor {
    /// `U = (phi^+ | phi^-)`.
    pub fn u(&self) -> Mat2C {
        Mat2C::new(self.phi_plus[0], self.phi_minus[0], self.phi_plus[1], self.phi_minus[1])
    }

    /// `exp(gamma + i zeta)`.
    pub fn mu_plus(&self) -> Complex64 {
        Complex64::new(self.gamma, self.zeta).exp()
    }

    /// The factor `U diag(e^{gamma + i zeta}, e^{-gamma - i zeta}) U^{-1}`.
    pub fn from_parts(gamma: f64, zeta: f64, phi_plus: Vec2, phi_minus: Vec2) -> Self {
        let u = Mat2C::new(phi_plus[0], phi_minus[0], phi_plus[1], phi_minus[1]);
        let mu = Complex64::new(gamma, zeta).exp();
        let lambda = Mat2C::new(mu, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 1.0 / mu);
        let t = u.mul(&lambda).mul(&u.inverse());
        Self { t, gamma, zeta, phi_plus, phi_minus }
    }
}

/// Eigenvector of `t` for the eigenvalue `mu`, from whichever row of
/// `t - mu` is better conditioned.
fn eigenvector(t: &Mat2C, mu: Complex64) -> Vec2 {
    let c1 = [t.a12, mu - t.a11];
    let c2 = [mu - t.a22, t.a21];
    if norm2(&c1) >= norm2(&c2) {
        c1
    } else {
        c2
    }
}

pub fn eigensystem_2x2(t: &Mat2C) -> Result<HyperbolicFactor> {
    let det = t.det();
    if (det - 1.0).norm() > DET_TOL {
        return Err(Error::InvalidArgument(format!("factor has det {det}, not 1")));
    }
    let tr = t.trace();
    let root = (tr * tr - 4.0).sqrt();
    let (p, m) = ((tr + root) / 2.0, (tr - root) / 2.0);
    let mu = if p.norm() >= m.norm() { p } else { m };
    if (mu.norm() - 1.0).abs() <= DET_TOL {
        return Err(Error::NonHyperbolic { modulus: mu.norm() });
    }
    let log = mu.ln();
    let phi_plus = canonical(eigenvector(t, mu));
    let phi_minus = canonical(eigenvector(t, 1.0 / mu));
    Ok(HyperbolicFactor { t: *t, gamma: log.re, zeta: log.im, phi_plus, phi_minus })
}

/// Coefficients of `phi` in the basis `(phi^+, phi^-)` of `next`.
fn coords(next: &HyperbolicFactor, phi: &Vec2) -> Vec2 {
    next.u().inverse().apply(*phi)
}

/// Re-phases eigenvectors from the last factor backwards so that each
/// `phi_j^+-` has a real nonnegative component along `phi_{j+1}^+-`.
pub fn align_phases(factors: &[HyperbolicFactor]) -> Vec<HyperbolicFactor> {
    let mut out = factors.to_vec();
    for j in (0..out.len().saturating_sub(1)).rev() {
        let (head, tail) = out.split_at_mut(j + 1);
        let (cur, next) = (&mut head[j], &tail[0]);
        let a_plus = coords(next, &cur.phi_plus)[0];
        let a_minus = coords(next, &cur.phi_minus)[1];
        if a_plus.norm() > 0.0 {
            cur.phi_plus = scale2(&cur.phi_plus, a_plus.conj() / a_plus.norm());
        }
        if a_minus.norm() > 0.0 {
            cur.phi_minus = scale2(&cur.phi_minus, a_minus.conj() / a_minus.norm());
        }
    }
    out
}

/// `beta gamma_n e^{-gamma_n} - 4 max drift / |det U_{n+1}|` per factor,
/// with `U_{N+1} = U_N`.
pub fn hypothesis_margins(factors: &[HyperbolicFactor], beta: f64) -> Vec<f64> {
    let n = factors.len();
    (0..n)
        .map(|i| {
            let f = &factors[i];
            let next = &factors[(i + 1).min(n - 1)];
            let drift = norm2(&sub2(&f.phi_plus, &next.phi_plus))
                .max(norm2(&sub2(&f.phi_minus, &next.phi_minus)));
            beta * f.gamma * (-f.gamma).exp() - 4.0 * drift / next.u().det().norm()
        })
        .collect()
}

/// A complex number stored as `exp(ln_abs + i arg)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogComplex {
    pub ln_abs: f64,
    pub arg: f64,
}

impl LogComplex {
    fn new(z: Complex64, shift: f64) -> Self {
        Self { ln_abs: z.norm().ln() + shift, arg: z.arg() }
    }

    /// The value, when representable.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.ln_abs.exp(), self.arg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// The drift hypothesis fails first at this (1-based) factor.
    HypothesisViolated { n: usize },
    /// `|B_n| > beta |A_n|` first at this step despite the hypothesis.
    InductionViolated { n: usize },
    /// The final sandwich fails despite the hypothesis.
    BoundViolated,
}

/// Growth certificate for `Phi_N phi_1^+`. Norms and bounds are natural logs.
#[derive(Clone, Debug, Serialize)]
pub struct ProductCertificate {
    #[serde(skip)]
    pub factors: Vec<HyperbolicFactor>,
    pub beta: f64,
    /// `A_1, ..., A_{N+1}`.
    pub a: Vec<LogComplex>,
    /// `B_1, ..., B_{N+1}`.
    pub b: Vec<LogComplex>,
    pub gamma_sum: f64,
    /// `ln |Phi_N phi_1^+|`.
    pub ln_norm_final: f64,
    /// `ln(1 - beta) + (1 - beta) sum gamma`.
    pub ln_lower: f64,
    /// `ln(1 + beta) + (1 + beta) sum gamma`.
    pub ln_upper: f64,
    /// Whether `ln |A_{N+1}| >= (1 - beta) sum gamma`.
    pub lower_chain_holds: bool,
    pub hypothesis_margins: Vec<f64>,
    pub verdict: Verdict,
}

pub fn product_growth(factors: &[HyperbolicFactor], beta: f64) -> Result<ProductCertificate> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("empty product".into()));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 1), got {beta}")));
    }
    let n = factors.len();
    let margins = hypothesis_margins(factors, beta);
    let first_bad = margins.iter().position(|&m| !(m > 0.0));

    let one = Complex64::new(1.0, 0.0);
    let (mut ca, mut cb) = (one, Complex64::new(0.0, 0.0));
    let mut shift = 0.0;
    let mut a = vec![LogComplex::new(ca, 0.0)];
    let mut b = vec![LogComplex { ln_abs: f64::NEG_INFINITY, arg: 0.0 }];
    let mut induction_bad = None;
    for (i, f) in factors.iter().enumerate() {
        // Lambda_n with e^{gamma_n} pulled into the shift
        ca *= Complex64::from_polar(1.0, f.zeta);
        cb *= Complex64::from_polar((-2.0 * f.gamma).exp(), -f.zeta);
        shift += f.gamma;
        if i + 1 < n {
            let next = &factors[i + 1];
            let v = next.u().inverse().mul(&f.u()).apply([ca, cb]);
            ca = v[0];
            cb = v[1];
        }
        let s = ca.norm().max(cb.norm());
        ca /= s;
        cb /= s;
        shift += s.ln();
        a.push(LogComplex::new(ca, shift));
        b.push(LogComplex::new(cb, shift));
        if induction_bad.is_none() && cb.norm() > beta * ca.norm() * (1.0 + 1e-12) {
            induction_bad = Some(i + 2);
        }
    }
    let last = &factors[n - 1];
    let tip = [
        ca * last.phi_plus[0] + cb * last.phi_minus[0],
        ca * last.phi_plus[1] + cb * last.phi_minus[1],
    ];
    let ln_norm_final = norm2(&tip).ln() + shift;
    let gamma_sum: f64 = factors.iter().map(|f| f.gamma).sum();
    let ln_lower = (1.0 - beta).ln() + (1.0 - beta) * gamma_sum;
    let ln_upper = (1.0 + beta).ln() + (1.0 + beta) * gamma_sum;
    let lower_chain_holds = a[n].ln_abs >= (1.0 - beta) * gamma_sum * (1.0 - 1e-12);
    let slack = 1e-12 * gamma_sum.max(1.0);
    let verdict = match (first_bad, induction_bad) {
        (Some(i), _) => Verdict::HypothesisViolated { n: i + 1 },
        (None, Some(i)) => Verdict::InductionViolated { n: i },
        (None, None)
            if ln_norm_final < ln_lower - slack || ln_norm_final > ln_upper + slack || !lower_chain_holds =>
        {
            Verdict::BoundViolated
        }
        _ => Verdict::Pass,
    };
    Ok(ProductCertificate {
        factors: factors.to_vec(),
        beta,
        a,
        b,
        gamma_sum,
        ln_norm_final,
        ln_lower,
        ln_upper,
        lower_chain_holds,
        hypothesis_margins: margins,
        verdict,
    })
}

/// A random chain of `n` factors meeting the drift hypothesis for `beta`.
///
/// Exponents start in `[0.3, 1.5]` and take small random steps; real
/// eigenvectors rotate by at most half the admissible drift per step.
/// Chains whose margins come out nonpositive are regenerated with smaller
/// rotations.
pub fn random_admissible_chain(rng: &mut impl Rng, n: usize, beta: f64) -> Vec<HyperbolicFactor> {
    let mut damping = 1.0;
    loop {
        let chain = random_chain(rng, n, beta, damping);
        if hypothesis_margins(&chain, beta).iter().all(|&m| m > 0.0) {
            return chain;
        }
        damping *= 0.5;
    }
}

fn random_chain(rng: &mut impl Rng, n: usize, beta: f64, damping: f64) -> Vec<HyperbolicFactor> {
    let real_unit = |a: f64| [Complex64::new(a.cos(), 0.0), Complex64::new(a.sin(), 0.0)];
    let mut gamma: f64 = rng.gen_range(0.3..1.5);
    let mut a_plus: f64 = rng.gen_range(-PI..PI);
    let mut a_minus = a_plus + rng.gen_range(0.5..(PI - 0.5));
    let mut raw = Vec::with_capacity(n);
    for _ in 0..n {
        let zeta = rng.gen_range(-PI..PI);
        raw.push(HyperbolicFactor::from_parts(gamma, zeta, real_unit(a_plus), real_unit(a_minus)));
        // |det U| = |sin(a_minus - a_plus)|; a rotation by d moves a unit vector by <= |d|
        let det = (a_minus - a_plus).sin().abs();
        let allowed = damping * beta / 8.0 * gamma * (-gamma).exp() * det * 0.9;
        a_plus += rng.gen_range(-allowed..=allowed);
        a_minus += rng.gen_range(-allowed..=allowed);
        gamma = (gamma + rng.gen_range(-0.05..0.05)).clamp(0.3, 1.5);
    }
    let decomposed: Vec<HyperbolicFactor> =
        raw.iter().map(|f| eigensystem_2x2(&f.t).unwrap_or_else(|_| f.clone())).collect();
    align_phases(&decomposed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(g: f64) -> Mat2C {
        Mat2C::from_real(g.exp(), 0.0, 0.0, (-g).exp())
    }

    #[test]
    fn diagonal_eigensystem() {
        let f = eigensystem_2x2(&diag(1.0)).unwrap();
        assert!((f.gamma - 1.0).abs() < 1e-15);
        assert_eq!(f.zeta, 0.0);
        assert!((f.phi_plus[0] - 1.0).norm() < 1e-15 && f.phi_plus[1].norm() < 1e-15);
        assert!(f.phi_minus[0].norm() < 1e-15 && (f.phi_minus[1] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn free_transfer_eigensystem() {
        let t = Mat2C::from_real(3.0, -1.0, 1.0, 0.0);
        let f = eigensystem_2x2(&t).unwrap();
        assert!((f.gamma - 1.5f64.acosh()).abs() < 1e-14);
        assert!(f.phi_plus.iter().chain(&f.phi_minus).all(|x| x.im.abs() < 1e-15));
        let mu = f.mu_plus();
        let tv = t.apply(f.phi_plus);
        assert!(norm2(&sub2(&tv, &scale2(&f.phi_plus, mu))) < 1e-10);
        let tv = t.apply(f.phi_minus);
        assert!(norm2(&sub2(&tv, &scale2(&f.phi_minus, 1.0 / mu))) < 1e-10);
    }

    #[test]
    fn parabolic_rejected() {
        let t = Mat2C::from_real(1.0, 1.0, 0.0, 1.0);
        assert!(matches!(eigensystem_2x2(&t), Err(Error::NonHyperbolic { .. })));
    }

    #[test]
    fn alignment_examples() {
        let f = eigensystem_2x2(&Mat2C::from_real(3.0, -1.0, 1.0, 0.0)).unwrap();
        let same = align_phases(&[f.clone(), f.clone()]);
        assert_eq!(same[0], f);
        let mut g = f.clone();
        let w = Complex64::from_polar(1.0, PI / 3.0);
        g.phi_plus = scale2(&g.phi_plus, w);
        g.phi_minus = scale2(&g.phi_minus, w);
        let al = align_phases(&[g, f.clone()]);
        let a = coords(&al[1], &al[0].phi_plus)[0];
        assert!(a.im.abs() < 1e-14 && a.re > 0.0);
    }

    #[test]
    fn constant_chain_margins() {
        let f = eigensystem_2x2(&diag(0.7)).unwrap();
        let m = hypothesis_margins(&[f.clone(), f.clone(), f], 0.5);
        for x in m {
            assert!((x - 0.5 * 0.7 * (-0.7f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn large_drift_flagged() {
        let f = eigensystem_2x2(&diag(0.7)).unwrap();
        let g = HyperbolicFactor::from_parts(
            0.7,
            0.0,
            [c(0.0), c(1.0)],
            [c(-1.0), c(0.0)],
        );
        let cert = product_growth(&[f, g], 0.5).unwrap();
        assert!(cert.hypothesis_margins[0] < 0.0);
        assert_eq!(cert.verdict, Verdict::HypothesisViolated { n: 1 });
    }

    #[test]
    fn diagonal_product_is_exact() {
        let f = eigensystem_2x2(&diag(0.8)).unwrap();
        let chain = vec![f; 2000];
        let cert = product_growth(&chain, 0.5).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert!((cert.ln_norm_final - 1600.0).abs() < 1e-9);
    }

    #[test]
    fn single_factor() {
        let t = Mat2C::from_real(3.0, -1.0, 1.0, 0.0);
        let f = eigensystem_2x2(&t).unwrap();
        let cert = product_growth(&[f.clone()], 0.3).unwrap();
        assert!((cert.ln_norm_final - f.gamma).abs() < 1e-12);
        assert_eq!(cert.verdict, Verdict::Pass);
    }

    #[test]
    fn random_chains_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let chain = random_admissible_chain(&mut rng, 40, 0.5);
            let cert = product_growth(&chain, 0.5).unwrap();
            assert_eq!(cert.verdict, Verdict::Pass);
        }
    }
}
