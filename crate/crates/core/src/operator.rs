//! The discrete Schrodinger operator `(H psi)(n) = psi(n+1) + psi(n-1) + V(n) psi(n)`
//! with a periodic potential, its transfer matrices, monodromy, discriminant
//! and the Chambers discriminant `Delta`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::ddouble::chambers_residual_dd;
use crate::error::{Error, Result};
use crate::mat2::{Mat2, Mat2C, Scaled, ScaledMat2};
use crate::rational::ReducedRational;
use crate::scalar::Scalar;

/// How often (in sites) the running monodromy is renormalized.
const RENORM_STRIDE: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    /// `V(n) = lambda cos(2 pi alpha n + theta)`.
    AlmostMathieu {
        alpha: ReducedRational,
        lambda: f64,
        theta: f64,
    },
    /// `V(n) = values[(n - 1) mod period]`.
    Explicit { values: Vec<f64> },
}

/// A periodic operator, with its potential over one period cached.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorSpec {
    pub potential: Potential,
    #[serde(skip)]
    small: Option<(i64, i64)>,
    #[serde(skip)]
    values: Vec<f64>,
}

impl OperatorSpec {
    pub fn almost_mathieu(alpha: ReducedRational, lambda: f64, theta: f64) -> Result<Self> {
        let period = alpha.period()?;
        let small = alpha.small().ok_or_else(|| Error::PeriodTooLarge(alpha.to_string()))?;
        let mut spec = Self {
            potential: Potential::AlmostMathieu { alpha, lambda, theta },
            small: Some(small),
            values: Vec::new(),
        };
        spec.values = (1..=period as i64).map(|n| spec.potential_eval(n)).collect();
        Ok(spec)
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty potential".into()));
        }
        Ok(Self { potential: Potential::Explicit { values: values.clone() }, small: None, values })
    }

    /// Zero potential, period one.
    pub fn free() -> Self {
        Self::explicit(vec![0.0]).expect("nonempty")
    }

    pub fn period(&self) -> usize {
        self.values.len()
    }

    /// `V(1), ..., V(q)`.
    pub fn period_values(&self) -> &[f64] {
        &self.values
    }

    pub fn lambda(&self) -> Option<f64> {
        match &self.potential {
            Potential::AlmostMathieu { lambda, .. } => Some(*lambda),
            Potential::Explicit { .. } => None,
        }
    }

    /// Energy window containing the whole spectrum.
    pub fn spectral_window(&self) -> (f64, f64) {
        let lo = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo - 2.0, hi + 2.0)
    }

    /// `V(n)`; exactly periodic in `n` because the phase is reduced mod `q`
    /// before the cosine is taken.
    pub fn potential_eval(&self, n: i64) -> f64 {
        match (&self.potential, self.small) {
            (Potential::AlmostMathieu { lambda, theta, .. }, Some((p, q))) => {
                let r = ((p as i128 * n as i128).rem_euclid(q as i128)) as f64;
                lambda * (2.0 * PI * r / q as f64 + theta).cos()
            }
            _ => {
                let q = self.values.len() as i64;
                self.values[((n - 1).rem_euclid(q)) as usize]
            }
        }
    }
}

/// `V(n)` for the operator.
pub fn potential_eval(spec: &OperatorSpec, n: i64) -> f64 {
    spec.potential_eval(n)
}

/// `T_j(E) = (E - V(j), -1; 1, 0)`.
pub fn transfer_matrix(spec: &OperatorSpec, e: Complex64, j: i64) -> Mat2C {
    Mat2::transfer(e, spec.potential_eval(j))
}

/// `Phi_q = T_q ... T_1` over the given potential values, kept in scaled form.
pub fn monodromy_of<S: Scalar>(values: &[f64], z: S) -> ScaledMat2<S> {
    let mut acc = ScaledMat2::<S>::identity();
    for (i, &v) in values.iter().enumerate() {
        acc.mantissa = acc.mantissa.step_left(z, v);
        if (i + 1) % RENORM_STRIDE == 0 {
            acc.renormalize();
        }
    }
    acc.renormalize();
    acc
}

/// One-period monodromy of `spec` at energy `z` (any scalar, including duals).
pub fn monodromy<S: Scalar>(spec: &OperatorSpec, z: S) -> ScaledMat2<S> {
    monodromy_of(spec.period_values(), z)
}

/// `D(z) = Tr Phi_q(z)` in scaled form.
pub fn discriminant_scaled<S: Scalar>(values: &[f64], z: S) -> Scaled<S> {
    monodromy_of(values, z).trace()
}

/// `D(z) = Tr Phi_q(z)`; saturates to infinity when out of `f64` range.
pub fn discriminant<S: Scalar>(spec: &OperatorSpec, z: S) -> S {
    discriminant_scaled(spec.period_values(), z).unscaled()
}

/// Potential of the almost Mathieu operator at the Chambers phase `pi/(2q)`.
pub fn chambers_values(alpha: &ReducedRational, lambda: f64) -> Result<Vec<f64>> {
    let q = alpha.period()? as f64;
    Ok(OperatorSpec::almost_mathieu(alpha.clone(), lambda, PI / (2.0 * q))?.values)
}

/// Chambers discriminant `Delta_{p/q,lambda}(z) = D_{p/q,lambda,pi/(2q)}(z)`.
pub fn delta<S: Scalar>(alpha: &ReducedRational, lambda: f64, z: S) -> Result<S> {
    Ok(discriminant_scaled(&chambers_values(alpha, lambda)?, z).unscaled())
}

/// `|D_{p/q,lambda,theta}(E) - Delta(E) + 2 (lambda/2)^q cos(q theta)|`,
/// evaluated in double-double so that the result is not floored at
/// `eps |D|`. Falls back to binary64 when `D` leaves the double range.
pub fn chambers_residual(
    alpha: &ReducedRational,
    lambda: f64,
    e: Complex64,
    theta: f64,
) -> Result<f64> {
    let r = chambers_residual_dd(alpha, lambda, e, theta)?;
    if r.is_finite() {
        return Ok(r);
    }
    let q = alpha.period()?;
    let d = discriminant(&OperatorSpec::almost_mathieu(alpha.clone(), lambda, theta)?, e);
    let big_delta: Complex64 = delta(alpha, lambda, e)?;
    let shift = 2.0 * (lambda / 2.0).powi(q as i32) * (q as f64 * theta).cos();
    Ok((d - big_delta + shift).norm())
}
