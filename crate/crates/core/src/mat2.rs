//! 2x2 matrices over a generic scalar, with an optional binary exponent for
//! products whose entries outgrow `f64`.

use num_complex::Complex64;
use serde::Serialize;

use crate::scalar::{pow2, Scalar};

/// Rescale once the largest entry leaves `[2^-RESCALE_BITS, 2^RESCALE_BITS]`.
const RESCALE_BITS: i32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Mat2<S> {
    pub a11: S,
    pub a12: S,
    pub a21: S,
    pub a22: S,
}

/// Complex 2x2 matrix.
pub type Mat2C = Mat2<Complex64>;

impl<S: Scalar> Mat2<S> {
    pub fn new(a11: S, a12: S, a21: S, a22: S) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Self::new(S::one(), S::zero(), S::zero(), S::one())
    }

    /// One-step transfer matrix `(z - v, -1; 1, 0)`.
    pub fn transfer(z: S, v: f64) -> Self {
        Self::new(z - S::from_real(v), -S::one(), S::one(), S::zero())
    }

    /// Inverse of [`Mat2::transfer`]: `(0, 1; -1, z - v)`.
    pub fn inverse_transfer(z: S, v: f64) -> Self {
        Self::new(S::zero(), S::one(), -S::one(), z - S::from_real(v))
    }

    pub fn det(&self) -> S {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> S {
        self.a11 + self.a22
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }

    pub fn apply(&self, v: [S; 2]) -> [S; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    pub fn magnitude(&self) -> f64 {
        self.a11
            .magnitude()
            .max(self.a12.magnitude())
            .max(self.a21.magnitude())
            .max(self.a22.magnitude())
    }

    pub fn scale_pow2(&self, k: i32) -> Self {
        Self::new(
            self.a11.scale_pow2(k),
            self.a12.scale_pow2(k),
            self.a21.scale_pow2(k),
            self.a22.scale_pow2(k),
        )
    }

    /// Left-multiply by the transfer matrix `(z - v, -1; 1, 0)`.
    pub(crate) fn step_left(&self, z: S, v: f64) -> Self {
        let c = z - S::from_real(v);
        Self::new(
            c * self.a11 - self.a21,
            c * self.a12 - self.a22,
            self.a11,
            self.a12,
        )
    }
}

impl Mat2C {
    pub fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(a11.into(), a12.into(), a21.into(), a22.into())
    }

    /// Inverse of a determinant-one matrix.
    pub fn sl2_inverse(&self) -> Self {
        Self::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    /// General inverse.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        (self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr())
            .sqrt()
    }
}

/// Binary exponent of `x`, i.e. `floor(log2 |x|)` for finite nonzero `x`.
pub(crate) fn exponent_of(x: f64) -> i32 {
    let bits = x.abs().to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i32;
    if raw == 0 {
        // subnormal
        let mant = bits & ((1u64 << 52) - 1);
        -1074 + (63 - mant.leading_zeros() as i32)
    } else {
        raw - 1023
    }
}

/// Matrix stored as `mantissa * 2^exp2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledMat2<S> {
    pub mantissa: Mat2<S>,
    pub exp2: i64,
}

impl<S: Scalar> ScaledMat2<S> {
    pub fn identity() -> Self {
        Self { mantissa: Mat2::identity(), exp2: 0 }
    }

    pub(crate) fn renormalize(&mut self) {
        let m = self.mantissa.magnitude();
        if m == 0.0 || !m.is_finite() {
            return;
        }
        let e = exponent_of(m);
        if !(-RESCALE_BITS..=RESCALE_BITS).contains(&e) {
            self.mantissa = self.mantissa.scale_pow2(-e);
            self.exp2 += e as i64;
        }
    }

    pub fn trace(&self) -> Scaled<S> {
        Scaled { mantissa: self.mantissa.trace(), exp2: self.exp2 }
    }

    /// The determinant carries twice the exponent.
    pub fn det(&self) -> Scaled<S> {
        Scaled { mantissa: self.mantissa.det(), exp2: 2 * self.exp2 }
    }

    /// Unscaled matrix; entries saturate to infinity or zero when out of range.
    pub fn to_mat(&self) -> Mat2<S> {
        let k = self.exp2.clamp(-2200, 2200) as i32;
        if k.abs() <= 1000 {
            self.mantissa.scale_pow2(k)
        } else {
            self.mantissa.scale_pow2(k / 2).scale_pow2(k - k / 2)
        }
    }
}

/// Scalar stored as `mantissa * 2^exp2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled<S> {
    pub mantissa: S,
    pub exp2: i64,
}

impl<S: Scalar> Scaled<S> {
    pub fn unscaled(&self) -> S {
        let k = self.exp2.clamp(-2200, 2200) as i32;
        if k.abs() <= 1000 {
            self.mantissa.scale_pow2(k)
        } else {
            self.mantissa.scale_pow2(k / 2).scale_pow2(k - k / 2)
        }
    }
}

impl Scaled<f64> {
    /// `ln |x|`, valid far beyond the `f64` range.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }
}

impl Scaled<Complex64> {
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }
}

#[allow(dead_code)]
pub(crate) fn ldexp(x: f64, k: i32) -> f64 {
    if k.abs() <= 1000 {
        x * pow2(k)
    } else {
        x * pow2(k / 2) * pow2(k - k / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_matches_log2() {
        for x in [1.0, 3.5, 1e-300, 7e250, 2f64.powi(-1070)] {
            assert_eq!(exponent_of(x), x.log2().floor() as i32, "x = {x}");
        }
    }

    #[test]
    fn transfer_has_unit_determinant() {
        let t = Mat2::transfer(Complex64::new(0.3, -1.1), 0.7);
        assert!((t.det() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let inv = Mat2::inverse_transfer(Complex64::new(0.3, -1.1), 0.7);
        let id = t.mul(&inv);
        assert!((id.a11 - 1.0).norm() < 1e-15 && id.a12.norm() < 1e-15);
    }

    #[test]
    fn scaled_roundtrip() {
        let mut m = ScaledMat2 {
            mantissa: Mat2::new(3.0 * 2f64.powi(300), 1.0, 0.0, 2f64.powi(290)),
            exp2: 0,
        };
        m.renormalize();
        assert!(m.exp2 > 0);
        let back = m.to_mat();
        assert_eq!(back.a11, 3.0 * 2f64.powi(300));
        assert_eq!(back.a22, 2f64.powi(290));
    }
}
