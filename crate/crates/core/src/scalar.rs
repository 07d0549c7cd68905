//! Scalar types accepted by the transfer-matrix recurrence.
//!
//! Besides `f64` and `Complex64` the recurrence runs over forward-mode dual
//! numbers, so one pass yields both the discriminant and its energy
//! derivative.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::Serialize;

/// Ring operations plus the hooks needed for power-of-two rescaling.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + std::fmt::Debug
{
    fn from_real(x: f64) -> Self;

    /// Largest absolute component.
    fn magnitude(&self) -> f64;

    /// Multiply by `2^k` exactly.
    fn scale_pow2(self, k: i32) -> Self;

    fn zero() -> Self {
        Self::from_real(0.0)
    }

    fn one() -> Self {
        Self::from_real(1.0)
    }
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn scale_pow2(self, k: i32) -> Self {
        self * pow2(k)
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }

    fn scale_pow2(self, k: i32) -> Self {
        let s = pow2(k);
        Complex64::new(self.re * s, self.im * s)
    }
}

/// `2^k` without going through `powi` rounding; saturates to 0 or inf.
pub(crate) fn pow2(k: i32) -> f64 {
    if k > 1023 {
        f64::INFINITY
    } else if k < -1074 {
        0.0
    } else if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        f64::from_bits(1u64 << (k + 1074))
    }
}

/// First-order dual number `value + deriv * eps`, `eps^2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Dual<T> {
    pub value: T,
    pub deriv: T,
}

/// Dual number over the complex field; carries `d/dE`.
pub type DualComplex = Dual<Complex64>;

impl<T: Scalar> Dual<T> {
    pub fn new(value: T, deriv: T) -> Self {
        Self { value, deriv }
    }

    /// The independent variable: derivative seeded with one.
    pub fn variable(value: T) -> Self {
        Self { value, deriv: T::one() }
    }

    pub fn constant(value: T) -> Self {
        Self { value, deriv: T::zero() }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.value * rhs.value,
            self.value * rhs.deriv + self.deriv * rhs.value,
        )
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.deriv)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn from_real(x: f64) -> Self {
        Self::constant(T::from_real(x))
    }

    fn magnitude(&self) -> f64 {
        self.value.magnitude().max(self.deriv.magnitude())
    }

    fn scale_pow2(self, k: i32) -> Self {
        Self::new(self.value.scale_pow2(k), self.deriv.scale_pow2(k))
    }
}
