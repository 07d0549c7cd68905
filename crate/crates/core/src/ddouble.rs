//! Double-double arithmetic for the discriminant, used where the binary64
//! rounding floor `eps |D|` exceeds an absolute tolerance.
//!
//! A value is `hi + lo` with `|lo| <= ulp(hi)/2`, carrying about 106 bits.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::Result;
use crate::rational::ReducedRational;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `pi` to about 160 bits, as three binary64 parts.
const PI_PARTS: [f64; 3] = [3.141592653589793, 1.2246467991473532e-16, -2.9947698097183397e-33];

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn pi() -> Self {
        let (hi, lo) = quick_two_sum(PI_PARTS[0], PI_PARTS[1] + PI_PARTS[2]);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - Dd::new(b).mul_f64(q1);
        let q2 = r.hi / b;
        let r = r - Dd::new(b).mul_f64(q2);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }

    /// `self - 2 pi k` with `k` nearest to `self / (2 pi)`.
    fn reduce_two_pi(self) -> Self {
        let k = (self.hi / (2.0 * PI_PARTS[0])).round();
        // k 2 pi to triple precision: each part times an integer below 2^53
        let mut r = self;
        for part in PI_PARTS {
            let (p, e) = two_prod(2.0 * part, k);
            r = r - Dd::new(p) - Dd::new(e);
        }
        r
    }

    /// `(cos x, sin x)` to double-double accuracy.
    pub fn cos_sin(self) -> (Self, Self) {
        let x = self.reduce_two_pi();
        // x = j pi/2 + t, |t| <= pi/4
        let half_pi = Dd::pi().mul_f64(0.5);
        let j = (x.hi / half_pi.hi).round();
        let t = x - half_pi.mul_f64(j);
        let t2 = t * t;
        // Taylor series to order 27; |t|^28 / 28! < 1e-35
        let (mut c, mut s) = (Dd::ONE, Dd::ONE);
        for n in (1..=13).rev() {
            let n = n as f64;
            c = Dd::ONE - (t2 * c).div_f64((2.0 * n - 1.0) * (2.0 * n));
            s = Dd::ONE - (t2 * s).div_f64((2.0 * n) * (2.0 * n + 1.0));
        }
        let s = s * t;
        match (j as i64).rem_euclid(4) {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        }
    }

    pub fn cos(self) -> Self {
        self.cos_sin().0
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub fn new(z: Complex64) -> Self {
        Self { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for DdComplex {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for DdComplex {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Self { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Mul for DdComplex {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        Self { re: self.re * b.re - self.im * b.im, im: self.re * b.im + self.im * b.re }
    }
}

/// `lambda cos(2 pi p n / q + phase)` for `n = 1..=q`, with the phase
/// already in double-double.
fn am_values(p: i64, q: i64, lambda: f64, phase: Dd) -> Vec<Dd> {
    let two_pi = Dd::pi().mul_f64(2.0);
    (1..=q)
        .map(|n| {
            let r = (p as i128 * n as i128).rem_euclid(q as i128) as f64;
            (two_pi.mul_f64(r).div_f64(q as f64) + phase).cos().mul_f64(lambda)
        })
        .collect()
}

/// `Tr(T_q ... T_1)` at `z`, `T_n = (z - V(n), -1; 1, 0)`.
fn trace_dd(values: &[Dd], z: Complex64) -> DdComplex {
    let z = DdComplex::new(z);
    let zero = DdComplex::default();
    let one = DdComplex { re: Dd::ONE, im: Dd::ZERO };
    // columns of the running product
    let (mut a, mut b, mut c, mut d) = (one, zero, zero, one);
    for &v in values {
        let w = z - DdComplex { re: v, im: Dd::ZERO };
        (a, b, c, d) = (w * a - c, w * b - d, a, b);
    }
    a + d
}

/// `D_{p/q,lambda,theta}(z)` in double-double arithmetic, rounded.
pub fn discriminant_dd(alpha: &ReducedRational, lambda: f64, theta: f64, z: Complex64) -> Result<Complex64> {
    let (p, q) = small_pair(alpha)?;
    Ok(trace_dd(&am_values(p, q, lambda, Dd::new(theta)), z).to_complex())
}

fn small_pair(alpha: &ReducedRational) -> Result<(i64, i64)> {
    alpha.period()?;
    alpha.small().ok_or_else(|| crate::error::Error::PeriodTooLarge(alpha.to_string()))
}

/// `|D_{p/q,lambda,theta}(z) - Delta_{p/q,lambda}(z) + 2 (lambda/2)^q cos(q theta)|`
/// with every term in double-double, so that only the final difference is
/// rounded.
pub fn chambers_residual_dd(alpha: &ReducedRational, lambda: f64, z: Complex64, theta: f64) -> Result<f64> {
    let (p, q) = small_pair(alpha)?;
    let d = trace_dd(&am_values(p, q, lambda, Dd::new(theta)), z);
    let chambers_phase = Dd::pi().div_f64(2.0 * q as f64);
    let big_delta = trace_dd(&am_values(p, q, lambda, chambers_phase), z);
    let mut scale = Dd::ONE;
    for _ in 0..q {
        scale = scale.mul_f64(lambda / 2.0);
    }
    let q_theta = {
        let (hi, lo) = two_prod(theta, q as f64);
        Dd { hi, lo }
    };
    let shift = (scale * q_theta.cos()).mul_f64(2.0);
    let r = d - big_delta + DdComplex { re: shift, im: Dd::ZERO };
    Ok(r.to_complex().norm())
}

/// `(D, D')` of the almost Mathieu operator at the real energy `e`, in
/// double-double.
pub fn discriminant_with_slope_dd(alpha: &ReducedRational, lambda: f64, theta: f64, e: f64) -> Result<(Dd, Dd)> {
    let (p, q) = small_pair(alpha)?;
    Ok(trace_with_slope(&am_values(p, q, lambda, Dd::new(theta)), e))
}

/// `Delta_{p/q,lambda}` potential values, in double-double.
pub fn chambers_values_dd(alpha: &ReducedRational, lambda: f64) -> Result<Vec<Dd>> {
    let (p, q) = small_pair(alpha)?;
    Ok(am_values(p, q, lambda, Dd::pi().div_f64(2.0 * q as f64)))
}

/// `(Delta, Delta')` at the real energy `e`, in double-double.
pub fn delta_with_slope_dd(alpha: &ReducedRational, lambda: f64, e: f64) -> Result<(Dd, Dd)> {
    Ok(trace_with_slope(&chambers_values_dd(alpha, lambda)?, e))
}

/// Newton refinement of a simple zero of the discriminant bracketed in
/// `[lo, hi]`, returning the zero and the slope there.
pub fn refine_zero(values: &[Dd], x0: f64, lo: f64, hi: f64) -> (f64, f64) {
    let mut x = x0;
    let mut slope = trace_with_slope(values, x).1.to_f64();
    for _ in 0..8 {
        let (v, d) = trace_with_slope(values, x);
        slope = d.to_f64();
        let next = x - v.to_f64() / slope;
        if !(next >= lo && next <= hi) || next == x {
            break;
        }
        x = next;
    }
    (x, slope)
}

/// Trace of the real monodromy at `e`.
pub fn trace_dd_real(values: &[Dd], e: f64) -> Dd {
    let e = Dd::new(e);
    let (mut a, mut b, mut c, mut d) = (Dd::ONE, Dd::ZERO, Dd::ZERO, Dd::ONE);
    for &v in values {
        let w = e - v;
        (a, b, c, d) = (w * a - c, w * b - d, a, b);
    }
    a + d
}

/// Trace of the real monodromy and its energy derivative.
pub fn trace_with_slope(values: &[Dd], e: f64) -> (Dd, Dd) {
    let e = Dd::new(e);
    let (mut a, mut b, mut c, mut d) = (Dd::ONE, Dd::ZERO, Dd::ZERO, Dd::ONE);
    let (mut da, mut db, mut dc, mut dd) = (Dd::ZERO, Dd::ZERO, Dd::ZERO, Dd::ZERO);
    for &v in values {
        let w = e - v;
        (da, db, dc, dd) = (a + w * da - dc, b + w * db - dd, da, db);
        (a, b, c, d) = (w * a - c, w * b - d, a, b);
    }
    (a + d, da + dd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_matches_high_precision_values() {
        // cos(1) and cos(pi/3) to 32 digits
        let c = Dd::new(1.0).cos();
        assert!((c - Dd { hi: 0.5403023058681398, lo: -4.760954612604417e-17 }).to_f64().abs() < 1e-30);
        let c = Dd::pi().div_f64(3.0).cos();
        assert!((c - Dd::new(0.5)).to_f64().abs() < 1e-30);
        let (c, s) = Dd::pi().mul_f64(0.5).cos_sin();
        assert!(c.to_f64().abs() < 1e-30 && (s - Dd::ONE).to_f64().abs() < 1e-30);
        let c = Dd::new(1e4).cos();
        assert!((c.to_f64() - 1e4f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn division_is_accurate() {
        let x = Dd::ONE.div_f64(3.0).mul_f64(3.0) - Dd::ONE;
        assert!(x.to_f64().abs() < 1e-31);
    }

    #[test]
    fn residual_vanishes_where_binary64_cannot_resolve_it() {
        let a = ReducedRational::from_i64(35, 57);
        let z = Complex64::new(0.8139636711003382, 0.0);
        let d = discriminant_dd(&a, 1.9222420733962633, 5.606066138712584, z).unwrap();
        assert!(d.norm() > 1e12);
        let r = chambers_residual_dd(&a, 1.9222420733962633, z, 5.606066138712584).unwrap();
        assert!(r < 1e-12, "{r:e}");
    }
}
