//! Continued fractions in exact arithmetic and a frequency built from
//! rapidly growing quotients, certified level by level.
//!
//! At each odd level `j` the construction works with `alpha_j = p_j/q_j`,
//! `delta_j = q_j^{-j}`, `eta = C^{-q_j} delta_j^2` and `C(p_j, q_j) = C q_j`,
//! and requires
//! 1. `|alpha_{j+1} - alpha_j| < min(eta, delta_j)`,
//! 2. `|alpha - alpha_{j+1}| < q_{j+1}^{-(j+1)}`,
//! 3. `q_{j+1} > q_j^j` and
//!    `(C q_j / delta_j) exp(-delta_j q_{j+1} / (C q_j)) <= q_{j+1}^{-j}`.
//!
//! The frequency itself is any irrational whose expansion starts with the
//! returned quotients; condition 2 only uses `|alpha - p_k/q_k| < 1/(q_k q_{k+1})`.

use std::f64::consts::{LN_10, LN_2};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::ReducedRational;

/// Largest `C^{q}` (in bits) the exact admissibility radius is allowed to need.
pub const MAX_ETA_BITS: f64 = (1u64 << 24) as f64;

fn as_decimal<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

fn as_decimals<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|n| n.to_string()))
}

/// `ln n` for a positive integer of any size.
pub fn ln_big(n: &BigInt) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * LN_2
}

fn ln_rat(r: &BigRational) -> f64 {
    ln_big(r.numer()) - ln_big(r.denom())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuedFraction {
    #[serde(serialize_with = "as_decimals")]
    pub quotients: Vec<BigInt>,
    pub convergents: Vec<ReducedRational>,
}

impl ContinuedFraction {
    fn denom(&self, k: usize) -> &BigInt {
        self.convergents[k - 1].denom()
    }

    fn conv(&self, k: usize) -> BigRational {
        self.convergents[k - 1].to_big_rational()
    }
}

/// `[n_1, n_2, ...] = 1/(n_1 + 1/(n_2 + ...))` with its convergents
/// `p_k = n_k p_{k-1} + p_{k-2}`, `q_k = n_k q_{k-1} + q_{k-2}`.
pub fn convergents(quotients: &[BigInt]) -> Result<ContinuedFraction> {
    if let Some(bad) = quotients.iter().find(|n| !n.is_positive()) {
        return Err(Error::InvalidArgument(format!("quotient {bad} is not positive")));
    }
    let (mut p, mut q) = ((BigInt::one(), BigInt::zero()), (BigInt::zero(), BigInt::one()));
    let mut out = Vec::with_capacity(quotients.len());
    for n in quotients {
        let pk = n * &p.1 + &p.0;
        let qk = n * &q.1 + &q.0;
        out.push(ReducedRational::new(pk.clone(), qk.clone())?);
        p = (p.1, pk);
        q = (q.1, qk);
    }
    Ok(ContinuedFraction { quotients: quotients.to_vec(), convergents: out })
}

/// One inequality `lhs < rhs`, decided exactly where the sides are
/// rational; `log10_ratio = log10(rhs / lhs)` is informational and may
/// round to zero when the sides agree to many digits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Margin {
    pub holds: bool,
    pub log10_ratio: f64,
}

impl Margin {
    fn exact(lhs: &BigRational, rhs: &BigRational, strict: bool) -> Self {
        let holds = less(lhs, rhs, strict);
        Self { holds, log10_ratio: (ln_rat(rhs) - ln_rat(lhs)) / LN_10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelCertificate {
    pub j: usize,
    #[serde(serialize_with = "as_decimal")]
    pub q_j: BigInt,
    #[serde(serialize_with = "as_decimal")]
    pub q_next: BigInt,
    pub cond1: Margin,
    pub cond2: Margin,
    pub cond3a: Margin,
    pub cond3b: Margin,
}

impl LevelCertificate {
    pub fn holds(&self) -> bool {
        [self.cond1, self.cond2, self.cond3a, self.cond3b].iter().all(|m| m.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaCertificate {
    pub levels: Vec<LevelCertificate>,
    pub c_used: f64,
    pub pass: bool,
}

/// Exact `C` from its binary value.
fn c_rational(c: f64) -> Result<BigRational> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("C must be positive and finite, got {c}")));
    }
    Ok(BigRational::from_float(c).expect("finite"))
}

/// `min(C^{-q_j} delta^2, delta)` with `delta = q_j^{-j}`, unreduced: the
/// powers of `C` can run to millions of bits, where gcds dominate.
fn admissible_radius(c: &BigRational, qj: &BigInt, j: usize) -> Result<BigRational> {
    let q = qj.to_u64().filter(|&q| q as f64 * ln_rat(c).abs() / LN_2 <= MAX_ETA_BITS);
    let q = q.ok_or(Error::EtaUnderflow { level: j })? as u32;
    let qjj = qj.pow(j as u32);
    // eta = b^q / (a^q q_j^{2j}) for C = a/b
    let (bq, aq) = (c.denom().pow(q), c.numer().pow(q));
    let eta_den = aq * &qjj * &qjj;
    Ok(if &bq * &qjj < eta_den {
        BigRational::new_raw(bq, eta_den)
    } else {
        BigRational::new_raw(BigInt::one(), qjj)
    })
}

/// `a < b` (or `<=`) by cross-multiplication, for positive denominators.
fn less(a: &BigRational, b: &BigRational, strict: bool) -> bool {
    let (l, r) = (a.numer() * b.denom(), b.numer() * a.denom());
    if strict {
        l < r
    } else {
        l <= r
    }
}

/// `ln x - ln(ln(C q_j/delta) + j ln q)` with `x = delta q / (C q_j)`; the
/// exponential condition holds iff this is nonnegative.
fn exponential_gap(ln_c: f64, qj: &BigInt, j: usize, ln_q: f64) -> f64 {
    let a = ln_c + (j + 1) as f64 * ln_big(qj);
    let ln_x = ln_q - a;
    ln_x - (a + j as f64 * ln_q).ln()
}

/// Relative rounding allowance when deciding the exponential condition.
const GAP_TOL: f64 = 1e-12;

fn exponential_holds(ln_c: f64, qj: &BigInt, j: usize, q: &BigInt) -> bool {
    let ln_q = ln_big(q);
    exponential_gap(ln_c, qj, j, ln_q) > GAP_TOL * (1.0 + ln_q)
}

fn level_certificate(cf: &ContinuedFraction, c: &BigRational, j: usize) -> Result<LevelCertificate> {
    let (qj, qn, qnn) = (cf.denom(j), cf.denom(j + 1), cf.denom(j + 2));
    let ln_c = ln_rat(c);

    let gap = (cf.conv(j + 1) - cf.conv(j)).abs();
    let cond1 = Margin::exact(&gap, &admissible_radius(c, qj, j)?, true);

    // |alpha - p_{j+1}/q_{j+1}| < 1/(q_{j+1} q_{j+2}) <= q_{j+1}^{-(j+1)}
    let tail = BigRational::new(BigInt::one(), qn * qnn);
    let cond2 = Margin::exact(&tail, &BigRational::new(BigInt::one(), qn.pow(j as u32 + 1)), false);

    let cond3a = Margin::exact(
        &BigRational::from_integer(qj.pow(j as u32)),
        &BigRational::from_integer(qn.clone()),
        true,
    );
    let g = exponential_gap(ln_c, qj, j, ln_big(qn));
    let cond3b = Margin { holds: exponential_holds(ln_c, qj, j, qn), log10_ratio: g / LN_10 };
    Ok(LevelCertificate { j, q_j: qj.clone(), q_next: qn.clone(), cond1, cond2, cond3a, cond3b })
}

/// Re-checks every odd level `j <= j_max` of a given expansion.
pub fn verify_conditions(cf: &ContinuedFraction, c: f64, j_max: usize) -> Result<AlphaCertificate> {
    let cr = c_rational(c)?;
    if cf.convergents.len() < j_max + 2 {
        return Err(Error::InvalidArgument(format!(
            "need {} convergents for level {j_max}, have {}",
            j_max + 2,
            cf.convergents.len()
        )));
    }
    let levels = (1..=j_max)
        .step_by(2)
        .map(|j| level_certificate(cf, &cr, j))
        .collect::<Result<Vec<_>>>()?;
    let pass = levels.iter().all(LevelCertificate::holds);
    Ok(AlphaCertificate { levels, c_used: c, pass })
}

/// Least `n >= 1` with `n q + q_prev >= target`.
fn least_quotient(target: &BigInt, q: &BigInt, q_prev: &BigInt) -> BigInt {
    let need = target - q_prev;
    if need <= BigInt::zero() {
        return BigInt::one();
    }
    let (n, r) = need.div_rem(q);
    let n = if r.is_zero() { n } else { n + 1 };
    n.max(BigInt::one())
}

/// Least integer at which the exponential condition of level `j` holds.
fn exponential_threshold(ln_c: f64, qj: &BigInt, j: usize) -> Result<BigInt> {
    let a = ln_c + (j + 1) as f64 * ln_big(qj);
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("C q_j^(j+1) must exceed 1 at level {j}")));
    }
    // ln q = a + ln(a + j ln q), a contraction for ln q > 1
    let mut lq = a.max(1.0);
    for _ in 0..200 {
        lq = a + (a + j as f64 * lq).ln();
    }
    if lq > 700.0 {
        return Err(Error::InvalidArgument(format!("exponential threshold overflows at level {j}")));
    }
    let holds = |q: &BigInt| exponential_holds(ln_c, qj, j, q);
    // bracket [lo, hi] with the condition failing at lo and holding at hi,
    // then bisect; the condition is monotone on this branch
    let guess = BigInt::from_f64(lq.exp().ceil()).expect("finite").max(BigInt::from(2));
    let mut step = BigInt::one();
    let mut hi = guess.clone();
    while !holds(&hi) {
        hi = &guess + &step;
        step *= 2;
    }
    let mut step = BigInt::one();
    let mut lo = &hi - 1;
    while lo > BigInt::one() && holds(&lo) {
        lo = (&hi - &step).max(BigInt::one());
        step *= 2;
    }
    if holds(&lo) {
        return Ok(lo);
    }
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if holds(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let q = hi;
    Ok(q)
}

/// Builds the expansion `[2, n_2, n_3, ...]` greedily: at each odd level
/// the next quotient is the least one meeting conditions 1 and 3, and the
/// one after it the least meeting condition 2.
pub fn construct_alpha(c: f64, j_max: usize) -> Result<(ContinuedFraction, AlphaCertificate)> {
    if j_max % 2 == 0 {
        return Err(Error::InvalidArgument(format!("j_max must be odd, got {j_max}")));
    }
    let cr = c_rational(c)?;
    let ln_c = ln_rat(&cr);
    let mut quotients = vec![BigInt::from(2)];
    // (q_{k-1}, q_k)
    let mut q = (BigInt::one(), BigInt::from(2));
    let push = |n: BigInt, q: &mut (BigInt, BigInt), quotients: &mut Vec<BigInt>| {
        let next = &n * &q.1 + &q.0;
        quotients.push(n);
        *q = (std::mem::take(&mut q.1), next);
    };
    for j in (1..=j_max).step_by(2) {
        let qj = q.1.clone();
        let radius = admissible_radius(&cr, &qj, j)?;
        // q_j q_{j+1} > 1 / radius
        let q1: BigInt = radius.denom().div_floor(&(&qj * radius.numer())) + 1;
        let q3a = qj.pow(j as u32) + 1;
        let q3b = exponential_threshold(ln_c, &qj, j)?;
        let target = q1.max(q3a).max(q3b);
        let n = least_quotient(&target, &q.1, &q.0);
        push(n, &mut q, &mut quotients);

        let target = q.1.pow(j as u32);
        let n = least_quotient(&target, &q.1, &q.0);
        push(n, &mut q, &mut quotients);
    }
    let cf = convergents(&quotients)?;
    let cert = verify_conditions(&cf, c, j_max)?;
    Ok((cf, cert))
}
