//! Exact rational evaluation of the monodromy for short periods.
//!
//! Potential values are taken as the exact binary rationals they are stored
//! as, so the only rounding is in computing the cosines themselves.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operator::OperatorSpec;

/// Longest period accepted by the exact path.
pub const EXACT_MAX_PERIOD: usize = 8;

/// Exact value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// `Tr(T_q ... T_1)` at the rational energy `e`, in exact arithmetic.
pub fn discriminant_exact(spec: &OperatorSpec, e: &BigRational) -> Result<BigRational> {
    let q = spec.period();
    if q > EXACT_MAX_PERIOD {
        return Err(Error::InvalidArgument(format!(
            "exact path supports period <= {EXACT_MAX_PERIOD}, got {q}"
        )));
    }
    let one = BigRational::one();
    let zero = BigRational::zero();
    let (mut a11, mut a12, mut a21, mut a22) = (one.clone(), zero.clone(), zero, one);
    for &v in spec.period_values() {
        let c = e - rational_from_f64(v);
        let n11 = &c * &a11 - &a21;
        let n12 = &c * &a12 - &a22;
        a21 = a11;
        a22 = a12;
        a11 = n11;
        a12 = n12;
    }
    Ok(a11 + a22)
}

/// `D(E) / E^q` at an integer energy, exactly.
pub fn leading_ratio(spec: &OperatorSpec, e: i64) -> Result<BigRational> {
    let er = BigRational::from_integer(BigInt::from(e));
    let d = discriminant_exact(spec, &er)?;
    let eq = num_traits::pow(er, spec.period());
    Ok(d / eq)
}
