//! Columns of the resolvent of a finite tridiagonal truncation, by the
//! Thomas algorithm, with a certificate that the truncation is invisible.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest truncation tried before giving up.
pub const MAX_TRUNCATION: usize = 1 << 22;

/// Solves `(H^{[0, N)} - z) u = delta_0` for the Jacobi matrix with diagonal
/// `diag(n)` (for `n = 0..N`) and unit off-diagonal.
///
/// For `Im z > 0` every pivot has imaginary part at most `-Im z`, so the
/// elimination needs no pivoting.
pub fn first_column(diag: impl Fn(usize) -> f64, n: usize, z: Complex64) -> Vec<Complex64> {
    // forward sweep: pivots d_i with d_0 = V_0 - z, d_i = V_i - z - 1/d_{i-1}
    let mut piv = Vec::with_capacity(n);
    for i in 0..n {
        let d = Complex64::new(diag(i), 0.0) - z;
        piv.push(if i == 0 { d } else { d - 1.0 / piv[i - 1] });
    }
    // L y = delta_0, then U u = y with U = (d_i on the diagonal, 1 above)
    let zero = Complex64::new(0.0, 0.0);
    let mut y = vec![zero; n];
    for i in 0..n {
        y[i] = if i == 0 { Complex64::new(1.0, 0.0) } else { -y[i - 1] / piv[i - 1] };
    }
    let mut u = vec![zero; n];
    for i in (0..n).rev() {
        let next = if i + 1 < n { u[i + 1] } else { zero };
        u[i] = (y[i] - next) / piv[i];
    }
    u
}

/// `G^{[k, infinity)}(k, k + j)` for `j = 0..len`, from truncations of
/// growing size until the entry at the truncation boundary is below
/// `tail_tol` relative to the largest.
pub fn halfline_column(
    potential: impl Fn(i64) -> f64,
    k: i64,
    len: usize,
    z: Complex64,
    start: usize,
    tail_tol: f64,
) -> Result<Vec<Complex64>> {
    let mut u = halfline_column_full(potential, k, z, start.max(2 * len), tail_tol)?;
    u.truncate(len);
    Ok(u)
}

/// The whole certified column; its length is the truncation size used.
pub fn halfline_column_full(
    potential: impl Fn(i64) -> f64,
    k: i64,
    z: Complex64,
    start: usize,
    tail_tol: f64,
) -> Result<Vec<Complex64>> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidArgument("truncated resolvent needs Im z > 0".into()));
    }
    let mut n = start.max(16);
    loop {
        let u = first_column(|i| potential(k + i as i64), n, z);
        let peak = u.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let tail = u[n - 1].norm();
        if tail <= tail_tol * peak {
            return Ok(u);
        }
        if n >= MAX_TRUNCATION {
            return Err(Error::TruncationNotConverged { tail: tail / peak, size: n });
        }
        n *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_chain_first_entry() {
        let z = Complex64::new(0.0, 1.0);
        let u = halfline_column(|_| 0.0, 1, 3, z, 64, 1e-15).unwrap();
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!((u[0] - Complex64::new(0.0, g)).norm() < 1e-14);
        assert!((u[1] - Complex64::new(g * g, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn solves_the_system() {
        let z = Complex64::new(0.3, 0.05);
        let v = |i: usize| (i as f64 * 0.7).sin();
        let n = 50;
        let u = first_column(v, n, z);
        for i in 0..n {
            let mut r = (Complex64::new(v(i), 0.0) - z) * u[i];
            if i > 0 {
                r += u[i - 1];
            }
            if i + 1 < n {
                r += u[i + 1];
            }
            let want = if i == 0 { 1.0 } else { 0.0 };
            assert!((r - want).norm() < 1e-12, "row {i}: {r}");
        }
    }
}
