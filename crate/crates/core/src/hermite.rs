//! Physicists' Hermite polynomials.

use num_complex::{Complex, Complex64};
use num_traits::Float;

use crate::error::{Error, Result};

/// Largest degree accepted by [`hermite_poly`].
pub const MAX_DEGREE: usize = 400;

/// `H_k(x)` by the three-term recurrence `H_{k+1} = 2x H_k − 2k H_{k−1}`.
pub fn hermite_poly(k: usize, x: Complex64) -> Result<Complex64> {
    if k > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!("Hermite degree {k} exceeds {MAX_DEGREE}")));
    }
    let mut prev = Complex64::new(1.0, 0.0);
    if k == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * x;
    for j in 1..k {
        let next = 2.0 * x * cur - 2.0 * j as f64 * prev;
        prev = cur;
        cur = next;
        if !(cur.re.is_finite() && cur.im.is_finite()) {
            return Err(Error::HermiteOverflow { k: j + 1 });
        }
    }
    if !(cur.re.is_finite() && cur.im.is_finite()) {
        return Err(Error::HermiteOverflow { k });
    }
    Ok(cur)
}

/// Reciprocal refined by two Newton steps, accurate to the working precision
/// of `T` even where the scalar's own division is not.
pub fn refined_recip<T: Float>(d: T) -> T {
    let one = T::one();
    let mut x = one / d;
    for _ in 0..2 {
        x = x + x * (one - d * x);
    }
    x
}

/// Normalized values `H_k(x) / √(2^k k!)` for `k = 0..count`.
///
/// The normalization keeps magnitudes modest for large `k`, so the sequence
/// is usable where the bare polynomials would overflow. Generic over the
/// scalar so it can run in extended precision.
pub fn hermite_normalized<T: Float>(count: usize, x: Complex<T>) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let one = T::one();
    let two = one + one;
    out.push(Complex::new(one, T::zero()));
    if count == 1 {
        return out;
    }
    out.push(x * two.sqrt());
    for k in 1..count - 1 {
        let kf = T::from(k).unwrap();
        let k1 = kf + one;
        let inv = refined_recip(k1);
        let a = (two * inv).sqrt();
        let b = (kf * inv).sqrt();
        let next = x * out[k] * a - out[k - 1] * b;
        out.push(next);
    }
    out
}
