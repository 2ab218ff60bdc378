//! Incomplete elliptic integral of the first kind through Carlson's
//! symmetric form, valid for complex arguments.

use num_complex::Complex;

use crate::error::{domain, Result};
use crate::scalar::{lit, Real};

/// Carlson's `R_F(x, y, z)` by the duplication algorithm.
///
/// Square roots are principal, so at most one argument may sit on the
/// negative real axis; a negative real argument is read as `-a + 0i`.
pub fn carlson_rf<T: Real>(x: Complex<T>, y: Complex<T>, z: Complex<T>) -> Complex<T> {
    let three = lit::<T>(3.0);
    let quarter = lit::<T>(0.25);
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + z) / three;
    let mut a = a0;
    // Carlson (1995): iterate until 4^-m Q < |A_m| with Q = (3 r)^(-1/6) max |A0 - .|
    let r = T::epsilon();
    let q = (three * r).powf(lit(-1.0 / 6.0))
        * (a0 - x).norm().max((a0 - y).norm()).max((a0 - z).norm());
    let mut scale = T::one();
    for _ in 0..64 {
        if q * scale < a.norm() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sx * sz + sy * sz;
        x = (x + lam) * quarter;
        y = (y + lam) * quarter;
        z = (z + lam) * quarter;
        a = (a + lam) * quarter;
        scale *= quarter;
    }
    let xd = (a0 - x0) * scale / a;
    let yd = (a0 - y0) * scale / a;
    let zd = -(xd + yd);
    let e2 = xd * yd - zd * zd;
    let e3 = xd * yd * zd;
    let one = Complex::new(T::one(), T::zero());
    let series = one - e2 * lit::<T>(0.1) + e3 / lit::<T>(14.0) + e2 * e2 / lit::<T>(24.0)
        - e2 * e3 * lit::<T>(3.0 / 44.0);
    series / a.sqrt()
}

/// `F(φ | m) = ∫_0^φ (1 - m sin²θ)^(-1/2) dθ` for `|φ| < π/2`.
///
/// `m` is the parameter (square of the modulus). For `m sin²φ > 1` the value
/// is complex, continued from `m sin²φ < 1` with `1 - m sin²φ` approached
/// from the upper half plane.
pub fn elliptic_f<T: Real>(phi: T, m: T) -> Result<Complex<T>> {
    if !(phi.abs() < T::FRAC_PI_2()) {
        return domain("elliptic_f", format!("|phi| = {} must be below pi/2", phi.abs()));
    }
    if phi == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let (s, c) = phi.sin_cos();
    let x = Complex::new(c * c, T::zero());
    let y = Complex::new(T::one() - m * s * s, T::zero());
    let z = Complex::new(T::one(), T::zero());
    Ok(carlson_rf(x, y, z) * s)
}
