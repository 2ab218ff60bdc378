//! Tall rectangles: minimal disks of height `h_d > π` foliated by curves
//! equidistant from a geodesic.
//!
//! For `0 < d < 1` the profile is
//! `λ_d(x) = ∫_{d₁}^x 2 dv / √(d²(1 + v²)² - (1 - v²)²)`, `d₁ = √((1-d)/(1+d))`,
//! and the surface is the bigraph `Υ_d(x, y) = (h(x, y), ±λ_d(x))` with
//! `h(x, y) = ((x - x y²), (x² + 1) y) / (x² y² + 1)` in the disk model.

use num_complex::Complex;

use crate::curvature::{ImmersionPatch, PatchJet};
use crate::elliptic::elliptic_f;
use crate::error::{domain, Result};
use crate::hyperbolic::{halfplane_to_disk_complex, mu1, Model, Point3};
use crate::jet::{Jet2, Smooth};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::{lit, Real};

fn check_d<T: Real>(op: &'static str, d: T) -> Result<()> {
    if d > T::zero() && d < T::one() {
        Ok(())
    } else {
        domain(op, format!("d = {d} must lie in (0, 1)"))
    }
}

/// Turning point `d₁ = √(1 - d) / √(1 + d)`.
pub fn d1<T: Real>(d: T) -> Result<T> {
    check_d("d1", d)?;
    Ok(((T::one() - d) / (T::one() + d)).sqrt())
}

/// `1 - d₁` without cancellation for small `d`.
fn turning_gap<T: Real>(d: T) -> T {
    let d1 = ((T::one() - d) / (T::one() + d)).sqrt();
    lit::<T>(2.0) * d / ((T::one() + d) * (T::one() + d1))
}

/// `d²(1 + v²)² - (1 - v²)²`.
fn radicand<T: Real>(d: T, v: T) -> T {
    let p = T::one() + v * v;
    let m = T::one() - v * v;
    d * d * p * p - m * m
}

fn quad_opts<T: Real>() -> QuadOptions<T> {
    QuadOptions::with_tol(lit(1e-15), lit(1e-14))
}

/// `λ_d(d₁ + δ)` for `0 ≤ δ ≤ 1 - d₁`.
///
/// The radicand factors as `(1 - d²)(v² - d₁²)(1/d₁² - v²)`; with
/// `v = d₁ + δ s²` the integrand is smooth on `[0, 1]`.
fn lambda_offset<T: Real>(d: T, delta: T) -> Result<T> {
    if delta == T::zero() {
        return Ok(T::zero());
    }
    let d1 = d1(d)?;
    let inv = d1.recip();
    let c = T::one() - d * d;
    let sd = delta.sqrt();
    let f = |s: T| {
        let q = delta * s * s;
        let v = d1 + q;
        lit::<T>(4.0) * sd / (c * (lit::<T>(2.0) * d1 + q) * (inv - v) * (inv + v)).sqrt()
    };
    Ok(integrate(f, T::zero(), T::one(), quad_opts())?.value)
}

/// `λ_d(x)` by direct quadrature, `d₁ ≤ x ≤ 1`.
pub fn lambda_quadrature<T: Real>(d: T, x: T) -> Result<T> {
    let d1 = d1(d)?;
    if !(x >= d1 && x <= T::one()) {
        return domain("lambda_quadrature", format!("x = {x} outside [d1, 1] = [{d1}, 1]"));
    }
    let delta = if x == T::one() { turning_gap(d) } else { x - d1 };
    lambda_offset(d, delta)
}

/// `λ_d(x)` on the whole annular range `d₁ ≤ x ≤ 1/d₁`, using
/// `λ_d(1/x) = h_d - λ_d(x)`.
pub fn lambda_extended<T: Real>(d: T, x: T) -> Result<T> {
    let d1 = d1(d)?;
    if x > T::one() && x <= d1.recip() {
        Ok(height_tall(d)? - lambda_quadrature(d, x.recip())?)
    } else {
        lambda_quadrature(d, x)
    }
}

/// `λ_d(x) = -(2/(1-d)) Im F(arcsin(d₁ x) | 1/d₁⁴)` for `d₁ ≤ x < 1/d₁`.
pub fn lambda_elliptic<T: Real>(d: T, x: T) -> Result<T> {
    let d1 = d1(d)?;
    if !(x >= d1 && x < d1.recip()) {
        return domain("lambda_elliptic", format!("x = {x} outside [d1, 1/d1)"));
    }
    let phi = (d1 * x).asin();
    let f = elliptic_f(phi, d1.powi(4).recip())?;
    Ok(-lit::<T>(2.0) / (T::one() - d) * f.im)
}

/// `dλ_d/dx = 2/√(d²(1 + x²)² - (1 - x²)²)`.
pub fn lambda_x_derivative<T: Real>(d: T, x: T) -> Result<T> {
    let d1 = d1(d)?;
    if !(x > d1 && x < d1.recip()) {
        return domain("lambda_x_derivative", format!("x = {x} outside (d1, 1/d1)"));
    }
    Ok(lit::<T>(2.0) / radicand(d, x).sqrt())
}

/// `dλ_d/dρ = 1/√(d² cosh²ρ - 1)` in the hyperbolic distance `ρ` from the origin.
pub fn lambda_rho_derivative<T: Real>(d: T, rho: T) -> Result<T> {
    check_d("lambda_rho_derivative", d)?;
    let c = d * rho.cosh();
    if !(c > T::one()) {
        return domain(
            "lambda_rho_derivative",
            format!("rho = {rho} must exceed arccosh(1/d) = {}", d.recip().acosh()),
        );
    }
    Ok((c * c - T::one()).sqrt().recip())
}

/// Height `h_d = 2 λ_d(1)`.
pub fn height_tall<T: Real>(d: T) -> Result<T> {
    check_d("height_tall", d)?;
    Ok(lit::<T>(2.0) * lambda_offset(d, turning_gap(d))?)
}

/// Height via the elliptic closed form.
pub fn height_tall_elliptic<T: Real>(d: T) -> Result<T> {
    Ok(lit::<T>(2.0) * lambda_elliptic(d, T::one())?)
}

/// Solves `λ_d(x) = t` for `0 ≤ t ≤ h_d/2`.
pub fn lambda_inverse<T: Real>(d: T, t: T) -> Result<T> {
    let d1 = d1(d)?;
    let half = height_tall(d)? * lit(0.5);
    if !(t >= T::zero() && t <= half) {
        return domain("lambda_inverse", format!("t = {t} outside [0, h/2 = {half}]"));
    }
    if t == T::zero() {
        return Ok(d1);
    }
    // λ ≈ c √(x - d₁) near the turning point, so solve in σ = √(x - d₁).
    let (mut lo, mut hi) = (T::zero(), turning_gap(d).sqrt());
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if lambda_offset(d, mid * mid)? < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() * hi {
            break;
        }
    }
    let s = (lo + hi) * lit(0.5);
    Ok(d1 + s * s)
}

/// Horizontal part of `Υ_d` in the disk model.
pub fn upsilon_horizontal<S: Smooth<T>, T: Real>(x: S, y: S) -> [S; 2] {
    let x2 = x * x;
    let y2 = y * y;
    let den = x2 * y2 + S::lit(1.0);
    [
        (x - x * y2) / den,
        (x2 + S::lit(1.0)) * y / den,
    ]
}

/// `Υ_d(x, y)` with the sign choosing the upper or lower half.
pub fn upsilon<T: Real>(d: T, x: T, y: T, upper: bool) -> Result<Point3<T>> {
    TallRectangle::new(d, upper)?.eval(x, y)
}

/// Recovers `(x, y)` from a disk point `(a, b)` with `a > 0` on one of the
/// circles through `±i`.
pub fn upsilon_horizontal_inverse<T: Real>(a: T, b: T) -> Result<(T, T)> {
    if !(a > T::zero()) {
        return domain("upsilon_horizontal_inverse", format!("a = {a} must be positive"));
    }
    let c = (a * a + b * b - T::one()) / (lit::<T>(2.0) * a);
    let x = circle_abscissa(c);
    Ok((x, slice_parameter(x, b)))
}

/// Positive real point `X` of the circle through `±i` centred at `c`.
fn circle_abscissa<T: Real>(c: T) -> T {
    let r = (c * c + T::one()).sqrt();
    if c < T::zero() {
        (r - c).recip()
    } else {
        c + r
    }
}

/// `y` in `(-1, 1)` with `(x² + 1) y / (x² y² + 1) = b`.
fn slice_parameter<T: Real>(x: T, b: T) -> T {
    let p = x * x + T::one();
    let disc = (p * p - lit::<T>(4.0) * b * b * x * x).max(T::zero()).sqrt();
    lit::<T>(2.0) * b / (p + disc)
}

/// Largest deviation of the horizontal slice at height `t` from the circle
/// through `±i` with centre on the real axis, sampled at `n` values of `y`.
pub fn slice_circularity_residual<T: Real>(d: T, t: T, n: usize) -> Result<T> {
    let x = lambda_inverse(d, t)?;
    let c = (x * x - T::one()) / (lit::<T>(2.0) * x);
    let mut worst = T::zero();
    for i in 0..n {
        let y = lit::<T>(-0.99) + lit::<T>(1.98) * T::from(i).unwrap() / T::from(n.max(2) - 1).unwrap();
        let [a, b] = upsilon_horizontal::<T, T>(x, y);
        let res = (a * a + b * b - lit::<T>(2.0) * c * a - T::one()).abs();
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Height of the dilated tall rectangle over a half-plane point `(x, y)`:
/// pull `μ₁ (x + i y)` back to the disk, find the leaf `X` of the foliation
/// through it, and return `λ_d(X)`. As `d → 0` this tends to `arccos y`.
pub fn regenerated_height<T: Real>(d: T, x: T, y: T) -> Result<T> {
    let m1 = mu1(d)?;
    if !(y > T::zero()) {
        return domain("regenerated_height", format!("y = {y} must be positive"));
    }
    let w = Complex::new(m1 * x, m1 * y);
    let z = halfplane_to_disk_complex(w);
    if !(z.re > T::zero()) {
        return domain("regenerated_height", format!("({x}, {y}) maps outside the lunette"));
    }
    // 1 - |z|² = 4 Im w / |i + w|², so the circle centre is c = -e with
    let iw = Complex::new(w.re, w.im + T::one());
    let e = lit::<T>(2.0) * w.im / iw.norm_sqr() / z.re;
    // 1 - X = (√(1+e²) + e - 1)/(√(1+e²) + e)
    let r = (T::one() + e * e).sqrt();
    let gap = (e + e * e / (T::one() + r)) / (r + e);
    let delta = turning_gap(d) - gap;
    if delta < -T::epsilon() * lit(8.0) {
        return domain("regenerated_height", format!("({x}, {y}) maps outside the lunette"));
    }
    lambda_offset(d, delta.max(T::zero()))
}

/// A tall rectangle with its turning point and height.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TallRectSpec<T> {
    pub d: T,
    pub d1: T,
    pub height: T,
}

impl<T: Real> TallRectSpec<T> {
    pub fn new(d: T) -> Result<Self> {
        Ok(Self {
            d,
            d1: d1(d)?,
            height: height_tall(d)?,
        })
    }

    pub fn lambda(&self, x: T) -> Result<T> {
        lambda_quadrature(self.d, x)
    }

    pub fn lambda_elliptic(&self, x: T) -> Result<T> {
        lambda_elliptic(self.d, x)
    }
}

/// Upper or lower half of `Υ_d` as an immersion patch over
/// `(d₁, 1/d₁) × (-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TallRectangle<T> {
    pub spec: TallRectSpec<T>,
    pub upper: bool,
}

impl<T: Real> TallRectangle<T> {
    pub fn new(d: T, upper: bool) -> Result<Self> {
        Ok(Self {
            spec: TallRectSpec::new(d)?,
            upper,
        })
    }

    fn check(&self, x: T, y: T) -> Result<()> {
        let d1 = self.spec.d1;
        if !(x > d1 && x < d1.recip()) {
            return domain("upsilon", format!("x = {x} outside (d1, 1/d1) = ({d1}, {})", d1.recip()));
        }
        if !(y > -T::one() && y < T::one()) {
            return domain("upsilon", format!("y = {y} outside (-1, 1)"));
        }
        Ok(())
    }

    fn sign(&self) -> T {
        if self.upper {
            T::one()
        } else {
            -T::one()
        }
    }
}

impl<T: Real> ImmersionPatch<T> for TallRectangle<T> {
    fn model(&self) -> Model {
        Model::Disk
    }

    fn eval(&self, x: T, y: T) -> Result<Point3<T>> {
        self.check(x, y)?;
        let [a, b] = upsilon_horizontal::<T, T>(x, y);
        Ok(Point3::new(a, b, self.sign() * lambda_extended(self.spec.d, x)?))
    }

    fn jet(&self, x: T, y: T) -> Result<PatchJet<T>> {
        self.check(x, y)?;
        let d = self.spec.d;
        let lam = lambda_extended(d, x)?;
        let r = radicand(d, x);
        let dr = lit::<T>(4.0) * x * (d * d * (T::one() + x * x) + T::one() - x * x);
        let l1 = lit::<T>(2.0) / r.sqrt();
        let l2 = -dr / (r * r.sqrt());
        let s = self.sign();
        let [a, b] = upsilon_horizontal(Jet2::var_u(x), Jet2::var_v(y));
        Ok([a, b, Jet2::of_u(s * lam, s * l1, s * l2)].into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{fundamental_forms, jet_consistency};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn turning_point() {
        assert!((d1(0.6f64).unwrap() - 0.5).abs() < 1e-15);
        assert!(d1(0.999_999f64).unwrap() < 1e-3);
        assert!(d1(1e-9f64).unwrap() > 1.0 - 1e-8);
        assert!(d1(1.0f64).is_err() && d1(0.0f64).is_err());
        for d in [1e-6f64, 0.1, 0.5] {
            assert!((turning_gap(d) - (1.0 - d1(d).unwrap())).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_and_elliptic_agree() {
        for i in 0..10 {
            let d = 0.05 + 0.09 * i as f64;
            let d1 = d1(d).unwrap();
            assert_eq!(lambda_quadrature(d, d1).unwrap(), 0.0);
            assert!(lambda_elliptic(d, d1).unwrap().abs() < 1e-10);
            for j in 0..10 {
                let x = d1 + (1.0 - d1) * (j as f64 + 0.5) / 10.0;
                let q = lambda_quadrature(d, x).unwrap();
                let e = lambda_elliptic(d, x).unwrap();
                assert!((q - e).abs() < 1e-8, "d={d} x={x}: {q} vs {e}");
            }
        }
        for d in [0.2f64, 0.6] {
            let a = height_tall(d).unwrap();
            let b = height_tall_elliptic(d).unwrap();
            assert!((a - b).abs() < 1e-8);
        }
        // Oracle: 25-digit quadrature of the defining integral.
        assert!((lambda_quadrature(0.5f64, 0.9).unwrap() - lambda_elliptic(0.5, 0.9).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn heights() {
        let hs: Vec<f64> = (1..=9).map(|i| height_tall(i as f64 / 10.0).unwrap()).collect();
        assert!(hs.windows(2).all(|w| w[1] > w[0]));
        assert!(hs.iter().all(|&h| h > PI));
        let h = height_tall(0.01f64).unwrap();
        assert!(h > PI && h < PI + 0.2);
        assert!(height_tall(0.99f64).unwrap() > 2.0 * PI);
        for d in [0.1f64, 0.5, 0.9] {
            assert!(2.0 * lambda_quadrature(d, 1.0).unwrap() > PI);
        }
    }

    #[test]
    fn extension_reaches_full_height() {
        let d = 0.4f64;
        let s = TallRectSpec::new(d).unwrap();
        let top = lambda_extended(d, 1.0 / s.d1).unwrap();
        assert!((top - s.height).abs() < 1e-12);
        let e = lambda_elliptic(d, 1.3).unwrap();
        assert!((lambda_extended(d, 1.3).unwrap() - e).abs() < 1e-8);
    }

    #[test]
    fn rho_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let d = rng.gen_range(0.05..0.95f64);
            let d1 = d1(d).unwrap();
            let x = rng.gen_range(d1 + 1e-3 * (1.0 - d1)..1.0 - 1e-6);
            let rho = 2.0 * x.atanh();
            let chain = lambda_rho_derivative(d, rho).unwrap() * 2.0 / (1.0 - x * x);
            let direct = lambda_x_derivative(d, x).unwrap();
            assert!((chain - direct).abs() < 1e-10 * direct.max(1.0), "{chain} vs {direct}");
        }
        let d = 0.5f64;
        let rho0 = (1.0 / d).acosh();
        assert!(lambda_rho_derivative(d, rho0 + 1e-9).unwrap() > 1e3);
        assert!(lambda_rho_derivative(d, rho0).is_err());
        assert!(lambda_rho_derivative(d, rho0 + 0.1).unwrap() > lambda_rho_derivative(d, rho0 + 0.2).unwrap());
    }

    #[test]
    fn upsilon_examples_and_minimality() {
        let d = 0.3f64;
        let s = TallRectSpec::new(d).unwrap();
        let x = 0.9;
        let p = upsilon(d, x, 0.0, false).unwrap();
        assert_eq!((p.x, p.y), (x, 0.0));
        assert!((p.t + lambda_quadrature(d, x).unwrap()).abs() < 1e-15);
        assert!(upsilon(d, s.d1, 0.0, true).is_err());
        let [a, b] = upsilon_horizontal::<f64, f64>(s.d1, 0.0);
        assert_eq!((a, b), (s.d1, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [0.3f64, 0.7] {
            for upper in [true, false] {
                let patch = TallRectangle::new(d, upper).unwrap();
                let d1 = patch.spec.d1;
                for _ in 0..200 {
                    let x = rng.gen_range(d1 + 0.01 * (1.0 - d1)..0.99);
                    let y = rng.gen_range(-0.95..0.95);
                    let r = fundamental_forms(&patch, x, y).unwrap();
                    assert!(r.h.abs() < 1e-6, "d={d} x={x} y={y}: H={}", r.h);
                }
                assert!(jet_consistency(&patch, 0.5 * (1.0 + d1), 0.3, 1e-4).unwrap() < 1e-6);
            }
        }
    }

    #[test]
    fn horizontal_inverse_and_slices() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let x = rng.gen_range(0.05..1.0f64);
            let y = rng.gen_range(-0.99..0.99);
            let [a, b] = upsilon_horizontal::<f64, f64>(x, y);
            let (xr, yr) = upsilon_horizontal_inverse(a, b).unwrap();
            assert!((xr - x).abs() < 1e-12 && (yr - y).abs() < 1e-12);
        }
        for d in [0.3f64, 0.7] {
            let h = height_tall(d).unwrap();
            for t in [0.1, 0.4 * h] {
                let x = lambda_inverse(d, t).unwrap();
                assert!((lambda_quadrature(d, x).unwrap() - t).abs() < 1e-12);
                assert!(slice_circularity_residual(d, t, 50).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn regenerates_parabolic_graph() {
        let d = 1e-3f64;
        let mut worst = 0.0f64;
        for i in 0..9 {
            for j in 1..10 {
                let x = -2.0 + 0.5 * i as f64;
                let y = 0.1 * j as f64;
                let t = regenerated_height(d, x, y).unwrap();
                worst = worst.max((t - y.acos()).abs());
            }
        }
        assert!(worst < 0.05, "{worst}");
    }

    #[test]
    fn regeneration_defect_is_second_order_in_d() {
        use crate::jacobi::{second_order_closed, SeriesKind};
        let d = 1e-3f64;
        for (x, y) in [(0.0, 0.3), (1.0, 0.5), (-2.0, 0.9)] {
            let defect = regenerated_height(d, x, y).unwrap() - y.acos();
            let leading = d * d * second_order_closed(SeriesKind::Tall, x, y);
            assert!((defect / leading - 1.0).abs() < 1e-3, "{defect} vs {leading}");
        }
    }
}
