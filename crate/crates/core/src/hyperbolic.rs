//! The Poincaré disk and upper half-plane models of H², the Möbius map
//! between them, horizontal dilations, and the product metric on H²×R.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{lit, Real};

/// Which model of H² a pair of horizontal coordinates refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    Disk,
    HalfPlane,
}

/// A point of H² tagged with its model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2H<T> {
    u: T,
    v: T,
    model: Model,
}

impl<T: Real> Point2H<T> {
    pub fn new(u: T, v: T, model: Model) -> Result<Self> {
        let ok = match model {
            Model::Disk => u * u + v * v < T::one(),
            Model::HalfPlane => v > T::zero(),
        };
        if !ok || !u.is_finite() || !v.is_finite() {
            return domain("Point2H::new", format!("({u}, {v}) is not inside the {model:?} model"));
        }
        Ok(Self { u, v, model })
    }

    pub fn disk(u: T, v: T) -> Result<Self> {
        Self::new(u, v, Model::Disk)
    }

    pub fn half_plane(u: T, v: T) -> Result<Self> {
        Self::new(u, v, Model::HalfPlane)
    }

    pub fn u(&self) -> T {
        self.u
    }

    pub fn v(&self) -> T {
        self.v
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn as_complex(&self) -> Complex<T> {
        Complex::new(self.u, self.v)
    }

    /// Re-expresses the point in the requested model.
    pub fn to_model(self, model: Model) -> Result<Self> {
        match (self.model, model) {
            (a, b) if a == b => Ok(self),
            (Model::Disk, Model::HalfPlane) => disk_to_halfplane(self),
            _ => halfplane_to_disk(self),
        }
    }
}

/// A point of H²×R (horizontal coordinates in some model) or of ambient R³.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub t: T,
}

impl<T: Real> Point3<T> {
    pub fn new(x: T, y: T, t: T) -> Self {
        Self { x, y, t }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.t]
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Euclidean distance in the coordinate chart.
    pub fn chart_distance(&self, o: &Self) -> T {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2) + (self.t - o.t).powi(2)).sqrt()
    }
}

/// The Möbius map `g(z) = i (1 - z) / (1 + z)` from the disk to the half-plane.
pub fn disk_to_halfplane<T: Real>(z: Point2H<T>) -> Result<Point2H<T>> {
    if z.model != Model::Disk {
        return domain("disk_to_halfplane", "point is not in the disk model");
    }
    let zc = z.as_complex();
    let one = Complex::new(T::one(), T::zero());
    let w = Complex::<T>::i() * (one - zc) / (one + zc);
    // Im w = (1 - |z|²)/|1 + z|² computed without cancellation.
    let im = (T::one() - zc.norm_sqr()) / (one + zc).norm_sqr();
    Point2H::half_plane(w.re, im)
}

/// Inverse of [`disk_to_halfplane`]: `z = (i - w) / (i + w)`.
pub fn halfplane_to_disk<T: Real>(w: Point2H<T>) -> Result<Point2H<T>> {
    if w.model != Model::HalfPlane {
        return domain("halfplane_to_disk", "point is not in the half-plane model");
    }
    let z = halfplane_to_disk_complex(w.as_complex());
    Point2H::disk(z.re, z.im)
}

/// Raw complex form of the inverse Möbius map (no domain checks).
pub fn halfplane_to_disk_complex<T: Real>(w: Complex<T>) -> Complex<T> {
    let i = Complex::<T>::i();
    (i - w) / (i + w)
}

/// `1 - |z|` for `z = (i - w)/(i + w)`, evaluated without cancellation.
pub fn disk_gap_of_halfplane<T: Real>(w: Complex<T>) -> T {
    let i = Complex::<T>::i();
    let one_minus_sq = lit::<T>(4.0) * w.im / (i + w).norm_sqr();
    let r = (T::one() - one_minus_sq).max(T::zero()).sqrt();
    one_minus_sq / (T::one() + r)
}

/// Horizontal dilation `T_s(w) = s w` of the half-plane.
pub fn horizontal_dilation<T: Real>(w: Point2H<T>, s: T) -> Result<Point2H<T>> {
    if w.model != Model::HalfPlane {
        return domain("horizontal_dilation", "point is not in the half-plane model");
    }
    if !(s > T::zero()) {
        return domain("horizontal_dilation", format!("scale {s} must be positive"));
    }
    Point2H::half_plane(w.u * s, w.v * s)
}

/// Hyperbolic distance between two points (any models).
pub fn distance<T: Real>(a: Point2H<T>, b: Point2H<T>) -> Result<T> {
    let a = a.to_model(Model::HalfPlane)?;
    let b = b.to_model(Model::HalfPlane)?;
    let d2 = (a.u - b.u).powi(2) + (a.v - b.v).powi(2);
    Ok((T::one() + d2 / (lit::<T>(2.0) * a.v * b.v)).acosh())
}

/// `μ₀(k) = (1 + √k - √(1+k)) / (1 - √k + √(1+k))`, the half-plane height of
/// the catenoid neck point `r₀(k)` under the Möbius map.
pub fn mu0<T: Real>(k: T) -> Result<T> {
    if !(k > T::zero()) {
        return domain("mu0", format!("k = {k} must be positive"));
    }
    let sk = k.sqrt();
    let s1 = (T::one() + k).sqrt();
    // 1 + √k - √(1+k) = √k + (1 - √(1+k)) = √k - k/(1 + √(1+k))
    let num = sk - k / (T::one() + s1);
    Ok(num / (T::one() - sk + s1))
}

/// `μ₁(d) = (√(1+d) - √(1-d)) / (√(1+d) + √(1-d))`, the modulus of the
/// imaginary point `g(d₁)` for the tall rectangle with parameter `d`.
pub fn mu1<T: Real>(d: T) -> Result<T> {
    if !(d > T::zero() && d < T::one()) {
        return domain("mu1", format!("d = {d} must lie in (0, 1)"));
    }
    let (p, m) = ((T::one() + d).sqrt(), (T::one() - d).sqrt());
    // p - m = 2d/(p + m)
    Ok(lit::<T>(2.0) * d / (p + m).powi(2))
}

/// Metric tensor and Christoffel symbols of H²×R at a point.
///
/// `gamma[k][i][j]` is `Γᵏᵢⱼ`; index 2 is the vertical direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricData<T> {
    pub g: [[T; 3]; 3],
    pub gamma: [[[T; 3]; 3]; 3],
}

impl<T: Real> MetricData<T> {
    /// Conformal factor of the horizontal part, `g₁₁ = g₂₂`.
    pub fn factor(&self) -> T {
        self.g[0][0]
    }

    pub fn dot(&self, a: &[T; 3], b: &[T; 3]) -> T {
        self.g[0][0] * (a[0] * b[0] + a[1] * b[1]) + self.g[2][2] * a[2] * b[2]
    }

    pub fn inverse(&self) -> [[T; 3]; 3] {
        let mut inv = [[T::zero(); 3]; 3];
        inv[0][0] = self.g[0][0].recip();
        inv[1][1] = self.g[1][1].recip();
        inv[2][2] = self.g[2][2].recip();
        inv
    }
}

fn admissible<T: Real>(x: T, y: T, model: Model) -> bool {
    match model {
        Model::Disk => x * x + y * y < T::one(),
        Model::HalfPlane => y > T::zero(),
    }
}

/// Metric `dσ² = dρ² + dt²` and its Christoffel symbols in closed form.
pub fn metric_at<T: Real>(p: Point3<T>, model: Model) -> Result<MetricData<T>> {
    if !admissible(p.x, p.y, model) {
        return domain(
            "metric_at",
            format!("({}, {}) is not inside the {model:?} model", p.x, p.y),
        );
    }
    // g = e^{2φ}(du² + dv²) + dt²; (φ_u, φ_v) are the log-derivatives of the factor.
    let (factor, phi_u, phi_v) = match model {
        Model::Disk => {
            let w = T::one() - p.x * p.x - p.y * p.y;
            let two = lit::<T>(2.0);
            (lit::<T>(4.0) / (w * w), two * p.x / w, two * p.y / w)
        }
        Model::HalfPlane => (p.y.powi(-2), T::zero(), -p.y.recip()),
    };
    let z = T::zero();
    let mut g = [[z; 3]; 3];
    g[0][0] = factor;
    g[1][1] = factor;
    g[2][2] = T::one();
    let mut gamma = [[[z; 3]; 3]; 3];
    gamma[0][0][0] = phi_u;
    gamma[0][0][1] = phi_v;
    gamma[0][1][0] = phi_v;
    gamma[0][1][1] = -phi_u;
    gamma[1][0][0] = -phi_v;
    gamma[1][0][1] = phi_u;
    gamma[1][1][0] = phi_u;
    gamma[1][1][1] = phi_v;
    Ok(MetricData { g, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Jet2, Smooth};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_disk(rng: &mut ChaCha8Rng) -> Point2H<f64> {
        let r = 0.97 * rng.gen::<f64>().sqrt();
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        Point2H::disk(r * a.cos(), r * a.sin()).unwrap()
    }

    #[test]
    fn mobius_examples() {
        let w = disk_to_halfplane(Point2H::disk(0.0f64, 0.0).unwrap()).unwrap();
        assert!(w.u().abs() < 1e-16 && (w.v() - 1.0).abs() < 1e-16);
        let w = disk_to_halfplane(Point2H::disk(0.5f64, 0.0).unwrap()).unwrap();
        assert!(w.u().abs() < 1e-16 && (w.v() - 1.0 / 3.0).abs() < 1e-16);
        // z = -i: i(1+i)/(1-i) = -1 sits on the ideal boundary, so the
        // half-plane point is rejected; the raw complex value is still -1.
        let z = Complex::new(0.0f64, -1.0);
        let one = Complex::new(1.0, 0.0);
        let w = Complex::<f64>::i() * (one - z) / (one + z);
        assert!((w - Complex::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(Point2H::disk(0.0, -1.0).is_err());
    }

    #[test]
    fn inverse_examples() {
        let z = halfplane_to_disk(Point2H::half_plane(0.0f64, 1.0).unwrap()).unwrap();
        assert!(z.u().abs() < 1e-16 && z.v().abs() < 1e-16);
        for t in [0.1, 0.7, 1.2, 1.5] {
            let c: f64 = f64::cos(t);
            let z = halfplane_to_disk(Point2H::half_plane(0.0, c).unwrap()).unwrap();
            assert!((z.u() - (1.0 - c) / (1.0 + c)).abs() < 1e-15);
            assert!(z.v().abs() < 1e-15);
        }
        assert!(halfplane_to_disk(Point2H::disk(0.1, 0.1).unwrap()).is_err());
        assert!(Point2H::half_plane(0.0, 0.0).is_err());
    }

    #[test]
    fn round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z = random_disk(&mut rng);
            let back = halfplane_to_disk(disk_to_halfplane(z).unwrap()).unwrap();
            assert!((back.as_complex() - z.as_complex()).norm() < 1e-14);
        }
        for _ in 0..100 {
            let w = Point2H::half_plane(rng.gen_range(-5.0..5.0), rng.gen_range(0.05..5.0)).unwrap();
            let back = disk_to_halfplane(halfplane_to_disk(w).unwrap()).unwrap();
            assert!((back.as_complex() - w.as_complex()).norm() < 1e-13 * (1.0 + w.as_complex().norm()));
        }
    }

    #[test]
    fn dilation_is_isometry() {
        let w = Point2H::half_plane(0.3, 0.8).unwrap();
        assert_eq!(horizontal_dilation(w, 1.0).unwrap(), w);
        let i3 = horizontal_dilation(Point2H::half_plane(0.0, 1.0).unwrap(), 3.0).unwrap();
        assert_eq!((i3.u(), i3.v()), (0.0, 3.0));
        assert!(horizontal_dilation(w, 0.0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = Point2H::half_plane(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0)).unwrap();
            let b = Point2H::half_plane(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0)).unwrap();
            let s = rng.gen_range(0.1..10.0);
            let d0: f64 = distance(a, b).unwrap();
            let d1 = distance(horizontal_dilation(a, s).unwrap(), horizontal_dilation(b, s).unwrap()).unwrap();
            assert!((d0 - d1).abs() < 1e-12);
        }
    }

    #[test]
    fn mu_values() {
        assert!((mu0(9.0f64 / 16.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(mu0(1e-12).unwrap() < 1e-5);
        assert!(mu0(0.0).is_err());
        for k in [0.1, 1.0, 10.0] {
            let r0 = (k + 1.0f64).sqrt() - k.sqrt();
            let w = disk_to_halfplane(Point2H::disk(r0, 0.0).unwrap()).unwrap();
            assert!((w.v() - mu0(k).unwrap()).abs() < 1e-14);
        }
        assert!((mu1(0.6f64).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(mu1(1e-12).unwrap() < 1e-11);
        assert!(mu1(1.0).is_err() && mu1(0.0).is_err());
        let mut prev = 0.0;
        for i in 1..100 {
            let m = mu1(i as f64 / 100.0).unwrap();
            assert!(m > prev && m < 1.0);
            prev = m;
        }
        let mut prev = 0.0;
        for i in 0..60 {
            let m = mu0(10f64.powf(-6.0 + 0.2 * i as f64)).unwrap();
            assert!(m > prev && m < 1.0);
            prev = m;
        }
    }

    #[test]
    fn metric_examples() {
        let m = metric_at(Point3::new(0.0, 1.0, 2.0), Model::HalfPlane).unwrap();
        assert_eq!(m.g, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let m = metric_at(Point3::new(0.0, 0.0, -1.0), Model::Disk).unwrap();
        assert_eq!(m.g, [[4.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(metric_at(Point3::new(0.6, 0.8, 0.0), Model::Disk).is_err());
        assert!(metric_at(Point3::new(0.0, -0.1, 0.0), Model::HalfPlane).is_err());
    }

    /// Conformal factor written independently as a jet expression; its exact
    /// partials feed the metric-compatibility identity.
    fn factor_jet(x: f64, y: f64, model: Model) -> Jet2<f64> {
        let (u, v) = (Jet2::var_u(x), Jet2::var_v(y));
        match model {
            Model::Disk => Jet2::lit(4.0) / (Jet2::lit(1.0) - u.sq() - v.sq()).sq(),
            Model::HalfPlane => v.sq().recip(),
        }
    }

    #[test]
    fn christoffels_are_metric_compatible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for model in [Model::Disk, Model::HalfPlane] {
            for _ in 0..50 {
                let (x, y) = match model {
                    Model::Disk => {
                        let p = random_disk(&mut rng);
                        (p.u(), p.v())
                    }
                    Model::HalfPlane => (rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0)),
                };
                let m = metric_at(Point3::new(x, y, 0.3), model).unwrap();
                let fj = factor_jet(x, y, model);
                // ∂_k g_ij with k in {u, v, t}
                let dfac = [fj.du, fj.dv, 0.0];
                for k in 0..3 {
                    for i in 0..3 {
                        for j in 0..3 {
                            let dg = if i == j && i < 2 { dfac[k] } else { 0.0 };
                            let mut rhs = 0.0;
                            for l in 0..3 {
                                rhs += m.gamma[l][k][i] * m.g[l][j] + m.gamma[l][k][j] * m.g[i][l];
                            }
                            let scale = 1.0 + dg.abs();
                            assert!((dg - rhs).abs() < 1e-12 * scale, "model {model:?} k{k} i{i} j{j}");
                        }
                    }
                }
                for k in 0..3 {
                    for i in 0..3 {
                        for j in 0..3 {
                            assert_eq!(m.gamma[k][i][j], m.gamma[k][j][i]);
                            if i == 2 || j == 2 || k == 2 {
                                assert_eq!(m.gamma[k][i][j], 0.0);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mobius_is_an_isometry() {
        // Pull back the half-plane metric by finite differences of g.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        for _ in 0..50 {
            let z = random_disk(&mut rng);
            let w0 = disk_to_halfplane(z).unwrap();
            let fac_h = w0.v().powi(-2);
            let fac_d = 4.0 / (1.0 - z.as_complex().norm_sqr()).powi(2);
            for dir in [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(0.6, -0.8)] {
                let zp = z.as_complex() + dir * h;
                let zm = z.as_complex() - dir * h;
                let wp = disk_to_halfplane(Point2H::disk(zp.re, zp.im).unwrap()).unwrap();
                let wm = disk_to_halfplane(Point2H::disk(zm.re, zm.im).unwrap()).unwrap();
                let dw = (wp.as_complex() - wm.as_complex()) / (2.0 * h);
                let pulled = fac_h * dw.norm_sqr();
                assert!((pulled - fac_d).abs() < 1e-8 * fac_d, "{pulled} vs {fac_d}");
            }
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let w = disk_to_halfplane(Point2H::disk(0.5f32, 0.0).unwrap()).unwrap();
        assert!((w.v() - 1.0 / 3.0).abs() < 1e-6);
        assert!((mu1(0.6f32).unwrap() - 1.0 / 3.0).abs() < 1e-6);
    }
}
