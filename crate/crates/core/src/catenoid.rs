//! Rotational catenoids of H²×R and the unduloid-type surfaces of R³ that
//! contain them.
//!
//! The family is indexed by `k > 0`, the value of the first integral
//! `(1 - r²)²/(4r²) + (r'/r)²` of the profile equation
//! `4 r r'' - 4 r'² + r⁴ - 1 = 0`. The angular speed of the conformal
//! parametrization is `√k`.

use num_complex::Complex;

use crate::curvature::{ImmersionPatch, PatchJet};
use crate::error::{domain, Result};
use crate::hyperbolic::{disk_gap_of_halfplane, mu0, Model, Point3};
use crate::jet::{Jet2, Smooth};
use crate::ode::{self, OdeOptions};
use crate::quadrature::{integrate, QuadOptions};
use crate::scalar::{lit, Real};

/// `(1 - r²)²/(4r²) + (r'/r)²`.
pub fn first_integral<T: Real>(r: T, rprime: T) -> Result<T> {
    if !(r > T::zero()) {
        return domain("first_integral", format!("r = {r} must be positive"));
    }
    let a = (T::one() - r * r) / (lit::<T>(2.0) * r);
    let b = rprime / r;
    Ok(a * a + b * b)
}

fn check_k<T: Real>(op: &'static str, k: T) -> Result<()> {
    if k > T::zero() && k.is_finite() {
        Ok(())
    } else {
        domain(op, format!("k = {k} must be positive"))
    }
}

/// Neck radius `√(k+1) - √k`, written as `1/(√(k+1) + √k)`.
pub fn neck_radius<T: Real>(k: T) -> T {
    ((k + T::one()).sqrt() + k.sqrt()).recip()
}

/// Largest radius of the profile, `√(k+1) + √k`.
pub fn max_radius<T: Real>(k: T) -> T {
    (k + T::one()).sqrt() + k.sqrt()
}

/// `1 - r₀(k)` without cancellation for small `k`.
fn neck_gap<T: Real>(k: T) -> T {
    let s1 = (k + T::one()).sqrt();
    (k.sqrt() + k / (s1 + T::one())) / (s1 + k.sqrt())
}

/// Right-hand side of the profile equation as a first-order system `[r, r']`.
pub fn profile_rhs<T: Real>(_t: T, y: &[T; 2]) -> [T; 2] {
    let (r, rp) = (y[0], y[1]);
    [rp, profile_second_derivative(r, rp)]
}

/// `r'' = (4 r'² - r⁴ + 1) / (4 r)`.
pub fn profile_second_derivative<T: Real>(r: T, rp: T) -> T {
    let four = lit::<T>(4.0);
    (four * rp * rp - r.powi(4) + T::one()) / (four * r)
}

/// One sample of the profile `r(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample<T> {
    pub t: T,
    pub r: T,
    pub rprime: T,
}

/// An integrated catenoid profile together with its height and modulus.
#[derive(Debug, Clone)]
pub struct CatenoidProfile<T> {
    pub k: T,
    pub r0: T,
    pub samples: Vec<ProfileSample<T>>,
    pub height: T,
    pub modulus_estimate: T,
    options: OdeOptions<T>,
}

impl<T: Real> CatenoidProfile<T> {
    /// State `(r, r', r'')` at any `t` in the integrated range, reached by
    /// advancing from the nearest accepted sample.
    pub fn state_at(&self, t: T) -> Result<(T, T, T)> {
        let (first, last) = (self.samples[0].t, self.samples[self.samples.len() - 1].t);
        if !(t >= first && t <= last) {
            return domain(
                "CatenoidProfile::state_at",
                format!("t = {t} outside the integrated range [{first}, {last}]"),
            );
        }
        let idx = match self
            .samples
            .binary_search_by(|s| s.t.partial_cmp(&t).expect("finite sample times"))
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let s = self.samples[idx];
        let y = if s.t == t {
            [s.r, s.rprime]
        } else {
            ode::advance(&profile_rhs, s.t, &[s.r, s.rprime], t - s.t, self.options.h_max)
        };
        Ok((y[0], y[1], profile_second_derivative(y[0], y[1])))
    }

    /// Largest deviation of the first integral from `k` over all samples.
    pub fn first_integral_drift(&self) -> T {
        self.samples
            .iter()
            .map(|s| (first_integral(s.r, s.rprime).unwrap_or(T::nan()) - self.k).abs())
            .fold(T::zero(), T::max)
    }

    /// Times of interior minima of `r` (where `r'` changes sign from − to +),
    /// refined by Newton's method on `r'`.
    pub fn minima(&self) -> Vec<T> {
        self.extrema(true)
    }

    /// Times of interior maxima of `r`.
    pub fn maxima(&self) -> Vec<T> {
        self.extrema(false)
    }

    fn extrema(&self, minima: bool) -> Vec<T> {
        let mut out = Vec::new();
        for w in self.samples.windows(2) {
            let (a, b) = (w[0], w[1]);
            let crossing = if minima {
                a.rprime < T::zero() && b.rprime >= T::zero()
            } else {
                a.rprime > T::zero() && b.rprime <= T::zero()
            };
            if !crossing {
                continue;
            }
            let mut tau = (b.t - a.t) * a.rprime.abs() / (a.rprime.abs() + b.rprime.abs());
            for _ in 0..30 {
                let y = ode::advance(&profile_rhs, a.t, &[a.r, a.rprime], tau, self.options.h_max);
                let step = y[1] / profile_second_derivative(y[0], y[1]);
                tau -= step;
                if step.abs() < T::epsilon() * lit(16.0) * (T::one() + a.t.abs()) {
                    break;
                }
            }
            out.push(a.t + tau);
        }
        out
    }
}

/// Default integrator settings for catenoid profiles.
pub fn profile_options<T: Real>() -> OdeOptions<T> {
    OdeOptions {
        rtol: lit(1e-13),
        atol: lit(1e-14),
        monitor_tol: lit(1e-10),
        h_init: lit(1e-3),
        h_max: lit(0.02),
        h_min: lit(1e-12),
        max_steps: 5_000_000,
    }
}

/// Integrates the profile from the neck `r(0) = r₀`, `r'(0) = 0` up to
/// `t_max`, using the first integral as the accept/reject monitor.
pub fn integrate_profile<T: Real>(k: T, t_max: T, options: OdeOptions<T>) -> Result<CatenoidProfile<T>> {
    check_k("integrate_profile", k)?;
    if !(t_max > T::zero()) {
        return domain("integrate_profile", format!("t_max = {t_max} must be positive"));
    }
    let r0 = neck_radius(k);
    let monitor = |y: &[T; 2]| first_integral(y[0], y[1]).unwrap_or(T::nan());
    let traj = ode::integrate(profile_rhs, T::zero(), [r0, T::zero()], t_max, options, monitor)?;
    let samples = traj
        .into_iter()
        .map(|s| ProfileSample {
            t: s.t,
            r: s.y[0],
            rprime: s.y[1],
        })
        .collect();
    let h = height(k)?;
    Ok(CatenoidProfile {
        k,
        r0,
        samples,
        height: h,
        modulus_estimate: (-k.sqrt() * h).exp(),
        options,
    })
}

fn quad_opts<T: Real>() -> QuadOptions<T> {
    QuadOptions::with_tol(lit(1e-15), lit(1e-14))
}

/// `t` as a function of `δ = r - r₀` along the lower branch of the bigraph.
///
/// With `u = r₀ + δ s²` the integrand `2/√(4k u² - (1-u²)²)` becomes
/// `4√δ / √((2√(k+1) + δs²)(2√k - δs²)(2r₀ + δs²))`, smooth on `[0, 1]`.
fn t_of_offset<T: Real>(k: T, delta: T) -> Result<T> {
    if delta == T::zero() {
        return Ok(T::zero());
    }
    let two = lit::<T>(2.0);
    let (a, b, c) = (two * (k + T::one()).sqrt(), two * k.sqrt(), two * neck_radius(k));
    let sd = delta.sqrt();
    let f = |s: T| {
        let q = delta * s * s;
        lit::<T>(4.0) * sd / ((a + q) * (b - q) * (c + q)).sqrt()
    };
    Ok(integrate(f, T::zero(), T::one(), quad_opts())?.value)
}

/// `t_k(r) = ∫_{r₀}^r 2 du / √(4k u² - (1 - u²)²)` for `r₀ ≤ r ≤ 1`.
pub fn t_of_r<T: Real>(k: T, r: T) -> Result<T> {
    check_k("t_of_r", k)?;
    let r0 = neck_radius(k);
    if !(r >= r0 && r <= T::one()) {
        return domain("t_of_r", format!("r = {r} outside [r0, 1] = [{r0}, 1]"));
    }
    let delta = if r == T::one() { neck_gap(k) } else { r - r0 };
    t_of_offset(k, delta)
}

/// Height of the catenoid, `h(k) = 2 t_k(1)`.
pub fn height<T: Real>(k: T) -> Result<T> {
    check_k("height", k)?;
    Ok(lit::<T>(2.0) * t_of_offset(k, neck_gap(k))?)
}

/// `R_k = exp(-√k h(k))`: the inner radius of the annulus `{R < |z| < 1}`
/// conformally equivalent to the catenoid.
pub fn conformal_modulus<T: Real>(k: T) -> Result<T> {
    Ok((-k.sqrt() * height(k)?).exp())
}

/// Full period of the profile, `2 ∫_{r₀}^{r_max} 2 du / √(4k u² - (1-u²)²)`.
pub fn period<T: Real>(k: T) -> Result<T> {
    check_k("period", k)?;
    let two = lit::<T>(2.0);
    let r0 = neck_radius(k);
    let rmax = max_radius(k);
    let sk = k.sqrt();
    // radicand = (u - r₀)(u + r_max)(r_max - u)(u + r₀)
    let mid = (r0 + rmax) * lit(0.5);
    let dl = mid - r0;
    let right = |s: T| {
        let q = dl * s * s;
        let u = rmax - q;
        lit::<T>(4.0) * dl.sqrt() / ((u - r0) * (u + rmax) * (u + r0)).sqrt()
    };
    // On the left branch r_max - u = (r_max - r₀) - q = 2√k - q.
    let left = |s: T| {
        let q = dl * s * s;
        let u = r0 + q;
        lit::<T>(4.0) * dl.sqrt() / ((u + rmax) * (two * sk - q) * (u + r0)).sqrt()
    };
    let a = integrate(left, T::zero(), T::one(), quad_opts())?.value;
    let b = integrate(right, T::zero(), T::one(), quad_opts())?.value;
    Ok(two * (a + b))
}

/// A catenoid with its integrated profile, usable as an immersion patch
/// `(θ, t) ↦ (r(t) e^{i√k θ}, t)` in the disk model.
#[derive(Debug, Clone)]
pub struct Catenoid<T> {
    pub profile: CatenoidProfile<T>,
    pub period: T,
}

impl<T: Real> Catenoid<T> {
    /// Integrates half a period, enough to evaluate both the catenoid and
    /// the full unduloid-type surface by symmetry.
    pub fn new(k: T) -> Result<Self> {
        let period = period(k)?;
        let profile = integrate_profile(k, period * lit(0.5) + lit(1e-3), profile_options())?;
        Ok(Self { profile, period })
    }

    pub fn k(&self) -> T {
        self.profile.k
    }

    pub fn height(&self) -> T {
        self.profile.height
    }

    /// `(r, r', r'')` at any real `t`, using evenness and periodicity.
    pub fn radius_state(&self, t: T) -> Result<(T, T, T)> {
        let p = self.period;
        let mut tau = t - (t / p).floor() * p;
        let mut sign = T::one();
        if tau > p * lit(0.5) {
            tau = p - tau;
            sign = -T::one();
        }
        let (r, rp, rpp) = self.profile.state_at(tau.max(T::zero()))?;
        Ok((r, sign * rp, rpp))
    }

    /// Point of the catenoid in the open cylinder, `|t| < h/2`.
    pub fn immerse(&self, theta: T, t: T) -> Result<Point3<T>> {
        if !(t.abs() < self.height() * lit(0.5)) {
            return domain(
                "immerse_catenoid",
                format!("|t| = {} must be below h/2 = {}", t.abs(), self.height() * lit(0.5)),
            );
        }
        self.ambient_unduloid(theta, t)
    }

    /// Point of the ambient surface of revolution in R³ (any `θ`, `t`).
    pub fn ambient_unduloid(&self, theta: T, t: T) -> Result<Point3<T>> {
        let (r, _, _) = self.radius_state(t)?;
        let (s, c) = (self.k().sqrt() * theta).sin_cos();
        Ok(Point3::new(r * c, r * s, t))
    }
}

impl<T: Real> ImmersionPatch<T> for Catenoid<T> {
    fn model(&self) -> Model {
        Model::Disk
    }

    fn eval(&self, u: T, v: T) -> Result<Point3<T>> {
        self.immerse(u, v)
    }

    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>> {
        self.immerse(u, v)?;
        let (r, rp, rpp) = self.radius_state(v)?;
        let radius = Jet2::of_v(r, rp, rpp);
        let angle = Jet2::var_u(u) * Jet2::constant(self.k().sqrt());
        Ok([radius * angle.cos(), radius * angle.sin(), Jet2::var_v(v)].into())
    }
}

/// Graph `(x, y) ↦ (x, y, t_k(x, y))` of the upper half of the catenoid
/// after the dilation `T_{1/μ₀}` of the half-plane, where
/// `t_k(x, y) = t_k(|g⁻¹(μ₀ (x + i y))|)`.
pub fn dilated_graph_phi<T: Real>(k: T, x: T, y: T) -> Result<Point3<T>> {
    check_k("dilated_graph_phi", k)?;
    if !(y > T::zero()) {
        return domain("dilated_graph_phi", format!("y = {y} must be positive"));
    }
    let m0 = mu0(k)?;
    let w = Complex::new(m0 * x, m0 * y);
    let gap = disk_gap_of_halfplane(w);
    // r - r₀ = (1 - r₀) - (1 - r)
    let delta = neck_gap(k) - gap;
    let tol = T::epsilon() * lit(8.0);
    if delta < -tol || !(gap > T::zero()) {
        return domain(
            "dilated_graph_phi",
            format!("({x}, {y}) pulls back to radius outside [r0, 1)"),
        );
    }
    Ok(Point3::new(x, y, t_of_offset(k, delta.max(T::zero()))?))
}

/// Limit `κ → 0` of the dilated graphs: `t = arccos y`.
pub fn limit_graph<S: Smooth<T>, T: Real>(y: S) -> S {
    y.acos()
}

/// Closed-form `d t_k / dk` at `k = 0`: `¼ (x² y / √(1 - y²) - arccos y)`.
pub fn regeneration_velocity<T: Real>(x: T, y: T) -> T {
    (x * x * y / (T::one() - y * y).sqrt() - y.acos()) * lit(0.25)
}
