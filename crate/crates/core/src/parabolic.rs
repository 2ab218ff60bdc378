//! The parabolic catenoid `Ψ_λ(x, t) = (λx, λ sin t, t)` of the half-plane
//! model, its shifted chart `F̂(x, t) = (x, cos t, t)`, the graph chart over
//! the strip `0 < y < 1`, and the ambient algebraic surface `Q` of R³ whose
//! intersection with the unit cylinder is a stack of parabolic catenoids.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::curvature::{formula_patch, Formula};
use crate::error::{domain, Result};
use crate::hyperbolic::{halfplane_to_disk_complex, Model, Point3};
use crate::jet::Smooth;
use crate::scalar::Real;

/// Vertical normalization of the parabolic catenoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// `t ∈ (0, π)`, neck at `t = π/2`.
    Psi,
    /// `t ∈ (-π/2, π/2)`, neck at `t = 0`.
    Fhat,
}

impl Gauge {
    /// Open height interval of the chart.
    pub fn t_range<T: Real>(self) -> (T, T) {
        match self {
            Gauge::Psi => (T::zero(), T::PI()),
            Gauge::Fhat => (-T::FRAC_PI_2(), T::FRAC_PI_2()),
        }
    }

    pub fn contains<T: Real>(self, t: T) -> bool {
        let (a, b) = self.t_range::<T>();
        t > a && t < b
    }
}

/// Converts a height from one gauge to the other.
pub fn convert_height<T: Real>(t: T, from: Gauge, to: Gauge) -> T {
    match (from, to) {
        (Gauge::Psi, Gauge::Fhat) => t - T::FRAC_PI_2(),
        (Gauge::Fhat, Gauge::Psi) => t + T::FRAC_PI_2(),
        _ => t,
    }
}

fn check_t<T: Real>(op: &'static str, gauge: Gauge, t: T) -> Result<()> {
    if gauge.contains(t) {
        Ok(())
    } else {
        let (a, b) = gauge.t_range::<T>();
        domain(op, format!("t = {t} outside ({a}, {b})"))
    }
}

/// `Ψ_λ(x, t) = (λx, λ sin t, t)` for `0 < t < π`.
pub fn psi<T: Real>(lambda: T, x: T, t: T) -> Result<Point3<T>> {
    ParabolicCatenoid::new(lambda, Gauge::Psi)?.point(x, t)
}

/// `F̂(x, t) = (x, cos t, t)` for `|t| < π/2`.
pub fn fhat<T: Real>(x: T, t: T) -> Result<Point3<T>> {
    ParabolicCatenoid::new(T::one(), Gauge::Fhat)?.point(x, t)
}

/// `(1 - x² - y²) - cos t ((1 + x)² + y²)`; zero exactly on `Q`.
pub fn q_residual<T: Real>(p: Point3<T>) -> T {
    let one = T::one();
    (one - p.x * p.x - p.y * p.y) - p.t.cos() * ((one + p.x) * (one + p.x) + p.y * p.y)
}

/// Gradient of [`q_residual`] in `(x, y, t)`.
pub fn q_gradient<T: Real>(p: Point3<T>) -> [T; 3] {
    let two = T::one() + T::one();
    let c = p.t.cos();
    [
        -two * p.x - two * c * (T::one() + p.x),
        -two * p.y - two * c * p.y,
        p.t.sin() * ((T::one() + p.x) * (T::one() + p.x) + p.y * p.y),
    ]
}

/// The point `F̂(x, t)` carried to disk coordinates, as a point of R³.
pub fn fhat_in_disk<T: Real>(x: T, t: T) -> Result<Point3<T>> {
    let p = fhat(x, t)?;
    let z = halfplane_to_disk_complex(Complex::new(p.x, p.y));
    Ok(Point3::new(z.re, z.im, t))
}

/// Unit normal of the graph chart at height `y`, `(0, -y², -√(1 - y²))`.
pub fn graph_normal<T: Real>(y: T) -> [T; 3] {
    [T::zero(), -y * y, -(T::one() - y * y).sqrt()]
}

/// A parabolic catenoid of scale `λ` in one of the two gauges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicCatenoid<T> {
    pub lambda: T,
    pub gauge: Gauge,
}

impl<T: Real> ParabolicCatenoid<T> {
    pub fn new(lambda: T, gauge: Gauge) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return domain("ParabolicCatenoid::new", format!("lambda = {lambda} must be positive"));
        }
        Ok(Self { lambda, gauge })
    }

    pub fn point(&self, x: T, t: T) -> Result<Point3<T>> {
        check_t("parabolic", self.gauge, t)?;
        Ok(Point3::from_array(self.map(x, t)))
    }

    /// The same surface in the other gauge.
    pub fn regauge(self, gauge: Gauge) -> Self {
        Self { gauge, ..self }
    }
}

impl<T: Real> Formula<T> for ParabolicCatenoid<T> {
    fn chart(&self) -> Model {
        Model::HalfPlane
    }

    fn check(&self, _x: T, t: T) -> Result<()> {
        check_t("parabolic", self.gauge, t)
    }

    fn map<S: Smooth<T>>(&self, x: S, t: S) -> [S; 3] {
        let l = S::cst(self.lambda);
        let height = match self.gauge {
            Gauge::Psi => t.sin(),
            Gauge::Fhat => t.cos(),
        };
        [l * x, l * height, t]
    }
}

formula_patch!(ParabolicCatenoid<T>);

/// Upper half of the parabolic catenoid as the graph `(x, y) ↦ (x, y, arccos y)`
/// over the strip `0 < y < 1`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParabolicGraph;

impl<T: Real> Formula<T> for ParabolicGraph {
    fn chart(&self) -> Model {
        Model::HalfPlane
    }

    fn check(&self, _x: T, y: T) -> Result<()> {
        if y > T::zero() && y < T::one() {
            Ok(())
        } else {
            domain("parabolic_graph", format!("y = {y} outside (0, 1)"))
        }
    }

    fn map<S: Smooth<T>>(&self, x: S, y: S) -> [S; 3] {
        [x, y, y.acos()]
    }
}

impl<T: Real> crate::curvature::ImmersionPatch<T> for ParabolicGraph {
    fn model(&self) -> Model {
        Model::HalfPlane
    }
    fn eval(&self, u: T, v: T) -> Result<Point3<T>> {
        crate::curvature::formula_eval(self, u, v)
    }
    fn jet(&self, u: T, v: T) -> Result<crate::curvature::PatchJet<T>> {
        crate::curvature::formula_jet(self, u, v)
    }
}
