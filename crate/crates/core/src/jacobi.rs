//! The Jacobi operator `L = -sin²t (∂x² + ∂t² + 1)` of the parabolic
//! catenoid, its closed-form Jacobi fields, the small-parameter expansions
//! of the catenoid and tall-rectangle heights, and the moment condition.

use serde::{Deserialize, Serialize};

use crate::curvature::{fundamental_forms, ImmersionPatch};
use crate::error::{domain, Error, Result};
use crate::hyperbolic::metric_at;
use crate::jet::{Jet2, Smooth};
use crate::parabolic::Gauge;
use crate::quadrature::{gauss_legendre, integrate, simpson_uniform, QuadOptions};
use crate::scalar::{from_usize, lit, Real};

/// Smallest admissible grid size in either direction.
pub const MIN_GRID: usize = 16;

/// A scalar field sampled on the strip `[-X, X) × [0, π]`.
///
/// The `x` grid is uniform and periodic, `x_i = -X + 2X i / nx`; the `t` grid
/// is uniform and includes both boundary rows, `t_j = π j / (nt - 1)`.
/// Values are stored row-major in `x`: `values[i * nt + j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripField<T> {
    pub half_width: T,
    pub nx: usize,
    pub nt: usize,
    pub values: Vec<T>,
}

impl<T: Real> StripField<T> {
    pub fn new(half_width: T, nx: usize, nt: usize, values: Vec<T>) -> Result<Self> {
        if nx < MIN_GRID || nt < MIN_GRID {
            return Err(Error::Input(format!(
                "grid {nx}x{nt} too coarse, both sizes must be at least {MIN_GRID}"
            )));
        }
        if !(half_width > T::zero()) {
            return Err(Error::Input(format!("half width {half_width} must be positive")));
        }
        if values.len() != nx * nt {
            return Err(Error::Input(format!(
                "expected {} values, got {}",
                nx * nt,
                values.len()
            )));
        }
        Ok(Self { half_width, nx, nt, values })
    }

    pub fn zeros(half_width: T, nx: usize, nt: usize) -> Result<Self> {
        Self::new(half_width, nx, nt, vec![T::zero(); nx * nt])
    }

    /// Samples `f(x, t)` on the grid.
    pub fn from_fn<F: Fn(T, T) -> T>(half_width: T, nx: usize, nt: usize, f: F) -> Result<Self> {
        let mut out = Self::zeros(half_width, nx, nt)?;
        for i in 0..nx {
            let x = out.x(i);
            for j in 0..nt {
                out.values[i * nt + j] = f(x, out.t(j));
            }
        }
        Ok(out)
    }

    pub fn hx(&self) -> T {
        lit::<T>(2.0) * self.half_width / from_usize(self.nx)
    }

    pub fn ht(&self) -> T {
        T::PI() / from_usize(self.nt - 1)
    }

    pub fn x(&self, i: usize) -> T {
        -self.half_width + self.hx() * from_usize(i)
    }

    pub fn t(&self, j: usize) -> T {
        self.ht() * from_usize(j)
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.nt + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.values[i * self.nt + j] = v;
    }

    /// Trace `u(x, 0)`.
    pub fn trace_bottom(&self) -> Vec<T> {
        (0..self.nx).map(|i| self.at(i, 0)).collect()
    }

    /// Trace `u(x, π)`.
    pub fn trace_top(&self) -> Vec<T> {
        (0..self.nx).map(|i| self.at(i, self.nt - 1)).collect()
    }

    /// Grid index closest to `x`.
    pub fn index_of(&self, x: T) -> usize {
        let i = ((x + self.half_width) / self.hx()).round();
        i.to_usize().unwrap_or(0).min(self.nx - 1)
    }

    fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.nx as isize) as usize
    }

    /// Central difference `u_x` at a grid node (periodic in `x`).
    pub fn dx(&self, i: usize, j: usize) -> T {
        let (p, m) = (self.wrap(i as isize + 1), self.wrap(i as isize - 1));
        (self.at(p, j) - self.at(m, j)) / (lit::<T>(2.0) * self.hx())
    }

    /// Five-point `(∂x² + ∂t² + 1) u` at an interior node.
    pub fn helmholtz(&self, i: usize, j: usize) -> Result<T> {
        if j == 0 || j + 1 >= self.nt {
            return domain("StripField::helmholtz", format!("row {j} is on the boundary"));
        }
        let (p, m) = (self.wrap(i as isize + 1), self.wrap(i as isize - 1));
        let (hx, ht) = (self.hx(), self.ht());
        let two = lit::<T>(2.0);
        let c = self.at(i, j);
        let uxx = (self.at(p, j) - two * c + self.at(m, j)) / (hx * hx);
        let utt = (self.at(i, j + 1) - two * c + self.at(i, j - 1)) / (ht * ht);
        Ok(uxx + utt + c)
    }

    /// Largest `|(∂x² + ∂t² + 1) u|` over interior nodes with `|x| ≤ x_max`.
    pub fn interior_residual(&self, x_max: T) -> T {
        let mut worst = T::zero();
        for i in 0..self.nx {
            if self.x(i).abs() > x_max {
                continue;
            }
            for j in 1..self.nt - 1 {
                worst = worst.max(self.helmholtz(i, j).expect("interior row").abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Values at grid nodes nearest to each `(x, t)` pair.
    pub fn nearest(&self, x: T, t: T) -> T {
        let j = (t / self.ht()).round().to_usize().unwrap_or(0).min(self.nt - 1);
        self.at(self.index_of(x), j)
    }
}

/// The closed-form Jacobi fields of the parabolic catenoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// Normal speed of the dilations `λ ↦ Ψ_λ`.
    Psi,
    /// `x` times [`FieldKind::Psi`].
    Utilde,
    /// Normal speed of the deformation into catenoids.
    WCat,
    /// Normal speed of the deformation into tall rectangles.
    WTall,
}

impl FieldKind {
    pub const ALL: [FieldKind; 4] = [FieldKind::Psi, FieldKind::Utilde, FieldKind::WCat, FieldKind::WTall];
}

/// A Jacobi field with exact derivatives, written in one of the two gauges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyticField {
    pub kind: FieldKind,
    pub gauge: Gauge,
}

impl AnalyticField {
    pub fn new(kind: FieldKind, gauge: Gauge) -> Self {
        Self { kind, gauge }
    }

    /// The field formula, valid for plain scalars and jets alike.
    pub fn formula<S: Smooth<T>, T: Real>(&self, x: S, t: S) -> S {
        let quarter = S::lit(0.25);
        match (self.gauge, self.kind) {
            (Gauge::Psi, FieldKind::Psi) => t.sin(),
            (Gauge::Psi, FieldKind::Utilde) => x * t.sin(),
            (Gauge::Psi, FieldKind::WCat) => w_psi_gauge(x, t),
            (Gauge::Psi, FieldKind::WTall) => -w_psi_gauge(x, t),
            (Gauge::Fhat, FieldKind::Psi) => t.cos(),
            (Gauge::Fhat, FieldKind::Utilde) => x * t.cos(),
            (Gauge::Fhat, FieldKind::WCat) => quarter * w_fhat_bracket(x, t),
            (Gauge::Fhat, FieldKind::WTall) => -(quarter * w_fhat_bracket(x, t)),
        }
    }

    fn check<T: Real>(&self, t: T) -> Result<()> {
        if self.gauge.contains(t) {
            Ok(())
        } else {
            domain("AnalyticField", format!("t = {t} outside the open {:?} range", self.gauge))
        }
    }

    pub fn value<T: Real>(&self, x: T, t: T) -> Result<T> {
        self.check(t)?;
        Ok(self.formula(x, t))
    }

    pub fn jet<T: Real>(&self, x: T, t: T) -> Result<Jet2<T>> {
        self.check(t)?;
        Ok(self.formula(Jet2::var_u(x), Jet2::var_v(t)))
    }

    /// Samples the field on a strip grid in the Ψ gauge; boundary rows are
    /// filled by continuity.
    pub fn sample<T: Real>(&self, half_width: T, nx: usize, nt: usize) -> Result<StripField<T>> {
        let shifted = Self::new(self.kind, Gauge::Psi);
        StripField::from_fn(half_width, nx, nt, |x, t| shifted.formula(x, t))
    }
}

fn w_psi_gauge<S: Smooth<T>, T: Real>(x: S, t: S) -> S {
    let a = (S::cst(T::PI()) - S::lit(2.0) * t) * t.cos();
    let b = S::lit(2.0) * x * x * t.sin();
    S::lit(0.125) * (a - b)
}

fn w_fhat_bracket<S: Smooth<T>, T: Real>(x: S, t: S) -> S {
    t * t.sin() - x * x * t.cos()
}

/// Conformal weight `sin²t` of the gauge (`cos²t` in the shifted gauge).
fn weight<T: Real>(gauge: Gauge, t: T) -> T {
    match gauge {
        Gauge::Psi => t.sin().powi(2),
        Gauge::Fhat => t.cos().powi(2),
    }
}

/// `L u = -w(t) (u_xx + u_tt + u)` from an exact jet.
pub fn jacobi_from_jet<T: Real>(gauge: Gauge, t: T, u: &Jet2<T>) -> T {
    -weight(gauge, t) * (u.duu + u.dvv + u.val)
}

/// `L` applied to a closed-form field at `(x, t)`.
pub fn jacobi_apply<T: Real>(field: &AnalyticField, x: T, t: T) -> Result<T> {
    let jet = field.jet(x, t)?;
    Ok(jacobi_from_jet(field.gauge, t, &jet))
}

/// `L` applied to a sampled field at an interior node by central differences.
pub fn jacobi_apply_grid<T: Real>(field: &StripField<T>, i: usize, j: usize) -> Result<T> {
    let t = field.t(j);
    Ok(-t.sin().powi(2) * field.helmholtz(i, j)?)
}

/// Which deformation a series coefficient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Catenoids, expansion in `√k`.
    Cat,
    /// Tall rectangles, expansion in `√d`.
    Tall,
}

fn check_series<T: Real>(op: &'static str, y: T, s: T) -> Result<()> {
    if !(y > T::zero() && y < T::one()) {
        return domain(op, format!("y = {y} outside (0, 1)"));
    }
    if !(s > T::zero() && s < T::one()) {
        return domain(op, format!("s = {s} outside (0, 1)"));
    }
    Ok(())
}

/// `√(s (1 - y) (s y - s + 2))`.
fn series_root<T: Real>(y: T, s: T) -> T {
    (s * (T::one() - y) * (s * y - s + lit(2.0))).sqrt()
}

/// Leading coefficient, shared by both expansions.
fn series_zero<T: Real>(y: T, s: T) -> T {
    (T::one() - y) / (s * (T::one() - y) * (lit::<T>(2.0) - s + s * y)).sqrt()
}

/// Coefficient `a_i(x, y, s)` of the catenoid height integrand in powers of `√k`.
pub fn series_a<T: Real>(i: u8, x: T, y: T, s: T) -> Result<T> {
    check_series("series_a", y, s)?;
    let c = |v: f64| lit::<T>(v);
    let root = series_root(y, s);
    let q = s * y - s + c(2.0);
    match i {
        0 => Ok(series_zero(y, s)),
        1 => {
            let s2 = s * s;
            let num = -s2 * y.powi(3) + c(3.0) * s2 * y * y - c(3.0) * s2 * y + s2
                - c(3.0) * s * y * y
                + c(6.0) * s * y
                - c(3.0) * s
                + y * y
                - c(2.0) * y
                + T::one();
            Ok(num / (c(2.0) * q * root))
        }
        2 => {
            let ym = y - T::one();
            let den = c(8.0) * q * q * root;
            let first = -c(2.0) * s.powi(4) * ym.powi(5)
                + c(2.0) * s.powi(3) * (y - c(5.0)) * ym.powi(4)
                + s * s * (c(10.0) * y - c(13.0)) * ym.powi(3);
            let second = c(2.0) * s * ym * (y * (x * x + c(8.0) * y - c(6.0)) - c(2.0))
                + y * (c(4.0) * x * x + (c(5.0) - c(3.0) * y) * y + c(7.0))
                - c(9.0);
            Ok(first / den + second / den)
        }
        _ => domain("series_a", format!("order {i} not available")),
    }
}

/// Coefficient `h_i(x, y, s)` of the tall-rectangle height integrand in powers of `√d`.
pub fn series_h<T: Real>(i: u8, x: T, y: T, s: T) -> Result<T> {
    check_series("series_h", y, s)?;
    let c = |v: f64| lit::<T>(v);
    match i {
        0 => Ok(series_zero(y, s)),
        1 => {
            let q = s * y - s + c(2.0);
            let num = (T::one() - y).powf(c(1.5)) * (s * s * y - s * s + c(3.0) * s - T::one());
            Ok(num / (c(2.0) * s.sqrt() * q.powf(c(1.5))))
        }
        2 => {
            let ym = y - T::one();
            let q = s * ym + c(2.0);
            let den = c(8.0) * q * q * (s * (T::one() - y) * q).sqrt();
            let first = -c(2.0) * s.powi(4) * ym.powi(5)
                + c(2.0) * s.powi(3) * (y - c(5.0)) * ym.powi(4)
                + s * s * (c(10.0) * y - c(17.0)) * ym.powi(3);
            let second = c(2.0) * s * ym * (-(x * x + c(14.0)) * y + c(8.0) * y * y + c(6.0))
                - y * (c(4.0) * x * x + y * (c(3.0) * y - c(5.0)) + c(9.0))
                + c(7.0);
            Ok(first / den + second / den)
        }
        _ => domain("series_h", format!("order {i} not available")),
    }
}

/// `∫₀¹ coefficient ds`, with `s = σ²` removing the `s^(-1/2)` endpoint singularity.
pub fn series_integral<T: Real>(kind: SeriesKind, order: u8, x: T, y: T) -> Result<T> {
    check_series("series_integral", y, lit(0.5))?;
    if order > 2 {
        return domain("series_integral", format!("order {order} not available"));
    }
    let coef = |s: T| match kind {
        SeriesKind::Cat => series_a(order, x, y, s),
        SeriesKind::Tall => series_h(order, x, y, s),
    };
    let f = |sigma: T| {
        let s = sigma * sigma;
        coef(s).map(|v| lit::<T>(2.0) * sigma * v).unwrap_or(T::nan())
    };
    let r = integrate(f, T::zero(), T::one(), QuadOptions::with_tol(lit(1e-14), lit(1e-13)))?;
    Ok(r.value)
}

/// `∫₀¹ a₂ ds` (catenoids) or `∫₀¹ h₂ ds` (tall rectangles) by quadrature.
pub fn second_order_integral<T: Real>(kind: SeriesKind, x: T, y: T) -> Result<T> {
    series_integral(kind, 2, x, y)
}

/// Closed form of the second-order integral:
/// `±¼ (x² y / √(1 - y²) - arccos y)`, positive for catenoids.
pub fn second_order_closed<T: Real>(kind: SeriesKind, x: T, y: T) -> T {
    let v = (x * x * y / (T::one() - y * y).sqrt() - y.acos()) * lit(0.25);
    match kind {
        SeriesKind::Cat => v,
        SeriesKind::Tall => -v,
    }
}

/// Catenoid Jacobi field on the graph chart, `¼ (√(1 - y²) arccos y - x² y)`.
pub fn w_graph<T: Real>(x: T, y: T) -> T {
    ((T::one() - y * y).sqrt() * y.acos() - x * x * y) * lit(0.25)
}

/// Normal component `g(ν, V)` of a deformation velocity `V` at a patch point.
pub fn jacobi_field_from_normal<T, P, V>(velocity: V, patch: &P, u: T, v: T) -> Result<T>
where
    T: Real,
    P: ImmersionPatch<T> + ?Sized,
    V: Fn(T, T) -> [T; 3],
{
    let report = fundamental_forms(patch, u, v)?;
    let metric = metric_at(patch.eval(u, v)?, patch.model())?;
    Ok(metric.dot(&report.nu, &velocity(u, v)))
}

/// Truncated moment of a sampled field over `[-r, r] × [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport<T> {
    pub r: T,
    /// Moment at `r`.
    pub value: T,
    /// Moment at `r/2`.
    pub half_value: T,
    /// Largest `|u| + |u_x|` on the lateral sides `x = ±r`.
    pub lateral_size: T,
    /// False when the truncations disagree or the field has not decayed at `±r`.
    pub converged: bool,
}

fn moment_at<T: Real>(w: &StripField<T>, r: T) -> (T, T) {
    let (il, ir) = (w.index_of(-r), w.index_of(r));
    let hx = w.hx();
    let top = w.nt - 1;
    let mut traces = T::zero();
    for i in il..=ir {
        let wt = if i == il || i == ir { lit(0.5) } else { T::one() };
        traces += wt * (w.at(i, top) + w.at(i, 0));
    }
    traces *= hx;
    let lateral: Vec<T> = (0..w.nt)
        .map(|j| w.t(j).sin() * (w.dx(ir, j) - w.dx(il, j)))
        .collect();
    let side = (0..w.nt)
        .map(|j| w.at(ir, j).abs().max(w.at(il, j).abs()) + w.dx(ir, j).abs().max(w.dx(il, j).abs()))
        .fold(T::zero(), T::max);
    (traces + simpson_uniform(&lateral, w.ht()), side)
}

/// `∫_{-r}^{r} (w(x, π) + w(x, 0)) dx + ∫₀^π sin t (w_x(r, t) - w_x(-r, t)) dt`.
///
/// For a Jacobi field with enough decay this vanishes. The report carries the
/// value at `r/2` and the size of the lateral traces so that non-decaying
/// fields are flagged rather than silently accepted.
pub fn moment_residual<T: Real>(w: &StripField<T>, r: T, tol: T) -> Result<MomentReport<T>> {
    if !(r > T::zero() && r < w.half_width) {
        return domain("moment_residual", format!("r = {r} outside (0, X = {})", w.half_width));
    }
    let (value, lateral_size) = moment_at(w, r);
    let (half_value, _) = moment_at(w, r * lit(0.5));
    let scale = T::one().max(w.max_abs());
    let converged = (value - half_value).abs() <= tol * scale && lateral_size <= tol * scale;
    Ok(MomentReport {
        r,
        value,
        half_value,
        lateral_size,
        converged,
    })
}

/// `∫∫ (u_x² + u_t² - u²) / ∫∫ u²` over `[x0, x1] × [0, π]` for a test field
/// given as a formula in `(x, t)`; Gauss-Legendre on `panels²` cells.
pub fn rayleigh_quotient<T, F>(field: F, x0: T, x1: T, panels: usize) -> T
where
    T: Real,
    F: Fn(Jet2<T>, Jet2<T>) -> Jet2<T>,
{
    let nodes = gauss_legendre::<T>(12);
    let (hx, ht) = ((x1 - x0) / from_usize(panels), T::PI() / from_usize(panels));
    let half = lit::<T>(0.5);
    let (mut num, mut den) = (T::zero(), T::zero());
    for a in 0..panels {
        for b in 0..panels {
            let (xa, tb) = (x0 + hx * from_usize(a), ht * from_usize(b));
            for &(px, wx) in &nodes {
                for &(pt, wt) in &nodes {
                    let x = xa + hx * half * (px + T::one());
                    let t = tb + ht * half * (pt + T::one());
                    let u = field(Jet2::var_u(x), Jet2::var_v(t));
                    let w = wx * wt * hx * ht * half * half;
                    num += w * (u.du * u.du + u.dv * u.dv - u.val * u.val);
                    den += w * u.val * u.val;
                }
            }
        }
    }
    num / den
}

/// `∫_{-C}^{C} ∫₀^π u² / sin²t dt dx`, the squared norm of a field on the
/// truncated parabolic catenoid in the Ψ gauge.
pub fn truncated_norm_sq<T: Real>(field: &AnalyticField, c: T) -> Result<T> {
    if field.gauge != Gauge::Psi {
        return domain("truncated_norm_sq", "field must be in the Psi gauge".to_string());
    }
    let nodes = gauss_legendre::<T>(20);
    let panels = 8usize.max((c.to_f64().unwrap_or(1.0)).ceil() as usize);
    let (hx, ht) = (lit::<T>(2.0) * c / from_usize(panels), T::PI() / from_usize(8));
    let half = lit::<T>(0.5);
    let mut total = T::zero();
    for a in 0..panels {
        for b in 0..8 {
            for &(px, wx) in &nodes {
                for &(pt, wt) in &nodes {
                    let x = -c + hx * (from_usize::<T>(a) + half * (px + T::one()));
                    let t = ht * (from_usize::<T>(b) + half * (pt + T::one()));
                    let u = field.value(x, t)?;
                    total += wx * wt * hx * ht * half * half * u * u / t.sin().powi(2);
                }
            }
        }
    }
    Ok(total)
}

/// Smooth bump supported on `|x - center| < radius`.
pub fn bump<S: Smooth<T>, T: Real>(x: S, center: T, radius: T) -> S {
    let z = (x - S::cst(center)) / S::cst(radius);
    let z2 = z.value() * z.value();
    if z2 >= T::one() {
        return S::cst(T::zero()) * x;
    }
    let q = S::lit(1.0) - z * z;
    (S::lit(-1.0) / q).exp()
}
