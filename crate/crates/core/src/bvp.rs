//! Fourier-multiplier solvers for the Jacobi equation on the strip
//! `R × [0, π]`, truncated to a periodic window `[-X, X)`.
//!
//! Each Fourier mode `ξ ≠ 0` reduces `(∂x² + ∂t² + 1) u = 0` to
//! `(-∂t² + ξ² - 1) û = 0`, solved exactly by the multipliers `v±`. The
//! inhomogeneous problem uses the Dirichlet Green function `Ĝ` of the same
//! operator. The mode `ξ = 0` is a double pole: data with nonzero mean are
//! rejected.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::jacobi::{moment_residual, MomentReport, StripField, MIN_GRID};
use crate::scalar::{from_usize, lit, Real};

/// Width of the band `|1 - ξ²| < NEAR_RESONANCE` evaluated by Taylor series.
pub const NEAR_RESONANCE: f64 = 1e-6;

/// Which boundary a multiplier is normalized on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `v₊(ξ, 0) = 0`, `v₊(ξ, π) = 1`.
    Plus,
    /// `v₋(ξ, 0) = 1`, `v₋(ξ, π) = 0`.
    Minus,
}

/// Scalar bound for the FFT-based solvers.
pub trait FftReal: Real + FftNum {}
impl<T: Real + FftNum> FftReal for T {}

/// `sin(μ s)/μ` with `μ² = ε`, continued to `sinh(ω s)/ω` for `ε = -ω² < 0`,
/// by its Taylor series in `ε`.
fn series_kernel<T: Real>(eps: T, s: T) -> T {
    let s2 = s * s;
    s * (T::one() - eps * s2 / lit(6.0) + eps * eps * s2 * s2 / lit(120.0)
        - eps * eps * eps * s2 * s2 * s2 / lit(5040.0))
}

enum Regime<T> {
    Sine(T),
    Series(T),
    Sinh(T),
}

fn regime<T: Real>(op: &'static str, xi: T) -> Result<Regime<T>> {
    if xi == T::zero() || !xi.is_finite() {
        return domain(op, format!("xi = {xi}: the zero mode is a double pole"));
    }
    let eps = T::one() - xi * xi;
    Ok(if eps.abs() < lit(NEAR_RESONANCE) {
        Regime::Series(eps)
    } else if eps > T::zero() {
        Regime::Sine(eps.sqrt())
    } else {
        Regime::Sinh((-eps).sqrt())
    })
}

/// `v₊(ξ, t)` for `0 ≤ t ≤ π`.
fn v_plus<T: Real>(r: &Regime<T>, t: T) -> T {
    match *r {
        Regime::Sine(mu) => (mu * t).sin() / (mu * T::PI()).sin(),
        Regime::Series(eps) => series_kernel(eps, t) / series_kernel(eps, T::PI()),
        Regime::Sinh(om) => {
            let pi = T::PI();
            (om * (t - pi)).exp() * (T::one() - (-lit::<T>(2.0) * om * t).exp())
                / (T::one() - (-lit::<T>(2.0) * om * pi).exp())
        }
    }
}

/// The multiplier `v±(ξ, t)`: the solution of `(-∂t² + ξ² - 1) v = 0` on
/// `[0, π]` with unit data on one side and zero on the other.
pub fn multiplier_v<T: Real>(xi: T, t: T, side: Side) -> Result<T> {
    let r = regime("multiplier_v", xi)?;
    if !(t >= T::zero() && t <= T::PI()) {
        return domain("multiplier_v", format!("t = {t} outside [0, pi]"));
    }
    Ok(match side {
        Side::Plus => v_plus(&r, t),
        Side::Minus => v_plus(&r, T::PI() - t),
    })
}

/// `∂²v±/∂t²`, exact: `(ξ² - 1) v±` for the closed forms and the
/// differentiated series in the resonant band.
pub fn multiplier_v_tt<T: Real>(xi: T, t: T, side: Side) -> Result<T> {
    let r = regime("multiplier_v_tt", xi)?;
    let s = match side {
        Side::Plus => t,
        Side::Minus => T::PI() - t,
    };
    Ok(match r {
        Regime::Series(eps) => {
            let s2 = s * s;
            let d2 = -eps * s + eps * eps * s * s2 / lit(6.0) - eps * eps * eps * s * s2 * s2 / lit(120.0);
            d2 / series_kernel(eps, T::PI())
        }
        Regime::Sine(mu) => -mu * mu * v_plus(&r, s),
        Regime::Sinh(om) => om * om * v_plus(&r, s),
    })
}

/// Dirichlet Green function of `-∂t² + ξ² - 1` on `(0, π)`.
pub fn green_hat<T: Real>(xi: T, t: T, tp: T) -> Result<T> {
    let r = regime("green_hat", xi)?;
    let pi = T::PI();
    if !(t >= T::zero() && t <= pi && tp >= T::zero() && tp <= pi) {
        return domain("green_hat", format!("(t, t') = ({t}, {tp}) outside [0, pi]²"));
    }
    let (lo, hi) = if t <= tp { (t, tp) } else { (tp, t) };
    Ok(match r {
        Regime::Sine(mu) => (mu * lo).sin() * (mu * (pi - hi)).sin() / (mu * (mu * pi).sin()),
        Regime::Series(eps) => series_kernel(eps, lo) * series_kernel(eps, pi - hi) / series_kernel(eps, pi),
        Regime::Sinh(om) => {
            let two = lit::<T>(2.0);
            let a = |s: T| T::one() - (-two * om * s).exp();
            (om * (lo - hi)).exp() * a(lo) * a(pi - hi) / (two * om * a(pi))
        }
    })
}

/// Frequencies of the periodic window `[-X, X)` with `n` samples, in FFT order.
pub fn frequencies<T: Real>(half_width: T, n: usize) -> Vec<T> {
    let base = T::PI() / half_width;
    (0..n)
        .map(|k| {
            let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            base * lit(signed)
        })
        .collect()
}

/// Tolerance on boundary means and on the decay at the window edge.
pub fn admissibility_tol<T: Real>() -> T {
    lit(1e-8)
}

/// Boundary traces `φ₊ = u(·, π)` and `φ₋ = u(·, 0)` sampled on the `x` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData<T> {
    pub half_width: T,
    pub phi_plus: Vec<T>,
    pub phi_minus: Vec<T>,
    pub mean_plus: T,
    pub mean_minus: T,
}

fn check_decay<T: Real>(name: &str, v: &[T]) -> Result<()> {
    let edge = v[0].abs().max(v[v.len() - 1].abs());
    if edge > admissibility_tol() {
        return Err(Error::Input(format!(
            "{name} has not decayed at the window edge (|value| = {edge}); widen the window"
        )));
    }
    Ok(())
}

fn trapezoid_periodic<T: Real>(v: &[T], h: T) -> T {
    v.iter().copied().sum::<T>() * h
}

impl<T: Real> BoundaryData<T> {
    pub fn new(half_width: T, phi_plus: Vec<T>, phi_minus: Vec<T>) -> Result<Self> {
        let n = phi_plus.len();
        if n != phi_minus.len() {
            return Err(Error::Input("boundary traces have different lengths".into()));
        }
        if n < MIN_GRID || !n.is_power_of_two() {
            return Err(Error::Input(format!(
                "nx = {n} must be a power of two and at least {MIN_GRID}"
            )));
        }
        if !(half_width > T::zero()) {
            return Err(Error::Input(format!("half width {half_width} must be positive")));
        }
        check_decay("phi_plus", &phi_plus)?;
        check_decay("phi_minus", &phi_minus)?;
        let h = lit::<T>(2.0) * half_width / from_usize(n);
        Ok(Self {
            half_width,
            mean_plus: trapezoid_periodic(&phi_plus, h),
            mean_minus: trapezoid_periodic(&phi_minus, h),
            phi_plus,
            phi_minus,
        })
    }

    pub fn from_fn<P: Fn(T) -> T, M: Fn(T) -> T>(half_width: T, nx: usize, plus: P, minus: M) -> Result<Self> {
        let h = lit::<T>(2.0) * half_width / from_usize(nx);
        let xs: Vec<T> = (0..nx).map(|i| -half_width + h * from_usize(i)).collect();
        Self::new(half_width, xs.iter().map(|&x| plus(x)).collect(), xs.iter().map(|&x| minus(x)).collect())
    }

    pub fn nx(&self) -> usize {
        self.phi_plus.len()
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            half_width: self.half_width,
            phi_plus: self.phi_plus.iter().map(|&v| a * v).collect(),
            phi_minus: self.phi_minus.iter().map(|&v| a * v).collect(),
            mean_plus: a * self.mean_plus,
            mean_minus: a * self.mean_minus,
        }
    }
}

/// Reduced source `f̃ = f / sin²t` of `L u = f`, sampled on a strip grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceData<T> {
    pub ftilde: StripField<T>,
}

impl<T: Real> SourceData<T> {
    pub fn new(ftilde: StripField<T>) -> Result<Self> {
        if !ftilde.nx.is_power_of_two() {
            return Err(Error::Input(format!("nx = {} must be a power of two", ftilde.nx)));
        }
        let tol = admissibility_tol::<T>();
        let scale = T::one().max(ftilde.max_abs());
        let top = ftilde.nt - 1;
        for i in 0..ftilde.nx {
            if ftilde.at(i, 0).abs() > tol * scale || ftilde.at(i, top).abs() > tol * scale {
                return Err(Error::Input("source must vanish on t = 0 and t = pi".into()));
            }
        }
        for j in 0..ftilde.nt {
            let row: Vec<T> = (0..ftilde.nx).map(|i| ftilde.at(i, j)).collect();
            check_decay("source", &row)?;
        }
        Ok(Self { ftilde })
    }

    pub fn from_fn<F: Fn(T, T) -> T>(half_width: T, nx: usize, nt: usize, f: F) -> Result<Self> {
        Self::new(StripField::from_fn(half_width, nx, nt, f)?)
    }
}

fn check_zero_mode<T: Real>(label: &str, mean: T, scale: T) -> Result<()> {
    if mean.abs() > admissibility_tol::<T>() * T::one().max(scale) {
        return Err(Error::ZeroMode {
            detail: format!("{label} has mean {mean}; data must integrate to zero"),
        });
    }
    Ok(())
}

fn forward<T: FftReal>(planner: &mut FftPlanner<T>, v: &[T]) -> Vec<Complex<T>> {
    let mut buf: Vec<Complex<T>> = v.iter().map(|&x| Complex::new(x, T::zero())).collect();
    planner.plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Spectral columns `û(ξ_k, t_j)` to a real strip field.
fn synthesize<T: FftReal>(half_width: T, nt: usize, cols: Vec<Vec<Complex<T>>>) -> Result<StripField<T>> {
    let nx = cols.len();
    let mut planner = FftPlanner::new();
    let inv = planner.plan_fft_inverse(nx);
    let norm = from_usize::<T>(nx).recip();
    let mut out = StripField::zeros(half_width, nx, nt)?;
    let mut row = vec![Complex::new(T::zero(), T::zero()); nx];
    for j in 0..nt {
        for (k, c) in cols.iter().enumerate() {
            row[k] = c[j];
        }
        inv.process(&mut row);
        for (i, v) in row.iter().enumerate() {
            out.set(i, j, v.re * norm);
        }
    }
    Ok(out)
}

/// The grid origin `-X` contributes a phase common to the forward and inverse
/// transforms, so raw FFT order is used throughout.
fn t_grid<T: Real>(nt: usize) -> Vec<T> {
    let ht = T::PI() / from_usize(nt - 1);
    (0..nt).map(|j| ht * from_usize(j)).collect()
}

/// Solves `(∂x² + ∂t² + 1) u = 0` with `u(·, π) = φ₊`, `u(·, 0) = φ₋` on
/// `nt` rows.
pub fn solve_dirichlet<T: FftReal>(bd: &BoundaryData<T>, nt: usize) -> Result<StripField<T>> {
    if nt < MIN_GRID {
        return Err(Error::Input(format!("nt = {nt} must be at least {MIN_GRID}")));
    }
    let scale = bd
        .phi_plus
        .iter()
        .chain(&bd.phi_minus)
        .fold(T::zero(), |m, v| m.max(v.abs()))
        * bd.half_width;
    check_zero_mode("phi_plus", bd.mean_plus, scale)?;
    check_zero_mode("phi_minus", bd.mean_minus, scale)?;
    let nx = bd.nx();
    let mut planner = FftPlanner::new();
    let fp = forward(&mut planner, &bd.phi_plus);
    let fm = forward(&mut planner, &bd.phi_minus);
    let xis = frequencies(bd.half_width, nx);
    let ts = t_grid::<T>(nt);
    let cols: Vec<Vec<Complex<T>>> = (0..nx)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return vec![Complex::new(T::zero(), T::zero()); nt];
            }
            let r = regime("solve_dirichlet", xis[k]).expect("nonzero frequency");
            ts.iter()
                .map(|&t| fp[k] * v_plus(&r, t) + fm[k] * v_plus(&r, T::PI() - t))
                .collect()
        })
        .collect();
    let mut u = synthesize(bd.half_width, nt, cols)?;
    // Pin the traces to the data: the mean-free reconstruction differs only by
    // the rejected zero mode.
    for i in 0..nx {
        u.set(i, 0, bd.phi_minus[i]);
        u.set(i, nt - 1, bd.phi_plus[i]);
    }
    Ok(u)
}

/// `Σ_i w_i Ĝ(ξ, t_j, t_i) F_i` for all `j` in `O(nt)`, using the separable
/// form of the Green function. Trapezoid weights; the kink of `Ĝ` sits on a
/// node, so the rule stays second order.
fn green_apply<T: Real>(r: &Regime<T>, ts: &[T], f: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = ts.len();
    let h = ts[1] - ts[0];
    let pi = T::PI();
    let w = |i: usize| if i == 0 || i == n - 1 { h * lit(0.5) } else { h };
    let zero = Complex::new(T::zero(), T::zero());
    match *r {
        Regime::Sinh(om) => {
            let two = lit::<T>(2.0);
            let a = |s: T| T::one() - (-two * om * s).exp();
            let decay = (-om * h).exp();
            let mut left = vec![zero; n];
            let mut acc = zero;
            for i in 0..n {
                acc = acc * decay + f[i] * (w(i) * a(ts[i]));
                left[i] = acc;
            }
            let mut right = vec![zero; n];
            acc = zero;
            for i in (0..n).rev() {
                right[i] = acc;
                acc = acc * decay + f[i] * (w(i) * a(pi - ts[i]));
            }
            // right[i] holds Σ_{l>i} e^{-ω(t_l - t_i)} ... after one more decay step.
            let norm = two * om * a(pi);
            (0..n)
                .map(|j| (left[j] * a(pi - ts[j]) + right[j] * decay * a(ts[j])) / norm)
                .collect()
        }
        _ => {
            let kernel = |s: T| match *r {
                Regime::Sine(mu) => (mu * s).sin() / mu,
                Regime::Series(eps) => series_kernel(eps, s),
                Regime::Sinh(_) => unreachable!(),
            };
            let fpi = kernel(pi);
            let mut left = vec![zero; n];
            let mut acc = zero;
            for i in 0..n {
                acc = acc + f[i] * (w(i) * kernel(ts[i]));
                left[i] = acc;
            }
            let mut right = vec![zero; n];
            acc = zero;
            for i in (0..n).rev() {
                right[i] = acc;
                acc = acc + f[i] * (w(i) * kernel(pi - ts[i]));
            }
            (0..n)
                .map(|j| (left[j] * kernel(pi - ts[j]) + right[j] * kernel(ts[j])) / fpi)
                .collect()
        }
    }
}

/// Solves `L u = sin²t · f̃` with `u = 0` on `t = 0, π`, i.e.
/// `-(∂x² + ∂t² + 1) u = f̃`, through the Green function in each mode.
pub fn solve_inhomogeneous<T: FftReal>(src: &SourceData<T>) -> Result<StripField<T>> {
    let f = &src.ftilde;
    let (nx, nt) = (f.nx, f.nt);
    let mut planner = FftPlanner::new();
    let rows: Vec<Vec<Complex<T>>> = (0..nt)
        .map(|j| {
            let row: Vec<T> = (0..nx).map(|i| f.at(i, j)).collect();
            forward(&mut planner, &row)
        })
        .collect();
    let scale = f.max_abs() * f.half_width;
    let hx = f.hx();
    for (j, row) in rows.iter().enumerate() {
        check_zero_mode(&format!("source row {j}"), row[0].re * hx, scale)?;
    }
    let xis = frequencies(f.half_width, nx);
    let ts = t_grid::<T>(nt);
    let cols: Vec<Vec<Complex<T>>> = (0..nx)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return vec![Complex::new(T::zero(), T::zero()); nt];
            }
            let r = regime("solve_inhomogeneous", xis[k]).expect("nonzero frequency");
            let col: Vec<Complex<T>> = rows.iter().map(|row| row[k]).collect();
            green_apply(&r, &ts, &col)
        })
        .collect();
    let mut u = synthesize(f.half_width, nt, cols)?;
    for i in 0..nx {
        u.set(i, 0, T::zero());
        u.set(i, nt - 1, T::zero());
    }
    Ok(u)
}

/// Moments of a solved Dirichlet problem at increasing truncation radii.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentPipeline<T> {
    pub moments: Vec<MomentReport<T>>,
    /// `∫ u(x, π) dx` and `∫ u(x, 0) dx` over the window.
    pub trace_integrals: [T; 2],
}

/// Solves the Dirichlet problem and evaluates the moment condition at
/// `r = X/4, X/2, 3X/4, X - 2`.
pub fn moment_check_pipeline<T: FftReal>(bd: &BoundaryData<T>, nt: usize) -> Result<MomentPipeline<T>> {
    let u = solve_dirichlet(bd, nt)?;
    let x = bd.half_width;
    let mut radii = vec![x * lit(0.25), x * lit(0.5), x * lit(0.75)];
    if x > lit(2.0) {
        radii.push(x - lit(2.0));
    }
    let moments = radii
        .into_iter()
        .map(|r| moment_residual(&u, r, lit(1e-6)))
        .collect::<Result<Vec<_>>>()?;
    let h = u.hx();
    Ok(MomentPipeline {
        moments,
        trace_integrals: [
            trapezoid_periodic(&u.trace_top(), h),
            trapezoid_periodic(&u.trace_bottom(), h),
        ],
    })
}

/// Built-in boundary or source profiles for job files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    Zero,
    /// `a (x - c) e^{-((x - c)/w)²}`.
    GaussianDerivative {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Preset {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Preset::Zero => 0.0,
            Preset::GaussianDerivative { amplitude, center, width } => {
                let z = (x - center) / width;
                amplitude * (x - center) * (-z * z).exp()
            }
        }
    }
}

/// Boundary data of a job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundarySpec {
    Preset { plus: Preset, minus: Preset },
    /// CSV with a header and columns `phi_minus,phi_plus`, one row per grid node.
    Csv { path: String },
}

/// Source term of a job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceSpec {
    Zero,
    /// `f̃ = (9x - 4x³) e^{-x²} sin 2t`, whose solution is `x e^{-x²} sin 2t`.
    Manufactured,
}

/// A BVP job as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    #[serde(rename = "X", default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_nx")]
    pub nx: usize,
    #[serde(default = "default_nt")]
    pub nt: usize,
    #[serde(default)]
    pub boundary: Option<BoundarySpec>,
    #[serde(default)]
    pub source: Option<SourceSpec>,
}

fn default_half_width() -> f64 {
    20.0
}
fn default_nx() -> usize {
    1024
}
fn default_nt() -> usize {
    256
}

impl JobSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_reader<R: Read>(r: R) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }
}

/// `x e^{-x²} sin 2t`.
pub fn manufactured_solution(x: f64, t: f64) -> f64 {
    x * (-x * x).exp() * (2.0 * t).sin()
}

/// `-(∂x² + ∂t² + 1)` applied to [`manufactured_solution`].
pub fn manufactured_source(x: f64, t: f64) -> f64 {
    (9.0 * x - 4.0 * x.powi(3)) * (-x * x).exp() * (2.0 * t).sin()
}

fn read_boundary_csv(path: &Path, half_width: f64, nx: usize) -> Result<BoundaryData<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Input(format!("{}:{}: {e}", path.display(), n + 1)))
        };
        if cols.len() != 2 {
            return Err(Error::Input(format!("{}:{}: expected 2 columns", path.display(), n + 1)));
        }
        minus.push(parse(cols[0])?);
        plus.push(parse(cols[1])?);
    }
    if minus.len() != nx {
        return Err(Error::Input(format!("boundary CSV has {} rows, expected nx = {nx}", minus.len())));
    }
    BoundaryData::new(half_width, plus, minus)
}

/// Summary of a solved job.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobReport {
    pub nx: usize,
    pub nt: usize,
    pub half_width: f64,
    pub max_abs: f64,
    /// `max |(∂x² + ∂t² + 1) u + f̃|` on interior nodes.
    pub interior_residual: f64,
    pub trace_integrals: [f64; 2],
    pub moments: Vec<MomentReport<f64>>,
    /// Largest error against the manufactured solution, when one is known.
    pub manufactured_error: Option<f64>,
}

/// Runs a job: Dirichlet data and source are superposed.
pub fn run_job(spec: &JobSpec, base_dir: &Path) -> Result<(StripField<f64>, JobReport)> {
    let (x, nx, nt) = (spec.half_width, spec.nx, spec.nt);
    let mut u = StripField::zeros(x, nx, nt)?;
    let mut moments = Vec::new();
    if let Some(b) = &spec.boundary {
        let bd = match b {
            BoundarySpec::Preset { plus, minus } => BoundaryData::from_fn(x, nx, |s| plus.eval(s), |s| minus.eval(s))?,
            BoundarySpec::Csv { path } => read_boundary_csv(&base_dir.join(path), x, nx)?,
        };
        u = solve_dirichlet(&bd, nt)?;
        moments = moment_check_pipeline(&bd, nt)?.moments;
    }
    let mut source = None;
    if let Some(SourceSpec::Manufactured) = spec.source {
        let src = SourceData::from_fn(x, nx, nt, manufactured_source)?;
        let v = solve_inhomogeneous(&src)?;
        for (a, b) in u.values.iter_mut().zip(&v.values) {
            *a += *b;
        }
        source = Some(src);
    }
    let mut residual = 0.0f64;
    for i in 0..nx {
        for j in 1..nt - 1 {
            let f = source.as_ref().map_or(0.0, |s| s.ftilde.at(i, j));
            residual = residual.max((u.helmholtz(i, j)? + f).abs());
        }
    }
    let manufactured_error = match (&spec.boundary, &spec.source) {
        (None, Some(SourceSpec::Manufactured)) => Some(
            (0..nx)
                .flat_map(|i| (0..nt).map(move |j| (i, j)))
                .map(|(i, j)| (u.at(i, j) - manufactured_solution(u.x(i), u.t(j))).abs())
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    let h = u.hx();
    let report = JobReport {
        nx,
        nt,
        half_width: x,
        max_abs: u.max_abs(),
        interior_residual: residual,
        trace_integrals: [trapezoid_periodic(&u.trace_top(), h), trapezoid_periodic(&u.trace_bottom(), h)],
        moments,
        manufactured_error,
    };
    Ok((u, report))
}

/// Writes a strip field as CSV with columns `x,t,u`.
pub fn write_field_csv<T: Real, W: Write>(u: &StripField<T>, mut w: W) -> Result<()> {
    writeln!(w, "x,t,u")?;
    for i in 0..u.nx {
        for j in 0..u.nt {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", u.x(i), u.t(j), u.at(i, j))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Jet2, Smooth};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn multiplier_normalization_and_continuity() {
        for t in [0.0, 0.3, 1.7, PI] {
            assert!((multiplier_v(1.0f64, t, Side::Plus).unwrap() - t / PI).abs() < 1e-15);
            assert!((multiplier_v(-1.0f64, t, Side::Minus).unwrap() - (1.0 - t / PI)).abs() < 1e-15);
        }
        for xi in [0.5f64, 2.0, 30.0] {
            assert_eq!(multiplier_v(xi, 0.0, Side::Plus).unwrap(), 0.0);
            assert!((multiplier_v(xi, PI, Side::Plus).unwrap() - 1.0).abs() < 1e-15);
            assert!((multiplier_v(xi, 0.0, Side::Minus).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(multiplier_v(0.0f64, 1.0, Side::Plus).is_err());
        // Just outside the resonant band on either side against the series.
        for xi2 in [1.0 - 1e-7, 1.0 + 1e-7] {
            let xi = f64::sqrt(xi2);
            let eps: f64 = 1.0 - xi2;
            for t in [0.5, 2.0] {
                let series = series_kernel(eps, t) / series_kernel(eps, PI);
                let closed = if eps > 0.0 {
                    let mu = eps.sqrt();
                    (mu * t).sin() / (mu * PI).sin()
                } else {
                    let om = (-eps).sqrt();
                    (om * t).sinh() / (om * PI).sinh()
                };
                assert!((series - closed).abs() < 1e-8);
                assert!((multiplier_v(xi, t, Side::Plus).unwrap() - closed).abs() < 1e-8);
            }
        }
    }

    /// Closed forms written for jets so their second derivative is exact.
    fn v_jet(xi: f64, t: Jet2<f64>) -> Jet2<f64> {
        let eps = 1.0 - xi * xi;
        if eps > 0.0 {
            let mu = Jet2::constant(eps.sqrt());
            (mu * t).sin() / Jet2::constant((eps.sqrt() * PI).sin())
        } else {
            let om = (-eps).sqrt();
            let e1 = (Jet2::constant(om) * (t - Jet2::constant(PI))).exp();
            let e2 = (Jet2::constant(-om) * (t + Jet2::constant(PI))).exp();
            (e1 - e2) / Jet2::constant(1.0 - (-2.0 * om * PI).exp())
        }
    }

    #[test]
    fn multipliers_solve_the_mode_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let xi = rng.gen_range(0.05..6.0f64);
            let t = rng.gen_range(0.0..PI);
            let j = v_jet(xi, Jet2::var_v(t));
            let v = multiplier_v(xi, t, Side::Plus).unwrap();
            assert!((j.val - v).abs() < 1e-10 * v.abs().max(1.0));
            let res = -j.dvv + (xi * xi - 1.0) * j.val;
            assert!(res.abs() < 1e-10 * j.val.abs().max(1.0), "{xi} {t} {res}");
            for side in [Side::Plus, Side::Minus] {
                let r = -multiplier_v_tt(xi, t, side).unwrap() + (xi * xi - 1.0) * multiplier_v(xi, t, side).unwrap();
                assert!(r.abs() < 1e-10);
            }
        }
        let xi = (1.0f64 + 5e-7).sqrt();
        let r = -multiplier_v_tt(xi, 1.0, Side::Plus).unwrap() + (xi * xi - 1.0) * multiplier_v(xi, 1.0, Side::Plus).unwrap();
        assert!(r.abs() < 1e-15);
    }

    #[test]
    fn green_function_properties() {
        for xi in [0.3f64, 1.0, 1.0 + 1e-8, 2.5, 40.0] {
            for (t, s) in [(0.3, 1.2), (2.0, 0.7), (1.0, 1.0)] {
                assert_eq!(green_hat(xi, t, s).unwrap(), green_hat(xi, s, t).unwrap());
            }
            assert_eq!(green_hat(xi, 0.0, 1.0).unwrap(), 0.0);
            assert!(green_hat(xi, PI, 1.0).unwrap().abs() < 1e-15);
        }
        assert!(green_hat(0.0f64, 1.0, 1.0).is_err());
        // ∫ Ĝ(ξ, t, s) (-∂s² + ξ² - 1) φ(s) ds = φ(t) for φ vanishing at 0 and π.
        for xi in [0.5f64, 1.0, 3.0] {
            let n = 2048;
            let h = PI / n as f64;
            let phi = |s: f64| s.sin().powi(3) * (s + 0.3).cos();
            let lphi = |s: f64| {
                let j = (Jet2::var_v(s).sin()).sq() * Jet2::var_v(s).sin() * (Jet2::var_v(s) + Jet2::constant(0.3)).cos();
                -j.dvv + (xi * xi - 1.0) * j.val
            };
            let t0 = 1.1;
            let mut acc = 0.0;
            for i in 0..=n {
                let s = i as f64 * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                acc += w * h * green_hat(xi, t0, s).unwrap() * lphi(s);
            }
            assert!((acc - phi(t0)).abs() < 1e-4, "{xi}: {acc} vs {}", phi(t0));
        }
    }

    #[test]
    fn zero_data_and_zero_mode() {
        let bd = BoundaryData::from_fn(10.0f64, 64, |_| 0.0, |_| 0.0).unwrap();
        let u = solve_dirichlet(&bd, 32).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        let bd = BoundaryData::from_fn(10.0f64, 64, |x| (-x * x).exp(), |_| 0.0).unwrap();
        assert!(matches!(solve_dirichlet(&bd, 32), Err(Error::ZeroMode { .. })));
        assert!(BoundaryData::from_fn(10.0f64, 64, |x| x, |_| 0.0).is_err());
        let src = SourceData::from_fn(10.0f64, 64, 32, |_, _| 0.0).unwrap();
        assert_eq!(solve_inhomogeneous(&src).unwrap().max_abs(), 0.0);
        let bad = SourceData::from_fn(10.0f64, 64, 32, |x, t| (-x * x).exp() * t.sin()).unwrap();
        assert!(matches!(solve_inhomogeneous(&bad), Err(Error::ZeroMode { .. })));
    }

    #[test]
    fn fast_green_sum_matches_direct_sum() {
        let nt = 65;
        let ts = t_grid::<f64>(nt);
        let f: Vec<Complex<f64>> = ts.iter().map(|&t| Complex::new(t.sin() * (3.0 * t).cos(), t * (PI - t))).collect();
        for xi in [0.4f64, 1.0 + 1e-8, 1.7, 25.0] {
            let r = regime("test", xi).unwrap();
            let fast = green_apply(&r, &ts, &f);
            let h = ts[1];
            for (j, &t) in ts.iter().enumerate() {
                let mut direct = Complex::new(0.0, 0.0);
                for (i, &s) in ts.iter().enumerate() {
                    let w = if i == 0 || i == nt - 1 { 0.5 * h } else { h };
                    direct += f[i] * (w * green_hat(xi, t, s).unwrap());
                }
                assert!((fast[j] - direct).norm() < 1e-13, "{xi} {t}");
            }
        }
    }

    #[test]
    fn dirichlet_solution_properties() {
        let bd = BoundaryData::from_fn(20.0f64, 256, |x| x * (-x * x).exp(), |x| 0.5 * (x - 1.0) * (-(x - 1.0).powi(2)).exp()).unwrap();
        let u = solve_dirichlet(&bd, 64).unwrap();
        for i in 0..256 {
            assert!((u.at(i, 63) - bd.phi_plus[i]).abs() < 1e-14);
        }
        // Parity: odd data give odd solutions.
        let odd = BoundaryData::from_fn(20.0f64, 256, |x| x * (-x * x).exp(), |x| -2.0 * x * (-x * x).exp()).unwrap();
        let u = solve_dirichlet(&odd, 64).unwrap();
        for i in 1..128 {
            for j in [5, 30, 60] {
                assert!((u.at(i, j) + u.at(256 - i, j)).abs() < 1e-12);
            }
        }
        let even = BoundaryData::from_fn(20.0f64, 256, |x| (1.0 - 2.0 * x * x) * (-x * x).exp(), |_| 0.0).unwrap();
        let u = solve_dirichlet(&even, 64).unwrap();
        for i in 1..128 {
            assert!((u.at(i, 30) - u.at(256 - i, 30)).abs() < 1e-12);
        }
    }

    #[test]
    fn linearity() {
        let s1 = SourceData::from_fn(15.0f64, 128, 33, manufactured_source).unwrap();
        let s2 = SourceData::from_fn(15.0f64, 128, 33, |x, t| (x * x - 0.5) * (-x * x).exp() * t.sin() * (2.0 * t).cos() * 2.0 * (-x * x + x * x).exp()).unwrap();
        let comb = SourceData::from_fn(15.0f64, 128, 33, |x, t| 2.0 * s1.ftilde.nearest(x, t) - 3.0 * s2.ftilde.nearest(x, t)).unwrap();
        let (u1, u2, uc) = (solve_inhomogeneous(&s1).unwrap(), solve_inhomogeneous(&s2).unwrap(), solve_inhomogeneous(&comb).unwrap());
        for k in 0..uc.values.len() {
            assert!((uc.values[k] - 2.0 * u1.values[k] + 3.0 * u2.values[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn manufactured_solution_is_recovered() {
        let mut errs = Vec::new();
        for nt in [33usize, 65, 129] {
            let src = SourceData::from_fn(12.0f64, 256, nt, manufactured_source).unwrap();
            let u = solve_inhomogeneous(&src).unwrap();
            let err = (0..u.nx)
                .flat_map(|i| (0..nt).map(move |j| (i, j)))
                .map(|(i, j)| (u.at(i, j) - manufactured_solution(u.x(i), u.t(j))).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        let ratio = errs[1] / errs[2];
        assert!(errs[2] < 1e-3 * 0.43, "{errs:?}");
        assert!((ratio - 4.0).abs() < 0.5, "{errs:?}");
    }

    #[test]
    fn job_spec_parses() {
        let spec = JobSpec::from_json(
            r#"{"X": 20, "nx": 256, "nt": 64,
                "boundary": {"kind": "preset", "plus": {"name": "gaussian_derivative"}, "minus": {"name": "zero"}},
                "source": {"kind": "manufactured"}}"#,
        )
        .unwrap();
        assert_eq!(spec.nx, 256);
        let (u, rep) = run_job(&spec, Path::new(".")).unwrap();
        assert_eq!(u.nt, 64);
        assert!(rep.interior_residual < 5e-2, "{rep:?}");
        let d = JobSpec::from_json("{}").unwrap();
        assert_eq!((d.half_width, d.nx, d.nt), (20.0, 1024, 256));
    }
}
