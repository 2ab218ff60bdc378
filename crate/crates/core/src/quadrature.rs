//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Integrands with inverse-square-root endpoint behaviour are regularized by
//! their callers (a quadratic change of variables) before they reach this
//! module, so a plain smooth-integrand rule is sufficient.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadOptions<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            abs_tol: (eps * lit(1e3)).max(lit(1e-14)),
            rel_tol: (eps * lit(1e2)).max(lit(1e-13)),
            max_intervals: 2000,
        }
    }
}

impl<T: Real> QuadOptions<T> {
    pub fn with_tol(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

fn kronrod<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = (b - a) * lit(0.5);
    let center = (a + b) * lit(0.5);
    let fc = f(center);
    let mut resk = fc * lit(WGK[7]);
    let mut resg = fc * lit(WG[3]);
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        resk += pair * lit(WGK[j]);
        if j % 2 == 1 {
            resg += pair * lit(WG[j / 2]);
        }
    }
    (resk * half, ((resk - resg) * half).abs())
}

/// Integrates `f` over `[a, b]` to the requested tolerance.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    opts: QuadOptions<T>,
) -> Result<QuadResult<T>> {
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            error: T::zero(),
            intervals: 0,
        });
    }
    // (lo, hi, value, error)
    let mut parts: Vec<(T, T, T, T)> = Vec::with_capacity(64);
    let (v, e) = kronrod(&f, a, b);
    parts.push((a, b, v, e));
    loop {
        let total: T = parts.iter().map(|p| p.2).sum();
        let err: T = parts.iter().map(|p| p.3).sum();
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target || !err.is_finite() {
            if !total.is_finite() {
                return Err(Error::Quadrature {
                    estimate: total.to_f64().unwrap_or(f64::NAN),
                    error: err.to_f64().unwrap_or(f64::NAN),
                });
            }
            return Ok(QuadResult {
                value: total,
                error: err,
                intervals: parts.len(),
            });
        }
        if parts.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                estimate: total.to_f64().unwrap_or(f64::NAN),
                error: err.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, p)| {
                if p.3 > acc.1 {
                    (i, p.3)
                } else {
                    acc
                }
            });
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            // Interval collapsed to adjacent floats; accept what we have.
            let total: T = parts.iter().map(|p| p.2).sum();
            return Err(Error::Quadrature {
                estimate: total.to_f64().unwrap_or(f64::NAN),
                error: err.to_f64().unwrap_or(f64::NAN),
            });
        }
        let (v1, e1) = kronrod(&f, lo, mid);
        let (v2, e2) = kronrod(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Convenience wrapper returning only the value with default tolerances.
pub fn integrate_default<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> Result<T> {
    integrate(f, a, b, QuadOptions::default()).map(|r| r.value)
}

/// Integrates a function with an integrable `(s - a)^(-1/2)` singularity at
/// the left endpoint by substituting `s = a + (b - a) σ²`.
pub fn integrate_left_sqrt<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    opts: QuadOptions<T>,
) -> Result<QuadResult<T>> {
    let w = b - a;
    integrate(
        |sigma: T| {
            if sigma == T::zero() {
                return T::zero();
            }
            f(a + w * sigma * sigma) * lit::<T>(2.0) * w * sigma
        },
        T::zero(),
        T::one(),
        opts,
    )
}

/// Composite Simpson rule on uniform samples with spacing `h`.
///
/// An odd number of intervals is closed with Simpson's 3/8 rule on the last
/// three intervals. Two samples fall back to the trapezoid rule.
pub fn simpson_uniform<T: Real>(samples: &[T], h: T) -> T {
    let n = samples.len();
    match n {
        0 | 1 => T::zero(),
        2 => (samples[0] + samples[1]) * h * lit(0.5),
        3 => (samples[0] + lit::<T>(4.0) * samples[1] + samples[2]) * h / lit(3.0),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals.is_multiple_of(2) {
                (n - 1, T::zero())
            } else {
                let s = &samples[n - 4..];
                (
                    n - 4,
                    (s[0] + lit::<T>(3.0) * (s[1] + s[2]) + s[3]) * h * lit(3.0 / 8.0),
                )
            };
            let mut acc = samples[0] + samples[simpson_end];
            for (i, &v) in samples[1..simpson_end].iter().enumerate() {
                acc += v * if i % 2 == 0 { lit::<T>(4.0) } else { lit::<T>(2.0) };
            }
            acc * h / lit(3.0) + tail
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    let mut out = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((lit(x), lit(2.0 / ((1.0 - x * x) * dp * dp))));
    }
    out
}
