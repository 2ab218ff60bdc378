//! Adaptive Dormand-Prince 5(4) integration with an invariant monitor.
//!
//! Besides the usual embedded error estimate, each trial step is checked
//! against a caller-supplied conserved quantity; a step whose drift exceeds
//! the monitor tolerance is rejected and retried with a smaller step.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Step-size control for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Largest admissible drift of the monitored invariant per accepted step
    /// (measured against its initial value).
    pub monitor_tol: T,
    pub h_init: T,
    pub h_max: T,
    pub h_min: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            rtol: lit(1e-13),
            atol: lit(1e-14),
            monitor_tol: lit(1e-10),
            h_init: lit(1e-3),
            h_max: lit(0.05),
            h_min: lit(1e-12),
            max_steps: 2_000_000,
        }
    }
}

/// One accepted sample of the trajectory.
#[derive(Debug, Clone, Copy)]
pub struct OdeSample<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
}

/// A single Dormand-Prince step: returns the fifth-order update and the
/// embedded error vector.
pub fn dopri_step<T: Real, const N: usize, F>(f: &F, t: T, y: &[T; N], h: T) -> ([T; N], [T; N])
where
    F: Fn(T, &[T; N]) -> [T; N],
{
    let mut k = [[T::zero(); N]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = lit::<T>(A[s][j]);
            if a != T::zero() {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + lit::<T>(C[s]) * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [T::zero(); N];
    for s in 0..7 {
        let b5 = lit::<T>(B5[s]);
        let db = lit::<T>(B5[s] - B4[s]);
        for i in 0..N {
            y5[i] += h * b5 * k[s][i];
            err[i] += h * db * k[s][i];
        }
    }
    (y5, err)
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction),
/// returning every accepted sample including both endpoints.
///
/// `monitor` maps a state to the conserved quantity checked on every step.
pub fn integrate<T: Real, const N: usize, F, M>(
    f: F,
    t0: T,
    y0: [T; N],
    t_end: T,
    opts: OdeOptions<T>,
    monitor: M,
) -> Result<Vec<OdeSample<T, N>>>
where
    F: Fn(T, &[T; N]) -> [T; N],
    M: Fn(&[T; N]) -> T,
{
    let dir = if t_end >= t0 { T::one() } else { -T::one() };
    let reference = monitor(&y0);
    let mut out = vec![OdeSample { t: t0, y: y0 }];
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(opts.h_max).min((t_end - t0).abs());
    let mut steps = 0usize;
    while (t_end - t) * dir > T::zero() {
        if steps >= opts.max_steps {
            return Err(Error::StepSize {
                t: t.to_f64().unwrap_or(f64::NAN),
                detail: "step budget exhausted".into(),
            });
        }
        steps += 1;
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        let hs = if last { remaining } else { h };
        let (y_new, err) = dopri_step(&f, t, &y, hs * dir);
        let mut en = T::zero();
        for i in 0..N {
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            let r = err[i] / sc;
            en += r * r;
        }
        en = (en / lit(N as f64)).sqrt();
        let drift = (monitor(&y_new) - reference).abs();
        let accept = en <= T::one() && drift <= opts.monitor_tol && y_new.iter().all(|v| v.is_finite());
        if accept {
            t = if last { t_end } else { t + hs * dir };
            y = y_new;
            out.push(OdeSample { t, y });
        }
        let factor = if en == T::zero() {
            lit(5.0)
        } else {
            (lit::<T>(0.9) * en.powf(lit(-0.2))).max(lit(0.2)).min(lit(5.0))
        };
        h = if accept {
            (hs * factor).min(opts.h_max)
        } else if drift > opts.monitor_tol && en <= T::one() {
            hs * lit(0.5)
        } else {
            hs * factor.min(lit(0.9))
        };
        if h < opts.h_min {
            return Err(Error::StepSize {
                t: t.to_f64().unwrap_or(f64::NAN),
                detail: format!(
                    "step below minimum; error norm {:e}, invariant drift {:e}",
                    en.to_f64().unwrap_or(f64::NAN),
                    drift.to_f64().unwrap_or(f64::NAN)
                ),
            });
        }
    }
    Ok(out)
}

/// Advances a state by `dt` with a few uniform Dormand-Prince steps no longer
/// than `h_max`. Used to land exactly on event times inside an accepted step.
pub fn advance<T: Real, const N: usize, F>(f: &F, t: T, y: &[T; N], dt: T, h_max: T) -> [T; N]
where
    F: Fn(T, &[T; N]) -> [T; N],
{
    let n = (dt.abs() / h_max).ceil().to_usize().unwrap_or(1).max(1);
    let h = dt / lit(n as f64);
    let mut state = *y;
    let mut tt = t;
    for _ in 0..n {
        state = dopri_step(f, tt, &state, h).0;
        tt += h;
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_energy_and_phase() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let energy = |y: &[f64; 2]| 0.5 * (y[0] * y[0] + y[1] * y[1]);
        let tend = 20.0 * std::f64::consts::PI;
        let traj = integrate(f, 0.0, [1.0, 0.0], tend, OdeOptions::default(), energy).unwrap();
        let last = traj.last().unwrap();
        assert_eq!(last.t, tend);
        assert!((last.y[0] - 1.0).abs() < 1e-9);
        assert!(traj.iter().all(|s| (energy(&s.y) - 0.5).abs() < 1e-10));
    }

    #[test]
    fn backward_integration() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let traj = integrate(f, 1.0, [1.0], 0.0, OdeOptions::default(), |_| 0.0).unwrap();
        assert!((traj.last().unwrap().y[0] - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn monitor_rejection_reports_failure() {
        // The "invariant" here is not conserved, so every step is rejected.
        let f = |_t: f64, y: &[f64; 1]| [1.0 + 0.0 * y[0]];
        let err = integrate(f, 0.0, [0.0], 1.0, OdeOptions::default(), |y| y[0]).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
    }
}
