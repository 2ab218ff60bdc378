//! Invariant suites behind `h2r verify`, producing a JSON-serializable report.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bvp::{
    manufactured_solution, manufactured_source, moment_check_pipeline, solve_inhomogeneous, BoundaryData,
    SourceData,
};
use crate::catenoid::{integrate_profile, period, profile_options, Catenoid};
use crate::curvature::{conformality_defect, fundamental_forms};
use crate::error::{Error, Result};
use crate::jacobi::{jacobi_apply, second_order_closed, series_integral, AnalyticField, FieldKind, SeriesKind};
use crate::parabolic::{fhat_in_disk, q_residual, Gauge, ParabolicCatenoid};
use crate::tall::{d1, lambda_elliptic, lambda_quadrature, TallRectangle};

/// Which checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Geometry,
    Jacobi,
    Bvp,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "geometry" => Ok(Suite::Geometry),
            "jacobi" => Ok(Suite::Jacobi),
            "bvp" => Ok(Suite::Bvp),
            _ => Err(Error::Input(format!("unknown suite '{s}'"))),
        }
    }
}

/// Pass thresholds of the verification suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub mean_curvature: f64,
    pub a2: f64,
    pub conformality: f64,
    pub first_integral: f64,
    pub q_membership: f64,
    pub elliptic: f64,
    pub jacobi: f64,
    pub gauge: f64,
    pub series: f64,
    pub trace_integral: f64,
    pub moment: f64,
    pub manufactured: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mean_curvature: 1e-6,
            a2: 1e-8,
            conformality: 1e-8,
            first_integral: 1e-9,
            q_membership: 1e-12,
            elliptic: 1e-8,
            jacobi: 1e-12,
            gauge: 1e-14,
            series: 1e-8,
            trace_integral: 1e-8,
            moment: 1e-5,
            manufactured: 1e-3,
        }
    }
}

impl Tolerances {
    /// Applies an override string: either a bare factor that scales every
    /// tolerance, or a comma-separated list of `name=value` pairs.
    pub fn with_override(mut self, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(self);
        }
        if let Ok(factor) = spec.parse::<f64>() {
            if !(factor > 0.0) {
                return Err(Error::Input(format!("tolerance factor {factor} must be positive")));
            }
            let mut v = serde_json::to_value(self)?;
            for (_, x) in v.as_object_mut().expect("struct serializes to an object") {
                *x = (x.as_f64().unwrap_or(0.0) * factor).into();
            }
            return Ok(serde_json::from_value(v)?);
        }
        let mut v = serde_json::to_value(self)?;
        let obj = v.as_object_mut().expect("struct serializes to an object");
        for pair in spec.split(',') {
            let (key, val) = pair
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("tolerance override '{pair}' is not name=value")))?;
            let key = key.trim();
            let val: f64 = val
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("tolerance '{key}' has a non-numeric value")))?;
            match obj.get_mut(key) {
                Some(slot) => *slot = val.into(),
                None => return Err(Error::Input(format!("unknown tolerance '{key}'"))),
            }
        }
        self = serde_json::from_value(v)?;
        Ok(self)
    }
}

/// Curvature statistics for one surface.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub parameter: f64,
    pub samples: usize,
    pub seed: u64,
    pub max_abs_h: f64,
    /// `max | |A|² - 2 sin²t |`, parabolic catenoids only.
    pub max_a2_deviation: Option<f64>,
    pub max_conformality_defect: Option<f64>,
}

/// A scalar check against a threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub families: Vec<FamilyReport>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

enum Family {
    Catenoid(f64),
    Parabolic(f64, Gauge),
    Tall(f64),
}

const SAMPLES: usize = 200;

fn sample_family(fam: &Family, seed: u64) -> Result<FamilyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_h = 0.0f64;
    let mut max_a2 = None;
    let mut max_conf = None;
    let track = |slot: &mut Option<f64>, v: f64| *slot = Some(slot.unwrap_or(0.0).max(v));
    let (name, param) = match *fam {
        Family::Catenoid(k) => {
            let cat = Catenoid::new(k)?;
            let hh = 0.5 * cat.height();
            let per = 2.0 * std::f64::consts::PI / k.sqrt();
            for _ in 0..SAMPLES {
                let th = rng.gen_range(0.0..per);
                let t = rng.gen_range(-0.97 * hh..0.97 * hh);
                max_h = max_h.max(fundamental_forms(&cat, th, t)?.h.abs());
                track(&mut max_conf, conformality_defect(&cat, th, t)?);
            }
            ("catenoid".to_string(), k)
        }
        Family::Parabolic(l, gauge) => {
            let cat = ParabolicCatenoid::new(l, gauge)?;
            let (a, b) = gauge.t_range::<f64>();
            for _ in 0..SAMPLES {
                let x = rng.gen_range(-5.0..5.0);
                let t = rng.gen_range(a + 1e-3..b - 1e-3);
                let r = fundamental_forms(&cat, x, t)?;
                max_h = max_h.max(r.h.abs());
                let w = match gauge {
                    Gauge::Psi => t.sin().powi(2),
                    Gauge::Fhat => t.cos().powi(2),
                };
                track(&mut max_a2, (r.a2 - 2.0 * w).abs());
                track(&mut max_conf, conformality_defect(&cat, x, t)?);
            }
            let g = match gauge {
                Gauge::Psi => "psi",
                Gauge::Fhat => "fhat",
            };
            (format!("parabolic_{g}"), l)
        }
        Family::Tall(d) => {
            let lo = d1(d)?;
            for upper in [true, false] {
                let patch = TallRectangle::new(d, upper)?;
                for _ in 0..SAMPLES {
                    let x = rng.gen_range(lo + 0.01 * (1.0 - lo)..0.99);
                    let y = rng.gen_range(-0.95..0.95);
                    max_h = max_h.max(fundamental_forms(&patch, x, y)?.h.abs());
                }
            }
            ("tall".to_string(), d)
        }
    };
    let samples = if matches!(fam, Family::Tall(_)) { 2 * SAMPLES } else { SAMPLES };
    Ok(FamilyReport {
        family: name,
        parameter: param,
        samples,
        seed,
        max_abs_h: max_h,
        max_a2_deviation: max_a2,
        max_conformality_defect: max_conf,
    })
}

fn geometry(seed: u64, tol: &Tolerances, families: &mut Vec<FamilyReport>, checks: &mut Vec<Check>) -> Result<()> {
    let mut jobs = Vec::new();
    for k in [0.25, 1.0, 4.0] {
        jobs.push(Family::Catenoid(k));
    }
    for l in [0.5, 1.0, 2.0] {
        jobs.push(Family::Parabolic(l, Gauge::Psi));
        jobs.push(Family::Parabolic(l, Gauge::Fhat));
    }
    for d in [0.3, 0.7] {
        jobs.push(Family::Tall(d));
    }
    let reports = jobs
        .par_iter()
        .enumerate()
        .map(|(i, f)| sample_family(f, seed.wrapping_add(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    for r in &reports {
        let label = format!("{} {}", r.family, r.parameter);
        checks.push(Check::below(format!("max |H| {label}"), r.max_abs_h, tol.mean_curvature));
        if let Some(a) = r.max_a2_deviation {
            checks.push(Check::below(format!("|A|^2 deviation {label}"), a, tol.a2));
        }
        if let Some(c) = r.max_conformality_defect {
            checks.push(Check::below(format!("conformality {label}"), c, tol.conformality));
        }
    }
    families.extend(reports);

    let drifts = [0.25, 1.0, 4.0]
        .par_iter()
        .map(|&k| {
            let p = integrate_profile(k, 10.0 * period(k)?, profile_options())?;
            Ok((k, p.first_integral_drift()))
        })
        .collect::<Result<Vec<_>>>()?;
    for (k, drift) in drifts {
        checks.push(Check::below(format!("first integral drift k={k}"), drift, tol.first_integral));
    }

    let mut q = 0.0f64;
    for i in 0..20 {
        for j in 0..20 {
            let x = -3.0 + 6.0 * i as f64 / 19.0;
            let t = -1.5 + 3.0 * j as f64 / 19.0;
            q = q.max(q_residual(fhat_in_disk(x, t)?).abs());
        }
    }
    checks.push(Check::below("Q membership of the parabolic catenoid", q, tol.q_membership));

    let mut ell = 0.0f64;
    for i in 0..10 {
        let d = 0.05 + 0.09 * i as f64;
        let lo = d1(d)?;
        for j in 0..10 {
            let x = lo + (1.0 - lo) * (j as f64 + 0.5) / 10.0;
            ell = ell.max((lambda_quadrature(d, x)? - lambda_elliptic(d, x)?).abs());
        }
    }
    checks.push(Check::below("tall profile: elliptic vs quadrature", ell, tol.elliptic));
    Ok(())
}

fn jacobi(seed: u64, tol: &Tolerances, checks: &mut Vec<Check>) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for gauge in [Gauge::Psi, Gauge::Fhat] {
        let (a, b) = gauge.t_range::<f64>();
        for kind in FieldKind::ALL {
            let f = AnalyticField::new(kind, gauge);
            let mut worst = 0.0f64;
            for _ in 0..SAMPLES {
                let x = rng.gen_range(-4.0..4.0);
                let t = rng.gen_range(a + 1e-6..b - 1e-6);
                worst = worst.max(jacobi_apply(&f, x, t)?.abs());
            }
            checks.push(Check::below(format!("|L {kind:?}| ({gauge:?} gauge)"), worst, tol.jacobi));
        }
    }
    let (mut shift, mut flip) = (0.0f64, 0.0f64);
    for _ in 0..SAMPLES {
        let x = rng.gen_range(-4.0..4.0);
        let t = rng.gen_range(1e-3..std::f64::consts::PI - 1e-3);
        let wp = AnalyticField::new(FieldKind::WCat, Gauge::Psi).value(x, t)?;
        let wf = AnalyticField::new(FieldKind::WCat, Gauge::Fhat).value(x, t - std::f64::consts::FRAC_PI_2)?;
        let wt = AnalyticField::new(FieldKind::WTall, Gauge::Psi).value(x, t)?;
        shift = shift.max((wp - wf).abs());
        flip = flip.max((wt + wp).abs());
    }
    checks.push(Check::below("gauge shift of the catenoid field", shift, tol.gauge));
    checks.push(Check {
        name: "tall field equals minus catenoid field".into(),
        value: flip,
        tolerance: 0.0,
        passed: flip == 0.0,
    });
    let ys: Vec<f64> = (1..10).map(|j| 0.1 * j as f64).collect();
    let errs = ys
        .par_iter()
        .map(|&y| {
            let mut e = [0.0f64; 3];
            for x in [0.0, 1.0] {
                e[0] = e[0].max((series_integral(SeriesKind::Cat, 0, x, y)? - y.acos()).abs());
                e[1] = e[1]
                    .max(series_integral(SeriesKind::Cat, 1, x, y)?.abs())
                    .max(series_integral(SeriesKind::Tall, 1, x, y)?.abs());
                for kind in [SeriesKind::Cat, SeriesKind::Tall] {
                    e[2] = e[2].max((series_integral(kind, 2, x, y)? - second_order_closed(kind, x, y)).abs());
                }
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = |i: usize| errs.iter().map(|e| e[i]).fold(0.0, f64::max);
    checks.push(Check::below("series: zeroth-order integral", worst(0), tol.series));
    checks.push(Check::below("series: first-order integrals", worst(1), tol.series));
    checks.push(Check::below("series: second-order integrals", worst(2), tol.series));
    Ok(())
}

fn bvp(tol: &Tolerances, checks: &mut Vec<Check>) -> Result<()> {
    let bd = BoundaryData::from_fn(20.0, 256, |x: f64| x * (-x * x).exp(), |_: f64| 0.0)?;
    let pipe = moment_check_pipeline::<f64>(&bd, 64)?;
    let trace = pipe.trace_integrals[0].abs().max(pipe.trace_integrals[1].abs());
    checks.push(Check::below("zero-integral trace identity", trace, tol.trace_integral));
    let last = pipe.moments.last().expect("at least one radius");
    checks.push(Check::below(format!("moment at r = {}", last.r), last.value.abs(), tol.moment));

    let mut errs = Vec::new();
    for nt in [33usize, 65, 129] {
        let src = SourceData::from_fn(12.0, 256, nt, manufactured_source)?;
        let u = solve_inhomogeneous(&src)?;
        let mut e = 0.0f64;
        for i in 0..u.nx {
            for j in 0..nt {
                e = e.max((u.at(i, j) - manufactured_solution(u.x(i), u.t(j))).abs());
            }
        }
        errs.push(e);
    }
    let peak = 0.5f64.sqrt() * (-0.5f64).exp();
    checks.push(Check::below("manufactured solution relative error", errs[2] / peak, tol.manufactured));
    let ratio = errs[1] / errs[2];
    checks.push(Check {
        name: "manufactured refinement ratio".into(),
        value: ratio,
        tolerance: 0.5,
        passed: (ratio - 4.0).abs() <= 0.5,
    });
    Ok(())
}

/// Runs a suite with a base seed; the same seed reproduces the report.
pub fn run_suite(suite: Suite, seed: u64, tol: Tolerances) -> Result<VerifyReport> {
    let mut families = Vec::new();
    let mut checks = Vec::new();
    if matches!(suite, Suite::All | Suite::Geometry) {
        geometry(seed, &tol, &mut families, &mut checks)?;
    }
    if matches!(suite, Suite::All | Suite::Jacobi) {
        jacobi(seed, &tol, &mut checks)?;
    }
    if matches!(suite, Suite::All | Suite::Bvp) {
        bvp(&tol, &mut checks)?;
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        suite,
        seed,
        tolerances: tol,
        families,
        checks,
        passed,
    })
}
