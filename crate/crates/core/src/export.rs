//! CSV writers for profiles and height tables.

use std::io::Write;

use serde::Serialize;

use crate::catenoid::{first_integral, height, CatenoidProfile};
use crate::error::Result;
use crate::tall::{height_tall, lambda_quadrature, TallRectSpec};

/// `t,r,rprime,first_integral_residual` for every accepted step.
pub fn write_catenoid_profile<W: Write>(p: &CatenoidProfile<f64>, mut w: W) -> Result<()> {
    writeln!(w, "t,r,rprime,first_integral_residual")?;
    for s in &p.samples {
        let res = first_integral(s.r, s.rprime)? - p.k;
        writeln!(w, "{},{},{},{}", s.t, s.r, s.rprime, res)?;
    }
    Ok(())
}

/// `x,lambda` on `n` points of `[d₁, 1]`, clustered at the turning point.
pub fn write_tall_profile<W: Write>(spec: &TallRectSpec<f64>, n: usize, mut w: W) -> Result<()> {
    writeln!(w, "x,lambda")?;
    let n = n.max(2);
    for i in 0..n {
        let s = i as f64 / (n - 1) as f64;
        let x = if i + 1 == n { 1.0 } else { spec.d1 + (1.0 - spec.d1) * s * s };
        writeln!(w, "{},{}", x, lambda_quadrature(spec.d, x)?)?;
    }
    Ok(())
}

/// One row of a height table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeightRow {
    pub parameter: f64,
    pub height: f64,
    /// Whether the height moved in the expected direction from the previous row.
    pub monotone: bool,
    pub above_pi: bool,
    pub below_pi: bool,
}

fn table<F: Fn(f64) -> Result<f64>>(params: &[f64], f: F, increasing: bool) -> Result<Vec<HeightRow>> {
    let mut rows: Vec<HeightRow> = Vec::with_capacity(params.len());
    for &p in params {
        let h = f(p)?;
        let monotone = rows.last().is_none_or(|r| if increasing { h > r.height } else { h < r.height });
        rows.push(HeightRow {
            parameter: p,
            height: h,
            monotone,
            above_pi: h > std::f64::consts::PI,
            below_pi: h < std::f64::consts::PI,
        });
    }
    Ok(rows)
}

/// Catenoid heights `h(k)`, expected to decrease.
pub fn catenoid_heights(ks: &[f64]) -> Result<Vec<HeightRow>> {
    table(ks, height, false)
}

/// Tall-rectangle heights `h_d`, expected to increase.
pub fn tall_heights(ds: &[f64]) -> Result<Vec<HeightRow>> {
    table(ds, height_tall, true)
}

pub fn write_heights<W: Write>(rows: &[HeightRow], name: &str, mut w: W) -> Result<()> {
    writeln!(w, "{name},height,monotone,above_pi,below_pi")?;
    for r in rows {
        writeln!(w, "{},{},{},{},{}", r.parameter, r.height, r.monotone, r.above_pi, r.below_pi)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catenoid::{integrate_profile, profile_options};

    #[test]
    fn profile_csv_columns() {
        let p = integrate_profile(1.0, 1.0, profile_options()).unwrap();
        let mut buf = Vec::new();
        write_catenoid_profile(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,r,rprime,first_integral_residual");
        for l in lines {
            let res: f64 = l.split(',').nth(3).unwrap().parse().unwrap();
            assert!(res.abs() < 1e-9);
        }
    }

    #[test]
    fn height_flags() {
        let rows = tall_heights(&[0.01, 0.5]).unwrap();
        assert!(rows.iter().all(|r| r.above_pi && r.monotone));
        let rows = catenoid_heights(&[0.1, 1.0]).unwrap();
        assert!(rows.iter().all(|r| r.below_pi && r.monotone));
        let spec = TallRectSpec::new(0.3).unwrap();
        let mut buf = Vec::new();
        write_tall_profile(&spec, 10, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 11);
    }
}
