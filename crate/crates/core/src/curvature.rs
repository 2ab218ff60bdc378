//! Extrinsic geometry of immersed patches in H²×R.
//!
//! A patch supplies exact first and second partials of its parametrization
//! (closed form or [`Jet2`] evaluation). From these and the closed-form
//! Christoffel symbols of the ambient metric we assemble the first and
//! second fundamental forms, the unit normal, the mean curvature, `|A|²`
//! and `Ric(ν, ν)`.
//!
//! Conventions: `ν` is the g-unit vector obtained by raising the Euclidean
//! cross product `X_v × X_u`; `H` is the average of the principal curvatures.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::hyperbolic::{metric_at, Model, Point3};
use crate::jet::{Jet2, Smooth};
use crate::scalar::{lit, Real};

/// Points closer than this to the model boundary are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-8;

/// Value and exact partials of a parametrization at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchJet<T> {
    pub p: [T; 3],
    pub du: [T; 3],
    pub dv: [T; 3],
    pub duu: [T; 3],
    pub duv: [T; 3],
    pub dvv: [T; 3],
}

impl<T: Real> From<[Jet2<T>; 3]> for PatchJet<T> {
    fn from(c: [Jet2<T>; 3]) -> Self {
        Self {
            p: c.map(|j| j.val),
            du: c.map(|j| j.du),
            dv: c.map(|j| j.dv),
            duu: c.map(|j| j.duu),
            duv: c.map(|j| j.duv),
            dvv: c.map(|j| j.dvv),
        }
    }
}

/// A smooth map from a planar parameter domain into H²×R.
pub trait ImmersionPatch<T: Real> {
    /// Model of the horizontal coordinates of the image.
    fn model(&self) -> Model;
    fn eval(&self, u: T, v: T) -> Result<Point3<T>>;
    fn jet(&self, u: T, v: T) -> Result<PatchJet<T>>;
}

/// A patch given by a closed formula, written once for any [`Smooth`] scalar.
pub trait Formula<T: Real> {
    fn chart(&self) -> Model;
    /// Rejects parameter points outside the declared domain.
    fn check(&self, u: T, v: T) -> Result<()>;
    fn map<S: Smooth<T>>(&self, u: S, v: S) -> [S; 3];
}

/// `eval` for a [`Formula`] patch.
pub fn formula_eval<T: Real, P: Formula<T> + ?Sized>(p: &P, u: T, v: T) -> Result<Point3<T>> {
    p.check(u, v)?;
    Ok(Point3::from_array(p.map(u, v)))
}

/// `jet` for a [`Formula`] patch, by forward-mode differentiation.
pub fn formula_jet<T: Real, P: Formula<T> + ?Sized>(p: &P, u: T, v: T) -> Result<PatchJet<T>> {
    p.check(u, v)?;
    Ok(p.map(Jet2::var_u(u), Jet2::var_v(v)).into())
}

/// Implements [`ImmersionPatch`] for a type that implements [`Formula`].
macro_rules! formula_patch {
    ($name:ident<T>) => {
        impl<T: $crate::scalar::Real> $crate::curvature::ImmersionPatch<T> for $name<T> {
            fn model(&self) -> $crate::hyperbolic::Model {
                $crate::curvature::Formula::chart(self)
            }
            fn eval(&self, u: T, v: T) -> $crate::error::Result<$crate::hyperbolic::Point3<T>> {
                $crate::curvature::formula_eval(self, u, v)
            }
            fn jet(&self, u: T, v: T) -> $crate::error::Result<$crate::curvature::PatchJet<T>> {
                $crate::curvature::formula_jet(self, u, v)
            }
        }
    };
    ($name:ty, $t:ty) => {
        impl $crate::curvature::ImmersionPatch<$t> for $name {
            fn model(&self) -> $crate::hyperbolic::Model {
                $crate::curvature::Formula::chart(self)
            }
            fn eval(&self, u: $t, v: $t) -> $crate::error::Result<$crate::hyperbolic::Point3<$t>> {
                $crate::curvature::formula_eval(self, u, v)
            }
            fn jet(&self, u: $t, v: $t) -> $crate::error::Result<$crate::curvature::PatchJet<$t>> {
                $crate::curvature::formula_jet(self, u, v)
            }
        }
    };
}
pub(crate) use formula_patch;

/// Induced metric, normal and curvature data at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtrinsicReport<T> {
    pub e: T,
    pub f: T,
    pub g: T,
    pub nu: [T; 3],
    /// Second fundamental form `(h₁₁, h₁₂, h₂₂)`.
    pub second: [T; 3],
    pub a2: T,
    pub h: T,
    pub ric_nu: T,
}

fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn check_margin<T: Real>(p: &[T; 3], model: Model) -> Result<()> {
    let margin = lit::<T>(BOUNDARY_MARGIN);
    let ok = match model {
        Model::Disk => T::one() - (p[0] * p[0] + p[1] * p[1]).sqrt() >= margin,
        Model::HalfPlane => p[1] >= margin,
    };
    if ok {
        Ok(())
    } else {
        domain(
            "fundamental_forms",
            format!("point ({}, {}) too close to the {model:?} boundary", p[0], p[1]),
        )
    }
}

/// First and second fundamental forms and derived curvature at `(u, v)`.
pub fn fundamental_forms<T: Real, P: ImmersionPatch<T> + ?Sized>(
    patch: &P,
    u: T,
    v: T,
) -> Result<ExtrinsicReport<T>> {
    let jet = patch.jet(u, v)?;
    let model = patch.model();
    check_margin(&jet.p, model)?;
    let metric = metric_at(Point3::from_array(jet.p), model)?;

    let e = metric.dot(&jet.du, &jet.du);
    let f = metric.dot(&jet.du, &jet.dv);
    let g = metric.dot(&jet.dv, &jet.dv);
    let det = e * g - f * f;
    if !(det >= lit(1e-14)) {
        return Err(Error::DegenerateImmersion {
            det: det.to_f64().unwrap_or(f64::NAN),
        });
    }

    let co = cross(&jet.dv, &jet.du);
    let inv = metric.inverse();
    let raised = [inv[0][0] * co[0], inv[1][1] * co[1], inv[2][2] * co[2]];
    let len = metric.dot(&raised, &raised).sqrt();
    let nu = raised.map(|c| c / len);

    let covariant = |xij: &[T; 3], xi: &[T; 3], xj: &[T; 3]| -> [T; 3] {
        let mut out = *xij;
        for (k, o) in out.iter_mut().enumerate() {
            for a in 0..3 {
                for b in 0..3 {
                    let gk = metric.gamma[k][a][b];
                    if gk != T::zero() {
                        *o += gk * xi[a] * xj[b];
                    }
                }
            }
        }
        out
    };
    let h11 = metric.dot(&covariant(&jet.duu, &jet.du, &jet.du), &nu);
    let h12 = metric.dot(&covariant(&jet.duv, &jet.du, &jet.dv), &nu);
    let h22 = metric.dot(&covariant(&jet.dvv, &jet.dv, &jet.dv), &nu);

    // Shape operator S = I⁻¹ II.
    let s11 = (g * h11 - f * h12) / det;
    let s12 = (g * h12 - f * h22) / det;
    let s21 = (e * h12 - f * h11) / det;
    let s22 = (e * h22 - f * h12) / det;
    let h = (s11 + s22) * lit(0.5);
    let a2 = s11 * s11 + lit::<T>(2.0) * s12 * s21 + s22 * s22;
    let ric_nu = -metric.factor() * (nu[0] * nu[0] + nu[1] * nu[1]);

    Ok(ExtrinsicReport {
        e,
        f,
        g,
        nu,
        second: [h11, h12, h22],
        a2,
        h,
        ric_nu,
    })
}

/// `Ric(ν, ν)` of H²×R along the patch normal: minus the squared H²-length
/// of the horizontal part of `ν`.
pub fn ricci_normal<T: Real, P: ImmersionPatch<T> + ?Sized>(patch: &P, u: T, v: T) -> Result<T> {
    fundamental_forms(patch, u, v).map(|r| r.ric_nu)
}

/// `max(|E - G|, |F|) / max(E, G)`; zero for a conformal parametrization.
pub fn conformality_defect<T: Real, P: ImmersionPatch<T> + ?Sized>(
    patch: &P,
    u: T,
    v: T,
) -> Result<T> {
    let r = fundamental_forms(patch, u, v)?;
    Ok((r.e - r.g).abs().max(r.f.abs()) / r.e.max(r.g))
}

/// Largest relative discrepancy between the patch jet and central
/// differences of `eval` with step `h`.
pub fn jet_consistency<T: Real, P: ImmersionPatch<T> + ?Sized>(
    patch: &P,
    u: T,
    v: T,
    h: T,
) -> Result<T> {
    let jet = patch.jet(u, v)?;
    let at = |a: T, b: T| patch.eval(a, b).map(|p| p.to_array());
    let (pu, mu) = (at(u + h, v)?, at(u - h, v)?);
    let (pv, mv) = (at(u, v + h)?, at(u, v - h)?);
    let (pp, pm, mp, mm) = (at(u + h, v + h)?, at(u + h, v - h)?, at(u - h, v + h)?, at(u - h, v - h)?);
    let two = lit::<T>(2.0);
    let mut worst = T::zero();
    let mut rel = |exact: T, approx: T| {
        let d = (exact - approx).abs() / (T::one() + exact.abs());
        if d > worst {
            worst = d;
        }
    };
    for k in 0..3 {
        rel(jet.du[k], (pu[k] - mu[k]) / (two * h));
        rel(jet.dv[k], (pv[k] - mv[k]) / (two * h));
        rel(jet.duu[k], (pu[k] - two * jet.p[k] + mu[k]) / (h * h));
        rel(jet.dvv[k], (pv[k] - two * jet.p[k] + mv[k]) / (h * h));
        rel(jet.duv[k], (pp[k] - pm[k] - mp[k] + mm[k]) / (lit::<T>(4.0) * h * h));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (u, v) ↦ (u, v, c) in the half-plane: a totally geodesic slice.
    struct Slice;
    formula_patch!(Slice, f64);
    impl Formula<f64> for Slice {
        fn chart(&self) -> Model {
            Model::HalfPlane
        }
        fn check(&self, _u: f64, v: f64) -> Result<()> {
            if v > 0.0 { Ok(()) } else { domain("slice", "v <= 0") }
        }
        fn map<S: Smooth<f64>>(&self, u: S, v: S) -> [S; 3] {
            [u, v, S::lit(0.7)]
        }
    }

    /// Vertical geodesic {x = 0} × R in the half-plane: (u, v) ↦ (0, e^u, v).
    struct VerticalPlane;
    formula_patch!(VerticalPlane, f64);
    impl Formula<f64> for VerticalPlane {
        fn chart(&self) -> Model {
            Model::HalfPlane
        }
        fn check(&self, _u: f64, _v: f64) -> Result<()> {
            Ok(())
        }
        fn map<S: Smooth<f64>>(&self, u: S, v: S) -> [S; 3] {
            [S::lit(0.0), u.exp(), v]
        }
    }

    /// Totally geodesic disk slice through the origin with a nonconformal chart.
    struct DiskSlice;
    formula_patch!(DiskSlice, f64);
    impl Formula<f64> for DiskSlice {
        fn chart(&self) -> Model {
            Model::Disk
        }
        fn check(&self, _u: f64, _v: f64) -> Result<()> {
            Ok(())
        }
        fn map<S: Smooth<f64>>(&self, u: S, v: S) -> [S; 3] {
            [u * S::lit(0.5), v * S::lit(0.3) + u * S::lit(0.1), S::lit(-1.0)]
        }
    }

    /// Vertical plane over the disk geodesic {y = 0}: (u, v) ↦ (tanh u, 0, v)
    struct DiskVerticalPlane;
    formula_patch!(DiskVerticalPlane, f64);
    impl Formula<f64> for DiskVerticalPlane {
        fn chart(&self) -> Model {
            Model::Disk
        }
        fn check(&self, _u: f64, _v: f64) -> Result<()> {
            Ok(())
        }
        fn map<S: Smooth<f64>>(&self, u: S, v: S) -> [S; 3] {
            let e = (u * S::lit(2.0)).exp();
            [(e - S::lit(1.0)) / (e + S::lit(1.0)), S::lit(0.0), v]
        }
    }

    #[test]
    fn horizontal_slice_is_totally_geodesic() {
        for (u, v) in [(0.0, 1.0), (2.0, 0.3), (-1.0, 4.0)] {
            let r = fundamental_forms(&Slice, u, v).unwrap();
            assert!(r.h.abs() < 1e-14 && r.a2.abs() < 1e-14);
            assert!(r.ric_nu.abs() < 1e-15);
            assert!((r.nu[2].abs() - 1.0).abs() < 1e-15);
            assert!(conformality_defect(&Slice, u, v).unwrap() < 1e-15);
        }
        let r = fundamental_forms(&DiskSlice, 0.4, -0.9).unwrap();
        assert!(r.h.abs() < 1e-14 && r.a2.abs() < 1e-14 && r.ric_nu.abs() < 1e-15);
    }

    #[test]
    fn vertical_plane_has_horizontal_normal() {
        for (u, v) in [(0.0, 0.0), (1.5, -2.0), (-0.7, 3.0)] {
            let r = fundamental_forms(&VerticalPlane, u, v).unwrap();
            assert!((r.ric_nu + 1.0).abs() < 1e-14);
            assert!(r.h.abs() < 1e-14 && r.a2.abs() < 1e-13);
            let r = fundamental_forms(&DiskVerticalPlane, u * 0.5, v).unwrap();
            assert!((r.ric_nu + 1.0).abs() < 1e-13);
            assert!(r.h.abs() < 1e-12 && r.a2.abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_points_rejected() {
        assert!(fundamental_forms(&Slice, 0.0, 1e-9).is_err());
        assert!(matches!(
            fundamental_forms(&VerticalPlane, -30.0, 0.0),
            Err(Error::Domain { .. })
        ));
    }

    /// Collapses the u direction: X = (0, 1, v).
    struct Collapsed;
    formula_patch!(Collapsed, f64);
    impl Formula<f64> for Collapsed {
        fn chart(&self) -> Model {
            Model::HalfPlane
        }
        fn check(&self, _u: f64, _v: f64) -> Result<()> {
            Ok(())
        }
        fn map<S: Smooth<f64>>(&self, _u: S, v: S) -> [S; 3] {
            [S::lit(0.0), S::lit(1.0), v]
        }
    }

    #[test]
    fn degenerate_immersion_detected() {
        assert!(matches!(
            fundamental_forms(&Collapsed, 0.0, 0.0),
            Err(Error::DegenerateImmersion { .. })
        ));
    }

    #[test]
    fn jets_match_finite_differences() {
        assert!(jet_consistency(&DiskVerticalPlane, 0.3, 0.2, 1e-4).unwrap() < 1e-6);
        assert!(jet_consistency(&VerticalPlane, 0.3, 0.2, 1e-4).unwrap() < 1e-6);
    }
}
