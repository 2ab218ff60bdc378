//! Second-order forward-mode differentiation in two variables.
//!
//! A [`Jet2`] carries a value together with its gradient and Hessian with
//! respect to two seed variables `(u, v)`. Parametrizations written once
//! against the [`Smooth`] trait can be evaluated on plain scalars or on jets,
//! which is how patches obtain truncation-free first and second partials.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{lit, Real};

/// Value, gradient and Hessian of a scalar function of `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2<T> {
    pub val: T,
    pub du: T,
    pub dv: T,
    pub duu: T,
    pub duv: T,
    pub dvv: T,
}

impl<T: Real> Jet2<T> {
    pub fn new(val: T, du: T, dv: T, duu: T, duv: T, dvv: T) -> Self {
        Self { val, du, dv, duu, duv, dvv }
    }

    /// Seed for the first variable.
    pub fn var_u(val: T) -> Self {
        Self::new(val, T::one(), T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// Seed for the second variable.
    pub fn var_v(val: T) -> Self {
        Self::new(val, T::zero(), T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn constant(val: T) -> Self {
        Self::new(val, T::zero(), T::zero(), T::zero(), T::zero(), T::zero())
    }

    /// Lifts a function of `v` alone, given its value and first two derivatives
    /// at the seed point, into a jet. Used for profiles known only through an
    /// ODE or a quadrature.
    pub fn of_v(val: T, d1: T, d2: T) -> Self {
        Self::new(val, T::zero(), d1, T::zero(), T::zero(), d2)
    }

    /// Same as [`Jet2::of_v`] for a function of `u` alone.
    pub fn of_u(val: T, d1: T, d2: T) -> Self {
        Self::new(val, d1, T::zero(), d2, T::zero(), T::zero())
    }

    /// Composes with a scalar function given `f(a), f'(a), f''(a)`.
    #[inline]
    fn chain(self, f0: T, f1: T, f2: T) -> Self {
        Self {
            val: f0,
            du: f1 * self.du,
            dv: f1 * self.dv,
            duu: f1 * self.duu + f2 * self.du * self.du,
            duv: f1 * self.duv + f2 * self.du * self.dv,
            dvv: f1 * self.dvv + f2 * self.dv * self.dv,
        }
    }

    fn scale(self, s: T) -> Self {
        Self::new(
            self.val * s,
            self.du * s,
            self.dv * s,
            self.duu * s,
            self.duv * s,
            self.dvv * s,
        )
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.val + o.val,
            self.du + o.du,
            self.dv + o.dv,
            self.duu + o.duu,
            self.duv + o.duv,
            self.dvv + o.dvv,
        )
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            val: self.val * o.val,
            du: self.du * o.val + self.val * o.du,
            dv: self.dv * o.val + self.val * o.dv,
            duu: self.duu * o.val + lit::<T>(2.0) * self.du * o.du + self.val * o.duu,
            duv: self.duv * o.val + self.du * o.dv + self.dv * o.du + self.val * o.duv,
            dvv: self.dvv * o.val + lit::<T>(2.0) * self.dv * o.dv + self.val * o.dvv,
        }
    }
}

impl<T: Real> Div for Jet2<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

/// Scalars that support the elementary functions the parametrizations use.
///
/// Implemented for every [`Real`] and for [`Jet2`] over a [`Real`].
pub trait Smooth<T: Real>:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn cst(v: T) -> Self;
    fn value(&self) -> T;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sqrt(self) -> Self;
    fn acos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn recip(self) -> Self;

    fn lit(v: f64) -> Self {
        Self::cst(lit(v))
    }

    fn sq(self) -> Self {
        self * self
    }
}

impl<T: Real> Smooth<T> for T {
    fn cst(v: T) -> Self {
        v
    }
    fn value(&self) -> T {
        *self
    }
    fn sin(self) -> Self {
        num_traits::Float::sin(self)
    }
    fn cos(self) -> Self {
        num_traits::Float::cos(self)
    }
    fn sqrt(self) -> Self {
        num_traits::Float::sqrt(self)
    }
    fn acos(self) -> Self {
        num_traits::Float::acos(self)
    }
    fn exp(self) -> Self {
        num_traits::Float::exp(self)
    }
    fn ln(self) -> Self {
        num_traits::Float::ln(self)
    }
    fn recip(self) -> Self {
        num_traits::Float::recip(self)
    }
}

impl<T: Real> Smooth<T> for Jet2<T> {
    fn cst(v: T) -> Self {
        Jet2::constant(v)
    }
    fn value(&self) -> T {
        self.val
    }
    fn sin(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }
    fn sqrt(self) -> Self {
        let r = self.val.sqrt();
        let d1 = lit::<T>(0.5) / r;
        self.chain(r, d1, -d1 / (lit::<T>(2.0) * self.val))
    }
    fn acos(self) -> Self {
        // acos' = -(1-a²)^(-1/2), acos'' = -a (1-a²)^(-3/2)
        let a = self.val;
        let w = T::one() - a * a;
        let d1 = -w.sqrt().recip();
        self.chain(a.acos(), d1, d1 * a / w)
    }
    fn exp(self) -> Self {
        let e = self.val.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let r = self.val.recip();
        self.chain(self.val.ln(), r, -r * r)
    }
    fn recip(self) -> Self {
        let r = self.val.recip();
        self.chain(r, -r * r, lit::<T>(2.0) * r * r * r)
    }
}
