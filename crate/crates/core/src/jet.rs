//! Truncated Taylor arithmetic in one variable.
//!
//! A [`Jet`] of order `K` at base point `x` stores the normalized Taylor
//! coefficients `c[k] = u^(k)(x) / k!` for `k = 0..=K`. Arithmetic is exact
//! truncated power-series arithmetic, so for polynomials of degree `<= K` the
//! derivatives are exact up to rounding.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};
use num_traits::Float;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    at: f64,
    coeffs: Vec<f64>,
}

impl Jet {
    /// Builds a jet from normalized coefficients. Panics on an empty slice.
    pub fn new(at: f64, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the value coefficient");
        Jet { at, coeffs }
    }

    pub fn constant(at: f64, value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { at, coeffs }
    }

    /// The identity function `x` expanded at `at`.
    pub fn variable(at: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = at;
        if order > 0 {
            coeffs[1] = 1.0;
        }
        Jet { at, coeffs }
    }

    pub fn at(&self) -> f64 {
        self.at
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Normalized coefficient `k`; zero beyond the order.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// The `k`-th derivative `k! * c[k]`.
    pub fn derivative(&self, k: usize) -> f64 {
        self.coeff(k) * factorial(k)
    }

    pub fn derivatives(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|k| self.derivative(k)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let n = (order + 1).min(self.coeffs.len());
        Jet {
            at: self.at,
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// Jet of `u'`, one order lower. Panics on an order-0 jet.
    pub fn differentiate(&self) -> Jet {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        let coeffs = (1..self.coeffs.len())
            .map(|k| k as f64 * self.coeffs[k])
            .collect();
        Jet { at: self.at, coeffs }
    }

    /// Jet of the antiderivative taking the value `value` at the base point,
    /// one order higher.
    pub fn integrate(&self, value: f64) -> Jet {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(value);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64),
        );
        Jet { at: self.at, coeffs }
    }

    pub fn scale(&self, s: f64) -> Jet {
        self.map_coeffs(|c| c * s)
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Evaluates the truncated Taylor polynomial at `at + h`.
    pub fn eval_offset(&self, h: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * h + c)
    }

    fn map_coeffs(&self, op: impl Fn(f64) -> f64) -> Jet {
        Jet {
            at: self.at,
            coeffs: self.coeffs.iter().map(|&c| op(c)).collect(),
        }
    }

    fn zip(&self, other: &Jet, op: impl Fn(f64, f64) -> f64) -> Jet {
        debug_assert!(self.at == other.at || self.at.is_nan() || other.at.is_nan());
        let n = self.coeffs.len().min(other.coeffs.len());
        Jet {
            at: self.at,
            coeffs: (0..n).map(|k| op(self.coeffs[k], other.coeffs[k])).collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        let n = self.coeffs.len().min(other.coeffs.len());
        let (a, b) = (&self.coeffs, &other.coeffs);
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
            .collect();
        Jet { at: self.at, coeffs }
    }

    /// `self / other`; `None` when the divisor vanishes at the base point.
    pub fn checked_div(&self, other: &Jet) -> Option<Jet> {
        let v0 = other.coeffs[0];
        if v0 == 0.0 {
            return None;
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut w = Vec::with_capacity(n);
        for k in 0..n {
            let s: f64 = (0..k).map(|j| w[j] * other.coeffs[k - j]).sum();
            w.push((self.coeffs[k] - s) / v0);
        }
        Some(Jet { at: self.at, coeffs: w })
    }

    pub fn recip(&self) -> Option<Jet> {
        Jet::constant(self.at, 1.0, self.order()).checked_div(self)
    }

    pub fn exp(&self) -> Jet {
        let u = &self.coeffs;
        let mut w = Vec::with_capacity(u.len());
        w.push(u[0].exp());
        for k in 1..u.len() {
            let s: f64 = (1..=k).map(|j| j as f64 * u[j] * w[k - j]).sum();
            w.push(s / k as f64);
        }
        Jet { at: self.at, coeffs: w }
    }

    /// Natural logarithm; requires a positive value.
    pub fn ln(&self) -> Option<Jet> {
        let u = &self.coeffs;
        if !(u[0] > 0.0) {
            return None;
        }
        let mut w = Vec::with_capacity(u.len());
        w.push(u[0].ln());
        for k in 1..u.len() {
            let s: f64 = (1..k).map(|j| j as f64 * w[j] * u[k - j]).sum();
            w.push((u[k] - s / k as f64) / u[0]);
        }
        Some(Jet { at: self.at, coeffs: w })
    }

    /// Square root; requires a positive value (or zero for an order-0 jet).
    pub fn sqrt(&self) -> Option<Jet> {
        let u = &self.coeffs;
        if u[0] < 0.0 || (u[0] == 0.0 && u.len() > 1) || u[0].is_nan() {
            return None;
        }
        let mut w = Vec::with_capacity(u.len());
        w.push(u[0].sqrt());
        for k in 1..u.len() {
            let s: f64 = (1..k).map(|j| w[j] * w[k - j]).sum();
            w.push((u[k] - s) / (2.0 * w[0]));
        }
        Some(Jet { at: self.at, coeffs: w })
    }

    pub fn sin_cos(&self) -> (Jet, Jet) {
        self.trig_pair(-1.0, |x| (x.sin(), x.cos()))
    }

    pub fn sinh_cosh(&self) -> (Jet, Jet) {
        self.trig_pair(1.0, |x| (x.sinh(), x.cosh()))
    }

    // s' = c u', c' = sign * s u'
    fn trig_pair(&self, sign: f64, base: impl Fn(f64) -> (f64, f64)) -> (Jet, Jet) {
        let u = &self.coeffs;
        let (s0, c0) = base(u[0]);
        let mut s = Vec::with_capacity(u.len());
        let mut c = Vec::with_capacity(u.len());
        s.push(s0);
        c.push(c0);
        for k in 1..u.len() {
            let ds: f64 = (1..=k).map(|j| j as f64 * u[j] * c[k - j]).sum();
            let dc: f64 = (1..=k).map(|j| j as f64 * u[j] * s[k - j]).sum();
            s.push(ds / k as f64);
            c.push(sign * dc / k as f64);
        }
        (Jet { at: self.at, coeffs: s }, Jet { at: self.at, coeffs: c })
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    pub fn tan(&self) -> Option<Jet> {
        let (s, c) = self.sin_cos();
        s.checked_div(&c)
    }

    pub fn sinh(&self) -> Jet {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Jet {
        self.sinh_cosh().1
    }

    pub fn tanh(&self) -> Jet {
        let (s, c) = self.sinh_cosh();
        // cosh never vanishes
        s.checked_div(&c).expect("cosh is positive")
    }

    pub fn atan(&self) -> Jet {
        let u = &self.coeffs;
        let v = (self * self).add_scalar(1.0);
        let mut w = Vec::with_capacity(u.len());
        w.push(u[0].atan());
        for k in 1..u.len() {
            let s: f64 = (1..k).map(|j| j as f64 * w[j] * v.coeffs[k - j]).sum();
            w.push((k as f64 * u[k] - s) / (k as f64 * v.coeffs[0]));
        }
        Jet { at: self.at, coeffs: w }
    }

    /// Integer power by repeated squaring; exact at a zero base for `n >= 0`.
    pub fn powi(&self, n: i32) -> Option<Jet> {
        let mut result = Jet::constant(self.at, 1.0, self.order());
        let mut base = self.clone();
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        if n < 0 {
            result.recip()
        } else {
            Some(result)
        }
    }

    /// Real power `u^a` for a positive base.
    pub fn powf(&self, a: f64) -> Option<Jet> {
        let u = &self.coeffs;
        if !(u[0] > 0.0) {
            return None;
        }
        let mut w = Vec::with_capacity(u.len());
        w.push(u[0].powf(a));
        for k in 1..u.len() {
            let s: f64 = (0..k)
                .map(|j| (a * (k - j) as f64 - j as f64) * u[k - j] * w[j])
                .sum();
            w.push(s / (k as f64 * u[0]));
        }
        Some(Jet { at: self.at, coeffs: w })
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.product(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map_coeffs(|c| -c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_series_at_zero() {
        let e = Jet::variable(0.0, 4).exp();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (c, w) in e.coeffs().iter().zip(want) {
            assert_relative_eq!(*c, w, epsilon = 1e-15);
        }
    }

    #[test]
    fn polynomial_square() {
        let x = Jet::variable(3.0, 2);
        let sq = &x * &x;
        assert_eq!(sq.coeffs(), &[9.0, 6.0, 1.0]);
    }

    #[test]
    fn quotient_geometric_series() {
        let x = Jet::variable(0.0, 5);
        let one = Jet::constant(0.0, 1.0, 5);
        let q = one.checked_div(&(&Jet::constant(0.0, 1.0, 5) - &x)).unwrap();
        for c in q.coeffs() {
            assert_relative_eq!(*c, 1.0, epsilon = 1e-15);
        }
        assert!(one.checked_div(&x).is_none());
    }

    #[test]
    fn ln_sqrt_atan_first_derivatives() {
        let x = Jet::variable(2.0, 3);
        assert_relative_eq!(x.ln().unwrap().derivative(1), 0.5, epsilon = 1e-15);
        assert_relative_eq!(x.ln().unwrap().derivative(2), -0.25, epsilon = 1e-15);
        assert_relative_eq!(x.sqrt().unwrap().derivative(1), 0.5 / 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(x.atan().derivative(1), 0.2, epsilon = 1e-15);
        // d2/dx2 atan = -2x / (1 + x^2)^2
        assert_relative_eq!(x.atan().derivative(2), -4.0 / 25.0, epsilon = 1e-15);
        assert!(Jet::variable(-1.0, 2).ln().is_none());
        assert!(Jet::variable(0.0, 2).sqrt().is_none());
        assert_eq!(Jet::constant(0.0, 0.0, 0).sqrt().unwrap().value(), 0.0);
    }

    #[test]
    fn trig_identities() {
        let x = Jet::variable(0.7, 6);
        let (s, c) = x.sin_cos();
        let one = &(&s * &s) + &(&c * &c);
        assert_relative_eq!(one.value(), 1.0, epsilon = 1e-15);
        for k in 1..=6 {
            assert!(one.coeff(k).abs() < 1e-15);
        }
        let (sh, ch) = x.sinh_cosh();
        let one = &(&ch * &ch) - &(&sh * &sh);
        for k in 1..=6 {
            assert!(one.coeff(k).abs() < 1e-14);
        }
        // tan' = 1 + tan^2
        let t = x.tan().unwrap();
        assert_relative_eq!(t.derivative(1), 1.0 + t.value() * t.value(), epsilon = 1e-14);
        let th = x.tanh();
        assert_relative_eq!(th.derivative(1), 1.0 - th.value() * th.value(), epsilon = 1e-14);
    }

    #[test]
    fn powers_agree() {
        let x = Jet::variable(1.3, 5);
        let u = &x * &x + Jet::constant(1.3, 0.5, 5);
        let cube = u.powi(3).unwrap();
        let via_f = u.powf(3.0).unwrap();
        let via_exp = (u.ln().unwrap().scale(3.0)).exp();
        for k in 0..=5 {
            assert_relative_eq!(cube.coeff(k), via_f.coeff(k), max_relative = 1e-13, epsilon = 1e-13);
            assert_relative_eq!(cube.coeff(k), via_exp.coeff(k), max_relative = 1e-12, epsilon = 1e-12);
        }
        let inv = u.powi(-2).unwrap();
        let inv_f = u.powf(-2.0).unwrap();
        for k in 0..=5 {
            assert_relative_eq!(inv.coeff(k), inv_f.coeff(k), max_relative = 1e-13, epsilon = 1e-14);
        }
        // exact at a zero base
        let z = Jet::variable(0.0, 4).powi(3).unwrap();
        assert_eq!(z.coeffs(), &[0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(Jet::variable(0.0, 2).powi(-1).is_none());
        assert!(Jet::variable(-1.0, 2).powf(0.5).is_none());
    }

    #[test]
    fn integrate_then_differentiate() {
        let x = Jet::variable(0.4, 4);
        let s = x.sin();
        let back = s.integrate(2.0).differentiate();
        assert_eq!(back.order(), s.order());
        for k in 0..=4 {
            assert_relative_eq!(back.coeff(k), s.coeff(k), epsilon = 1e-15);
        }
        assert_relative_eq!(s.eval_offset(0.01), (0.41f64).sin(), epsilon = 1e-12);
    }
}
