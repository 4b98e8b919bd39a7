//! The period function `T(E)` and its energy derivative.
//!
//! With the signed branch variable `h(x) = sign(x) sqrt(V(x))`, `h` is
//! increasing on the orbit window and `u = h^{-1}(sqrt(E) sin θ)` turns the
//! period integral into the regular form
//!
//! ```text
//! T(E) = sqrt(2) ∫_{-π/2}^{π/2} sqrt(mu(u)) / h'(u) dθ,
//! dT/dE = (1/sqrt(2)) ∫_{-π/2}^{π/2} G(u) cos²θ dθ,   G = 2 N / h'.
//! ```

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use num_traits::Float;

use crate::criteria::n_function;
use crate::jet::Jet;
use crate::liesys::{LienardSystem, OrbitWindow};
use crate::ode::Extrapolation;
use crate::quad::Tolerance;
use crate::roots;
use crate::{Error, Result, ORIGIN_RADIUS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PeriodMethod {
    XQuadrature,
    ThetaQuadrature,
    OdeReturn,
    DerivativeQuadrature,
    FiniteDifference,
}

impl PeriodMethod {
    pub const PERIODS: [PeriodMethod; 3] = [
        PeriodMethod::XQuadrature,
        PeriodMethod::ThetaQuadrature,
        PeriodMethod::OdeReturn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PeriodMethod::XQuadrature => "x-quadrature",
            PeriodMethod::ThetaQuadrature => "theta-quadrature",
            PeriodMethod::OdeReturn => "ode-return",
            PeriodMethod::DerivativeQuadrature => "derivative-quadrature",
            PeriodMethod::FiniteDifference => "finite-difference",
        }
    }
}

impl core::fmt::Display for PeriodMethod {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodSample {
    pub energy: f64,
    pub period: f64,
    /// `dT/dE`, present for the derivative methods only.
    pub derivative: Option<f64>,
    pub method: PeriodMethod,
    /// Self-reported error estimate of the method, not a bound.
    pub est_error: f64,
}

const PERIOD_TOL: Tolerance = Tolerance {
    abs: 1e-10,
    rel: 1e-9,
    max_depth: 24,
};

/// Jet of `h(x) = sign(x) sqrt(V(x))`, computed as `x sqrt(V(x)/x^2)`.
pub fn h_jet(sys: &LienardSystem, x: f64, order: usize) -> Result<Jet> {
    let vt = sys.reduced_potential_jet(x, order)?;
    h_from_reduced(x, &vt)
}

fn h_from_reduced(x: f64, vt: &Jet) -> Result<Jet> {
    let root = vt.sqrt().ok_or(Error::Domain {
        subexpr: alloc::format!("V(x)/x^2 at x = {x}"),
        reason: "not positive",
    })?;
    Ok(&Jet::variable(x, vt.order()) * &root)
}

/// Inverse of the branch variable `h` over one orbit window.
#[derive(Debug)]
pub struct BranchInverter<'a> {
    sys: &'a LienardSystem,
    window: OrbitWindow,
    sqrt_e: f64,
}

impl<'a> BranchInverter<'a> {
    pub fn new(sys: &'a LienardSystem, energy: f64) -> Result<Self> {
        let window = sys.turning_points(energy)?;
        Ok(Self::with_window(sys, window))
    }

    pub fn with_window(sys: &'a LienardSystem, window: OrbitWindow) -> Self {
        BranchInverter {
            sys,
            window,
            sqrt_e: window.energy.sqrt(),
        }
    }

    pub fn window(&self) -> OrbitWindow {
        self.window
    }

    /// `(h(x), h'(x))`.
    pub fn h(&self, x: f64) -> Result<(f64, f64)> {
        if x.abs() < ORIGIN_RADIUS {
            let j = h_jet(self.sys, x, 1)?;
            return Ok((j.value(), j.derivative(1)));
        }
        let ad = self.sys.antiderivatives(x)?;
        let root = ad.v.sqrt();
        let dv = ad.mass() * self.sys.g().value(x)?;
        Ok((x.signum() * root, dv.abs() / (2.0 * root)))
    }

    /// `h^{-1}(r)` for `|r| <= sqrt(E)`.
    pub fn invert(&self, r: f64) -> Result<f64> {
        let OrbitWindow { x1, x2, .. } = self.window;
        if r == 0.0 {
            return Ok(0.0);
        }
        if r >= self.sqrt_e {
            return Ok(x2);
        }
        if r <= -self.sqrt_e {
            return Ok(x1);
        }
        let (lo, hi) = if r > 0.0 { (0.0, x2) } else { (x1, 0.0) };
        let guess = if r > 0.0 {
            x2 * r / self.sqrt_e
        } else {
            -x1 * r / self.sqrt_e
        };
        let scale = r.abs().max(1.0);
        let root = roots::newton_bisect(
            |x| {
                let (h, dh) = self.h(x)?;
                Ok((h - r, dh))
            },
            lo,
            hi,
            guess,
            1e-15 * scale,
            200,
        )?;
        match root {
            Some(root) if root.residual.abs() <= 1e-12 * scale => Ok(root.x),
            _ => {
                // r rounds past h at the turning point
                let edge = if r > 0.0 { x2 } else { x1 };
                let (h, _) = self.h(edge)?;
                if (h - r).abs() <= 1e-12 * scale {
                    Ok(edge)
                } else {
                    Err(Error::InversionFailure { r })
                }
            }
        }
    }

    /// `sqrt(mu(u)) / h'(u)`.
    fn period_density(&self, u: f64) -> Result<f64> {
        if u.abs() < ORIGIN_RADIUS {
            let h = h_jet(self.sys, u, 1)?;
            let sqrt_mu = self.sys.antiderivatives(u)?.f_int.exp();
            return Ok(sqrt_mu / h.derivative(1));
        }
        let ad = self.sys.antiderivatives(u)?;
        let (_, dh) = self.h(u)?;
        Ok(ad.f_int.exp() / dh)
    }
}

fn theta_integral<F>(sys: &LienardSystem, mut integrand: F) -> Result<crate::quad::Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    sys.integrate_fine(&mut integrand, -FRAC_PI_2, FRAC_PI_2, PERIOD_TOL)
}

/// `T(E) = sqrt(2) ∫ sqrt(mu) dx / sqrt(E - V)` over `[x1, x2]`, with
/// `x = x2 - t^2` and `x = x1 + t^2` on the two halves so that the
/// integrand stays bounded at the turning points.
pub fn period_x_quadrature(sys: &LienardSystem, energy: f64) -> Result<PeriodSample> {
    let w = sys.turning_points(energy)?;
    let m = w.midpoint();
    let (v1, v2) = (sys.potential(w.x1)?, sys.potential(w.x2)?);
    let mut halves = [0.0; 2];
    let mut err = 0.0;
    for (k, (edge, v_edge)) in [(w.x2, v2), (w.x1, v1)].into_iter().enumerate() {
        let dir = if k == 0 { -1.0 } else { 1.0 };
        let t_max = (edge - m).abs().sqrt();
        let est = sys.integrate_fine(
            |t| {
                let x = edge + dir * t * t;
                // E - V(x) as the direct integral from x to the turning point
                let gap = (energy - v_edge) - sys.potential_difference(edge, x)?;
                let sqrt_mu = sys.antiderivatives(x)?.f_int.exp();
                Ok(2.0 * t * sqrt_mu / gap.sqrt())
            },
            0.0,
            t_max,
            PERIOD_TOL,
        )?;
        halves[k] = est.value;
        err += est.error;
    }
    let s = core::f64::consts::SQRT_2;
    Ok(PeriodSample {
        energy,
        period: s * (halves[0] + halves[1]),
        derivative: None,
        method: PeriodMethod::XQuadrature,
        est_error: s * err,
    })
}

/// `T(E)` from the regular θ-form.
pub fn period_theta_quadrature(sys: &LienardSystem, energy: f64) -> Result<PeriodSample> {
    let inv = BranchInverter::new(sys, energy)?;
    let sqrt_e = energy.sqrt();
    let est = theta_integral(sys, |theta| {
        let u = inv.invert(sqrt_e * theta.sin())?;
        inv.period_density(u)
    })?;
    let s = core::f64::consts::SQRT_2;
    Ok(PeriodSample {
        energy,
        period: s * est.value,
        derivative: None,
        method: PeriodMethod::ThetaQuadrature,
        est_error: s * est.error,
    })
}

/// Return time to the section `{p = 0, x > 0}` of Hamilton's equations
/// `x' = p/mu`, `p' = f p^2/mu - mu g`, started at `(x2, 0)`. The state
/// carries `F` as well (`F' = f x'`), so `mu` needs no quadrature.
pub fn period_ode_return(sys: &LienardSystem, energy: f64) -> Result<PeriodSample> {
    period_ode_return_with(sys, energy, Extrapolation::default())
}

pub fn period_ode_return_with(sys: &LienardSystem, energy: f64, scheme: Extrapolation) -> Result<PeriodSample> {
    let w = sys.turning_points(energy)?;
    let f0 = sys.friction_integral(w.x2)?;
    let (f, g) = (sys.f(), sys.g());
    let rhs = |y: &[f64; 3]| -> Result<[f64; 3]> {
        let mu = (2.0 * y[2]).exp();
        let fx = f.value(y[0])?;
        let v = y[1] / mu;
        Ok([v, fx * y[1] * v - mu * g.value(y[0])?, fx * v])
    };
    let h0 = 1e-3 * w.half_width() * (sys.curvature_at_origin()).sqrt().recip().min(1.0);
    let hit = scheme.solve_to_crossing(rhs, [w.x2, 0.0, f0], h0, 1e6, 1, |y| y[0] > 0.0)?;
    let [x, p, _] = hit.state;
    let ad = sys.antiderivatives(x)?;
    let h_end = p * p / (2.0 * ad.mass()) + ad.v;
    Ok(PeriodSample {
        energy,
        period: hit.t,
        derivative: None,
        method: PeriodMethod::OdeReturn,
        est_error: (h_end - energy).abs(),
    })
}

pub fn period(sys: &LienardSystem, energy: f64, method: PeriodMethod) -> Result<PeriodSample> {
    match method {
        PeriodMethod::XQuadrature => period_x_quadrature(sys, energy),
        PeriodMethod::ThetaQuadrature => period_theta_quadrature(sys, energy),
        PeriodMethod::OdeReturn => period_ode_return(sys, energy),
        PeriodMethod::DerivativeQuadrature => period_derivative(sys, energy),
        PeriodMethod::FiniteDifference => period_derivative_fd(sys, energy),
    }
}

/// `G(x) = 2 N(x) / h'(x)`.
pub fn g_density(sys: &LienardSystem, x: f64) -> Result<f64> {
    let n = n_function(sys, x)?;
    let h = h_jet(sys, x, 1)?;
    Ok(2.0 * n.value / h.derivative(1))
}

/// `dT/dE` from the cos²-weighted θ-integral of `G`; the period is
/// computed alongside from the θ-form.
pub fn period_derivative(sys: &LienardSystem, energy: f64) -> Result<PeriodSample> {
    let inv = BranchInverter::new(sys, energy)?;
    let sqrt_e = energy.sqrt();
    let est = theta_integral(sys, |theta| {
        let u = inv.invert(sqrt_e * theta.sin())?;
        let c = theta.cos();
        Ok(g_density(sys, u)? * c * c)
    })?;
    let t = period_theta_quadrature(sys, energy)?;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    Ok(PeriodSample {
        energy,
        period: t.period,
        derivative: Some(s * est.value),
        method: PeriodMethod::DerivativeQuadrature,
        est_error: s * est.error,
    })
}

/// Centered difference `(T(E + δ) - T(E - δ)) / (2δ)` with `δ = 1e-4 E`.
pub fn period_derivative_fd(sys: &LienardSystem, energy: f64) -> Result<PeriodSample> {
    let delta = 1e-4 * energy;
    if !(energy > 0.0 && energy + delta < sys.energy_ceiling()) {
        return Err(Error::EnergyOutOfRange {
            energy,
            ceiling: sys.energy_ceiling(),
        });
    }
    let hi = period_theta_quadrature(sys, energy + delta)?;
    let lo = period_theta_quadrature(sys, energy - delta)?;
    let mid = period_theta_quadrature(sys, energy)?;
    Ok(PeriodSample {
        energy,
        period: mid.period,
        derivative: Some((hi.period - lo.period) / (2.0 * delta)),
        method: PeriodMethod::FiniteDifference,
        est_error: (hi.est_error + lo.est_error) / (2.0 * delta),
    })
}

/// `S(x) = (h'' mu - mu' h' / 2) / (h'^3 sqrt(mu))`.
pub fn s_function(sys: &LienardSystem, x: f64) -> Result<f64> {
    let h = h_jet(sys, x, 2)?;
    let mu = sys.mass_jet(x, 1)?;
    let (h1, h2) = (h.derivative(1), h.derivative(2));
    Ok((h2 * mu.value() - 0.5 * mu.derivative(1) * h1) / (h1 * h1 * h1 * mu.value().sqrt()))
}

/// `dT/dE = -(1/sqrt(2E)) ∫ S(u) sin θ dθ`, the form before integration
/// by parts.
pub fn period_derivative_sine_form(sys: &LienardSystem, energy: f64) -> Result<f64> {
    let inv = BranchInverter::new(sys, energy)?;
    let sqrt_e = energy.sqrt();
    let est = theta_integral(sys, |theta| {
        let s = theta.sin();
        let u = inv.invert(sqrt_e * s)?;
        Ok(s_function(sys, u)? * s)
    })?;
    Ok(-est.value / (2.0 * energy).sqrt())
}

/// Periods from all three methods, in [`PeriodMethod::PERIODS`] order.
pub fn period_all(sys: &LienardSystem, energy: f64) -> Result<Vec<PeriodSample>> {
    PeriodMethod::PERIODS
        .iter()
        .map(|&m| period(sys, energy, m))
        .collect()
}

/// Largest pairwise relative difference among the given periods.
pub fn max_pairwise_rel_diff(values: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liesys::{Interval, SystemConfig};
    use crate::parse;
    use alloc::format;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn sys(f: &str, g: &str) -> LienardSystem {
        LienardSystem::new(parse(f).unwrap(), parse(g).unwrap(), SystemConfig::default()).unwrap()
    }

    fn km(a3: f64) -> LienardSystem {
        sys("-3*x/(1+x^2)", &format!("x + {a3:?}*x^3"))
    }

    #[test]
    fn harmonic_periods() {
        let s = sys("0", "x");
        assert_relative_eq!(period_x_quadrature(&s, 0.3).unwrap().period, 2.0 * PI, epsilon = 1e-8);
        for e in [0.01, 1.0, 30.0] {
            assert_relative_eq!(period_theta_quadrature(&s, e).unwrap().period, 2.0 * PI, epsilon = 1e-9);
        }
        let ode = period_ode_return(&s, 1.0).unwrap();
        assert_relative_eq!(ode.period, 2.0 * PI, epsilon = 1e-7);
        assert!(ode.est_error <= 1e-8);
        let d = period_derivative(&s, 0.5).unwrap();
        assert!(d.derivative.unwrap().abs() <= 1e-9);
        let e_star = s.energy_ceiling();
        assert!(matches!(period_x_quadrature(&s, e_star), Err(Error::EnergyOutOfRange { .. })));
    }

    #[test]
    fn inverter_round_trip() {
        let s = km(1.055);
        let inv = BranchInverter::new(&s, 0.2).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in -20..=20 {
            let r = 0.2f64.sqrt() * k as f64 / 20.0;
            let x = inv.invert(r).unwrap();
            assert!(x > prev);
            prev = x;
            assert!((inv.h(x).unwrap().0 - r).abs() <= 1e-12 * r.abs().max(1.0));
        }
        assert!(inv.invert(3e-6).unwrap().abs() < ORIGIN_RADIUS);
    }

    #[test]
    fn methods_agree_on_rational_mass() {
        let s = km(1.0);
        let x = period_x_quadrature(&s, 0.1).unwrap().period;
        let t = period_theta_quadrature(&s, 0.1).unwrap().period;
        assert_relative_eq!(x, t, max_relative = 1e-6);
        assert_relative_eq!(t, 2.0 * PI, max_relative = 1e-9);
        let o = period_ode_return(&s, 0.2).unwrap();
        assert_relative_eq!(o.period, 2.0 * PI, max_relative = 1e-8);
        assert!(o.est_error <= 1e-8 * 0.2);
    }

    #[test]
    fn decreasing_and_increasing_sides() {
        let dec = km(1.055);
        let t1 = period_theta_quadrature(&dec, 0.05).unwrap().period;
        let t2 = period_theta_quadrature(&dec, 0.2).unwrap().period;
        assert!(t1 > t2);
        assert_relative_eq!(t1, 6.270303609734385, max_relative = 1e-10);
        let inc = km(0.96);
        let d = period_derivative(&inc, 0.05).unwrap();
        assert!(d.derivative.unwrap() > 0.0);
        assert_relative_eq!(d.period, 6.292651546718605, max_relative = 1e-10);
    }

    #[test]
    fn derivative_matches_finite_difference_and_sine_form() {
        let s = km(0.96);
        for e in [0.05, 0.2] {
            let d = period_derivative(&s, e).unwrap().derivative.unwrap();
            let fd = period_derivative_fd(&s, e).unwrap().derivative.unwrap();
            assert!((d - fd).abs() <= 1e-5f64.max(1e-3 * d.abs()), "{d} {fd}");
            let sine = period_derivative_sine_form(&s, e).unwrap();
            assert_relative_eq!(sine, d, max_relative = 1e-6);
        }
    }

    #[test]
    fn s_function_identities() {
        let h = sys("0", "x");
        assert!(s_function(&h, 0.7).unwrap().abs() < 1e-15);

        let s = km(1.0);
        let x = 0.5;
        let step = 1e-3;
        let sv = |t: f64| s_function(&s, t).unwrap();
        let ds = (sv(x - 2.0 * step) - 8.0 * sv(x - step) + 8.0 * sv(x + step) - sv(x + 2.0 * step)) / (12.0 * step);
        let dh = h_jet(&s, x, 1).unwrap().derivative(1);
        let g = g_density(&s, x).unwrap();
        assert!((-ds / dh - g).abs() <= 1e-8, "{} {}", -ds / dh, g);

        // even V and even mu make S odd
        let even = km(0.9);
        for x in [0.05, 0.4, 1.1, 5e-5] {
            assert_relative_eq!(s_function(&even, -x).unwrap(), -s_function(&even, x).unwrap(), max_relative = 1e-9);
        }
    }

    #[test]
    fn asymmetric_orbit() {
        let s = LienardSystem::new(
            parse("0").unwrap(),
            parse("x + x^2").unwrap(),
            SystemConfig {
                domain: Interval::new(-3.0, 3.0),
                tol_q: 1e-10,
            },
        )
        .unwrap();
        assert_relative_eq!(s.energy_ceiling(), 1.0 / 6.0, max_relative = 1e-8);
        let e = 0.1;
        let all = period_all(&s, e).unwrap();
        let values: Vec<f64> = all.iter().map(|p| p.period).collect();
        assert!(max_pairwise_rel_diff(&values) < 1e-8, "{values:?}");
        let d = period_derivative(&s, e).unwrap().derivative.unwrap();
        assert!(d > 0.0);
    }
}
