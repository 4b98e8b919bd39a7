//! Two worked families with closed forms.
//!
//! The rational-mass family: `f = -3x/(1+x^2)` (so `mu = (1+x^2)^-3`) and
//! `g = x + a3 x^3`, isochronous exactly at `a3 = 1`.
//!
//! The reciprocal-weight family: for an even positive `w`, the pair
//! `f = -w'/w`, `g = w U` with `U = ∫_0^x 1/w` gives `mu = (w(0)/w)^2` and
//! `V = w(0)^2 U^2/2`, an isochronous center of period `2π`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use num_traits::Float;

use crate::expr::Expr;
use crate::jet::Jet;
use crate::liesys::{Antiderivative, Coefficient, Interval, LienardSystem, SystemConfig};
use crate::{parse, Error, Result};

pub const KM_FRICTION: &str = "-3*x/(1+x^2)";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMFamily {
    pub a3: f64,
}

impl KMFamily {
    pub fn new(a3: f64) -> Self {
        KMFamily { a3 }
    }

    pub fn friction_text(&self) -> &'static str {
        KM_FRICTION
    }

    pub fn restoring_text(&self) -> String {
        format!("x + {:?}*x^3", self.a3)
    }

    pub fn system(&self) -> Result<LienardSystem> {
        self.system_with(SystemConfig::default())
    }

    pub fn system_with(&self, config: SystemConfig) -> Result<LienardSystem> {
        LienardSystem::new(parse(KM_FRICTION)?, parse(&self.restoring_text())?, config)
    }

    pub fn closed_forms(&self, x: f64) -> Result<KMClosedForms> {
        km_closed_forms(self.a3, x)
    }

    pub fn coefficients(&self) -> [f64; 6] {
        km_coefficients(self.a3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMClosedForms {
    pub v: f64,
    pub dv: f64,
    /// `u = V / V'^2`
    pub u: f64,
    pub k: f64,
    /// `K'`
    pub dk: f64,
    pub m_over_u: f64,
}

/// Closed forms of the rational-mass family at `x`.
pub fn km_closed_forms(a3: f64, x: f64) -> Result<KMClosedForms> {
    let b = 1.0 + a3;
    let x2 = x * x;
    let (q, r, s) = (1.0 + x2, 1.0 + a3 * x2, 1.0 + 0.5 * b * x2);
    if r.abs() < 1e-12 || s.abs() < 1e-12 {
        return Err(Error::Domain {
            subexpr: format!("K at x = {x}"),
            reason: "pole of K",
        });
    }
    let v = x2 * s / (2.0 * q * q);
    let dv = x * r / q.powi(3);
    let k = 8.0 / q - 4.0 * a3 / r + b / s;
    let dk = -16.0 * x / (q * q) + 8.0 * a3 * a3 * x / (r * r) - b * b * x / (s * s);
    let f = -3.0 * x / q;
    let f_terms = 3.0 * (4.0 * x2 - 1.0) / (q * q);
    let m_over_u = k * (1.0 + 3.0 * x * f) + x2 * k * k + x * dk + 2.0 * f_terms;
    let u = if x == 0.0 { 0.5 } else { v / (dv * dv) };
    Ok(KMClosedForms {
        v,
        dv,
        u,
        k,
        dk,
        m_over_u,
    })
}

/// `C0 ..= C5` of the monotonicity polynomial `Σ C_k x^(2k)`.
pub fn km_coefficients(a3: f64) -> [f64; 6] {
    let a = a3;
    [
        1.5 * (1.0 - a),
        0.25 * (a - 1.0) * (21.0 * a - 39.0),
        1.5 * (a - 1.0) * (3.0 * a * a + a - 7.0),
        0.75 * (a + 1.0) * (a - 1.0) * (a * a + 2.0 * a - 4.0),
        0.0,
        0.0,
    ]
}

pub fn km_polynomial(a3: f64, x: f64) -> f64 {
    let x2 = x * x;
    km_coefficients(a3).iter().rev().fold(0.0, |acc, c| acc * x2 + c)
}

/// 64 points on `[0.05, 2.5]`, dropping points within `1e-6` of a pole of `K`.
pub fn km_default_grid(a3: f64) -> Vec<f64> {
    (0..64)
        .map(|i| 0.05 + 2.45 * i as f64 / 63.0)
        .filter(|x| (1.0 + a3 * x * x).abs() >= 1e-6 && (1.0 + 0.5 * (1.0 + a3) * x * x).abs() >= 1e-6)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialCheck {
    pub a3: f64,
    /// Max `|M/u · D(x) - c · poly(x)|` over the grid, with `D` the product
    /// of the squared denominators and `c` the fitted constant.
    pub discrepancy: f64,
    /// Least-squares constant `c`; `None` when the polynomial vanishes on
    /// the whole grid.
    pub prefactor: Option<f64>,
    /// `(x, M/u · D(x), poly(x))`
    pub samples: Vec<(f64, f64, f64)>,
}

impl PolynomialCheck {
    /// `Some(1)` / `Some(-1)` when the polynomial is strictly of one sign on
    /// the grid.
    pub fn polynomial_sign(&self) -> Option<i8> {
        if self.samples.iter().all(|s| s.2 > 0.0) {
            Some(1)
        } else if self.samples.iter().all(|s| s.2 < 0.0) {
            Some(-1)
        } else {
            None
        }
    }
}

pub fn km_polynomial_check(a3: f64, grid: &[f64]) -> Result<PolynomialCheck> {
    let b = 1.0 + a3;
    let mut samples = Vec::with_capacity(grid.len());
    for &x in grid {
        let cf = km_closed_forms(a3, x)?;
        let x2 = x * x;
        let d = ((1.0 + x2) * (1.0 + a3 * x2) * (1.0 + 0.5 * b * x2)).powi(2);
        samples.push((x, cf.m_over_u * d, km_polynomial(a3, x)));
    }
    let (num, den) = samples
        .iter()
        .fold((0.0, 0.0), |(n, d), (_, lhs, p)| (n + lhs * p, d + p * p));
    let prefactor = if den > 0.0 { Some(num / den) } else { None };
    let c = prefactor.unwrap_or(0.0);
    let discrepancy = samples
        .iter()
        .fold(0.0f64, |m, (_, lhs, p)| m.max((lhs - c * p).abs()));
    Ok(PolynomialCheck {
        a3,
        discrepancy,
        prefactor,
        samples,
    })
}

/// `-w'/w`.
#[derive(Debug)]
struct NegLogDerivative(Arc<Expr>);

impl Coefficient for NegLogDerivative {
    fn value(&self, x: f64) -> Result<f64> {
        let w = self.0.eval_jet(x, 1)?;
        Ok(-w.derivative(1) / w.value())
    }

    fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        let w = self.0.eval_jet(x, order + 1)?;
        let r = w.differentiate().checked_div(&w.truncate(order)).ok_or(Error::Domain {
            subexpr: format!("{}", self.0),
            reason: "zero weight",
        })?;
        Ok(-r)
    }

    fn describe(&self) -> String {
        format!("-d/dx ln({})", self.0)
    }
}

/// `w(x) ∫_0^x 1/w`.
struct WeightedIntegral {
    w: Arc<Expr>,
    u: Antiderivative,
}

impl core::fmt::Debug for WeightedIntegral {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.describe())
    }
}

impl Coefficient for WeightedIntegral {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.w.eval(x)? * self.u.value(x)?)
    }

    fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        let u0 = self.u.value(x)?;
        let w = self.w.eval_jet(x, order)?;
        let u = if order == 0 {
            Jet::constant(x, u0, 0)
        } else {
            let inv = w.truncate(order - 1).recip().ok_or(Error::Domain {
                subexpr: format!("{}", self.w),
                reason: "zero weight",
            })?;
            inv.integrate(u0)
        };
        Ok(&w * &u)
    }

    fn describe(&self) -> String {
        format!("({0})*∫_0^x 1/({0})", self.w)
    }
}

/// Builds `x'' - (w'/w) x'^2 + w U = 0`, `U = ∫_0^x 1/w`, for an even
/// positive weight `w` on the default domain.
pub fn sect3_family(w: Expr) -> Result<LienardSystem> {
    sect3_family_with(w, SystemConfig::default())
}

pub fn sect3_family_with(w: Expr, config: SystemConfig) -> Result<LienardSystem> {
    let Interval { lo, hi } = config.domain;
    let reach = hi.min(-lo);
    for k in 0..=64 {
        let x = reach * k as f64 / 64.0;
        let (a, b) = (w.eval(x)?, w.eval(-x)?);
        if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
            return Err(Error::NotEven { x });
        }
    }
    for k in 0..=128 {
        let x = lo + (hi - lo) * k as f64 / 128.0;
        let value = w.eval(x)?;
        if !(value > 0.0) {
            return Err(Error::NotPositive { x, value });
        }
    }
    let w = Arc::new(w);
    let recip = {
        let w = Arc::clone(&w);
        move |s: f64| Ok(1.0 / w.eval(s)?)
    };
    let u = Antiderivative::new(recip, config.domain, 0.1 * config.tol_q)?;
    let sys = LienardSystem::from_coefficients(
        Box::new(NegLogDerivative(Arc::clone(&w))),
        Box::new(WeightedIntegral { w: Arc::clone(&w), u }),
        config,
    )?;
    verify_reduction(&sys, &w)?;
    Ok(sys)
}

// mu = (w(0)/w)^2 and V = w(0)^2 U^2/2 at a few points.
fn verify_reduction(sys: &LienardSystem, w: &Expr) -> Result<()> {
    let d = sys.domain();
    let u = Antiderivative::new(
        {
            let w = w.clone();
            move |s: f64| Ok(1.0 / w.eval(s)?)
        },
        d,
        0.1 * sys.tol_q(),
    )?;
    let w0 = w.eval(0.0)?;
    for t in [-0.5, -0.1, 0.25, 0.5] {
        let x = if t < 0.0 { -t * d.lo } else { t * d.hi };
        let wx = w.eval(x)?;
        let ux = u.value(x)?;
        let checks = [
            (sys.mass(x)?, (w0 * w0) / (wx * wx)),
            (sys.potential(x)?, 0.5 * w0 * w0 * ux * ux),
        ];
        for (got, want) in checks {
            let tol = 10.0 * sys.tol_q() * want.abs().max(1.0);
            if (got - want).abs() > tol {
                return Err(Error::QuadratureNonConvergence {
                    estimate: (got - want).abs(),
                    tolerance: tol,
                });
            }
        }
    }
    Ok(())
}
