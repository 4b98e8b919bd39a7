//! The position-dependent-mass Hamiltonian attached to
//! `x'' + f(x) x'^2 + g(x) = 0`:
//!
//! ```text
//! F(x) = ∫_0^x f,   mu(x) = exp(2 F(x)),   V(x) = ∫_0^x mu g,
//! H(x, p) = p^2 / (2 mu(x)) + V(x).
//! ```
//!
//! `F`, `V` and `Φ = ∫_0^x exp(F)` are tabulated on a checkpoint grid when
//! the system is built; a value between checkpoints is integrated from the
//! nearest checkpoint. Derivatives of `mu` and `V` always come from jets of
//! `f` and `g`, never from differencing quadrature output.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

use crate::expr::Expr;
use crate::jet::Jet;
use crate::quad::{self, GaussLegendre, PanelRule, Tolerance};
use crate::roots;
use crate::{Error, Result, ORIGIN_RADIUS};

/// Taylor order of the expansion of `V` kept at the origin.
const ORIGIN_ORDER: usize = 10;
const CHECKPOINT_STEP: f64 = 1.0 / 32.0;
const PANEL_NODES: usize = 16;
const MAX_PANEL_DEPTH: u32 = 40;
const MAX_PANELS: u32 = 1 << 14;
const CEILING_MARGIN: f64 = 1e-9;

/// A smooth scalar coefficient (`f` or `g`) that can produce Taylor jets.
pub trait Coefficient: fmt::Debug + Send + Sync {
    fn value(&self, x: f64) -> Result<f64>;
    fn jet(&self, x: f64, order: usize) -> Result<Jet>;
    fn describe(&self) -> String;
}

impl Coefficient for Expr {
    fn value(&self, x: f64) -> Result<f64> {
        self.eval(x)
    }

    fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        self.eval_jet(x, order)
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemConfig {
    pub domain: Interval,
    /// Absolute tolerance for the antiderivative quadratures.
    pub tol_q: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            domain: Interval::new(-10.0, 10.0),
            tol_q: 1e-10,
        }
    }
}

/// Values of the three antiderivatives at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Antiderivatives {
    /// `F(x) = ∫_0^x f`
    pub f_int: f64,
    /// `V(x) = ∫_0^x exp(2F) g`
    pub v: f64,
    /// `Φ(x) = ∫_0^x exp(F)`
    pub phi: f64,
}

impl Antiderivatives {
    const ZERO: Antiderivatives = Antiderivatives {
        f_int: 0.0,
        v: 0.0,
        phi: 0.0,
    };

    pub fn mass(&self) -> f64 {
        (2.0 * self.f_int).exp()
    }
}

#[derive(Clone, Copy, Debug)]
struct Checkpoint {
    x: f64,
    values: Antiderivatives,
}

#[derive(Clone, Copy, Debug)]
struct Increment {
    df: f64,
    dv: f64,
    dphi: f64,
}

/// Orbit of energy `E`: turning points `x1 < 0 < x2` with `V(x1) = V(x2) = E`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitWindow {
    pub energy: f64,
    pub e_star: f64,
    pub x1: f64,
    pub x2: f64,
}

impl OrbitWindow {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x1 + self.x2)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.x2 - self.x1)
    }

    /// `n` Chebyshev points of the first kind on `[x1, x2]`, ascending.
    pub fn chebyshev_nodes(&self, n: usize) -> Vec<f64> {
        let (m, l) = (self.midpoint(), self.half_width());
        (0..n)
            .rev()
            .map(|j| {
                let theta = core::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64;
                m + l * theta.cos()
            })
            .collect()
    }
}

/// Jets of the local building blocks at one point.
#[derive(Clone, Debug)]
pub struct LocalJets {
    pub x: f64,
    pub f: Jet,
    pub g: Jet,
    /// `F`
    pub f_int: Jet,
    /// `sqrt(mu) = exp(F)`
    pub sqrt_mass: Jet,
    /// `V`
    pub potential: Jet,
}

pub struct LienardSystem {
    f: Box<dyn Coefficient>,
    g: Box<dyn Coefficient>,
    config: SystemConfig,
    panel: PanelRule,
    fine: GaussLegendre,
    right: Vec<Checkpoint>,
    left: Vec<Checkpoint>,
    origin_series: Vec<f64>,
    left_limit: f64,
    right_limit: f64,
    e_star: f64,
    conservative: bool,
}

impl fmt::Debug for LienardSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LienardSystem")
            .field("f", &self.f.describe())
            .field("g", &self.g.describe())
            .field("domain", &self.config.domain)
            .field("tol_q", &self.config.tol_q)
            .field("e_star", &self.e_star)
            .finish()
    }
}

/// Builds the system for expressions `f`, `g` on `domain` with quadrature
/// tolerance `tol_q`.
pub fn build_system(f: Expr, g: Expr, domain: Interval, tol_q: f64) -> Result<LienardSystem> {
    LienardSystem::new(f, g, SystemConfig { domain, tol_q })
}

impl LienardSystem {
    pub fn new(f: Expr, g: Expr, config: SystemConfig) -> Result<Self> {
        Self::from_coefficients(Box::new(f), Box::new(g), config)
    }

    pub fn from_coefficients(
        f: Box<dyn Coefficient>,
        g: Box<dyn Coefficient>,
        config: SystemConfig,
    ) -> Result<Self> {
        let Interval { lo, hi } = config.domain;
        if !(lo < 0.0 && 0.0 < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument("domain must be finite and contain 0 in its interior"));
        }
        if !(config.tol_q > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerance must be positive"));
        }

        let g0 = g.jet(0.0, 1)?;
        if g0.value().abs() > 1e-12 {
            return Err(Error::CenterHypothesisViolated(format!(
                "g(0) = {} is not zero, so the origin is not an equilibrium",
                g0.value()
            )));
        }
        if !(g0.derivative(1) > 0.0) {
            return Err(Error::CenterHypothesisViolated(format!(
                "V''(0) = g'(0) = {} is not positive, so the minimum is not a nondegenerate center",
                g0.derivative(1)
            )));
        }

        let mut sys = LienardSystem {
            f,
            g,
            config,
            panel: PanelRule::new(PANEL_NODES),
            fine: GaussLegendre::new(64),
            right: Vec::new(),
            left: Vec::new(),
            origin_series: Vec::new(),
            left_limit: lo,
            right_limit: hi,
            e_star: 0.0,
            conservative: false,
        };
        sys.origin_series = sys.potential_jet_from(0.0, Antiderivatives::ZERO, ORIGIN_ORDER)?.coeffs().to_vec();
        sys.right = sys.tabulate(hi)?;
        sys.left = sys.tabulate(lo)?;
        sys.locate_ceiling()?;
        sys.conservative = sys.sample_conservative()?;
        Ok(sys)
    }

    pub fn f(&self) -> &dyn Coefficient {
        self.f.as_ref()
    }

    pub fn g(&self) -> &dyn Coefficient {
        self.g.as_ref()
    }

    pub fn config(&self) -> SystemConfig {
        self.config
    }

    pub fn domain(&self) -> Interval {
        self.config.domain
    }

    pub fn tol_q(&self) -> f64 {
        self.config.tol_q
    }

    /// `V''(0)`, which equals `g'(0)` since `mu(0) = 1`.
    pub fn curvature_at_origin(&self) -> f64 {
        2.0 * self.origin_series[2]
    }

    /// Taylor coefficients `V_k = V^(k)(0)/k!` of the potential at the origin.
    pub fn origin_series(&self) -> &[f64] {
        &self.origin_series
    }

    /// True when `f` vanishes at every sample of a grid over the domain.
    pub fn is_conservative(&self) -> bool {
        self.conservative
    }

    /// Scan limits: the nearest critical point of `V` on each side of the
    /// origin, or the domain edge.
    pub fn scan_limits(&self) -> (f64, f64) {
        (self.left_limit, self.right_limit)
    }

    /// Supremum of the energies whose level curves are closed orbits
    /// around the origin within the scan limits.
    pub fn energy_ceiling(&self) -> f64 {
        self.e_star
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.config.domain.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                subexpr: format!("x = {x}"),
                reason: "outside the system domain",
            })
        }
    }

    // One Gauss–Legendre panel for (F, V, Φ) over [a, b] given F(a); also
    // returns the error estimate relative to what is acceptable, and the
    // raw estimate.
    fn panel(&self, a: f64, f_a: f64, b: f64, tol: f64) -> Result<(Increment, f64, f64)> {
        let n = PANEL_NODES;
        let mut t = [0.0; PANEL_NODES];
        let mut w = [0.0; PANEL_NODES];
        for (i, (ti, wi)) in self.panel.rule().mapped(a, b).enumerate() {
            t[i] = ti;
            w[i] = wi;
        }
        let mut fv = [0.0; PANEL_NODES];
        let mut gv = [0.0; PANEL_NODES];
        for i in 0..n {
            fv[i] = self.f.value(t[i])?;
            gv[i] = self.g.value(t[i])?;
        }
        let cum = self.panel.cumulative(a, b, &fv);
        let mut y = [0.0; PANEL_NODES];
        let mut e = [0.0; PANEL_NODES];
        let mut inc = Increment {
            df: 0.0,
            dv: 0.0,
            dphi: 0.0,
        };
        for i in 0..n {
            let sqrt_mu = (f_a + cum[i]).exp();
            y[i] = sqrt_mu * sqrt_mu * gv[i];
            e[i] = sqrt_mu;
            inc.df += w[i] * fv[i];
            inc.dv += w[i] * y[i];
            inc.dphi += w[i] * e[i];
        }
        if !inc.df.is_finite() || !inc.dv.is_finite() || !inc.dphi.is_finite() {
            return Err(Error::Domain {
                subexpr: format!("[{a}, {b}]"),
                reason: "non-finite antiderivative increment",
            });
        }
        let len = (b - a).abs();
        let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let (fmax, ymax, emax) = (max_abs(&fv), max_abs(&y), max_abs(&e));
        // rounding level of F, which enters V and Φ as a relative error
        let f_round = 128.0 * f64::EPSILON * (1.0 + f_a.abs() + fmax * len);
        let err_f = len * self.panel.tail(&fv);
        let err_v = len * self.panel.tail(&y) + 2.0 * ymax * len * err_f;
        let err_phi = len * self.panel.tail(&e) + emax * len * err_f;
        let ratio = [
            err_f / tol.max(f_round),
            err_v / tol.max(f_round * ymax * len),
            err_phi / tol.max(f_round * emax * len),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        if !ratio.is_finite() {
            return Err(Error::Domain {
                subexpr: format!("[{a}, {b}]"),
                reason: "non-finite antiderivative error estimate",
            });
        }
        Ok((inc, ratio, err_f.max(err_v).max(err_phi)))
    }

    fn increment(&self, a: f64, f_a: f64, b: f64, tol: f64) -> Result<Increment> {
        let mut budget = MAX_PANELS;
        self.increment_within(a, f_a, b, tol, &mut budget)
    }

    fn increment_within(&self, a: f64, f_a: f64, b: f64, tol: f64, budget: &mut u32) -> Result<Increment> {
        let (inc, ratio, err) = self.panel(a, f_a, b, tol)?;
        if ratio <= 1.0 {
            return Ok(inc);
        }
        if *budget == 0 {
            return Err(Error::QuadratureNonConvergence {
                estimate: err,
                tolerance: tol,
            });
        }
        *budget -= 1;
        let mid = 0.5 * (a + b);
        let l = self.increment_within(a, f_a, mid, 0.5 * tol, budget)?;
        let r = self.increment_within(mid, f_a + l.df, b, 0.5 * tol, budget)?;
        Ok(Increment {
            df: l.df + r.df,
            dv: l.dv + r.dv,
            dphi: l.dphi + r.dphi,
        })
    }

    fn panel_tol(&self) -> f64 {
        0.1 * self.config.tol_q
    }

    fn tabulate(&self, edge: f64) -> Result<Vec<Checkpoint>> {
        let dir = edge.signum();
        let mut out = Vec::new();
        let mut cur = Checkpoint {
            x: 0.0,
            values: Antiderivatives::ZERO,
        };
        out.push(cur);
        let mut k = 1;
        loop {
            let mut x = dir * k as f64 * CHECKPOINT_STEP;
            let last = x.abs() >= edge.abs() - 1e-3 * CHECKPOINT_STEP;
            if last {
                x = edge;
            }
            let inc = self.increment(cur.x, cur.values.f_int, x, self.panel_tol())?;
            cur = Checkpoint {
                x,
                values: Antiderivatives {
                    f_int: cur.values.f_int + inc.df,
                    v: cur.values.v + inc.dv,
                    phi: cur.values.phi + inc.dphi,
                },
            };
            out.push(cur);
            if last {
                return Ok(out);
            }
            k += 1;
        }
    }

    fn nearest_checkpoint(&self, x: f64) -> &Checkpoint {
        let side = if x >= 0.0 { &self.right } else { &self.left };
        let k = ((x.abs() / CHECKPOINT_STEP).round() as usize).min(side.len() - 1);
        let mut best = &side[k];
        for j in [k.saturating_sub(1), (k + 1).min(side.len() - 1), side.len() - 1] {
            if (side[j].x - x).abs() < (best.x - x).abs() {
                best = &side[j];
            }
        }
        best
    }

    /// `F(x)`, `V(x)` and `Φ(x)` together.
    pub fn antiderivatives(&self, x: f64) -> Result<Antiderivatives> {
        self.check_domain(x)?;
        let cp = self.nearest_checkpoint(x);
        if cp.x == x {
            return Ok(cp.values);
        }
        let inc = self.increment(cp.x, cp.values.f_int, x, self.panel_tol())?;
        Ok(Antiderivatives {
            f_int: cp.values.f_int + inc.df,
            v: cp.values.v + inc.dv,
            phi: cp.values.phi + inc.dphi,
        })
    }

    /// `F(x) = ∫_0^x f`.
    pub fn friction_integral(&self, x: f64) -> Result<f64> {
        Ok(self.antiderivatives(x)?.f_int)
    }

    /// `mu(x) = exp(2 F(x))`.
    pub fn mass(&self, x: f64) -> Result<f64> {
        Ok(self.antiderivatives(x)?.mass())
    }

    /// `V(x) = ∫_0^x mu g`.
    pub fn potential(&self, x: f64) -> Result<f64> {
        Ok(self.antiderivatives(x)?.v)
    }

    /// `∫_0^x exp(F)`.
    pub fn exp_f_integral(&self, x: f64) -> Result<f64> {
        Ok(self.antiderivatives(x)?.phi)
    }

    /// `V(b) - V(a)` integrated directly over `[a, b]`, accurate in the
    /// relative sense even when `a` and `b` are close.
    pub fn potential_difference(&self, a: f64, b: f64) -> Result<f64> {
        self.check_domain(b)?;
        let f_a = self.antiderivatives(a)?.f_int;
        Ok(self.increment(a, f_a, b, self.panel_tol())?.dv)
    }

    fn f_int_jet(&self, x: f64, f_int: f64, order: usize) -> Result<Jet> {
        if order == 0 {
            return Ok(Jet::constant(x, f_int, 0));
        }
        Ok(self.f.jet(x, order - 1)?.integrate(f_int))
    }

    fn potential_jet_from(&self, x: f64, ad: Antiderivatives, order: usize) -> Result<Jet> {
        if order == 0 {
            return Ok(Jet::constant(x, ad.v, 0));
        }
        let mu = self.f_int_jet(x, ad.f_int, order - 1)?.scale(2.0).exp();
        let dv = &mu * &self.g.jet(x, order - 1)?;
        Ok(dv.integrate(ad.v))
    }

    /// Jet of `mu` at `x`: `mu' = 2 f mu`, `mu'' = (4 f^2 + 2 f') mu`, ...
    pub fn mass_jet(&self, x: f64, order: usize) -> Result<Jet> {
        let ad = self.antiderivatives(x)?;
        Ok(self.f_int_jet(x, ad.f_int, order)?.scale(2.0).exp())
    }

    /// Jet of `sqrt(mu) = exp(F)` at `x`.
    pub fn sqrt_mass_jet(&self, x: f64, order: usize) -> Result<Jet> {
        let ad = self.antiderivatives(x)?;
        Ok(self.f_int_jet(x, ad.f_int, order)?.exp())
    }

    /// Jet of `V` at `x`: value by quadrature, `V' = mu g` and higher
    /// derivatives from jets.
    pub fn potential_jet(&self, x: f64, order: usize) -> Result<Jet> {
        let ad = self.antiderivatives(x)?;
        self.potential_jet_from(x, ad, order)
    }

    /// All local jets at `x`; `potential` and `sqrt_mass` have order `order`,
    /// `f` and `g` order `order - 1`.
    pub fn local_jets(&self, x: f64, order: usize) -> Result<LocalJets> {
        assert!(order >= 1);
        let ad = self.antiderivatives(x)?;
        self.local_jets_from(x, ad, order)
    }

    pub(crate) fn local_jets_from(&self, x: f64, ad: Antiderivatives, order: usize) -> Result<LocalJets> {
        let f = self.f.jet(x, order - 1)?;
        let g = self.g.jet(x, order - 1)?;
        let f_int = f.integrate(ad.f_int);
        let sqrt_mass = f_int.exp();
        let mu = sqrt_mass.truncate(order - 1).powi(2).expect("non-negative power");
        let potential = (&mu * &g).integrate(ad.v);
        Ok(LocalJets {
            x,
            f,
            g,
            f_int,
            sqrt_mass,
            potential,
        })
    }

    /// Jet of `V(x) / x^2`, which is smooth through the origin. Inside
    /// [`ORIGIN_RADIUS`] it comes from the Taylor expansion at 0.
    pub fn reduced_potential_jet(&self, x: f64, order: usize) -> Result<Jet> {
        if x.abs() < ORIGIN_RADIUS {
            let var = Jet::variable(x, order);
            let coeffs = &self.origin_series[2..];
            let mut acc = Jet::constant(x, coeffs[coeffs.len() - 1], order);
            for c in coeffs.iter().rev().skip(1) {
                acc = (&acc * &var).add_scalar(*c);
            }
            return Ok(acc);
        }
        let v = self.potential_jet(x, order)?;
        let var = Jet::variable(x, order);
        v.checked_div(&(&var * &var))
            .ok_or(Error::InvalidArgument("reduced potential at the origin"))
    }

    fn locate_ceiling(&mut self) -> Result<()> {
        let right = self.critical_point(true)?;
        let left = self.critical_point(false)?;
        self.right_limit = right;
        self.left_limit = left;
        let e = self.potential(right)?.min(self.potential(left)?);
        self.e_star = e * (1.0 - CEILING_MARGIN);
        Ok(())
    }

    // First sign change of g (hence V') going outward, or the domain edge.
    fn critical_point(&self, right: bool) -> Result<f64> {
        let side = if right { &self.right } else { &self.left };
        let outward = if right { 1.0 } else { -1.0 };
        for k in 1..side.len() {
            let x = side[k].x;
            if outward * self.g.value(x)? <= 0.0 {
                let inner = if k == 1 { 1e-6 * x } else { side[k - 1].x };
                let root = roots::bisect(|t| self.g.value(t), inner, x)?.unwrap_or(x);
                return Ok(root);
            }
        }
        Ok(side[side.len() - 1].x)
    }

    fn sample_conservative(&self) -> Result<bool> {
        let Interval { lo, hi } = self.config.domain;
        for k in 0..=64 {
            let x = lo + (hi - lo) * k as f64 / 64.0;
            if self.f.value(x)?.abs() > 1e-14 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Turning points of the orbit with energy `energy`.
    pub fn turning_points(&self, energy: f64) -> Result<OrbitWindow> {
        if !(energy > 0.0 && energy < self.e_star) {
            return Err(Error::EnergyOutOfRange {
                energy,
                ceiling: self.e_star,
            });
        }
        let x2 = self.solve_level(energy, true)?;
        let x1 = self.solve_level(energy, false)?;
        Ok(OrbitWindow {
            energy,
            e_star: self.e_star,
            x1,
            x2,
        })
    }

    fn solve_level(&self, energy: f64, right: bool) -> Result<f64> {
        let (side, limit) = if right {
            (&self.right, self.right_limit)
        } else {
            (&self.left, self.left_limit)
        };
        let inside = |x: f64| x.abs() <= limit.abs();
        let idx = side.partition_point(|cp| inside(cp.x) && cp.values.v < energy);
        let lo = side[idx - 1].x;
        let hi = if idx < side.len() && inside(side[idx].x) {
            side[idx].x
        } else {
            limit
        };
        let fdf = |x: f64| -> Result<(f64, f64)> {
            let ad = self.antiderivatives(x)?;
            Ok((ad.v - energy, ad.mass() * self.g.value(x)?))
        };
        let guess = 0.5 * (lo + hi);
        let root = roots::newton_bisect(fdf, lo, hi, guess, 0.0, 200)?.ok_or(Error::EnergyOutOfRange {
            energy,
            ceiling: self.e_star,
        })?;
        let tol = self.config.tol_q * energy.max(1.0);
        if root.residual.abs() > tol {
            return Err(Error::QuadratureNonConvergence {
                estimate: root.residual.abs(),
                tolerance: tol,
            });
        }
        Ok(root.x)
    }

    /// Adaptive 64-point Gauss–Legendre integration helper shared by the
    /// period computations.
    pub(crate) fn integrate_fine<F>(&self, f: F, a: f64, b: f64, tol: Tolerance) -> Result<quad::Estimate>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        quad::integrate(&self.fine, f, a, b, tol)
    }
}

/// A checkpointed antiderivative `∫_0^x y(s) ds` of a scalar integrand.
pub struct Antiderivative {
    integrand: Box<dyn Fn(f64) -> Result<f64> + Send + Sync>,
    rule: GaussLegendre,
    tol: f64,
    right: Vec<(f64, f64)>,
    left: Vec<(f64, f64)>,
}

impl fmt::Debug for Antiderivative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Antiderivative")
            .field("checkpoints", &(self.left.len() + self.right.len()))
            .field("tol", &self.tol)
            .finish()
    }
}

impl Antiderivative {
    pub fn new<F>(integrand: F, domain: Interval, tol: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        let mut a = Antiderivative {
            integrand: Box::new(integrand),
            rule: GaussLegendre::new(PANEL_NODES),
            tol,
            right: Vec::new(),
            left: Vec::new(),
        };
        a.right = a.tabulate(domain.hi)?;
        a.left = a.tabulate(domain.lo)?;
        Ok(a)
    }

    fn segment(&self, a: f64, b: f64) -> Result<f64> {
        let tol = Tolerance {
            abs: 0.1 * self.tol,
            rel: 1e-15,
            max_depth: MAX_PANEL_DEPTH,
        };
        Ok(quad::integrate(&self.rule, |s| (self.integrand)(s), a, b, tol)?.value)
    }

    fn tabulate(&self, edge: f64) -> Result<Vec<(f64, f64)>> {
        let dir = edge.signum();
        let mut out = alloc::vec![(0.0, 0.0)];
        let mut k = 1;
        loop {
            let (px, pv) = out[out.len() - 1];
            let mut x = dir * k as f64 * CHECKPOINT_STEP;
            let last = x.abs() >= edge.abs() - 1e-3 * CHECKPOINT_STEP;
            if last {
                x = edge;
            }
            out.push((x, pv + self.segment(px, x)?));
            if last {
                return Ok(out);
            }
            k += 1;
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        let side = if x >= 0.0 { &self.right } else { &self.left };
        let last = side[side.len() - 1].0;
        if x.abs() > last.abs() {
            return Err(Error::Domain {
                subexpr: format!("x = {x}"),
                reason: "outside the antiderivative table",
            });
        }
        let k = ((x.abs() / CHECKPOINT_STEP).round() as usize).min(side.len() - 1);
        let (cx, cv) = side[k];
        if cx == x {
            return Ok(cv);
        }
        Ok(cv + self.segment(cx, x)?)
    }

    pub fn integrand(&self, x: f64) -> Result<f64> {
        (self.integrand)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;
    use approx::assert_relative_eq;

    fn sys(f: &str, g: &str) -> LienardSystem {
        LienardSystem::new(parse(f).unwrap(), parse(g).unwrap(), SystemConfig::default()).unwrap()
    }

    fn km(a3: f64) -> LienardSystem {
        sys("-3*x/(1+x^2)", &format!("x + {a3:?}*x^3"))
    }

    fn km_potential(a3: f64, x: f64) -> f64 {
        x * x * (1.0 + 0.5 * (1.0 + a3) * x * x) / (2.0 * (1.0 + x * x).powi(2))
    }

    #[test]
    fn harmonic_oscillator() {
        let s = sys("0", "x");
        assert_eq!(s.mass(3.0).unwrap(), 1.0);
        assert_relative_eq!(s.potential(1.0).unwrap(), 0.5, epsilon = 1e-15);
        let j = s.potential_jet(2.0, 3).unwrap();
        assert_relative_eq!(j.derivative(0), 2.0, epsilon = 1e-14);
        assert_eq!(j.derivative(1), 2.0);
        assert_eq!(j.derivative(2), 1.0);
        assert_eq!(j.derivative(3), 0.0);
        assert!(s.is_conservative());
        assert_eq!(s.curvature_at_origin(), 1.0);
    }

    #[test]
    fn no_equilibrium_at_origin() {
        let err = LienardSystem::new(parse("0").unwrap(), parse("1").unwrap(), SystemConfig::default()).unwrap_err();
        assert!(matches!(err, Error::CenterHypothesisViolated(_)));
        let err = LienardSystem::new(parse("0").unwrap(), parse("-x").unwrap(), SystemConfig::default()).unwrap_err();
        assert!(matches!(err, Error::CenterHypothesisViolated(_)));
        let err = LienardSystem::new(parse("0").unwrap(), parse("x^3").unwrap(), SystemConfig::default()).unwrap_err();
        assert!(matches!(err, Error::CenterHypothesisViolated(_)));
    }

    #[test]
    fn rational_mass_family() {
        let s = km(1.0);
        assert_relative_eq!(s.mass(1.0).unwrap(), 0.125, epsilon = 1e-15);
        assert_relative_eq!(s.potential(1.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_relative_eq!(s.potential_jet(1.0, 1).unwrap().derivative(1), 0.25, epsilon = 1e-15);
        for x in [0.5, 1.0, 2.0, -1.5] {
            assert!((s.potential(x).unwrap() - km_potential(1.0, x)).abs() <= s.tol_q());
        }
        // (sqrt mu)'' / sqrt mu = f^2 + f' = 3(4x^2 - 1)/(1 + x^2)^2
        for x in [0.0, 0.7] {
            let j = s.sqrt_mass_jet(x, 2).unwrap();
            let want = 3.0 * (4.0 * x * x - 1.0) / (1.0 + x * x).powi(2);
            assert_relative_eq!(j.derivative(2) / j.value(), want, epsilon = 1e-13);
        }
        let mj = s.mass_jet(0.3, 2).unwrap();
        let f = -0.9 / 1.09;
        assert_relative_eq!(mj.derivative(1), 2.0 * f * mj.value(), max_relative = 1e-13);
    }

    #[test]
    fn origin_series_matches_jets() {
        let s = km(0.5);
        let v = s.origin_series();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[1], 0.0);
        assert_relative_eq!(v[2], 0.5, epsilon = 1e-15);
        // V = x^2/2 (1 + 0.75 x^2)/(1 + x^2)^2 = x^2/2 + (0.75/2 - 1) x^4 + ...
        assert_relative_eq!(v[4], 0.375 - 1.0, epsilon = 1e-14);
        let r = s.reduced_potential_jet(5e-5, 2).unwrap();
        assert_relative_eq!(r.value(), km_potential(0.5, 5e-5) / 25e-10, max_relative = 1e-12);
    }

    #[test]
    fn turning_points_and_ceiling() {
        let h = sys("0", "x");
        assert_relative_eq!(h.energy_ceiling(), 50.0, max_relative = 1e-8);
        let w = h.turning_points(0.5).unwrap();
        assert_relative_eq!(w.x2, 1.0, epsilon = 1e-14);
        assert_relative_eq!(w.x1, -1.0, epsilon = 1e-14);
        assert!(matches!(h.turning_points(-1.0), Err(Error::EnergyOutOfRange { .. })));
        assert!(matches!(h.turning_points(h.energy_ceiling()), Err(Error::EnergyOutOfRange { .. })));

        let k = km(1.0);
        let w = k.turning_points(0.25).unwrap();
        assert_relative_eq!(w.x2, 1.0, epsilon = 1e-13);
        assert_relative_eq!(w.x1, -1.0, epsilon = 1e-13);

        let soft = LienardSystem::new(
            parse("0").unwrap(),
            parse("x - x^3").unwrap(),
            SystemConfig {
                domain: Interval::new(-2.0, 2.0),
                tol_q: 1e-10,
            },
        )
        .unwrap();
        assert_relative_eq!(soft.energy_ceiling(), 0.25, max_relative = 1e-8);
        assert_relative_eq!(soft.scan_limits().1, 1.0, epsilon = 1e-12);

        let bounded = LienardSystem::new(
            parse("-3*x/(1+x^2)").unwrap(),
            parse("x + 1*x^3").unwrap(),
            SystemConfig {
                domain: Interval::new(-5.0, 5.0),
                tol_q: 1e-10,
            },
        )
        .unwrap();
        let want = km_potential(1.0, 5.0);
        assert_relative_eq!(bounded.energy_ceiling(), want, max_relative = 1e-8);
    }

    #[test]
    fn outside_domain_is_an_error() {
        let h = sys("0", "x");
        assert!(matches!(h.potential(11.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn scalar_antiderivative() {
        let a = Antiderivative::new(|s| Ok(1.0 / (1.0 + s * s)), Interval::new(-3.0, 3.0), 1e-12).unwrap();
        for x in [-2.9, -0.3, 0.0, 0.01, 1.0, 3.0] {
            assert_relative_eq!(a.value(x).unwrap(), x.atan(), epsilon = 1e-14);
        }
        assert!(a.value(3.5).is_err());
    }
}
