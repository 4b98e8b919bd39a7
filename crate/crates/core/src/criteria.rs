//! Monotonicity and isochronicity criteria.
//!
//! * `N(x) = (u sqrt(mu))'' + (u (sqrt(mu))')'` with `u = V / V'^2`; a
//!   uniform sign of `N` over the orbit window fixes the sign of `dT/dE`.
//! * The residual `R = 3 P^2 P' f + 5 P P'^2 - 3 P^2 P''`, `P = g' + f g`,
//!   with the guards `W = 3 P^2 - g P'` and `g e^F + 2 P ∫_0^x e^F`.
//! * Schaaf's expression `5 g' g''^2 - 3 g'^2 g'''` for `f ≡ 0`.

use alloc::vec::Vec;
use num_traits::Float;

use crate::jet::Jet;
use crate::liesys::{LienardSystem, OrbitWindow};
use crate::roots;
use crate::{Error, Result, ORIGIN_RADIUS};

/// Default relative tolerance for the isochronous verdicts.
pub const DEFAULT_TOL_ISO: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 64;

/// `N(x)` with its three terms `u'' sqrt(mu)`, `3 u' (sqrt(mu))'` and
/// `2 u (sqrt(mu))''`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NValue {
    pub value: f64,
    pub terms: [f64; 3],
    /// `u sqrt(mu)`, used to scale verdicts when all terms vanish.
    pub u_sqrt_mass: f64,
}

/// Jet of `u = V / V'^2` of order 2.
pub fn u_jet(sys: &LienardSystem, x: f64) -> Result<Jet> {
    if x.abs() < ORIGIN_RADIUS {
        // V = x^2 Vt  =>  u = Vt / (2 Vt + x Vt')^2
        let vt = sys.reduced_potential_jet(x, 3)?;
        let d = &vt.scale(2.0) + &(&Jet::variable(x, 3) * &vt.differentiate());
        return vt
            .truncate(2)
            .checked_div(&(&d * &d))
            .ok_or(Error::DegenerateCritical { x });
    }
    let v = sys.potential_jet(x, 3)?;
    let dv = v.differentiate();
    if dv.value() == 0.0 {
        return Err(Error::DegenerateCritical { x });
    }
    let u = v.truncate(2).checked_div(&(&dv * &dv)).ok_or(Error::DegenerateCritical { x })?;
    if !u.is_finite() {
        return Err(Error::DegenerateCritical { x });
    }
    Ok(u)
}

pub fn n_function(sys: &LienardSystem, x: f64) -> Result<NValue> {
    let u = u_jet(sys, x)?;
    let s = sys.sqrt_mass_jet(x, 2)?;
    let terms = [
        u.derivative(2) * s.value(),
        3.0 * u.derivative(1) * s.derivative(1),
        2.0 * u.value() * s.derivative(2),
    ];
    Ok(NValue {
        value: terms[0] + terms[1] + terms[2],
        terms,
        u_sqrt_mass: u.value() * s.value(),
    })
}

/// The two expressions for `G`: the `A/B/C` form and `2 N / h'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GForms {
    pub abc: f64,
    pub succinct: f64,
    /// Largest single term of the `A/B/C` form, over the same denominator.
    pub scale: f64,
}

impl GForms {
    pub fn relative_gap(&self) -> f64 {
        let d = (self.abc - self.succinct).abs();
        if d == 0.0 {
            0.0
        } else {
            d / self.scale
        }
    }
}

/// Both forms of `G` at `x`; requires `|x| >= ORIGIN_RADIUS`.
pub fn g_two_ways(sys: &LienardSystem, x: f64) -> Result<GForms> {
    if x.abs() < ORIGIN_RADIUS {
        return Err(Error::InvalidArgument("the A/B/C form of G is singular at the origin"));
    }
    let v = sys.potential_jet(x, 3)?;
    let s = sys.sqrt_mass_jet(x, 2)?;
    let (v0, v1, v2, v3) = (v.value(), v.derivative(1), v.derivative(2), v.derivative(3));
    let (s0, s1, s2) = (s.value(), s.derivative(1), s.derivative(2));
    let a = [6.0 * v0 * v2 * v2, -3.0 * v1 * v1 * v2, -2.0 * v0 * v1 * v3];
    let b = [6.0 * v0 * v1 * v2, -3.0 * v1 * v1 * v1];
    let c = 2.0 * v0 * v1 * v1;
    let hp = v1.abs() / (2.0 * v0.sqrt());
    let den = 8.0 * v0 * v0 * hp.powi(5);
    let parts = [a[0] * s0, a[1] * s0, a[2] * s0, -b[0] * s1, -b[1] * s1, c * s2];
    let abc = parts.iter().sum::<f64>() / den;
    let scale = parts.iter().fold(0.0f64, |m, p| m.max(p.abs())) / den;
    let n = n_function(sys, x)?;
    Ok(GForms {
        abc,
        succinct: 2.0 * n.value / hp,
        scale,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Increasing,
    Decreasing,
    Isochronous,
    Indefinite,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Increasing => "increasing",
            Verdict::Decreasing => "decreasing",
            Verdict::Isochronous => "isochronous",
            Verdict::Indefinite => "indefinite",
        }
    }

    /// Classifies samples of a quantity against `tol * scale`.
    pub fn from_range(min: f64, max: f64, threshold: f64) -> Verdict {
        if min.abs() <= threshold && max.abs() <= threshold {
            Verdict::Isochronous
        } else if min >= -threshold && max > threshold {
            Verdict::Increasing
        } else if max <= threshold && min < -threshold {
            Verdict::Decreasing
        } else {
            Verdict::Indefinite
        }
    }
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub energy: f64,
    pub window: OrbitWindow,
    pub verdict: Verdict,
    /// `(x, N(x))` on Chebyshev nodes of the window.
    pub samples: Vec<(f64, f64)>,
    pub min_n: f64,
    pub max_n: f64,
    pub argmin: f64,
    pub argmax: f64,
    /// Largest sampled term of `N` (or `|u sqrt(mu)| / l^2`, `l` the window
    /// half-width).
    pub scale: f64,
    pub tol_iso: f64,
}

pub fn classify_monotonicity(sys: &LienardSystem, energy: f64, n_samples: usize) -> Result<MonotonicityReport> {
    classify_monotonicity_with(sys, energy, n_samples, DEFAULT_TOL_ISO)
}

pub fn classify_monotonicity_with(
    sys: &LienardSystem,
    energy: f64,
    n_samples: usize,
    tol_iso: f64,
) -> Result<MonotonicityReport> {
    if n_samples < 16 {
        return Err(Error::InvalidArgument("at least 16 samples are required"));
    }
    let window = sys.turning_points(energy)?;
    let l2 = window.half_width().powi(2);
    let mut samples = Vec::with_capacity(n_samples);
    let mut scale: f64 = 0.0;
    let (mut min_n, mut max_n) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut argmin, mut argmax) = (0.0, 0.0);
    for x in window.chebyshev_nodes(n_samples) {
        let n = n_function(sys, x)?;
        for t in n.terms {
            scale = scale.max(t.abs());
        }
        scale = scale.max(n.u_sqrt_mass.abs() / l2);
        if n.value < min_n {
            min_n = n.value;
            argmin = x;
        }
        if n.value > max_n {
            max_n = n.value;
            argmax = x;
        }
        samples.push((x, n.value));
    }
    Ok(MonotonicityReport {
        energy,
        window,
        verdict: Verdict::from_range(min_n, max_n, tol_iso * scale),
        samples,
        min_n,
        max_n,
        argmin,
        argmax,
        scale,
        tol_iso,
    })
}

/// `P`, `P'`, `P''` for `P = g' + f g`, plus `f` and `g` at the point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PJet {
    pub p: [f64; 3],
    pub f: f64,
    pub g: f64,
}

pub fn p_jet(sys: &LienardSystem, x: f64) -> Result<PJet> {
    let f = sys.f().jet(x, 2)?;
    let g = sys.g().jet(x, 3)?;
    let p = &g.differentiate() + &(&g.truncate(2) * &f);
    Ok(PJet {
        p: [p.value(), p.derivative(1), p.derivative(2)],
        f: f.value(),
        g: g.value(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub value: f64,
    /// Largest of `|3 P^2 P' f|`, `|5 P P'^2|`, `|3 P^2 P''|` and `|P|^3`.
    pub scale: f64,
}

/// `R = 3 P^2 P' f + 5 P P'^2 - 3 P^2 P''`.
pub fn isochrony_residual(sys: &LienardSystem, x: f64) -> Result<Residual> {
    let PJet { p: [p, p1, p2], f, .. } = p_jet(sys, x)?;
    let terms = [3.0 * p * p * p1 * f, 5.0 * p * p1 * p1, -3.0 * p * p * p2];
    let scale = terms.iter().fold(p.abs().powi(3), |m, t| m.max(t.abs()));
    Ok(Residual {
        value: terms.iter().sum(),
        scale,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Guards {
    /// `W = 3 P^2 - g P'`
    pub w: f64,
    /// `g e^F + 2 P ∫_0^x e^F`
    pub guard2: f64,
    /// Scale of `guard2`'s two terms.
    pub guard2_scale: f64,
    /// `C = P' e^{-F} / W`
    pub c: f64,
    /// `D = (3 P + 2 P' e^{-F} ∫_0^x e^F) / (2 W)`
    pub d: f64,
}

pub fn isochrony_guards(sys: &LienardSystem, x: f64) -> Result<Guards> {
    let PJet { p: [p, p1, _], g, .. } = p_jet(sys, x)?;
    let ad = sys.antiderivatives(x)?;
    let w = 3.0 * p * p - g * p1;
    if w.abs() <= 1e-12 * (3.0 * p * p).max((g * p1).abs()) {
        return Err(Error::GuardViolation { x, w });
    }
    let ef = ad.f_int.exp();
    let (a, b) = (g * ef, 2.0 * p * ad.phi);
    Ok(Guards {
        w,
        guard2: a + b,
        guard2_scale: a.abs().max(b.abs()),
        c: p1 / (ef * w),
        d: (3.0 * p + 2.0 * p1 * ad.phi / ef) / (2.0 * w),
    })
}

/// `(max - min) / max(1, max |v|)` over the values.
pub fn spread(values: &[f64]) -> f64 {
    let (lo, hi, big) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY, 0.0f64), |(lo, hi, big), v| {
        (lo.min(*v), hi.max(*v), big.max(v.abs()))
    });
    if values.is_empty() {
        0.0
    } else {
        (hi - lo) / big.max(1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsochronyReport {
    pub energy: f64,
    pub window: OrbitWindow,
    pub residual_samples: Vec<(f64, f64)>,
    pub w_samples: Vec<(f64, f64)>,
    pub guard2_samples: Vec<(f64, f64)>,
    pub c_samples: Vec<(f64, f64)>,
    pub d_samples: Vec<(f64, f64)>,
    /// Points where `W` vanishes: samples, and roots bracketed by a sign
    /// change between neighbouring samples.
    pub guard_violations: Vec<f64>,
    pub max_abs_residual: f64,
    pub residual_scale: f64,
    pub min_abs_w: f64,
    pub min_guard2_margin: f64,
    pub c_spread: f64,
    pub d_spread: f64,
    pub tol: f64,
    /// Residual within tolerance and both guards nonvanishing on the samples.
    pub verdict: bool,
}

impl IsochronyReport {
    pub fn residual_within_tolerance(&self) -> bool {
        self.max_abs_residual <= self.tol * self.residual_scale
    }
}

pub fn isochrony_report(sys: &LienardSystem, energy: f64, n_samples: usize, tol: f64) -> Result<IsochronyReport> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument("at least 2 samples are required"));
    }
    let window = sys.turning_points(energy)?;
    let mut rep = IsochronyReport {
        energy,
        window,
        residual_samples: Vec::new(),
        w_samples: Vec::new(),
        guard2_samples: Vec::new(),
        c_samples: Vec::new(),
        d_samples: Vec::new(),
        guard_violations: Vec::new(),
        max_abs_residual: 0.0,
        residual_scale: 0.0,
        min_abs_w: f64::INFINITY,
        min_guard2_margin: f64::INFINITY,
        c_spread: 0.0,
        d_spread: 0.0,
        tol,
        verdict: false,
    };
    for x in window.chebyshev_nodes(n_samples) {
        let r = isochrony_residual(sys, x)?;
        rep.residual_samples.push((x, r.value));
        rep.max_abs_residual = rep.max_abs_residual.max(r.value.abs());
        rep.residual_scale = rep.residual_scale.max(r.scale);
        match isochrony_guards(sys, x) {
            Ok(gd) => {
                rep.w_samples.push((x, gd.w));
                rep.guard2_samples.push((x, gd.guard2));
                rep.c_samples.push((x, gd.c));
                rep.d_samples.push((x, gd.d));
                rep.min_abs_w = rep.min_abs_w.min(gd.w.abs());
                let margin = if gd.guard2_scale > 0.0 {
                    gd.guard2.abs() / gd.guard2_scale
                } else {
                    0.0
                };
                rep.min_guard2_margin = rep.min_guard2_margin.min(margin);
            }
            Err(Error::GuardViolation { x, w }) => {
                rep.guard_violations.push(x);
                rep.w_samples.push((x, w));
                rep.min_abs_w = rep.min_abs_w.min(w.abs());
            }
            Err(e) => return Err(e),
        }
    }
    for pair in rep.w_samples.windows(2) {
        let ((a, wa), (b, wb)) = (pair[0], pair[1]);
        if wa * wb < 0.0 {
            let w_at = |x: f64| {
                let PJet { p: [p, p1, _], g, .. } = p_jet(sys, x)?;
                Ok(3.0 * p * p - g * p1)
            };
            if let Some(root) = roots::bisect(w_at, a, b)? {
                rep.guard_violations.push(root);
                rep.min_abs_w = 0.0;
            }
        }
    }
    rep.guard_violations.sort_by(f64::total_cmp);
    let values = |s: &[(f64, f64)]| s.iter().map(|p| p.1).collect::<Vec<_>>();
    rep.c_spread = spread(&values(&rep.c_samples));
    rep.d_spread = spread(&values(&rep.d_samples));
    rep.verdict =
        rep.residual_within_tolerance() && rep.guard_violations.is_empty() && rep.min_guard2_margin > tol;
    Ok(rep)
}

/// `5 g' g''^2 - 3 g'^2 g'''` for a conservative system.
pub fn schaaf_value(sys: &LienardSystem, x: f64) -> Result<f64> {
    require_conservative(sys)?;
    let g = sys.g().jet(x, 3)?;
    let (g1, g2, g3) = (g.derivative(1), g.derivative(2), g.derivative(3));
    Ok(5.0 * g1 * g2 * g2 - 3.0 * g1 * g1 * g3)
}

fn require_conservative(sys: &LienardSystem) -> Result<()> {
    if sys.is_conservative() {
        return Ok(());
    }
    let d = sys.domain();
    for k in 0..=64 {
        let x = d.lo + (d.hi - d.lo) * k as f64 / 64.0;
        let f = sys.f().value(x)?;
        if f != 0.0 {
            return Err(Error::NotConservative { x, f });
        }
    }
    Err(Error::NotConservative { x: d.lo, f: f64::NAN })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchaafReport {
    pub energy: f64,
    pub samples: Vec<(f64, f64)>,
    pub min: f64,
    pub max: f64,
    /// `Some(1)` or `Some(-1)` when every sample is strictly of that sign.
    pub uniform_sign: Option<i8>,
}

pub fn schaaf_report(sys: &LienardSystem, energy: f64, n_samples: usize) -> Result<SchaafReport> {
    require_conservative(sys)?;
    let window = sys.turning_points(energy)?;
    let samples = window
        .chebyshev_nodes(n_samples)
        .into_iter()
        .map(|x| Ok((x, schaaf_value(sys, x)?)))
        .collect::<Result<Vec<_>>>()?;
    let min = samples.iter().fold(f64::INFINITY, |m, s| m.min(s.1));
    let max = samples.iter().fold(f64::NEG_INFINITY, |m, s| m.max(s.1));
    let uniform_sign = if min > 0.0 {
        Some(1)
    } else if max < 0.0 {
        Some(-1)
    } else {
        None
    };
    Ok(SchaafReport {
        energy,
        samples,
        min,
        max,
        uniform_sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liesys::{Interval, SystemConfig};
    use crate::parse;
    use alloc::format;
    use approx::assert_relative_eq;

    fn sys(f: &str, g: &str) -> LienardSystem {
        LienardSystem::new(parse(f).unwrap(), parse(g).unwrap(), SystemConfig::default()).unwrap()
    }

    fn km(a3: f64) -> LienardSystem {
        sys("-3*x/(1+x^2)", &format!("x + {a3:?}*x^3"))
    }

    #[test]
    fn harmonic_n_vanishes() {
        let s = sys("0", "x");
        for x in [-2.0, 0.0, 3e-5, 0.5] {
            let n = n_function(&s, x).unwrap();
            assert!(n.value.abs() < 1e-14, "{x} {n:?}");
            assert_relative_eq!(u_jet(&s, x).unwrap().value(), 0.5, epsilon = 1e-12);
        }
        let g = g_two_ways(&s, 0.5).unwrap();
        assert!(g.abc.abs() < 1e-12 && g.succinct.abs() < 1e-12);
        let rep = classify_monotonicity(&s, 1.0, 32).unwrap();
        assert_eq!(rep.verdict, Verdict::Isochronous);
        assert_eq!(rep.samples.len(), 32);
    }

    #[test]
    fn u_at_origin() {
        let s = km(1.0);
        assert_relative_eq!(u_jet(&s, 0.0).unwrap().value(), 0.5, epsilon = 1e-15);
        // series path and direct path agree across the switch radius
        let inner = n_function(&s, 0.99 * ORIGIN_RADIUS).unwrap();
        let outer = n_function(&s, 1.01 * ORIGIN_RADIUS).unwrap();
        assert!((inner.value - outer.value).abs() < 1e-7);
    }

    #[test]
    fn degenerate_critical_point() {
        let s = LienardSystem::new(
            parse("0").unwrap(),
            parse("x - x^3").unwrap(),
            SystemConfig {
                domain: Interval::new(-2.0, 2.0),
                tol_q: 1e-10,
            },
        )
        .unwrap();
        assert!(matches!(n_function(&s, 1.0), Err(Error::DegenerateCritical { .. })));
    }

    #[test]
    fn g_forms_agree() {
        let s = km(0.96);
        let g = g_two_ways(&s, 0.3).unwrap();
        assert!(g.relative_gap() <= 1e-8, "{g:?}");
        let g = g_two_ways(&s, -1.2).unwrap();
        assert!(g.relative_gap() <= 1e-8, "{g:?}");
        assert!(g_two_ways(&s, 0.0).is_err());
    }

    #[test]
    fn rational_mass_verdicts() {
        assert_eq!(classify_monotonicity(&km(1.055), 0.05, 64).unwrap().verdict, Verdict::Decreasing);
        assert_eq!(classify_monotonicity(&km(0.999), 0.05, 64).unwrap().verdict, Verdict::Increasing);
        assert_eq!(classify_monotonicity(&km(1.0), 0.05, 64).unwrap().verdict, Verdict::Isochronous);
        assert!(classify_monotonicity(&km(1.0), 0.05, 8).is_err());
    }

    #[test]
    fn residual_examples() {
        let h = sys("0", "x");
        assert_eq!(isochrony_residual(&h, 0.7).unwrap().value, 0.0);
        let gd = isochrony_guards(&h, 0.7).unwrap();
        assert_eq!((gd.w, gd.c, 2.0 * gd.d), (3.0, 0.0, 1.0));

        let cubic = sys("0", "x + x^3");
        assert_relative_eq!(isochrony_residual(&cubic, 1.0).unwrap().value, 432.0, epsilon = 1e-12);
        assert_relative_eq!(isochrony_guards(&cubic, 1.0).unwrap().w, 36.0, epsilon = 1e-12);
        for x in [-1.3, 0.2, 2.0] {
            assert_eq!(isochrony_residual(&cubic, x).unwrap().value, schaaf_value(&cubic, x).unwrap());
        }
        assert_relative_eq!(schaaf_value(&cubic, 1.0).unwrap(), 432.0, epsilon = 1e-12);
        assert_eq!(schaaf_value(&h, 0.4).unwrap(), 0.0);
        let quad = sys("0", "x + x^2");
        assert_relative_eq!(schaaf_value(&quad, 0.25).unwrap(), 30.0, epsilon = 1e-12);
        assert!(matches!(schaaf_value(&km(1.0), 0.5), Err(Error::NotConservative { .. })));
    }

    #[test]
    fn isochronous_rational_mass_report() {
        let s = km(1.0);
        let rep = isochrony_report(&s, 0.2, 64, DEFAULT_TOL_ISO).unwrap();
        assert!(rep.verdict, "{rep:?}");
        assert!(rep.c_spread <= 1e-8 && rep.d_spread <= 1e-8);
        let rep = isochrony_report(&km(0.9), 0.2, 64, DEFAULT_TOL_ISO).unwrap();
        assert!(!rep.verdict);
        assert!(rep.max_abs_residual > 1e-3);
    }

    #[test]
    fn guard_violation() {
        // P = 1 + x f = (1 - x^2)(1 - x^2/4) rises through zero at x = 2,
        // so W = 3 P^2 - x P' changes sign in (1, 2)
        let s = LienardSystem::new(
            parse("-1.25*x + 0.25*x^3").unwrap(),
            parse("x").unwrap(),
            SystemConfig {
                domain: Interval::new(-3.0, 3.0),
                tol_q: 1e-10,
            },
        )
        .unwrap();
        let p = |x: f64| 1.0 - 1.25 * x * x + 0.25 * x.powi(4);
        let dp = |x: f64| -2.5 * x + x.powi(3);
        let root = crate::roots::bisect(|x| Ok(3.0 * p(x) * p(x) - x * dp(x)), 1.0, 2.0)
            .unwrap()
            .unwrap();
        assert!(matches!(isochrony_guards(&s, root), Err(Error::GuardViolation { .. })));
        assert!(isochrony_guards(&s, 0.5).is_ok());
        let rep = isochrony_report(&s, 0.7, 64, DEFAULT_TOL_ISO).unwrap();
        assert!(!rep.verdict);
        assert!(rep.guard_violations.iter().any(|x| (x - root).abs() < 1e-9), "{:?}", rep.guard_violations);
        assert!(rep.guard_violations.iter().any(|x| (x + root).abs() < 1e-9));
    }
}
