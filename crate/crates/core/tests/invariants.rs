use std::f64::consts::PI;

use periodscope_core::criteria::{classify_monotonicity, isochrony_report, n_function, Verdict, DEFAULT_TOL_ISO};
use periodscope_core::period::{
    max_pairwise_rel_diff, period_derivative, period_derivative_sine_form, period_ode_return,
    period_theta_quadrature, period_x_quadrature, s_function,
};
use periodscope_core::repro::{km_closed_forms, km_default_grid, km_polynomial_check, sect3_family, KMFamily};
use periodscope_core::{parse, Interval, LienardSystem, SystemConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn system(f: &str, g: &str, lo: f64, hi: f64) -> LienardSystem {
    LienardSystem::new(
        parse(f).unwrap(),
        parse(g).unwrap(),
        SystemConfig {
            domain: Interval::new(lo, hi),
            tol_q: 1e-10,
        },
    )
    .unwrap()
}

#[test]
fn harmonic_is_isochronous_at_every_energy() {
    let s = system("0", "x", -10.0, 10.0);
    for e in [0.01, 0.1, 1.0] {
        let d = period_derivative(&s, e).unwrap();
        assert!((d.period - 2.0 * PI).abs() < 1e-10);
        assert!(d.derivative.unwrap().abs() < 1e-8, "{e}: {:?}", d.derivative);
    }
}

#[test]
fn closed_forms_match_quadrature_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for a3 in [0.0, 0.96, 1.0, 1.2] {
        let s = KMFamily::new(a3).system().unwrap();
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            let c = km_closed_forms(a3, x).unwrap();
            let v = s.potential_jet(x, 1).unwrap();
            assert!((v.value() - c.v).abs() <= 1e-9, "a3 = {a3}, x = {x}");
            assert!((v.derivative(1) - c.dv).abs() <= 1e-9, "a3 = {a3}, x = {x}");
        }
    }
}

#[test]
fn polynomial_sign_matches_n() {
    for a3 in [0.9, 0.96, 0.999, 1.001, 1.055, 1.2] {
        let s = KMFamily::new(a3).system().unwrap();
        let check = km_polynomial_check(a3, &km_default_grid(a3)).unwrap();
        for (x, _, poly) in check.samples {
            if poly.abs() < 1e-12 {
                continue;
            }
            let n = n_function(&s, x).unwrap().value;
            assert_eq!(n.signum(), poly.signum(), "a3 = {a3}, x = {x}: N = {n}, poly = {poly}");
        }
    }
}

#[test]
fn verdicts_agree_with_measured_periods() {
    for a3 in [0.9, 0.999, 1.001, 1.1] {
        let s = KMFamily::new(a3).system().unwrap();
        let e = 0.3;
        let v = classify_monotonicity(&s, e, 64).unwrap().verdict;
        let t: Vec<f64> = [0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|k| period_theta_quadrature(&s, k * e).unwrap().period)
            .collect();
        for w in t.windows(2) {
            match v {
                Verdict::Increasing => assert!(w[1] >= w[0] - 1e-10, "{a3}: {t:?}"),
                Verdict::Decreasing => assert!(w[1] <= w[0] + 1e-10, "{a3}: {t:?}"),
                other => panic!("unexpected verdict {other} for a3 = {a3}"),
            }
        }
    }
}

#[test]
fn unit_p_systems_are_isochronous() {
    // g' + f g = 1 with g = sin x, f = tan(x/2)
    let s = system("tan(x/2)", "sin(x)", -2.0, 2.0);
    let e_star = s.energy_ceiling();
    let rep = isochrony_report(&s, 0.5 * e_star, 64, DEFAULT_TOL_ISO).unwrap();
    assert!(rep.verdict, "{rep:?}");
    assert!(rep.c_spread <= 1e-8 && rep.d_spread <= 1e-8);
    let t: Vec<f64> = [0.2, 0.5, 0.8]
        .iter()
        .map(|k| period_ode_return(&s, k * e_star).unwrap().period)
        .collect();
    assert!(max_pairwise_rel_diff(&t) <= 1e-5, "{t:?}");
    assert_eq!(classify_monotonicity(&s, 0.5 * e_star, 64).unwrap().verdict, Verdict::Isochronous);
}

#[test]
fn isochrony_tests_agree_on_known_centers() {
    let km = KMFamily::new(1.0).system().unwrap();
    let weight = sect3_family(parse("1+x^2").unwrap()).unwrap();
    for (s, e) in [(&km, 0.2), (&weight, 0.8)] {
        assert_eq!(classify_monotonicity(s, e, 64).unwrap().verdict, Verdict::Isochronous);
        let t: Vec<f64> = [0.25, 0.5, 1.0]
            .iter()
            .map(|k| period_theta_quadrature(s, k * e).unwrap().period)
            .collect();
        assert!(max_pairwise_rel_diff(&t) <= 1e-5);
        assert!(isochrony_report(s, e, 64, DEFAULT_TOL_ISO).unwrap().verdict);
    }
    let off = KMFamily::new(0.9).system().unwrap();
    assert!(!isochrony_report(&off, 0.2, 64, DEFAULT_TOL_ISO).unwrap().verdict);
}

#[test]
fn other_even_weights_give_period_two_pi() {
    for w in ["2 + cos(x)", "cosh(x/2)"] {
        let s = sect3_family(parse(w).unwrap()).unwrap();
        let e_star = s.energy_ceiling();
        for k in [0.1, 0.4, 0.7] {
            let t = period_theta_quadrature(&s, k * e_star).unwrap().period;
            assert!((t - 2.0 * PI).abs() <= 1e-5 * 2.0 * PI, "{w}: {t}");
        }
    }
}

#[test]
fn integration_by_parts_forms_agree() {
    let cases = [
        ("0.2 + 0.3*sin(x)", "x + 0.4*x^3", 0.3),
        ("-3*x/(1+x^2)", "x + 1.1*x^3", 0.2),
        ("0", "x + x^2", 0.1),
    ];
    for (f, g, e) in cases {
        let s = system(f, g, -3.0, 3.0);
        let cos_form = period_derivative(&s, e).unwrap().derivative.unwrap();
        let sin_form = period_derivative_sine_form(&s, e).unwrap();
        assert!((cos_form - sin_form).abs() <= 1e-6 * cos_form.abs(), "{f}, {g}: {cos_form} {sin_form}");
    }
}

#[test]
fn energy_is_conserved_along_the_return_orbit() {
    let s = system("0.3 - 0.2*x^2", "x + 0.5*x^3", -3.0, 3.0);
    for e in [0.05, 0.5, 2.0] {
        let p = period_ode_return(&s, e).unwrap();
        assert!(p.est_error <= 1e-8 * e, "{e}: {}", p.est_error);
        let x = period_x_quadrature(&s, e).unwrap().period;
        assert!((p.period - x).abs() <= 1e-8 * x);
    }
}

#[test]
fn s_is_odd_for_symmetric_systems() {
    let s = system("-x/(2+x^2)", "x + 0.3*x^3 + 0.1*x^5", -3.0, 3.0);
    for x in [1e-5, 0.01, 0.3, 1.2, 2.5] {
        let (a, b) = (s_function(&s, x).unwrap(), s_function(&s, -x).unwrap());
        assert!((a + b).abs() <= 1e-9 * a.abs().max(1.0), "{x}: {a} {b}");
    }
}
