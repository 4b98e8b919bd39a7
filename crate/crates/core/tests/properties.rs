use periodscope_core::expr::{BinOp, Func};
use periodscope_core::period::{period_theta_quadrature, BranchInverter};
use periodscope_core::{parse, Expr, Jet, LienardSystem, SystemConfig};
use proptest::prelude::*;

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        Just(Expr::Pi),
        (0u32..1000).prop_map(|n| Expr::num(n as f64 / 8.0)),
        (1e-9f64..1e9).prop_map(Expr::num),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        let ops = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow)
        ];
        prop_oneof![
            (ops, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            inner.clone().prop_map(Expr::neg),
            (0..Func::ALL.len(), inner).prop_map(|(i, a)| Expr::call(Func::ALL[i], a)),
        ]
    })
}

fn arb_jet(order: usize) -> impl Strategy<Value = Jet> {
    proptest::collection::vec(-3.0f64..3.0, order + 1).prop_map(|c| Jet::new(0.3, c))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printed_expression_parses_back(e in arb_expr()) {
        let printed = e.to_string();
        prop_assert_eq!(parse(&printed).unwrap(), e);
    }

    #[test]
    fn jet_product_rule(a in arb_jet(4), b in arb_jet(4)) {
        let lhs = (&a * &b).differentiate();
        let rhs = &(&a.differentiate() * &b.truncate(3)) + &(&a.truncate(3) * &b.differentiate());
        for k in 0..=3 {
            prop_assert!(close(lhs.coeff(k), rhs.coeff(k), 1e-12));
        }
    }

    #[test]
    fn jet_exp_ln_round_trip(mut a in arb_jet(5)) {
        a = a.add_scalar(7.0);
        let back = a.ln().unwrap().exp();
        for k in 0..=5 {
            prop_assert!(close(back.coeff(k), a.coeff(k), 1e-12));
        }
    }

    #[test]
    fn jet_division_inverts_product(a in arb_jet(4), b in arb_jet(4)) {
        let b = b.add_scalar(5.0);
        let q = (&a * &b).checked_div(&b).unwrap();
        for k in 0..=4 {
            prop_assert!(close(q.coeff(k), a.coeff(k), 1e-10));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn branch_inverter_round_trips(a3 in 0.5f64..1.5, frac in 0.05f64..0.9, s in -1.0f64..1.0, t in -1.0f64..1.0) {
        let sys = LienardSystem::new(
            parse("-3*x/(1+x^2)").unwrap(),
            parse(&format!("x + {a3:?}*x^3")).unwrap(),
            SystemConfig::default(),
        )
        .unwrap();
        let e = frac * sys.energy_ceiling();
        let inv = BranchInverter::new(&sys, e).unwrap();
        let (r1, r2) = (s.min(t) * e.sqrt(), s.max(t) * e.sqrt());
        let (x1, x2) = (inv.invert(r1).unwrap(), inv.invert(r2).unwrap());
        prop_assert!(x1 <= x2);
        for (r, x) in [(r1, x1), (r2, x2)] {
            prop_assert!((inv.h(x).unwrap().0 - r).abs() <= 1e-12 * r.abs().max(1.0));
        }
    }

    #[test]
    fn period_is_positive_and_bounded_below(c3 in 0.0f64..1.0, e in 0.01f64..2.0) {
        // hardening spring: period below the linear one
        let sys = LienardSystem::new(parse("0").unwrap(), parse(&format!("x + {c3:?}*x^3")).unwrap(), SystemConfig::default()).unwrap();
        let t = period_theta_quadrature(&sys, e).unwrap();
        prop_assert!(t.period > 0.0 && t.est_error >= 0.0);
        prop_assert!(t.period <= 2.0 * std::f64::consts::PI * (1.0 + 1e-12));
    }
}
