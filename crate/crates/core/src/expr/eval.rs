use alloc::string::ToString;
use core::f64::consts::PI;
use num_traits::Float;

use super::{BinOp, Expr, Func};
use crate::jet::Jet;
use crate::{Error, Result};

const MAX_INTEGER_POWER: f64 = 1024.0;

impl Expr {
    fn domain(&self, reason: &'static str) -> Error {
        Error::domain(self.to_string(), reason)
    }

    fn finite(&self, v: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain("non-finite value"))
        }
    }

    fn finite_jet(&self, j: Jet) -> Result<Jet> {
        if j.is_finite() {
            Ok(j)
        } else {
            Err(self.domain("non-finite derivative"))
        }
    }

    /// Integer exponent when `exp` is a constant integer of moderate size.
    fn integer_exponent(exp: &Expr) -> Result<Option<i32>> {
        if !exp.is_constant() {
            return Ok(None);
        }
        let n = exp.eval(0.0)?;
        if n == n.round() && n.abs() <= MAX_INTEGER_POWER {
            Ok(Some(n as i32))
        } else {
            Ok(None)
        }
    }

    /// Plain evaluation at `x`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var => x,
            Expr::Pi => PI,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, a, b) => {
                let l = a.eval(x)?;
                match op {
                    BinOp::Add => l + b.eval(x)?,
                    BinOp::Sub => l - b.eval(x)?,
                    BinOp::Mul => l * b.eval(x)?,
                    BinOp::Div => {
                        let r = b.eval(x)?;
                        if r == 0.0 {
                            return Err(self.domain("division by zero"));
                        }
                        l / r
                    }
                    BinOp::Pow => {
                        if let Some(n) = Self::integer_exponent(b)? {
                            if l == 0.0 && n < 0 {
                                return Err(self.domain("zero to a negative power"));
                            }
                            l.powi(n)
                        } else {
                            let r = b.eval(x)?;
                            if l > 0.0 {
                                l.powf(r)
                            } else if l == 0.0 && r > 0.0 && b.is_constant() {
                                0.0
                            } else {
                                return Err(self.domain("non-positive base with real exponent"));
                            }
                        }
                    }
                }
            }
            Expr::Call(func, arg) => {
                let u = arg.eval(x)?;
                match func {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => {
                        if u.cos() == 0.0 {
                            return Err(self.domain("tan pole"));
                        }
                        u.tan()
                    }
                    Func::Atan => u.atan(),
                    Func::Exp => u.exp(),
                    Func::Ln => {
                        if !(u > 0.0) {
                            return Err(self.domain("logarithm of a non-positive value"));
                        }
                        u.ln()
                    }
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(self.domain("square root of a negative value"));
                        }
                        u.sqrt()
                    }
                    Func::Sinh => u.sinh(),
                    Func::Cosh => u.cosh(),
                    Func::Tanh => u.tanh(),
                }
            }
        };
        self.finite(v)
    }

    /// Taylor jet of order `order` at `x`; `c[0]` equals [`Expr::eval`].
    pub fn eval_jet(&self, x: f64, order: usize) -> Result<Jet> {
        let j = match self {
            Expr::Num(v) => Jet::constant(x, *v, order),
            Expr::Var => Jet::variable(x, order),
            Expr::Pi => Jet::constant(x, PI, order),
            Expr::Neg(e) => -e.eval_jet(x, order)?,
            Expr::Binary(op, a, b) => {
                let l = a.eval_jet(x, order)?;
                match op {
                    BinOp::Add => &l + &b.eval_jet(x, order)?,
                    BinOp::Sub => &l - &b.eval_jet(x, order)?,
                    BinOp::Mul => &l * &b.eval_jet(x, order)?,
                    BinOp::Div => l
                        .checked_div(&b.eval_jet(x, order)?)
                        .ok_or_else(|| self.domain("division by zero"))?,
                    BinOp::Pow => {
                        if let Some(n) = Self::integer_exponent(b)? {
                            l.powi(n)
                                .ok_or_else(|| self.domain("zero to a negative power"))?
                        } else if b.is_constant() {
                            l.powf(b.eval(x)?)
                                .ok_or_else(|| self.domain("non-positive base with real exponent"))?
                        } else {
                            let ln = l
                                .ln()
                                .ok_or_else(|| self.domain("non-positive base with real exponent"))?;
                            (&ln * &b.eval_jet(x, order)?).exp()
                        }
                    }
                }
            }
            Expr::Call(func, arg) => {
                let u = arg.eval_jet(x, order)?;
                match func {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Tan => u.tan().ok_or_else(|| self.domain("tan pole"))?,
                    Func::Atan => u.atan(),
                    Func::Exp => u.exp(),
                    Func::Ln => u
                        .ln()
                        .ok_or_else(|| self.domain("logarithm of a non-positive value"))?,
                    Func::Sqrt => u.sqrt().ok_or_else(|| {
                        self.domain("square root of a negative value or non-differentiable at 0")
                    })?,
                    Func::Sinh => u.sinh(),
                    Func::Cosh => u.cosh(),
                    Func::Tanh => u.tanh(),
                }
            }
        };
        self.finite_jet(j)
    }
}

/// Taylor jet of `e` at `x` up to `order`.
pub fn eval_jet(e: &Expr, x: f64, order: usize) -> Result<Jet> {
    e.eval_jet(x, order)
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;
    use crate::Error;
    use approx::assert_relative_eq;

    #[test]
    fn square_at_three() {
        let j = parse("x^2").unwrap().eval_jet(3.0, 2).unwrap();
        assert_eq!(j.coeffs(), &[9.0, 6.0, 1.0]);
    }

    #[test]
    fn rational_coefficient_slope_at_origin() {
        // d/dx [-3x/(1+x^2)] at 0 is -3
        let j = parse("-3*x/(1+x^2)").unwrap().eval_jet(0.0, 1).unwrap();
        assert_eq!(j.value(), 0.0);
        assert_relative_eq!(j.derivative(1), -3.0, epsilon = 1e-15);
    }

    #[test]
    fn exp_coefficients() {
        let j = parse("exp(x)").unwrap().eval_jet(0.0, 4).unwrap();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (c, w) in j.coeffs().iter().zip(want) {
            assert_relative_eq!(*c, w, epsilon = 1e-15);
        }
    }

    #[test]
    fn value_matches_scalar_eval() {
        for src in ["sin(x)*cosh(x)/(2 + x^2)", "atan(x)^2/2", "sqrt(1+x^2)^3", "x^x", "2^x", "tanh(x) - tan(x/3)"] {
            let e = parse(src).unwrap();
            for &x in &[0.3, 1.1, 2.0] {
                assert_relative_eq!(e.eval_jet(x, 3).unwrap().value(), e.eval(x).unwrap(), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn domain_errors_name_subexpression() {
        let e = parse("1 + ln(x - 2)").unwrap();
        match e.eval(1.0).unwrap_err() {
            Error::Domain { subexpr, .. } => assert_eq!(subexpr, "ln(x - 2)"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("1/x").unwrap().eval(0.0), Err(Error::Domain { .. })));
        assert!(matches!(parse("1/x").unwrap().eval_jet(0.0, 2), Err(Error::Domain { .. })));
        assert!(matches!(parse("sqrt(x)").unwrap().eval(-1.0), Err(Error::Domain { .. })));
        assert!(matches!(parse("sqrt(x)").unwrap().eval_jet(0.0, 1), Err(Error::Domain { .. })));
        assert_eq!(parse("sqrt(x)").unwrap().eval(0.0).unwrap(), 0.0);
        assert!(matches!(parse("x^0.5").unwrap().eval(-1.0), Err(Error::Domain { .. })));
        assert!(matches!(parse("x^-1").unwrap().eval(0.0), Err(Error::Domain { .. })));
        assert!(matches!(parse("exp(exp(x))").unwrap().eval(10.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn negative_base_integer_power() {
        let e = parse("x^3").unwrap();
        assert_eq!(e.eval(-2.0).unwrap(), -8.0);
        let j = e.eval_jet(-2.0, 3).unwrap();
        assert_eq!(j.derivatives(), alloc::vec![-8.0, 12.0, -12.0, 6.0]);
    }
}
