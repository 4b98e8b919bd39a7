//! Closed-form expressions in one variable `x`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := factor (("*"|"/") factor)* ;
//! factor := unary ("^" factor)? ;
//! unary  := "-" unary | atom ;
//! atom   := NUMBER | "x" | "pi" | IDENT "(" expr ")" | "(" expr ")" ;
//! IDENT  := sin | cos | tan | atan | exp | ln | sqrt | sinh | cosh | tanh ;
//! ```
//!
//! `^` is right-associative and its base is a `unary`, so `-x^2` is `(-x)^2`.

mod eval;
mod parse;

use alloc::boxed::Box;
use core::fmt;

pub use eval::eval_jet;
pub use parse::parse;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Atan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Atan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Atan => "atan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Pi,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    pub fn neg(inner: Expr) -> Expr {
        Expr::Neg(Box::new(inner))
    }

    /// True when the expression does not mention `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => true,
            Expr::Var => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    // 0: sum, 1: product, 2: power, 3: unary minus, 4: atom
    fn level(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 0,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 1,
            Expr::Binary(BinOp::Pow, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if v.is_sign_negative() => 3,
            _ => 4,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        let parens = self.level() < min_level;
        if parens {
            f.write_str("(")?;
        }
        match self {
            // integers without a trailing `.0`, everything else shortest round-trip
            Expr::Num(v) if v.fract() == 0.0 && v.abs() < 1e15 => write!(f, "{v}")?,
            Expr::Num(v) => write!(f, "{v:?}")?,
            Expr::Var => f.write_str("x")?,
            Expr::Pi => f.write_str("pi")?,
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write(f, 3)?;
            }
            Expr::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.write(f, 0)?;
                f.write_str(")")?;
            }
            Expr::Binary(op, a, b) => {
                let (left, right) = match op {
                    BinOp::Add | BinOp::Sub => (0, 1),
                    BinOp::Mul | BinOp::Div => (1, 2),
                    BinOp::Pow => (3, 2),
                };
                a.write(f, left)?;
                f.write_str(op.symbol())?;
                b.write(f, right)?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Prints with minimal parentheses; `parse(&e.to_string())` reproduces `e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl core::str::FromStr for Expr {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
