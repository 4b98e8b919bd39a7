//! Period function analysis for Liénard equations of the second kind,
//!
//! ```text
//! x'' + f(x) x'^2 + g(x) = 0,
//! ```
//!
//! viewed as a Hamiltonian system with position-dependent mass
//! `H = p^2 / (2 mu(x)) + V(x)`, `mu = exp(2 F)`, `F = ∫_0^x f`, `V = ∫_0^x mu g`.
//!
//! The crate computes the period `T(E)` of the center at the origin three
//! independent ways, its energy derivative, and the monotonicity and
//! isochronicity criteria built from `N(x)`, the `P`-residual and Schaaf's
//! expression.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `num_traits::Float` supplies float math without std; when std is in the
// crate graph its inherent methods win and the import looks unused.
#![allow(unused_imports)]

extern crate alloc;

pub mod criteria;
mod error;
pub mod expr;
pub mod jet;
pub mod liesys;
pub mod ode;
pub mod period;
pub mod quad;
pub mod repro;
pub mod roots;

pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use jet::Jet;
pub use liesys::{build_system, Coefficient, Interval, LienardSystem, OrbitWindow, SystemConfig};

/// Radius around the origin inside which ratios with `V'` or `h'` in the
/// denominator are evaluated from the Taylor expansion of `V` at 0.
pub const ORIGIN_RADIUS: f64 = 1e-4;

/// Default jet order.
pub const DEFAULT_JET_ORDER: usize = 4;
