//! Gauss–Legendre rules, a spectral integration matrix for cumulative
//! integrals inside one panel, and adaptive bisection.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::{Error, Result};

/// `P_0(x) ..= P_n(x)` by the three-term recurrence.
pub fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 1..n {
        p[k + 1] = ((2 * k + 1) as f64 * x * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
    }
    p
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = if n % 2 == 1 && i == n / 2 {
                0.0
            } else {
                (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos()
            };
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let dp = legendre_with_derivative(n, x).1;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Maps the rule onto `[a, b]`, yielding `(node, scaled weight)`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(s, w)| (mid + half * s, half * w))
    }

    /// Single application of the rule on `[a, b]`.
    pub fn apply<F>(&self, a: f64, b: f64, mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut sum = 0.0;
        for (x, w) in self.mapped(a, b) {
            sum += w * f(x)?;
        }
        Ok(sum)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let p = legendre_all(n, x);
    let d = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
    (p[n], d)
}

/// A Gauss–Legendre rule with its integration matrix
/// `S[i][j] = ∫_{-1}^{s_i} l_j(s) ds` (Lagrange basis `l_j` on the nodes) and
/// the rows extracting the two highest Legendre coefficients of the
/// interpolant, used as a tail error estimate.
#[derive(Clone, Debug)]
pub struct PanelRule {
    rule: GaussLegendre,
    cumulative: Vec<Vec<f64>>,
    tail: [Vec<f64>; 2],
}

impl PanelRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 4);
        let rule = GaussLegendre::new(n);
        let p_at: Vec<Vec<f64>> = rule.nodes.iter().map(|&s| legendre_all(n, s)).collect();
        let cumulative = (0..n)
            .map(|i| {
                let pi = &p_at[i];
                let si = rule.nodes[i];
                (0..n)
                    .map(|j| {
                        let pj = &p_at[j];
                        let mut acc = 0.5 * (si + 1.0);
                        for k in 1..n {
                            acc += 0.5 * pj[k] * (pi[k + 1] - pi[k - 1]);
                        }
                        rule.weights[j] * acc
                    })
                    .collect()
            })
            .collect();
        let row = |k: usize| -> Vec<f64> {
            (0..n)
                .map(|i| 0.5 * (2 * k + 1) as f64 * rule.weights[i] * p_at[i][k])
                .collect()
        };
        let tail = [row(n - 1), row(n - 2)];
        PanelRule {
            rule,
            cumulative,
            tail,
        }
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    /// Cumulative integrals `∫_a^{t_i} y` at every mapped node `t_i` of
    /// `[a, b]`, given the samples `y[j] = y(t_j)`.
    pub fn cumulative(&self, a: f64, b: f64, y: &[f64]) -> Vec<f64> {
        let half = 0.5 * (b - a);
        self.cumulative
            .iter()
            .map(|row| half * row.iter().zip(y).map(|(s, v)| s * v).sum::<f64>())
            .collect()
    }

    /// Size of the two highest Legendre coefficients of the interpolant of
    /// `y`, a proxy for the interpolation error.
    pub fn tail(&self, y: &[f64]) -> f64 {
        self.tail
            .iter()
            .map(|row| row.iter().zip(y).map(|(t, v)| t * v).sum::<f64>().abs())
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Mixed tolerance: a panel is accepted when the bisection change is below
/// `max(abs, rel * |integral|)` (scaled by the panel's share of the interval).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_depth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-9,
            max_depth: 24,
        }
    }
}

/// Adaptive Gauss–Legendre integration by panel bisection.
pub fn integrate<F>(rule: &GaussLegendre, mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let total = (b - a).abs();
    let whole = rule.apply(a, b, &mut f)?;
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut reference = whole.abs();
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.apply(lo, mid, &mut f)?;
        let right = rule.apply(mid, hi, &mut f)?;
        let refined = left + right;
        let change = (refined - est).abs();
        reference = reference.max(refined.abs());
        let budget = tol.abs.max(tol.rel * reference) * ((hi - lo).abs() / total).max(1e-3);
        if change <= budget || change <= 4.0 * f64::EPSILON * refined.abs() {
            value += refined;
            error += change;
        } else if depth >= tol.max_depth {
            return Err(Error::QuadratureNonConvergence {
                estimate: change,
                tolerance: budget,
            });
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(Estimate { value, error })
}
