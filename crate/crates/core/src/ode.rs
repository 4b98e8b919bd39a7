//! Explicit extrapolation integrator (Gragg–Bulirsch–Stoer) with a fixed
//! tableau of four columns over the step sequence 2, 4, 6, 8, i.e. an
//! 8th-order method with an embedded 6th-order error estimate, plus
//! detection of downward zero crossings of one state component.

use num_traits::Float;

use crate::{Error, Result};

const SEQUENCE: [usize; 4] = [2, 4, 6, 8];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrapolation {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Extrapolation {
    fn default() -> Self {
        Extrapolation {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 200_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventHit<const N: usize> {
    pub t: f64,
    pub state: [f64; N],
    pub steps: usize,
}

impl Extrapolation {
    fn midpoint<F, const N: usize>(&self, rhs: &mut F, y0: &[f64; N], dy0: &[f64; N], h: f64, n: usize) -> Result<[f64; N]>
    where
        F: FnMut(&[f64; N]) -> Result<[f64; N]>,
    {
        let hs = h / n as f64;
        let mut prev = *y0;
        let mut cur = [0.0; N];
        for i in 0..N {
            cur[i] = y0[i] + hs * dy0[i];
        }
        for _ in 1..n {
            let d = rhs(&cur)?;
            let mut next = [0.0; N];
            for i in 0..N {
                next[i] = prev[i] + 2.0 * hs * d[i];
            }
            prev = cur;
            cur = next;
        }
        let d = rhs(&cur)?;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = 0.5 * (cur[i] + prev[i] + hs * d[i]);
        }
        Ok(out)
    }

    /// One extrapolated step of size `h`; returns the new state and the
    /// difference between the two highest-order tableau entries.
    pub fn step<F, const N: usize>(&self, rhs: &mut F, y0: &[f64; N], h: f64) -> Result<([f64; N], [f64; N])>
    where
        F: FnMut(&[f64; N]) -> Result<[f64; N]>,
    {
        let dy0 = rhs(y0)?;
        let mut table = [[[0.0; N]; 4]; 4];
        for (j, &n) in SEQUENCE.iter().enumerate() {
            table[j][0] = self.midpoint(rhs, y0, &dy0, h, n)?;
            for k in 1..=j {
                let ratio = SEQUENCE[j] as f64 / SEQUENCE[j - k] as f64;
                let denom = ratio * ratio - 1.0;
                for i in 0..N {
                    table[j][k][i] = table[j][k - 1][i] + (table[j][k - 1][i] - table[j - 1][k - 1][i]) / denom;
                }
            }
        }
        let best = table[3][3];
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = best[i] - table[3][2][i];
        }
        Ok((best, err))
    }

    fn error_norm<const N: usize>(&self, y0: &[f64; N], y1: &[f64; N], err: &[f64; N]) -> f64 {
        (0..N)
            .map(|i| err[i].abs() / (self.atol + self.rtol * y0[i].abs().max(y1[i].abs())))
            .fold(0.0, f64::max)
    }

    /// Integrates the autonomous system `y' = rhs(y)` from `y0` until
    /// component `component` crosses zero from positive to non-positive at
    /// a state accepted by `accept`. The crossing time is refined by Newton
    /// iteration on the length of the last step.
    pub fn solve_to_crossing<F, G, const N: usize>(
        &self,
        mut rhs: F,
        y0: [f64; N],
        h0: f64,
        t_max: f64,
        component: usize,
        accept: G,
    ) -> Result<EventHit<N>>
    where
        F: FnMut(&[f64; N]) -> Result<[f64; N]>,
        G: Fn(&[f64; N]) -> bool,
    {
        let mut t = 0.0;
        let mut y = y0;
        let mut h = h0;
        let mut steps = 0;
        while steps < self.max_steps {
            if t > t_max {
                return Err(Error::IntegrationFailure("no crossing before the time limit"));
            }
            let (y1, err) = match self.step(&mut rhs, &y, h) {
                Ok(v) => v,
                Err(e) if h > 1e-12 * h0 => {
                    // stepped outside the coefficient domain; retry smaller
                    let _ = e;
                    h *= 0.25;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let norm = self.error_norm(&y, &y1, &err);
            if !norm.is_finite() || y1.iter().any(|v| !v.is_finite()) {
                h *= 0.25;
                if h < 1e-14 * h0 {
                    return Err(Error::IntegrationFailure("step size underflow"));
                }
                continue;
            }
            let factor = (0.9 * norm.max(1e-30).powf(-1.0 / 7.0)).clamp(0.2, 4.0);
            if norm > 1.0 {
                h *= factor;
                if h < 1e-14 * h0 {
                    return Err(Error::IntegrationFailure("step size underflow"));
                }
                continue;
            }
            steps += 1;
            if y[component] > 0.0 && y1[component] <= 0.0 && accept(&y1) {
                let s = self.refine_crossing(&mut rhs, &y, h, component)?;
                let (state, _) = self.step(&mut rhs, &y, s)?;
                return Ok(EventHit { t: t + s, state, steps });
            }
            t += h;
            y = y1;
            h *= factor;
        }
        Err(Error::IntegrationFailure("step budget exhausted"))
    }

    fn refine_crossing<F, const N: usize>(&self, rhs: &mut F, y: &[f64; N], h: f64, c: usize) -> Result<f64>
    where
        F: FnMut(&[f64; N]) -> Result<[f64; N]>,
    {
        let mut lo = 0.0;
        let mut hi = h;
        let mut s = h * 0.5;
        for _ in 0..60 {
            let (ys, _) = self.step(rhs, y, s)?;
            let g = ys[c];
            let dg = rhs(&ys)?[c];
            if g > 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let mut next = s - g / dg;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 4.0 * f64::EPSILON * s.abs() || g == 0.0 {
                return Ok(next);
            }
            s = next;
        }
        Ok(s)
    }
}
