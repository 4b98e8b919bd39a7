//! Bracketed scalar root finding.


use crate::Result;

/// Outcome of a bracketed solve: the root and the last residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Newton iteration safeguarded by bisection on a sign-change bracket.
///
/// `fdf` returns `(f(x), f'(x))`. `guess` is clamped into the bracket.
/// Stops when `|f| <= ftol` or the bracket/step collapses to rounding level.
/// Returns `None` when `lo` and `hi` do not bracket a sign change or the
/// iteration budget runs out.
pub fn newton_bisect<F>(
    mut fdf: F,
    mut lo: f64,
    mut hi: f64,
    guess: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<Option<Root>>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (flo, _) = fdf(lo)?;
    if flo == 0.0 {
        return Ok(Some(Root { x: lo, residual: 0.0, iterations: 0 }));
    }
    let (fhi, _) = fdf(hi)?;
    if fhi == 0.0 {
        return Ok(Some(Root { x: hi, residual: 0.0, iterations: 0 }));
    }
    if flo.signum() == fhi.signum() {
        return Ok(None);
    }
    // orient so that f(lo) < 0 < f(hi)
    if flo > 0.0 {
        core::mem::swap(&mut lo, &mut hi);
    }
    let mut x = if guess.is_finite() && between(guess, lo, hi) {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let mut last_step = (hi - lo).abs();
    for it in 1..=max_iter {
        let (fx, dfx) = fdf(x)?;
        if fx.abs() <= ftol {
            return Ok(Some(Root { x, residual: fx, iterations: it }));
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let step_ok = dfx != 0.0 && newton.is_finite() && between(newton, lo, hi);
        let next = if step_ok && (newton - x).abs() < 0.5 * last_step {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_step = (next - x).abs();
        if last_step <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) || (hi - lo).abs() <= 4.0 * f64::EPSILON * x.abs() {
            let (fn_, _) = fdf(next)?;
            let (best, res) = if fn_.abs() < fx.abs() { (next, fn_) } else { (x, fx) };
            return Ok(Some(Root { x: best, residual: res, iterations: it }));
        }
        x = next;
    }
    Ok(None)
}

/// Plain bisection for a sign change of `f` on `[lo, hi]`, down to rounding.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(Some(lo));
    }
    if fhi == 0.0 {
        return Ok(Some(hi));
    }
    if flo.signum() == fhi.signum() {
        return Ok(None);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(Some(mid));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

fn between(x: f64, a: f64, b: f64) -> bool {
    (a <= x && x <= b) || (b <= x && x <= a)
}
