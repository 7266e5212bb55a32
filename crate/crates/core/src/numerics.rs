//! Bracketed scalar root finding shared by every boundary solver.

use crate::error::{Error, Result};

/// Tolerance policy for [`find_root_bracketed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_iter: 200,
        }
    }
}

impl RootConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_iter >= 1) {
            return Err(Error::InvalidParams(format!(
                "root config requires rel_tol > 0, abs_tol > 0, max_iter >= 1 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// Brent's method on `[lo, hi]`.
///
/// Accepts `x` once `|f(x)| <= max(abs_tol, rel_tol * |f(lo) - f(hi)|)` and the bracket
/// half-width is below `rel_tol |x| + abs_tol`, or once the bracket has shrunk to a few
/// ulps (no representable point can do better).
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, cfg: &RootConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(lo < hi) {
        return Err(Error::InvalidParams(format!(
            "bracket requires lo < hi (got [{lo}, {hi}])"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() || fa * fb > 0.0 {
        return Err(Error::NoBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let f_tol = cfg.abs_tol.max(cfg.rel_tol * (fa - fb).abs());
    if fa.abs() <= f_tol && fa.abs() <= fb.abs() {
        return Ok(a);
    }
    if fb.abs() <= f_tol {
        return Ok(b);
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..cfg.max_iter {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + f64::MIN_POSITIVE;
        let half = 0.5 * (c - b);
        let x_tol = cfg.rel_tol * b.abs() + cfg.abs_tol;
        if fb == 0.0 || half.abs() <= tol || (fb.abs() <= f_tol && half.abs() <= x_tol) {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when only two points are distinct
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let bound1 = 3.0 * half * q - (tol * q).abs();
            let bound2 = (e * q).abs();
            if 2.0 * p < bound1.min(bound2) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol {
            d
        } else {
            tol.copysign(half)
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Diagnostic(format!(
                "objective returned NaN at {b} inside bracket [{lo}, {hi}]"
            )));
        }
    }
    Err(Error::MaxIterExceeded(cfg.max_iter))
}

/// Root of a function expected to be increasing (or decreasing) across `[lo, hi]`.
///
/// The sign pattern at the ends is checked first; a wrong pattern is a `Diagnostic`.
pub(crate) fn root_with_pattern<F>(f: F, lo: f64, hi: f64, increasing: bool, what: &str) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (f_lo, f_hi) = (f(lo), f(hi));
    let ok = if increasing {
        f_lo <= 0.0 && f_hi >= 0.0
    } else {
        f_lo >= 0.0 && f_hi <= 0.0
    };
    if !ok {
        let dir = if increasing { "increasing" } else { "decreasing" };
        return Err(Error::Diagnostic(format!(
            "{what}: expected {dir} sign change on [{lo}, {hi}], got f(lo) = {f_lo}, f(hi) = {f_hi}"
        )));
    }
    find_root_bracketed(f, lo, hi, &RootConfig::default())
}

/// Grow `hi` geometrically by `factor` until `f` changes sign relative to `f(lo)`.
///
/// Returns the first upper end with a sign change, or `NoBracket` once `cap` is passed.
pub(crate) fn expand_upper<F>(f: F, lo: f64, mut hi: f64, factor: f64, cap: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    loop {
        let f_hi = f(hi);
        if f_lo * f_hi <= 0.0 {
            return Ok(hi);
        }
        if hi >= cap {
            return Err(Error::NoBracket { lo, hi, f_lo, f_hi });
        }
        hi = (hi * factor).min(cap);
    }
}

/// Shrink `[lo, hi]` inward by `frac` of its width.
pub(crate) fn shrink(lo: f64, hi: f64, frac: f64) -> (f64, f64) {
    let w = (hi - lo) * frac;
    (lo + w, hi - w)
}
