//! Exact value of a two-threshold stopping policy.
//!
//! Between thresholds the value solves `L_H V - r V + c = 0`. On each linear piece of the
//! coupon the solution is `A (h/hi)^p1 + B (h/lo)^-p2 + a/r + b h/delta`; the pieces are
//! glued with value and slope continuity and pinned by the payoff at the thresholds. A
//! missing lower (upper) threshold removes the term that blows up at zero (infinity).

use nalgebra::{DMatrix, DVector};

use crate::contracts::PerpetualCashflows;
use crate::error::{Error, Result};
use crate::model::{compute_exponents, ModelParams};

/// Discounted value of stopping at the first exit from `(lower, upper)` started at `h`.
pub fn threshold_policy_value(
    params: &ModelParams,
    cashflows: &PerpetualCashflows,
    lower: Option<f64>,
    upper: Option<f64>,
    h: f64,
) -> Result<f64> {
    params.validate()?;
    let lo = lower.unwrap_or(0.0);
    let hi = upper.unwrap_or(f64::INFINITY);
    let bad = |msg: String| Err(Error::InvalidThresholds(msg));
    if lower.is_some_and(|l| !(l > 0.0 && l.is_finite())) || upper.is_some_and(|u| !(u > 0.0 && u.is_finite())) {
        return bad(format!("thresholds must be positive and finite (got {lower:?}, {upper:?})"));
    }
    if !(lo < hi) {
        return bad(format!("lower {lo} must be below upper {hi}"));
    }
    if !(h > 0.0 && h >= lo && h <= hi) {
        return bad(format!("start {h} outside [{lo}, {hi}]"));
    }
    if h == lo || h == hi {
        return Ok(cashflows.payoff(h));
    }

    let e = compute_exponents(params)?;
    let (p1, p2, r, delta) = (e.p1, e.p2, params.r, params.delta);
    let segs = cashflows.coupon.segments(lo, hi);
    let n = segs.len();
    let ref_hi = |i: usize| if segs[i].1.is_finite() { segs[i].1 } else { 1.0 };
    let ref_lo = |i: usize| if segs[i].0 > 0.0 { segs[i].0 } else { 1.0 };
    let particular = |i: usize, x: f64| segs[i].2 / r + segs[i].3 * x / delta;
    let particular_slope = |i: usize, x: f64| segs[i].3 * x / delta;

    let mut mat = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut rhs = DVector::<f64>::zeros(2 * n);
    let mut row = 0;
    match lower {
        Some(l) => {
            mat[(row, 0)] = (l / ref_hi(0)).powf(p1);
            mat[(row, 1)] = 1.0;
            rhs[row] = cashflows.payoff(l) - particular(0, l);
        }
        None => mat[(row, 1)] = 1.0,
    }
    row += 1;
    for k in 0..n - 1 {
        let x = segs[k].1;
        let (ai, bi, aj, bj) = (2 * k, 2 * k + 1, 2 * k + 2, 2 * k + 3);
        let left_b = (x / ref_lo(k)).powf(-p2);
        let right_a = (x / ref_hi(k + 1)).powf(p1);
        mat[(row, ai)] = 1.0;
        mat[(row, bi)] = left_b;
        mat[(row, aj)] = -right_a;
        mat[(row, bj)] = -1.0;
        rhs[row] = particular(k + 1, x) - particular(k, x);
        row += 1;
        // slopes multiplied by x
        mat[(row, ai)] = p1;
        mat[(row, bi)] = -p2 * left_b;
        mat[(row, aj)] = -p1 * right_a;
        mat[(row, bj)] = p2;
        rhs[row] = particular_slope(k + 1, x) - particular_slope(k, x);
        row += 1;
    }
    let last = n - 1;
    match upper {
        Some(u) => {
            mat[(row, 2 * last)] = 1.0;
            mat[(row, 2 * last + 1)] = (u / ref_lo(last)).powf(-p2);
            rhs[row] = cashflows.payoff(u) - particular(last, u);
        }
        None => mat[(row, 2 * last)] = 1.0,
    }

    let sol = mat
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Diagnostic("singular policy system".into()))?;
    let i = segs.iter().position(|s| h >= s.0 && h <= s.1).unwrap_or(last);
    let mut v = particular(i, h);
    if sol[2 * i] != 0.0 {
        v += sol[2 * i] * (h / ref_hi(i)).powf(p1);
    }
    if sol[2 * i + 1] != 0.0 {
        v += sol[2 * i + 1] * (h / ref_lo(i)).powf(-p2);
    }
    Ok(v)
}
