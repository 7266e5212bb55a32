//! Perpetual fixed-rate mortgage.

use crate::contracts::ContractKind;
use crate::error::Result;
use crate::model::{compute_exponents, ModelParams};
use crate::numerics::root_with_pattern;
use crate::solution::{paste, Action, Boundaries, Coeffs, Region, SolvedContract};

/// Default below `h1`, continue on `(h1, h2)`, prepay from `h2`.
pub fn solve_frm(params: &ModelParams, m: f64) -> Result<SolvedContract> {
    params.validate()?;
    params.check_spread(m)?;
    let e = compute_exponents(params)?;
    let (p1, p2) = (e.p1, e.p2);
    let (r, b0) = (params.r, params.b0);

    let a = 1.0 / (m / r - 1.0);
    let lower = |x: f64| 1.0 + a * (1.0 - (p1 - 1.0) / p1 * x);
    // The second factor u = 1 - a((1+p2)/p2 x - 1) can vanish to far below machine
    // precision at the root, so solve p1 ln(lower) + p2 ln(u) = 0 in s = ln u.
    let x_of = |s: f64| p2 / (1.0 + p2) * (1.0 + (1.0 - s.exp()) / a);
    let log_chi = |s: f64| p1 * lower(x_of(s)).ln() + p2 * s;

    let s_hi = (1.0 + a).ln();
    // x = min(1, (p1-1) m / (p1 delta)) is the far end; u is zero there in the second case
    let s_lo = (1.0 - a / p2).max(f64::MIN_POSITIVE).ln();
    let s = root_with_pattern(log_chi, s_lo, s_hi, true, "FRM lower boundary equation")?;
    let x = x_of(s);
    let y = x * lower(x).powf(1.0 / p2);
    let (h1, h2) = (b0 * x, b0 * y);

    let cont = paste(&e, h2, b0, 0.0, m * b0 / r, 0.0);
    let regions = vec![
        Region { lo: 0.0, hi: h1, action: Action::Default, coeffs: Coeffs::linear(0.0, 1.0) },
        Region { lo: h1, hi: h2, action: Action::Continue, coeffs: cont },
        Region { lo: h2, hi: f64::INFINITY, action: Action::Prepay, coeffs: Coeffs::linear(b0, 0.0) },
    ];
    let bounds = Boundaries { h1: Some(h1), h2: Some(h2), h3: None };
    Ok(SolvedContract::new(ContractKind::Frm, *params, e, regions, bounds))
}

/// Value when default is ruled out: the borrower prepays immediately.
pub fn solve_frm_no_default(params: &ModelParams, m: f64) -> Result<SolvedContract> {
    params.validate()?;
    params.check_spread(m)?;
    let e = compute_exponents(params)?;
    let regions = vec![Region {
        lo: 0.0,
        hi: f64::INFINITY,
        action: Action::Prepay,
        coeffs: Coeffs::linear(params.b0, 0.0),
    }];
    Ok(SolvedContract::new(ContractKind::Frm, *params, e, regions, Boundaries::default()))
}

/// Value when prepayment is ruled out: stop (default) below `h1`, continue above.
pub fn solve_frm_no_prepay(params: &ModelParams, m: f64) -> Result<SolvedContract> {
    params.validate()?;
    params.check_spread(m)?;
    let e = compute_exponents(params)?;
    let (p1, p2) = (e.p1, e.p2);
    let h1 = (p1 - 1.0) / p1 * m * params.b0 / params.delta;
    let cont = Coeffs {
        c_p2: -h1.powf(1.0 + p2) / p2,
        k0: m * params.b0 / params.r,
        ..Coeffs::default()
    };
    let regions = vec![
        Region { lo: 0.0, hi: h1, action: Action::Default, coeffs: Coeffs::linear(0.0, 1.0) },
        Region { lo: h1, hi: f64::INFINITY, action: Action::Continue, coeffs: cont },
    ];
    let bounds = Boundaries { h1: Some(h1), ..Boundaries::default() };
    Ok(SolvedContract::new(ContractKind::Frm, *params, e, regions, bounds))
}
