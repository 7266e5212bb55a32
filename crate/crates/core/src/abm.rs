//! Perpetual adjustable-balance mortgage.

use crate::contracts::ContractKind;
use crate::error::Result;
use crate::model::{compute_exponents, ModelParams};
use crate::numerics::{expand_upper, root_with_pattern};
use crate::solution::{paste, Action, Boundaries, Coeffs, Region, SolvedContract};

const Y_CAP: f64 = 1e6;

/// One prepayment boundary above `B0` when `m <= delta`, two around `B0` otherwise.
pub fn solve_abm(params: &ModelParams, m: f64) -> Result<SolvedContract> {
    params.validate()?;
    params.check_spread(m)?;
    let e = compute_exponents(params)?;
    let (p1, p2) = (e.p1, e.p2);
    let (r, delta, b0) = (params.r, params.delta, params.b0);
    let prepay_low = Coeffs::linear(0.0, 1.0);
    let prepay_high = Coeffs::linear(b0, 0.0);

    if m <= delta {
        let ratio = (1.0 / r - (1.0 - 1.0 / p1) / delta) / (1.0 / r - 1.0 / m);
        let h2 = b0 * ratio.powf(1.0 / p2);
        let upper = paste(&e, h2, b0, 0.0, m * b0 / r, 0.0);
        let at_b0 = upper.eval(&e, b0);
        let lower = Coeffs {
            c_p1: (at_b0 - m * b0 / delta) / b0.powf(p1),
            k1: m / delta,
            ..Coeffs::default()
        };
        let regions = vec![
            Region { lo: 0.0, hi: b0, action: Action::Continue, coeffs: lower },
            Region { lo: b0, hi: h2, action: Action::Continue, coeffs: upper },
            Region { lo: h2, hi: f64::INFINITY, action: Action::Prepay, coeffs: prepay_high },
        ];
        let bounds = Boundaries { h2: Some(h2), ..Boundaries::default() };
        return Ok(SolvedContract::new(ContractKind::Abm, *params, e, regions, bounds));
    }

    let spread = 1.0 / r - 1.0 / m;
    let x_of = |y: f64| {
        ((1.0 / delta - 1.0 / m) / (1.0 / (p1 * delta) + p2 / (1.0 + p2) * spread * y.powf(-p1)))
            .powf(1.0 / (p1 - 1.0))
    };
    let g = |y: f64| {
        p1 / (p1 - 1.0) * spread * y.powf(p2)
            - (1.0 / delta - 1.0 / m) * x_of(y).powf(1.0 + p2)
            - 1.0 / (p2 * delta)
    };
    let lo = 1.0 + 1e-10;
    let denom = (p1 - 1.0) / (p1 * delta) - 1.0 / m;
    let hi = if denom > 0.0 {
        (p2 / (1.0 + p2) * spread / denom).powf(1.0 / p1)
    } else {
        expand_upper(g, lo, 2.0, 2.0, Y_CAP)?
    };
    let y = root_with_pattern(g, lo, hi, true, "ABM upper boundary equation")?;
    let x = x_of(y);
    let (h1, h2) = (b0 * x, b0 * y);

    let upper = paste(&e, h2, b0, 0.0, m * b0 / r, 0.0);
    let lower = paste(&e, h1, h1, 1.0, 0.0, m / delta);
    let regions = vec![
        Region { lo: 0.0, hi: h1, action: Action::Prepay, coeffs: prepay_low },
        Region { lo: h1, hi: b0, action: Action::Continue, coeffs: lower },
        Region { lo: b0, hi: h2, action: Action::Continue, coeffs: upper },
        Region { lo: h2, hi: f64::INFINITY, action: Action::Prepay, coeffs: prepay_high },
    ];
    let bounds = Boundaries { h1: Some(h1), h2: Some(h2), h3: None };
    Ok(SolvedContract::new(ContractKind::Abm, *params, e, regions, bounds))
}

/// Discounted coupons `m min(B0, H)` with no stopping at all.
pub fn solve_abm_no_prepay(params: &ModelParams, m: f64) -> Result<SolvedContract> {
    params.validate()?;
    params.check_spread(m)?;
    let e = compute_exponents(params)?;
    let (p1, p2) = (e.p1, e.p2);
    let (r, delta, b0) = (params.r, params.delta, params.b0);
    // value and slope matching at B0 for a = A B0^p1, b = B B0^-p2:
    //   a - b = m B0 (1/r - 1/delta),  p1 a + p2 b = -m B0 / delta
    let gap = m * b0 * (1.0 / r - 1.0 / delta);
    let a = (p2 * gap - m * b0 / delta) / (p1 + p2);
    let b = a - gap;
    let lower = Coeffs { c_p1: a / b0.powf(p1), k1: m / delta, ..Coeffs::default() };
    let upper = Coeffs { c_p2: b * b0.powf(p2), k0: m * b0 / r, ..Coeffs::default() };
    let regions = vec![
        Region { lo: 0.0, hi: b0, action: Action::Continue, coeffs: lower },
        Region { lo: b0, hi: f64::INFINITY, action: Action::Continue, coeffs: upper },
    ];
    Ok(SolvedContract::new(ContractKind::Abm, *params, e, regions, Boundaries::default()))
}
