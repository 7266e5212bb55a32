//! Foreclosure-adjusted FRM values, equivalent foreclosure costs and endogenous spreads.
//!
//! On default the lender recovers `(1 - phi) h`. The borrower's stopping rule is
//! unchanged, so the adjusted value differs from the frictionless one by `phi` times
//! the discounted-hitting weight of the default boundary.

use serde::Serialize;

use crate::contracts::{ContractKind, ContractSpec};
use crate::error::{Error, Result};
use crate::frm::solve_frm;
use crate::model::ModelParams;
use crate::numerics::{expand_upper, find_root_bracketed, RootConfig};
use crate::solution::{Action, SolvedContract};
use crate::solve;

const MAX_RATE_CAP: f64 = 10.0;

fn check_phi(phi: f64) -> Result<()> {
    if (0.0..1.0).contains(&phi) {
        Ok(())
    } else {
        Err(Error::InvalidPhi(phi))
    }
}

fn check_price(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("house price must be positive and finite (got {h})")))
    }
}

/// Coefficient of `phi` in the adjusted value: `h` below `h1`, zero from `h2` on.
fn default_weight(frm: &SolvedContract, h: f64) -> f64 {
    let (h1, h2) = (frm.boundaries.h1.unwrap(), frm.boundaries.h2.unwrap());
    if h <= h1 {
        return h;
    }
    if h >= h2 {
        return 0.0;
    }
    let (p1, p2) = (frm.exponents.p1, frm.exponents.p2);
    let s = p1 + p2;
    h1.powf(1.0 + p2) * h.powf(-p2) * (h2.powf(s) - h.powf(s)) / (h2.powf(s) - h1.powf(s))
}

fn adjusted_value(frm: &SolvedContract, phi: f64, h: f64) -> f64 {
    if h <= frm.boundaries.h1.unwrap() {
        return (1.0 - phi) * h;
    }
    frm.value(h) - phi * default_weight(frm, h)
}

pub fn frm_value_with_foreclosure(params: &ModelParams, m: f64, phi: f64, h: f64) -> Result<f64> {
    check_phi(phi)?;
    check_price(h)?;
    let frm = solve_frm(params, m)?;
    Ok(adjusted_value(&frm, phi, h))
}

/// Foreclosure cost equating the FRM and an alternative contract at one price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalentPhi {
    pub phi: f64,
    /// False when `phi` falls outside `[0, 1)`; the value is still reported.
    pub in_range: bool,
}

/// `alpha` is ignored for the ABM.
fn target_spec(target: ContractKind, m: f64, alpha: f64) -> Result<ContractSpec> {
    match target {
        ContractKind::Abm => Ok(ContractSpec::abm(m)),
        ContractKind::Aprm => Ok(ContractSpec::aprm(m, alpha)),
        ContractKind::Frm => Err(Error::InvalidSpec("target contract must be abm or aprm".into())),
    }
}

pub fn equivalent_foreclosure_cost(
    params: &ModelParams,
    m_common: f64,
    target: ContractKind,
    alpha: f64,
    h: f64,
) -> Result<EquivalentPhi> {
    check_price(h)?;
    let spec = target_spec(target, m_common, alpha)?;
    let frm = solve_frm(params, m_common)?;
    let other = solve(params, &spec)?;
    let weight = default_weight(&frm, h);
    if weight <= 0.0 {
        return Err(Error::Degenerate(format!(
            "h = {h} lies in the FRM prepayment region; no foreclosure cost changes its value"
        )));
    }
    let phi = (frm.value(h) - other.value(h)) / weight;
    Ok(EquivalentPhi { phi, in_range: (0.0..1.0).contains(&phi) })
}

/// Largest rate at which `h = 1` is still inside a continuation region.
///
/// `alpha` is used for the APRM only.
pub fn max_rate(params: &ModelParams, kind: ContractKind, alpha: f64) -> Result<f64> {
    params.validate()?;
    let continues = |m: f64| {
        let spec = match kind {
            ContractKind::Frm => ContractSpec::frm(m),
            ContractKind::Abm => ContractSpec::abm(m),
            ContractKind::Aprm => ContractSpec::aprm(m, alpha),
        };
        solve(params, &spec).is_ok_and(|s| s.action_at(1.0) == Action::Continue)
    };
    let mut lo = params.r * (1.0 + 1e-6);
    if !continues(lo) {
        return Err(Error::Diagnostic(format!(
            "h = 1 is already a stopping point at m = {lo}"
        )));
    }
    let mut hi = 2.0 * params.r;
    while continues(hi) {
        lo = hi;
        hi *= 1.5;
        if hi > MAX_RATE_CAP {
            return Err(Error::Diagnostic(format!(
                "h = 1 still continues at m = {lo}; no finite maximal rate below {MAX_RATE_CAP}"
            )));
        }
    }
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if continues(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Spread in basis points that makes the target contract worth the foreclosure-adjusted
/// FRM at origination.
pub fn endogenous_spread(
    params: &ModelParams,
    m_f: f64,
    phi: f64,
    target: ContractKind,
    alpha: f64,
) -> Result<f64> {
    endogenous_spread_at(params, m_f, phi, target, alpha, 1.0)
}

/// [`endogenous_spread`] at an arbitrary house price.
pub fn endogenous_spread_at(
    params: &ModelParams,
    m_f: f64,
    phi: f64,
    target: ContractKind,
    alpha: f64,
    h: f64,
) -> Result<f64> {
    Ok(1e4 * (matching_rate(params, m_f, phi, target, alpha, h)? - m_f))
}

/// Rate of the target contract whose value at `h` equals the adjusted FRM value.
pub fn matching_rate(
    params: &ModelParams,
    m_f: f64,
    phi: f64,
    target: ContractKind,
    alpha: f64,
    h: f64,
) -> Result<f64> {
    check_phi(phi)?;
    check_price(h)?;
    target_spec(target, m_f, alpha)?;
    let goal = frm_value_with_foreclosure(params, m_f, phi, h)?;
    let value_at = |m: f64| {
        target_spec(target, m, alpha)
            .and_then(|spec| solve(params, &spec))
            .map_or(f64::NAN, |s| s.value(h))
    };
    let lo = params.r * (1.0 + 1e-6);
    // without a finite maximal rate, grow the bracket until the value passes the goal
    let hi = match max_rate(params, target, alpha) {
        Ok(m) => m,
        Err(_) => expand_upper(|m| value_at(m) - goal, lo, 2.0 * params.r, 1.5, MAX_RATE_CAP)?,
    };
    let (v_lo, v_hi) = (value_at(lo), value_at(hi));
    if !(v_lo < v_hi) {
        return Err(Error::Diagnostic(format!(
            "target value is not increasing in m on [{lo}, {hi}]: {v_lo} vs {v_hi}"
        )));
    }
    find_root_bracketed(|m| value_at(m) - goal, lo, hi, &RootConfig::default())
}
