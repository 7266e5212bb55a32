//! Default and prepayment option costs to the lender.

use crate::contracts::{ContractKind, ContractSpec};
use crate::error::{Error, Result};
use crate::frm::solve_frm;
use crate::model::ModelParams;
use crate::{solve, solve_no_prepay};

fn check_price(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("house price must be positive and finite (got {h})")))
    }
}

/// `V^NoDef - V`. Zero for ABM and APRM, whose payoff already equals the prepayment amount.
pub fn default_option_value(params: &ModelParams, spec: &ContractSpec, h: f64) -> Result<f64> {
    spec.validate(params)?;
    check_price(h)?;
    match spec.kind {
        ContractKind::Frm => Ok(params.b0 - solve_frm(params, spec.m)?.value(h)),
        ContractKind::Abm | ContractKind::Aprm => Ok(0.0),
    }
}

/// `V^NoPP - V`.
pub fn prepay_option_value(params: &ModelParams, spec: &ContractSpec, h: f64) -> Result<f64> {
    check_price(h)?;
    let full = solve(params, spec)?;
    let no_pp = solve_no_prepay(params, spec)?;
    Ok(no_pp.value(h) - full.value(h))
}
