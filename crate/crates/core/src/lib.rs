//! Closed-form valuation of perpetual fixed-rate, adjustable-balance and
//! adjustable-payment-rate mortgages under geometric Brownian house prices, with
//! independent numerical oracles for verification.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abm;
pub mod aprm;
pub mod contracts;
pub mod error;
pub mod foreclosure;
pub mod frm;
pub mod model;
pub mod numerics;
pub mod options;
pub mod oracle;
pub mod solution;

pub use abm::{solve_abm, solve_abm_no_prepay};
pub use aprm::{aprm_regime, solve_aprm, solve_aprm_no_prepay, AprmRegime, RateRegime};
pub use contracts::{
    abm_state, aprm_state, frm_schedule, perpetual_cashflows, AprmState, ContractKind, ContractSpec,
    PerpetualCashflows, PiecewiseLinear, ScheduleState,
};
pub use error::{Error, Result};
pub use foreclosure::{
    endogenous_spread, endogenous_spread_at, equivalent_foreclosure_cost, frm_value_with_foreclosure, matching_rate,
    max_rate, EquivalentPhi,
};
pub use frm::{solve_frm, solve_frm_no_default, solve_frm_no_prepay};
pub use model::{characteristic_residual, compute_exponents, Exponents, ModelParams};
pub use numerics::{find_root_bracketed, RootConfig};
pub use options::{default_option_value, prepay_option_value};
pub use solution::{Action, Boundaries, Coeffs, Region, SolvedContract};

/// Solve the contract described by `spec`.
pub fn solve(params: &ModelParams, spec: &ContractSpec) -> Result<SolvedContract> {
    spec.validate(params)?;
    match spec.kind {
        ContractKind::Frm => solve_frm(params, spec.m),
        ContractKind::Abm => solve_abm(params, spec.m),
        ContractKind::Aprm => solve_aprm(params, spec.m, spec.alpha),
    }
}

/// Value of the same contract when prepayment is ruled out.
pub fn solve_no_prepay(params: &ModelParams, spec: &ContractSpec) -> Result<SolvedContract> {
    spec.validate(params)?;
    match spec.kind {
        ContractKind::Frm => solve_frm_no_prepay(params, spec.m),
        ContractKind::Abm => solve_abm_no_prepay(params, spec.m),
        ContractKind::Aprm => solve_aprm_no_prepay(params, spec.m),
    }
}
