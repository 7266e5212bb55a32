//! Independent numerical checks for the closed-form solvers.

pub mod monte_carlo;
pub mod policy;
pub mod psor;

pub use monte_carlo::{mc_cashflow_value, McEstimate, Policy};
pub use policy::threshold_policy_value;
pub use psor::{psor_value, GridSpec, OracleResult};
