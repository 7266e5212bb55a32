//! Flag definitions and merging with a JSON configuration file.
//!
//! Every flag has a config key of the same name (`x-min`, `T`, ...). Flags given on
//! the command line override the file.

use clap::{Args, ValueEnum};
use perpetual_mortgage::{ContractKind, ContractSpec, ModelParams};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

fn missing(key: &str) -> CliError {
    CliError::Usage(format!("missing required value `{key}` (flag --{key} or config key \"{key}\")"))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Risk-free rate, decimal (0.017825, not 1.7825)
    #[arg(long)]
    pub r: Option<f64>,
    /// Benefit rate of occupying the house, decimal
    #[arg(long)]
    pub delta: Option<f64>,
    /// House price volatility
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Initial loan-to-value
    #[arg(long)]
    pub b0: Option<f64>,
}

impl ModelArgs {
    pub fn params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(
            self.r.ok_or_else(|| missing("r"))?,
            self.delta.ok_or_else(|| missing("delta"))?,
            self.sigma.ok_or_else(|| missing("sigma"))?,
            self.b0.ok_or_else(|| missing("b0"))?,
        )?)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ContractArgs {
    /// Contract type
    #[arg(long)]
    pub contract: Option<ContractKind>,
    /// Mortgage rate, decimal
    #[arg(long)]
    pub m: Option<f64>,
    /// Capital-gain sharing fraction (APRM only, defaults to 0)
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl ContractArgs {
    pub fn kind(&self) -> Result<ContractKind, CliError> {
        self.contract.ok_or_else(|| missing("contract"))
    }

    pub fn m(&self) -> Result<f64, CliError> {
        self.m.ok_or_else(|| missing("m"))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(0.0)
    }

    pub fn spec(&self) -> Result<ContractSpec, CliError> {
        self.spec_for(self.kind()?)
    }

    /// Spec of `kind` at the shared rate; `alpha` is dropped for the FRM and ABM.
    pub fn spec_for(&self, kind: ContractKind) -> Result<ContractSpec, CliError> {
        let m = self.m()?;
        Ok(match kind {
            ContractKind::Frm => ContractSpec::frm(m),
            ContractKind::Abm => ContractSpec::abm(m),
            ContractKind::Aprm => ContractSpec::aprm(m, self.alpha()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub contract: ContractArgs,
    /// House price at which to report the value (defaults to 1)
    #[arg(long)]
    pub h: Option<f64>,
    /// Foreclosure cost; adds the foreclosure-adjusted FRM value or the endogenous spread
    #[arg(long)]
    pub phi: Option<f64>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// Contract values; the FRM column includes the foreclosure cost `phi`
    Value,
    /// Relative prepayment option value in percent
    Relpp,
    /// Foreclosure cost equating the FRM with the ABM and APRM at a common rate
    EquivPhi,
    /// Endogenous spread over the FRM rate in basis points
    Spread,
    /// Boundaries of the contract given by --contract
    Boundaries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    H,
    Alpha,
    Phi,
    M,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub contract: ContractArgs,
    /// House price (defaults to 1)
    #[arg(long)]
    pub h: Option<f64>,
    /// Foreclosure cost (defaults to 0)
    #[arg(long)]
    pub phi: Option<f64>,
    /// Series to tabulate
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    /// Swept input
    #[arg(long, value_enum)]
    pub x: Option<Axis>,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Number of intervals; the table has steps + 1 rows
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct AlphaStarArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    /// Mortgage rate, decimal
    #[arg(long)]
    pub m: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OracleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub contract: ContractArgs,
    /// House price for the pointwise comparisons (defaults to 1)
    #[arg(long)]
    pub h: Option<f64>,
    /// Grid nodes (defaults to 2001)
    #[arg(long)]
    pub n_points: Option<usize>,
    /// Lower grid end (defaults to 0.05)
    #[arg(long)]
    pub h_min: Option<f64>,
    /// Upper grid end (defaults to 3 h3, or 10 without h3)
    #[arg(long)]
    pub h_max: Option<f64>,
    /// Over-relaxation factor (defaults to 1.5)
    #[arg(long)]
    pub relaxation: Option<f64>,
    /// Simulated paths (defaults to 20000)
    #[arg(long)]
    pub paths: Option<usize>,
    /// Simulation horizon in years (defaults to 300)
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Simulation seed (defaults to 2024)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Skip the Monte Carlo comparison
    #[arg(long)]
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub no_mc: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ScheduleArgs {
    /// Contract type (defaults to frm)
    #[arg(long)]
    pub contract: Option<ContractKind>,
    /// Mortgage rate, decimal
    #[arg(long)]
    pub m: Option<f64>,
    /// Initial balance (defaults to 1)
    #[arg(long)]
    pub b0: Option<f64>,
    /// Maturity in years
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub maturity: Option<f64>,
    /// Time since origination in years (defaults to 0)
    #[arg(long)]
    pub t: Option<f64>,
    /// House price index (ABM and APRM, defaults to 1)
    #[arg(long)]
    pub h: Option<f64>,
    /// Capital-gain sharing fraction (APRM, defaults to 0)
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl ScheduleArgs {
    pub fn m(&self) -> Result<f64, CliError> {
        self.m.ok_or_else(|| missing("m"))
    }

    pub fn maturity(&self) -> Result<f64, CliError> {
        self.maturity.ok_or_else(|| missing("T"))
    }
}

/// Overlay the flags that were given on top of the config object.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Map<String, Value>>) -> Result<T, CliError> {
    let Some(config) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let mut merged = config.clone();
    if let Value::Object(given) = serde_json::to_value(flags)? {
        merged.extend(given.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Config(e.to_string()))
}

/// The merged inputs, without unset keys, in a form accepted back by `--config`.
pub fn echo<T: Serialize>(args: &T) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(args)?;
    if let Value::Object(map) = &mut v {
        map.retain(|_, x| !x.is_null());
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flags_override_config() {
        let config = json!({"r": 0.01, "delta": 0.05, "contract": "abm", "m": 0.03});
        let flags = SolveArgs {
            model: ModelArgs { delta: Some(0.07), ..Default::default() },
            ..Default::default()
        };
        let merged = merge(&flags, config.as_object()).unwrap();
        assert_eq!(merged.model.r, Some(0.01));
        assert_eq!(merged.model.delta, Some(0.07));
        assert_eq!(merged.contract.contract, Some(ContractKind::Abm));
    }

    #[test]
    fn kebab_keys_and_maturity() {
        let config = json!({"x-min": 0.1, "x-max": 2.0, "quantity": "equiv-phi"});
        let merged = merge(&SweepArgs::default(), config.as_object()).unwrap();
        assert_eq!(merged.x_min, Some(0.1));
        assert_eq!(merged.quantity, Some(Quantity::EquivPhi));
        let config = json!({"T": 30.0, "m": 0.05});
        let merged = merge(&ScheduleArgs::default(), config.as_object()).unwrap();
        assert_eq!(merged.maturity, Some(30.0));
    }

    #[test]
    fn bad_config_type_is_reported() {
        let config = json!({"r": "high"});
        assert!(matches!(merge(&SolveArgs::default(), config.as_object()), Err(CliError::Config(_))));
    }

    #[test]
    fn echo_drops_unset_keys() {
        let args = SolveArgs { h: Some(1.2), ..Default::default() };
        assert_eq!(echo(&args).unwrap(), json!({"h": 1.2}));
    }
}
