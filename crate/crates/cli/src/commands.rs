use std::io::Write;

use perpetual_mortgage::foreclosure::{endogenous_spread_at, frm_value_with_foreclosure};
use perpetual_mortgage::oracle::{mc_cashflow_value, psor_value, threshold_policy_value, GridSpec, Policy};
use perpetual_mortgage::{
    abm_state, aprm_regime, aprm_state, equivalent_foreclosure_cost, frm_schedule, perpetual_cashflows,
    solve, solve_no_prepay, Action, ContractKind, ContractSpec, ModelParams, SolvedContract,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{echo, AlphaStarArgs, Axis, Format, OracleArgs, Quantity, ScheduleArgs, SolveArgs, SweepArgs};
use crate::error::CliError;
use crate::output::{cell, round_json};

const PSOR_TOL: f64 = 1e-3;
const POLICY_TOL: f64 = 1e-8;
const MC_FLOOR: f64 = 5e-4;

fn emit_json(inputs: Value, mut result: Value, out: &mut impl Write) -> Result<(), CliError> {
    round_json(&mut result);
    if let Value::Object(map) = &mut result {
        map.insert("inputs".into(), inputs);
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&result)?).map_err(io_error)
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::Io(e)
}

fn price(h: Option<f64>) -> Result<f64, CliError> {
    let h = h.unwrap_or(1.0);
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(CliError::Usage(format!("house price must be positive and finite (got {h})")))
    }
}

pub fn cmd_solve(args: &SolveArgs, out: &mut impl Write) -> Result<(), CliError> {
    let params = args.model.params()?;
    let spec = args.contract.spec()?;
    let h = price(args.h)?;
    let sol = solve(&params, &spec)?;

    if args.format == Some(Format::Csv) {
        writeln!(out, "lo,hi,action,c_p1,c_p2,k0,k1").map_err(io_error)?;
        for r in &sol.regions {
            let c = r.coeffs;
            let row = [cell(Some(r.lo)), cell(Some(r.hi)), r.action.as_str().to_string()]
                .into_iter()
                .chain([c.c_p1, c.c_p2, c.k0, c.k1].map(|x| cell(Some(x))))
                .collect::<Vec<_>>();
            writeln!(out, "{}", row.join(",")).map_err(io_error)?;
        }
        return Ok(());
    }

    let mut result = serde_json::to_value(&sol)?;
    result["value_at_h"] = json!(sol.value(h));
    result["action_at_h"] = json!(sol.action_at(h).as_str());
    if let Some(phi) = args.phi {
        result["foreclosure"] = match spec.kind {
            ContractKind::Frm => json!({ "phi": phi, "value_at_h": frm_value_with_foreclosure(&params, spec.m, phi, h)? }),
            kind => json!({
                "phi": phi,
                "spread_bp": endogenous_spread_at(&params, spec.m, phi, kind, spec.alpha, h)?,
            }),
        };
    }
    emit_json(echo(args)?, result, out)
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect()
}

/// Inputs at one sweep point.
#[derive(Debug, Clone, Copy)]
struct Point {
    m: f64,
    alpha: f64,
    phi: f64,
    h: f64,
}

fn relpp(sol: &SolvedContract, np: &SolvedContract, h: f64) -> f64 {
    let v = sol.value(h);
    100.0 * (np.value(h) - v) / v
}

fn sweep_point(params: &ModelParams, kind: ContractKind, quantity: Quantity, pt: Point) -> Vec<perpetual_mortgage::Result<f64>> {
    let spec_of = |kind: ContractKind| match kind {
        ContractKind::Frm => ContractSpec::frm(pt.m),
        ContractKind::Abm => ContractSpec::abm(pt.m),
        ContractKind::Aprm => ContractSpec::aprm(pt.m, pt.alpha),
    };
    let targets = [ContractKind::Abm, ContractKind::Aprm];
    match quantity {
        Quantity::Value => ContractKind::ALL
            .iter()
            .map(|&k| match k {
                ContractKind::Frm => frm_value_with_foreclosure(params, pt.m, pt.phi, pt.h),
                _ => solve(params, &spec_of(k)).map(|s| s.value(pt.h)),
            })
            .collect(),
        Quantity::Relpp => ContractKind::ALL
            .iter()
            .map(|&k| {
                let spec = spec_of(k);
                let sol = solve(params, &spec)?;
                let np = solve_no_prepay(params, &spec)?;
                Ok(relpp(&sol, &np, pt.h))
            })
            .collect(),
        Quantity::EquivPhi => targets
            .iter()
            .map(|&k| equivalent_foreclosure_cost(params, pt.m, k, pt.alpha, pt.h).map(|e| e.phi))
            .collect(),
        Quantity::Spread => targets
            .iter()
            .map(|&k| endogenous_spread_at(params, pt.m, pt.phi, k, pt.alpha, pt.h))
            .collect(),
        Quantity::Boundaries => match solve(params, &spec_of(kind)) {
            Ok(s) => [s.boundaries.h1, s.boundaries.h2, s.boundaries.h3]
                .map(|b| Ok(b.unwrap_or(f64::NAN)))
                .into(),
            Err(e) => vec![Err(e.clone()), Err(e.clone()), Err(e)],
        },
    }
}

fn series_names(quantity: Quantity) -> &'static [&'static str] {
    match quantity {
        Quantity::Value | Quantity::Relpp => &["frm", "abm", "aprm"],
        Quantity::EquivPhi | Quantity::Spread => &["abm", "aprm"],
        Quantity::Boundaries => &["h1", "h2", "h3"],
    }
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut impl Write, err: &mut impl Write) -> Result<(), CliError> {
    let params = args.model.params()?;
    let need = |name: &str| CliError::Usage(format!("sweep requires --{name}"));
    let quantity = args.quantity.ok_or_else(|| need("quantity"))?;
    let axis = args.x.ok_or_else(|| need("x"))?;
    let (lo, hi) = (args.x_min.ok_or_else(|| need("x-min"))?, args.x_max.ok_or_else(|| need("x-max"))?);
    let steps = args.steps.ok_or_else(|| need("steps"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && steps >= 1) {
        return Err(CliError::Usage(format!(
            "invalid range: need finite x-min <= x-max and steps >= 1 (got {lo}, {hi}, {steps})"
        )));
    }
    if axis == Axis::H && lo <= 0.0 {
        return Err(CliError::Usage(format!("house prices must be positive (got x-min = {lo})")));
    }
    let kind = if quantity == Quantity::Boundaries { args.contract.kind()? } else { ContractKind::Aprm };
    let base = Point {
        m: args.contract.m()?,
        alpha: args.contract.alpha(),
        phi: args.phi.unwrap_or(0.0),
        h: price(args.h)?,
    };

    let xs = linspace(lo, hi, steps);
    let rows: Vec<_> = xs
        .par_iter()
        .map(|&x| {
            let mut pt = base;
            match axis {
                Axis::H => pt.h = x,
                Axis::Alpha => pt.alpha = x,
                Axis::Phi => pt.phi = x,
                Axis::M => pt.m = x,
            }
            sweep_point(&params, kind, quantity, pt)
        })
        .collect();

    let names = series_names(quantity);
    let x_name = serde_json::to_value(axis)?.as_str().unwrap_or("x").to_string();
    writeln!(out, "{x_name}\t{}", names.join("\t")).map_err(io_error)?;
    for (x, row) in xs.iter().zip(&rows) {
        let cells: Vec<String> = row.iter().map(|v| cell(v.as_ref().ok().copied())).collect();
        writeln!(out, "{}\t{}", cell(Some(*x)), cells.join("\t")).map_err(io_error)?;
        for (name, v) in names.iter().zip(row) {
            if let Err(e) = v {
                let note = json!({"warning": e.code(), "x": x, "series": name, "detail": e.to_string()});
                writeln!(err, "{note}").map_err(io_error)?;
            }
        }
    }
    Ok(())
}

pub fn cmd_alpha_star(args: &AlphaStarArgs, out: &mut impl Write) -> Result<(), CliError> {
    let params = args.model.params()?;
    let m = args.m.ok_or_else(|| CliError::Usage("alpha-star requires --m".into()))?;
    let reg = aprm_regime(&params, m)?;
    emit_json(echo(args)?, serde_json::to_value(reg)?, out)
}

/// Ends of the maximal continuation interval around `h`, or `None` when `h` is a stop point.
fn continuation_interval(sol: &SolvedContract, h: f64) -> Option<(Option<f64>, Option<f64>)> {
    let regions = &sol.regions;
    let idx = regions.iter().position(|r| r.lo < h && h < r.hi && r.action == Action::Continue)?;
    let lo = regions[..idx].iter().rposition(|r| r.action != Action::Continue).map_or(0, |i| i + 1);
    let hi = regions[idx..].iter().position(|r| r.action != Action::Continue).map_or(regions.len(), |i| idx + i) - 1;
    Some((Some(regions[lo].lo).filter(|&x| x > 0.0), Some(regions[hi].hi).filter(|x| x.is_finite())))
}

pub fn cmd_oracle_check(args: &OracleArgs, out: &mut impl Write) -> Result<(), CliError> {
    let params = args.model.params()?;
    let spec = args.contract.spec()?;
    let h = price(args.h)?;
    let sol = solve(&params, &spec)?;
    let cf = perpetual_cashflows(&spec, &params)?;
    let closed = sol.value(h);
    let mut pass = true;

    let h_min = args.h_min.unwrap_or(0.05);
    let h_max = args.h_max.unwrap_or_else(|| sol.boundaries.h3.map_or(10.0, |h3| 3.0 * h3));
    let grid = GridSpec {
        relaxation: args.relaxation.unwrap_or(GridSpec::default().relaxation),
        ..GridSpec::new(h_min, h_max, args.n_points.unwrap_or(2001))
    };
    let fd = psor_value(&params, &cf, &grid)?;
    let sup = fd.sup_error(h_min, h_max, |x| sol.value(x));
    pass &= sup <= PSOR_TOL;
    let psor = json!({
        "grid": grid,
        "sweeps": fd.sweeps,
        "value_at_h": fd.interpolate(h),
        "sup_error": sup,
        "tolerance": PSOR_TOL,
        "stop_intervals": fd.stop_intervals(),
    });

    let policy = match continuation_interval(&sol, h) {
        Some((lower, upper)) => {
            let v = threshold_policy_value(&params, &cf, lower, upper, h)?;
            let e = (v - closed).abs();
            pass &= e <= POLICY_TOL;
            json!({"lower": lower, "upper": upper, "value": v, "error": e, "tolerance": POLICY_TOL})
        }
        None => json!({"skipped": format!("h = {h} lies in a stopping region")}),
    };

    let mc = if args.no_mc {
        Value::Null
    } else {
        let np = solve_no_prepay(&params, &spec)?;
        match continuation_interval(&np, h) {
            Some((lower, upper)) => {
                let est = mc_cashflow_value(
                    &params,
                    &cf,
                    Some(Policy::new(lower, upper)),
                    h,
                    args.paths.unwrap_or(20_000),
                    args.horizon.unwrap_or(300.0),
                    args.seed.unwrap_or(2024),
                )?;
                let e = (est.estimate - np.value(h)).abs();
                let tol = (3.0 * est.std_error).max(MC_FLOOR);
                pass &= e <= tol;
                json!({
                    "no_prepay_closed_form": np.value(h),
                    "estimate": est,
                    "error": e,
                    "tolerance": tol,
                })
            }
            None => json!({"skipped": format!("h = {h} lies in a stopping region without prepayment")}),
        }
    };

    let result = json!({
        "closed_form": closed,
        "boundaries": sol.boundaries,
        "psor": psor,
        "policy": policy,
        "monte_carlo": mc,
        "pass": pass,
    });
    emit_json(echo(args)?, result, out)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

pub fn cmd_schedule(args: &ScheduleArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (m, maturity) = (args.m()?, args.maturity()?);
    let b0 = args.b0.unwrap_or(1.0);
    let t = args.t.unwrap_or(0.0);
    let h = args.h.unwrap_or(1.0);
    let state = match args.contract.unwrap_or(ContractKind::Frm) {
        ContractKind::Frm => serde_json::to_value(frm_schedule(m, b0, maturity, t)?)?,
        ContractKind::Abm => serde_json::to_value(abm_state(m, b0, maturity, t, h)?)?,
        ContractKind::Aprm => serde_json::to_value(aprm_state(m, b0, maturity, t, h, args.alpha.unwrap_or(0.0))?)?,
    };
    emit_json(echo(args)?, state, out)
}
