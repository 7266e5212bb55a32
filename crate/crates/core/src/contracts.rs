//! Contract definitions: perpetual payment and payoff functions, plus the finite-maturity
//! amortization schedules they are derived from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContractKind {
    Frm,
    Abm,
    Aprm,
}

impl ContractKind {
    pub const ALL: [ContractKind; 3] = [ContractKind::Frm, ContractKind::Abm, ContractKind::Aprm];

    pub fn as_str(&self) -> &'static str {
        match self {
            ContractKind::Frm => "frm",
            ContractKind::Abm => "abm",
            ContractKind::Aprm => "aprm",
        }
    }
}

impl std::fmt::Display for ContractKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ContractKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "frm" => Ok(ContractKind::Frm),
            "abm" => Ok(ContractKind::Abm),
            "aprm" => Ok(ContractKind::Aprm),
            other => Err(Error::InvalidSpec(format!("unknown contract kind {other:?}"))),
        }
    }
}

/// Contract kind, mortgage rate `m` and capital-gain sharing fraction `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractSpec {
    pub kind: ContractKind,
    pub m: f64,
    pub alpha: f64,
}

impl ContractSpec {
    pub fn frm(m: f64) -> Self {
        Self { kind: ContractKind::Frm, m, alpha: 0.0 }
    }

    pub fn abm(m: f64) -> Self {
        Self { kind: ContractKind::Abm, m, alpha: 0.0 }
    }

    pub fn aprm(m: f64, alpha: f64) -> Self {
        Self { kind: ContractKind::Aprm, m, alpha }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        params.validate()?;
        params.check_spread(self.m)?;
        match self.kind {
            ContractKind::Frm | ContractKind::Abm if self.alpha != 0.0 => Err(Error::InvalidSpec(
                format!("alpha must be 0 for {} (got {})", self.kind, self.alpha),
            )),
            ContractKind::Aprm if !(0.0..1.0).contains(&self.alpha) => Err(Error::InvalidSpec(
                format!("alpha must lie in [0, 1) (got {})", self.alpha),
            )),
            _ => Ok(()),
        }
    }
}

/// Continuous piecewise-linear function of the house price, `a_i + b_i h` between kinks.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    kinks: Vec<f64>,
    pieces: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(kinks: Vec<f64>, pieces: Vec<(f64, f64)>) -> Self {
        assert_eq!(pieces.len(), kinks.len() + 1, "one piece per interval");
        assert!(kinks.windows(2).all(|w| w[0] < w[1]), "kinks must increase");
        Self { kinks, pieces }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![], vec![(c, 0.0)])
    }

    pub fn identity() -> Self {
        Self::new(vec![], vec![(0.0, 1.0)])
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// `(intercept, slope)` of the piece containing `h` (the left piece at a kink).
    pub fn piece_at(&self, h: f64) -> (f64, f64) {
        let idx = self.kinks.partition_point(|&k| k < h);
        self.pieces[idx]
    }

    pub fn eval(&self, h: f64) -> f64 {
        let (a, b) = self.piece_at(h);
        a + b * h
    }

    /// Pieces restricted to `[lo, hi]`: `(seg_lo, seg_hi, a, b)` in increasing order.
    pub fn segments(&self, lo: f64, hi: f64) -> Vec<(f64, f64, f64, f64)> {
        let mut cuts = vec![lo];
        cuts.extend(self.kinks.iter().copied().filter(|&k| k > lo && k < hi));
        cuts.push(hi);
        cuts.windows(2)
            .map(|w| {
                let mid = if w[1].is_finite() { 0.5 * (w[0] + w[1]) } else { w[0] + 1.0 };
                let (a, b) = self.piece_at(mid);
                (w[0], w[1], a, b)
            })
            .collect()
    }
}

/// Perpetual coupon rate, termination payoff and prepayment amount as functions of `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerpetualCashflows {
    pub coupon: PiecewiseLinear,
    pub payoff: PiecewiseLinear,
    pub prepay_amount: PiecewiseLinear,
}

impl PerpetualCashflows {
    pub fn coupon(&self, h: f64) -> f64 {
        self.coupon.eval(h)
    }

    pub fn payoff(&self, h: f64) -> f64 {
        self.payoff.eval(h)
    }

    pub fn prepay_amount(&self, h: f64) -> f64 {
        self.prepay_amount.eval(h)
    }

    /// Same coupons, different lump sum at termination.
    pub fn with_payoff(&self, payoff: PiecewiseLinear) -> Self {
        Self { payoff, ..self.clone() }
    }

    /// Union of coupon and payoff kinks, sorted.
    pub fn kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self
            .coupon
            .kinks()
            .iter()
            .chain(self.payoff.kinks())
            .copied()
            .collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }
}

pub fn perpetual_cashflows(spec: &ContractSpec, params: &ModelParams) -> Result<PerpetualCashflows> {
    spec.validate(params)?;
    let (m, b0, alpha) = (spec.m, params.b0, spec.alpha);
    let min_b0_h = PiecewiseLinear::new(vec![b0], vec![(0.0, 1.0), (b0, 0.0)]);
    Ok(match spec.kind {
        ContractKind::Frm => PerpetualCashflows {
            coupon: PiecewiseLinear::constant(m * b0),
            payoff: min_b0_h,
            prepay_amount: PiecewiseLinear::constant(b0),
        },
        ContractKind::Abm => PerpetualCashflows {
            coupon: PiecewiseLinear::new(vec![b0], vec![(0.0, m), (m * b0, 0.0)]),
            payoff: min_b0_h.clone(),
            prepay_amount: min_b0_h,
        },
        ContractKind::Aprm => {
            // B0 min(1,h) + alpha (h-1)^+ never exceeds h, so it is also the payoff
            let amount = PiecewiseLinear::new(vec![1.0], vec![(0.0, b0), (b0 - alpha, alpha)]);
            PerpetualCashflows {
                coupon: PiecewiseLinear::new(vec![1.0], vec![(0.0, m * b0), (m * b0, 0.0)]),
                payoff: amount.clone(),
                prepay_amount: amount,
            }
        }
    })
}

/// Outstanding balance and coupon rate at time `t` of a loan with maturity `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleState {
    pub balance: f64,
    pub coupon: f64,
}

/// APRM state; `prepay_amount` includes the capital-gain share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprmState {
    pub balance: f64,
    pub coupon: f64,
    pub prepay_amount: f64,
}

fn check_schedule(m: f64, b0: f64, maturity: f64, t: f64) -> Result<()> {
    if !(m > 0.0 && b0 > 0.0 && maturity > 0.0 && m.is_finite() && maturity.is_finite()) {
        return Err(Error::InvalidSpec(format!(
            "schedule requires m > 0, b0 > 0, T > 0 (got m={m}, b0={b0}, T={maturity})"
        )));
    }
    if !(0.0..=maturity).contains(&t) {
        return Err(Error::InvalidTime { t, maturity });
    }
    Ok(())
}

/// Level-payment fully amortizing loan.
pub fn frm_schedule(m: f64, b0: f64, maturity: f64, t: f64) -> Result<ScheduleState> {
    check_schedule(m, b0, maturity, t)?;
    let denom = -(-m * maturity).exp_m1();
    Ok(ScheduleState {
        balance: b0 * -(-m * (maturity - t)).exp_m1() / denom,
        coupon: m * b0 / denom,
    })
}

/// Balance capped at the house price index; coupon scaled by the same factor.
pub fn abm_state(m: f64, b0: f64, maturity: f64, t: f64, h: f64) -> Result<ScheduleState> {
    if !(h >= 0.0) {
        return Err(Error::InvalidSpec(format!("house price must be nonnegative (got {h})")));
    }
    let nominal = frm_schedule(m, b0, maturity, t)?;
    let scale = if nominal.balance > 0.0 { (h / nominal.balance).min(1.0) } else { 1.0 };
    Ok(ScheduleState {
        balance: nominal.balance.min(h),
        coupon: nominal.coupon * scale,
    })
}

/// Coupon and balance scaled by `min(1, h)`; prepayment adds `alpha (h-1)^+`.
pub fn aprm_state(m: f64, b0: f64, maturity: f64, t: f64, h: f64, alpha: f64) -> Result<AprmState> {
    if !(h >= 0.0) {
        return Err(Error::InvalidSpec(format!("house price must be nonnegative (got {h})")));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidSpec(format!("alpha must lie in [0, 1) (got {alpha})")));
    }
    let nominal = frm_schedule(m, b0, maturity, t)?;
    let scale = h.min(1.0);
    let balance = nominal.balance * scale;
    Ok(AprmState {
        balance,
        coupon: nominal.coupon * scale,
        prepay_amount: balance + alpha * (h - 1.0).max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(0.017825, 0.045, 0.1125, 0.9).unwrap()
    }

    fn log_grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
        let (a, b) = (lo.ln(), hi.ln());
        (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
    }

    #[test]
    fn frm_table_row() {
        let cf = perpetual_cashflows(&ContractSpec::frm(0.0326), &params()).unwrap();
        assert!((cf.coupon(2.0) - 0.02934).abs() < 1e-15);
        assert_eq!(cf.payoff(2.0), 0.9);
        assert_eq!(cf.prepay_amount(2.0), 0.9);
    }

    #[test]
    fn abm_table_row() {
        let cf = perpetual_cashflows(&ContractSpec::abm(0.0326), &params()).unwrap();
        assert_eq!(cf.prepay_amount(0.5), 0.5);
        assert_eq!(cf.payoff(0.5), 0.5);
        assert!((cf.coupon(0.5) - 0.0326 * 0.5).abs() < 1e-16);
    }

    #[test]
    fn aprm_table_row() {
        let cf = perpetual_cashflows(&ContractSpec::aprm(0.0326, 0.05), &params()).unwrap();
        assert!((cf.prepay_amount(1.5) - 0.925).abs() < 1e-15);
        assert!((cf.payoff(1.5) - 0.925).abs() < 1e-15);
        assert!((cf.coupon(0.5) - 0.0326 * 0.9 * 0.5).abs() < 1e-16);
    }

    #[test]
    fn spec_validation() {
        let p = params();
        assert!(matches!(
            ContractSpec::frm(0.01).validate(&p),
            Err(Error::NegativeSpread { .. })
        ));
        assert!(ContractSpec::aprm(0.03, 1.0).validate(&p).is_err());
        assert!(ContractSpec::aprm(0.03, -0.1).validate(&p).is_err());
        let bad = ContractSpec { kind: ContractKind::Abm, m: 0.03, alpha: 0.1 };
        assert!(bad.validate(&p).is_err());
        assert!(perpetual_cashflows(&bad, &p).is_err());
    }

    #[test]
    fn payoff_is_min_of_house_and_prepay_amount() {
        let p = params();
        for spec in [ContractSpec::frm(0.0326), ContractSpec::abm(0.0326), ContractSpec::aprm(0.0326, 0.05), ContractSpec::aprm(0.05, 0.6)] {
            let cf = perpetual_cashflows(&spec, &p).unwrap();
            for h in log_grid(10_000, 1e-3, 1e3) {
                let pay = cf.payoff(h);
                let expect = h.min(cf.prepay_amount(h));
                assert!((pay - expect).abs() <= 1e-14 * expect.max(1.0), "{spec:?} h={h}");
                assert!(pay <= h + 1e-15 && pay <= cf.prepay_amount(h) + 1e-15);
                assert!(cf.coupon(h) >= 0.0 && pay >= 0.0);
            }
        }
    }

    #[test]
    fn cross_contract_orderings() {
        let p = params();
        let frm = perpetual_cashflows(&ContractSpec::frm(0.0326), &p).unwrap();
        let abm = perpetual_cashflows(&ContractSpec::abm(0.0326), &p).unwrap();
        let aprm = perpetual_cashflows(&ContractSpec::aprm(0.0326, 0.05), &p).unwrap();
        for h in log_grid(10_000, 1e-3, 1e3) {
            assert!(abm.prepay_amount(h) <= frm.prepay_amount(h));
            if h <= 1.0 {
                assert!(aprm.coupon(h) <= frm.coupon(h) + 1e-16);
            }
        }
    }

    #[test]
    fn frm_schedule_endpoints() {
        let s0 = frm_schedule(0.0326, 0.9, 30.0, 0.0).unwrap();
        assert!((s0.balance - 0.9).abs() < 1e-15);
        let s_t = frm_schedule(0.0326, 0.9, 30.0, 30.0).unwrap();
        assert_eq!(s_t.balance, 0.0);
        assert!(matches!(
            frm_schedule(0.0326, 0.9, 30.0, 31.0),
            Err(Error::InvalidTime { .. })
        ));
    }

    #[test]
    fn frm_schedule_midpoint_and_coupon_identity() {
        // 0.9 (1 - e^{-0.489}) / (1 - e^{-0.978}) evaluated with 50-digit arithmetic
        let s = frm_schedule(0.0326, 0.9, 30.0, 15.0).unwrap();
        assert!((s.balance - 0.557_883_746_658_370_3).abs() < 1e-15, "{}", s.balance);
        let alt = 0.0326 * s.balance / (1.0 - (-0.0326f64 * 15.0).exp());
        assert!((alt - s.coupon).abs() < 1e-14);
    }

    #[test]
    fn frm_balance_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..=300 {
            let s = frm_schedule(0.0326, 0.9, 30.0, 0.1 * i as f64).unwrap();
            assert!(s.balance < prev);
            prev = s.balance;
        }
    }

    #[test]
    fn abm_state_cases() {
        let nominal = frm_schedule(0.0326, 0.9, 30.0, 10.0).unwrap();
        let above = abm_state(0.0326, 0.9, 30.0, 10.0, 2.0).unwrap();
        assert_eq!(above, nominal);
        let zero = abm_state(0.0326, 0.9, 30.0, 10.0, 0.0).unwrap();
        assert_eq!((zero.balance, zero.coupon), (0.0, 0.0));
        let low = abm_state(0.0326, 0.9, 30.0, 10.0, 0.4).unwrap();
        assert_eq!(low.balance, 0.4);
        assert!((low.coupon - nominal.coupon * 0.4 / nominal.balance).abs() < 1e-15);
        // coupon equals the level payment on the reduced balance over the remaining term
        let relevered = 0.0326 * low.balance / (1.0 - (-0.0326f64 * 20.0).exp());
        assert!((relevered - low.coupon).abs() < 1e-14);
    }

    #[test]
    fn aprm_state_cases() {
        let nominal = frm_schedule(0.0326, 0.9, 30.0, 10.0).unwrap();
        let up = aprm_state(0.0326, 0.9, 30.0, 10.0, 1.3, 0.0).unwrap();
        assert_eq!((up.balance, up.coupon, up.prepay_amount), (nominal.balance, nominal.coupon, nominal.balance));
        let half = aprm_state(0.0326, 0.9, 30.0, 10.0, 0.5, 0.05).unwrap();
        assert_eq!(half.balance, 0.5 * nominal.balance);
        assert_eq!(half.coupon, 0.5 * nominal.coupon);
        let gain = aprm_state(0.0326, 0.9, 30.0, 10.0, 1.4, 0.05).unwrap();
        assert!((gain.prepay_amount - gain.balance - 0.02).abs() < 1e-15);
    }

    #[test]
    fn segments_split_at_kinks() {
        let pl = PiecewiseLinear::new(vec![1.0], vec![(0.0, 2.0), (2.0, 0.0)]);
        let segs = pl.segments(0.5, f64::INFINITY);
        assert_eq!(segs, vec![(0.5, 1.0, 0.0, 2.0), (1.0, f64::INFINITY, 2.0, 0.0)]);
        assert_eq!(pl.segments(2.0, 3.0), vec![(2.0, 3.0, 2.0, 0.0)]);
    }
}
