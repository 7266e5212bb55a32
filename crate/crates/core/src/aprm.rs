//! Perpetual adjustable-payment-rate mortgage with capital-gain sharing.
//!
//! Three rate regimes are distinguished: `m <= delta` (no prepayment below the purchase
//! price), `delta < m < m*` and `m >= m*`, with `m* = p1 delta / (p1 - 1)`. Within the
//! first two regimes a sharing fraction at or above `alpha*` removes high-state
//! prepayment altogether.

use serde::Serialize;

use crate::contracts::ContractKind;
use crate::error::{Error, Result};
use crate::model::{compute_exponents, Exponents, ModelParams};
use crate::numerics::{expand_upper, root_with_pattern, shrink};
use crate::solution::{paste, Action, Boundaries, Coeffs, Region, SolvedContract};

const H_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateRegime {
    LowRate,
    MidRate,
    HighRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AprmRegime {
    pub regime: RateRegime,
    pub m_star: f64,
    pub alpha_star: Option<f64>,
}

/// `(p1 - 1) / (p2 (p1 + p2)) * m B0 / delta`.
pub fn beta1(e: &Exponents, params: &ModelParams, m: f64) -> f64 {
    (e.p1 - 1.0) / (e.p2 * (e.p1 + e.p2)) * m * params.b0 / params.delta
}

/// Mid-rate analogue of [`beta1`], including the low-state prepayment term.
pub fn beta2(e: &Exponents, params: &ModelParams, m: f64) -> f64 {
    let (p1, p2) = (e.p1, e.p2);
    let lead = (p1 - 1.0) / (p1 + p2) * m * params.b0 / params.delta;
    let tail = p1.powf((1.0 + p2) / (p1 - 1.0)) * (1.0 - params.delta / m).powf((p1 + p2) / (p1 - 1.0));
    lead * (1.0 / p2 + tail)
}

/// `((1+p2)/p2) (p2 beta)^{1/(1+p2)} alpha^{p2/(1+p2)} - alpha - B0 (m/r - 1)`.
pub fn alpha_star_residual(e: &Exponents, params: &ModelParams, m: f64, beta: f64, alpha: f64) -> f64 {
    let p2 = e.p2;
    (1.0 + p2) / p2 * (p2 * beta).powf(1.0 / (1.0 + p2)) * alpha.powf(p2 / (1.0 + p2))
        - alpha
        - params.b0 * (m / params.r - 1.0)
}

// With alpha = v p2 K and K = B0 (m/r - 1) the residual divided by K becomes
// (1+p2) u^{1/(1+p2)} v^{p2/(1+p2)} - 1 - p2 v with u = beta / K, free of the scale of K.
fn solve_alpha_star(e: &Exponents, params: &ModelParams, m: f64, beta: f64) -> Result<f64> {
    let p2 = e.p2;
    let k = params.b0 * (m / params.r - 1.0);
    let u = beta / k;
    let f = |v: f64| (1.0 + p2) * u.powf(1.0 / (1.0 + p2)) * v.powf(p2 / (1.0 + p2)) - 1.0 - p2 * v;
    if f(1.0) <= 0.0 {
        return Ok(p2 * k);
    }
    let v = root_with_pattern(f, 0.0, 1.0, true, "alpha* equation")?;
    Ok(v * p2 * k)
}

pub fn aprm_regime(params: &ModelParams, m: f64) -> Result<AprmRegime> {
    params.validate()?;
    params.check_spread(m)?;
    let e = compute_exponents(params)?;
    regime_with(&e, params, m)
}

fn regime_with(e: &Exponents, params: &ModelParams, m: f64) -> Result<AprmRegime> {
    let m_star = e.p1 * params.delta / (e.p1 - 1.0);
    let (regime, alpha_star) = if m <= params.delta {
        (RateRegime::LowRate, Some(solve_alpha_star(e, params, m, beta1(e, params, m))?))
    } else if m < m_star {
        (RateRegime::MidRate, Some(solve_alpha_star(e, params, m, beta2(e, params, m))?))
    } else {
        (RateRegime::HighRate, None)
    };
    Ok(AprmRegime { regime, m_star, alpha_star })
}

pub fn solve_aprm(params: &ModelParams, m: f64, alpha: f64) -> Result<SolvedContract> {
    params.validate()?;
    params.check_spread(m)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidSpec(format!("alpha must lie in [0, 1) (got {alpha})")));
    }
    let e = compute_exponents(params)?;
    let reg = regime_with(&e, params, m)?;
    let shares_enough = reg.alpha_star.is_some_and(|a| alpha >= a);
    let ctx = Ctx::new(e, *params, m, alpha);
    let (regions, bounds) = match reg.regime {
        RateRegime::LowRate if shares_enough => ctx.low_no_prepay(),
        RateRegime::LowRate => ctx.low_with_prepay()?,
        RateRegime::MidRate if shares_enough => ctx.mid_lower_only(),
        RateRegime::MidRate => ctx.two_sided(false)?,
        RateRegime::HighRate if alpha >= params.b0 => {
            return Err(Error::UnsupportedRegime(format!(
                "m = {m} is at or above m* = {} and alpha = {alpha} >= B0 = {}",
                reg.m_star, params.b0
            )))
        }
        RateRegime::HighRate => ctx.two_sided(true)?,
    };
    Ok(SolvedContract::new(ContractKind::Aprm, *params, e, regions, bounds))
}

/// Discounted coupons `m B0 min(1, H)` with no stopping at all.
pub fn solve_aprm_no_prepay(params: &ModelParams, m: f64) -> Result<SolvedContract> {
    params.validate()?;
    params.check_spread(m)?;
    let e = compute_exponents(params)?;
    let ctx = Ctx::new(e, *params, m, 0.0);
    let (regions, bounds) = ctx.low_no_prepay();
    Ok(SolvedContract::new(ContractKind::Aprm, *params, e, regions, bounds))
}

struct Ctx {
    e: Exponents,
    p: ModelParams,
    m: f64,
    alpha: f64,
    /// `alpha * h3`, finite even when `alpha = 0`.
    a3: f64,
}

impl Ctx {
    fn new(e: Exponents, p: ModelParams, m: f64, alpha: f64) -> Self {
        let a3 = e.p2 / (1.0 + e.p2) * (m * p.b0 * (1.0 / p.r - 1.0 / m) + alpha);
        Self { e, p, m, alpha, a3 }
    }

    fn mb0(&self) -> f64 {
        self.m * self.p.b0
    }

    fn h3(&self) -> Option<f64> {
        (self.alpha > 0.0).then(|| self.a3 / self.alpha)
    }

    fn cap_pieces(&self, h2: f64) -> (Vec<Region>, Boundaries) {
        let b0 = self.p.b0;
        let prepay = Coeffs::linear(b0 - self.alpha, self.alpha);
        match self.h3() {
            Some(h3) => {
                let top = Coeffs {
                    c_p2: -(self.alpha / self.e.p2) * h3.powf(1.0 + self.e.p2),
                    k0: self.mb0() / self.p.r,
                    ..Coeffs::default()
                };
                (
                    vec![
                        Region { lo: h2, hi: h3, action: Action::Prepay, coeffs: prepay },
                        Region { lo: h3, hi: f64::INFINITY, action: Action::Continue, coeffs: top },
                    ],
                    Boundaries { h2: Some(h2), h3: Some(h3), h1: None },
                )
            }
            None => (
                vec![Region { lo: h2, hi: f64::INFINITY, action: Action::Prepay, coeffs: prepay }],
                Boundaries { h2: Some(h2), ..Boundaries::default() },
            ),
        }
    }

    fn upper_bracket(&self, lo: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
        match self.h3() {
            Some(h3) => Ok(h3),
            None => expand_upper(f, lo, 2.0, 2.0, H_CAP),
        }
    }

    fn middle_piece(&self, h2: f64) -> Coeffs {
        let v = self.p.b0 + self.alpha * (h2 - 1.0);
        paste(&self.e, h2, v, self.alpha, self.mb0() / self.p.r, 0.0)
    }

    fn low_no_prepay(&self) -> (Vec<Region>, Boundaries) {
        let (p1, p2) = (self.e.p1, self.e.p2);
        let scale = self.mb0() / self.p.delta;
        let lower = Coeffs {
            c_p1: -(1.0 + p2) / (p1 * (p1 + p2)) * scale,
            k1: scale,
            ..Coeffs::default()
        };
        let upper = Coeffs {
            c_p2: -(p1 - 1.0) / (p2 * (p1 + p2)) * scale,
            k0: self.mb0() / self.p.r,
            ..Coeffs::default()
        };
        (
            vec![
                Region { lo: 0.0, hi: 1.0, action: Action::Continue, coeffs: lower },
                Region { lo: 1.0, hi: f64::INFINITY, action: Action::Continue, coeffs: upper },
            ],
            Boundaries::default(),
        )
    }

    fn low_with_prepay(&self) -> Result<(Vec<Region>, Boundaries)> {
        let (p1, p2) = (self.e.p1, self.e.p2);
        let lead = p1 / (p1 - 1.0) * (self.mb0() * (1.0 / self.p.r - 1.0 / self.m) + self.alpha);
        let target = self.mb0() / (p2 * self.p.delta);
        let chi = |h: f64| h.powf(p2) * (lead - self.alpha * h) - target;
        let hi = self.upper_bracket(1.0, chi)?;
        let (lo, hi) = shrink(1.0, hi, 1e-12);
        let h2 = root_with_pattern(chi, lo, hi, true, "APRM low-rate prepayment equation")?;

        let middle = self.middle_piece(h2);
        let at_one = middle.eval(&self.e, 1.0);
        let scale = self.mb0() / self.p.delta;
        let lower = Coeffs { c_p1: at_one - scale, k1: scale, ..Coeffs::default() };
        let mut regions = vec![
            Region { lo: 0.0, hi: 1.0, action: Action::Continue, coeffs: lower },
            Region { lo: 1.0, hi: h2, action: Action::Continue, coeffs: middle },
        ];
        let (caps, bounds) = self.cap_pieces(h2);
        regions.extend(caps);
        Ok((regions, bounds))
    }

    fn lower_pieces(&self, h1: f64) -> Vec<Region> {
        let b0 = self.p.b0;
        let cont = paste(&self.e, h1, b0 * h1, b0, 0.0, self.mb0() / self.p.delta);
        vec![
            Region { lo: 0.0, hi: h1, action: Action::Prepay, coeffs: Coeffs::linear(0.0, b0) },
            Region { lo: h1, hi: 1.0, action: Action::Continue, coeffs: cont },
        ]
    }

    fn mid_lower_only(&self) -> (Vec<Region>, Boundaries) {
        let p1 = self.e.p1;
        let h1 = (p1 * (1.0 - self.p.delta / self.m)).powf(1.0 / (p1 - 1.0));
        let mut regions = self.lower_pieces(h1);
        let k0 = self.mb0() / self.p.r;
        let at_one = regions[1].coeffs.eval(&self.e, 1.0);
        let upper = Coeffs { c_p2: at_one - k0, k0, ..Coeffs::default() };
        regions.push(Region { lo: 1.0, hi: f64::INFINITY, action: Action::Continue, coeffs: upper });
        (regions, Boundaries { h1: Some(h1), ..Boundaries::default() })
    }

    /// Low-state prepayment below `h1` plus the high-state prepayment band.
    fn two_sided(&self, high_rate: bool) -> Result<(Vec<Region>, Boundaries)> {
        let (p1, p2) = (self.e.p1, self.e.p2);
        let (delta, m, alpha, a3) = (self.p.delta, self.m, self.alpha, self.a3);
        let mb0 = self.mb0();
        // the appendix equations multiplied through by alpha
        let h1_of = |h: f64| {
            let den = 1.0 + delta / mb0 * p1 * h.powf(-p1) * (a3 - alpha * h);
            (p1 * (1.0 - delta / m) / den).powf(1.0 / (p1 - 1.0))
        };
        let c = p1 * (1.0 + p2) / ((p1 - 1.0) * p2);
        let chi = |h: f64| {
            h.powf(p2) * (alpha * h - c * a3)
                + mb0 / delta * ((1.0 - delta / m) * h1_of(h).powf(1.0 + p2) + 1.0 / p2)
        };

        let hi = if high_rate {
            let rhs = mb0 / delta * ((p1 - 1.0) / p1 - delta / m);
            let aux = |h: f64| h.powf(-p1) * (a3 - alpha * h) - rhs;
            if rhs <= 0.0 {
                self.upper_bracket(1.0, chi)?
            } else {
                let top = self.upper_bracket(1.0, aux)?;
                let (lo, top) = shrink(1.0, top, 1e-12);
                root_with_pattern(aux, lo, top, false, "APRM high-rate auxiliary equation")?
            }
        } else {
            self.upper_bracket(1.0, chi)?
        };
        let (lo, hi_in) = shrink(1.0, hi, 1e-12);
        let hi = if high_rate { hi } else { hi_in };
        let h2 = root_with_pattern(chi, lo, hi, false, "APRM prepayment equation")?;
        let h1 = h1_of(h2);

        let mut regions = self.lower_pieces(h1);
        regions.push(Region { lo: 1.0, hi: h2, action: Action::Continue, coeffs: self.middle_piece(h2) });
        let (caps, mut bounds) = self.cap_pieces(h2);
        regions.extend(caps);
        bounds.h1 = Some(h1);
        Ok((regions, bounds))
    }
}
