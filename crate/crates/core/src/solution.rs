//! Piecewise closed-form value functions shared by the three contract solvers.

use serde::Serialize;

use crate::contracts::ContractKind;
use crate::model::{Exponents, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Action {
    Default,
    Prepay,
    Continue,
}

impl Action {
    pub fn is_stop(&self) -> bool {
        !matches!(self, Action::Continue)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Action::Default => "Default",
            Action::Prepay => "Prepay",
            Action::Continue => "Continue",
        }
    }
}

/// `c_p1 h^p1 + c_p2 h^-p2 + k0 + k1 h`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Coeffs {
    pub c_p1: f64,
    pub c_p2: f64,
    pub k0: f64,
    pub k1: f64,
}

impl Coeffs {
    pub fn linear(k0: f64, k1: f64) -> Self {
        Self { k0, k1, ..Self::default() }
    }

    // zero coefficients are skipped so that h^-p2 at h -> 0 and h^p1 at h -> inf do not
    // turn into 0 * inf
    pub fn eval(&self, e: &Exponents, h: f64) -> f64 {
        let mut v = self.k0 + self.k1 * h;
        if self.c_p1 != 0.0 {
            v += self.c_p1 * h.powf(e.p1);
        }
        if self.c_p2 != 0.0 {
            v += self.c_p2 * h.powf(-e.p2);
        }
        v
    }

    pub fn derivative(&self, e: &Exponents, h: f64) -> f64 {
        let mut d = self.k1;
        if self.c_p1 != 0.0 {
            d += e.p1 * self.c_p1 * h.powf(e.p1 - 1.0);
        }
        if self.c_p2 != 0.0 {
            d -= e.p2 * self.c_p2 * h.powf(-e.p2 - 1.0);
        }
        d
    }

    pub fn second_derivative(&self, e: &Exponents, h: f64) -> f64 {
        let mut d = 0.0;
        if self.c_p1 != 0.0 {
            d += e.p1 * (e.p1 - 1.0) * self.c_p1 * h.powf(e.p1 - 2.0);
        }
        if self.c_p2 != 0.0 {
            d += e.p2 * (e.p2 + 1.0) * self.c_p2 * h.powf(-e.p2 - 2.0);
        }
        d
    }
}

/// Continuation piece with particular part `k0 + k1 h` that takes value `v` and slope `s` at `x`.
pub(crate) fn paste(e: &Exponents, x: f64, v: f64, s: f64, k0: f64, k1: f64) -> Coeffs {
    let (p1, p2) = (e.p1, e.p2);
    let rem = v - k0 - k1 * x;
    let slope = x * (s - k1);
    Coeffs {
        c_p1: (p2 * rem + slope) / ((p1 + p2) * x.powf(p1)),
        c_p2: (p1 * rem - slope) * x.powf(p2) / (p1 + p2),
        k0,
        k1,
    }
}

/// One interval of the value function. Stop regions include their finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub lo: f64,
    pub hi: f64,
    pub action: Action,
    pub coeffs: Coeffs,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Boundaries {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h3: Option<f64>,
}

impl Boundaries {
    pub fn is_empty(&self) -> bool {
        self.h1.is_none() && self.h2.is_none() && self.h3.is_none()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> {
        [("h1", self.h1), ("h2", self.h2), ("h3", self.h3)]
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
    }
}

/// Solved perpetual contract: ordered regions partitioning `(0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvedContract {
    pub kind: ContractKind,
    pub regions: Vec<Region>,
    pub boundaries: Boundaries,
    pub exponents: Exponents,
    #[serde(skip)]
    pub params: ModelParams,
}

impl SolvedContract {
    pub(crate) fn new(
        kind: ContractKind,
        params: ModelParams,
        exponents: Exponents,
        regions: Vec<Region>,
        boundaries: Boundaries,
    ) -> Self {
        debug_assert!(regions.first().is_some_and(|r| r.lo == 0.0));
        debug_assert!(regions.last().is_some_and(|r| r.hi == f64::INFINITY));
        debug_assert!(regions.windows(2).all(|w| w[0].hi == w[1].lo));
        Self { kind, regions, boundaries, exponents, params }
    }

    /// Region used to evaluate at `h`; a stop region wins at a shared endpoint.
    pub fn region_at(&self, h: f64) -> &Region {
        let idx = self.regions.partition_point(|r| r.hi < h);
        let idx = idx.min(self.regions.len() - 1);
        let here = &self.regions[idx];
        if here.hi == h {
            if let Some(next) = self.regions.get(idx + 1) {
                if next.action.is_stop() && !here.action.is_stop() {
                    return next;
                }
            }
        }
        here
    }

    pub fn action_at(&self, h: f64) -> Action {
        self.region_at(h).action
    }

    pub fn value(&self, h: f64) -> f64 {
        self.region_at(h).coeffs.eval(&self.exponents, h)
    }

    pub fn derivative(&self, h: f64) -> f64 {
        self.region_at(h).coeffs.derivative(&self.exponents, h)
    }

    pub fn second_derivative(&self, h: f64) -> f64 {
        self.region_at(h).coeffs.second_derivative(&self.exponents, h)
    }

    /// Left and right values and slopes at an interior region endpoint.
    pub fn one_sided(&self, idx: usize) -> Option<((f64, f64), (f64, f64))> {
        let (left, right) = (self.regions.get(idx)?, self.regions.get(idx + 1)?);
        let x = left.hi;
        let e = &self.exponents;
        Some((
            (left.coeffs.eval(e, x), left.coeffs.derivative(e, x)),
            (right.coeffs.eval(e, x), right.coeffs.derivative(e, x)),
        ))
    }

    /// `(sigma^2/2) h^2 V'' + (r - delta) h V' - r V + coupon` at `h`.
    pub fn ode_residual(&self, h: f64, coupon: f64) -> f64 {
        let p = &self.params;
        let c = &self.region_at(h).coeffs;
        let e = &self.exponents;
        0.5 * p.sigma * p.sigma * h * h * c.second_derivative(e, h)
            + (p.r - p.delta) * h * c.derivative(e, h)
            - p.r * c.eval(e, h)
            + coupon
    }

    pub fn has_action(&self, action: Action) -> bool {
        self.regions.iter().any(|r| r.action == action)
    }
}
