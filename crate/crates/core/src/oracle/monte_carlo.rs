//! Monte Carlo integration of discounted cash flows along exact GBM paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::contracts::PerpetualCashflows;
use crate::error::{Error, Result};
use crate::model::ModelParams;

const PAIRS_PER_BLOCK: usize = 256;
const MIN_PATHS: usize = 10_000;
const MIN_HORIZON: f64 = 200.0;
pub const STEPS_PER_YEAR: f64 = 52.0;

/// Stop at the first weekly observation outside `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Policy {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Policy {
    pub fn new(lower: Option<f64>, upper: Option<f64>) -> Self {
        Self { lower, upper }
    }

    fn exits(&self, h: f64) -> bool {
        self.lower.is_some_and(|l| h <= l) || self.upper.is_some_and(|u| h >= u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub horizon: f64,
    pub dt: f64,
    /// `sup coupon / r * exp(-r horizon)`: cash flows after the horizon are dropped.
    pub tail_bound: f64,
}

/// Value of the cash flows under `policy` (or no stopping when `None`), started at `h`.
///
/// Paths come in antithetic pairs; each block of pairs draws from its own ChaCha stream
/// of `seed`, so the estimate does not depend on how blocks are scheduled.
pub fn mc_cashflow_value(
    params: &ModelParams,
    cashflows: &PerpetualCashflows,
    policy: Option<Policy>,
    h: f64,
    n_paths: usize,
    horizon: f64,
    seed: u64,
) -> Result<McEstimate> {
    params.validate()?;
    if n_paths < MIN_PATHS {
        return Err(Error::InvalidHorizon(format!("need at least {MIN_PATHS} paths (got {n_paths})")));
    }
    if !(horizon >= MIN_HORIZON && horizon.is_finite()) {
        return Err(Error::InvalidHorizon(format!("horizon must be at least {MIN_HORIZON} years (got {horizon})")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidSpec(format!("house price must be positive (got {h})")));
    }
    let policy = policy.unwrap_or_default();
    let dt = 1.0 / STEPS_PER_YEAR;
    let n_steps = (horizon * STEPS_PER_YEAR).ceil() as usize;
    let discount: Vec<f64> = (0..=n_steps).map(|k| (-params.r * k as f64 * dt).exp()).collect();
    let drift = (params.r - params.delta - 0.5 * params.sigma * params.sigma) * dt;
    let vol = params.sigma * dt.sqrt();

    let path = |z: &[f64], sign: f64| -> f64 {
        if policy.exits(h) {
            return cashflows.payoff(h);
        }
        let mut x = h;
        let mut c_prev = cashflows.coupon(x);
        let mut acc = 0.0;
        for (k, zk) in z.iter().enumerate() {
            x *= (drift + sign * vol * zk).exp();
            let c = cashflows.coupon(x);
            acc += 0.5 * dt * (c_prev * discount[k] + c * discount[k + 1]);
            if policy.exits(x) {
                return acc + discount[k + 1] * cashflows.payoff(x);
            }
            c_prev = c;
        }
        acc
    };

    let n_pairs = n_paths.div_ceil(2);
    let n_blocks = n_pairs.div_ceil(PAIRS_PER_BLOCK);
    let sums: Vec<(f64, f64, usize)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let pairs = PAIRS_PER_BLOCK.min(n_pairs - b * PAIRS_PER_BLOCK);
            let mut z = vec![0.0; n_steps];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..pairs {
                for zk in z.iter_mut() {
                    *zk = StandardNormal.sample(&mut rng);
                }
                let y = 0.5 * (path(&z, 1.0) + path(&z, -1.0));
                s += y;
                s2 += y * y;
            }
            (s, s2, pairs)
        })
        .collect();
    let (s, s2, count) = sums
        .iter()
        .fold((0.0, 0.0, 0usize), |acc, b| (acc.0 + b.0, acc.1 + b.1, acc.2 + b.2));
    let nf = count as f64;
    let mean = s / nf;
    let var = ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0);

    let c_sup = coupon_sup(cashflows, h);
    Ok(McEstimate {
        estimate: mean,
        std_error: (var / nf).sqrt(),
        n_paths: 2 * count,
        horizon,
        dt,
        tail_bound: c_sup / params.r * (-params.r * horizon).exp(),
    })
}

fn coupon_sup(cf: &PerpetualCashflows, h: f64) -> f64 {
    let (_, slope) = cf.coupon.piece_at(f64::MAX);
    if slope != 0.0 {
        return f64::INFINITY;
    }
    let mut pts = cf.coupon.kinks().to_vec();
    pts.push(h);
    pts.push(f64::MAX);
    pts.into_iter().map(|x| cf.coupon(x)).fold(0.0, f64::max)
}
