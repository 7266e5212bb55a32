//! Projected successive over-relaxation for the discretized obstacle problem
//! `min{ -(L_H - r) V - c, f - V } = 0` in log-price coordinates.

use serde::Serialize;

use crate::contracts::PerpetualCashflows;
use crate::error::{Error, Result};
use crate::model::{compute_exponents, ModelParams};

/// Log-spaced grid and relaxation settings. Payoff and coupon kinks are placed on nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub h_min: f64,
    pub h_max: f64,
    pub n_points: usize,
    pub relaxation: f64,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            h_min: 0.05,
            h_max: 10.0,
            n_points: 2001,
            relaxation: 1.5,
            tol: 1e-11,
            max_sweeps: 2_000_000,
        }
    }
}

impl GridSpec {
    pub fn new(h_min: f64, h_max: f64, n_points: usize) -> Self {
        Self { h_min, h_max, n_points, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.h_min > 0.0
            && self.h_min < self.h_max
            && self.h_max.is_finite()
            && self.n_points >= 101
            && self.relaxation > 0.0
            && self.relaxation < 2.0
            && self.tol > 0.0
            && self.max_sweeps >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!("{self:?}")))
        }
    }
}

/// Node values of the discrete solution and the nodes where the obstacle binds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub stop: Vec<bool>,
    pub sweeps: usize,
    pub last_update: f64,
}

impl OracleResult {
    /// Maximal runs of stopping nodes as `(first node, last node)`.
    pub fn stop_intervals(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, &s) in self.stop.iter().enumerate() {
            match (s, start) {
                (true, None) => start = Some(i),
                (false, Some(j)) => {
                    out.push((self.nodes[j], self.nodes[i - 1]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(j) = start {
            out.push((self.nodes[j], *self.nodes.last().unwrap()));
        }
        out
    }

    /// Largest `|values[i] - reference(nodes[i])|` over nodes in `[lo, hi]`.
    pub fn sup_error(&self, lo: f64, hi: f64, reference: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.values)
            .filter(|(h, _)| **h >= lo && **h <= hi)
            .map(|(&h, &v)| (v - reference(h)).abs())
            .fold(0.0, f64::max)
    }

    /// Linear interpolation in log price.
    pub fn interpolate(&self, h: f64) -> f64 {
        interp(&self.nodes, &self.values, h)
    }
}

fn interp(nodes: &[f64], values: &[f64], h: f64) -> f64 {
    let n = nodes.len();
    if h <= nodes[0] {
        return values[0];
    }
    if h >= nodes[n - 1] {
        return values[n - 1];
    }
    let j = nodes.partition_point(|&x| x <= h).min(n - 1);
    let (x0, x1) = (nodes[j - 1].ln(), nodes[j].ln());
    let w = (h.ln() - x0) / (x1 - x0);
    values[j - 1] * (1.0 - w) + values[j] * w
}

fn build_nodes(grid: &GridSpec, cashflows: &PerpetualCashflows) -> Vec<f64> {
    let (a, b) = (grid.h_min.ln(), grid.h_max.ln());
    let mut cuts = vec![a];
    for k in cashflows.kinks().into_iter().chain(cashflows.prepay_amount.kinks().iter().copied()) {
        let x = k.ln();
        if x > a && x < b && !cuts.iter().any(|&c| (c - x).abs() < 1e-14) {
            cuts.push(x);
        }
    }
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);

    let intervals = grid.n_points - 1;
    let total = b - a;
    let n_seg = cuts.len() - 1;
    let mut counts: Vec<usize> = cuts
        .windows(2)
        .map(|w| (((w[1] - w[0]) / total * intervals as f64).floor() as usize).max(1))
        .collect();
    // hand out the leftover intervals to the widest cells
    while counts.iter().sum::<usize>() < intervals {
        let i = (0..n_seg)
            .max_by(|&i, &j| {
                let wi = (cuts[i + 1] - cuts[i]) / counts[i] as f64;
                let wj = (cuts[j + 1] - cuts[j]) / counts[j] as f64;
                wi.total_cmp(&wj)
            })
            .unwrap();
        counts[i] += 1;
    }
    while counts.iter().sum::<usize>() > intervals {
        let i = (0..n_seg)
            .filter(|&i| counts[i] > 1)
            .min_by(|&i, &j| {
                let wi = (cuts[i + 1] - cuts[i]) / counts[i] as f64;
                let wj = (cuts[j + 1] - cuts[j]) / counts[j] as f64;
                wi.total_cmp(&wj)
            })
            .unwrap();
        counts[i] -= 1;
    }

    let mut xs = Vec::with_capacity(grid.n_points);
    for (s, &n) in counts.iter().enumerate() {
        for k in 0..n {
            xs.push(cuts[s] + (cuts[s + 1] - cuts[s]) * k as f64 / n as f64);
        }
    }
    xs.push(b);
    let mut nodes: Vec<f64> = xs.into_iter().map(f64::exp).collect();
    // exact kink locations instead of exp(ln(k))
    for k in cashflows.kinks() {
        if let Some(n) = nodes.iter_mut().find(|n| ((**n).ln() - k.ln()).abs() < 1e-12) {
            *n = k;
        }
    }
    nodes[0] = grid.h_min;
    *nodes.last_mut().unwrap() = grid.h_max;
    nodes
}

/// Solve the obstacle problem on `grid`, warm-started from a coarser grid when large.
pub fn psor_value(params: &ModelParams, cashflows: &PerpetualCashflows, grid: &GridSpec) -> Result<OracleResult> {
    params.validate()?;
    grid.validate()?;
    let coarse_n = (grid.n_points - 1) / 4 + 1;
    let init = if coarse_n >= 201 {
        let coarse = psor_value(params, cashflows, &GridSpec { n_points: coarse_n, ..*grid })?;
        Some(coarse)
    } else {
        None
    };
    solve_level(params, cashflows, grid, init.as_ref())
}

fn solve_level(
    params: &ModelParams,
    cf: &PerpetualCashflows,
    grid: &GridSpec,
    init: Option<&OracleResult>,
) -> Result<OracleResult> {
    let e = compute_exponents(params)?;
    let nodes = build_nodes(grid, cf);
    let n = nodes.len();
    let xs: Vec<f64> = nodes.iter().map(|h| h.ln()).collect();
    let f: Vec<f64> = nodes.iter().map(|&h| cf.payoff(h)).collect();
    let c: Vec<f64> = nodes.iter().map(|&h| cf.coupon(h)).collect();

    let half_s2 = 0.5 * params.sigma * params.sigma;
    let mu = params.r - params.delta - half_s2;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 1..n - 1 {
        let (dl, dr) = (xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
        let s = dl + dr;
        // -(s2/2) V_xx - mu V_x + r V on a nonuniform three-point stencil
        lower[i] = -half_s2 * 2.0 / (dl * s) + mu * dr / (dl * s);
        upper[i] = -half_s2 * 2.0 / (dr * s) - mu * dl / (dr * s);
        diag[i] = half_s2 * 2.0 / (dl * dr) - mu * (dr - dl) / (dl * dr) + params.r;
    }

    let (a0, b0) = cf.coupon.piece_at(nodes[0]);
    let left = f[0].min(a0 / params.r + b0 * nodes[0] / params.delta);
    let (a_inf, b_inf) = cf.coupon.piece_at(nodes[n - 1]);
    // beyond the grid a flat coupon leaves K + C h^-p2 as the only bounded continuation
    let tail = if b_inf == 0.0 {
        let k = a_inf / params.r;
        Some((k, (-e.p2 * (xs[n - 1] - xs[n - 2])).exp()))
    } else {
        None
    };

    let mut v: Vec<f64> = match init {
        Some(coarse) => nodes.iter().map(|&h| coarse.interpolate(h)).collect(),
        None => f.clone(),
    };
    for i in 0..n {
        v[i] = v[i].min(f[i]);
    }
    v[0] = left;
    if tail.is_none() {
        v[n - 1] = f[n - 1];
    }

    let w = grid.relaxation;
    let mut last = f64::INFINITY;
    for sweep in 1..=grid.max_sweeps {
        let mut delta_max: f64 = 0.0;
        for i in 1..n - 1 {
            let gs = (c[i] - lower[i] * v[i - 1] - upper[i] * v[i + 1]) / diag[i];
            let new = (v[i] + w * (gs - v[i])).min(f[i]);
            delta_max = delta_max.max((new - v[i]).abs());
            v[i] = new;
        }
        if let Some((k, decay)) = tail {
            let new = (k + (v[n - 2] - k) * decay).min(f[n - 1]);
            delta_max = delta_max.max((new - v[n - 1]).abs());
            v[n - 1] = new;
        }
        last = delta_max;
        if delta_max < grid.tol {
            let stop = v.iter().zip(&f).map(|(a, b)| (b - a).abs() <= grid.tol).collect();
            return Ok(OracleResult { nodes, values: v, stop, sweeps: sweep, last_update: delta_max });
        }
    }
    Err(Error::NotConverged { sweeps: grid.max_sweeps, last_update: last })
}
