//! Cross-checks between the closed-form solvers and the numerical oracles.

use perpetual_mortgage::oracle::{mc_cashflow_value, psor_value, threshold_policy_value, GridSpec, Policy};
use perpetual_mortgage::*;

fn params(delta: f64) -> ModelParams {
    ModelParams::new(0.017825, delta, 0.1125, 0.9).unwrap()
}

fn fast_grid(n: usize) -> GridSpec {
    GridSpec { relaxation: 1.9, ..GridSpec::new(0.05, 10.0, n) }
}

#[test]
fn psor_error_shrinks_under_refinement() {
    let p = params(0.045);
    let spec = ContractSpec::frm(0.0326);
    let s = solve(&p, &spec).unwrap();
    let cf = perpetual_cashflows(&spec, &p).unwrap();
    let coarse = psor_value(&p, &cf, &fast_grid(1001)).unwrap();
    let fine = psor_value(&p, &cf, &fast_grid(4001)).unwrap();
    let (e_coarse, e_fine) = (coarse.sup_error(0.05, 10.0, |h| s.value(h)), fine.sup_error(0.05, 10.0, |h| s.value(h)));
    assert!(e_fine <= e_coarse, "{e_fine} > {e_coarse}");
    assert!(e_fine < 1e-5);
}

#[test]
fn psor_stop_set_brackets_boundaries() {
    let p = params(0.045);
    let spec = ContractSpec::frm(0.0326);
    let s = solve(&p, &spec).unwrap();
    let cf = perpetual_cashflows(&spec, &p).unwrap();
    let fd = psor_value(&p, &cf, &fast_grid(2001)).unwrap();
    let cell = |h: f64| {
        let i = fd.nodes.partition_point(|&x| x < h).clamp(1, fd.nodes.len() - 1);
        fd.nodes[i] - fd.nodes[i - 1]
    };
    let stops = fd.stop_intervals();
    assert_eq!(stops.len(), 2, "{stops:?}");
    let (h1, h2) = (s.boundaries.h1.unwrap(), s.boundaries.h2.unwrap());
    assert!((stops[0].1 - h1).abs() <= cell(h1), "{stops:?} vs {h1}");
    assert!((stops[1].0 - h2).abs() <= cell(h2), "{stops:?} vs {h2}");
}

#[test]
fn psor_finds_the_aprm_prepayment_band() {
    let p = params(0.045);
    let spec = ContractSpec::aprm(0.0326, 0.05);
    let s = solve(&p, &spec).unwrap();
    let cf = perpetual_cashflows(&spec, &p).unwrap();
    let h3 = s.boundaries.h3.unwrap();
    let fd = psor_value(&p, &cf, &GridSpec { relaxation: 1.9, ..GridSpec::new(0.05, 3.0 * h3, 2001) }).unwrap();
    let stops = fd.stop_intervals();
    assert_eq!(stops.len(), 1, "{stops:?}");
    assert!((stops[0].0 - s.boundaries.h2.unwrap()).abs() < 0.01);
    assert!((stops[0].1 - h3).abs() < 0.02);
}

#[test]
fn perturbed_frm_thresholds_never_do_better() {
    let p = params(0.045);
    let spec = ContractSpec::frm(0.0326);
    let s = solve(&p, &spec).unwrap();
    let cf = perpetual_cashflows(&spec, &p).unwrap();
    let (h1, h2) = (s.boundaries.h1.unwrap(), s.boundaries.h2.unwrap());
    let v = s.value(1.0);
    for d1 in [-0.01, 0.0, 0.01] {
        for d2 in [-0.01, 0.0, 0.01] {
            let w = threshold_policy_value(&p, &cf, Some(h1 * (1.0 + d1)), Some(h2 * (1.0 + d2)), 1.0).unwrap();
            assert!(w >= v - 1e-9, "({d1}, {d2}): {w} < {v}");
        }
    }
}

#[test]
fn perturbed_aprm_thresholds_never_do_better() {
    let p = params(0.045);
    let spec = ContractSpec::aprm(0.06, 0.05);
    let s = solve(&p, &spec).unwrap();
    let cf = perpetual_cashflows(&spec, &p).unwrap();
    let (h1, h2) = (s.boundaries.h1.unwrap(), s.boundaries.h2.unwrap());
    let v = s.value(1.0);
    for (d1, d2) in [(-0.01, 0.0), (0.01, 0.0), (0.0, -0.01), (0.0, 0.01)] {
        let w = threshold_policy_value(&p, &cf, Some(h1 * (1.0 + d1)), Some(h2 * (1.0 + d2)), 1.0).unwrap();
        assert!(w >= v - 1e-9, "({d1}, {d2}): {w} < {v}");
    }
}

#[test]
fn monte_carlo_of_optimal_policy_is_not_below_value() {
    let p = params(0.045);
    let spec = ContractSpec::frm(0.0326);
    let s = solve(&p, &spec).unwrap();
    let cf = perpetual_cashflows(&spec, &p).unwrap();
    let policy = Policy::new(s.boundaries.h1, s.boundaries.h2);
    let est = mc_cashflow_value(&p, &cf, Some(policy), 1.0, 10_000, 200.0, 5).unwrap();
    assert!(est.estimate >= s.value(1.0) - 3.0 * est.std_error, "{est:?} vs {}", s.value(1.0));
}

#[test]
fn abm_no_prepay_value_matches_simulation() {
    let p = params(0.045);
    let spec = ContractSpec::abm(0.0326);
    let np = solve_no_prepay(&p, &spec).unwrap();
    let cf = perpetual_cashflows(&spec, &p).unwrap();
    let est = mc_cashflow_value(&p, &cf, None, 1.0, 10_000, 200.0, 17).unwrap();
    let tol = (3.0 * est.std_error).max(5e-4) + est.tail_bound;
    assert!((est.estimate - np.value(1.0)).abs() <= tol, "{est:?} vs {}", np.value(1.0));
}

#[test]
fn no_default_equals_value_for_capped_contracts() {
    // with the payoff replaced by the prepayment amount, the solver's policy keeps its value
    let p = params(0.045);
    for spec in [ContractSpec::abm(0.0326), ContractSpec::abm(0.05), ContractSpec::aprm(0.047, 0.05)] {
        let s = solve(&p, &spec).unwrap();
        let cf = perpetual_cashflows(&spec, &p).unwrap();
        let no_default = cf.with_payoff(cf.prepay_amount.clone());
        let lower = s.regions.iter().find(|r| r.lo == 0.0 && r.action.is_stop()).map(|r| r.hi);
        let upper = s.regions.iter().find(|r| r.lo > 1.0 && r.action.is_stop()).map(|r| r.lo);
        let v = threshold_policy_value(&p, &no_default, lower, upper, 1.0).unwrap();
        assert!((v - s.value(1.0)).abs() < 1e-8, "{spec:?}: {v} vs {}", s.value(1.0));
        assert_eq!(default_option_value(&p, &spec, 1.0).unwrap(), 0.0);
    }
}

#[test]
fn frm_value_nondecreasing_in_rate() {
    let p = params(0.045);
    let mut prev = 0.0;
    for i in 0..40 {
        let m = 0.018 + 0.001 * i as f64;
        let v = solve_frm(&p, m).unwrap().value(1.0);
        assert!(v >= prev - 1e-12, "m = {m}");
        prev = v;
    }
}

#[test]
fn aprm_value_continuous_across_regimes() {
    for delta in [0.03, 0.045, 0.07] {
        let p = params(delta);
        let m_star = aprm_regime(&p, 0.05).unwrap().m_star;
        for (edge, alpha) in [(delta, 0.0), (delta, 0.05), (m_star, 0.0), (m_star, 0.05)] {
            let below = solve_aprm(&p, edge * (1.0 - 1e-9), alpha).unwrap().value(1.0);
            let above = solve_aprm(&p, edge * (1.0 + 1e-9), alpha).unwrap().value(1.0);
            assert!((below - above).abs() < 1e-6, "delta={delta} edge={edge} alpha={alpha}: {below} vs {above}");
        }
    }
}

#[test]
fn aprm_boundary_ordering_and_supersolution() {
    for delta in [0.03, 0.045, 0.07] {
        let p = params(delta);
        for m in [0.025, 0.0326, 0.047, 0.06, 0.08] {
            for alpha in [0.0, 0.01, 0.05, 0.3] {
                let s = solve_aprm(&p, m, alpha).unwrap();
                let b = s.boundaries;
                if let Some(h3) = b.h3 {
                    assert!(h3 > 1.0);
                    if let (Some(h1), Some(h2)) = (b.h1, b.h2) {
                        assert!(h1 < 1.0 && 1.0 < h2 && h2 < h3, "{b:?}");
                    }
                }
                for r in s.regions.iter().filter(|r| r.action == Action::Prepay) {
                    if r.lo >= 1.0 {
                        let hi = r.hi.min(1e6);
                        for h in [r.lo, 0.5 * (r.lo + hi), hi] {
                            let g = m * p.b0 - alpha * delta * h - p.r * (p.b0 - alpha);
                            assert!(g >= -1e-12, "delta={delta} m={m} alpha={alpha} h={h}: {g}");
                        }
                    } else {
                        assert!(m > delta);
                    }
                }
            }
        }
    }
}

#[test]
fn prepayment_option_negligible_at_high_benefit() {
    let p = params(0.07);
    for spec in [ContractSpec::frm(0.0326), ContractSpec::abm(0.0326), ContractSpec::aprm(0.0326, 0.05)] {
        let v = solve(&p, &spec).unwrap().value(1.0);
        let rel = 100.0 * prepay_option_value(&p, &spec, 1.0).unwrap() / v;
        assert!(rel < 0.5, "{spec:?}: {rel}%");
    }
}
