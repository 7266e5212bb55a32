//! Market primitives and the characteristic exponents of the house-price generator.
//!
//! The house price index follows `dH/H = (r - delta) dt + sigma dW` under the pricing
//! measure. Homogeneous solutions of `L_H V - r V = 0` are `h^p1` and `h^-p2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interest rate, benefit rate, volatility and initial loan-to-value.
///
/// Rates are continuously compounded decimals per year (0.0326, not 3.26).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub r: f64,
    pub delta: f64,
    pub sigma: f64,
    pub b0: f64,
}

impl ModelParams {
    pub fn new(r: f64, delta: f64, sigma: f64, b0: f64) -> Result<Self> {
        let p = Self { r, delta, sigma, b0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.r > 0.0
            && self.delta > 0.0
            && self.sigma > 0.0
            && self.b0 > 0.0
            && self.b0 <= 1.0
            && self.r.is_finite()
            && self.delta.is_finite()
            && self.sigma.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "require r > 0, delta > 0, sigma > 0, 0 < b0 <= 1 (got {self:?})"
            )))
        }
    }

    /// Reject rates that do not exceed the risk-free rate.
    pub fn check_spread(&self, m: f64) -> Result<()> {
        if m > self.r && m.is_finite() {
            Ok(())
        } else {
            Err(Error::NegativeSpread { m, r: self.r })
        }
    }
}

/// Characteristic exponents: `p1 > 1`, `p2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub p1: f64,
    pub p2: f64,
}

impl Exponents {
    /// `(1+p2)/p2 * (p1-1)/p1`, which equals `delta / r`.
    pub fn identity_ratio(&self) -> f64 {
        (1.0 + self.p2) / self.p2 * (self.p1 - 1.0) / self.p1
    }
}

pub fn compute_exponents(params: &ModelParams) -> Result<Exponents> {
    params.validate()?;
    let s2 = params.sigma * params.sigma;
    let drift = params.r - params.delta - 0.5 * s2;
    let root = (drift * drift + 2.0 * params.r * s2).sqrt();
    // p1 * p2 = 2r / sigma^2; take the cancellation-free root directly and the other
    // one from the product.
    let (p1, p2) = if drift < 0.0 {
        let p1 = (root - drift) / s2;
        (p1, 2.0 * params.r / (root - drift))
    } else {
        let p2 = (root + drift) / s2;
        (2.0 * params.r / (root + drift), p2)
    };
    Ok(Exponents { p1, p2 })
}

/// `(sigma^2/2) p (p-1) + (r - delta) p - r`; vanishes at `p1` and `-p2`.
pub fn characteristic_residual(p: f64, params: &ModelParams) -> f64 {
    0.5 * params.sigma * params.sigma * p * (p - 1.0) + (params.r - params.delta) * p - params.r
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::numerics::{find_root_bracketed, RootConfig};
    use proptest::prelude::*;

    pub(crate) fn base(delta: f64) -> ModelParams {
        ModelParams::new(0.017825, delta, 0.1125, 0.9).unwrap()
    }

    #[test]
    fn equal_rates_give_unit_gap() {
        for sigma in [0.05, 0.1125, 0.3, 0.8] {
            let p = ModelParams::new(0.03, 0.03, sigma, 0.8).unwrap();
            let e = compute_exponents(&p).unwrap();
            assert!((e.p1 - e.p2 - 1.0).abs() < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn exponents_solve_quadratic_at_reference_params() {
        for delta in [0.045, 0.07] {
            let p = base(delta);
            let e = compute_exponents(&p).unwrap();
            assert!(e.p1 > 1.0 && e.p2 > 0.0);
            assert!((e.identity_ratio() - delta / p.r).abs() / (delta / p.r) < 1e-12);
            assert!(characteristic_residual(e.p1, &p).abs() < 1e-12);
            assert!(characteristic_residual(-e.p2, &p).abs() < 1e-12);

            // second route: bracket each root of the quadratic independently
            let q = |x: f64| characteristic_residual(x, &p);
            let p1 = find_root_bracketed(q, 1.0, 100.0, &RootConfig::default()).unwrap();
            let m2 = find_root_bracketed(q, -100.0, 0.0, &RootConfig::default()).unwrap();
            assert!((p1 - e.p1).abs() < 1e-9 * e.p1);
            assert!((-m2 - e.p2).abs() < 1e-9 * e.p2);
            // Vieta: product of the roots is -2r/sigma^2
            let s2 = p.sigma * p.sigma;
            assert!((e.p1 * e.p2 - 2.0 * p.r / s2).abs() < 1e-10 * e.p1 * e.p2);
        }
    }

    #[test]
    fn residual_at_zero_is_minus_r() {
        let p = base(0.045);
        assert_eq!(characteristic_residual(0.0, &p), -p.r);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(0.0, 0.045, 0.1, 0.9).is_err());
        assert!(ModelParams::new(0.02, 0.0, 0.1, 0.9).is_err());
        assert!(ModelParams::new(0.02, 0.045, -0.1, 0.9).is_err());
        assert!(ModelParams::new(0.02, 0.045, 0.1, 1.1).is_err());
        assert!(ModelParams::new(0.02, 0.045, 0.1, 0.0).is_err());
        let p = ModelParams { r: 0.02, delta: 0.0, sigma: 0.1, b0: 0.9 };
        assert!(compute_exponents(&p).is_err());
    }

    #[test]
    fn exponents_monotone_in_delta() {
        // raising delta lowers the quadratic at every p > 0, pushing p1 right and -p2 right
        for sigma in [0.05, 0.1125, 0.25] {
            let (mut prev1, mut prev2) = (0.0, f64::INFINITY);
            for i in 1..=200 {
                let delta = 0.001 * i as f64;
                let e = compute_exponents(&ModelParams::new(0.02, delta, sigma, 0.9).unwrap()).unwrap();
                assert!(e.p1 >= prev1 - 1e-12, "p1 decreased at delta={delta}");
                assert!(e.p2 <= prev2 + 1e-12, "p2 increased at delta={delta}");
                prev1 = e.p1;
                prev2 = e.p2;
            }
        }
    }

    proptest! {
        #[test]
        fn identity_holds(r in 0.001f64..0.15, delta in 0.001f64..0.2, sigma in 0.01f64..0.8) {
            let p = ModelParams::new(r, delta, sigma, 0.9).unwrap();
            let e = compute_exponents(&p).unwrap();
            prop_assert!(e.p1 > 1.0 && e.p2 > 0.0);
            let rel = (e.identity_ratio() - delta / r).abs() / (delta / r);
            prop_assert!(rel < 1e-10, "relative identity residual {}", rel);
        }
    }
}
