//! Closed forms at the opportunistic operating points, where all power serves
//! one task.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lb;
use crate::mc::McEstimate;
use crate::model::ScenarioConfig;
use crate::rng::par_samples;
use crate::sjb::theta_average;
use crate::special::{quadratic_form_to_genchi2, regularized_gamma_lower, GaussianQuadraticForm, GenChi2Params};

fn gamma_arg(gamma: f64) -> Result<()> {
    if gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("SINR threshold must be >= 0, got {gamma}")))
    }
}

fn eps_arg(eps: f64) -> Result<()> {
    if eps > 0.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("CRB threshold must be > 0, got {eps}")))
    }
}

/// c = g0/N: the CRB with all power on the sensing beam is c/cos²θ.
pub fn opp_comm_crb_constant(cfg: &ScenarioConfig) -> f64 {
    cfg.crb_g0() / cfg.n()
}

/// User outage with all power on the sensing beam: the user sees
/// |aᴴh|²/N ~ Exp(1), so P = ξ(1, γσ_u²/p_t).
pub fn opp_comm_user_op(gamma: f64, cfg: &ScenarioConfig) -> Result<f64> {
    gamma_arg(gamma)?;
    regularized_gamma_lower(1.0, gamma * cfg.sigma_u * cfg.sigma_u / cfg.power)
}

/// P(c/cos²θ > ε) = 1 − (2/π)·arccos(√(c/ε)) for ε > c, else 1.
pub fn opp_comm_target_op(eps: f64, cfg: &ScenarioConfig) -> Result<f64> {
    eps_arg(eps)?;
    Ok(lb::arcsine_below(opp_comm_crb_constant(cfg) / eps))
}

/// Printed, corrected and θ-sampled values of the opportunistic-communication
/// target outage at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct OppCommTargetReport {
    pub epsilon: f64,
    pub printed: f64,
    pub corrected: f64,
    pub mc: McEstimate,
}

pub fn opp_comm_target_report(eps: f64, cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<OppCommTargetReport> {
    let corrected = opp_comm_target_op(eps, cfg)?;
    let hits = par_samples(n, seed, |r| {
        let theta = r.random::<f64>() * PI;
        f64::from(u8::from(cfg.crb_scale(theta) / cfg.n() > eps))
    });
    Ok(OppCommTargetReport {
        epsilon: eps,
        printed: printed::opp_comm_target_op(eps, cfg)?,
        corrected,
        mc: McEstimate::from_values(&hits, seed),
    })
}

/// User outage with all power on the communication beam.
///
/// Perfect CSI gives ξ(N, γσ_u²/p_t). With CSI error the event
/// `p_t(P² + Q̃²) − γσ_u²U < 0` is evaluated on the Gaussian (P, Q̃, U) marginal.
pub fn opp_sens_user_op(gamma: f64, cfg: &ScenarioConfig) -> Result<f64> {
    gamma_arg(gamma)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let g = gamma * cfg.sigma_u * cfg.sigma_u;
    if cfg.sigma_e == 0.0 {
        return regularized_gamma_lower(cfg.n(), g / cfg.power);
    }
    let m = lb::user_moments(cfg).marginal(&[2, 3, 4]);
    let q2 = DMatrix::from_diagonal(&DVector::from_vec(vec![cfg.power, cfg.power, 0.0]));
    let form = GaussianQuadraticForm::new(q2, DVector::from_vec(vec![0.0, 0.0, -g]), 0.0, m.mean, m.cov)?;
    quadratic_form_to_genchi2(&form)?.cdf(0.0)
}

/// Conditional form at `v = ε/g(θ)`: `v(R̂² + T̂²) − K̃ < 0`.
pub fn opp_sens_target_form(v: f64, cfg: &ScenarioConfig) -> Result<GaussianQuadraticForm> {
    let m = lb::target_moments(cfg);
    let q2 = DMatrix::from_diagonal(&DVector::from_vec(vec![v, v, 0.0]));
    GaussianQuadraticForm::new(q2, DVector::from_vec(vec![0.0, 0.0, -1.0]), 0.0, m.mean, m.cov)
}

/// Completed form of [`opp_sens_target_form`]: w = vN(1+σ_e²)/2 with two
/// degrees of freedom, s = √N(1+σ_e²), m = −N(1+σ_e²).
pub fn opp_sens_target_params(v: f64, cfg: &ScenarioConfig) -> Result<GenChi2Params> {
    let ve = 1.0 + cfg.sigma_e * cfg.sigma_e;
    let n = cfg.n();
    GenChi2Params::new(vec![v * n * ve / 2.0], vec![2], vec![0.0], n.sqrt() * ve, -n * ve)
}

pub fn opp_sens_target_op(eps: f64, cfg: &ScenarioConfig) -> Result<f64> {
    eps_arg(eps)?;
    let g0 = cfg.crb_g0();
    theta_average(
        |t| {
            let c = t.cos();
            if c.abs() < crate::model::COS_GUARD {
                return Ok(1.0);
            }
            opp_sens_target_params(eps * c * c / g0, cfg)?.cdf(0.0)
        },
        "opportunistic-sensing target outage",
    )
}

pub mod printed {
    use super::*;

    pub fn opp_comm_user_op(gamma: f64, cfg: &ScenarioConfig) -> Result<f64> {
        gamma_arg(gamma)?;
        regularized_gamma_lower(1.0, cfg.n() * gamma * cfg.sigma_u * cfg.sigma_u / cfg.power)
    }

    /// arccos(√(c/ε))/π for c/ε < 1, else 0.
    pub fn opp_comm_target_op(eps: f64, cfg: &ScenarioConfig) -> Result<f64> {
        eps_arg(eps)?;
        let r = opp_comm_crb_constant(cfg) / eps;
        Ok(if r < 1.0 { r.sqrt().acos() / PI } else { 0.0 })
    }

    /// Conditional opportunistic-sensing law at `v = ε/g(θ)` in its printed
    /// per-antenna scaling.
    pub fn opp_sens_target_params(v: f64, cfg: &ScenarioConfig) -> Result<GenChi2Params> {
        let ve = 1.0 + cfg.sigma_e * cfg.sigma_e;
        GenChi2Params::new(vec![ve * v / 2.0, ve * v / 2.0], vec![1, 1], vec![0.0, 0.0], ve, -ve)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LbWeights, SjbWeights};
    use crate::sjb;

    fn cfg() -> ScenarioConfig {
        ScenarioConfig::default()
    }

    #[test]
    fn opp_comm_user_is_exponential() {
        let c = cfg();
        assert_eq!(opp_comm_user_op(0.0, &c).unwrap(), 0.0);
        let v = opp_comm_user_op(7.0, &c).unwrap();
        assert!((v - (1.0 - (-7.0 / c.power).exp())).abs() < 1e-12);
        let p = printed::opp_comm_user_op(7.0, &c).unwrap();
        assert!((p - (1.0 - (-c.n() * 7.0 / c.power).exp())).abs() < 1e-12);
        for g in [1.0, 10.0, 40.0] {
            let s = sjb::user_op(g, 1e-6, &c).unwrap();
            assert!((s - opp_comm_user_op(g, &c).unwrap()).abs() < 0.01);
        }
    }

    #[test]
    fn opp_comm_target_forms() {
        let c = cfg();
        let k = opp_comm_crb_constant(&c);
        assert_eq!(printed::opp_comm_target_op(0.5 * k, &c).unwrap(), 0.0);
        assert!((printed::opp_comm_target_op(2.0 * k, &c).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(opp_comm_target_op(0.5 * k, &c).unwrap(), 1.0);
        assert!((opp_comm_target_op(2.0 * k, &c).unwrap() - 0.5).abs() < 1e-12);
        let r = opp_comm_target_report(2.0 * k, &c, 200_000, 4).unwrap();
        assert!((r.mc.value - r.corrected).abs() < 4.0 * r.mc.std_error);
        assert!((r.mc.value - r.printed).abs() > 0.2);
    }

    #[test]
    fn opp_sens_user() {
        let c = cfg();
        assert_eq!(opp_sens_user_op(0.0, &c).unwrap(), 0.0);
        let one = ScenarioConfig { n_tx: 1, frame_len: 30.0, ..cfg() };
        let v = opp_sens_user_op(4.0, &one).unwrap();
        assert!((v - (1.0 - (-4.0 / c.power).exp())).abs() < 1e-12);
        let w = LbWeights::from_power_split(c.power, &c).unwrap();
        let d = lb::user_op(30.0, &w, &c, true, lb::CltSampling::default()).unwrap();
        assert!((d - opp_sens_user_op(30.0, &c).unwrap()).abs() <= 1e-12 * d);
        let noisy = c.with_sigma_e(0.3);
        let mut last = 0.0;
        for g in [20.0, 50.0, 100.0, 200.0] {
            let p = opp_sens_user_op(g, &noisy).unwrap();
            assert!(p >= last);
            last = p;
        }
    }

    #[test]
    fn opp_sens_target_params_match_pipeline() {
        for c in [cfg(), cfg().with_sigma_e(0.4)] {
            for v in [0.2, 1.0, 2.5] {
                let form = opp_sens_target_form(v, &c).unwrap();
                let pipe = quadratic_form_to_genchi2(&form).unwrap().cdf(0.0).unwrap();
                let closed = opp_sens_target_params(v, &c).unwrap().cdf(0.0).unwrap();
                assert!((pipe - closed).abs() < 1e-6);
                assert!(printed::opp_sens_target_params(v, &c).unwrap().cdf(0.0).is_ok());
            }
        }
    }

    #[test]
    fn opp_sens_target_limits() {
        let c = cfg();
        let g0 = c.crb_g0();
        // K̃ ~ N(N, N) under the surrogate, so Φ(−√N) ≈ 5e-5 sits on K̃ < 0.
        assert!(opp_sens_target_op(1e-12 * g0, &c).unwrap() > 1.0 - 1e-4);
        for r in [0.5, 2.0, 8.0] {
            let eps = r * g0;
            let s = sjb::target_op_weights(eps, &SjbWeights::from_magnitude(1e3, &c).unwrap(), &c).unwrap();
            let o = opp_sens_target_op(eps, &c).unwrap();
            assert!((s - o).abs() < 0.01, "r={r}: {s} vs {o}");
        }
    }
}
