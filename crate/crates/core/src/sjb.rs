//! Subspace joint beamforming: CLT moments, outage probabilities, ergodic
//! rate and truncated ergodic CRB.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{steering_tx, ChannelSample, ScenarioConfig, SjbWeights, COS_GUARD};
use crate::moments::CltMoments;
use crate::special::{adaptive_gk, quadratic_form_to_genchi2, GaussianQuadraticForm, GenChi2Params};

/// Assembled quadratic form and its generalized chi-square law.
#[derive(Debug, Clone, PartialEq)]
pub struct SjbOpParams {
    pub form: GaussianQuadraticForm,
    pub law: GenChi2Params,
}

impl SjbOpParams {
    fn from_form(form: GaussianQuadraticForm) -> Result<Self> {
        let law = quadratic_form_to_genchi2(&form)?;
        Ok(Self { form, law })
    }

    /// P(form < 0).
    pub fn probability(&self) -> Result<f64> {
        self.law.cdf(0.0)
    }
}

/// Per-realization (X, Y, K): `X + jY = hᴴ(b1 h̄ + b2 a)`, `K = ‖b1 h̄ + b2 a‖²`.
pub fn user_statistics(s: &ChannelSample, wts: &SjbWeights) -> [f64; 3] {
    let a = steering_tx(s.theta, s.h.len());
    let v = &s.h_bar * wts.b1 + &a * wts.b2;
    let z = s.h.dotc(&v);
    [z.re, z.im, v.norm_squared()]
}

/// Per-realization (R, T, K̂, R̃) with `R + jT = aᴴh`, `K̂ = ‖h‖²`.
pub fn user_statistics_rtk(s: &ChannelSample, wts: &SjbWeights) -> [f64; 4] {
    let a = steering_tx(s.theta, s.h.len());
    let z = a.dotc(&s.h);
    let phi = wts.relative_phase();
    [z.re, z.im, s.h.norm_squared(), phi.cos() * z.re - phi.sin() * z.im]
}

/// Per-realization (X̃, Ỹ, K) with `X̃ + jỸ = b1 aᴴh̄`.
pub fn target_statistics(s: &ChannelSample, wts: &SjbWeights) -> [f64; 3] {
    let a = steering_tx(s.theta, s.h.len());
    let z = a.dotc(&s.h_bar) * wts.b1;
    let k = (&s.h_bar * wts.b1 + &a * wts.b2).norm_squared();
    [z.re, z.im, k]
}

pub fn user_moments(wts: &SjbWeights, cfg: &ScenarioConfig) -> CltMoments {
    let n = cfg.n();
    let b1 = wts.b1.norm();
    let b2s = wts.b2.norm_sqr();
    let (ka, ze) = (wts.b1.arg().cos(), wts.b1.arg().sin());
    let se2 = cfg.sigma_e * cfg.sigma_e;
    let v = 1.0 + se2;
    let b1s = b1 * b1;
    let cross = b1 * (b1s * v + b2s);
    let delta = b1s * b1s * v * v + 2.0 * b1s * b2s * v;
    let mean = DVector::from_vec(vec![b1 * ka, b1 * ze, b1s * v + b2s]) * n;
    let cov = DMatrix::from_row_slice(
        3,
        3,
        &[
            b1s * ka * ka + 0.5 * b1s * se2 + 0.5 * b2s,
            b1s * ka * ze,
            cross * ka,
            b1s * ka * ze,
            b1s * ze * ze + 0.5 * b1s * se2 + 0.5 * b2s,
            cross * ze,
            cross * ka,
            cross * ze,
            delta,
        ],
    ) * n;
    CltMoments { mean, cov, labels: vec!["X", "Y", "K"] }
}

/// Moments of (R, T, K̂, R̃) for relative phase `phi`; valid for any CSI error
/// since they involve the true channel only.
pub fn user_moments_rtk(phi: f64, n_tx: usize) -> CltMoments {
    let n = n_tx as f64;
    let (ka, ze) = (phi.cos(), phi.sin());
    let mean = DVector::from_vec(vec![0.0, 0.0, n, 0.0]);
    let cov = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.5, 0.0, 0.0, 0.5 * ka,
            0.0, 0.5, 0.0, -0.5 * ze,
            0.0, 0.0, 1.0, 0.0,
            0.5 * ka, -0.5 * ze, 0.0, 0.5,
        ],
    ) * n;
    CltMoments { mean, cov, labels: vec!["R", "T", "K^", "R~"] }
}

pub fn target_moments(wts: &SjbWeights, cfg: &ScenarioConfig) -> CltMoments {
    let n = cfg.n();
    let v = 1.0 + cfg.sigma_e * cfg.sigma_e;
    let b1v = wts.b1.norm_sqr() * v;
    let (b2r, b2i) = (wts.b2.re, wts.b2.im);
    let b2s = wts.b2.norm_sqr();
    let mean = DVector::from_vec(vec![0.0, 0.0, b2s + b1v]) * n;
    let cov = DMatrix::from_row_slice(
        3,
        3,
        &[
            0.5 * b1v, 0.0, b1v * b2r,
            0.0, 0.5 * b1v, b1v * b2i,
            b1v * b2r, b1v * b2i, b1v * b1v + 2.0 * b1v * b2s,
        ],
    ) * n;
    CltMoments { mean, cov, labels: vec!["X~", "Y~", "K"] }
}

/// Quadratic form whose negative region is the event SINR < γ.
///
/// With perfect CSI the form is written in (R, T, K̂, R̃); otherwise in (X, Y, K).
pub fn user_quadratic_form(gamma: f64, wts: &SjbWeights, cfg: &ScenarioConfig) -> Result<GaussianQuadraticForm> {
    let gp = gamma * cfg.sigma_u * cfg.sigma_u / cfg.power;
    if cfg.sigma_e == 0.0 {
        let m = user_moments_rtk(wts.relative_phase(), cfg.n_tx);
        let (b1, b2) = (wts.b1.norm(), wts.b2.norm());
        let q2 = DMatrix::from_row_slice(
            4,
            4,
            &[
                b2 * b2, 0.0, 0.0, 0.0,
                0.0, b2 * b2, 0.0, 0.0,
                0.0, 0.0, b1 * b1, b1 * b2,
                0.0, 0.0, b1 * b2, 0.0,
            ],
        );
        let q1 = DVector::from_vec(vec![0.0, 0.0, -gp * b1 * b1, -2.0 * gp * b1 * b2]);
        GaussianQuadraticForm::new(q2, q1, -gp * cfg.n() * b2 * b2, m.mean, m.cov)
    } else {
        let m = user_moments(wts, cfg);
        let q2 = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0]));
        let q1 = DVector::from_vec(vec![0.0, 0.0, -gp]);
        GaussianQuadraticForm::new(q2, q1, 0.0, m.mean, m.cov)
    }
}

pub fn user_op_params(gamma: f64, wts: &SjbWeights, cfg: &ScenarioConfig) -> Result<SjbOpParams> {
    SjbOpParams::from_form(user_quadratic_form(gamma, wts, cfg)?)
}

pub fn user_op_weights(gamma: f64, wts: &SjbWeights, cfg: &ScenarioConfig) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::DomainError(format!("SINR threshold must be >= 0, got {gamma}")));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    user_op_params(gamma, wts, cfg)?.probability()
}

/// User outage P(SINR < γ) for `b1 = |b1| e^{jφ1}`, `b2 = e^{jφ2}`.
pub fn user_op(gamma: f64, b1_mag: f64, cfg: &ScenarioConfig) -> Result<f64> {
    user_op_weights(gamma, &SjbWeights::from_magnitude(b1_mag, cfg)?, cfg)
}

/// Completed-square parameters for perfect CSI and `|b2| = 1`, derived by
/// rotating (K̂, R̃) onto the direction of the mean-shifted signal term.
pub fn user_closed_form(gamma: f64, b1_mag: f64, cfg: &ScenarioConfig) -> Result<GenChi2Params> {
    let n = cfg.n();
    let gp = gamma * cfg.sigma_u * cfg.sigma_u / cfg.power;
    let b = b1_mag;
    let var_a = n * b * b + 0.5 * n;
    let sa = var_a.sqrt();
    let a_v = n * b * (1.0 + b * b) / sa;
    let beta = (2.0 * b * n * sa - gp * a_v) / (2.0 * var_a);
    let s = gp * n * b * b / (2f64.sqrt() * sa);
    let m = b * b * n * n - var_a * beta * beta - gp * n * (1.0 + b * b);
    GenChi2Params::new(vec![var_a, 0.5 * n], vec![1, 1], vec![beta * beta, 0.0], s, m)
}

/// Quadratic form for the event CRB > ε at `v = ε/g(θ)`:
/// `v·|X̃ + jỸ + N b2|² − K < 0`.
pub fn target_quadratic_form(v: f64, wts: &SjbWeights, cfg: &ScenarioConfig) -> Result<GaussianQuadraticForm> {
    let m = target_moments(wts, cfg);
    let n = cfg.n();
    let q2 = DMatrix::from_diagonal(&DVector::from_vec(vec![v, v, 0.0]));
    let q1 = DVector::from_vec(vec![2.0 * n * v * wts.b2.re, 2.0 * n * v * wts.b2.im, -1.0]);
    GaussianQuadraticForm::new(q2, q1, v * n * n * wts.b2.norm_sqr(), m.mean, m.cov)
}

pub fn target_op_params(v: f64, wts: &SjbWeights, cfg: &ScenarioConfig) -> Result<SjbOpParams> {
    SjbOpParams::from_form(target_quadratic_form(v, wts, cfg)?)
}

/// P(CRB > ε | θ).
pub fn target_op_at(eps: f64, theta: f64, wts: &SjbWeights, cfg: &ScenarioConfig) -> Result<f64> {
    let c = theta.cos();
    if c.abs() < COS_GUARD {
        return Ok(1.0);
    }
    target_op_params(eps * c * c / cfg.crb_g0(), wts, cfg)?.probability()
}

/// Integrates a θ-conditional probability that depends on θ through cos²θ
/// only, using the symmetry about π/2.
pub(crate) fn theta_average<F>(mut f: F, what: &str) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut err = None;
    let q = adaptive_gk(
        |t| match f(t) {
            Ok(p) => p,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        0.0,
        FRAC_PI_2,
        2e-8,
        0.0,
        400,
    );
    if let Some(e) = err {
        return Err(e);
    }
    if !q.converged && q.error > 1e-6 {
        return Err(Error::NonConvergence { context: format!("{what}: θ quadrature error {:e}", q.error) });
    }
    Ok((q.value / FRAC_PI_2).clamp(0.0, 1.0))
}

pub fn target_op_weights(eps: f64, wts: &SjbWeights, cfg: &ScenarioConfig) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::DomainError(format!("CRB threshold must be > 0, got {eps}")));
    }
    theta_average(|t| target_op_at(eps, t, wts, cfg), "SJB target outage")
}

/// Target outage P(CRB(θ) > ε) averaged over θ ~ U[0, π].
pub fn target_op(eps: f64, b1_mag: f64, cfg: &ScenarioConfig) -> Result<f64> {
    target_op_weights(eps, &SjbWeights::from_magnitude(b1_mag, cfg)?, cfg)
}

/// Completed-square parameters of the conditional target form for perfect
/// CSI and `b2 = 1`, with `v = ε/g(θ)`.
pub fn target_closed_form(v: f64, b1_mag: f64, cfg: &ScenarioConfig) -> Result<GenChi2Params> {
    let n = cfg.n();
    let t = 1.0 / v;
    let b2 = b1_mag * b1_mag;
    let w = n * b2 / 2.0;
    let lambda = 2.0 * (n - t).powi(2) / (n * b2);
    let s = t * n.sqrt() * b2;
    let m = n * t - t * t - t * n * b2;
    // Scaled by v so that the form matches target_quadratic_form.
    GenChi2Params::new(vec![w * v], vec![2], vec![lambda], s * v, m * v)
}

/// ∫₀^{t_max} (1 − P_u(2^t − 1)) dt with t_max chosen from the tail.
pub fn ergodic_rate(b1_mag: f64, cfg: &ScenarioConfig) -> Result<f64> {
    if cfg.power == 0.0 {
        return Ok(0.0);
    }
    let wts = SjbWeights::from_magnitude(b1_mag, cfg)?;
    rate_integral(|g| user_op_weights(g, &wts, cfg))
}

/// `∫ (1 − P_u(2^t − 1)) dt` up to the point where the survival is below
/// 1e-6.
///
/// A CLT surrogate can leave a floor of survival mass on non-positive
/// denominators (SINR read as infinite). When the survival stops decaying
/// that floor is subtracted and the integral is truncated there.
pub(crate) fn rate_integral<F>(mut op: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut t_max: f64 = 1.0;
    let mut floor = 0.0;
    let mut prev = 1.0 - op(1.0)?;
    loop {
        let tail = 1.0 - op(2f64.powf(t_max) - 1.0)?;
        if tail < 1e-6 {
            break;
        }
        if t_max > 4.0 && (prev - tail).abs() <= 1e-3 * tail {
            floor = tail;
            break;
        }
        prev = tail;
        t_max *= 1.5;
        if t_max > 256.0 {
            return Err(Error::NonConvergence { context: "ergodic rate: outage tail does not vanish".into() });
        }
    }
    let mut err = None;
    let q = adaptive_gk(
        |t| match op(2f64.powf(t) - 1.0) {
            Ok(p) => (1.0 - p - floor).max(0.0),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        0.0,
        t_max,
        1e-7,
        1e-7,
        400,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(q.value)
}

/// E[min(CRB, cap)].
///
/// Writing CRB = g0·V/cos²θ with V independent of θ and integrating the
/// arcsine law of cos²θ in closed form leaves
/// `(4 cap/π) ∫₀¹ √(1−x²) P(V > x² cap/g0) dx`.
pub fn ecrb_weights(wts: &SjbWeights, cfg: &ScenarioConfig, cap: f64) -> Result<f64> {
    if !(cap >= 0.0) || cap.is_infinite() {
        return Err(Error::DomainError(format!("ECRB cap must be finite and >= 0, got {cap}")));
    }
    if cap == 0.0 {
        return Ok(0.0);
    }
    let scale = cap / cfg.crb_g0();
    let mut err = None;
    let q = adaptive_gk(
        |x| match target_op_params(x * x * scale, wts, cfg).and_then(|p| p.probability()) {
            Ok(p) => (1.0 - x * x).max(0.0).sqrt() * p,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        0.0,
        1.0,
        1e-9,
        1e-7,
        400,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(4.0 * cap / PI * q.value)
}

pub fn ecrb(b1_mag: f64, cfg: &ScenarioConfig, cap: f64) -> Result<f64> {
    ecrb_weights(&SjbWeights::from_magnitude(b1_mag, cfg)?, cfg, cap)
}

/// Parameter lists in the per-antenna scaling in which they were originally
/// printed. They coincide with the sampled law only for N = 1 and are kept
/// for side-by-side reporting.
pub mod printed {
    use super::*;

    pub fn user_params(gamma: f64, b1_mag: f64, cfg: &ScenarioConfig) -> Result<GenChi2Params> {
        let n = cfg.n();
        let gp = gamma * cfg.sigma_u * cfg.sigma_u / cfg.power;
        let b = b1_mag;
        let d2 = n / 2.0;
        let d4 = n / 2.0 + n * b * b;
        let a1 = -n.sqrt() * b * gp / 2.0;
        let a3 = 2.0 * b.powi(3) * n.sqrt() * gp;
        let a4 = 2.0 * b.powi(3) * n.sqrt() * (2.0 - gp) + 2.0 * b * n.sqrt() * (1.0 - gp);
        let lam = (a4 / (2.0 * d4)).powi(2);
        let m = -d4 * lam + b * b - n * gp - gp * b * b;
        GenChi2Params::new(vec![d2, d4], vec![1, 1], vec![0.0, lam], (a1 * a1 + a3 * a3).sqrt(), m)
    }

    /// Conditional target law at `v = ε/g(θ)`.
    pub fn target_params(v: f64, b1_mag: f64, cfg: &ScenarioConfig) -> Result<GenChi2Params> {
        let (b, n) = (b1_mag, cfg.n());
        let lam = 2.0 * ((n * v - 1.0) / (b * v)).powi(2);
        GenChi2Params::new(vec![b * b * v / 2.0], vec![2], vec![lam], b.powi(4), n - 1.0 / v - b * b)
    }
}
