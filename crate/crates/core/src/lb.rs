//! Linear beamforming: CLT moments, user outage with and without dirty paper
//! coding, exact CRB with its upper/lower/approximate surrogates, and target
//! outage.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{steering_tx, ChannelSample, LbWeights, ScenarioConfig};
use crate::moments::CltMoments;
use crate::sjb::rate_integral;
use crate::special::{gaussian_expectation, regularized_gamma_lower, GenChi2Params, MvnSampler};

/// Draw budget for integrals over the CLT Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CltSampling {
    /// Antithetic pairs; the draw count is twice this.
    pub pairs: usize,
    pub seed: u64,
}

impl Default for CltSampling {
    fn default() -> Self {
        Self { pairs: 100_000, seed: 0x15AC }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LbTargetMode {
    Upper,
    Lower,
    Approx,
}

impl LbTargetMode {
    pub const ALL: [LbTargetMode; 3] = [LbTargetMode::Lower, LbTargetMode::Approx, LbTargetMode::Upper];

    pub fn name(self) -> &'static str {
        match self {
            LbTargetMode::Upper => "upper",
            LbTargetMode::Lower => "lower",
            LbTargetMode::Approx => "approx",
        }
    }
}

/// Exact CRB and its surrogates for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrbTriple {
    pub crb: f64,
    pub ucrb: f64,
    pub lcrb: f64,
    pub acrb: f64,
}

/// (R, T, P, Q̃, U): `R + jT = aᴴh`, `P + jQ̃ = hᴴh̄`, `U = ‖h̄‖²`.
pub fn user_statistics(s: &ChannelSample) -> [f64; 5] {
    let a = steering_tx(s.theta, s.h.len());
    let rt = a.dotc(&s.h);
    let pq = s.h.dotc(&s.h_bar);
    [rt.re, rt.im, pq.re, pq.im, s.h_bar.norm_squared()]
}

/// (R̂, T̂, K̃): `R̂ + jT̂ = aᴴh̄`, `K̃ = ‖h̄‖²`.
pub fn target_statistics(s: &ChannelSample) -> [f64; 3] {
    let a = steering_tx(s.theta, s.h.len());
    let z = a.dotc(&s.h_bar);
    [z.re, z.im, s.h_bar.norm_squared()]
}

pub fn user_moments(cfg: &ScenarioConfig) -> CltMoments {
    let n = cfg.n();
    let se2 = cfg.sigma_e * cfg.sigma_e;
    let v = 1.0 + se2;
    let mean = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0, v]) * n;
    let cov = DMatrix::from_row_slice(
        5,
        5,
        &[
            0.5, 0.0, 0.0, 0.0, 0.0,
            0.0, 0.5, 0.0, 0.0, 0.0,
            0.0, 0.0, 1.0 + 0.5 * se2, 0.0, v,
            0.0, 0.0, 0.0, 0.5 * se2, 0.0,
            0.0, 0.0, v, 0.0, v * v,
        ],
    ) * n;
    CltMoments { mean, cov, labels: vec!["R", "T", "P", "Q~", "U"] }
}

pub fn target_moments(cfg: &ScenarioConfig) -> CltMoments {
    let n = cfg.n();
    let v = 1.0 + cfg.sigma_e * cfg.sigma_e;
    let mean = DVector::from_vec(vec![0.0, 0.0, v]) * n;
    let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5 * v, 0.5 * v, v * v])) * n;
    CltMoments { mean, cov, labels: vec!["R^", "T^", "K~"] }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma >= 0.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("SINR threshold must be >= 0, got {gamma}")))
    }
}

/// ξ(N, γσ_u²/|c1|²).
pub fn user_op_dpc(gamma: f64, wts: &LbWeights, cfg: &ScenarioConfig) -> Result<f64> {
    check_gamma(gamma)?;
    if cfg.sigma_e > 0.0 {
        return Err(Error::DpcUnavailable { sigma_e: cfg.sigma_e });
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    if wts.c1_sq() == 0.0 {
        return Ok(1.0);
    }
    regularized_gamma_lower(cfg.n(), gamma * cfg.sigma_u * cfg.sigma_u / wts.c1_sq())
}

/// SINR of one (R, T, P, Q̃, U) point; `+∞` where U ≤ 0, which lies outside
/// the outage region of the defining inequality.
fn gaussian_sinr(u: &DVector<f64>, wts: &LbWeights, cfg: &ScenarioConfig) -> f64 {
    if u[4] <= 0.0 {
        return f64::INFINITY;
    }
    let interference = cfg.sigma_u * cfg.sigma_u + wts.c2_sq() / cfg.n() * (u[0] * u[0] + u[1] * u[1]);
    wts.c1_sq() * (u[2] * u[2] + u[3] * u[3]) / (u[4] * interference)
}

/// No-DPC user outage for several thresholds from one set of Gaussian draws.
pub fn user_op_curve(
    gammas: &[f64],
    wts: &LbWeights,
    cfg: &ScenarioConfig,
    dpc: bool,
    sampling: CltSampling,
) -> Result<Vec<f64>> {
    for &g in gammas {
        check_gamma(g)?;
    }
    if dpc {
        return gammas.iter().map(|&g| user_op_dpc(g, wts, cfg)).collect();
    }
    let sampler = user_moments(cfg).sampler()?;
    let mut out = gaussian_expectation(&sampler, sampling.pairs, sampling.seed, gammas.len(), |u, buf| {
        let sinr = gaussian_sinr(u, wts, cfg);
        for (b, &g) in buf.iter_mut().zip(gammas) {
            *b = f64::from(u8::from(sinr < g));
        }
    });
    for (o, &g) in out.iter_mut().zip(gammas) {
        if g == 0.0 {
            *o = 0.0;
        }
    }
    Ok(out)
}

/// User outage P(SINR < γ).
pub fn user_op(gamma: f64, wts: &LbWeights, cfg: &ScenarioConfig, dpc: bool, sampling: CltSampling) -> Result<f64> {
    Ok(user_op_curve(&[gamma], wts, cfg, dpc, sampling)?[0])
}

/// No-DPC law with perfect CSI: P = U = ‖h‖², Q̃ = 0, so the outage event is
/// `|c1|²U − γσ_u² − γ|c2|²(R² + T²)/N < 0`.
pub fn user_closed_form(gamma: f64, wts: &LbWeights, cfg: &ScenarioConfig) -> Result<GenChi2Params> {
    let n = cfg.n();
    GenChi2Params::new(
        vec![-gamma * wts.c2_sq() / 2.0],
        vec![2],
        vec![0.0],
        n.sqrt() * wts.c1_sq(),
        n * wts.c1_sq() - gamma * cfg.sigma_u * cfg.sigma_u,
    )
}

pub mod printed {
    use super::*;

    /// No-DPC user law in its per-antenna printed scaling.
    pub fn user_params(gamma: f64, wts: &LbWeights, cfg: &ScenarioConfig) -> Result<GenChi2Params> {
        GenChi2Params::new(
            vec![-gamma * wts.c2_sq() / (2.0 * cfg.n())],
            vec![2],
            vec![0.0],
            wts.c1_sq(),
            -gamma * cfg.sigma_u * cfg.sigma_u,
        )
    }
}

/// θ-free CRB factors: each CRB equals `g(θ)·p_t·F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrbFactors {
    pub upper: f64,
    pub lower: f64,
    pub approx: f64,
}

impl CrbFactors {
    pub fn get(&self, mode: LbTargetMode) -> f64 {
        match mode {
            LbTargetMode::Upper => self.upper,
            LbTargetMode::Lower => self.lower,
            LbTargetMode::Approx => self.approx,
        }
    }
}

/// Surrogate factors from (|R̂ + jT̂|², K̃). The approximation is kept inside
/// [lower, upper], which it can leave when K̃ < 1 + σ_e².
pub fn crb_factors(rt2: f64, k: f64, wts: &LbWeights, cfg: &ScenarioConfig) -> CrbFactors {
    let n = cfg.n();
    let m = cfg.n_rx as f64;
    let v = 1.0 + cfg.sigma_e * cfg.sigma_e;
    let cc = wts.c1_sq() * wts.c2_sq();
    let psi = wts.c1_sq() * rt2 + wts.c2_sq() * n * k;
    let spread = n * n * (n * n - 1.0) / (m * m - 1.0);
    let upper = k / psi;
    let lower = k * psi / (psi * psi + cc * k * k * spread);
    let approx = k * psi / (psi * psi + cc * k * spread * v);
    let (lo, hi) = if lower <= upper { (lower, upper) } else { (upper, lower) };
    CrbFactors { upper, lower, approx: approx.clamp(lo, hi) }
}

/// Exact CRB and surrogates for one realization; all +∞ in the cos θ guard band.
pub fn crb(s: &ChannelSample, wts: &LbWeights, cfg: &ScenarioConfig) -> CrbTriple {
    let g = cfg.crb_scale(s.theta);
    if g.is_infinite() {
        let inf = f64::INFINITY;
        return CrbTriple { crb: inf, ucrb: inf, lcrb: inf, acrb: inf };
    }
    let n = s.h.len();
    let a = steering_tx(s.theta, n);
    let mut sum = num_complex::Complex64::new(0.0, 0.0);
    let mut dsum = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..n {
        let hh = a[i].conj() * s.h_bar[i];
        sum += hh;
        dsum += hh * ((n as f64 - (2 * i + 1) as f64) / 2.0);
    }
    let k = s.h_bar.norm_squared();
    let f = crb_factors(sum.norm_sqr(), k, wts, cfg);
    let nf = n as f64;
    let m = cfg.n_rx as f64;
    let psi = wts.c1_sq() * sum.norm_sqr() + wts.c2_sq() * nf * k;
    let exact = k * psi / (psi * psi + wts.c1_sq() * wts.c2_sq() * nf * k * 12.0 / (m * m - 1.0) * dsum.norm_sqr());
    let scale = g * cfg.power;
    CrbTriple { crb: scale * exact, ucrb: scale * f.upper, lcrb: scale * f.lower, acrb: scale * f.approx }
}

/// P(cos²θ < x) for θ ~ U[0, π].
pub(crate) fn arcsine_below(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        1.0 - 2.0 / PI * x.sqrt().acos()
    }
}

/// Target outage for each (ε, mode): the θ average is done exactly via the
/// arcsine law of cos²θ, the (R̂, T̂, K̃) average by Gaussian draws.
/// Row `i` holds `[lower, approx, upper]` for `eps[i]`.
pub fn target_op_curve(
    eps: &[f64],
    wts: &LbWeights,
    cfg: &ScenarioConfig,
    sampling: CltSampling,
) -> Result<Vec<[f64; 3]>> {
    if let Some(e) = eps.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::DomainError(format!("CRB threshold must be > 0, got {e}")));
    }
    let sampler = target_moments(cfg).sampler()?;
    let gp = cfg.crb_g0() * cfg.power;
    let flat = gaussian_expectation(&sampler, sampling.pairs, sampling.seed, 3 * eps.len(), |u, buf| {
        let f = crb_factors(u[0] * u[0] + u[1] * u[1], u[2], wts, cfg);
        for (i, &e) in eps.iter().enumerate() {
            for (j, mode) in LbTargetMode::ALL.iter().enumerate() {
                buf[3 * i + j] = arcsine_below(gp * f.get(*mode) / e);
            }
        }
    });
    Ok(flat.chunks(3).map(|c| [c[0], c[1], c[2]]).collect())
}

pub fn target_op(
    eps: f64,
    wts: &LbWeights,
    cfg: &ScenarioConfig,
    mode: LbTargetMode,
    sampling: CltSampling,
) -> Result<f64> {
    let row = target_op_curve(&[eps], wts, cfg, sampling)?[0];
    Ok(match mode {
        LbTargetMode::Lower => row[0],
        LbTargetMode::Approx => row[1],
        LbTargetMode::Upper => row[2],
    })
}

/// E_θ[min(A/cos²θ, cap)] for θ ~ U[0, π].
pub(crate) fn capped_arcsine_mean(a: f64, cap: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    if a >= cap {
        return cap;
    }
    let ts = (a / cap).sqrt().acos();
    2.0 / PI * (a * ts.tan() + cap * (FRAC_PI_2 - ts))
}

/// Truncated ergodic CRB from the approximate (ACRB) surrogate.
pub fn ecrb(wts: &LbWeights, cfg: &ScenarioConfig, cap: f64, sampling: CltSampling) -> Result<f64> {
    if !(cap >= 0.0) || cap.is_infinite() {
        return Err(Error::DomainError(format!("ECRB cap must be finite and >= 0, got {cap}")));
    }
    if cap == 0.0 {
        return Ok(0.0);
    }
    let sampler = target_moments(cfg).sampler()?;
    let gp = cfg.crb_g0() * cfg.power;
    Ok(gaussian_expectation(&sampler, sampling.pairs, sampling.seed, 1, |u, buf| {
        let f = crb_factors(u[0] * u[0] + u[1] * u[1], u[2], wts, cfg);
        buf[0] = capped_arcsine_mean(gp * f.approx, cap);
    })[0])
}

/// Ergodic rate: exact with DPC, CLT-Gaussian average of log2(1 + SINR) without.
pub fn ergodic_rate(wts: &LbWeights, cfg: &ScenarioConfig, dpc: bool, sampling: CltSampling) -> Result<f64> {
    if dpc {
        if wts.c1_sq() == 0.0 {
            return Ok(0.0);
        }
        return rate_integral(|g| user_op_dpc(g, wts, cfg));
    }
    let sampler: MvnSampler = user_moments(cfg).sampler()?;
    Ok(gaussian_expectation(&sampler, sampling.pairs, sampling.seed, 1, |u, buf| {
        let mut w = u.clone();
        w[4] = w[4].abs();
        buf[0] = gaussian_sinr(&w, wts, cfg).ln_1p() / std::f64::consts::LN_2;
    })[0])
}
