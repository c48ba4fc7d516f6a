//! Monte Carlo over true channel realizations.

use crate::error::{Error, Result};
use crate::lb;
use crate::model::{
    lb_sinr, sample_channel, sjb_beamformer, sjb_crb, sjb_sinr, steering_tx, ChannelSample, LbWeights,
    ScenarioConfig, SjbWeights,
};
use crate::moments::{CltMoments, EmpiricalMoments};
use crate::rng::par_samples;
use crate::sjb;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    Sjb(SjbWeights),
    Lb { weights: LbWeights, dpc: bool },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    UserOp(f64),
    TargetOp(f64),
    ErgodicRate,
    Ecrb(f64),
    Moments,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Mean and standard error (sample std with n − 1) of per-draw values.
    pub fn from_values(values: &[f64], seed: u64) -> Self {
        let n = values.len();
        let nf = n as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        Self { value: mean, std_error: (var / nf).sqrt(), n_samples: n, seed }
    }
}

/// Per-antenna statistic vectors with known CLT moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticSet {
    SjbUser,
    SjbUserRtk,
    SjbTarget,
    LbUser,
    LbTarget,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheck {
    pub set: StatisticSet,
    pub empirical: EmpiricalMoments,
    pub model: CltMoments,
}

impl MomentCheck {
    pub fn max_z(&self) -> f64 {
        self.empirical.max_z(&self.model)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum McOutput {
    Estimate(McEstimate),
    Moments(Vec<MomentCheck>),
}

/// (SINR, CRB) of one realization.
pub fn realization(s: &ChannelSample, scheme: &Scheme, cfg: &ScenarioConfig) -> Result<(f64, f64)> {
    let a = steering_tx(s.theta, cfg.n_tx);
    match scheme {
        Scheme::Sjb(w) => {
            let bf = sjb_beamformer(&s.h_bar, &a, w)?;
            Ok((sjb_sinr(&s.h, &bf, cfg), sjb_crb(s.theta, &bf, cfg)))
        }
        Scheme::Lb { weights, dpc } => {
            let sinr = lb_sinr(&s.h, &s.h_bar, &a, weights, cfg, *dpc)?;
            Ok((sinr, lb::crb(s, weights, cfg).crb))
        }
    }
}

/// Per-draw (SINR, CRB) in deterministic order.
pub fn realizations(scheme: &Scheme, cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if let Scheme::Lb { dpc: true, .. } = scheme {
        if cfg.sigma_e > 0.0 {
            return Err(Error::DpcUnavailable { sigma_e: cfg.sigma_e });
        }
    }
    par_samples(n, seed, |r| realization(&sample_channel(cfg, r), scheme, cfg)).into_iter().collect()
}

fn indicator(b: bool) -> f64 {
    f64::from(u8::from(b))
}

/// User outage at several thresholds from common draws.
pub fn user_op_curve(scheme: &Scheme, gammas: &[f64], cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<Vec<McEstimate>> {
    let r = realizations(scheme, cfg, n, seed)?;
    Ok(gammas
        .iter()
        .map(|&g| McEstimate::from_values(&r.iter().map(|x| indicator(x.0 < g)).collect::<Vec<_>>(), seed))
        .collect())
}

/// Target outage at several thresholds from common draws.
pub fn target_op_curve(scheme: &Scheme, eps: &[f64], cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<Vec<McEstimate>> {
    let r = realizations(scheme, cfg, n, seed)?;
    Ok(eps
        .iter()
        .map(|&e| McEstimate::from_values(&r.iter().map(|x| indicator(x.1 > e)).collect::<Vec<_>>(), seed))
        .collect())
}

/// Per-realization CRB triples for the LB scheme.
pub fn lb_crb_samples(wts: &LbWeights, cfg: &ScenarioConfig, n: usize, seed: u64) -> Vec<lb::CrbTriple> {
    par_samples(n, seed, |r| lb::crb(&sample_channel(cfg, r), wts, cfg))
}

/// Empirical moments of one statistic set next to the CLT model.
pub fn moment_check(set: StatisticSet, scheme: &Scheme, cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<MomentCheck> {
    let (samples, model) = match (set, scheme) {
        (StatisticSet::SjbUser, Scheme::Sjb(w)) => (
            par_samples(n, seed, |r| sjb::user_statistics(&sample_channel(cfg, r), w).to_vec()),
            sjb::user_moments(w, cfg),
        ),
        (StatisticSet::SjbUserRtk, Scheme::Sjb(w)) => (
            par_samples(n, seed, |r| sjb::user_statistics_rtk(&sample_channel(cfg, r), w).to_vec()),
            sjb::user_moments_rtk(w.relative_phase(), cfg.n_tx),
        ),
        (StatisticSet::SjbTarget, Scheme::Sjb(w)) => (
            par_samples(n, seed, |r| sjb::target_statistics(&sample_channel(cfg, r), w).to_vec()),
            sjb::target_moments(w, cfg),
        ),
        (StatisticSet::LbUser, Scheme::Lb { .. }) => (
            par_samples(n, seed, |r| lb::user_statistics(&sample_channel(cfg, r)).to_vec()),
            lb::user_moments(cfg),
        ),
        (StatisticSet::LbTarget, Scheme::Lb { .. }) => (
            par_samples(n, seed, |r| lb::target_statistics(&sample_channel(cfg, r)).to_vec()),
            lb::target_moments(cfg),
        ),
        _ => return Err(Error::DomainError(format!("statistic set {set:?} does not belong to {scheme:?}"))),
    };
    Ok(MomentCheck { set, empirical: EmpiricalMoments::from_samples(&samples)?, model })
}

/// Runs one metric. `n` must be at least 1000.
pub fn mc_run(scheme: &Scheme, metric: Metric, cfg: &ScenarioConfig, n: usize, seed: u64) -> Result<McOutput> {
    cfg.validate()?;
    if n < 1000 {
        return Err(Error::DomainError(format!("need at least 1000 samples, got {n}")));
    }
    let est = |f: &dyn Fn(&(f64, f64)) -> f64| -> Result<McOutput> {
        let r = realizations(scheme, cfg, n, seed)?;
        Ok(McOutput::Estimate(McEstimate::from_values(&r.iter().map(f).collect::<Vec<_>>(), seed)))
    };
    match metric {
        Metric::UserOp(g) => est(&|x| indicator(x.0 < g)),
        Metric::TargetOp(e) => est(&|x| indicator(x.1 > e)),
        Metric::ErgodicRate => est(&|x| (1.0 + x.0).log2()),
        Metric::Ecrb(cap) => {
            if !(cap >= 0.0) {
                return Err(Error::DomainError(format!("ECRB cap must be >= 0, got {cap}")));
            }
            est(&|x| x.1.min(cap))
        }
        Metric::Moments => {
            let sets: &[StatisticSet] = match scheme {
                Scheme::Sjb(_) => &[StatisticSet::SjbUser, StatisticSet::SjbUserRtk, StatisticSet::SjbTarget],
                Scheme::Lb { .. } => &[StatisticSet::LbUser, StatisticSet::LbTarget],
            };
            let checks = sets
                .iter()
                .enumerate()
                .map(|(i, &s)| moment_check(s, scheme, cfg, n, seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>>>()?;
            Ok(McOutput::Moments(checks))
        }
    }
}
