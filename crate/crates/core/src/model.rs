//! Link configuration, array responses, channel draws and per-realization
//! SINR/CRB primitives.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// Below this |cos θ| the CRB is treated as infinite.
pub const COS_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Transmit antennas N.
    pub n_tx: usize,
    /// Receive antennas M.
    pub n_rx: usize,
    /// Radar frame length L.
    pub frame_len: f64,
    /// Total transmit power p_t.
    pub power: f64,
    pub sigma_u: f64,
    pub sigma_r: f64,
    pub alpha: Complex64,
    pub sigma_e: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_tx: 15,
            n_rx: 17,
            frame_len: 30.0,
            power: 10.0,
            sigma_u: 1.0,
            sigma_r: 1.0,
            alpha: Complex64::new(1.0, 0.0),
            sigma_e: 0.0,
            phi1: PI / 3.0,
            phi2: 0.0,
        }
    }
}

impl ScenarioConfig {
    /// Checks the physical invariants. Odd `n_tx` is accepted.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n_tx < 1 {
            return bad("n_tx must be >= 1");
        }
        if self.n_rx < 2 {
            return bad("n_rx must be >= 2");
        }
        if !(self.frame_len > self.n_tx as f64) {
            return bad("frame_len must exceed n_tx");
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return bad("power must be positive");
        }
        if !(self.sigma_u > 0.0 && self.sigma_r > 0.0) {
            return bad("noise standard deviations must be positive");
        }
        if !(self.sigma_e >= 0.0 && self.sigma_e.is_finite()) {
            return bad("sigma_e must be >= 0");
        }
        if self.alpha.norm() == 0.0 || !self.alpha.norm().is_finite() {
            return bad("alpha must be nonzero");
        }
        if !(self.phi1.is_finite() && self.phi2.is_finite()) {
            return bad("phases must be finite");
        }
        Ok(())
    }

    pub fn with_sigma_e(&self, sigma_e: f64) -> Self {
        Self { sigma_e, ..self.clone() }
    }

    pub fn n(&self) -> f64 {
        self.n_tx as f64
    }

    /// θ-free part of the CRB scale: g(θ) = g0 / cos²θ.
    pub fn crb_g0(&self) -> f64 {
        let m = self.n_rx as f64;
        6.0 * self.sigma_r * self.sigma_r
            / (self.frame_len * self.power * self.alpha.norm_sqr() * (m - 1.0) * m * (m + 1.0) * PI * PI)
    }

    /// g(θ); +∞ inside the |cos θ| guard band.
    pub fn crb_scale(&self, theta: f64) -> f64 {
        let c = theta.cos();
        if c.abs() < COS_GUARD {
            f64::INFINITY
        } else {
            self.crb_g0() / (c * c)
        }
    }

    /// σ_r² / (2|α|²L).
    pub fn crb_q(&self) -> f64 {
        self.sigma_r * self.sigma_r / (2.0 * self.alpha.norm_sqr() * self.frame_len)
    }
}

/// One joint draw of the user channel, its estimation error and the target angle.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    pub h: CVector,
    pub e: CVector,
    pub h_bar: CVector,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SjbWeights {
    pub b1: Complex64,
    pub b2: Complex64,
}

impl SjbWeights {
    pub fn new(b1: Complex64, b2: Complex64) -> Result<Self> {
        if b1.norm() == 0.0 && b2.norm() == 0.0 {
            return Err(Error::DomainError("b1 and b2 cannot both be zero".into()));
        }
        Ok(Self { b1, b2 })
    }

    /// `b1 = |b1| e^{jφ1}`, `b2 = e^{jφ2}`.
    pub fn from_magnitude(b1_mag: f64, cfg: &ScenarioConfig) -> Result<Self> {
        if !(b1_mag >= 0.0 && b1_mag.is_finite()) {
            return Err(Error::DomainError(format!("|b1| must be finite and >= 0, got {b1_mag}")));
        }
        Self::new(Complex64::from_polar(b1_mag, cfg.phi1), Complex64::from_polar(1.0, cfg.phi2))
    }

    /// Phase of b1 relative to b2.
    pub fn relative_phase(&self) -> f64 {
        if self.b2.norm() == 0.0 || self.b1.norm() == 0.0 {
            0.0
        } else {
            self.b1.arg() - self.b2.arg()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbWeights {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl LbWeights {
    pub fn new(c1: Complex64, c2: Complex64, power: f64) -> Result<Self> {
        let total = c1.norm_sqr() + c2.norm_sqr();
        if (total - power).abs() > 1e-12 * power.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::DomainError(format!("|c1|^2 + |c2|^2 = {total} differs from p_t = {power}")));
        }
        Ok(Self { c1, c2 })
    }

    /// Real weights with |c1|² = `c1_sq` and the rest of the power on the radar beam.
    pub fn from_power_split(c1_sq: f64, cfg: &ScenarioConfig) -> Result<Self> {
        if !(0.0..=cfg.power).contains(&c1_sq) {
            return Err(Error::DomainError(format!("|c1|^2 = {c1_sq} outside [0, {}]", cfg.power)));
        }
        Ok(Self {
            c1: Complex64::new(c1_sq.sqrt(), 0.0),
            c2: Complex64::new((cfg.power - c1_sq).sqrt(), 0.0),
        })
    }

    pub fn c1_sq(&self) -> f64 {
        self.c1.norm_sqr()
    }

    pub fn c2_sq(&self) -> f64 {
        self.c2.norm_sqr()
    }
}

fn phase(theta: f64, n: usize, i: usize) -> f64 {
    PI * theta.sin() * (n as f64 - (2 * i + 1) as f64) / 2.0
}

/// Centro-symmetric half-wavelength ULA response.
pub fn steering_tx(theta: f64, n: usize) -> CVector {
    CVector::from_fn(n, |i, _| Complex64::from_polar(1.0, -phase(theta, n, i)))
}

pub fn steering_deriv(theta: f64, n: usize) -> CVector {
    let c = PI * theta.cos() / 2.0;
    CVector::from_fn(n, |i, _| {
        let fp = c * (n as f64 - (2 * i + 1) as f64);
        Complex64::new(0.0, -fp) * Complex64::from_polar(1.0, -phase(theta, n, i))
    })
}

/// ‖b'(θ)‖² for an M-element array.
pub fn steering_deriv_norm_sq(theta: f64, m: usize) -> f64 {
    let m = m as f64;
    PI * PI * theta.cos().powi(2) * m * (m * m - 1.0) / 12.0
}

pub fn circular_normal<R: Rng + ?Sized>(n: usize, std: f64, rng: &mut R) -> CVector {
    let s = std * std::f64::consts::FRAC_1_SQRT_2;
    CVector::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    })
}

/// Draws h, e and θ. The error vector is always drawn so that streams stay
/// aligned across σ_e values.
pub fn sample_channel<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> ChannelSample {
    let h = circular_normal(cfg.n_tx, 1.0, rng);
    let e = circular_normal(cfg.n_tx, cfg.sigma_e, rng);
    let theta = rng.random::<f64>() * PI;
    let h_bar = &h + &e;
    ChannelSample { h, e, h_bar, theta }
}

pub fn sjb_direction(h_bar: &CVector, a: &CVector, wts: &SjbWeights) -> CVector {
    h_bar * wts.b1 + a * wts.b2
}

pub fn sjb_beamformer(h_bar: &CVector, a: &CVector, wts: &SjbWeights) -> Result<CVector> {
    let v = sjb_direction(h_bar, a, wts);
    let norm = v.norm();
    if norm < 1e-300 {
        return Err(Error::ZeroDirection);
    }
    Ok(v.unscale(norm))
}

pub fn lb_covariance(h_bar: &CVector, a: &CVector, wts: &LbWeights) -> Result<CMatrix> {
    let hn = h_bar.norm();
    if hn == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let w1 = h_bar.unscale(hn);
    let w2 = a.unscale(a.norm());
    Ok(&w1 * w1.adjoint() * Complex64::from(wts.c1_sq()) + &w2 * w2.adjoint() * Complex64::from(wts.c2_sq()))
}

pub fn sjb_sinr(h: &CVector, w: &CVector, cfg: &ScenarioConfig) -> f64 {
    cfg.power * h.dotc(w).norm_sqr() / (cfg.sigma_u * cfg.sigma_u)
}

pub fn lb_sinr(
    h: &CVector,
    h_bar: &CVector,
    a: &CVector,
    wts: &LbWeights,
    cfg: &ScenarioConfig,
    dpc: bool,
) -> Result<f64> {
    let s2 = cfg.sigma_u * cfg.sigma_u;
    if dpc {
        if cfg.sigma_e > 0.0 {
            return Err(Error::DpcUnavailable { sigma_e: cfg.sigma_e });
        }
        return Ok(wts.c1_sq() * h.norm_squared() / s2);
    }
    let hn2 = h_bar.norm_squared();
    if hn2 == 0.0 {
        return Err(Error::ZeroChannel);
    }
    let signal = wts.c1_sq() * h.dotc(h_bar).norm_sqr() / hn2;
    let interference = wts.c2_sq() / cfg.n() * a.dotc(h).norm_sqr();
    Ok(signal / (s2 + interference))
}

/// Single-beam CRB g(θ)/|aᴴw|².
pub fn sjb_crb(theta: f64, w: &CVector, cfg: &ScenarioConfig) -> f64 {
    let g = cfg.crb_scale(theta);
    if g.is_infinite() {
        return f64::INFINITY;
    }
    let a = steering_tx(theta, cfg.n_tx);
    g / a.dotc(w).norm_sqr()
}

/// CRB for an arbitrary transmit covariance (trace form).
pub fn crb_from_covariance(theta: f64, rx: &CMatrix, cfg: &ScenarioConfig) -> f64 {
    if theta.cos().abs() < COS_GUARD {
        return f64::INFINITY;
    }
    let a = steering_tx(theta, cfg.n_tx);
    let da = steering_deriv(theta, cfg.n_tx);
    let ra = rx * &a;
    let rda = rx * &da;
    let ara = a.dotc(&ra).re;
    let dada = da.dotc(&rda).re;
    let arda = a.dotc(&rda).norm_sqr();
    let bd = steering_deriv_norm_sq(theta, cfg.n_rx);
    let m = cfg.n_rx as f64;
    cfg.crb_q() * ara / (bd * ara * ara + m * (ara * dada - arda))
}
