//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are
//! comma-separated. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use isac_core::lb::LbTargetMode;
use isac_core::{Complex64, ScenarioConfig};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Sjb,
    Lb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Analytic,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgodicKind {
    Rate,
    Ecrb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMetric {
    UserOp,
    TargetOp,
    ErgodicRate,
    Ecrb,
    Moments,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub scheme: SchemeKind,
    pub b1: f64,
    pub c1_sq: f64,
    pub dpc: bool,
    pub gammas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub caps: Vec<f64>,
    pub ergodic: ErgodicKind,
    pub mc_metric: McMetric,
    pub lb_mode: Option<LbTargetMode>,
    pub engine: EngineKind,
    pub samples: usize,
    pub seed: Option<u64>,
    pub grid: Option<Vec<f64>>,
    pub ts_steps: usize,
    pub out: Option<String>,
    pub emit_plots: bool,
}

pub const DEFAULT_SEED: u64 = 20240917;

impl Default for RunConfig {
    fn default() -> Self {
        let scenario = ScenarioConfig::default();
        Self {
            c1_sq: scenario.power / 2.0,
            scenario,
            scheme: SchemeKind::Sjb,
            b1: 1.0,
            dpc: true,
            gammas: vec![1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            epsilons: (0..13).map(|i| 10f64.powf(-8.0 + i as f64 / 4.0)).collect(),
            caps: vec![1e-6],
            ergodic: ErgodicKind::Rate,
            mc_metric: McMetric::UserOp,
            lb_mode: None,
            engine: EngineKind::Analytic,
            samples: 100_000,
            seed: None,
            grid: None,
            ts_steps: 21,
            out: None,
            emit_plots: false,
        }
    }
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Parses configuration text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                msg: format!("expected `key = value`, found `{body}`"),
            })?;
            let key = key.trim();
            if let Some(prev) = seen.insert(key.to_string(), line) {
                return Err(ConfigError::Field { line, field: key.into(), msg: format!("duplicate of line {prev}") });
            }
            cfg.set(key, value.trim(), line)?;
        }
        cfg.check(&seen)?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let err = |msg: String| ConfigError::Field { line, field: key.into(), msg };
        let num = |v: &str| -> Result<f64, ConfigError> {
            let v = v.trim();
            let x = match v {
                "pi" => PI,
                _ if v.starts_with("pi/") => v[3..].parse::<f64>().map(|d| PI / d).map_err(|e| err(e.to_string()))?,
                _ => v.parse::<f64>().map_err(|e| err(format!("`{v}` is not a number ({e})")))?,
            };
            if x.is_finite() {
                Ok(x)
            } else {
                Err(err(format!("`{v}` is not finite")))
            }
        };
        let list = |v: &str| -> Result<Vec<f64>, ConfigError> {
            if v.trim().is_empty() {
                return Ok(vec![]);
            }
            v.split(',').map(num).collect()
        };
        let count = |v: &str| -> Result<usize, ConfigError> {
            v.parse::<usize>().map_err(|e| err(format!("`{v}` is not a count ({e})")))
        };
        let flag = |v: &str| -> Result<bool, ConfigError> {
            match v {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(err(format!("`{v}` is not a boolean"))),
            }
        };
        let s = &mut self.scenario;
        match key {
            "n_tx" => s.n_tx = count(value)?,
            "n_rx" => s.n_rx = count(value)?,
            "frame_len" => s.frame_len = num(value)?,
            "power" => s.power = num(value)?,
            "sigma_u" => s.sigma_u = num(value)?,
            "sigma_r" => s.sigma_r = num(value)?,
            "alpha_re" => s.alpha = Complex64::new(num(value)?, s.alpha.im),
            "alpha_im" => s.alpha = Complex64::new(s.alpha.re, num(value)?),
            "sigma_e" => s.sigma_e = num(value)?,
            "phi1" => s.phi1 = num(value)?,
            "phi2" => s.phi2 = num(value)?,
            "scheme" => {
                self.scheme = match value {
                    "sjb" => SchemeKind::Sjb,
                    "lb" => SchemeKind::Lb,
                    _ => return Err(err(format!("unknown scheme `{value}` (sjb, lb)"))),
                }
            }
            "b1" => self.b1 = num(value)?,
            "c1_sq" => self.c1_sq = num(value)?,
            "dpc" => self.dpc = flag(value)?,
            "gamma" => self.gammas = list(value)?,
            "epsilon" => self.epsilons = list(value)?,
            "cap" => self.caps = list(value)?,
            "ergodic" => {
                self.ergodic = match value {
                    "rate" => ErgodicKind::Rate,
                    "ecrb" => ErgodicKind::Ecrb,
                    _ => return Err(err(format!("unknown ergodic metric `{value}` (rate, ecrb)"))),
                }
            }
            "metric" => {
                self.mc_metric = match value {
                    "user_op" => McMetric::UserOp,
                    "target_op" => McMetric::TargetOp,
                    "ergodic_rate" => McMetric::ErgodicRate,
                    "ecrb" => McMetric::Ecrb,
                    "moments" => McMetric::Moments,
                    _ => return Err(err(format!("unknown metric `{value}`"))),
                }
            }
            "lb_mode" => {
                self.lb_mode = match value {
                    "all" => None,
                    "upper" => Some(LbTargetMode::Upper),
                    "lower" => Some(LbTargetMode::Lower),
                    "approx" => Some(LbTargetMode::Approx),
                    _ => return Err(err(format!("unknown LB target mode `{value}`"))),
                }
            }
            "engine" => self.engine = parse_engine(value).map_err(err)?,
            "samples" => self.samples = count(value)?,
            "seed" => self.seed = Some(value.parse().map_err(|e| err(format!("`{value}` is not a u64 ({e})")))?),
            "grid" => self.grid = Some(list(value)?),
            "ts_steps" => self.ts_steps = count(value)?,
            "out" => self.out = Some(value.to_string()),
            "emit_plots" => self.emit_plots = flag(value)?,
            _ => return Err(err("unknown key".into())),
        }
        Ok(())
    }

    fn check(&self, seen: &BTreeMap<String, usize>) -> Result<(), ConfigError> {
        let at = |field: &str, msg: String| match seen.get(field) {
            Some(&line) => ConfigError::Field { line, field: field.into(), msg },
            None => ConfigError::Missing { field: field.into(), msg },
        };
        for (field, v) in [("gamma", &self.gammas), ("epsilon", &self.epsilons), ("cap", &self.caps)] {
            if v.is_empty() {
                return Err(at(field, "list is empty".into()));
            }
        }
        if self.gammas.iter().any(|&g| g < 0.0) {
            return Err(at("gamma", "thresholds must be >= 0".into()));
        }
        if self.epsilons.iter().any(|&e| e <= 0.0) {
            return Err(at("epsilon", "thresholds must be > 0".into()));
        }
        if self.caps.iter().any(|&c| c < 0.0) {
            return Err(at("cap", "caps must be >= 0".into()));
        }
        if let Some(g) = &self.grid {
            if g.is_empty() {
                return Err(at("grid", "list is empty".into()));
            }
            if g.windows(2).any(|w| w[0] > w[1]) {
                return Err(at("grid", "must be sorted ascending".into()));
            }
        }
        if self.b1 < 0.0 {
            return Err(at("b1", "must be >= 0".into()));
        }
        if !(0.0..=self.scenario.power).contains(&self.c1_sq) {
            return Err(at("c1_sq", format!("must lie in [0, power = {}]", self.scenario.power)));
        }
        if self.engine == EngineKind::Mc && self.samples < 1000 {
            return Err(at("samples", "Monte Carlo needs at least 1000 samples".into()));
        }
        self.scenario.validate().map_err(|e| ConfigError::Missing { field: "scenario".into(), msg: e.to_string() })
    }
}

pub fn parse_engine(v: &str) -> Result<EngineKind, String> {
    match v {
        "analytic" => Ok(EngineKind::Analytic),
        "mc" => Ok(EngineKind::Mc),
        _ => Err(format!("unknown engine `{v}` (analytic, mc)")),
    }
}
