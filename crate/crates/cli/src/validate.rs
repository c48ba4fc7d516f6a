//! Acceptance suite. Each criterion returns its individual checks so the CLI
//! can write them as CSV and the test target can assert on them.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use isac_core::lb::{self, CltSampling, LbTargetMode};
use isac_core::mc::{self, Scheme, StatisticSet};
use isac_core::model::{crb_from_covariance, lb_covariance, sample_channel, steering_tx};
use isac_core::region::{self, Engine, RegionPoint, SchemeTag, SweepScheme};
use isac_core::rng::{par_samples, stream};
use isac_core::special::{quadratic_form_to_genchi2, regularized_gamma_lower, GaussianQuadraticForm, MvnSampler};
use isac_core::{boundary, sjb, Complex64, LbWeights, ScenarioConfig, SjbWeights};

use crate::csv::Table;
use crate::error::CliError;

pub const CRITERIA: std::ops::RangeInclusive<u8> = 1..=12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Monte Carlo draws per estimate; moment and KS checks use ten times this.
    pub samples: usize,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { seed: crate::config::DEFAULT_SEED, samples: 100_000 }
    }
}

impl ValidateOptions {
    fn seed_for(&self, id: u8, k: u64) -> u64 {
        self.seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(u64::from(id) * 1000 + k + 1))
    }
}

/// One compared quantity. `pass` is `measure <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub param: f64,
    pub value: f64,
    pub reference: f64,
    pub measure: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.measure <= self.tolerance
    }

    fn diff(name: impl Into<String>, param: f64, value: f64, reference: f64, tolerance: f64) -> Self {
        Self { name: name.into(), param, value, reference, measure: (value - reference).abs(), tolerance }
    }

    fn measure(name: impl Into<String>, param: f64, measure: f64, tolerance: f64) -> Self {
        Self { name: name.into(), param, value: f64::NAN, reference: f64::NAN, measure, tolerance }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass()).count()
    }

    /// Check with the largest measure/tolerance ratio.
    pub fn worst(&self) -> Option<&Check> {
        let ratio = |c: &Check| if c.tolerance > 0.0 { c.measure / c.tolerance } else if c.measure > 0.0 { f64::INFINITY } else { 0.0 };
        self.checks.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b)))
    }

    pub fn summary_line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        match self.worst() {
            Some(w) => format!(
                "{status} C{:<2} {} | {} checks, {} failed | worst {} @ {:.4e}: {:.4e} (tol {:.1e})",
                self.id,
                self.title,
                self.checks.len(),
                self.failures(),
                w.name,
                w.param,
                w.measure,
                w.tolerance
            ),
            None => format!("{status} C{:<2} {} | no checks", self.id, self.title),
        }
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "SJB user outage vs Monte Carlo",
        2 => "SJB target outage vs Monte Carlo",
        3 => "LB user outage with and without DPC",
        4 => "LB target outage bound sandwich",
        5 => "per-realization CRB ordering",
        6 => "LB CRB closed form vs trace form",
        7 => "opportunistic limits and scheme coincidence",
        8 => "generalized chi-square kernel vs sampling",
        9 => "CLT moments vs sample moments",
        10 => "region dominance and Pareto extraction",
        11 => "monotonicity suite",
        12 => "reproducibility",
        _ => "unknown",
    }
}

pub fn run_criterion(id: u8, cfg: &ScenarioConfig, opts: &ValidateOptions) -> Result<CriterionReport, CliError> {
    let start = Instant::now();
    let checks = match id {
        1 => c1_sjb_user(cfg, opts)?,
        2 => c2_sjb_target(cfg, opts)?,
        3 => c3_lb_user(cfg, opts)?,
        4 => c4_lb_sandwich(cfg, opts)?,
        5 => c5_crb_ordering(cfg, opts),
        6 => c6_crb_identity(cfg, opts)?,
        7 => c7_limits(cfg, opts)?,
        8 => c8_kernel(opts)?,
        9 => c9_moments(cfg, opts)?,
        10 => c10_region(cfg, opts)?,
        11 => c11_monotone(cfg, opts)?,
        12 => c12_reproducible(cfg, opts)?,
        _ => return Err(CliError::Config(crate::error::ConfigError::Missing { field: "criterion".into(), msg: format!("no criterion {id}") })),
    };
    Ok(CriterionReport { id, title: title(id), checks, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all(cfg: &ScenarioConfig, opts: &ValidateOptions, ids: &[u8]) -> Result<Vec<CriterionReport>, CliError> {
    ids.iter().map(|&id| run_criterion(id, cfg, opts)).collect()
}

pub fn table(reports: &[CriterionReport]) -> Table {
    let mut t = Table::new(&["criterion", "check", "param", "value", "reference", "measure", "tolerance", "pass"]);
    for r in reports {
        for c in &r.checks {
            t.push(vec![
                u64::from(r.id).into(),
                c.name.clone().into(),
                c.param.into(),
                c.value.into(),
                c.reference.into(),
                c.measure.into(),
                c.tolerance.into(),
                c.pass().into(),
            ]);
        }
    }
    t
}

/// Values at evenly spaced probabilities of an empirical distribution.
fn quantiles(mut xs: Vec<f64>, probs: &[f64]) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    probs.iter().map(|&p| xs[((p * n as f64) as usize).min(n - 1)]).collect()
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), k).into_iter().map(f64::exp).collect()
}

/// γ values at which the true-channel SINR CDF passes 0.05 … 0.95, from a
/// pilot run independent of the comparison draws.
fn gamma_grid(scheme: &Scheme, cfg: &ScenarioConfig, seed: u64) -> Result<Vec<f64>, CliError> {
    let r = mc::realizations(scheme, cfg, 20_000, seed)?;
    Ok(quantiles(r.into_iter().map(|x| x.0).collect(), &linspace(0.05, 0.95, 10)))
}

/// ε values at which the true-channel P(CRB > ε) passes `probs`.
fn eps_grid(scheme: &Scheme, cfg: &ScenarioConfig, seed: u64, probs: &[f64]) -> Result<Vec<f64>, CliError> {
    let r = mc::realizations(scheme, cfg, 20_000, seed)?;
    let below: Vec<f64> = probs.iter().map(|p| 1.0 - p).collect();
    Ok(quantiles(r.into_iter().map(|x| x.1).collect(), &below))
}

fn c1_sjb_user(cfg: &ScenarioConfig, o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let start = Instant::now();
    let cfg = cfg.with_sigma_e(0.0);
    let mut out = vec![];
    for (k, b1) in [0.2, 1.0, 2.0, 10.0].into_iter().enumerate() {
        let scheme = Scheme::Sjb(SjbWeights::from_magnitude(b1, &cfg)?);
        let gammas = gamma_grid(&scheme, &cfg, o.seed_for(1, 100 + k as u64))?;
        let est = mc::user_op_curve(&scheme, &gammas, &cfg, o.samples, o.seed_for(1, k as u64))?;
        for (g, e) in gammas.iter().zip(est) {
            out.push(Check::diff(format!("b1={b1}"), *g, sjb::user_op(*g, b1, &cfg)?, e.value, 0.02));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    eprintln!("C1 runtime {secs:.1} s");
    out.push(Check::measure("runtime_over_120s", 120.0, f64::from(u8::from(secs > 120.0)), 0.0));
    Ok(out)
}

fn c2_sjb_target(cfg: &ScenarioConfig, o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let cfg = cfg.with_sigma_e(0.0);
    let probs = logspace(0.9, 0.01, 10);
    let mut out = vec![];
    for (k, b1) in [0.2, 2.0].into_iter().enumerate() {
        let scheme = Scheme::Sjb(SjbWeights::from_magnitude(b1, &cfg)?);
        let eps = eps_grid(&scheme, &cfg, o.seed_for(2, 100 + k as u64), &probs)?;
        let est = mc::target_op_curve(&scheme, &eps, &cfg, o.samples, o.seed_for(2, k as u64))?;
        let mut tail = vec![];
        for (e, m) in eps.iter().zip(est) {
            let a = sjb::target_op(*e, b1, &cfg)?;
            out.push(Check::diff(format!("b1={b1}"), *e, a, m.value, 0.02));
            if a <= 0.3 && a > 0.0 {
                tail.push((10.0 * e.log10(), a.ln()));
            }
        }
        // Least-squares slope of ln P_c against ε in dB over the tail.
        let n = tail.len() as f64;
        let (mx, my) = (tail.iter().map(|p| p.0).sum::<f64>() / n, tail.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = if tail.len() >= 2 { sxy / sxx } else { f64::NAN };
        out.push(Check {
            name: format!("b1={b1} tail slope of ln P_c per dB"),
            param: n,
            value: slope,
            reference: 0.0,
            measure: if slope < 0.0 { 0.0 } else { 1.0 },
            tolerance: 0.0,
        });
    }
    Ok(out)
}

fn lb_c1_weights(cfg: &ScenarioConfig) -> Result<Vec<(f64, LbWeights)>, CliError> {
    [0.2f64, 2.0].iter().map(|&c1| Ok((c1, LbWeights::from_power_split(c1 * c1, cfg)?))).collect()
}

fn c3_lb_user(cfg: &ScenarioConfig, o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let cfg = cfg.with_sigma_e(0.0);
    let mut out = vec![];
    for (k, (c1, w)) in lb_c1_weights(&cfg)?.into_iter().enumerate() {
        for dpc in [true, false] {
            let scheme = Scheme::Lb { weights: w, dpc };
            let j = 10 * k as u64 + u64::from(dpc);
            let gammas = gamma_grid(&scheme, &cfg, o.seed_for(3, 100 + j))?;
            let est = mc::user_op_curve(&scheme, &gammas, &cfg, o.samples, o.seed_for(3, j))?;
            let clt = CltSampling { pairs: o.samples / 2, seed: o.seed_for(3, 200 + j) };
            let analytic = lb::user_op_curve(&gammas, &w, &cfg, dpc, clt)?;
            let (name, tol) = if dpc { ("dpc", 0.015) } else { ("no-dpc clt", 0.02) };
            for ((g, a), e) in gammas.iter().zip(analytic).zip(est) {
                out.push(Check::diff(format!("c1={c1} {name}"), *g, a, e.value, tol));
            }
        }
    }
    Ok(out)
}

fn c4_lb_sandwich(cfg: &ScenarioConfig, o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let cfg = cfg.with_sigma_e(0.0);
    let probs = logspace(0.95, 0.02, 10);
    let mut out = vec![];
    for (k, (c1, w)) in lb_c1_weights(&cfg)?.into_iter().enumerate() {
        let scheme = Scheme::Lb { weights: w, dpc: true };
        let eps = eps_grid(&scheme, &cfg, o.seed_for(4, 100 + k as u64), &probs)?;
        let est = mc::target_op_curve(&scheme, &eps, &cfg, o.samples, o.seed_for(4, k as u64))?;
        let clt = CltSampling { pairs: o.samples / 2, seed: o.seed_for(4, 200 + k as u64) };
        let rows = lb::target_op_curve(&eps, &w, &cfg, clt)?;
        for ((e, [l, a, u]), m) in eps.iter().zip(rows).zip(est) {
            let p = m.value;
            let tag = |s: &str| format!("c1={c1} {s}");
            out.push(Check { name: tag("lower<=approx"), param: *e, value: l, reference: a, measure: (l - a).max(0.0), tolerance: 0.01 });
            out.push(Check { name: tag("approx<=upper"), param: *e, value: a, reference: u, measure: (a - u).max(0.0), tolerance: 0.01 });
            out.push(Check { name: tag("mc>=lower-0.02"), param: *e, value: p, reference: l, measure: (l - p).max(0.0), tolerance: 0.02 });
            out.push(Check { name: tag("mc<=upper+0.02"), param: *e, value: p, reference: u, measure: (p - u).max(0.0), tolerance: 0.02 });
            out.push(Check::diff(tag("|approx-mc|"), *e, a, p, 0.03));
        }
    }
    Ok(out)
}

fn c5_crb_ordering(cfg: &ScenarioConfig, o: &ValidateOptions) -> Vec<Check> {
    let mut out = vec![];
    for (k, c1_sq) in [0.04, 4.0, cfg.power / 2.0, cfg.power].into_iter().enumerate() {
        for sigma_e in [0.0, 0.3] {
            let c = cfg.with_sigma_e(sigma_e);
            let Ok(w) = LbWeights::from_power_split(c1_sq, &c) else { continue };
            let t = mc::lb_crb_samples(&w, &c, o.samples, o.seed_for(5, 2 * k as u64 + u64::from(sigma_e > 0.0)));
            let slack = 1.0 + 1e-12;
            let bad = t
                .iter()
                .filter(|x| x.crb.is_finite() && (x.lcrb > x.crb * slack || x.crb > x.ucrb * slack))
                .count();
            out.push(Check::measure(format!("|c1|^2={c1_sq} sigma_e={sigma_e} violations"), t.len() as f64, bad as f64, 0.0));
        }
    }
    out
}

fn c6_crb_identity(cfg: &ScenarioConfig, o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let mut out = vec![];
    let n = (o.samples / 10).max(1000);
    for (k, (c1_sq, sigma_e)) in [(0.04, 0.0), (4.0, 0.0), (7.5, 0.2), (1.0, 0.5)].into_iter().enumerate() {
        let c = cfg.with_sigma_e(sigma_e);
        let w = LbWeights::from_power_split(c1_sq, &c)?;
        let rel = par_samples(n, o.seed_for(6, k as u64), |r| {
            let s = sample_channel(&c, r);
            let a = steering_tx(s.theta, c.n_tx);
            let closed = lb::crb(&s, &w, &c).crb;
            let trace = lb_covariance(&s.h_bar, &a, &w).map(|rx| crb_from_covariance(s.theta, &rx, &c));
            match trace {
                Ok(t) if t.is_finite() && closed.is_finite() => (closed - t).abs() / t.abs(),
                Ok(t) if t.is_infinite() && closed.is_infinite() => 0.0,
                _ => f64::INFINITY,
            }
        });
        let worst = rel.iter().cloned().fold(0.0, f64::max);
        out.push(Check::measure(format!("|c1|^2={c1_sq} sigma_e={sigma_e} max relative difference"), n as f64, worst, 1e-8));
    }
    Ok(out)
}

/// γ with ξ(N, γσ²/p_t) = p, by bisection.
fn gamma_for_xi(p: f64, cfg: &ScenarioConfig) -> Result<f64, CliError> {
    let scale = cfg.sigma_u * cfg.sigma_u / cfg.power;
    let (mut lo, mut hi) = (0.0, 1.0);
    while regularized_gamma_lower(cfg.n(), hi * scale)? < p {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if regularized_gamma_lower(cfg.n(), mid * scale)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn c7_limits(cfg: &ScenarioConfig, _o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let cfg = cfg.with_sigma_e(0.0);
    let mut out = vec![];
    let g0 = cfg.crb_g0();
    let big = 1e3;
    let full = LbWeights::from_power_split(cfg.power, &cfg)?;
    let tiny = LbWeights::from_power_split(1e-6 * cfg.power, &cfg)?;
    let clt = CltSampling::default();
    for p in linspace(0.05, 0.95, 10) {
        let g = gamma_for_xi(p, &cfg)?;
        let s = sjb::user_op(g, big, &cfg)?;
        out.push(Check::diff("sjb user b1=1e3 vs opportunistic sensing", g, s, boundary::opp_sens_user_op(g, &cfg)?, 0.01));
        out.push(Check::diff("sjb vs lb user at opportunistic sensing", g, s, lb::user_op(g, &full, &cfg, true, clt)?, 0.01));
    }
    let sens_eps: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0].iter().map(|r| r * g0).collect();
    let lb_full = lb::target_op_curve(&sens_eps, &full, &cfg, clt)?;
    for (e, row) in sens_eps.iter().zip(lb_full) {
        let s = sjb::target_op(*e, big, &cfg)?;
        out.push(Check::diff("sjb target b1=1e3 vs opportunistic sensing", *e, s, boundary::opp_sens_target_op(*e, &cfg)?, 0.01));
        out.push(Check::diff("sjb vs lb target at opportunistic sensing", *e, s, row[1], 0.01));
    }
    let comm_eps: Vec<f64> = [1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0].iter().map(|r| r * g0 / cfg.n()).collect();
    let lb_tiny = lb::target_op_curve(&comm_eps, &tiny, &cfg, clt)?;
    for (e, row) in comm_eps.iter().zip(lb_tiny) {
        let s = sjb::target_op(*e, 1e-6, &cfg)?;
        out.push(Check::diff("sjb target b1=1e-6 vs opportunistic communication", *e, s, boundary::opp_comm_target_op(*e, &cfg)?, 0.01));
        out.push(Check::diff("sjb vs lb target at opportunistic communication", *e, s, row[1], 0.01));
    }
    Ok(out)
}

fn random_form<R: Rng>(rng: &mut R, i: usize) -> Result<GaussianQuadraticForm, CliError> {
    let d = 2 + i % 4;
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let b = DMatrix::from_fn(d, d, |_, _| normal());
    let q2 = (&b + b.transpose()) * 0.5;
    let q1 = DVector::from_fn(d, |_, _| normal());
    let q0 = normal();
    let mean = DVector::from_fn(d, |_, _| normal());
    // Every fifth instance has a rank-deficient covariance.
    let cols = if i.is_multiple_of(5) { d - 1 } else { d };
    let a = DMatrix::from_fn(d, cols, |_, _| normal());
    let cov = &a * a.transpose() / d as f64;
    let cov = (&cov + cov.transpose()) * 0.5;
    Ok(GaussianQuadraticForm::new(q2, q1, q0, mean, cov)?)
}

fn c8_kernel(o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let draws = 10 * o.samples;
    let mut rng = stream(o.seed_for(8, 0), 0);
    let mut out = vec![];
    for i in 0..20 {
        let form = random_form(&mut rng, i)?;
        let law = quadratic_form_to_genchi2(&form)?;
        let sampler = MvnSampler::new(form.mean.clone(), form.cov.clone())?;
        let mut xs = par_samples(draws, o.seed_for(8, 1 + i as u64), |r| form.eval(&sampler.sample(r)));
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let mut ks: f64 = 0.0;
        let mut drop: f64 = 0.0;
        let mut last = 0.0;
        for k in 0..=400 {
            let idx = ((k as f64 / 400.0) * (n - 1.0)) as usize;
            let f = law.cdf(xs[idx])?;
            ks = ks.max((f - (idx + 1) as f64 / n).abs()).max((f - idx as f64 / n).abs());
            drop = drop.max(last - f);
            last = f;
        }
        let dims = form.dim() as f64;
        out.push(Check::measure(format!("instance {i} KS"), dims, ks, 0.01));
        out.push(Check::measure(format!("instance {i} largest CDF decrease"), dims, drop.max(0.0), 1e-9));
    }
    Ok(out)
}

fn c9_moments(cfg: &ScenarioConfig, o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let draws = 10 * o.samples;
    let mut rng = stream(o.seed_for(9, 0), 0);
    let mut out = vec![];
    let mut push = |label: String, chk: mc::MomentCheck| {
        out.push(Check::measure(format!("{label} {:?} max |z|", chk.set), chk.empirical.n as f64, chk.max_z(), 3.0));
    };
    for i in 0..10u64 {
        let b1 = Complex64::from_polar(10f64.powf(rng.random_range(-1.0..1.0)), rng.random_range(0.0..std::f64::consts::TAU));
        let b2 = Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
        let sigma_e = if i % 2 == 0 { 0.0 } else { rng.random_range(0.05..0.5) };
        let c = cfg.with_sigma_e(sigma_e);
        let scheme = Scheme::Sjb(SjbWeights::new(b1, b2)?);
        let label = format!("sjb |b1|={:.3} |b2|={:.3} sigma_e={sigma_e:.3}", b1.norm(), b2.norm());
        let mut sets = vec![StatisticSet::SjbUser, StatisticSet::SjbTarget];
        if sigma_e == 0.0 {
            sets.push(StatisticSet::SjbUserRtk);
        }
        for (j, set) in sets.into_iter().enumerate() {
            push(label.clone(), mc::moment_check(set, &scheme, &c, draws, o.seed_for(9, 10 * i + j as u64 + 1))?);
        }
    }
    for i in 0..10u64 {
        let c1_sq = rng.random_range(0.0..cfg.power);
        let sigma_e = if i % 2 == 0 { 0.0 } else { rng.random_range(0.05..0.5) };
        let c = cfg.with_sigma_e(sigma_e);
        let scheme = Scheme::Lb { weights: LbWeights::from_power_split(c1_sq, &c)?, dpc: false };
        let label = format!("lb |c1|^2={c1_sq:.3} sigma_e={sigma_e:.3}");
        for (j, set) in [StatisticSet::LbUser, StatisticSet::LbTarget].into_iter().enumerate() {
            push(label.clone(), mc::moment_check(set, &scheme, &c, draws, o.seed_for(9, 500 + 10 * i + j as u64))?);
        }
    }
    Ok(out)
}

fn c10_region(cfg: &ScenarioConfig, o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let cfg = cfg.with_sigma_e(0.0);
    let (gamma, eps) = (20.0, 1e-7);
    let pts = region::sweep(
        SweepScheme::Sjb,
        gamma,
        eps,
        &region::default_sjb_grid(),
        &cfg,
        Engine::Analytic { sampling: CltSampling::default() },
    )?;
    let ts = region::time_sharing_line(boundary::opp_sens_user_op(gamma, &cfg)?, boundary::opp_comm_target_op(eps, &cfg)?, 21);
    let mut out = vec![];
    for t in &ts {
        let gap = pts
            .iter()
            .map(|p| (p.p_target - t.p_target).max(p.p_user - t.p_user))
            .fold(f64::INFINITY, f64::min);
        out.push(Check::measure("time-sharing point dominated by SJB sweep", t.control, gap.max(0.0), 0.02));
    }
    let same = |a: &[RegionPoint]| f64::from(u8::from(region::pareto_front(a) != region::pareto_front_brute(a)));
    out.push(Check::measure("pareto front of SJB sweep equals brute force", pts.len() as f64, same(&pts), 0.0));
    let mut rng = stream(o.seed_for(10, 0), 0);
    for k in 0..20 {
        let pts: Vec<RegionPoint> = (0..100)
            .map(|i| {
                RegionPoint { control: i as f64, p_target: coarse(&mut rng), p_user: coarse(&mut rng), scheme: SchemeTag::Sjb, dpc: false }
            })
            .collect();
        out.push(Check::measure("pareto front of random points equals brute force", k as f64, same(&pts), 0.0));
    }
    Ok(out)
}

/// Uniform on a 12-level lattice so that ties are frequent.
fn coarse<R: Rng>(r: &mut R) -> f64 {
    (r.random::<f64>() * 12.0).floor() / 12.0
}

/// Largest increase along a sequence that should be nonincreasing.
fn rise(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn c11_monotone(cfg: &ScenarioConfig, o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let cfg = cfg.with_sigma_e(0.0);
    let gammas = logspace(0.1, 1000.0, 25);
    let eps = logspace(1e-9, 1e-5, 25);
    let clt = CltSampling { pairs: o.samples / 2, seed: o.seed_for(11, 0) };
    let mut out = vec![];
    let neg = |v: Vec<f64>| v.into_iter().map(|x| -x).collect::<Vec<_>>();
    for b1 in [0.2, 1.0, 2.0, 10.0] {
        let pu = gammas.iter().map(|&g| sjb::user_op(g, b1, &cfg)).collect::<Result<Vec<_>, _>>()?;
        out.push(Check::measure(format!("sjb b1={b1} P_u nondecreasing in gamma"), b1, rise(&neg(pu)), 1e-6));
        let pc = eps.iter().map(|&e| sjb::target_op(e, b1, &cfg)).collect::<Result<Vec<_>, _>>()?;
        out.push(Check::measure(format!("sjb b1={b1} P_c nonincreasing in epsilon"), b1, rise(&pc), 1e-6));
    }
    for c1 in [0.2, 2.0, 3.0] {
        let w = LbWeights::from_power_split(c1 * c1, &cfg)?;
        for dpc in [true, false] {
            let pu = lb::user_op_curve(&gammas, &w, &cfg, dpc, clt)?;
            out.push(Check::measure(format!("lb c1={c1} dpc={dpc} P_u nondecreasing in gamma"), c1, rise(&neg(pu)), 1e-9));
        }
        let rows = lb::target_op_curve(&eps, &w, &cfg, clt)?;
        for (j, mode) in LbTargetMode::ALL.iter().enumerate() {
            let pc: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            out.push(Check::measure(format!("lb c1={c1} {} P_c nonincreasing in epsilon", mode.name()), c1, rise(&pc), 1e-9));
        }
        let mc_scheme = Scheme::Lb { weights: w, dpc: true };
        let mu = mc::user_op_curve(&mc_scheme, &gammas, &cfg, o.samples / 10, o.seed_for(11, 1))?;
        out.push(Check::measure(format!("lb c1={c1} Monte Carlo P_u nondecreasing in gamma"), c1, rise(&neg(mu.iter().map(|e| e.value).collect())), 0.0));
    }
    let analytic = Engine::Analytic { sampling: clt };
    for (gamma, e) in [(20.0, 1e-7), (50.0, 3e-7)] {
        let s = region::sweep(SweepScheme::Sjb, gamma, e, &region::default_sjb_grid(), &cfg, analytic)?;
        let pu: Vec<f64> = s.iter().map(|p| p.p_user).collect();
        let pc: Vec<f64> = s.iter().map(|p| p.p_target).collect();
        out.push(Check::measure("sjb P_u nonincreasing along |b1|", gamma, rise(&pu), 0.01));
        out.push(Check::measure("sjb P_c nondecreasing along |b1|", gamma, rise(&neg(pc)), 0.01));
        for dpc in [true, false] {
            let s = region::sweep(SweepScheme::Lb { dpc }, gamma, e, &region::default_lb_grid(&cfg), &cfg, analytic)?;
            let pu: Vec<f64> = s.iter().map(|p| p.p_user).collect();
            let pc: Vec<f64> = s.iter().map(|p| p.p_target).collect();
            out.push(Check::measure(format!("lb dpc={dpc} P_u nonincreasing along |c1|^2"), gamma, rise(&pu), 0.01));
            out.push(Check::measure(format!("lb dpc={dpc} P_c nondecreasing along |c1|^2"), gamma, rise(&neg(pc)), 0.01));
        }
    }
    Ok(out)
}

/// In-process reproducibility: two runs of a reduced suite render identical
/// CSV bytes. The binary-level check lives in the acceptance tests.
fn c12_reproducible(cfg: &ScenarioConfig, o: &ValidateOptions) -> Result<Vec<Check>, CliError> {
    let small = ValidateOptions { seed: o.seed, samples: 2000 };
    let render = || -> Result<String, CliError> { Ok(table(&run_all(cfg, &small, &[5, 6, 8])?).render()) };
    let (a, b) = (render()?, render()?);
    Ok(vec![Check::measure("reduced suite CSV byte-identical across runs", a.len() as f64, f64::from(u8::from(a != b)), 0.0)])
}
