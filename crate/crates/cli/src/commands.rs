//! Subcommand bodies. Each returns a table plus the plot recipe for it.

use isac_core::lb::{self, CltSampling, LbTargetMode};
use isac_core::mc::{self, McOutput, Metric, Scheme};
use isac_core::region::{self, Engine, SweepScheme};
use isac_core::{boundary, sjb, LbWeights, SjbWeights};

use crate::config::{EngineKind, ErgodicKind, McMetric, RunConfig, SchemeKind};
use crate::csv::Table;
use crate::error::CliError;
use crate::plot::PlotSpec;

type Out = Result<(Table, PlotSpec), CliError>;

fn sampling(cfg: &RunConfig) -> CltSampling {
    CltSampling { pairs: (cfg.samples / 2).max(1), seed: cfg.seed() }
}

fn scheme(cfg: &RunConfig) -> Result<Scheme, CliError> {
    Ok(match cfg.scheme {
        SchemeKind::Sjb => Scheme::Sjb(SjbWeights::from_magnitude(cfg.b1, &cfg.scenario)?),
        SchemeKind::Lb => Scheme::Lb { weights: lb_weights(cfg)?, dpc: cfg.dpc },
    })
}

fn lb_weights(cfg: &RunConfig) -> Result<LbWeights, CliError> {
    Ok(LbWeights::from_power_split(cfg.c1_sq, &cfg.scenario)?)
}

fn mc_table(header: &[&str], xs: &[f64], est: &[mc::McEstimate]) -> Table {
    let mut t = Table::new(header);
    for (x, e) in xs.iter().zip(est) {
        t.push(vec![(*x).into(), e.value.into(), e.std_error.into()]);
    }
    t
}

pub fn op_user(cfg: &RunConfig) -> Out {
    let s = &cfg.scenario;
    let table = match (cfg.engine, cfg.scheme) {
        (EngineKind::Mc, _) => {
            let est = mc::user_op_curve(&scheme(cfg)?, &cfg.gammas, s, cfg.samples, cfg.seed())?;
            mc_table(&["gamma", "p_user", "std_error"], &cfg.gammas, &est)
        }
        (EngineKind::Analytic, SchemeKind::Sjb) => {
            let mut t = Table::new(&["gamma", "p_user"]);
            for &g in &cfg.gammas {
                t.push(vec![g.into(), sjb::user_op(g, cfg.b1, s)?.into()]);
            }
            t
        }
        (EngineKind::Analytic, SchemeKind::Lb) => {
            let p = lb::user_op_curve(&cfg.gammas, &lb_weights(cfg)?, s, cfg.dpc, sampling(cfg))?;
            let mut t = Table::new(&["gamma", "p_user"]);
            for (g, v) in cfg.gammas.iter().zip(p) {
                t.push(vec![(*g).into(), v.into()]);
            }
            t
        }
    };
    Ok((table, PlotSpec::lines("SINR threshold gamma", "user outage", true, false)))
}

pub fn op_target(cfg: &RunConfig) -> Out {
    let s = &cfg.scenario;
    let table = match (cfg.engine, cfg.scheme) {
        (EngineKind::Mc, _) => {
            let est = mc::target_op_curve(&scheme(cfg)?, &cfg.epsilons, s, cfg.samples, cfg.seed())?;
            mc_table(&["epsilon", "p_target", "std_error"], &cfg.epsilons, &est)
        }
        (EngineKind::Analytic, SchemeKind::Sjb) => {
            let mut t = Table::new(&["epsilon", "p_target"]);
            for &e in &cfg.epsilons {
                t.push(vec![e.into(), sjb::target_op(e, cfg.b1, s)?.into()]);
            }
            t
        }
        (EngineKind::Analytic, SchemeKind::Lb) => {
            let rows = lb::target_op_curve(&cfg.epsilons, &lb_weights(cfg)?, s, sampling(cfg))?;
            match cfg.lb_mode {
                None => {
                    let mut t = Table::new(&["epsilon", "p_target_lower", "p_target_approx", "p_target_upper"]);
                    for (e, r) in cfg.epsilons.iter().zip(rows) {
                        t.push(vec![(*e).into(), r[0].into(), r[1].into(), r[2].into()]);
                    }
                    t
                }
                Some(mode) => {
                    let j = LbTargetMode::ALL.iter().position(|m| *m == mode).unwrap_or(1);
                    let mut t = Table::new(&["epsilon", "p_target"]);
                    for (e, r) in cfg.epsilons.iter().zip(rows) {
                        t.push(vec![(*e).into(), r[j].into()]);
                    }
                    t
                }
            }
        }
    };
    Ok((table, PlotSpec::lines("CRB threshold epsilon", "target outage", true, true)))
}

pub fn ergodic(cfg: &RunConfig) -> Out {
    let s = &cfg.scenario;
    let mc_est = |m: Metric| -> Result<mc::McEstimate, CliError> {
        match mc::mc_run(&scheme(cfg)?, m, s, cfg.samples, cfg.seed())? {
            McOutput::Estimate(e) => Ok(e),
            McOutput::Moments(_) => unreachable!("scalar metric"),
        }
    };
    let table = match cfg.ergodic {
        ErgodicKind::Rate => match cfg.engine {
            EngineKind::Mc => {
                let e = mc_est(Metric::ErgodicRate)?;
                let mut t = Table::new(&["rate", "std_error"]);
                t.push(vec![e.value.into(), e.std_error.into()]);
                t
            }
            EngineKind::Analytic => {
                let r = match cfg.scheme {
                    SchemeKind::Sjb => sjb::ergodic_rate(cfg.b1, s)?,
                    SchemeKind::Lb => lb::ergodic_rate(&lb_weights(cfg)?, s, cfg.dpc, sampling(cfg))?,
                };
                let mut t = Table::new(&["rate"]);
                t.push(vec![r.into()]);
                t
            }
        },
        ErgodicKind::Ecrb => match cfg.engine {
            EngineKind::Mc => {
                let mut t = Table::new(&["cap", "ecrb", "std_error"]);
                for &c in &cfg.caps {
                    let e = mc_est(Metric::Ecrb(c))?;
                    t.push(vec![c.into(), e.value.into(), e.std_error.into()]);
                }
                t
            }
            EngineKind::Analytic => {
                let mut t = Table::new(&["cap", "ecrb"]);
                for &c in &cfg.caps {
                    let v = match cfg.scheme {
                        SchemeKind::Sjb => sjb::ecrb(cfg.b1, s, c)?,
                        SchemeKind::Lb => lb::ecrb(&lb_weights(cfg)?, s, c, sampling(cfg))?,
                    };
                    t.push(vec![c.into(), v.into()]);
                }
                t
            }
        },
    };
    Ok((table, PlotSpec::lines("cap", "value", true, true)))
}

/// Swept region points (with a Pareto flag over the swept points) followed by
/// the time-sharing rows between the two single-task endpoints.
pub fn region(cfg: &RunConfig) -> Out {
    let s = &cfg.scenario;
    let (sweep_scheme, default_grid) = match cfg.scheme {
        SchemeKind::Sjb => (SweepScheme::Sjb, region::default_sjb_grid()),
        SchemeKind::Lb => (SweepScheme::Lb { dpc: cfg.dpc }, region::default_lb_grid(s)),
    };
    let grid = cfg.grid.clone().unwrap_or(default_grid);
    let engine = match cfg.engine {
        EngineKind::Analytic => Engine::Analytic { sampling: sampling(cfg) },
        EngineKind::Mc => Engine::Mc { samples: cfg.samples, seed: cfg.seed() },
    };
    let (gamma, eps) = (cfg.gammas[0], cfg.epsilons[0]);
    let pts = region::sweep(sweep_scheme, gamma, eps, &grid, s, engine)?;
    let front = region::pareto_front(&pts);
    let ts = region::time_sharing_line(
        boundary::opp_sens_user_op(gamma, s)?,
        boundary::opp_comm_target_op(eps, s)?,
        cfg.ts_steps,
    );
    let mut t = Table::new(&["scheme", "control", "p_target", "p_user", "dpc", "pareto"]);
    for p in pts.iter().chain(&ts) {
        let on_front = p.scheme != isac_core::SchemeTag::TimeSharing && front.contains(p);
        t.push(vec![p.scheme.name().into(), p.control.into(), p.p_target.into(), p.p_user.into(), p.dpc.into(), on_front.into()]);
    }
    Ok((t, PlotSpec::region()))
}

pub fn mc_cmd(cfg: &RunConfig) -> Out {
    let s = &cfg.scenario;
    let sch = scheme(cfg)?;
    let (n, seed) = (cfg.samples, cfg.seed());
    let mut t = Table::new(&["metric", "threshold", "value", "std_error", "n_samples", "seed"]);
    let mut push = |name: &str, x: f64, m: Metric| -> Result<(), CliError> {
        if let McOutput::Estimate(e) = mc::mc_run(&sch, m, s, n, seed)? {
            t.push(vec![name.into(), x.into(), e.value.into(), e.std_error.into(), e.n_samples.into(), e.seed.into()]);
        }
        Ok(())
    };
    match cfg.mc_metric {
        McMetric::UserOp => {
            let est = mc::user_op_curve(&sch, &cfg.gammas, s, n, seed)?;
            for (g, e) in cfg.gammas.iter().zip(est) {
                t.push(vec!["user_op".into(), (*g).into(), e.value.into(), e.std_error.into(), e.n_samples.into(), e.seed.into()]);
            }
        }
        McMetric::TargetOp => {
            let est = mc::target_op_curve(&sch, &cfg.epsilons, s, n, seed)?;
            for (x, e) in cfg.epsilons.iter().zip(est) {
                t.push(vec!["target_op".into(), (*x).into(), e.value.into(), e.std_error.into(), e.n_samples.into(), e.seed.into()]);
            }
        }
        McMetric::ErgodicRate => push("ergodic_rate", f64::NAN, Metric::ErgodicRate)?,
        McMetric::Ecrb => {
            for &c in &cfg.caps {
                push("ecrb", c, Metric::Ecrb(c))?;
            }
        }
        McMetric::Moments => {
            let McOutput::Moments(checks) = mc::mc_run(&sch, Metric::Moments, s, n, seed)? else {
                unreachable!("moments metric")
            };
            let mut m = Table::new(&["set", "kind", "row", "col", "empirical", "model", "std_error", "z"]);
            for c in &checks {
                let set = format!("{:?}", c.set);
                let (e, model) = (&c.empirical, &c.model);
                let z = |d: f64, se: f64| if se > 0.0 { d.abs() / se } else { 0.0 };
                for i in 0..model.dim() {
                    let d = e.mean[i] - model.mean[i];
                    m.push(vec![set.clone().into(), "mean".into(), i.into(), i.into(), e.mean[i].into(), model.mean[i].into(), e.mean_se[i].into(), z(d, e.mean_se[i]).into()]);
                }
                for i in 0..model.dim() {
                    for j in i..model.dim() {
                        let d = e.cov[(i, j)] - model.cov[(i, j)];
                        m.push(vec![set.clone().into(), "cov".into(), i.into(), j.into(), e.cov[(i, j)].into(), model.cov[(i, j)].into(), e.cov_se[(i, j)].into(), z(d, e.cov_se[(i, j)]).into()]);
                    }
                }
            }
            return Ok((m, PlotSpec::None));
        }
    }
    Ok((t, PlotSpec::lines("threshold", "estimate", true, false)))
}
