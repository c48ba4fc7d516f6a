//! Achievable (target outage, user outage) region, its Pareto front and the
//! time-sharing baseline.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lb::{self, CltSampling, LbTargetMode};
use crate::mc::{self, Scheme};
use crate::model::{LbWeights, ScenarioConfig, SjbWeights};
use crate::sjb;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeTag {
    Sjb,
    Lb,
    TimeSharing,
}

impl SchemeTag {
    pub fn name(self) -> &'static str {
        match self {
            SchemeTag::Sjb => "sjb",
            SchemeTag::Lb => "lb",
            SchemeTag::TimeSharing => "time_sharing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    /// |b1| for SJB, |c1|² for LB, the time fraction for time sharing.
    pub control: f64,
    pub p_target: f64,
    pub p_user: f64,
    pub scheme: SchemeTag,
    pub dpc: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScheme {
    Sjb,
    Lb { dpc: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Semi-analytic; LB draws `sampling` from its CLT Gaussian.
    Analytic { sampling: CltSampling },
    Mc { samples: usize, seed: u64 },
}

/// 25 log-spaced |b1| values on [1e-3, 1e3].
pub fn default_sjb_grid() -> Vec<f64> {
    (0..25).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 24.0)).collect()
}

/// 21 evenly spaced |c1|² values on [0, p_t].
pub fn default_lb_grid(cfg: &ScenarioConfig) -> Vec<f64> {
    (0..21).map(|i| cfg.power * i as f64 / 20.0).collect()
}

fn point(
    scheme: SweepScheme,
    gamma: f64,
    eps: f64,
    control: f64,
    cfg: &ScenarioConfig,
    engine: Engine,
) -> Result<RegionPoint> {
    let (tag, dpc) = match scheme {
        SweepScheme::Sjb => (SchemeTag::Sjb, false),
        SweepScheme::Lb { dpc } => (SchemeTag::Lb, dpc),
    };
    let (p_target, p_user) = match (scheme, engine) {
        (SweepScheme::Sjb, Engine::Analytic { .. }) => {
            let w = SjbWeights::from_magnitude(control, cfg)?;
            (sjb::target_op_weights(eps, &w, cfg)?, sjb::user_op_weights(gamma, &w, cfg)?)
        }
        (SweepScheme::Lb { dpc }, Engine::Analytic { sampling }) => {
            let w = LbWeights::from_power_split(control, cfg)?;
            (
                lb::target_op(eps, &w, cfg, LbTargetMode::Approx, sampling)?,
                lb::user_op(gamma, &w, cfg, dpc, sampling)?,
            )
        }
        (_, Engine::Mc { samples, seed }) => {
            let s = match scheme {
                SweepScheme::Sjb => Scheme::Sjb(SjbWeights::from_magnitude(control, cfg)?),
                SweepScheme::Lb { dpc } => Scheme::Lb { weights: LbWeights::from_power_split(control, cfg)?, dpc },
            };
            let r = mc::realizations(&s, cfg, samples, seed)?;
            let n = r.len() as f64;
            (
                r.iter().filter(|x| x.1 > eps).count() as f64 / n,
                r.iter().filter(|x| x.0 < gamma).count() as f64 / n,
            )
        }
    };
    Ok(RegionPoint { control, p_target, p_user, scheme: tag, dpc })
}

/// One region point per control value, in grid order.
pub fn sweep(
    scheme: SweepScheme,
    gamma: f64,
    eps: f64,
    grid: &[f64],
    cfg: &ScenarioConfig,
    engine: Engine,
) -> Result<Vec<RegionPoint>> {
    if grid.is_empty() {
        return Err(Error::DomainError("control grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::DomainError("control grid must be sorted".into()));
    }
    grid.par_iter().map(|&c| point(scheme, gamma, eps, c, cfg, engine)).collect()
}

fn dominates(q: &RegionPoint, p: &RegionPoint) -> bool {
    q.p_target <= p.p_target && q.p_user <= p.p_user && (q.p_target < p.p_target || q.p_user < p.p_user)
}

/// O(n²) reference filter.
pub fn pareto_front_brute(points: &[RegionPoint]) -> Vec<RegionPoint> {
    let mut keep: Vec<RegionPoint> = points
        .iter()
        .filter(|p| !points.iter().any(|q| dominates(q, p)))
        .copied()
        .collect();
    keep.sort_by(|a, b| a.control.total_cmp(&b.control));
    keep
}

/// Non-dominated points (both outages minimised), stably ordered by control.
pub fn pareto_front(points: &[RegionPoint]) -> Vec<RegionPoint> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .p_target
            .total_cmp(&points[b].p_target)
            .then(points[a].p_user.total_cmp(&points[b].p_user))
    });
    let mut keep = vec![false; points.len()];
    let mut best_before = f64::INFINITY;
    let mut i = 0;
    while i < idx.len() {
        let t = points[idx[i]].p_target;
        let mut j = i;
        while j < idx.len() && points[idx[j]].p_target == t {
            j += 1;
        }
        // Sorted by p_user inside the group, so the first entry is the group minimum.
        let group_min = points[idx[i]].p_user;
        for &k in &idx[i..j] {
            let u = points[k].p_user;
            keep[k] = !(best_before <= u || group_min < u);
        }
        best_before = best_before.min(group_min);
        i = j;
    }
    let mut out: Vec<(usize, RegionPoint)> =
        points.iter().enumerate().filter(|(k, _)| keep[*k]).map(|(k, p)| (k, *p)).collect();
    out.sort_by(|a, b| a.1.control.total_cmp(&b.1.control).then(a.0.cmp(&b.0)));
    out.into_iter().map(|(_, p)| p).collect()
}

/// Time sharing between the communication-only point (user outage
/// `p_u_end`, target outage 1) and the sensing-only point (user outage 1,
/// target outage `p_c_end`). Point α spends fraction α on communication.
pub fn time_sharing_line(p_u_end: f64, p_c_end: f64, steps: usize) -> Vec<RegionPoint> {
    let steps = steps.max(2);
    (0..steps)
        .map(|i| {
            let a = i as f64 / (steps - 1) as f64;
            RegionPoint {
                control: a,
                p_user: a * p_u_end + (1.0 - a),
                p_target: a + (1.0 - a) * p_c_end,
                scheme: SchemeTag::TimeSharing,
                dpc: false,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn pt(c: f64, t: f64, u: f64) -> RegionPoint {
        RegionPoint { control: c, p_target: t, p_user: u, scheme: SchemeTag::Sjb, dpc: false }
    }

    #[test]
    fn front_basics() {
        let a = pt(0.0, 0.2, 0.8);
        let b = pt(1.0, 0.8, 0.2);
        assert_eq!(pareto_front(&[a, b]).len(), 2);
        let c = pt(2.0, 0.9, 0.9);
        assert_eq!(pareto_front(&[c, a, b]), vec![a, b]);
        let d = pt(3.0, 0.2, 0.8);
        assert_eq!(pareto_front(&[a, d]).len(), 2);
    }

    #[test]
    fn front_matches_brute_force() {
        let mut rng = stream(12, 0);
        for _ in 0..50 {
            let pts: Vec<RegionPoint> = (0..100)
                .map(|i| {
                    // Coarse values force ties.
                    let t = (rng.random::<f64>() * 10.0).floor() / 10.0;
                    let u = (rng.random::<f64>() * 10.0).floor() / 10.0;
                    pt(i as f64, t, u)
                })
                .collect();
            assert_eq!(pareto_front(&pts), pareto_front_brute(&pts));
        }
    }

    #[test]
    fn time_sharing_endpoints() {
        let l = time_sharing_line(0.1, 0.3, 11);
        assert_eq!((l[0].p_user, l[0].p_target), (1.0, 0.3));
        assert_eq!((l[10].p_user, l[10].p_target), (0.1, 1.0));
        assert!((l[5].p_user - 0.55).abs() < 1e-15 && (l[5].p_target - 0.65).abs() < 1e-15);
    }

    #[test]
    fn sweep_single_point_and_errors() {
        let c = ScenarioConfig::default();
        let e = Engine::Mc { samples: 2000, seed: 1 };
        assert_eq!(sweep(SweepScheme::Sjb, 5.0, 1e-7, &[1.0], &c, e).unwrap().len(), 1);
        assert!(sweep(SweepScheme::Sjb, 5.0, 1e-7, &[], &c, e).is_err());
        assert!(sweep(SweepScheme::Sjb, 5.0, 1e-7, &[2.0, 1.0], &c, e).is_err());
    }

    #[test]
    fn engines_agree_on_sjb() {
        let c = ScenarioConfig::default();
        let eps = 4.0 * c.crb_g0() / c.n();
        let grid = [0.1, 1.0, 10.0];
        let a = sweep(SweepScheme::Sjb, 20.0, eps, &grid, &c, Engine::Analytic { sampling: CltSampling::default() }).unwrap();
        let m = sweep(SweepScheme::Sjb, 20.0, eps, &grid, &c, Engine::Mc { samples: 50_000, seed: 2 }).unwrap();
        for (x, y) in a.iter().zip(&m) {
            assert!((x.p_target - y.p_target).abs() < 0.02);
            assert!((x.p_user - y.p_user).abs() < 0.04);
        }
    }
}
