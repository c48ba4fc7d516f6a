use std::f64::consts::PI;

use isac_core::boundary::{self, printed};
use isac_core::lb::{self, CltSampling};
use isac_core::special::{genchi2_cdf, regularized_gamma_lower, GenChi2Params};
use isac_core::{region, sjb, LbWeights, ScenarioConfig};
use statrs::distribution::{ChiSquared, ContinuousCDF, Poisson, Discrete};

/// ξ(n, x) for integer n from the finite Poisson sum.
fn gamma_lower_series(n: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..n {
        term *= x / f64::from(k);
        sum += term;
    }
    1.0 - (-x).exp() * sum
}

/// Noncentral χ²_k(λ) CDF as a Poisson mixture of central laws.
fn noncentral_chi2_cdf(k: u32, lambda: f64, x: f64) -> f64 {
    let pois = Poisson::new(lambda / 2.0).unwrap();
    (0..400u64)
        .map(|j| pois.pmf(j) * ChiSquared::new(f64::from(k) + 2.0 * j as f64).unwrap().cdf(x))
        .sum()
}

#[test]
fn incomplete_gamma_matches_series() {
    for n in [1u32, 2, 5, 15, 30] {
        for x in [0.1, 1.0, 4.0, 15.0, 40.0] {
            let a = regularized_gamma_lower(f64::from(n), x).unwrap();
            let b = gamma_lower_series(n, x);
            assert!((a - b).abs() < 1e-12, "n={n} x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn genchi2_noncentral_matches_poisson_mixture() {
    for (k, lambda) in [(1u32, 0.5), (2, 3.0), (4, 10.0), (7, 25.0)] {
        let p = GenChi2Params::new(vec![1.0], vec![k], vec![lambda], 0.0, 0.0).unwrap();
        for q in [0.3, 1.0, 2.0] {
            let x = q * (f64::from(k) + lambda);
            let a = genchi2_cdf(&p, x).unwrap();
            let b = noncentral_chi2_cdf(k, lambda, x);
            assert!((a - b).abs() < 1e-7, "k={k} λ={lambda} x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn genchi2_difference_of_exponentials() {
    // X = E1 − E2 with unit exponentials is Laplace(0, 1).
    let p = GenChi2Params::new(vec![0.5, -0.5], vec![2, 2], vec![0.0, 0.0], 0.0, 0.0).unwrap();
    for x in [-3.0, -0.5, 0.0, 0.7, 2.5] {
        let laplace = if x < 0.0 { 0.5 * f64::exp(x) } else { 1.0 - 0.5 * f64::exp(-x) };
        assert!((genchi2_cdf(&p, x).unwrap() - laplace).abs() < 1e-8, "x={x}");
    }
}

#[test]
fn opp_comm_target_printed_and_corrected() {
    let cfg = ScenarioConfig::default();
    let c = boundary::opp_comm_crb_constant(&cfg);
    assert!((printed::opp_comm_target_op(2.0 * c, &cfg).unwrap() - 0.25).abs() < 1e-14);
    assert!((boundary::opp_comm_target_op(2.0 * c, &cfg).unwrap() - 0.5).abs() < 1e-14);
    // cos²θ with θ uniform on [0, π] is arcsine distributed: P(cos²θ < t) = (2/π)·asin(√t).
    for r in [1.5f64, 4.0, 100.0] {
        let t = 1.0 / r;
        let want = 2.0 / PI * t.sqrt().asin();
        let got = boundary::opp_comm_target_op(r * c, &cfg).unwrap();
        assert!((got - want).abs() < 1e-13, "r={r}");
    }
}

#[test]
fn opp_comm_user_printed_scaling() {
    let cfg = ScenarioConfig::default();
    let g = 3.0;
    let corrected = boundary::opp_comm_user_op(g, &cfg).unwrap();
    let p = printed::opp_comm_user_op(g, &cfg).unwrap();
    assert!((corrected - gamma_lower_series(1, g / cfg.power)).abs() < 1e-14);
    assert!((p - gamma_lower_series(1, cfg.n() * g / cfg.power)).abs() < 1e-14);
}

#[test]
fn lb_dpc_is_gamma_law() {
    let cfg = ScenarioConfig::default();
    for c1 in [0.2, 2.0, 10.0] {
        let w = LbWeights::from_power_split(c1, &cfg).unwrap();
        for g in [1.0, 10.0, 60.0] {
            let got = lb::user_op_dpc(g, &w, &cfg).unwrap();
            let want = gamma_lower_series(cfg.n_tx as u32, g / c1);
            assert!((got - want).abs() < 1e-12);
            let via = lb::user_op(g, &w, &cfg, true, CltSampling::default()).unwrap();
            assert_eq!(via, got);
        }
    }
    assert!(lb::user_op_dpc(1.0, &LbWeights::from_power_split(1.0, &cfg).unwrap(), &cfg.with_sigma_e(0.1)).is_err());
}

#[test]
fn sjb_user_outage_bounds_and_edges() {
    let cfg = ScenarioConfig::default();
    assert_eq!(sjb::user_op(0.0, 1.0, &cfg).unwrap(), 0.0);
    assert!(sjb::user_op(-1.0, 1.0, &cfg).is_err());
    let p = sjb::user_op(20.0, 1.0, &cfg).unwrap();
    assert!((0.0..=1.0).contains(&p));
}

#[test]
fn time_sharing_endpoints() {
    let line = region::time_sharing_line(0.1, 0.3, 11);
    assert_eq!(line.len(), 11);
    assert_eq!((line[0].p_user, line[0].p_target), (1.0, 0.3));
    assert_eq!((line[10].p_user, line[10].p_target), (0.1, 1.0));
    for w in line.windows(2) {
        assert!(w[1].p_user <= w[0].p_user && w[1].p_target >= w[0].p_target);
    }
}
