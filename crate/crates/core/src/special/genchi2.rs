//! Generalized chi-square law and its CDF by characteristic-function inversion.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

use super::quadrature::adaptive_gk;
use crate::error::{Error, Result};

/// Law of `Σ w_i·χ²_{k_i}(λ_i) + s·Z + m` with independent components.
#[derive(Debug, Clone, PartialEq)]
pub struct GenChi2Params {
    pub weights: Vec<f64>,
    pub dofs: Vec<u32>,
    pub noncentralities: Vec<f64>,
    pub gaussian_scale: f64,
    pub offset: f64,
}

const TAIL_TOL: f64 = 1e-9;
const PANEL_TOL: f64 = 1e-12;
const MAX_CHUNKS: usize = 4000;
const MAX_SPAN: f64 = 1e24;

impl GenChi2Params {
    pub fn new(
        weights: Vec<f64>,
        dofs: Vec<u32>,
        noncentralities: Vec<f64>,
        gaussian_scale: f64,
        offset: f64,
    ) -> Result<Self> {
        let p = Self { weights, dofs, noncentralities, gaussian_scale, offset };
        p.validate()?;
        Ok(p)
    }

    /// Constant plus Gaussian, no chi-square terms.
    pub fn gaussian(scale: f64, offset: f64) -> Self {
        Self {
            weights: vec![],
            dofs: vec![],
            noncentralities: vec![],
            gaussian_scale: scale.abs(),
            offset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        if self.dofs.len() != n || self.noncentralities.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "weights {}, dofs {}, noncentralities {}",
                n,
                self.dofs.len(),
                self.noncentralities.len()
            )));
        }
        if self.dofs.contains(&0) {
            return Err(Error::DomainError("degrees of freedom must be >= 1".into()));
        }
        if self.noncentralities.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
            return Err(Error::DomainError("noncentralities must be finite and >= 0".into()));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::DomainError("weights must be finite".into()));
        }
        if !(self.gaussian_scale >= 0.0 && self.gaussian_scale.is_finite()) {
            return Err(Error::DomainError("gaussian scale must be finite and >= 0".into()));
        }
        if !self.offset.is_finite() {
            return Err(Error::DomainError("offset must be finite".into()));
        }
        Ok(())
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.weights
            .iter()
            .zip(&self.dofs)
            .zip(&self.noncentralities)
            .filter(|((w, _), _)| **w != 0.0)
            .map(|((&w, &k), &l)| (w, k as f64, l))
    }

    pub fn mean(&self) -> f64 {
        self.terms().map(|(w, k, l)| w * (k + l)).sum::<f64>() + self.offset
    }

    pub fn variance(&self) -> f64 {
        self.terms().map(|(w, k, l)| 2.0 * w * w * (k + 2.0 * l)).sum::<f64>()
            + self.gaussian_scale * self.gaussian_scale
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut q = self.offset;
        for (w, k, l) in self.terms() {
            let z: f64 = rng.sample(StandardNormal);
            let mut c = (z + l.sqrt()).powi(2);
            for _ in 1..k as u32 {
                let z: f64 = rng.sample(StandardNormal);
                c += z * z;
            }
            q += w * c;
        }
        if self.gaussian_scale > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            q += self.gaussian_scale * z;
        }
        q
    }

    /// P(Q <= x).
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if x.is_nan() {
            return Err(Error::DomainError("cdf evaluated at NaN".into()));
        }
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        if x == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let terms: Vec<_> = self.terms().collect();
        let s = self.gaussian_scale;
        if terms.is_empty() {
            if s == 0.0 {
                return Ok(if x >= self.offset { 1.0 } else { 0.0 });
            }
            return Ok(normal_cdf((x - self.offset) / s));
        }
        let scale = self.variance().sqrt();
        let terms: Vec<_> = terms.into_iter().map(|(w, k, l)| (w / scale, k, l)).collect();
        let shift: f64 = self.terms().map(|(w, _, l)| w * l).sum();
        let kernel = Kernel { terms, s: s / scale, d: (self.offset + shift - x) / scale };
        let integral = kernel.integrate().map_err(|context| Error::NonConvergence {
            context: format!("{context}; params {self:?}, x = {x}"),
        })?;
        Ok((0.5 - integral / PI).clamp(0.0, 1.0))
    }
}

pub fn genchi2_cdf(p: &GenChi2Params, x: f64) -> Result<f64> {
    p.cdf(x)
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Imhof integrand `|φ(u)|·sin(ψ(u))/u` in variance-normalised units.
///
/// `d` already contains the linear part `Σ λ_i w_i` of the noncentral phase,
/// so large noncentralities do not cancel against the offset pointwise.
struct Kernel {
    terms: Vec<(f64, f64, f64)>,
    s: f64,
    d: f64,
}

impl Kernel {
    fn eval(&self, u: f64) -> f64 {
        let mut psi = self.d * u;
        let mut logmod = -0.5 * self.s * self.s * u * u;
        for &(w, k, l) in &self.terms {
            let wu = w * u;
            let r = 4.0 * wu * wu;
            psi += 0.5 * k * (2.0 * wu).atan() - l * wu * r / (1.0 + r);
            logmod -= 0.25 * k * r.ln_1p() + 0.5 * l * r / (1.0 + r);
        }
        logmod.exp() * psi.sin() / u
    }

    /// Upper bound on ∫_U^∞ |φ(u)|/u du.
    fn tail_bound(&self, u: f64) -> f64 {
        let p: f64 = self.terms.iter().map(|t| 0.5 * t.1).sum();
        let log_c: f64 = self.terms.iter().map(|&(w, k, _)| -0.5 * k * (2.0 * w.abs()).ln()).sum();
        let log_lam: f64 = self
            .terms
            .iter()
            .map(|&(w, _, l)| {
                let r = 4.0 * w * w * u * u;
                -0.5 * l * r / (1.0 + r)
            })
            .sum();
        let s = self.s;
        let power = log_c + log_lam - 0.5 * s * s * u * u - p * u.ln() - p.ln();
        let mut bound = power.exp();
        if s > 0.0 {
            let g = log_c + log_lam - (p + 1.0) * u.ln()
                + ((PI / 2.0).sqrt() / s * erfc(s * u * FRAC_1_SQRT_2)).ln();
            bound = bound.min(g.exp());
        }
        bound
    }

    /// |ψ'(u)|, the local angular frequency of the integrand.
    fn frequency(&self, u: f64) -> f64 {
        let mut f = self.d;
        for &(w, k, l) in &self.terms {
            let r = 4.0 * w * w * u * u;
            f += k * w / (1.0 + r) - l * w * r * (3.0 + r) / ((1.0 + r) * (1.0 + r));
        }
        f.abs()
    }

    /// Geometric panels while a panel is shorter than half the local period,
    /// then half-period panels; the alternating partial sums are accelerated
    /// with Wynn's epsilon once the tail bound is not yet met.
    fn integrate(&self) -> std::result::Result<f64, String> {
        let half = |u: f64| PI / self.frequency(u).max(1e-300);
        let mut a = 0.0;
        let mut len = half(0.0).min(1.0);
        let mut sum = 0.0;
        let mut periodic = false;
        let mut partial = Vec::new();
        let mut estimates: Vec<f64> = Vec::new();
        let mut geo_partial = Vec::new();
        for _ in 0..MAX_CHUNKS {
            let b = a + len;
            let q = adaptive_gk(|u| self.eval(u), a, b, PANEL_TOL, 1e-13, 400);
            if !q.converged && q.error > 1e-9 {
                return Err(format!("panel [{a:e}, {b:e}] error {:e}", q.error));
            }
            sum += q.value;
            a = b;
            if self.tail_bound(a) < TAIL_TOL {
                return Ok(sum);
            }
            let h = half(a);
            if !periodic && 2.0 * a <= h {
                len = a;
                geo_partial.push(sum);
                if a > MAX_SPAN {
                    return accelerate(&geo_partial)
                        .ok_or_else(|| format!("tail did not decay by u = {a:e}"));
                }
                continue;
            }
            periodic = true;
            len = h.min(a);
            partial.push(sum);
            if partial.len() >= 4 {
                let start = partial.len().saturating_sub(40);
                let e = wynn_epsilon(&partial[start..]);
                estimates.push(e);
                let n = estimates.len();
                if n >= 3
                    && (estimates[n - 1] - estimates[n - 2]).abs() < 1e-10
                    && (estimates[n - 2] - estimates[n - 3]).abs() < 1e-10
                {
                    return Ok(estimates[n - 1]);
                }
            }
        }
        Err(format!("{MAX_CHUNKS} chunks exhausted at u = {a:e}"))
    }
}

fn accelerate(seq: &[f64]) -> Option<f64> {
    if seq.len() < 6 {
        return None;
    }
    let start = seq.len().saturating_sub(40);
    let e1 = wynn_epsilon(&seq[start..seq.len() - 1]);
    let e2 = wynn_epsilon(&seq[start..]);
    ((e1 - e2).abs() < 1e-8).then_some(e2)
}

/// Wynn's epsilon algorithm; returns the deepest even-column entry.
pub fn wynn_epsilon(seq: &[f64]) -> f64 {
    let n = seq.len();
    if n == 0 {
        return f64::NAN;
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = seq.to_vec();
    let mut best = *seq.last().unwrap();
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 || !diff.is_finite() {
                return if col % 2 == 0 { cur[i + 1] } else { best };
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            let v = *cur.last().unwrap();
            if v.is_finite() {
                best = v;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn p(w: &[f64], k: &[u32], l: &[f64], s: f64, m: f64) -> GenChi2Params {
        GenChi2Params::new(w.to_vec(), k.to_vec(), l.to_vec(), s, m).unwrap()
    }

    #[test]
    fn chi2_one_dof_at_one_matches_erf() {
        let v = p(&[1.0], &[1], &[0.0], 0.0, 0.0).cdf(1.0).unwrap();
        let oracle = statrs::function::erf::erf(FRAC_1_SQRT_2);
        assert!((v - oracle).abs() < 1e-7, "{v} vs {oracle}");
        assert!((v - 0.682689).abs() < 1e-6);
    }

    #[test]
    fn degenerate_constant_is_step() {
        let c = p(&[], &[], &[], 0.0, 2.0);
        assert_eq!(c.cdf(1.0).unwrap(), 0.0);
        assert_eq!(c.cdf(3.0).unwrap(), 1.0);
    }

    #[test]
    fn pure_gaussian() {
        let g = p(&[], &[], &[], 2.0, 1.0);
        assert!((g.cdf(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((g.cdf(3.0).unwrap() - normal_cdf(1.0)).abs() < 1e-15);
    }

    #[test]
    fn central_chi2_matches_statrs_across_dofs() {
        for k in [1u32, 2, 3, 7, 30] {
            let law = ChiSquared::new(k as f64).unwrap();
            let q = p(&[1.0], &[k], &[0.0], 0.0, 0.0);
            for x in [0.05, 0.5, 1.0, 3.0, 10.0, 40.0] {
                let v = q.cdf(x).unwrap();
                assert!((v - law.cdf(x)).abs() < 1e-6, "k={k} x={x}: {v} vs {}", law.cdf(x));
            }
        }
    }

    #[test]
    fn scaled_exponential_with_negative_weight() {
        // -2·χ²₂ is minus an exponential of mean 4.
        let q = p(&[-2.0], &[2], &[0.0], 0.0, 0.0);
        for x in [-10.0, -4.0, -0.5] {
            let v = q.cdf(x).unwrap();
            let oracle = (x / 4.0f64).exp();
            assert!((v - oracle).abs() < 1e-7, "x={x}: {v} vs {oracle}");
        }
    }

    #[test]
    fn noncentral_two_dof_matches_marcum_quadrature() {
        // P(χ²₂(λ) <= x) via the Rice density integrated numerically.
        let (l, x) = (3.0f64, 4.0f64);
        let pdf = |t: f64| {
            let z = (l * t).sqrt();
            0.5 * (-(t + l) / 2.0).exp() * bessel_i0(z)
        };
        let oracle = adaptive_gk(pdf, 0.0, x, 1e-13, 0.0, 500).value;
        let v = p(&[1.0], &[2], &[l], 0.0, 0.0).cdf(x).unwrap();
        assert!((v - oracle).abs() < 1e-7, "{v} vs {oracle}");
    }

    fn bessel_i0(z: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= (z / 2.0).powi(2) / (k as f64).powi(2);
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn mixed_law_matches_sampling() {
        let q = p(&[1.5, -0.7, 0.2], &[1, 2, 3], &[0.5, 2.0, 0.0], 0.4, 0.3);
        let mut rng = stream(11, 0);
        let n = 400_000;
        let mut xs: Vec<f64> = (0..n).map(|_| q.sample(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        for frac in [0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 0.98] {
            let x = xs[(frac * n as f64) as usize];
            let v = q.cdf(x).unwrap();
            assert!((v - frac).abs() < 4e-3, "frac {frac}: {v}");
        }
    }

    #[test]
    fn limits_and_monotonicity() {
        let q = p(&[1.0, -0.3], &[2, 1], &[1.0, 0.0], 0.1, 0.0);
        let sd = q.variance().sqrt();
        let mu = q.mean();
        assert!(q.cdf(mu - 10.0 * sd).unwrap() < 1e-6);
        assert!(q.cdf(mu + 25.0 * sd).unwrap() > 1.0 - 1e-9);
        let mut last = 0.0;
        for i in 0..200 {
            let x = mu - 5.0 * sd + i as f64 * 0.05 * sd;
            let v = q.cdf(x).unwrap();
            assert!(v >= last - 1e-9);
            last = v;
        }
    }

    #[test]
    fn evaluation_at_offset_with_single_dof() {
        // d = 0 leaves a non-oscillating power-law tail.
        let q = p(&[1.0], &[1], &[0.0], 0.0, 0.0);
        let v = q.cdf(0.0).unwrap();
        assert!(v.abs() < 1e-6);
        let q = p(&[1.0, -1.0], &[1, 1], &[0.0, 0.0], 0.0, 0.0);
        assert!((q.cdf(0.0).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn large_noncentrality() {
        let l = 1e6;
        let q = p(&[1.0], &[2], &[l], 0.0, 0.0);
        let mu = q.mean();
        let sd = q.variance().sqrt();
        let v = q.cdf(mu).unwrap();
        // Nearly Gaussian with a small positive skew.
        assert!((v - 0.5).abs() < 2e-3, "{v}");
        assert!(q.cdf(mu - 8.0 * sd).unwrap() < 1e-6);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        let s: Vec<f64> = (1..=14)
            .scan(0.0, |acc, k| {
                *acc += (-1.0f64).powi(k + 1) / k as f64;
                Some(*acc)
            })
            .collect();
        assert!((wynn_epsilon(&s) - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(GenChi2Params::new(vec![1.0], vec![], vec![0.0], 0.0, 0.0).is_err());
        assert!(GenChi2Params::new(vec![1.0], vec![1], vec![-1.0], 0.0, 0.0).is_err());
    }
}
