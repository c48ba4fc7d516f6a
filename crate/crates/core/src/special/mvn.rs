//! Multivariate normal sampling and Gaussian-domain Monte Carlo.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::quadform::sqrtm_psd;
use crate::error::{Error, Result};
use crate::rng::par_blocks;

#[derive(Debug, Clone)]
pub struct MvnSampler {
    mean: DVector<f64>,
    factor: DMatrix<f64>,
}

impl MvnSampler {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if cov.shape() != (d, d) {
            return Err(Error::ShapeMismatch(format!("mean {d}, cov {:?}", cov.shape())));
        }
        if d > 0 {
            let min_eig = SymmetricEigen::new(cov.clone()).eigenvalues.min();
            if min_eig < -1e-10 * cov.norm() {
                return Err(Error::CovNotPsd { min_eig });
            }
        }
        Ok(Self { factor: sqrtm_psd(&cov), mean })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn standard<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        DVector::from_fn(self.dim(), |_, _| rng.sample(StandardNormal))
    }

    pub fn transform(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.mean + &self.factor * z
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = self.standard(rng);
        self.transform(&z)
    }
}

pub fn mvn_sample<R: Rng + ?Sized>(
    mean: &DVector<f64>,
    cov: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DVector<f64>> {
    Ok(MvnSampler::new(mean.clone(), cov.clone())?.sample(rng))
}

/// Averages `f` over `N(mean, cov)` with antithetic pairs `(z, -z)`.
///
/// `f` returns a vector of per-sample values so that several thresholds can
/// share one set of draws; the result has the same length.
pub fn gaussian_expectation<F>(sampler: &MvnSampler, pairs: usize, seed: u64, width: usize, f: F) -> Vec<f64>
where
    F: Fn(&DVector<f64>, &mut [f64]) + Sync,
{
    let blocks = par_blocks(pairs, seed, |rng, count| {
        let mut acc = vec![0.0; width];
        let mut buf = vec![0.0; width];
        for _ in 0..count {
            let z = sampler.standard(rng);
            for u in [sampler.transform(&z), sampler.transform(&(-&z))] {
                f(&u, &mut buf);
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a += b;
                }
            }
        }
        acc
    });
    let mut total = vec![0.0; width];
    for b in blocks {
        for (t, v) in total.iter_mut().zip(b) {
            *t += v;
        }
    }
    let n = 2.0 * pairs as f64;
    total.iter_mut().for_each(|t| *t /= n);
    total
}
