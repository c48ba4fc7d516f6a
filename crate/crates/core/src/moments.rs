//! Gaussian (CLT) moment containers and empirical moment estimation.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::special::MvnSampler;

/// Mean and covariance of a sum of i.i.d. per-antenna statistic vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CltMoments {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub labels: Vec<&'static str>,
}

impl CltMoments {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>, labels: Vec<&'static str>) -> Result<Self> {
        let d = mean.len();
        if cov.shape() != (d, d) || labels.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "mean {d}, cov {:?}, labels {}",
                cov.shape(),
                labels.len()
            )));
        }
        Ok(Self { mean, cov, labels })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.cov.clone()).eigenvalues.min()
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -1e-10 * self.cov.norm().max(1.0)
    }

    /// Sub-vector of the listed components.
    pub fn marginal(&self, idx: &[usize]) -> Self {
        let mean = DVector::from_fn(idx.len(), |i, _| self.mean[idx[i]]);
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.cov[(idx[i], idx[j])]);
        Self { mean, cov, labels: idx.iter().map(|&i| self.labels[i]).collect() }
    }

    pub fn sampler(&self) -> Result<MvnSampler> {
        MvnSampler::new(self.mean.clone(), self.cov.clone())
    }
}

/// Sample mean/covariance with their Monte Carlo standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMoments {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub mean_se: DVector<f64>,
    pub cov_se: DMatrix<f64>,
    pub n: usize,
}

impl EmpiricalMoments {
    pub fn from_samples(samples: &[Vec<f64>]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::DomainError("need at least two samples".into()));
        }
        let d = samples[0].len();
        let nf = n as f64;
        let mut mean = DVector::zeros(d);
        for s in samples {
            for i in 0..d {
                mean[i] += s[i];
            }
        }
        mean /= nf;
        let mut cov = DMatrix::<f64>::zeros(d, d);
        let mut cov_sq = DMatrix::<f64>::zeros(d, d);
        let mut c = vec![0.0; d];
        for s in samples {
            for i in 0..d {
                c[i] = s[i] - mean[i];
            }
            for i in 0..d {
                for j in i..d {
                    let p = c[i] * c[j];
                    cov[(i, j)] += p;
                    cov_sq[(i, j)] += p * p;
                }
            }
        }
        let mut cov_se = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let m = cov[(i, j)] / nf;
                let var = (cov_sq[(i, j)] / nf - m * m).max(0.0);
                cov[(i, j)] = m;
                cov[(j, i)] = m;
                let se = (var / nf).sqrt();
                cov_se[(i, j)] = se;
                cov_se[(j, i)] = se;
            }
        }
        let mean_se = DVector::from_fn(d, |i, _| (cov[(i, i)] / nf).sqrt());
        Ok(Self { mean, cov, mean_se, cov_se, n })
    }

    /// Largest |empirical − model| / SE over all mean and covariance entries.
    /// Entries with zero standard error must match to 1e-9 absolute.
    pub fn max_z(&self, model: &CltMoments) -> f64 {
        let d = self.mean.len();
        let z = |diff: f64, se: f64| {
            if se > 0.0 {
                diff.abs() / se
            } else if diff.abs() < 1e-9 {
                0.0
            } else {
                f64::INFINITY
            }
        };
        let mut worst = 0.0f64;
        for i in 0..d {
            worst = worst.max(z(self.mean[i] - model.mean[i], self.mean_se[i]));
            for j in i..d {
                worst = worst.max(z(self.cov[(i, j)] - model.cov[(i, j)], self.cov_se[(i, j)]));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_picks_entries() {
        let m = CltMoments::new(
            DVector::from_vec(vec![1.0, 2.0, 3.0]),
            DMatrix::from_row_slice(3, 3, &[1.0, 0.1, 0.2, 0.1, 2.0, 0.3, 0.2, 0.3, 3.0]),
            vec!["a", "b", "c"],
        )
        .unwrap();
        let s = m.marginal(&[2, 0]);
        assert_eq!(s.mean.as_slice(), &[3.0, 1.0]);
        assert_eq!(s.cov[(0, 1)], 0.2);
        assert_eq!(s.labels, vec!["c", "a"]);
        assert!(m.is_psd());
    }

    #[test]
    fn empirical_of_constant_has_zero_error() {
        let s = vec![vec![1.0, 2.0]; 10];
        let e = EmpiricalMoments::from_samples(&s).unwrap();
        assert_eq!(e.cov_se.amax(), 0.0);
        let m = CltMoments::new(DVector::from_vec(vec![1.0, 2.0]), DMatrix::zeros(2, 2), vec!["x", "y"]).unwrap();
        assert_eq!(e.max_z(&m), 0.0);
    }
}
