//! Reduction of a quadratic form in a Gaussian vector to a generalized chi-square.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::genchi2::GenChi2Params;
use crate::error::{Error, Result};

const MERGE_TOL: f64 = 1e-8;
const ZERO_TOL: f64 = 1e-10;
const EIG_FLOOR: f64 = 1e-13;
const LINEAR_DOMINANCE: f64 = 1e-9;

/// `uᵀ Q2 u + q1ᵀ u + q0` with `u ~ N(mean, cov)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianQuadraticForm {
    pub q2: DMatrix<f64>,
    pub q1: DVector<f64>,
    pub q0: f64,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianQuadraticForm {
    pub fn new(
        q2: DMatrix<f64>,
        q1: DVector<f64>,
        q0: f64,
        mean: DVector<f64>,
        cov: DMatrix<f64>,
    ) -> Result<Self> {
        let qf = Self { q2, q1, q0, mean, cov };
        qf.validate()?;
        Ok(qf)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.mean.len();
        let shapes = [self.q2.shape(), self.cov.shape()];
        if shapes.iter().any(|&s| s != (d, d)) || self.q1.len() != d {
            return Err(Error::ShapeMismatch(format!(
                "dim {d}: q2 {:?}, q1 {}, cov {:?}",
                self.q2.shape(),
                self.q1.len(),
                self.cov.shape()
            )));
        }
        let q_scale = self.q2.amax().max(f64::MIN_POSITIVE);
        if (&self.q2 - self.q2.transpose()).amax() > 1e-12 * q_scale {
            return Err(Error::DomainError("Q2 is not symmetric".into()));
        }
        let c_scale = self.cov.amax();
        if (&self.cov - self.cov.transpose()).amax() > 1e-12 * c_scale.max(f64::MIN_POSITIVE) {
            return Err(Error::CovNotPsd { min_eig: f64::NAN });
        }
        if d > 0 {
            let min_eig = SymmetricEigen::new(self.cov.clone()).eigenvalues.min();
            let norm = self.cov.norm();
            if min_eig < -1e-10 * norm {
                return Err(Error::CovNotPsd { min_eig });
            }
        }
        Ok(())
    }

    /// Direct evaluation at a point.
    pub fn eval(&self, u: &DVector<f64>) -> f64 {
        (u.transpose() * &self.q2 * u)[(0, 0)] + self.q1.dot(u) + self.q0
    }

    /// Scales (Q2, q1, q0) by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            q2: &self.q2 * c,
            q1: &self.q1 * c,
            q0: self.q0 * c,
            mean: self.mean.clone(),
            cov: self.cov.clone(),
        }
    }
}

/// Symmetric square root of a PSD matrix. Eigenvalues below `1e-13·max` are
/// round-off of a rank-deficient matrix and are clipped to zero.
pub fn sqrtm_psd(cov: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(cov.clone());
    let floor = EIG_FLOOR * eig.eigenvalues.amax();
    let root = eig.eigenvalues.map(|l| if l > floor { l.sqrt() } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose()
}

/// Exact law of the quadratic form as a generalized chi-square.
pub fn quadratic_form_to_genchi2(qf: &GaussianQuadraticForm) -> Result<GenChi2Params> {
    qf.validate()?;
    let s = sqrtm_psd(&qf.cov);
    let a = &s * &qf.q2 * &s;
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let linear = &s * (&qf.q2 * &qf.mean * 2.0 + &qf.q1);
    let b = eig.eigenvectors.transpose() * linear;
    let mut offset = (qf.mean.transpose() * &qf.q2 * &qf.mean)[(0, 0)] + qf.q1.dot(&qf.mean) + qf.q0;

    let max_eig = eig.eigenvalues.amax();
    let mut gauss_var = 0.0;
    let mut chi: Vec<(f64, f64)> = Vec::new();
    for (i, &d) in eig.eigenvalues.iter().enumerate() {
        if max_eig == 0.0 || d.abs() <= ZERO_TOL * max_eig {
            gauss_var += b[i] * b[i];
            continue;
        }
        // d·z² + b·z with a negligible quadratic part: keep it as b·z plus its
        // mean d; completing the square would cancel catastrophically.
        if d.abs() <= LINEAR_DOMINANCE * b[i].abs() {
            gauss_var += b[i] * b[i];
            offset += d;
            continue;
        }
        let shift = b[i] / (2.0 * d);
        offset -= d * shift * shift;
        chi.push((d, shift * shift));
    }
    chi.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut weights = Vec::new();
    let mut dofs = Vec::new();
    let mut nc = Vec::new();
    let mut group_sum = 0.0;
    for (d, l) in chi {
        if let Some(&last) = weights.last() {
            let w0: f64 = last;
            let k = *dofs.last().unwrap();
            if (d - group_sum / k as f64).abs() <= MERGE_TOL * max_eig && (d - w0).abs() <= MERGE_TOL * max_eig {
                group_sum += d;
                let k = k + 1;
                *dofs.last_mut().unwrap() = k;
                *weights.last_mut().unwrap() = group_sum / k as f64;
                *nc.last_mut().unwrap() += l;
                continue;
            }
        }
        group_sum = d;
        weights.push(d);
        dofs.push(1u32);
        nc.push(l);
    }
    GenChi2Params::new(weights, dofs, nc, gauss_var.sqrt(), offset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::mvn::MvnSampler;
    use crate::rng::stream;
    use proptest::prelude::*;

    #[test]
    fn identity_form_is_central_chi2() {
        let qf = GaussianQuadraticForm::new(
            DMatrix::identity(1, 1),
            DVector::zeros(1),
            0.0,
            DVector::zeros(1),
            DMatrix::identity(1, 1),
        )
        .unwrap();
        let p = quadratic_form_to_genchi2(&qf).unwrap();
        assert_eq!(p.dofs, vec![1]);
        assert!((p.weights[0] - 1.0).abs() < 1e-14);
        assert!(p.noncentralities[0].abs() < 1e-14);
        assert!(p.gaussian_scale.abs() < 1e-14 && p.offset.abs() < 1e-14);
    }

    #[test]
    fn linear_only_form_is_gaussian() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let q1 = DVector::from_vec(vec![1.0, -3.0]);
        let mu = DVector::from_vec(vec![0.5, 2.0]);
        let qf = GaussianQuadraticForm::new(DMatrix::zeros(2, 2), q1.clone(), 0.7, mu.clone(), cov.clone()).unwrap();
        let p = quadratic_form_to_genchi2(&qf).unwrap();
        assert!(p.weights.is_empty());
        let sq1 = sqrtm_psd(&cov) * &q1;
        assert!((p.gaussian_scale - sq1.norm()).abs() < 1e-12);
        assert!((p.offset - (0.7 + q1.dot(&mu))).abs() < 1e-12);
    }

    #[test]
    fn repeated_eigenvalues_merge() {
        let qf = GaussianQuadraticForm::new(
            DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5, 2.0])),
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            0.0,
            DVector::zeros(3),
            DMatrix::identity(3, 3),
        )
        .unwrap();
        let p = quadratic_form_to_genchi2(&qf).unwrap();
        assert_eq!(p.dofs, vec![2, 1]);
        assert!((p.noncentralities[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_covariance_and_bad_shapes() {
        let bad = GaussianQuadraticForm::new(
            DMatrix::identity(2, 2),
            DVector::zeros(2),
            0.0,
            DVector::zeros(2),
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]),
        );
        assert!(matches!(bad, Err(Error::CovNotPsd { .. })));
        let shape = GaussianQuadraticForm::new(
            DMatrix::identity(2, 2),
            DVector::zeros(3),
            0.0,
            DVector::zeros(2),
            DMatrix::identity(2, 2),
        );
        assert!(matches!(shape, Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn moments_are_preserved() {
        let q2 = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, -0.2, 0.3, -0.5, 0.1, -0.2, 0.1, 0.0]);
        let q1 = DVector::from_vec(vec![0.2, 1.0, -0.4]);
        let mu = DVector::from_vec(vec![1.0, -0.5, 2.0]);
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.5, 1.0, 0.3, 0.0, 0.0, 0.0]);
        let cov = &a * a.transpose();
        let qf = GaussianQuadraticForm::new(q2.clone(), q1.clone(), 0.3, mu.clone(), cov.clone()).unwrap();
        let p = quadratic_form_to_genchi2(&qf).unwrap();
        let mean = (&q2 * &cov).trace() + qf.eval(&mu);
        let lin = &q2 * &mu * 2.0 + &q1;
        let var = 2.0 * (&q2 * &cov * &q2 * &cov).trace() + (lin.transpose() * &cov * &lin)[(0, 0)];
        assert!((p.mean() - mean).abs() < 1e-10);
        assert!((p.variance() - var).abs() < 1e-10);
    }

    #[test]
    fn cdf_matches_sampling_d4() {
        let q2 = DMatrix::from_row_slice(
            4,
            4,
            &[1.0, 0.2, 0.0, -0.3, 0.2, -0.8, 0.1, 0.0, 0.0, 0.1, 0.4, 0.2, -0.3, 0.0, 0.2, 0.0],
        );
        let q1 = DVector::from_vec(vec![0.5, -0.2, 0.1, 1.0]);
        let mu = DVector::from_vec(vec![0.3, 0.0, -1.0, 0.5]);
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[1.0, 0.0, 0.2, 0.1, 0.3, 0.9, 0.0, 0.0, 0.0, 0.4, 1.1, 0.0, 0.2, 0.0, 0.1, 0.7],
        );
        let cov = &a * a.transpose();
        let qf = GaussianQuadraticForm::new(q2, q1, -0.2, mu.clone(), cov.clone()).unwrap();
        let p = quadratic_form_to_genchi2(&qf).unwrap();
        let sampler = MvnSampler::new(mu, cov).unwrap();
        let mut rng = stream(3, 0);
        let n = 200_000;
        let mut xs: Vec<f64> = (0..n).map(|_| qf.eval(&sampler.sample(&mut rng))).collect();
        xs.sort_by(f64::total_cmp);
        for frac in [0.05, 0.25, 0.5, 0.75, 0.95] {
            let v = p.cdf(xs[(frac * n as f64) as usize]).unwrap();
            assert!((v - frac).abs() < 6e-3, "{frac}: {v}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn affine_invariance(c in 0.05f64..20.0, x in -2.0f64..4.0, w in -1.0f64..1.0) {
            let q2 = DMatrix::from_row_slice(2, 2, &[1.0, w, w, -0.5]);
            let qf = GaussianQuadraticForm::new(
                q2,
                DVector::from_vec(vec![0.3, -0.1]),
                0.2,
                DVector::from_vec(vec![0.5, 1.0]),
                DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.6]),
            ).unwrap();
            let base = quadratic_form_to_genchi2(&qf).unwrap().cdf(x).unwrap();
            let scaled = quadratic_form_to_genchi2(&qf.scaled(c)).unwrap().cdf(c * x).unwrap();
            prop_assert!((base - scaled).abs() < 1e-7);
        }
    }
}
