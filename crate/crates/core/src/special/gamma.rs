use statrs::function::gamma::checked_gamma_lr;

use crate::error::{Error, Result};

/// Regularized lower incomplete gamma ξ(n, x) = γ(n, x)/Γ(n).
pub fn regularized_gamma_lower(n: f64, x: f64) -> Result<f64> {
    if !(n > 0.0) || n.is_infinite() {
        return Err(Error::DomainError(format!("gamma shape must be positive, got {n}")));
    }
    if !(x >= 0.0) {
        return Err(Error::DomainError(format!("gamma argument must be >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    checked_gamma_lr(n, x).map_err(|e| Error::DomainError(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_case() {
        assert!((regularized_gamma_lower(1.0, 2f64.ln()).unwrap() - 0.5).abs() < 1e-14);
        for x in [0.01, 0.5, 3.0, 20.0] {
            let v = regularized_gamma_lower(1.0, x).unwrap();
            assert!((v - (1.0 - (-x).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn integer_shape_series() {
        let v = regularized_gamma_lower(2.0, 2.0).unwrap();
        assert!((v - (1.0 - 3.0 * (-2.0f64).exp())).abs() < 1e-12);
        // ξ(n, x) = 1 - e^{-x} Σ_{k<n} x^k/k!
        let (n, x) = (15usize, 11.3f64);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..n {
            term *= x / k as f64;
            sum += term;
        }
        let oracle = 1.0 - (-x).exp() * sum;
        assert!((regularized_gamma_lower(n as f64, x).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn limits_and_domain() {
        assert_eq!(regularized_gamma_lower(3.0, 0.0).unwrap(), 0.0);
        assert_eq!(regularized_gamma_lower(3.0, f64::INFINITY).unwrap(), 1.0);
        assert!(regularized_gamma_lower(3.0, -1.0).is_err());
        assert!(regularized_gamma_lower(0.0, 1.0).is_err());
        let mut last = 0.0;
        for i in 0..100 {
            let v = regularized_gamma_lower(15.0, i as f64 * 0.4).unwrap();
            assert!(v >= last);
            last = v;
        }
    }
}
