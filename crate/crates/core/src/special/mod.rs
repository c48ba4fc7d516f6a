//! Distribution and quadrature kernel.

pub mod gamma;
pub mod genchi2;
pub mod mvn;
pub mod quadform;
pub mod quadrature;

pub use gamma::regularized_gamma_lower;
pub use genchi2::{genchi2_cdf, normal_cdf, GenChi2Params};
pub use mvn::{gaussian_expectation, mvn_sample, MvnSampler};
pub use quadform::{quadratic_form_to_genchi2, sqrtm_psd, GaussianQuadraticForm};
pub use quadrature::{adaptive_gk, gauss_legendre, GaussLegendre, Quad};
