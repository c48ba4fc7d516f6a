//! Outage and ergodic performance of a downlink MIMO integrated sensing and
//! communication link under subspace joint beamforming (SJB) and linear
//! beamforming (LB).

pub mod boundary;
pub mod error;
pub mod lb;
pub mod mc;
pub mod model;
pub mod moments;
pub mod region;
pub mod rng;
pub mod sjb;
pub mod special;

pub use error::{Error, Result};
pub use lb::{CrbTriple, LbTargetMode};
pub use mc::{McEstimate, Metric, Scheme};
pub use model::{ChannelSample, LbWeights, ScenarioConfig, SjbWeights};
pub use moments::CltMoments;
pub use region::{RegionPoint, SchemeTag};
pub use special::{GaussianQuadraticForm, GenChi2Params};
pub use num_complex::Complex64;
