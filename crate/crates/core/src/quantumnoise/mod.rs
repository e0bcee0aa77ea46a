//! Two-mode input–output maps for both mixing geometries, detector loss,
//! and quadrature and intensity-difference squeezing.
//!
//! Quadrature units: a single vacuum quadrature a + a† has variance 1 (1/4
//! for (a + a†)/2), so the joint homodyne shot level is 2.

pub mod closed_forms;
mod detection;
mod transform;

use thiserror::Error;

pub use detection::{
    intensity_diff_from_map, intensity_diff_squeezing_db, intensity_difference_stats,
    joint_quadrature_variance, optimal_quadrature_squeezing, output_photon_numbers,
    quadrature_phase, quadrature_squeezing_db, squeezing, Detection, DetectionConfig,
    IntensityStats, OptimalQuadrature, Seed, SqueezingResult, QUADRATURE_SHOT_NOISE,
};
pub use transform::{
    apply_loss, commutator_metric, ffwm_mode_transform, mode_transform, pc_mode_transform,
    pc_mode_transform_continued, AffineModeMap, LossChannel, ModeTransform,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("above threshold: |κ|L = {magnitude_l} ≥ π/2")]
    AboveThreshold { magnitude_l: f64 },
    #[error("undefined squeezing: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, NoiseError>;
