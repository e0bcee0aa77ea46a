use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::moments::CentralMoments;
use super::{propagate, AffineMap, GaussianState, McError, Observable, Result};

pub const MIN_SAMPLES: usize = 10_000;
/// Below this seed photon number the linearized photon statistics are refused.
pub const MIN_BRIGHT_PHOTONS: f64 = 1e3;
const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub variance: f64,
    /// Standard error of `variance`.
    pub std_error: f64,
    pub samples: usize,
}

/// Matrix square root factor L with L·Lᵀ = m for a symmetric PSD matrix.
fn psd_factor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots)
}

/// Monte-Carlo estimate of an observable after `map`, by sampling the
/// input Wigner function and the injected vacua and pushing each sample
/// through the map.
///
/// Intensity differences use the linearized photon number
/// n ≈ |μ|² + 2(μ_x δx + μ_p δp) about the output mean μ, which needs a
/// bright seed (≥ `MIN_BRIGHT_PHOTONS`). Results depend only on `seed`,
/// not on the thread count.
pub fn mc_estimate(
    state: &GaussianState,
    map: &AffineMap,
    observable: Observable,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(McError::TooFewSamples {
            requested: samples,
            minimum: MIN_SAMPLES,
        });
    }
    if !state.is_physical() {
        return Err(McError::NonPhysical(format!(
            "uncertainty bound violated by {:.3e}",
            state.uncertainty_margin()
        )));
    }
    let out_mean = propagate(state, map)?.mean;
    if out_mean.len() != 4 {
        return Err(McError::Dimension(
            "observables act on two output modes".into(),
        ));
    }
    let weights: DVector<f64> = match observable {
        Observable::JointQuadrature {
            theta_f,
            theta_b,
            backward,
        } => DVector::from_row_slice(&Observable::quadrature_weights(theta_f, theta_b, backward)),
        Observable::IntensityDifference => {
            let photons = state.mean.norm_squared();
            if photons < MIN_BRIGHT_PHOTONS {
                return Err(McError::InsufficientBrightness {
                    photons,
                    minimum: MIN_BRIGHT_PHOTONS,
                });
            }
            DVector::from_row_slice(&[
                2.0 * out_mean[0],
                2.0 * out_mean[1],
                -2.0 * out_mean[2],
                -2.0 * out_mean[3],
            ])
        }
    };
    let offset = match observable {
        Observable::JointQuadrature { .. } => 0.0,
        Observable::IntensityDifference => {
            out_mean[0].powi(2) + out_mean[1].powi(2) - out_mean[2].powi(2) - out_mean[3].powi(2)
        }
    };

    let input_factor = psd_factor(&state.covariance);
    let noise_factor = psd_factor(&map.noise);
    let dim = state.mean.len();
    let out_dim = map.b.len();

    let chunks = samples.div_ceil(CHUNK);
    let partials: Vec<CentralMoments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut acc = CentralMoments::default();
            let mut z_in = DVector::zeros(dim);
            let mut z_noise = DVector::zeros(out_dim);
            for _ in 0..count {
                z_in.iter_mut()
                    .for_each(|z| *z = rng.sample(StandardNormal));
                z_noise
                    .iter_mut()
                    .for_each(|z| *z = rng.sample(StandardNormal));
                let input = &state.mean + &input_factor * &z_in;
                let output = &map.a * input + &map.b + &noise_factor * &z_noise;
                let value = match observable {
                    Observable::JointQuadrature { .. } => weights.dot(&output),
                    Observable::IntensityDifference => offset + weights.dot(&(output - &out_mean)),
                };
                acc.push(value);
            }
            acc
        })
        .collect();
    let mut total = CentralMoments::default();
    for p in &partials {
        total.merge(p);
    }
    Ok(McEstimate {
        mean: total.mean,
        variance: total.variance(),
        std_error: total.variance_std_error(),
        samples,
    })
}
