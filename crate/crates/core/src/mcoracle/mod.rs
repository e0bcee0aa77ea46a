//! Independent verification engine: Gaussian states in real quadratures
//! (x, p per mode, a = x + ip, vacuum variance 1/4), exact covariance
//! propagation through affine maps, and Monte-Carlo estimates of the same
//! statistics.

mod doppler;
mod maps;
mod moments;
mod sampling;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::atomvapor::AtomError;

pub use doppler::{mc_doppler_average, DopplerSample};
pub use maps::{ffwm_map, from_affine_mode_map, from_mode_matrix, loss_map, pc_map};
pub use moments::Moments;
pub use sampling::{mc_estimate, McEstimate, MIN_BRIGHT_PHOTONS, MIN_SAMPLES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-physical state: {0}")]
    NonPhysical(String),
    #[error("seed too dim for linearized photon statistics: {photons:.3e} < {minimum:.0e}")]
    InsufficientBrightness { photons: f64, minimum: f64 },
    #[error("need at least {minimum} samples, got {requested}")]
    TooFewSamples { requested: usize, minimum: usize },
    #[error(transparent)]
    Atom(#[from] AtomError),
}

pub type Result<T> = std::result::Result<T, McError>;

/// Quadrature means and symmetrized covariance, ordered (x₁, p₁, x₂, p₂, …).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if n % 2 != 0 || covariance.shape() != (n, n) {
            return Err(McError::Dimension(format!(
                "mean of length {n} with covariance {:?}",
                covariance.shape()
            )));
        }
        if (&covariance - covariance.transpose()).amax() > 1e-12 * covariance.amax().max(1.0) {
            return Err(McError::NonPhysical("covariance is not symmetric".into()));
        }
        Ok(Self { mean, covariance })
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            mean: DVector::zeros(2 * modes),
            covariance: DMatrix::identity(2 * modes, 2 * modes) * 0.25,
        }
    }

    /// Coherent state of mean photon number γ (real amplitude) on mode 1,
    /// vacuum elsewhere.
    pub fn seeded(modes: usize, gamma: f64) -> Self {
        let mut s = Self::vacuum(modes);
        s.mean[0] = gamma.sqrt();
        s
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    /// Smallest eigenvalue of covariance + iΩ/4; non-negative for
    /// physical states.
    pub fn uncertainty_margin(&self) -> f64 {
        let n = self.mean.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let omega = if i / 2 == j / 2 && i != j {
                if i % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            };
            Complex64::new(self.covariance[(i, j)], 0.25 * omega)
        });
        m.symmetric_eigenvalues().min()
    }

    pub fn is_physical(&self) -> bool {
        self.uncertainty_margin() >= -1e-10 * self.covariance.amax().max(1.0)
    }

    /// ⟨n_k⟩ = ⟨x²⟩ + ⟨p²⟩ − 1/2.
    pub fn mean_photons(&self, mode: usize) -> f64 {
        let (i, j) = (2 * mode, 2 * mode + 1);
        self.covariance[(i, i)]
            + self.covariance[(j, j)]
            + self.mean[i].powi(2)
            + self.mean[j].powi(2)
            - 0.5
    }
}

/// mean' = A·mean + b, covariance' = A·covariance·Aᵀ + noise.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    /// Covariance injected by vacuum inputs.
    pub noise: DMatrix<f64>,
}

impl AffineMap {
    pub fn identity(modes: usize) -> Self {
        let n = 2 * modes;
        Self {
            a: DMatrix::identity(n, n),
            b: DVector::zeros(n),
            noise: DMatrix::zeros(n, n),
        }
    }

    /// The map applying `self` first, then `next`.
    pub fn then(&self, next: &AffineMap) -> Result<AffineMap> {
        if self.a.nrows() != next.a.ncols() {
            return Err(McError::Dimension("maps do not compose".into()));
        }
        Ok(AffineMap {
            a: &next.a * &self.a,
            b: &next.a * &self.b + &next.b,
            noise: &next.a * &self.noise * next.a.transpose() + &next.noise,
        })
    }
}

pub fn propagate(state: &GaussianState, map: &AffineMap) -> Result<GaussianState> {
    let n = state.mean.len();
    if map.a.ncols() != n
        || map.a.nrows() != map.b.len()
        || map.noise.shape() != (map.b.len(), map.b.len())
    {
        return Err(McError::Dimension(format!(
            "state of dimension {n} through a {:?} map",
            map.a.shape()
        )));
    }
    Ok(GaussianState {
        mean: &map.a * &state.mean + &map.b,
        covariance: &map.a * &state.covariance * map.a.transpose() + &map.noise,
    })
}

/// What is measured on the two output modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// (e^{−iθ_f}a₁ + e^{∓iθ_b}a₂) + h.c.; `backward` selects e^{+iθ_b},
    /// the counter-propagating local oscillator of phase conjugation.
    JointQuadrature {
        theta_f: f64,
        theta_b: f64,
        backward: bool,
    },
    /// N₋ = n₁ − n₂.
    IntensityDifference,
}

impl Observable {
    fn quadrature_weights(theta_f: f64, theta_b: f64, backward: bool) -> [f64; 4] {
        // e^{−iθ}a + h.c. = 2(x cosθ + p sinθ)
        let tb = if backward { -theta_b } else { theta_b };
        [
            2.0 * theta_f.cos(),
            2.0 * theta_f.sin(),
            2.0 * tb.cos(),
            2.0 * tb.sin(),
        ]
    }
}

/// Exact mean and variance of an observable on a two-mode Gaussian state.
///
/// N₋ uses the Weyl symbol r₁² − r₂² of n₁ − n₂; its Wigner variance
/// exceeds the operator variance by 1/4 per mode.
pub fn exact_moments(state: &GaussianState, observable: Observable) -> Result<Moments> {
    if state.modes() != 2 {
        return Err(McError::Dimension(format!(
            "observables act on two modes, state has {}",
            state.modes()
        )));
    }
    let (m, s) = (&state.mean, &state.covariance);
    match observable {
        Observable::JointQuadrature {
            theta_f,
            theta_b,
            backward,
        } => {
            let g = DVector::from_row_slice(&Observable::quadrature_weights(
                theta_f, theta_b, backward,
            ));
            Ok(Moments {
                mean: g.dot(m),
                variance: (g.transpose() * s * &g)[(0, 0)],
            })
        }
        Observable::IntensityDifference => {
            let k = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 1.0, -1.0, -1.0]));
            let ks = &k * s;
            let variance =
                2.0 * (&ks * &ks).trace() + 4.0 * (m.transpose() * &ks * &k * m)[(0, 0)] - 0.5;
            Ok(Moments {
                mean: state.mean_photons(0) - state.mean_photons(1),
                variance,
            })
        }
    }
}

/// Shot-noise reference of an observable: 2 for the joint quadrature,
/// ⟨n₁⟩ + ⟨n₂⟩ for the intensity difference.
pub fn shot_noise(state: &GaussianState, observable: Observable) -> f64 {
    match observable {
        Observable::JointQuadrature { .. } => 2.0,
        Observable::IntensityDifference => state.mean_photons(0) + state.mean_photons(1),
    }
}
