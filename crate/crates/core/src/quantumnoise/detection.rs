use std::f64::consts::{FRAC_PI_2, PI};

use super::transform::{apply_loss, mode_transform, AffineModeMap, LossChannel};
use super::{NoiseError, Result};
use crate::fwmcoupling::{CouplingStrength, Geometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detection {
    JointQuadrature,
    IntensityDifference,
}

impl Detection {
    pub fn name(self) -> &'static str {
        match self {
            Detection::JointQuadrature => "quadrature",
            Detection::IntensityDifference => "intensity_difference",
        }
    }
}

/// Coherent seed on mode 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Seed {
    /// Mean photon number γ ≥ 0.
    Photons(f64),
    /// The γ → ∞ limit; statistics are reported per seed photon.
    Bright,
}

impl Seed {
    pub fn validate(self) -> Result<Self> {
        match self {
            Seed::Photons(g) if !(g.is_finite() && g >= 0.0) => Err(NoiseError::Domain(format!(
                "seed photon number must be ≥ 0, got {g}"
            ))),
            s => Ok(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionConfig {
    pub detection: Detection,
    /// Homodyne phase on mode 1 (θ_f, or θ₋ for the forward geometry), rad.
    pub theta_f: f64,
    /// Homodyne phase on mode 2 (θ_b, or θ₊), rad.
    pub theta_b: f64,
    pub seed: Seed,
}

impl DetectionConfig {
    pub fn new(detection: Detection, theta_f: f64, theta_b: f64, seed: Seed) -> Result<Self> {
        if !(theta_f.is_finite() && theta_b.is_finite()) {
            return Err(NoiseError::Domain("homodyne phases must be finite".into()));
        }
        Ok(Self {
            detection,
            theta_f,
            theta_b,
            seed: seed.validate()?,
        })
    }

    /// Joint quadrature with the given phase difference (θ_f − θ_b, or
    /// θ₊ + θ₋ for the forward geometry) carried on mode 1.
    pub fn quadrature(phase: f64) -> Self {
        Self {
            detection: Detection::JointQuadrature,
            theta_f: phase,
            theta_b: 0.0,
            seed: Seed::Photons(0.0),
        }
    }

    pub fn intensity_difference(seed: Seed) -> Self {
        Self {
            detection: Detection::IntensityDifference,
            theta_f: 0.0,
            theta_b: 0.0,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingResult {
    pub noise_variance: f64,
    pub shot_noise_variance: f64,
    /// 10·log₁₀(noise/shot); negative values are squeezed.
    pub squeezing_db: f64,
    pub geometry: Geometry,
    pub detection: Detection,
}

impl SqueezingResult {
    fn new(noise: f64, shot: f64, geometry: Geometry, detection: Detection) -> Result<Self> {
        if shot == 0.0 {
            return Err(NoiseError::Undefined(
                "shot-noise reference is zero (no light reaches the detectors)".into(),
            ));
        }
        Ok(Self {
            noise_variance: noise,
            shot_noise_variance: shot,
            squeezing_db: 10.0 * (noise / shot).log10(),
            geometry,
            detection,
        })
    }
}

/// Combined phase the joint quadrature depends on: θ_f − θ_b for phase
/// conjugation, θ₊ + θ₋ for the forward geometry.
pub fn quadrature_phase(geometry: Geometry, det: &DetectionConfig) -> f64 {
    match geometry {
        Geometry::PhaseConjugate => det.theta_f - det.theta_b,
        Geometry::Forward => det.theta_f + det.theta_b,
    }
}

/// Gains of the lossy two-mode squeezer behind a map, with S − T and S + T
/// formed without cancellation so large couplings stay accurate.
struct Squeezer {
    s: f64,
    t: f64,
    s_minus_t: f64,
    s_plus_t: f64,
    psi: f64,
    eta_f: f64,
    eta_b: f64,
}

impl Squeezer {
    fn of(map: &AffineModeMap) -> Self {
        let c = &map.transform.coupling;
        let x = c.magnitude_l;
        let (s, t, s_minus_t, s_plus_t) = match map.geometry() {
            Geometry::PhaseConjugate => {
                let (sn, cs) = x.sin_cos();
                // sec ∓ tan = (1 ∓ sin)/cos = cos/(1 ± sin)
                let minus = if sn > 0.0 {
                    cs / (1.0 + sn)
                } else {
                    (1.0 - sn) / cs
                };
                let plus = if sn < 0.0 {
                    cs / (1.0 - sn)
                } else {
                    (1.0 + sn) / cs
                };
                (1.0 / cs, sn / cs, minus, plus)
            }
            Geometry::Forward => (x.cosh(), x.sinh(), (-x).exp(), x.exp()),
        };
        Self {
            s,
            t,
            s_minus_t,
            s_plus_t,
            psi: c.phase(),
            eta_f: map.loss.eta_f,
            eta_b: map.loss.eta_b,
        }
    }

    /// Combined detector phase of the quadrature minimum.
    fn optimal_phase(&self) -> f64 {
        if self.s * self.t >= 0.0 {
            self.psi + 1.5 * PI
        } else {
            self.psi + FRAC_PI_2
        }
    }

    /// Var = P + 8√(η_f η_b)·S·T·cos²(φ/2), φ = π/2 + ψ − (combined phase),
    /// written about the minimum so the offset `d` from it enters only
    /// through sin²(d/2).
    fn quadrature_variance(&self, d: f64) -> f64 {
        let r = (self.eta_f * self.eta_b).sqrt();
        let dd = (self.eta_f.sqrt() - self.eta_b.sqrt()).powi(2);
        let vacuum = 2.0 - self.eta_f - self.eta_b;
        let st = self.s * self.t;
        let base = dd * (self.s * self.s + self.t * self.t) + vacuum;
        let half = (0.5 * d).sin().powi(2);
        if st >= 0.0 {
            base + 2.0 * r * self.s_minus_t.powi(2) + 8.0 * r * st * half
        } else {
            base + 2.0 * r * self.s_plus_t.powi(2) - 8.0 * r * st * half
        }
    }
}

/// Variance of j = (e^{−iθ₁}a₁ + e^{∓iθ₂}a₂) + h.c. in units where a single
/// vacuum quadrature X = a + a† has variance 1, so the shot level is 2.
///
/// For phase conjugation the backward local oscillator counter-propagates
/// and enters with e^{+iθ_b}, which makes the variance a function of θ_f − θ_b.
pub fn joint_quadrature_variance(map: &AffineModeMap, det: &DetectionConfig) -> f64 {
    let sq = Squeezer::of(map);
    let d = quadrature_phase(map.geometry(), det) - sq.optimal_phase();
    sq.quadrature_variance(d)
}

pub const QUADRATURE_SHOT_NOISE: f64 = 2.0;

pub fn quadrature_squeezing_db(
    map: &AffineModeMap,
    det: &DetectionConfig,
) -> Result<SqueezingResult> {
    SqueezingResult::new(
        joint_quadrature_variance(map, det),
        QUADRATURE_SHOT_NOISE,
        map.geometry(),
        Detection::JointQuadrature,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalQuadrature {
    pub result: SqueezingResult,
    /// Minimizing θ_f − θ_b (or θ₊ + θ₋), rad, in [0, 2π).
    pub phase: f64,
}

/// Golden-section minimum of the joint-quadrature variance over the
/// combined detector phase.
///
/// The search brackets ±π/2 around the analytic optimum arg(coupling) + 3π/2
/// (arg(coupling) + π/2 when the continued gains S·T turn negative), inside
/// which the sinusoidal variance is unimodal. Tolerance 10⁻⁶ rad.
pub fn optimal_quadrature_squeezing(map: &AffineModeMap) -> Result<OptimalQuadrature> {
    let sq = Squeezer::of(map);
    let f = |d: f64| sq.quadrature_variance(d);
    let (mut a, mut b) = (-FRAC_PI_2, FRAC_PI_2);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-6 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let (offset, variance) = [(mid, f(mid)), (0.0, f(0.0))]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("two candidates");
    Ok(OptimalQuadrature {
        result: SqueezingResult::new(
            variance,
            QUADRATURE_SHOT_NOISE,
            map.geometry(),
            Detection::JointQuadrature,
        )?,
        phase: (sq.optimal_phase() + offset).rem_euclid(2.0 * PI),
    })
}

/// Means and variance of N₋ = n₁ − n₂ at the detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityStats {
    pub mean_photons: [f64; 2],
    pub variance: f64,
    /// ⟨n₁⟩ + ⟨n₂⟩, the variance of coherent beams of equal power.
    pub shot_noise: f64,
}

/// Exact Gaussian photon statistics for a finite seed; for `Seed::Bright`
/// the leading order in γ, divided by γ.
///
/// Uses S² − T² = 1 so that the near-cancelling photon numbers of the two
/// arms never get subtracted.
pub fn intensity_difference_stats(map: &AffineModeMap, seed: Seed) -> Result<IntensityStats> {
    let seed = seed.validate()?;
    let sq = Squeezer::of(map);
    let (ef, eb) = (sq.eta_f, sq.eta_b);
    let (s2, t2) = (sq.s * sq.s, sq.t * sq.t);
    let de = ef - eb;
    // Linear (seed-driven) part per seed photon.
    let linear =
        (ef + de * t2).powi(2) + s2 * t2 * de * de + ef * (1.0 - ef) * s2 + eb * (1.0 - eb) * t2;
    let coherent = [ef * s2, eb * t2];
    let (gamma, bright) = match seed {
        Seed::Photons(g) => (g, false),
        Seed::Bright => (1.0, true),
    };
    if bright {
        return Ok(IntensityStats {
            mean_photons: coherent,
            variance: linear,
            shot_noise: coherent[0] + coherent[1],
        });
    }
    let quadratic = t2 * (s2 * de * de + ef * (1.0 - ef) + eb * (1.0 - eb));
    let mean = [gamma * coherent[0] + ef * t2, gamma * coherent[1] + eb * t2];
    Ok(IntensityStats {
        mean_photons: mean,
        variance: gamma * linear + quadratic,
        shot_noise: mean[0] + mean[1],
    })
}

/// Intensity-difference squeezing of a map's outputs.
///
/// With both arms fully absorbed the ratio is taken as its η → 0 limit,
/// 0 dB, as long as the lossless outputs carry light.
pub fn intensity_diff_from_map(map: &AffineModeMap, seed: Seed) -> Result<SqueezingResult> {
    let stats = intensity_difference_stats(map, seed)?;
    if stats.shot_noise == 0.0 && map.loss.eta_f == 0.0 && map.loss.eta_b == 0.0 {
        let lossless = apply_loss(&map.transform, &LossChannel::lossless())?;
        if intensity_difference_stats(&lossless, seed)?.shot_noise > 0.0 {
            return Ok(SqueezingResult {
                noise_variance: 0.0,
                shot_noise_variance: 0.0,
                squeezing_db: 0.0,
                geometry: map.geometry(),
                detection: Detection::IntensityDifference,
            });
        }
    }
    SqueezingResult::new(
        stats.variance,
        stats.shot_noise,
        map.geometry(),
        Detection::IntensityDifference,
    )
}

/// Intensity-difference squeezing for a coupling, loss and seed.
pub fn intensity_diff_squeezing_db(
    c: &CouplingStrength,
    loss: &LossChannel,
    det: &DetectionConfig,
) -> Result<SqueezingResult> {
    if det.detection != Detection::IntensityDifference {
        return Err(NoiseError::Domain(
            "expected intensity-difference detection".into(),
        ));
    }
    let map = apply_loss(&mode_transform(c)?, loss)?;
    intensity_diff_from_map(&map, det.seed)
}

/// Mean detected photon numbers (⟨n₁⟩, ⟨n₂⟩) for a finite seed.
pub fn output_photon_numbers(map: &AffineModeMap, det: &DetectionConfig) -> Result<(f64, f64)> {
    if matches!(det.seed, Seed::Bright) {
        return Err(NoiseError::Domain(
            "photon numbers need a finite seed photon number".into(),
        ));
    }
    let s = intensity_difference_stats(map, det.seed)?;
    Ok((s.mean_photons[0], s.mean_photons[1]))
}

/// Dispatches on the detection type; quadrature uses the configured phases.
pub fn squeezing(map: &AffineModeMap, det: &DetectionConfig) -> Result<SqueezingResult> {
    match det.detection {
        Detection::JointQuadrature => quadrature_squeezing_db(map, det),
        Detection::IntensityDifference => intensity_diff_from_map(map, det.seed),
    }
}
