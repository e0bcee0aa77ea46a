//! Four-wave-mixing coupling constants, gain, pump propagation phase and
//! phase matching for the phase-conjugate and forward geometries.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use thiserror::Error;

use crate::atomvapor::{DriveConfig, Susceptibility};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CouplingError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("above threshold: |κ|L = {magnitude_l} ≥ π/2")]
    AboveThreshold { magnitude_l: f64 },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, CouplingError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Geometry {
    /// Counter-propagating pumps, backward conjugate (sec/tan solutions).
    PhaseConjugate,
    /// Single pump, co-propagating probe and conjugate (cosh/sinh).
    Forward,
}

impl Geometry {
    pub fn name(self) -> &'static str {
        match self {
            Geometry::PhaseConjugate => "pc",
            Geometry::Forward => "forward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConfig {
    pub geometry: Geometry,
    /// Pump–probe angle θ, rad.
    pub theta: f64,
    /// Interaction length L, m.
    pub length: f64,
}

impl GeometryConfig {
    pub fn new(geometry: Geometry, theta: f64, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(CouplingError::Domain(format!(
                "length must be positive, got {length}"
            )));
        }
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(CouplingError::Domain(format!(
                "theta must be ≥ 0, got {theta}"
            )));
        }
        Ok(Self {
            geometry,
            theta,
            length,
        })
    }
}

/// κ (phase-conjugate) or ν (forward) in rad/m, with the interaction length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingStrength {
    pub geometry: Geometry,
    pub value: Complex64,
    pub length: f64,
    /// |value|·L.
    pub magnitude_l: f64,
}

impl CouplingStrength {
    pub fn new(geometry: Geometry, value: Complex64, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(CouplingError::Domain(format!(
                "length must be positive, got {length}"
            )));
        }
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(CouplingError::Domain(format!(
                "coupling must be finite, got {value}"
            )));
        }
        Ok(Self {
            geometry,
            value,
            length,
            magnitude_l: value.norm() * length,
        })
    }

    /// Coupling with a prescribed |value|·L and phase arg(value), on unit length.
    pub fn from_magnitude_l(geometry: Geometry, magnitude_l: f64, phase: f64) -> Result<Self> {
        if !(magnitude_l.is_finite() && magnitude_l >= 0.0) {
            return Err(CouplingError::Domain(format!(
                "|coupling|·L must be ≥ 0, got {magnitude_l}"
            )));
        }
        let mut c = Self::new(geometry, Complex64::from_polar(magnitude_l, phase), 1.0)?;
        c.magnitude_l = magnitude_l;
        Ok(c)
    }

    /// value/|value|, taken as 1 at zero coupling.
    pub fn unit_phase(&self) -> Complex64 {
        let n = self.value.norm();
        if n == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self.value / n
        }
    }

    pub fn phase(&self) -> f64 {
        self.unit_phase().arg()
    }

    /// Forward coupling has no threshold.
    pub fn below_threshold(&self) -> bool {
        match self.geometry {
            Geometry::PhaseConjugate => self.magnitude_l < FRAC_PI_2,
            Geometry::Forward => true,
        }
    }
}

/// κ = −(k/2)·χ_NL over the drive's interaction length.
pub fn coupling_pc(susc: &Susceptibility, drive: &DriveConfig) -> Result<CouplingStrength> {
    CouplingStrength::new(
        Geometry::PhaseConjugate,
        -0.5 * drive.wavenumber * susc.chi_nl,
        drive.length,
    )
}

/// ν = −(k/(2cosθ))·χ_lin·I_p/I_sΔ over the geometry's length.
///
/// Evaluated as (k/(2cosθ))·χ_NL, which is the same quantity for the
/// weak-pump expansion and stays defined for velocity-averaged values.
pub fn coupling_ffwm(
    susc: &Susceptibility,
    drive: &DriveConfig,
    geom: &GeometryConfig,
) -> Result<CouplingStrength> {
    if geom.geometry != Geometry::Forward {
        return Err(CouplingError::Domain("ν needs the forward geometry".into()));
    }
    if !(geom.theta < FRAC_PI_2) {
        return Err(CouplingError::Domain(format!(
            "theta must be below π/2, got {}",
            geom.theta
        )));
    }
    let value = drive.wavenumber / (2.0 * geom.theta.cos()) * susc.chi_nl;
    CouplingStrength::new(Geometry::Forward, value, geom.length)
}

/// Pump propagation rate δ = (k/2)·χ_lin·(1 − 3I_p/I_sΔ) = (k/2)(χ_lin + 3χ_NL).
pub fn pump_phase_delta(susc: &Susceptibility, drive: &DriveConfig) -> Complex64 {
    0.5 * drive.wavenumber * (susc.chi_lin + 3.0 * susc.chi_nl)
}

/// Optimal probe–pump angle α = √(|Re χ_lin|·I_p/I_sΔ).
///
/// Uses the dispersive part of the complex radicand; χ_lin·I_p/I_sΔ is
/// taken as −χ_NL so velocity-averaged values work too.
pub fn phase_match_angle(susc: &Susceptibility) -> Result<f64> {
    let radicand = (-susc.chi_nl).re.abs();
    if !radicand.is_finite() {
        return Err(CouplingError::Degenerate(format!(
            "phase-matching radicand is not finite ({radicand})"
        )));
    }
    Ok(radicand.sqrt())
}

/// Wave-vector mismatch δ_k = δ + k − k·cosα (diagnostic only).
pub fn phase_mismatch(delta: Complex64, wavenumber: f64, alpha: f64) -> Complex64 {
    delta + wavenumber * (1.0 - alpha.cos())
}

/// Probe power gain: sec²(|κ|L) or cosh²(|ν|L).
pub fn gain(c: &CouplingStrength) -> Result<f64> {
    match c.geometry {
        Geometry::PhaseConjugate => {
            if !c.below_threshold() {
                return Err(CouplingError::AboveThreshold {
                    magnitude_l: c.magnitude_l,
                });
            }
            Ok(c.magnitude_l.cos().powi(-2))
        }
        Geometry::Forward => Ok(c.magnitude_l.cosh().powi(2)),
    }
}
