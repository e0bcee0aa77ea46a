//! Four-level atom model: steady-state density matrix, linear and
//! nonlinear susceptibilities of the pumped vapor, and thermal averaging.
//!
//! Level |1⟩ and |3⟩ form the mixing transition. Level |2⟩ is a spectator
//! ground state reached through the decoherence channel `gamma_23`; atoms
//! are returned to |1⟩ by optical pumping through |4⟩. Rate subscripts follow
//! the equations of motion: `gamma_ab` is the population flow *into* `a`
//! *from* `b` (so `gamma_23` feeds level 2 from level 3).

mod doppler;
pub mod quadrature;
mod steady_state;
mod susceptibility;
mod thermal;

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::{RB87_MASS, RB_D2_WAVELENGTH};

pub use doppler::{doppler_average, doppler_average_with, DopplerOptions, DopplerShift};
pub use steady_state::{rabi_from_intensity, steady_state_numeric, DensityMatrix};
pub use susceptibility::{
    analytic_population_difference, saturated_chi_31, saturation_intensity, susceptibility,
    two_level_susceptibility,
};
pub use thermal::{avg_thermal_velocity, wall_collision_rate};

/// Angular frequency of the reference spontaneous-emission rate Γ used by the
/// rubidium presets, 2π × 6 MHz.
pub const RB_GAMMA: f64 = 2.0 * std::f64::consts::PI * 6.0e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtomError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular configuration: {0}")]
    Singular(String),
    #[error("steady-state solve failed (condition number ≈ {condition:.3e}): {reason}")]
    Solver { reason: String, condition: f64 },
    #[error("velocity integration did not converge: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, AtomError>;

fn require(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(AtomError::Domain(what()))
    }
}

/// Decay structure, dipole moment and density of the four-level vapor.
///
/// All rates are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomModel {
    pub gamma_13: f64,
    pub gamma_14: f64,
    pub gamma_23: f64,
    pub gamma_24: f64,
    /// Total decay rate of |3⟩.
    pub gamma_3: f64,
    /// Total decay rate of |4⟩.
    pub gamma_4: f64,
    pub gamma_31: f64,
    pub gamma_42: f64,
    pub gamma_32: f64,
    pub gamma_41: f64,
    pub gamma_43: f64,
    pub gamma_21: f64,
    /// Transition dipole moment of |3⟩↔|1⟩, C·m.
    pub dipole_31: f64,
    /// Atomic number density, m⁻³.
    pub density: f64,
    /// Atomic mass, kg.
    pub mass: f64,
}

/// Population branch rates of the decay graph, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRates {
    pub gamma_13: f64,
    pub gamma_14: f64,
    pub gamma_23: f64,
    pub gamma_24: f64,
}

impl AtomModel {
    /// Builds the model from the four population branch rates.
    ///
    /// Total rates are the branch sums. The optical coherences default to
    /// `gamma_31 = gamma_13 / 2` and `gamma_42 = gamma_24 / 2`, the assignment
    /// under which the weak-pump closed forms for `I_sΔ` and `χ_lin` are exact
    /// steady states of the density-matrix equations. The remaining
    /// coherences take radiative half-sums plus `gamma_23` of dephasing.
    pub fn from_branch_rates(
        rates: BranchRates,
        dipole_31: f64,
        density: f64,
        mass: f64,
    ) -> Result<Self> {
        let BranchRates {
            gamma_13,
            gamma_14,
            gamma_23,
            gamma_24,
        } = rates;
        let gamma_3 = gamma_13 + gamma_23;
        let gamma_4 = gamma_14 + gamma_24;
        let model = Self {
            gamma_13,
            gamma_14,
            gamma_23,
            gamma_24,
            gamma_3,
            gamma_4,
            gamma_31: 0.5 * gamma_13,
            gamma_42: 0.5 * gamma_24,
            gamma_32: 0.5 * gamma_3 + gamma_23,
            gamma_41: 0.5 * gamma_4 + gamma_23,
            gamma_43: 0.5 * (gamma_3 + gamma_4) + gamma_23,
            gamma_21: gamma_23,
            dipole_31,
            density,
            mass,
        };
        model.validate()?;
        Ok(model)
    }

    /// Rubidium parameters used throughout the squeezing projections:
    /// Γ = 2π×6 MHz on both optical branches into |1⟩, `gamma_24` = 2π×30 kHz,
    /// d₃₁ = 1.1×10⁻²⁹ C·m, n = 10¹⁶ m⁻³, ⁸⁷Rb mass. Only the decoherence rate
    /// is left free.
    pub fn rubidium_reference(gamma_23: f64) -> Result<Self> {
        Self::from_branch_rates(
            BranchRates {
                gamma_13: RB_GAMMA,
                gamma_14: RB_GAMMA,
                gamma_23,
                gamma_24: 2.0 * std::f64::consts::PI * 30.0e3,
            },
            1.1e-29,
            1.0e16,
            RB87_MASS,
        )
    }

    pub fn with_density(mut self, density: f64) -> Result<Self> {
        self.density = density;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("gamma_13", self.gamma_13),
            ("gamma_14", self.gamma_14),
            ("gamma_23", self.gamma_23),
            ("gamma_24", self.gamma_24),
            ("gamma_3", self.gamma_3),
            ("gamma_4", self.gamma_4),
            ("gamma_31", self.gamma_31),
            ("gamma_42", self.gamma_42),
            ("gamma_32", self.gamma_32),
            ("gamma_41", self.gamma_41),
            ("gamma_43", self.gamma_43),
            ("gamma_21", self.gamma_21),
        ];
        for (name, value) in rates {
            require(value.is_finite() && value >= 0.0, || {
                format!("{name} must be a finite non-negative rate, got {value}")
            })?;
        }
        require(self.dipole_31.is_finite() && self.dipole_31 > 0.0, || {
            format!("dipole_31 must be positive, got {}", self.dipole_31)
        })?;
        require(self.density.is_finite() && self.density > 0.0, || {
            format!("density must be positive, got {}", self.density)
        })?;
        require(self.mass.is_finite() && self.mass > 0.0, || {
            format!("mass must be positive, got {}", self.mass)
        })?;
        let tol = 1e-12 * (self.gamma_3 + self.gamma_4).max(1.0);
        require(
            (self.gamma_3 - self.gamma_13 - self.gamma_23).abs() <= tol
                && (self.gamma_4 - self.gamma_14 - self.gamma_24).abs() <= tol,
            || "total decay rates must equal the sum of their branches".to_string(),
        )
    }
}

/// Pump detunings, intensity and propagation geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    /// Detuning from the |1⟩→|3⟩ resonance, rad/s.
    pub delta_1: f64,
    /// Detuning from the |2⟩→|4⟩ resonance, rad/s.
    pub delta_2: f64,
    /// Pump intensity I_p, W/m².
    pub pump_intensity: f64,
    /// Vacuum wavenumber k = 2π/λ, rad/m.
    pub wavenumber: f64,
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    /// Interaction length, m.
    pub length: f64,
    /// Vapor temperature, K.
    pub temperature: f64,
}

impl DriveConfig {
    pub fn new(
        delta_1: f64,
        delta_2: f64,
        pump_intensity: f64,
        wavelength: f64,
        length: f64,
        temperature: f64,
    ) -> Result<Self> {
        let drive = Self {
            delta_1,
            delta_2,
            pump_intensity,
            wavenumber: 2.0 * std::f64::consts::PI / wavelength,
            wavelength,
            length,
            temperature,
        };
        drive.validate()?;
        Ok(drive)
    }

    /// Degenerate pumps at 780 nm, 3 cm interaction length, 110 °C vapor.
    pub fn rubidium_reference(delta: f64, pump_intensity: f64) -> Result<Self> {
        Self::new(delta, delta, pump_intensity, RB_D2_WAVELENGTH, 0.03, 383.15)
    }

    pub fn with_pump_intensity(mut self, pump_intensity: f64) -> Result<Self> {
        self.pump_intensity = pump_intensity;
        self.validate()?;
        Ok(self)
    }

    pub fn with_detunings(mut self, delta_1: f64, delta_2: f64) -> Result<Self> {
        self.delta_1 = delta_1;
        self.delta_2 = delta_2;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        require(self.delta_1.is_finite() && self.delta_2.is_finite(), || {
            "detunings must be finite".to_string()
        })?;
        require(
            self.pump_intensity.is_finite() && self.pump_intensity >= 0.0,
            || format!("pump intensity must be ≥ 0, got {}", self.pump_intensity),
        )?;
        require(self.wavelength.is_finite() && self.wavelength > 0.0, || {
            format!("wavelength must be positive, got {}", self.wavelength)
        })?;
        let k = 2.0 * std::f64::consts::PI / self.wavelength;
        require((self.wavenumber - k).abs() <= 1e-12 * k, || {
            "wavenumber must equal 2π/wavelength".to_string()
        })?;
        require(self.length.is_finite() && self.length > 0.0, || {
            format!("length must be positive, got {}", self.length)
        })?;
        require(
            self.temperature.is_finite() && self.temperature > 0.0,
            || format!("temperature must be positive, got {}", self.temperature),
        )
    }
}

/// The complex rates ξ₃₁ = iΔ₁ − Γ₃₁ and ξ₄₂ = iΔ₂ − Γ₄₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexRateFactors {
    pub xi_31: Complex64,
    pub xi_42: Complex64,
}

impl ComplexRateFactors {
    pub fn new(atom: &AtomModel, delta_1: f64, delta_2: f64) -> Self {
        Self {
            xi_31: Complex64::new(-atom.gamma_31, delta_1),
            xi_42: Complex64::new(-atom.gamma_42, delta_2),
        }
    }

    pub fn from_drive(atom: &AtomModel, drive: &DriveConfig) -> Self {
        Self::new(atom, drive.delta_1, drive.delta_2)
    }

    /// Checks the definitional relation against an atom and detuning pair.
    pub fn is_consistent(&self, atom: &AtomModel, delta_1: f64, delta_2: f64) -> bool {
        let expected = Self::new(atom, delta_1, delta_2);
        let close = |a: Complex64, b: Complex64| (a - b).norm() <= 1e-12 * b.norm().max(1.0);
        close(self.xi_31, expected.xi_31) && close(self.xi_42, expected.xi_42)
    }
}

/// Linear and third-order susceptibility of the pumped vapor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibility {
    pub chi_lin: Complex64,
    pub chi_nl: Complex64,
    /// Off-resonant saturation intensity I_sΔ, W/m². For velocity-averaged
    /// values this is the effective scale |⟨χ_lin⟩| / |⟨χ_lin / I_sΔ⟩|.
    pub i_sat: f64,
    /// σ₁₁ − σ₃₃ at the pump intensity.
    pub population_diff: f64,
    /// Pump intensity the values were evaluated at, W/m².
    pub pump_intensity: f64,
    /// False when I_p ≥ I_sΔ, where the weak-pump expansion is not valid.
    pub expansion_valid: bool,
}

impl Susceptibility {
    /// I_p / I_sΔ.
    pub fn saturation_ratio(&self) -> f64 {
        self.pump_intensity / self.i_sat
    }
}
