use num_complex::Complex64;

use super::{AtomError, AtomModel, ComplexRateFactors, DriveConfig, Result, Susceptibility};
use crate::constants::{EPSILON_0, HBAR, SPEED_OF_LIGHT};

/// Weights of the two optical-pumping cycles in the zero-intensity
/// population balance: (Γ₁₄Γ₂₄Γ₃|ξ₃₁|², Γ₁₃Γ₂₃Γ₄|ξ₄₂|²).
fn pumping_weights(atom: &AtomModel, rates: &ComplexRateFactors) -> (f64, f64) {
    let a =
        atom.gamma_14 * atom.gamma_24 * (atom.gamma_13 + atom.gamma_23) * rates.xi_31.norm_sqr();
    let b =
        atom.gamma_13 * atom.gamma_23 * (atom.gamma_14 + atom.gamma_24) * rates.xi_42.norm_sqr();
    (a, b)
}

/// Off-resonant saturation intensity I_sΔ, W/m².
pub fn saturation_intensity(atom: &AtomModel, rates: &ComplexRateFactors) -> Result<f64> {
    let denom =
        atom.dipole_31.powi(2) * atom.gamma_13 * atom.gamma_24 * (atom.gamma_14 + atom.gamma_23);
    if !(denom > 0.0) {
        return Err(AtomError::Singular(
            "I_sΔ needs gamma_13, gamma_24 and gamma_14 + gamma_23 all > 0".into(),
        ));
    }
    let (a, b) = pumping_weights(atom, rates);
    let i_sat = EPSILON_0 * SPEED_OF_LIGHT * HBAR * HBAR * (a + b) / denom;
    if !(i_sat > 0.0 && i_sat.is_finite()) {
        return Err(AtomError::Singular(format!(
            "saturation intensity is not positive ({i_sat})"
        )));
    }
    Ok(i_sat)
}

/// Weak-pump population difference σ₁₁ − σ₃₃ to first order in I_p/I_sΔ.
pub fn analytic_population_difference(
    atom: &AtomModel,
    rates: &ComplexRateFactors,
    pump_intensity: f64,
) -> Result<f64> {
    let i_sat = saturation_intensity(atom, rates)?;
    let (a, b) = pumping_weights(atom, rates);
    Ok(a / (a + b) * (1.0 - pump_intensity / i_sat))
}

/// Unsaturated population difference and χ_lin for one detuning pair.
pub(super) fn linear_parts(atom: &AtomModel, rates: &ComplexRateFactors) -> (f64, Complex64) {
    let (a, b) = pumping_weights(atom, rates);
    let population = a / (a + b);
    let prefactor = atom.density * atom.dipole_31.powi(2) / (HBAR * EPSILON_0);
    let chi_lin = -Complex64::i() * prefactor / rates.xi_31 * population;
    (population, chi_lin)
}

/// Linear and nonlinear susceptibility of stationary atoms.
///
/// χ_NL = −χ_lin · I_p/I_sΔ is the first-order term of the saturation
/// expansion. When I_p ≥ I_sΔ the values are still returned but flagged
/// through `expansion_valid`.
pub fn susceptibility(atom: &AtomModel, drive: &DriveConfig) -> Result<Susceptibility> {
    atom.validate()?;
    drive.validate()?;
    let rates = ComplexRateFactors::from_drive(atom, drive);
    let i_sat = saturation_intensity(atom, &rates)?;
    let (population, chi_lin) = linear_parts(atom, &rates);
    let ratio = drive.pump_intensity / i_sat;
    Ok(Susceptibility {
        chi_lin,
        chi_nl: -chi_lin * ratio,
        i_sat,
        population_diff: population / (1.0 + ratio),
        pump_intensity: drive.pump_intensity,
        expansion_valid: drive.pump_intensity < i_sat,
    })
}

/// χ₃₁ with the saturated population difference, i.e. before the
/// weak-pump expansion: −i n|d₃₁|²/(ħε₀ξ₃₁) · σ₁₁,₃₃.
pub fn saturated_chi_31(atom: &AtomModel, drive: &DriveConfig) -> Result<Complex64> {
    let rates = ComplexRateFactors::from_drive(atom, drive);
    let i_sat = saturation_intensity(atom, &rates)?;
    let (_, chi_lin) = linear_parts(atom, &rates);
    Ok(chi_lin / (1.0 + drive.pump_intensity / i_sat))
}

/// Textbook two-level susceptibility for detuning `delta` and field
/// amplitude squared `field_sq` (V²/m², with I = 2ε₀c|E|²).
///
/// The saturation field is |E_sΔ|² = ħ²Γ₃Γ₃₁(1 + Δ²/Γ₃₁²)/(4|d|²), i.e. the
/// T₁T₂ form with T₁ = 1/Γ₃ and T₂ = 1/Γ₃₁.
pub fn two_level_susceptibility(atom: &AtomModel, delta: f64, field_sq: f64) -> Complex64 {
    let g = atom.gamma_31;
    let lorentz = 1.0 + (delta / g).powi(2);
    let d2 = atom.dipole_31.powi(2);
    let e_sat_sq = HBAR * HBAR * atom.gamma_3 * g * lorentz / (4.0 * d2);
    let prefactor = -atom.density * d2 / (HBAR * EPSILON_0 * g * lorentz);
    Complex64::new(delta / g, -1.0) * prefactor / (1.0 + field_sq / e_sat_sq)
}
