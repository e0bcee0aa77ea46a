use super::{AtomError, Result};
use crate::constants::BOLTZMANN;

/// Most-probable thermal speed u = √(2 k_B T / m), m/s.
///
/// This is also the width parameter of the longitudinal velocity
/// distribution S(v) ∝ exp(−v²/u²).
pub fn avg_thermal_velocity(temperature: f64, mass: f64) -> Result<f64> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(AtomError::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(AtomError::Domain(format!(
            "mass must be positive, got {mass}"
        )));
    }
    Ok((2.0 * BOLTZMANN * temperature / mass).sqrt())
}

/// Rate at which atoms moving at `speed` cross `distance`, in s⁻¹.
///
/// Callers choose which decay channel (`gamma_23`, `gamma_24`) this feeds
/// and what distance applies (cell size or beam width).
pub fn wall_collision_rate(speed: f64, distance: f64) -> Result<f64> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(AtomError::Domain(format!(
            "distance must be positive, got {distance}"
        )));
    }
    if !(speed.is_finite() && speed >= 0.0) {
        return Err(AtomError::Domain(format!("speed must be ≥ 0, got {speed}")));
    }
    Ok(speed / distance)
}
