//! Physical constants (CODATA 2018) and a few atomic reference values.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Mass of a rubidium-87 atom, kg.
pub const RB87_MASS: f64 = 86.909_180_527 * ATOMIC_MASS_UNIT;
/// Rubidium D2 line vacuum wavelength (rounded), m.
pub const RB_D2_WAVELENGTH: f64 = 780.0e-9;

/// Conversion factor from W/cm² to W/m².
pub const W_PER_CM2: f64 = 1.0e4;
