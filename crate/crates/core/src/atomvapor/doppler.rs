//! Averages over the longitudinal Maxwell–Boltzmann velocity distribution
//! S(v) = exp(−v²/u²)/(u√π).

use num_complex::Complex64;

use super::quadrature::{adaptive_kronrod, gauss_hermite_cached};
use super::susceptibility::{linear_parts, saturation_intensity};
use super::{
    avg_thermal_velocity, AtomError, AtomModel, ComplexRateFactors, DriveConfig, Result,
    Susceptibility,
};

/// How the second pump's detuning shifts with atomic velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DopplerShift {
    /// Both fields see Δ − kv (co-propagating beams).
    #[default]
    Common,
    /// Δ₁ − kv and Δ₂ + kv (counter-propagating beams).
    Opposite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerOptions {
    pub shift: DopplerShift,
    /// Agreement required between three successive Gauss–Hermite rules
    /// (64, 128, 256, 512 nodes) before that result is accepted.
    pub hermite_tolerance: f64,
    /// Relative tolerance of the adaptive Gauss–Kronrod fallback.
    pub adaptive_tolerance: f64,
    /// Skip Gauss–Hermite and integrate adaptively straight away.
    pub force_adaptive: bool,
    pub max_segments: usize,
}

impl Default for DopplerOptions {
    fn default() -> Self {
        Self {
            shift: DopplerShift::Common,
            hermite_tolerance: 1e-6,
            adaptive_tolerance: 1e-10,
            force_adaptive: false,
            max_segments: 50_000,
        }
    }
}

/// Integration range in units of u; e^{−81} is far below double precision.
const X_MAX: f64 = 9.0;
const HERMITE_ORDERS: [usize; 4] = [64, 128, 256, 512];

pub fn doppler_average(atom: &AtomModel, drive: &DriveConfig) -> Result<Susceptibility> {
    doppler_average_with(atom, drive, &DopplerOptions::default())
}

/// Velocity-averaged susceptibilities.
///
/// χ_lin is averaged directly. Because χ_NL ∝ χ_lin/I_sΔ is linear in I_p,
/// ⟨χ_NL⟩ = −I_p ⟨χ_lin/I_sΔ⟩. The returned `i_sat` is the effective scale
/// |⟨χ_lin⟩|/|⟨χ_lin/I_sΔ⟩| and `population_diff` the averaged saturated
/// population difference.
pub fn doppler_average_with(
    atom: &AtomModel,
    drive: &DriveConfig,
    options: &DopplerOptions,
) -> Result<Susceptibility> {
    atom.validate()?;
    drive.validate()?;
    // Surfaces singular decay structures before integrating.
    saturation_intensity(atom, &ComplexRateFactors::from_drive(atom, drive))?;

    let u = avg_thermal_velocity(drive.temperature, atom.mass)?;
    let ku = drive.wavenumber * u;
    let sign_2 = match options.shift {
        DopplerShift::Common => 1.0,
        DopplerShift::Opposite => -1.0,
    };
    let zero = Complex64::new(0.0, 0.0);
    let integrand = |x: f64| -> [Complex64; 3] {
        let shift = ku * x;
        let rates =
            ComplexRateFactors::new(atom, drive.delta_1 - shift, drive.delta_2 - sign_2 * shift);
        let Ok(i_sat) = saturation_intensity(atom, &rates) else {
            return [Complex64::new(f64::NAN, 0.0); 3];
        };
        let (population, chi_lin) = linear_parts(atom, &rates);
        let saturated = population / (1.0 + drive.pump_intensity / i_sat);
        [chi_lin, chi_lin / i_sat, Complex64::from(saturated)]
    };

    let averaged = if ku == 0.0 {
        integrand(0.0)
    } else {
        let hermite = if options.force_adaptive {
            None
        } else {
            hermite_average(&integrand, options.hermite_tolerance)
        };
        match hermite {
            Some(v) => v,
            None => adaptive_average(&integrand, atom, drive, ku, sign_2, options)?,
        }
    };
    if averaged
        .iter()
        .any(|c| !c.re.is_finite() || !c.im.is_finite())
    {
        return Err(AtomError::Integration("non-finite velocity average".into()));
    }
    let [chi_lin, chi_over_isat, population] = averaged;
    if chi_over_isat == zero {
        return Err(AtomError::Singular("averaged χ_lin/I_sΔ vanishes".into()));
    }
    let i_sat = chi_lin.norm() / chi_over_isat.norm();
    Ok(Susceptibility {
        chi_lin,
        chi_nl: -drive.pump_intensity * chi_over_isat,
        i_sat,
        population_diff: population.re,
        pump_intensity: drive.pump_intensity,
        expansion_valid: drive.pump_intensity < i_sat,
    })
}

fn max_rel_diff(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = y.norm();
            if scale == 0.0 {
                x.norm()
            } else {
                (x - y).norm() / scale
            }
        })
        .fold(0.0, f64::max)
}

fn hermite_average(f: &impl Fn(f64) -> [Complex64; 3], tol: f64) -> Option<[Complex64; 3]> {
    let norm = std::f64::consts::PI.sqrt().recip();
    let mut history: Vec<[Complex64; 3]> = Vec::new();
    for n in HERMITE_ORDERS {
        let mut r = gauss_hermite_cached(n).integrate(f);
        r.iter_mut().for_each(|c| *c *= norm);
        history.push(r);
        if let [.., a, b, c] = history.as_slice() {
            if max_rel_diff(b, a) <= tol && max_rel_diff(c, b) <= tol {
                return Some(*c);
            }
        }
    }
    None
}

fn adaptive_average(
    f: &impl Fn(f64) -> [Complex64; 3],
    atom: &AtomModel,
    drive: &DriveConfig,
    ku: f64,
    sign_2: f64,
    options: &DopplerOptions,
) -> Result<[Complex64; 3]> {
    let norm = std::f64::consts::PI.sqrt().recip();
    let weighted = |x: f64| {
        let w = (-x * x).exp() * norm;
        f(x).map(|c| c * w)
    };
    // Resonant velocity classes and a ladder of points around each so the
    // first pass already sees the narrow features.
    let centres = [drive.delta_1 / ku, sign_2 * drive.delta_2 / ku];
    let widths = [atom.gamma_31 / ku, atom.gamma_42 / ku];
    let mut cuts = Vec::new();
    for &c in &centres {
        cuts.push(c);
        for &w in &widths {
            for m in [0.3, 1.0, 3.0, 10.0, 30.0, 100.0] {
                cuts.push(c - m * w);
                cuts.push(c + m * w);
            }
        }
    }
    cuts.extend((-8..=8).map(f64::from));
    adaptive_kronrod(
        weighted,
        -X_MAX,
        X_MAX,
        &cuts,
        options.adaptive_tolerance,
        options.max_segments,
    )
    .ok_or_else(|| {
        AtomError::Integration(format!(
            "adaptive quadrature exceeded {} segments",
            options.max_segments
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomvapor::{susceptibility, RB_GAMMA};
    use crate::constants::W_PER_CM2;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn reference() -> (AtomModel, DriveConfig) {
        (
            AtomModel::rubidium_reference(0.1 * RB_GAMMA).unwrap(),
            DriveConfig::rubidium_reference(50.0 * RB_GAMMA, 8.0 * W_PER_CM2).unwrap(),
        )
    }

    #[test]
    fn cold_vapor_reduces_to_stationary_atoms() {
        let (atom, drive) = reference();
        let mut cold = drive;
        cold.temperature = 1e-12;
        let avg = doppler_average(&atom, &cold).unwrap();
        let still = susceptibility(&atom, &cold).unwrap();
        assert!(rel(avg.chi_lin, still.chi_lin) < 1e-6);
        assert!(rel(avg.chi_nl, still.chi_nl) < 1e-6);
    }

    #[test]
    fn hermite_and_adaptive_agree_for_broad_lines() {
        // Millikelvin vapor: ku is comparable to the optical widths and
        // the Gauss–Hermite sequence converges on its own.
        let (atom, mut drive) = reference();
        drive.temperature = 3e-4;
        drive = drive
            .with_detunings(2.0 * RB_GAMMA, 2.0 * RB_GAMMA)
            .unwrap();
        let opts = DopplerOptions {
            force_adaptive: true,
            ..Default::default()
        };
        let a = doppler_average_with(&atom, &drive, &opts).unwrap();
        let h = doppler_average(&atom, &drive).unwrap();
        assert!(rel(a.chi_lin, h.chi_lin) < 1e-6);
        assert!(rel(a.chi_nl, h.chi_nl) < 1e-6);
    }

    #[test]
    fn hot_vapor_matches_dense_trapezoid() {
        let (atom, drive) = reference();
        let avg = doppler_average(&atom, &drive).unwrap();

        let u = avg_thermal_velocity(drive.temperature, atom.mass).unwrap();
        let ku = drive.wavenumber * u;
        let h = 2e-6;
        let n = (2.0 * X_MAX / h) as i64;
        let mut chi = Complex64::new(0.0, 0.0);
        let mut g = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let x = -X_MAX + i as f64 * h;
            let r = ComplexRateFactors::new(&atom, drive.delta_1 - ku * x, drive.delta_2 - ku * x);
            let isat = saturation_intensity(&atom, &r).unwrap();
            let (_, c) = linear_parts(&atom, &r);
            let w = (-x * x).exp() * h / std::f64::consts::PI.sqrt();
            chi += c * w;
            g += c / isat * w;
        }
        assert!(rel(avg.chi_lin, chi) < 1e-7, "{} vs {}", avg.chi_lin, chi);
        assert!(rel(avg.chi_nl, -drive.pump_intensity * g) < 1e-7);
    }

    #[test]
    fn detuning_parity() {
        let (atom, drive) = reference();
        let d = 40.0 * RB_GAMMA;
        let pos = doppler_average(&atom, &drive.with_detunings(d, d).unwrap()).unwrap();
        let neg = doppler_average(&atom, &drive.with_detunings(-d, -d).unwrap()).unwrap();
        assert!(rel(neg.chi_lin, -pos.chi_lin.conj()) < 1e-8);
        assert!(rel(neg.chi_nl, -pos.chi_nl.conj()) < 1e-8);
    }

    #[test]
    fn averaging_enhances_weak_pump_nonlinearity() {
        // Near-resonant velocity classes saturate far more easily than
        // atoms 50Γ away, so the averaged χ_NL dominates the stationary one.
        let (atom, drive) = reference();
        let avg = doppler_average(&atom, &drive).unwrap();
        let still = susceptibility(&atom, &drive).unwrap();
        assert!(avg.chi_nl.norm() > 100.0 * still.chi_nl.norm());
        assert!(avg.i_sat < still.i_sat);
    }

    #[test]
    fn opposite_shift_differs_from_common() {
        let (atom, drive) = reference();
        let common = doppler_average(&atom, &drive).unwrap();
        let opts = DopplerOptions {
            shift: DopplerShift::Opposite,
            ..Default::default()
        };
        let opposite = doppler_average_with(&atom, &drive, &opts).unwrap();
        assert!(rel(opposite.chi_nl, common.chi_nl) > 1e-3);
    }

    #[test]
    fn singular_structure_is_reported() {
        let (mut atom, drive) = reference();
        atom.gamma_24 = 0.0;
        atom.gamma_4 = atom.gamma_14;
        assert!(matches!(
            doppler_average(&atom, &drive),
            Err(AtomError::Singular(_))
        ));
    }
}
