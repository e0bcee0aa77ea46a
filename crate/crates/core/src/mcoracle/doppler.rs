use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use super::{McError, Result};
use crate::atomvapor::{
    avg_thermal_velocity, susceptibility, AtomModel, DopplerShift, DriveConfig,
};

/// Monte-Carlo velocity average of the stationary-atom susceptibilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerSample {
    pub chi_lin: Complex64,
    pub chi_nl: Complex64,
    pub samples: usize,
}

const CHUNK: usize = 1 << 14;

/// Averages χ_lin and χ_NL over v ~ N(0, u²/2) by stratified sampling:
/// v_i = (u/√2)·Φ⁻¹((i + U_i)/N) with U_i uniform on [0, 1).
pub fn mc_doppler_average(
    atom: &AtomModel,
    drive: &DriveConfig,
    shift: DopplerShift,
    samples: usize,
    seed: u64,
) -> Result<DopplerSample> {
    if samples < super::MIN_SAMPLES {
        return Err(McError::TooFewSamples {
            requested: samples,
            minimum: super::MIN_SAMPLES,
        });
    }
    let u = avg_thermal_velocity(drive.temperature, atom.mass)?;
    let normal = Normal::new(0.0, u / std::f64::consts::SQRT_2)
        .map_err(|e| McError::NonPhysical(format!("velocity distribution: {e}")))?;
    // Surface configuration errors once, before the parallel loop.
    susceptibility(atom, drive)?;
    let sign_2 = match shift {
        DopplerShift::Common => 1.0,
        DopplerShift::Opposite => -1.0,
    };
    let n = samples as f64;
    let chunks = samples.div_ceil(CHUNK);
    let partials: Vec<Result<(Complex64, Complex64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let mut sums = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for i in c * CHUNK..(samples.min((c + 1) * CHUNK)) {
                let p = (i as f64 + rng.random::<f64>()) / n;
                let kv = drive.wavenumber * normal.inverse_cdf(p.clamp(1e-300, 1.0 - 1e-16));
                let moving =
                    drive.with_detunings(drive.delta_1 - kv, drive.delta_2 - sign_2 * kv)?;
                let s = susceptibility(atom, &moving)?;
                sums.0 += s.chi_lin;
                sums.1 += s.chi_nl;
            }
            Ok(sums)
        })
        .collect();
    let mut chi_lin = Complex64::new(0.0, 0.0);
    let mut chi_nl = Complex64::new(0.0, 0.0);
    for p in partials {
        let (a, b) = p?;
        chi_lin += a;
        chi_nl += b;
    }
    Ok(DopplerSample {
        chi_lin: chi_lin / n,
        chi_nl: chi_nl / n,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomvapor::{doppler_average, RB_GAMMA};
    use crate::constants::W_PER_CM2;

    #[test]
    fn stratified_average_matches_quadrature() {
        let atom = AtomModel::rubidium_reference(0.1 * RB_GAMMA).unwrap();
        let drive = DriveConfig::rubidium_reference(50.0 * RB_GAMMA, 8.0 * W_PER_CM2).unwrap();
        let mc = mc_doppler_average(&atom, &drive, DopplerShift::Common, 200_000, 5).unwrap();
        let q = doppler_average(&atom, &drive).unwrap();
        assert!((mc.chi_lin - q.chi_lin).norm() / q.chi_lin.norm() < 1e-2);
        assert!((mc.chi_nl - q.chi_nl).norm() / q.chi_nl.norm() < 1e-2);
    }

    #[test]
    fn rejects_tiny_runs() {
        let atom = AtomModel::rubidium_reference(0.1 * RB_GAMMA).unwrap();
        let drive = DriveConfig::rubidium_reference(50.0 * RB_GAMMA, 1.0).unwrap();
        assert!(mc_doppler_average(&atom, &drive, DopplerShift::Common, 5, 1).is_err());
    }
}
