//! Closed-form lossless and bright-seed results, used as cross-checks on
//! the general covariance path. `x` is |κ|L or |ν|L, `psi` the coupling phase.

use num_complex::Complex64;

/// 2|sec x + i·e^{−iΔθ}e^{iψ}·tan x|², Δθ = θ_f − θ_b.
pub fn pc_quadrature_variance_lossless(x: f64, psi: f64, dtheta: f64) -> f64 {
    let t = Complex64::i() * Complex64::from_polar(x.tan(), psi - dtheta);
    2.0 * (Complex64::from(1.0 / x.cos()) + t).norm_sqr()
}

/// 2|−i·cosh x + e^{−iΣ}e^{iψ}·sinh x|², Σ = θ₊ + θ₋.
pub fn ffwm_quadrature_variance_lossless(x: f64, psi: f64, sigma: f64) -> f64 {
    let t = Complex64::from_polar(x.sinh(), psi - sigma);
    2.0 * (Complex64::new(0.0, -x.cosh()) + t).norm_sqr()
}

/// Shot noise of the single-seeded phase conjugator: γsec²x + (γ+2)tan²x.
pub fn pc_shot_noise(x: f64, gamma: f64) -> f64 {
    gamma / x.cos().powi(2) + (gamma + 2.0) * x.tan().powi(2)
}

/// Shot noise of the single-seeded forward mixer: (1+γ)cosh 2x − 1.
pub fn ffwm_shot_noise(x: f64, gamma: f64) -> f64 {
    (1.0 + gamma) * (2.0 * x).cosh() - 1.0
}

/// Lossless noise-to-shot ratio γ / [γsec²x + (γ+2)tan²x].
pub fn pc_intensity_diff_lossless_ratio(x: f64, gamma: f64) -> f64 {
    gamma / pc_shot_noise(x, gamma)
}

/// 10·log₁₀[1 − η(2 + 4/(cos 2x − 3))], bright seed, η_f = η_b = η.
pub fn pc_intensity_diff_bright_db(x: f64, eta: f64) -> f64 {
    10.0 * (1.0 - eta * (2.0 + 4.0 / ((2.0 * x).cos() - 3.0))).log10()
}

/// 10·log₁₀[1 − η + η·sech 2x], bright seed, η₊ = η₋ = η.
pub fn ffwm_intensity_diff_bright_db(x: f64, eta: f64) -> f64 {
    10.0 * (1.0 - eta + eta / (2.0 * x).cosh()).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn optimal_phase_limits() {
        let x: f64 = 0.9;
        let pc = pc_quadrature_variance_lossless(x, 0.0, 1.5 * PI);
        assert!((pc - 2.0 * (1.0 / x.cos() - x.tan()).powi(2)).abs() < 1e-13);
        let fw = ffwm_quadrature_variance_lossless(x, 0.0, 1.5 * PI);
        assert!((fw - 2.0 * (-2.0 * x).exp()).abs() < 1e-13);
    }

    #[test]
    fn shot_noise_substitution() {
        assert!((pc_shot_noise(PI / 4.0, 100.0) - 302.0).abs() < 1e-10);
        assert_eq!(ffwm_shot_noise(0.0, 5.0), 5.0);
    }

    #[test]
    fn zero_coupling_and_full_loss_are_zero_db() {
        assert_eq!(pc_intensity_diff_bright_db(0.0, 1.0), 0.0);
        assert_eq!(ffwm_intensity_diff_bright_db(0.0, 1.0), 0.0);
        assert_eq!(pc_intensity_diff_bright_db(1.2, 0.0), 0.0);
        assert_eq!(ffwm_intensity_diff_bright_db(1.2, 0.0), 0.0);
    }
}
