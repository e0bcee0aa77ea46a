use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::AffineMap;
use crate::quantumnoise::AffineModeMap;

/// a₁' = s·a₁ + u·a₂†, a₂' = s·a₂ + u·a₁† with u = i·e^{iψ}·t, written out
/// on (x₁, p₁, x₂, p₂).
fn two_mode_squeezer(s: f64, t: f64, psi: f64) -> AffineMap {
    // u·(x − ip) = (u_r x + u_i p) + i(u_i x − u_r p)
    let (ur, ui) = (-t * psi.sin(), t * psi.cos());
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(4, 4, &[
        s,  0.0, ur,  ui,
        0.0, s,  ui, -ur,
        ur,  ui, s,  0.0,
        ui, -ur, 0.0, s,
    ]);
    AffineMap {
        a,
        b: DVector::zeros(4),
        noise: DMatrix::zeros(4, 4),
    }
}

/// Phase-conjugate mixer with |κ|L = x and arg κ = ψ.
pub fn pc_map(x: f64, psi: f64) -> AffineMap {
    two_mode_squeezer(1.0 / x.cos(), x.tan(), psi)
}

/// Forward mixer with |ν|L = x and arg ν = ψ.
pub fn ffwm_map(x: f64, psi: f64) -> AffineMap {
    two_mode_squeezer(x.cosh(), x.sinh(), psi)
}

/// Beam splitters of transmission η₁, η₂ mixing in vacuum:
/// x' = √η·x − √(1−η)·p_v, p' = √η·p + √(1−η)·x_v.
pub fn loss_map(eta_1: f64, eta_2: f64) -> AffineMap {
    let t = [eta_1.sqrt(), eta_1.sqrt(), eta_2.sqrt(), eta_2.sqrt()];
    let v = [1.0 - eta_1, 1.0 - eta_1, 1.0 - eta_2, 1.0 - eta_2];
    AffineMap {
        a: DMatrix::from_diagonal(&DVector::from_row_slice(&t)),
        b: DVector::zeros(4),
        noise: DMatrix::from_diagonal(&DVector::from_row_slice(&v)) * 0.25,
    }
}

/// Real form of a complex map a_i' = Σ_k A_ik a_k + B_ik a_k†, with A and B
/// read from the (a, a†) interleaved columns of `rows` (annihilator rows only).
fn realify(rows: &[Vec<Complex64>], inputs: usize) -> DMatrix<f64> {
    let mut r = DMatrix::zeros(2 * rows.len(), 2 * inputs);
    for (i, row) in rows.iter().enumerate() {
        for k in 0..inputs {
            let (a, b) = (row[2 * k], row[2 * k + 1]);
            let (plus, minus) = (a + b, a - b);
            r[(2 * i, 2 * k)] = plus.re;
            r[(2 * i, 2 * k + 1)] = -minus.im;
            r[(2 * i + 1, 2 * k)] = plus.im;
            r[(2 * i + 1, 2 * k + 1)] = minus.re;
        }
    }
    r
}

/// Converts a 4×4 map on (a₁, a₁†, a₂, a₂†) to quadratures.
pub fn from_mode_matrix(m: &nalgebra::Matrix4<Complex64>) -> AffineMap {
    let rows: Vec<Vec<Complex64>> = [0, 2]
        .iter()
        .map(|&i| m.row(i).iter().copied().collect())
        .collect();
    AffineMap {
        a: realify(&rows, 2),
        b: DVector::zeros(4),
        noise: DMatrix::zeros(4, 4),
    }
}

/// Converts a lossy map; the vacuum columns become injected covariance.
pub fn from_affine_mode_map(map: &AffineModeMap) -> AffineMap {
    let rows: Vec<Vec<Complex64>> = [0, 2]
        .iter()
        .map(|&i| map.matrix.row(i).iter().copied().collect())
        .collect();
    let full = realify(&rows, 4);
    let signal = full.columns(0, 4).into_owned();
    let vacuum = full.columns(4, 4).into_owned();
    AffineMap {
        a: signal,
        b: DVector::zeros(4),
        noise: &vacuum * vacuum.transpose() * 0.25,
    }
}
