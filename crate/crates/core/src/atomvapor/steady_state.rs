use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;

use super::{AtomError, AtomModel, DriveConfig, Result};
use crate::constants::{EPSILON_0, HBAR, SPEED_OF_LIGHT};

const DIM: usize = 4;
const CONDITION_LIMIT: f64 = 1e13;

/// Rabi frequency Ω = 2 d₃₁|E|/ħ of a pump of intensity I = 2ε₀c|E|².
pub fn rabi_from_intensity(atom: &AtomModel, intensity: f64) -> f64 {
    let field = (intensity / (2.0 * EPSILON_0 * SPEED_OF_LIGHT)).sqrt();
    2.0 * atom.dipole_31 * field / HBAR
}

/// Steady-state density matrix in the rotating frame, indexed from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub Matrix4<Complex64>);

impl DensityMatrix {
    pub fn element(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i - 1, j - 1)]
    }

    pub fn population(&self, level: usize) -> f64 {
        self.element(level, level).re
    }

    /// σ₁₁ − σ₃₃.
    pub fn population_difference_13(&self) -> f64 {
        self.population(1) - self.population(3)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest |σ_ij − conj(σ_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.0.adjoint();
        (self.0 - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    (i - 1) * DIM + (j - 1)
}

/// Generator of the density-matrix equations acting on vec(σ), row-major.
struct Liouvillian {
    m: DMatrix<Complex64>,
}

impl Liouvillian {
    fn new() -> Self {
        Self {
            m: DMatrix::zeros(DIM * DIM, DIM * DIM),
        }
    }

    /// Adds `terms` to the equation for σ_ij and, for off-diagonal
    /// elements, the conjugate equation for σ_ji.
    fn equation(&mut self, (i, j): (usize, usize), terms: &[(Complex64, (usize, usize))]) {
        for &(c, (k, l)) in terms {
            self.m[(idx(i, j), idx(k, l))] += c;
            if i != j {
                self.m[(idx(j, i), idx(l, k))] += c.conj();
            }
        }
    }
}

fn build(atom: &AtomModel, drive: &DriveConfig, rabi_p1: f64, rabi_p2: f64) -> Liouvillian {
    let i = Complex64::i();
    let half_i = 0.5 * i;
    let w1 = Complex64::from(rabi_p1);
    let w2 = Complex64::from(rabi_p2);
    let re = Complex64::from;
    let (d1, d2) = (drive.delta_1, drive.delta_2);

    let mut l = Liouvillian::new();
    l.equation(
        (1, 1),
        &[
            (half_i * w1.conj(), (3, 1)),
            (-half_i * w1, (1, 3)),
            (re(atom.gamma_13), (3, 3)),
            (re(atom.gamma_14), (4, 4)),
        ],
    );
    l.equation(
        (2, 2),
        &[
            (half_i * w2.conj(), (4, 2)),
            (-half_i * w2, (2, 4)),
            (re(atom.gamma_23), (3, 3)),
            (re(atom.gamma_24), (4, 4)),
        ],
    );
    l.equation(
        (3, 3),
        &[
            (half_i * w1, (1, 3)),
            (-half_i * w1.conj(), (3, 1)),
            (re(-atom.gamma_3), (3, 3)),
        ],
    );
    l.equation(
        (4, 4),
        &[
            (half_i * w2, (2, 4)),
            (-half_i * w2.conj(), (4, 2)),
            (re(-atom.gamma_4), (4, 4)),
        ],
    );
    l.equation(
        (4, 3),
        &[
            (half_i * w2, (2, 3)),
            (-half_i * w1.conj(), (4, 1)),
            (Complex64::new(-atom.gamma_43, d2 - d1), (4, 3)),
        ],
    );
    l.equation(
        (4, 2),
        &[
            (half_i * w2, (2, 2)),
            (-half_i * w2, (4, 4)),
            (Complex64::new(-atom.gamma_42, d2), (4, 2)),
        ],
    );
    l.equation(
        (4, 1),
        &[
            (half_i * w2, (2, 1)),
            (-half_i * w1, (4, 3)),
            (Complex64::new(-atom.gamma_41, d2), (4, 1)),
        ],
    );
    l.equation(
        (3, 2),
        &[
            (half_i * w1, (1, 2)),
            (-half_i * w2, (3, 4)),
            (Complex64::new(-atom.gamma_32, d1), (3, 2)),
        ],
    );
    l.equation(
        (3, 1),
        &[
            (half_i * w1, (1, 1)),
            (-half_i * w1, (3, 3)),
            (Complex64::new(-atom.gamma_31, d1), (3, 1)),
        ],
    );
    l.equation(
        (2, 1),
        &[
            (half_i * w2.conj(), (4, 1)),
            (-half_i * w1, (2, 3)),
            (Complex64::new(-atom.gamma_21, d2 - d1), (2, 1)),
        ],
    );
    l
}

fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Steady state of the four-level density-matrix equations.
///
/// Solves L·vec(σ) = 0 with the σ₁₁ equation replaced by the trace
/// condition σ₁₁ + σ₂₂ + σ₃₃ + σ₄₄ = 1. With both pumps off every
/// population is left in |1⟩.
pub fn steady_state_numeric(
    atom: &AtomModel,
    drive: &DriveConfig,
    rabi_p1: f64,
    rabi_p2: f64,
) -> Result<DensityMatrix> {
    atom.validate()?;
    drive.validate()?;
    if !(rabi_p1.is_finite() && rabi_p2.is_finite()) {
        return Err(AtomError::Domain("Rabi frequencies must be finite".into()));
    }
    if rabi_p1 == 0.0 && rabi_p2 == 0.0 {
        let mut ground = Matrix4::zeros();
        ground[(0, 0)] = Complex64::from(1.0);
        return Ok(DensityMatrix(ground));
    }

    let mut system = build(atom, drive, rabi_p1, rabi_p2).m;
    let trace_row = idx(1, 1);
    // Scale the trace row to the generator's magnitude to keep the
    // system well balanced.
    let scale = system.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    system.row_mut(trace_row).fill(Complex64::from(0.0));
    for level in 1..=DIM {
        system[(trace_row, idx(level, level))] = Complex64::from(scale);
    }
    let mut rhs = DVector::zeros(DIM * DIM);
    rhs[trace_row] = Complex64::from(scale);

    let condition = condition_number(&system);
    if !(condition < CONDITION_LIMIT) {
        return Err(AtomError::Solver {
            reason: "steady-state system is singular for these rates".into(),
            condition,
        });
    }
    let solution = system.lu().solve(&rhs).ok_or_else(|| AtomError::Solver {
        reason: "LU factorisation failed".into(),
        condition,
    })?;
    let rho = Matrix4::from_fn(|r, c| solution[r * DIM + c]);
    Ok(DensityMatrix(rho))
}
