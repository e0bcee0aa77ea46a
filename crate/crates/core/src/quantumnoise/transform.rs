use nalgebra::{Matrix4, SMatrix};
use num_complex::Complex64;

use super::{NoiseError, Result};
use crate::fwmcoupling::{CouplingStrength, Geometry};

type C = Complex64;

/// Linear input–output map on (a₁, a₁†, a₂, a₂†).
///
/// Mode 1 is the seeded mode (forward probe for phase conjugation, a₋ for
/// the forward geometry); mode 2 is the conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTransform {
    pub matrix: Matrix4<C>,
    pub geometry: Geometry,
    pub coupling: CouplingStrength,
}

/// Commutator metric J = diag(1, −1, 1, −1) for the (a, a†) ordering.
pub fn commutator_metric() -> Matrix4<C> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(
        C::from(1.0),
        C::from(-1.0),
        C::from(1.0),
        C::from(-1.0),
    ))
}

fn cross_map(diag: f64, cross: f64, unit: C) -> Matrix4<C> {
    let z = C::new(0.0, 0.0);
    let s = C::from(diag);
    let u = C::i() * unit * cross;
    let uc = u.conj();
    Matrix4::new(
        s, z, z, u, //
        z, s, uc, z, //
        z, u, s, z, //
        uc, z, z, s,
    )
}

impl ModeTransform {
    /// M·J·M† − J, zero for commutator-preserving maps.
    pub fn symplectic_defect(&self) -> f64 {
        let j = commutator_metric();
        (self.matrix * j * self.matrix.adjoint() - j).norm()
    }
}

/// a_f(L) = sec(|κ|L)·a_f + i(κ/|κ|)tan(|κ|L)·a_b†, and symmetrically for
/// the backward mode.
pub fn pc_mode_transform(c: &CouplingStrength) -> Result<ModeTransform> {
    if c.geometry != Geometry::PhaseConjugate {
        return Err(NoiseError::Domain(
            "expected a phase-conjugate coupling".into(),
        ));
    }
    if !c.below_threshold() {
        return Err(NoiseError::AboveThreshold {
            magnitude_l: c.magnitude_l,
        });
    }
    Ok(pc_mode_transform_continued(c))
}

/// The sec/tan map evaluated without the threshold check.
///
/// Above threshold this is a formal continuation of the periodic
/// solutions, used only to draw flagged sweep rows.
pub fn pc_mode_transform_continued(c: &CouplingStrength) -> ModeTransform {
    let x = c.magnitude_l;
    ModeTransform {
        matrix: cross_map(1.0 / x.cos(), x.tan(), c.unit_phase()),
        geometry: Geometry::PhaseConjugate,
        coupling: *c,
    }
}

/// a₋(L) = cosh(|ν|L)·a₋ + i(ν/|ν|)sinh(|ν|L)·a₊†, and symmetrically for a₊.
pub fn ffwm_mode_transform(c: &CouplingStrength) -> Result<ModeTransform> {
    if c.geometry != Geometry::Forward {
        return Err(NoiseError::Domain("expected a forward coupling".into()));
    }
    let x = c.magnitude_l;
    Ok(ModeTransform {
        matrix: cross_map(x.cosh(), x.sinh(), c.unit_phase()),
        geometry: Geometry::Forward,
        coupling: *c,
    })
}

/// Either transform, chosen by the coupling's geometry.
pub fn mode_transform(c: &CouplingStrength) -> Result<ModeTransform> {
    match c.geometry {
        Geometry::PhaseConjugate => pc_mode_transform(c),
        Geometry::Forward => ffwm_mode_transform(c),
    }
}

/// Power transmissions of the two output arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    pub eta_f: f64,
    pub eta_b: f64,
}

impl LossChannel {
    pub fn new(eta_f: f64, eta_b: f64) -> Result<Self> {
        for (name, eta) in [("eta_f", eta_f), ("eta_b", eta_b)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(NoiseError::Domain(format!(
                    "{name} must lie in [0, 1], got {eta}"
                )));
            }
        }
        Ok(Self { eta_f, eta_b })
    }

    pub fn symmetric(eta: f64) -> Result<Self> {
        Self::new(eta, eta)
    }

    pub fn lossless() -> Self {
        Self {
            eta_f: 1.0,
            eta_b: 1.0,
        }
    }
}

/// Output operators as a linear combination of the signal inputs
/// (a₁, a₁†, a₂, a₂†) and the injected vacua (v₁, v₁†, v₂, v₂†).
///
/// Column order of `matrix`: the four signal entries, then the four vacuum
/// entries. Loss acts as a ↦ √η·a + i√(1−η)·v.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineModeMap {
    pub matrix: SMatrix<C, 4, 8>,
    pub transform: ModeTransform,
    pub loss: LossChannel,
}

impl AffineModeMap {
    pub fn geometry(&self) -> Geometry {
        self.transform.geometry
    }

    /// Coefficients of output annihilator `mode` (0 or 1) on the input
    /// annihilators (A) and creators (B) of modes 1, 2, v₁, v₂.
    #[cfg(test)]
    pub(crate) fn annihilator_coefficients(&self, mode: usize) -> ([C; 4], [C; 4]) {
        let row = self.matrix.row(2 * mode);
        let a = [row[0], row[2], row[4], row[6]];
        let b = [row[1], row[3], row[5], row[7]];
        (a, b)
    }
}

pub fn apply_loss(t: &ModeTransform, loss: &LossChannel) -> Result<AffineModeMap> {
    let loss = LossChannel::new(loss.eta_f, loss.eta_b)?;
    let z = C::new(0.0, 0.0);
    let (sf, sb) = (loss.eta_f.sqrt(), loss.eta_b.sqrt());
    let transmission = Matrix4::from_diagonal(&nalgebra::Vector4::new(
        C::from(sf),
        C::from(sf),
        C::from(sb),
        C::from(sb),
    ));
    let (vf, vb) = ((1.0 - loss.eta_f).sqrt(), (1.0 - loss.eta_b).sqrt());
    let vacuum = Matrix4::new(
        C::new(0.0, vf),
        z,
        z,
        z, //
        z,
        C::new(0.0, -vf),
        z,
        z, //
        z,
        z,
        C::new(0.0, vb),
        z, //
        z,
        z,
        z,
        C::new(0.0, -vb),
    );
    let signal = transmission * t.matrix;
    let mut matrix = SMatrix::<C, 4, 8>::zeros();
    matrix.fixed_view_mut::<4, 4>(0, 0).copy_from(&signal);
    matrix.fixed_view_mut::<4, 4>(0, 4).copy_from(&vacuum);
    Ok(AffineModeMap {
        matrix,
        transform: t.clone(),
        loss,
    })
}
