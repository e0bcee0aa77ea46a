use rayon::prelude::*;

use super::{Result, RunConfig, SweepAxis, SweepError};
use crate::atomvapor::{doppler_average_with, susceptibility, DopplerOptions, Susceptibility};
use crate::fwmcoupling::{coupling_ffwm, coupling_pc, gain, CouplingStrength, Geometry};
use crate::quantumnoise::{
    apply_loss, ffwm_mode_transform, intensity_diff_from_map, optimal_quadrature_squeezing,
    pc_mode_transform_continued, quadrature_squeezing_db, AffineModeMap, DetectionConfig,
    LossChannel,
};

/// One evaluated grid point. Squeezing columns are in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// In CSV units: W/cm² for pump intensity, rad for phases.
    pub axis_value: f64,
    pub coupling_l: f64,
    /// NaN above the phase-conjugate threshold.
    pub gain: f64,
    pub mq_optimal_db: f64,
    pub mq_phase_db: f64,
    pub mid_db: f64,
    /// Rows past |κ|L = π/2 use the formal sec/tan continuation.
    pub above_threshold: bool,
    pub expansion_valid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn above_threshold_count(&self) -> usize {
        self.rows.iter().filter(|r| r.above_threshold).count()
    }

    /// A non-empty sweep with every row past threshold is a physics-domain
    /// failure for the caller to report; the rows themselves stay usable.
    pub fn check_threshold(&self) -> Result<()> {
        if !self.rows.is_empty() && self.above_threshold_count() == self.rows.len() {
            return Err(SweepError::AllAboveThreshold {
                points: self.rows.len(),
            });
        }
        Ok(())
    }
}

fn atom_response(
    cfg: &RunConfig,
    pump_intensity: f64,
) -> Result<(Susceptibility, crate::atomvapor::DriveConfig)> {
    let drive = cfg.drive(pump_intensity)?;
    let susc = match cfg.doppler {
        Some(shift) => doppler_average_with(
            &cfg.atom,
            &drive,
            &DopplerOptions {
                shift,
                ..Default::default()
            },
        )?,
        None => susceptibility(&cfg.atom, &drive)?,
    };
    Ok((susc, drive))
}

fn coupling_for(
    cfg: &RunConfig,
    susc: Option<&(Susceptibility, crate::atomvapor::DriveConfig)>,
    magnitude_l: Option<f64>,
) -> Result<CouplingStrength> {
    if let Some(x) = magnitude_l {
        return Ok(CouplingStrength::from_magnitude_l(cfg.geometry, x, 0.0)?);
    }
    let (s, drive) = susc.expect("atomic response is computed when coupling is not fixed");
    Ok(match cfg.geometry {
        Geometry::PhaseConjugate => coupling_pc(s, drive)?,
        Geometry::Forward => coupling_ffwm(s, drive, &cfg.geometry_config()?)?,
    })
}

/// Everything the detectors see at one grid value.
#[derive(Debug, Clone, PartialEq)]
pub struct PointModel {
    pub coupling: CouplingStrength,
    pub map: AffineModeMap,
    pub detection: DetectionConfig,
    pub eta: f64,
    pub above_threshold: bool,
    pub expansion_valid: bool,
}

/// Builds the lossy mode map for a single value of the configured axis.
pub fn point_model(cfg: &RunConfig, value: f64) -> Result<PointModel> {
    let mut eta = cfg.eta;
    let mut pump = cfg.pump_intensity;
    let mut magnitude_l = cfg.coupling_l;
    let (mut phase_f, mut phase_b) = (cfg.phase_f, cfg.phase_b);
    match cfg.axis {
        SweepAxis::Eta => eta = value,
        SweepAxis::PumpIntensity => pump = value,
        SweepAxis::CouplingL => magnitude_l = Some(value),
        // The axis value is the combined phase the joint quadrature sees.
        SweepAxis::HomodynePhase => (phase_f, phase_b) = (value, 0.0),
    }
    let response = match magnitude_l {
        Some(_) => None,
        None => Some(atom_response(cfg, pump)?),
    };
    let coupling = coupling_for(cfg, response.as_ref(), magnitude_l)?;
    let transform = match cfg.geometry {
        Geometry::PhaseConjugate => pc_mode_transform_continued(&coupling),
        Geometry::Forward => ffwm_mode_transform(&coupling)?,
    };
    Ok(PointModel {
        coupling,
        map: apply_loss(&transform, &LossChannel::symmetric(eta)?)?,
        detection: DetectionConfig::new(cfg.detection, phase_f, phase_b, cfg.seed)?,
        eta,
        above_threshold: !coupling.below_threshold(),
        expansion_valid: response.map_or(true, |(s, _)| s.expansion_valid),
    })
}

/// Evaluates a single grid value of the configured axis.
pub fn evaluate_point(cfg: &RunConfig, value: f64) -> Result<SweepRow> {
    let p = point_model(cfg, value)?;
    Ok(SweepRow {
        axis_value: cfg.display_axis_value(value),
        coupling_l: p.coupling.magnitude_l,
        gain: if p.above_threshold {
            f64::NAN
        } else {
            gain(&p.coupling)?
        },
        mq_optimal_db: optimal_quadrature_squeezing(&p.map)?.result.squeezing_db,
        mq_phase_db: quadrature_squeezing_db(&p.map, &p.detection)?.squeezing_db,
        mid_db: intensity_diff_from_map(&p.map, p.detection.seed)?.squeezing_db,
        above_threshold: p.above_threshold,
        expansion_valid: p.expansion_valid,
    })
}

/// Evaluates every grid point in parallel; rows keep grid order, so output
/// does not depend on the thread count.
///
/// Fails if any point hits a physics error. Points past the
/// phase-conjugate threshold come back as flagged rows.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepTable> {
    let rows = cfg
        .grid
        .par_iter()
        .map(|&v| evaluate_point(cfg, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        axis: cfg.axis,
        rows,
    })
}
