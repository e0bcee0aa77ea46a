//! Parameter sweeps: configuration, evaluation over a grid, CSV output and
//! the built-in presets.

mod config;
mod output;
mod presets;
mod run;

pub use config::{parse_config, ConfigError, RunConfig, SweepAxis};
pub use output::{emit_csv, read_csv, write_csv, CSV_HEADER};
pub use presets::{preset, PresetFile, PRESET_NAMES};
pub use run::{evaluate_point, point_model, run_sweep, PointModel, SweepRow, SweepTable};

use crate::atomvapor::AtomError;
use crate::fwmcoupling::CouplingError;
use crate::quantumnoise::NoiseError;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("atomic model: {0}")]
    Atom(#[from] AtomError),
    #[error("coupling: {0}")]
    Coupling(#[from] CouplingError),
    #[error("noise: {0}")]
    Noise(#[from] NoiseError),
    #[error("all {points} grid points are above the phase-conjugate threshold")]
    AllAboveThreshold { points: usize },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl SweepError {
    /// True for errors in the input file rather than in the physics.
    pub fn is_config(&self) -> bool {
        matches!(self, SweepError::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, SweepError>;
