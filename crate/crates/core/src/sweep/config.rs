//! Plain-text run configuration: one `key = value [unit]` per line, `#`
//! comments, `[section]` headers ignored.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use crate::atomvapor::{AtomModel, BranchRates, DopplerShift, DriveConfig, RB_GAMMA};
use crate::constants::{ATOMIC_MASS_UNIT, RB87_MASS, RB_D2_WAVELENGTH, W_PER_CM2};
use crate::fwmcoupling::{Geometry, GeometryConfig};
use crate::quantumnoise::{Detection, Seed};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line of the offending entry, when there is one.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: Option<usize>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    PumpIntensity,
    Eta,
    CouplingL,
    HomodynePhase,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::PumpIntensity => "pump_intensity",
            SweepAxis::Eta => "eta",
            SweepAxis::CouplingL => "coupling_l",
            SweepAxis::HomodynePhase => "phase",
        }
    }
}

/// Fully resolved run; all quantities in SI units (rates in rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub atom: AtomModel,
    /// Δ₁ = Δ₂, rad/s.
    pub delta: f64,
    /// W/m².
    pub pump_intensity: f64,
    pub wavelength: f64,
    pub length: f64,
    pub temperature: f64,
    pub geometry: Geometry,
    pub theta: f64,
    pub eta: f64,
    pub seed: Seed,
    pub detection: Detection,
    pub phase_f: f64,
    pub phase_b: f64,
    /// Bypasses the atomic model with a fixed |coupling|·L.
    pub coupling_l: Option<f64>,
    pub axis: SweepAxis,
    /// Axis values in SI units (W/m² for pump intensity, rad for phases).
    pub grid: Vec<f64>,
    pub doppler: Option<DopplerShift>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn drive(&self, pump_intensity: f64) -> crate::atomvapor::Result<DriveConfig> {
        DriveConfig::new(
            self.delta,
            self.delta,
            pump_intensity,
            self.wavelength,
            self.length,
            self.temperature,
        )
    }

    pub fn geometry_config(&self) -> crate::fwmcoupling::Result<GeometryConfig> {
        GeometryConfig::new(self.geometry, self.theta, self.length)
    }

    /// Axis values in the units written to CSV (W/cm² for pump intensity).
    pub fn display_axis_value(&self, v: f64) -> f64 {
        match self.axis {
            SweepAxis::PumpIntensity => v / W_PER_CM2,
            _ => v,
        }
    }
}

impl Default for RunConfig {
    /// Reference rubidium parameters: Γ₂₃ = 0.1Γ, Δ = 50Γ, 8 W/cm², 3 cm,
    /// 110 °C, phase-conjugate geometry swept in η ∈ [0, 1].
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Rate,
    Dipole,
    Density,
    Mass,
    Wavelength,
    Intensity,
    Length,
    Temperature,
    Angle,
    CouplingL,
    Plain,
}

const KEYS: &[(&str, Kind)] = &[
    ("gamma", Kind::Rate),
    ("gamma_13", Kind::Rate),
    ("gamma_14", Kind::Rate),
    ("gamma_23", Kind::Rate),
    ("gamma_24", Kind::Rate),
    ("gamma_31", Kind::Rate),
    ("gamma_42", Kind::Rate),
    ("dipole_31", Kind::Dipole),
    ("density", Kind::Density),
    ("mass", Kind::Mass),
    ("lambda", Kind::Wavelength),
    ("delta", Kind::Rate),
    ("pump_intensity", Kind::Intensity),
    ("pump_intensity_range", Kind::Intensity),
    ("length", Kind::Length),
    ("temperature", Kind::Temperature),
    ("geometry", Kind::Plain),
    ("theta", Kind::Angle),
    ("eta", Kind::Plain),
    ("eta_range", Kind::Plain),
    ("gamma_seed", Kind::Plain),
    ("detection", Kind::Plain),
    ("phase_f", Kind::Angle),
    ("phase_b", Kind::Angle),
    ("phase_range", Kind::Angle),
    ("coupling_l", Kind::CouplingL),
    ("coupling_l_range", Kind::CouplingL),
    ("sweep_axis", Kind::Plain),
    ("grid_points", Kind::Plain),
    ("doppler", Kind::Plain),
    ("out", Kind::Plain),
];

/// A number tagged with its unit's conversion; rates in Γ are resolved
/// once Γ itself is known.
#[derive(Debug, Clone, Copy)]
enum Scaled {
    Si(f64),
    Gammas(f64),
}

fn unit_factor(kind: Kind, unit: &str) -> Option<Result<f64, ()>> {
    // Some(Ok(f)): multiply by f. Some(Err(())): rate in units of Γ.
    let two_pi = 2.0 * PI;
    let f = match (kind, unit) {
        (Kind::Rate, "rad/s") => 1.0,
        (Kind::Rate, "Hz") => two_pi,
        (Kind::Rate, "kHz") => two_pi * 1e3,
        (Kind::Rate, "MHz") => two_pi * 1e6,
        (Kind::Rate, "GHz") => two_pi * 1e9,
        (Kind::Rate, "Gamma") => return Some(Err(())),
        (Kind::Dipole, "C*m" | "C.m" | "Cm") => 1.0,
        (Kind::Density, "m^-3") => 1.0,
        (Kind::Density, "cm^-3") => 1e6,
        (Kind::Mass, "kg") => 1.0,
        (Kind::Mass, "u") => ATOMIC_MASS_UNIT,
        (Kind::Wavelength, "m") => 1.0,
        (Kind::Wavelength, "um") => 1e-6,
        (Kind::Wavelength, "nm") => 1e-9,
        (Kind::Intensity, "W/cm^2") => W_PER_CM2,
        (Kind::Intensity, "W/m^2") => 1.0,
        (Kind::Length, "m") => 1.0,
        (Kind::Length, "cm") => 1e-2,
        (Kind::Length, "mm") => 1e-3,
        (Kind::Temperature, "K" | "C") => 1.0,
        (Kind::Angle | Kind::CouplingL, "rad") => 1.0,
        (Kind::Angle, "mrad") => 1e-3,
        (Kind::Angle, "deg") => PI / 180.0,
        (Kind::Angle | Kind::CouplingL, "pi") => PI,
        (Kind::CouplingL | Kind::Plain, "") => 1.0,
        _ => return None,
    };
    Some(Ok(f))
}

fn units_for(kind: Kind) -> &'static str {
    match kind {
        Kind::Rate => "rad/s, Hz, kHz, MHz, GHz or Gamma",
        Kind::Dipole => "C*m",
        Kind::Density => "m^-3 or cm^-3",
        Kind::Mass => "kg or u",
        Kind::Wavelength => "m, um or nm",
        Kind::Intensity => "W/cm^2 or W/m^2",
        Kind::Length => "m, cm or mm",
        Kind::Temperature => "K or C",
        Kind::Angle => "rad, mrad, deg or pi",
        Kind::CouplingL => "none, rad or pi",
        Kind::Plain => "none",
    }
}

#[derive(Debug, Clone)]
enum Values {
    One(Scaled),
    Range(Scaled, Scaled),
    List(Vec<Scaled>),
}

struct Entry {
    line: usize,
    raw: String,
    kind: Kind,
}

fn split_unit(raw: &str) -> (&str, &str) {
    match raw.rsplit_once(char::is_whitespace) {
        Some((num, unit)) if unit.parse::<f64>().is_err() => (num.trim(), unit.trim()),
        _ => (raw.trim(), ""),
    }
}

fn parse_numbers(entry: &Entry) -> Result<Values, ConfigError> {
    let line = Some(entry.line);
    let (numbers, unit) = split_unit(&entry.raw);
    let factor = match unit_factor(entry.kind, unit) {
        Some(f) => f,
        None if unit.is_empty() => {
            return err(
                line,
                format!("missing unit (expected {})", units_for(entry.kind)),
            )
        }
        None => {
            return err(
                line,
                format!("unknown unit '{unit}' (expected {})", units_for(entry.kind)),
            )
        }
    };
    let temperature_offset = if entry.kind == Kind::Temperature && unit == "C" {
        273.15
    } else {
        0.0
    };
    let scale = |text: &str| -> Result<Scaled, ConfigError> {
        let x: f64 = text.trim().parse().map_err(|_| ConfigError {
            line,
            message: format!("'{}' is not a number", text.trim()),
        })?;
        if !x.is_finite() {
            return err(line, format!("'{}' is not finite", text.trim()));
        }
        Ok(match factor {
            Ok(f) => Scaled::Si(x * f + temperature_offset),
            Err(()) => Scaled::Gammas(x),
        })
    };
    if let Some((lo, hi)) = numbers.split_once("..") {
        Ok(Values::Range(scale(lo)?, scale(hi)?))
    } else if numbers.contains(',') {
        Ok(Values::List(
            numbers.split(',').map(scale).collect::<Result<_, _>>()?,
        ))
    } else {
        Ok(Values::One(scale(numbers)?))
    }
}

/// Parses and validates a configuration; unset keys take the reference
/// rubidium defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let kinds: HashMap<&str, Kind> = KEYS.iter().copied().collect();
    let mut entries: HashMap<String, Entry> = HashMap::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() || (content.starts_with('[') && content.ends_with(']')) {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return err(
                Some(line),
                format!("expected 'key = value', got '{content}'"),
            );
        };
        let key = key.trim();
        let value = value.trim();
        let Some(&kind) = kinds.get(key) else {
            return err(Some(line), format!("unknown key '{key}'"));
        };
        if value.is_empty() {
            return err(Some(line), format!("'{key}' has no value"));
        }
        if let Some(prev) = entries.get(key) {
            return err(
                Some(line),
                format!("'{key}' already set on line {}", prev.line),
            );
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                raw: value.to_string(),
                kind,
            },
        );
    }
    Resolver { entries }.resolve()
}

struct Resolver {
    entries: HashMap<String, Entry>,
}

impl Resolver {
    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn values(&self, key: &str) -> Result<Option<Values>, ConfigError> {
        self.entries.get(key).map(parse_numbers).transpose()
    }

    fn scalar(&self, key: &str, gamma: f64) -> Result<Option<f64>, ConfigError> {
        match self.values(key)? {
            None => Ok(None),
            Some(Values::One(s)) => Ok(Some(resolve(s, gamma))),
            Some(_) => err(self.line(key), format!("'{key}' takes a single value")),
        }
    }

    fn word(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.get(key).map(|e| (e.raw.as_str(), e.line))
    }

    fn positive(&self, key: &str, gamma: f64, default: f64) -> Result<f64, ConfigError> {
        let v = self.scalar(key, gamma)?.unwrap_or(default);
        if !(v > 0.0) {
            return err(self.line(key), format!("'{key}' must be positive, got {v}"));
        }
        Ok(v)
    }

    fn non_negative(&self, key: &str, gamma: f64, default: f64) -> Result<f64, ConfigError> {
        let v = self.scalar(key, gamma)?.unwrap_or(default);
        if !(v >= 0.0) {
            return err(self.line(key), format!("'{key}' must be ≥ 0, got {v}"));
        }
        Ok(v)
    }

    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let gamma = match self.values("gamma")? {
            Some(Values::One(Scaled::Gammas(_))) => {
                return err(
                    self.line("gamma"),
                    "'gamma' cannot be given in units of Gamma",
                )
            }
            _ => self.positive("gamma", 1.0, RB_GAMMA)?,
        };
        let rates = BranchRates {
            gamma_13: self.non_negative("gamma_13", gamma, gamma)?,
            gamma_14: self.non_negative("gamma_14", gamma, gamma)?,
            gamma_23: self.non_negative("gamma_23", gamma, 0.1 * gamma)?,
            gamma_24: self.non_negative("gamma_24", gamma, 2.0 * PI * 30e3)?,
        };
        let dipole = self.positive("dipole_31", gamma, 1.1e-29)?;
        let density = self.positive("density", gamma, 1e16)?;
        let mass = self.positive("mass", gamma, RB87_MASS)?;
        let mut atom = AtomModel::from_branch_rates(rates, dipole, density, mass).map_err(|e| {
            ConfigError {
                line: None,
                message: e.to_string(),
            }
        })?;
        if let Some(g) = self.scalar("gamma_31", gamma)? {
            atom.gamma_31 = g;
        }
        if let Some(g) = self.scalar("gamma_42", gamma)? {
            atom.gamma_42 = g;
        }
        atom.validate().map_err(|e| ConfigError {
            line: self.line("gamma_31").or(self.line("gamma_42")),
            message: e.to_string(),
        })?;

        let delta = self.scalar("delta", gamma)?.unwrap_or(50.0 * gamma);
        let wavelength = self.positive("lambda", gamma, RB_D2_WAVELENGTH)?;
        let length = self.positive("length", gamma, 0.03)?;
        let temperature = self.positive("temperature", gamma, 383.15)?;
        let pump_intensity = self.non_negative("pump_intensity", gamma, 8.0 * W_PER_CM2)?;
        let theta = self.non_negative("theta", gamma, 0.0)?;
        let phase_f = self.scalar("phase_f", gamma)?.unwrap_or(0.0);
        let phase_b = self.scalar("phase_b", gamma)?.unwrap_or(0.0);

        let eta = self.scalar("eta", gamma)?.unwrap_or(1.0);
        if !(0.0..=1.0).contains(&eta) {
            return err(
                self.line("eta"),
                format!("'eta' must lie in [0, 1], got {eta}"),
            );
        }
        let coupling_l = self.scalar("coupling_l", gamma)?;
        if let Some(c) = coupling_l {
            if c < 0.0 {
                return err(
                    self.line("coupling_l"),
                    format!("'coupling_l' must be ≥ 0, got {c}"),
                );
            }
        }

        let geometry = match self.word("geometry") {
            None => Geometry::PhaseConjugate,
            Some(("pc", _)) => Geometry::PhaseConjugate,
            Some(("forward", _)) => Geometry::Forward,
            Some((w, l)) => {
                return err(
                    Some(l),
                    format!("geometry must be pc or forward, got '{w}'"),
                )
            }
        };
        if geometry == Geometry::Forward && !(theta < PI / 2.0) {
            return err(
                self.line("theta"),
                "theta must be below π/2 for the forward geometry",
            );
        }
        let detection = match self.word("detection") {
            None | Some(("quadrature", _)) => Detection::JointQuadrature,
            Some(("intensity_difference", _)) => Detection::IntensityDifference,
            Some((w, l)) => {
                return err(
                    Some(l),
                    format!("detection must be quadrature or intensity_difference, got '{w}'"),
                )
            }
        };
        let seed = match self.word("gamma_seed") {
            None | Some(("bright", _)) => Seed::Bright,
            Some((w, l)) => match w.parse::<f64>() {
                Ok(g) if g.is_finite() && g >= 0.0 => Seed::Photons(g),
                _ => {
                    return err(
                        Some(l),
                        format!("gamma_seed must be a number ≥ 0 or 'bright', got '{w}'"),
                    )
                }
            },
        };
        let doppler = match self.word("doppler") {
            None | Some(("on", _)) => Some(DopplerShift::Common),
            Some(("opposite", _)) => Some(DopplerShift::Opposite),
            Some(("off", _)) => None,
            Some((w, l)) => {
                return err(
                    Some(l),
                    format!("doppler must be on, off or opposite, got '{w}'"),
                )
            }
        };
        let out = self.word("out").map(|(w, _)| PathBuf::from(w));

        let axis = match self.word("sweep_axis") {
            None | Some(("eta", _)) => SweepAxis::Eta,
            Some(("pump_intensity", _)) => SweepAxis::PumpIntensity,
            Some(("coupling_l", _)) => SweepAxis::CouplingL,
            Some(("phase", _)) => SweepAxis::HomodynePhase,
            Some((w, l)) => {
                return err(
                    Some(l),
                    format!(
                        "sweep_axis must be pump_intensity, eta, coupling_l or phase, got '{w}'"
                    ),
                )
            }
        };
        let grid_points = match self.word("grid_points") {
            None => 101,
            Some((w, l)) => match w.parse::<usize>() {
                Ok(n) if n >= 1 => n,
                _ => {
                    return err(
                        Some(l),
                        format!("grid_points must be a positive integer, got '{w}'"),
                    )
                }
            },
        };
        let (range_key, default_lo, default_hi) = match axis {
            SweepAxis::PumpIntensity => ("pump_intensity_range", 0.1 * W_PER_CM2, 50.0 * W_PER_CM2),
            SweepAxis::Eta => ("eta_range", 0.0, 1.0),
            SweepAxis::CouplingL => ("coupling_l_range", 0.0, 1.5),
            SweepAxis::HomodynePhase => ("phase_range", 0.0, 2.0 * PI),
        };
        for other in [
            "pump_intensity_range",
            "eta_range",
            "coupling_l_range",
            "phase_range",
        ] {
            if other != range_key && self.entries.contains_key(other) {
                return err(
                    self.line(other),
                    format!("'{other}' given but sweep_axis is {}", axis.name()),
                );
            }
        }
        let grid = match self.values(range_key)? {
            None => linspace(default_lo, default_hi, grid_points, None)?,
            Some(Values::Range(lo, hi)) => linspace(
                resolve(lo, gamma),
                resolve(hi, gamma),
                grid_points,
                self.line(range_key),
            )?,
            Some(Values::List(v)) => v.into_iter().map(|s| resolve(s, gamma)).collect(),
            Some(Values::One(s)) => vec![resolve(s, gamma)],
        };
        let line = self.line(range_key);
        check_monotone(&grid, line)?;
        let bad = match axis {
            SweepAxis::Eta => grid.iter().find(|v| !(0.0..=1.0).contains(*v)),
            SweepAxis::PumpIntensity | SweepAxis::CouplingL => grid.iter().find(|v| **v < 0.0),
            SweepAxis::HomodynePhase => None,
        };
        if let Some(v) = bad {
            return err(
                line,
                format!("grid value {v} is out of range for {}", axis.name()),
            );
        }

        let cfg = RunConfig {
            atom,
            delta,
            pump_intensity,
            wavelength,
            length,
            temperature,
            geometry,
            theta,
            eta,
            seed,
            detection,
            phase_f,
            phase_b,
            coupling_l,
            axis,
            grid,
            doppler,
            out,
        };
        cfg.drive(pump_intensity).map_err(|e| ConfigError {
            line: None,
            message: e.to_string(),
        })?;
        Ok(cfg)
    }
}

fn resolve(s: Scaled, gamma: f64) -> f64 {
    match s {
        Scaled::Si(v) => v,
        Scaled::Gammas(v) => v * gamma,
    }
}

fn linspace(lo: f64, hi: f64, n: usize, line: Option<usize>) -> Result<Vec<f64>, ConfigError> {
    if n < 2 {
        return err(line, "a range needs grid_points ≥ 2");
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

fn check_monotone(grid: &[f64], line: Option<usize>) -> Result<(), ConfigError> {
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if increasing || decreasing {
        Ok(())
    } else {
        err(line, "grid must be strictly monotone")
    }
}
