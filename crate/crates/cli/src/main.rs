use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dfwm_core::fwmcoupling::Geometry;
use dfwm_core::mcoracle::{
    exact_moments, from_affine_mode_map, mc_estimate, propagate, GaussianState, McError, Observable,
};
use dfwm_core::quantumnoise::{
    intensity_difference_stats, joint_quadrature_variance, Detection, Seed,
};
use dfwm_core::sweep::{
    emit_csv, parse_config, point_model, preset, run_sweep, write_csv, RunConfig, SweepError,
    SweepTable, PRESET_NAMES,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_PHYSICS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "dfwm",
    version,
    about = "Squeezing sweeps for four-wave mixing in atomic vapor"
)]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// RNG seed for the Monte-Carlo spot check in `validate`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep described by a config file; CSV goes to `out` or stdout.
    Run { config: PathBuf },
    /// Regenerate a built-in sweep.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check a config and cross-check its first grid point against the
    /// phase-space oracle.
    Validate { config: PathBuf },
}

enum Failure {
    Config(String),
    Physics(String),
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Physics(e.to_string())
        }
    }
}

fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Physics(format!("cannot write {}: {e}", path.display()))
}

fn report(table: &SweepTable, label: &str) {
    let above = table.above_threshold_count();
    eprintln!("{label}: {} rows", table.rows.len());
    if above > 0 {
        eprintln!("{label}: {above} rows above the phase-conjugate threshold (flagged)");
    }
}

fn run(path: &Path) -> Result<(), Failure> {
    let cfg = load(path)?;
    let table = run_sweep(&cfg)?;
    match &cfg.out {
        Some(out) => emit_csv(&table, out).map_err(|e| io_failure(out, e))?,
        None => write_csv(&table, std::io::stdout().lock())
            .map_err(|e| io_failure(Path::new("<stdout>"), e))?,
    }
    report(&table, &path.display().to_string());
    table.check_threshold()?;
    Ok(())
}

fn run_preset(name: &str, dir: &Path) -> Result<(), Failure> {
    let files = preset(name).ok_or_else(|| Failure::Config(format!("unknown preset '{name}'")))?;
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    for f in files {
        let table = run_sweep(&f.config)?;
        let path = dir.join(&f.file_name);
        emit_csv(&table, &path).map_err(|e| io_failure(&path, e))?;
        report(&table, &path.display().to_string());
    }
    Ok(())
}

const SPOT_SAMPLES: usize = 200_000;
/// Seed photon number standing in for a bright seed in the oracle check.
const SPOT_BRIGHT: f64 = 1e6;

fn validate(path: &Path, seed: u64) -> Result<(), Failure> {
    let cfg = load(path)?;
    println!("config ok: {}", path.display());
    println!(
        "  geometry {}, detection {}, sweep {} over {} points",
        cfg.geometry.name(),
        cfg.detection.name(),
        cfg.axis.name(),
        cfg.grid.len()
    );
    let value = cfg.grid[0];
    let p = point_model(&cfg, value).map_err(Failure::from)?;
    println!(
        "  first point {}: |coupling|L = {:.6}{}",
        cfg.display_axis_value(value),
        p.coupling.magnitude_l,
        if p.above_threshold {
            " (above threshold)"
        } else {
            ""
        }
    );

    let oracle_map = from_affine_mode_map(&p.map);
    let (observable, photons, model) = match cfg.detection {
        Detection::JointQuadrature => (
            Observable::JointQuadrature {
                theta_f: p.detection.theta_f,
                theta_b: p.detection.theta_b,
                backward: cfg.geometry == Geometry::PhaseConjugate,
            },
            0.0,
            joint_quadrature_variance(&p.map, &p.detection),
        ),
        Detection::IntensityDifference => {
            let photons = match p.detection.seed {
                Seed::Photons(g) => g,
                Seed::Bright => SPOT_BRIGHT,
            };
            let stats = intensity_difference_stats(&p.map, Seed::Photons(photons))
                .map_err(|e| Failure::Physics(e.to_string()))?;
            (Observable::IntensityDifference, photons, stats.variance)
        }
    };
    let state = GaussianState::seeded(2, photons);
    let physics = |e: McError| Failure::Physics(e.to_string());
    let output = propagate(&state, &oracle_map).map_err(physics)?;
    let exact = exact_moments(&output, observable).map_err(physics)?;
    let rel = (exact.variance - model).abs() / model.abs().max(1.0);
    println!(
        "  variance: model {model:.12e}, covariance oracle {:.12e} (rel {rel:.1e})",
        exact.variance
    );
    let mut ok = rel <= 1e-9;

    match mc_estimate(&state, &oracle_map, observable, SPOT_SAMPLES, seed) {
        Ok(mc) => {
            let z = if mc.std_error > 0.0 {
                (mc.variance - model) / mc.std_error
            } else if (mc.variance - model).abs() <= 1e-12 * model.abs().max(1.0) {
                0.0
            } else {
                f64::INFINITY
            };
            println!(
                "  monte carlo (seed {seed}, {} samples): {:.6e} ± {:.1e} ({z:+.2} σ)",
                mc.samples, mc.variance, mc.std_error
            );
            ok &= z.abs() <= 4.0;
        }
        Err(e) => println!("  monte carlo skipped: {e}"),
    }
    if ok {
        println!("  oracle agreement: ok");
        Ok(())
    } else {
        Err(Failure::Physics("model and oracle disagree".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    let result = match &cli.command {
        Command::Run { config } => run(config),
        Command::Preset { name, out } => run_preset(name, out),
        Command::Validate { config } => validate(config, cli.seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Physics(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PHYSICS)
        }
    }
}
