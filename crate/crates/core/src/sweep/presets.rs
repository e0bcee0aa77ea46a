use super::{parse_config, RunConfig};

pub const PRESET_NAMES: [&str; 7] = ["fig2", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d"];

#[derive(Debug, Clone, PartialEq)]
pub struct PresetFile {
    pub file_name: String,
    pub config: RunConfig,
}

fn file(file_name: String, text: &str) -> PresetFile {
    PresetFile {
        file_name,
        config: parse_config(text).expect("preset configurations are valid"),
    }
}

/// Configurations of a named preset; `None` for an unknown name.
///
/// fig2: lossless phase-conjugate quadrature versus θ_f − θ_b for
/// |κ|L = π/6 and π/3. fig3a/b: η from 0 to 1 at the reference parameters.
/// fig4a–d: η = 0.7 versus pump intensity for four Γ₂₃ values, as
/// (a) PC quadrature, (b) PC intensity difference, (c) forward quadrature,
/// (d) forward intensity difference.
pub fn preset(name: &str) -> Option<Vec<PresetFile>> {
    let files = match name {
        "fig2" => [("pi6", 6), ("pi3", 3)]
            .iter()
            .map(|(tag, div)| {
                let text = format!(
                    "geometry = pc\neta = 1\ncoupling_l = {} pi\nsweep_axis = phase\n\
                     phase_range = 0..360 deg\ngrid_points = 361\n",
                    1.0 / *div as f64
                );
                file(format!("fig2_kl_{tag}.csv"), &text)
            })
            .collect(),
        "fig3a" | "fig3b" => {
            let geometry = if name == "fig3a" { "pc" } else { "forward" };
            let text = format!(
                "geometry = {geometry}\nsweep_axis = eta\neta_range = 0..1\ngrid_points = 101\n"
            );
            vec![file(format!("{name}.csv"), &text)]
        }
        "fig4a" | "fig4b" | "fig4c" | "fig4d" => {
            let (geometry, detection) = match name {
                "fig4a" => ("pc", "quadrature"),
                "fig4b" => ("pc", "intensity_difference"),
                "fig4c" => ("forward", "quadrature"),
                _ => ("forward", "intensity_difference"),
            };
            ["0.5", "0.2", "0.1", "0.05"]
                .iter()
                .map(|g23| {
                    let text = format!(
                        "geometry = {geometry}\ndetection = {detection}\neta = 0.7\n\
                         gamma_23 = {g23} Gamma\nsweep_axis = pump_intensity\n\
                         pump_intensity_range = 0.1..50 W/cm^2\ngrid_points = 500\n"
                    );
                    file(format!("{name}_g23_{g23}.csv"), &text)
                })
                .collect()
        }
        _ => return None,
    };
    Some(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::SweepAxis;

    #[test]
    fn every_preset_parses() {
        for name in PRESET_NAMES {
            let files = preset(name).unwrap();
            assert!(!files.is_empty());
        }
        assert!(preset("fig5").is_none());
    }

    #[test]
    fn grid_arithmetic() {
        let fig2 = preset("fig2").unwrap();
        assert_eq!(fig2.len(), 2);
        for f in &fig2 {
            assert_eq!(f.config.grid.len(), 361);
            let step = f.config.grid[1] - f.config.grid[0];
            assert!((step - 1f64.to_radians()).abs() < 1e-15);
        }
        let fig4 = preset("fig4c").unwrap();
        assert_eq!(fig4.len(), 4);
        let g = &fig4[0].config.grid;
        assert_eq!(fig4[0].config.axis, SweepAxis::PumpIntensity);
        assert_eq!(g.len(), 500);
        assert_eq!(g[0], 1e3);
        assert_eq!(*g.last().unwrap(), 5e5);
    }
}
