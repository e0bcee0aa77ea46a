use std::path::Path;
use std::process::{Command, Output};

fn dfwm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dfwm"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn run_writes_csv_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "a.cfg",
        "coupling_l = 0.5\neta_range = 0..1\ngrid_points = 5\nout = a.csv\n",
    );
    let out = dfwm(&["run", &cfg], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn run_without_out_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.cfg", "coupling_l = 0.5\ngrid_points = 3\n");
    let out = dfwm(&["--threads", "2", "run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("axis_value,coupling_l,gain,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "\n\neta = 1.2\n");
    let out = dfwm(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let cfg = write(dir.path(), "unit.cfg", "length = 3\n");
    assert_eq!(dfwm(&["validate", &cfg], dir.path()).status.code(), Some(2));
    assert_eq!(
        dfwm(&["run", "missing.cfg"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(dfwm(&["preset", "fig9"], dir.path()).status.code(), Some(2));
}

#[test]
fn all_points_above_threshold_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "hot.cfg",
        "coupling_l = 2\ngrid_points = 4\nout = hot.csv\n",
    );
    let out = dfwm(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("above"));
    // The flagged rows are still written.
    let csv = std::fs::read_to_string(dir.path().join("hot.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.contains(",true,")));
}

#[test]
fn validate_cross_checks_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let dark = write(dir.path(), "d.cfg", "eta_range = 0..1\ngrid_points = 2\n");
    let out = dfwm(&["validate", &dark], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );

    let cfg = write(
        dir.path(),
        "v.cfg",
        "geometry = forward\ndetection = intensity_difference\neta = 0.7\n\
         sweep_axis = pump_intensity\npump_intensity_range = 1..5 W/cm^2\ngrid_points = 3\n",
    );
    let a = dfwm(&["--seed", "7", "validate", &cfg], dir.path());
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.contains("oracle agreement: ok"), "{text}");
    let b = dfwm(&["--seed", "7", "validate", &cfg], dir.path());
    assert_eq!(a.stdout, b.stdout);
    let c = dfwm(&["--seed", "8", "validate", &cfg], dir.path());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn preset_writes_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dfwm(&["preset", "fig2", "--out", "figs"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for f in ["fig2_kl_pi6.csv", "fig2_kl_pi3.csv"] {
        let text = std::fs::read_to_string(dir.path().join("figs").join(f)).unwrap();
        assert_eq!(text.lines().count(), 362);
    }
}
