use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn eqwalk(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqwalk"))
        .args(args)
        .current_dir(cwd)
        .env_remove("EQWALK_OUT")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = eqwalk(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(path: impl AsRef<Path>) -> String {
    let path = path.as_ref();
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn zero_steps_snapshot_is_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "steps = 0\ninitial = [[0.6, 0.0], [0.0, 0.8]]\n[walk]\nfamily = \"alternate2d\"\n",
    );
    ok(&["run", "-c", &cfg, "-o", "out"], dir.path());
    assert_eq!(
        read(dir.path().join("out/snapshot_t0.csv")),
        "x,y,p\n0,0,1.0000000000000000e0\n"
    );
    assert_eq!(read(dir.path().join("out/widths.csv")).lines().count(), 2);
}

#[test]
fn fig2b_writes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&["run", "--preset", "fig2b", "--steps", "60"], dir.path());
    let out = dir.path().join("eqwalk-out/fig2b");
    for f in [
        "widths.csv",
        "snapshot_t60.csv",
        "periods.json",
        "manifest.json",
    ] {
        assert!(out.join(f).exists(), "{f} missing; stdout: {stdout}");
    }
    let widths = read(out.join("widths.csv"));
    assert!(widths.starts_with("t,sigma_x,sigma_y,sigma_d,sigma_a\n"));
    assert_eq!(widths.lines().count(), 62);
    let total: f64 = read(out.join("snapshot_t60.csv"))
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn output_root_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_eqwalk"))
        .args(["run", "--preset", "fig6", "--steps", "3"])
        .current_dir(dir.path())
        .env("EQWALK_OUT", "elsewhere")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("elsewhere/fig6/snapshot_t3.csv").exists());
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        ok(
            &["run", "-p", "fig7b", "--steps", "80", "-o", out],
            dir.path(),
        );
    }
    for f in [
        "widths.csv",
        "snapshot_t80.csv",
        "periods.json",
        "manifest.json",
    ] {
        assert_eq!(
            fs::read(dir.path().join("a").join(f)).unwrap(),
            fs::read(dir.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn manifests_reproduce_their_runs() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &[
            "run", "-p", "fig9", "--steps", "40", "--phi-y", "0.1", "-o", "first",
        ],
        dir.path(),
    );
    ok(
        &["run", "-m", "first/manifest.json", "-o", "again"],
        dir.path(),
    );
    assert!(read(dir.path().join("first/manifest.json")).contains("\"version\""));
    for f in [
        "widths.csv",
        "snapshot_t40.csv",
        "periods.json",
        "manifest.json",
    ] {
        assert_eq!(
            read(dir.path().join("first").join(f)),
            read(dir.path().join("again").join(f)),
            "{f}"
        );
    }
}

#[test]
fn spectrum_manifest_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&["spectrum", "-p", "fig1c", "-o", "s"], dir.path());
    assert!(
        stdout.contains("max |closed form - eigenphase|"),
        "{stdout}"
    );
    ok(
        &["spectrum", "-m", "s/manifest.json", "-o", "t"],
        dir.path(),
    );
    for f in ["bands.csv", "oracle.json", "manifest.json"] {
        assert_eq!(
            read(dir.path().join("s").join(f)),
            read(dir.path().join("t").join(f))
        );
    }
    let bands = read(dir.path().join("s/bands.csv"));
    assert!(bands.starts_with("kx,branch,omega\n"));
    assert_eq!(bands.lines().count(), 1 + 401 * 2);
}

#[test]
fn spectrum_oracle_agrees_with_the_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["spectrum", "-p", "fig3d", "-o", "s"], dir.path());
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path().join("s/oracle.json"))).unwrap();
    assert_eq!(report["points"], 101 * 101);
    assert!(report["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn sweep_writes_one_directory_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(
        &[
            "sweep",
            "-p",
            "fig4",
            "--steps",
            "30",
            "--workers",
            "2",
            "-o",
            "sw",
        ],
        dir.path(),
    );
    let mut widths = Vec::new();
    for d in ["0", "0.1", "0.2"] {
        let path = dir.path().join(format!("sw/delta_theta={d}/widths.csv"));
        assert!(
            path.exists(),
            "{} missing; stdout: {stdout}",
            path.display()
        );
        widths.push(read(path));
    }
    assert_ne!(widths[0], widths[2]);
}

#[test]
fn config_errors_exit_with_2_and_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "steps = 10\n[walk]\nfamily = \"grover2d\"\n[field]\nx = \"2pi*a/120\"\n",
    );
    let out = eqwalk(&["run", "-c", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5"), "{err}");

    let cfg = write_config(
        dir.path(),
        "steps = 10\nsteps_typo = 3\n[walk]\nfamily = \"grover2d\"\n",
    );
    assert_eq!(
        eqwalk(&["run", "-c", &cfg], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        eqwalk(&["run", "-p", "fig99"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        eqwalk(&["run", "-p", "fig3a"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        eqwalk(&["sweep", "-p", "fig2b"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn decimal_phases_report_their_rational_reading() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(
        &[
            "run",
            "-p",
            "fig2b",
            "--steps",
            "5",
            "--phi-x",
            "0.05235987755982988",
            "-o",
            "d",
        ],
        dir.path(),
    );
    assert!(stdout.contains("2pi*1/120"), "{stdout}");
    assert!(stdout.contains("tolerance 1e-9"), "{stdout}");
}

#[test]
fn presets_list_and_show() {
    let dir = tempfile::tempdir().unwrap();
    let list = ok(&["presets", "list"], dir.path());
    for name in ["fig2", "fig4", "fig5", "fig6", "fig7", "fig9", "fig10"] {
        assert!(
            list.lines().any(|l| l.starts_with(&format!("{name} "))),
            "{name}"
        );
    }
    let shown = ok(&["presets", "show", "fig10"], dir.path());
    assert!(shown.contains("family = \"hadamard2d\""));
    assert!(shown.contains("y = \"2pi*1/120\""));
}
