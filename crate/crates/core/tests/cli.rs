//! End-to-end checks of the `vsc-rates` binary: subcommand wiring, CSV
//! shape, and the exit-code contract (0 success, 1 validation, 2 computation).

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vsc-rates"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

// Coarse grid so every invocation stays fast.
const FAST_MATTER: &str = "[matter]\ngrid_points = 301\n";

#[test]
fn rate_report_prints_key_quantities() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.toml", FAST_MATTER);
    let out = bin().args(["rate", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("k_vsc"), "missing k_vsc in: {text}");
    assert!(text.contains("delta(delta G)"));
    assert!(text.contains("k/k0"));
}

#[test]
fn sweep_csv_has_documented_schema_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        &format!("{FAST_MATTER}\n[sweep]\naxis = \"n_mol\"\nmin = 1e8\nmax = 1e14\npoints = 7\nspacing = \"log\"\n"),
    );
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let res = bin()
            .args(["sweep", "--seed", "7", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "sweep output must be byte-identical for identical config+seed");

    let text = String::from_utf8(a).unwrap();
    let header = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("header row");
    assert_eq!(
        header,
        "n_molecules,k_vsc_fs1,k_over_k0,delta_delta_g_kcalmol,r_total_fs1"
    );
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 8); // header + 7 rows
    assert!(text.contains("# seed = 7"));
}

#[test]
fn eigensolve_emits_energies_and_state_dump() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.toml", FAST_MATTER);
    let out = dir.path().join("eig.csv");
    let dump = dir.path().join("states.csv");
    let res = bin()
        .args(["eigensolve", "--states", "4", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--dump-states")
        .arg(&dump)
        .output()
        .unwrap();
    assert!(res.status.success());

    let energies = std::fs::read_to_string(&out).unwrap();
    assert!(energies.lines().any(|l| l == "index,energy_cm1"));
    assert_eq!(energies.lines().filter(|l| !l.starts_with('#')).count(), 5);

    let states = std::fs::read_to_string(&dump).unwrap();
    assert!(states.lines().any(|l| l == "r_au,psi_0,psi_1,psi_2,psi_3"));
    assert_eq!(states.lines().filter(|l| !l.starts_with('#')).count(), 302);
}

#[test]
fn kinetics_csv_has_population_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("kin.csv");
    let res = bin().arg("kinetics").arg("--out").arg(&out).output().unwrap();
    assert!(res.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l == "t_fs,p_g,p_nu_lp,p_nu_rp,p_nu_r"));
    assert!(text.contains("# fitted_rate_fs1"));
}

#[test]
fn jeff_emits_requested_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("jeff.csv");
    let res = bin()
        .args([
            "jeff",
            "--points",
            "5",
            "--omega-min-cm1",
            "1000",
            "--omega-max-cm1",
            "1400",
            "--angular",
        ])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(res.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l == "omega_cm1,jeff_closed_au,jeff_angular_au"));
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();

    // Validation error: unknown key, exit 1.
    let bad_key = write(dir.path(), "bad.toml", "[cavity]\nnot_a_key = 1.0\n");
    let res = bin().args(["rate", "--config"]).arg(&bad_key).output().unwrap();
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("not_a_key"));

    // Validation error: invariant violation, exit 1.
    let bad_value = write(dir.path(), "neg.toml", "[cavity]\nomega_c_cm1 = -5.0\n");
    let res = bin().args(["rate", "--config"]).arg(&bad_value).output().unwrap();
    assert_eq!(res.status.code(), Some(1));

    // Computation error: per-point failure inside a sweep, exit 2.
    let bad_sweep = write(
        dir.path(),
        "sweep.toml",
        &format!("{FAST_MATTER}\n[sweep]\naxis = \"tau_c\"\nmin = -5.0\nmax = 5.0\npoints = 3\n"),
    );
    let out = dir.path().join("x.csv");
    let res = bin()
        .args(["sweep", "--config"])
        .arg(&bad_sweep)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("tau_c_fs = -5"));
}

#[test]
fn variant_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.toml", FAST_MATTER);
    let out = bin()
        .args(["rate", "--variant", "isotropic", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("Isotropic"));
}
