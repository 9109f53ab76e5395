//! End-to-end CLI checks: parse/format round-trips, byte-level determinism,
//! the unit-law byte equality, and exit codes.

use std::path::PathBuf;
use std::process::Command;

use mfcalc::scenario::scenario_a1_id;
use mfcalc::textio;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mfcalc"))
}

fn write_temp(dir: &std::path::Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "mfcalc-cli-test-{}-{}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap()
            .as_nanos()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn validate_and_roundtrip() {
    let dir = tempdir();
    let s = scenario_a1_id();
    let unit = s.unit_kernel().unwrap();
    let mf_path = write_temp(&dir, "unit.mf", &textio::format_mf(&unit.mf));
    let out = bin().arg("validate").arg(&mf_path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");

    // A broken factorization exits 1 with the violation on stderr.
    let broken = textio::format_mf(&unit.mf).replace("potential y*t - y'*t", "potential y*t");
    let bad_path = write_temp(&dir, "bad.mf", &broken);
    let out = bin().arg("validate").arg(&bad_path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Garbage input exits 2.
    let garbage = write_temp(&dir, "garbage.txt", "not a thing\n");
    let out = bin().arg("validate").arg(&garbage).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn act_unit_is_byte_identical_and_deterministic() {
    let dir = tempdir();
    let s = scenario_a1_id();
    let scen_path = write_temp(&dir, "scen.txt", &textio::format_scenario(&s));
    let unit = s.unit_kernel().unwrap();
    let kernel_path = write_temp(&dir, "unit.mf", &textio::format_mf(&unit.mf));
    let module = &s.sample_modules().unwrap()[0];
    let module_text = textio::format_mf(&module.mf);
    let module_path = write_temp(&dir, "module.mf", &module_text);

    let out_path = dir.join("acted.mf");
    let trace_path = dir.join("trace.txt");
    let run = |out_path: &PathBuf| {
        let out = bin()
            .arg("act")
            .arg(&scen_path)
            .arg(&kernel_path)
            .arg(&module_path)
            .arg("--trace")
            .arg(&trace_path)
            .arg("-o")
            .arg(out_path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(&out_path);
    let first = std::fs::read_to_string(&out_path).unwrap();
    // The unit law is byte-exact on this module.
    assert_eq!(first, module_text);
    // The trace serializes and mentions the exclusion move.
    let trace = std::fs::read_to_string(&trace_path).unwrap();
    assert!(trace.contains("variable-exclusion"));
    // Re-running produces byte-identical output.
    let out_path2 = dir.join("acted2.mf");
    run(&out_path2);
    assert_eq!(std::fs::read_to_string(&out_path2).unwrap(), first);
}

#[test]
fn convolve_unit_unit() {
    let dir = tempdir();
    let s = scenario_a1_id();
    let scen_path = write_temp(&dir, "scen.txt", &textio::format_scenario(&s));
    let unit = s.unit_kernel().unwrap();
    let unit_text = textio::format_mf(&unit.mf);
    let kernel_path = write_temp(&dir, "unit.mf", &unit_text);
    let out = bin()
        .arg("convolve")
        .arg(&scen_path)
        .arg(&kernel_path)
        .arg(&kernel_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), unit_text);
}

#[test]
fn equiv_exit_codes() {
    let dir = tempdir();
    // Distinct objects: exit 1.
    let text_a = "mf\nring x:1 y:1\npotential x*y\ndminus1\n1 1\n0 0 : x\ndzero\n1 1\n0 0 : y\nweightsminus1 0\nweightszero 0\nend\n";
    let text_b = "mf\nring x:1 y:1\npotential x*y\ndminus1\n1 1\n0 0 : y\ndzero\n1 1\n0 0 : x\nweightsminus1 0\nweightszero 0\nend\n";
    let a = write_temp(&dir, "a.mf", text_a);
    let b = write_temp(&dir, "b.mf", text_b);
    let out = bin().arg("equiv").arg(&a).arg(&b).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("definitely-distinct"));
    // Same object: exit 0 with a certificate.
    let out = bin().arg("equiv").arg(&a).arg(&a).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("certificate"));
}

#[test]
fn json_mirror() {
    let dir = tempdir();
    let s = scenario_a1_id();
    let unit = s.unit_kernel().unwrap();
    let mf_path = write_temp(&dir, "unit.mf", &textio::format_mf(&unit.mf));
    // Reduce with JSON output, then feed the JSON back through validate.
    let json_path = dir.join("unit.json");
    let out = bin()
        .arg("reduce")
        .arg(&mf_path)
        .arg("--format")
        .arg("json")
        .arg("-o")
        .arg(&json_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin().arg("validate").arg(&json_path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // Identical information content.
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(textio::mf_from_json(&v).unwrap(), unit.mf);
}

#[test]
fn koszul_and_kappa_verbs() {
    let dir = tempdir();
    let out = bin()
        .arg("koszul")
        .arg("--base")
        .arg("y:0 y':0")
        .arg("--rho")
        .arg("y - y'")
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("potential y*t - y'*t"));

    let s = scenario_a1_id();
    let d = s.diagonal_module().unwrap();
    let dg_path = write_temp(&dir, "diag.dg", &textio::format_dgmodule(&d));
    let out = bin().arg("kappa").arg(&dg_path).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let unit = s.unit_kernel().unwrap();
    assert_eq!(text, textio::format_mf(&unit.mf));
}

#[test]
fn check_potentials_verb() {
    let dir = tempdir();
    let s = scenario_a1_id();
    let scen_path = write_temp(&dir, "scen.txt", &textio::format_scenario(&s));
    let out = bin().arg("check-potentials").arg(&scen_path).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
