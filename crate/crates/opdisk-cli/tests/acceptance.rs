//! Acceptance of the CLI surface: deterministic reports and meaningful
//! exit codes.

use std::path::PathBuf;
use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opdisk"))
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("opdisk-acceptance-{}-{name}", std::process::id()));
    p
}

#[test]
fn criterion_10_determinism_and_exit_codes() {
    // Two identical invocations produce byte-identical JSON.
    let out_a = temp_path("a.json");
    let out_b = temp_path("b.json");
    for out in [&out_a, &out_b] {
        let status = binary()
            .args([
                "verify",
                "--suite",
                "all",
                "--algebra",
                "matrix:3",
                "--samples",
                "40",
                "--seed",
                "42",
                "--out",
            ])
            .arg(out)
            .status()
            .expect("binary runs");
        assert!(status.success(), "verify run failed");
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    let identical = a == b;
    println!(
        "criterion 10 determinism            [{}] byte-identical reports ({} bytes)",
        if identical { "PASS" } else { "FAIL" },
        a.len()
    );
    assert!(identical);
    std::fs::remove_file(&out_a).ok();
    std::fs::remove_file(&out_b).ok();

    // A deliberately broken finite-difference step makes the differential
    // suite fail, with max_error populated and a nonzero exit code.
    let out_c = temp_path("c.json");
    let status = binary()
        .args([
            "verify",
            "--suite",
            "differential",
            "--algebra",
            "matrix:2",
            "--samples",
            "5",
            "--seed",
            "7",
            "--fd-step",
            "1",
            "--out",
        ])
        .arg(&out_c)
        .status()
        .expect("binary runs");
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out_c).unwrap()).unwrap();
    let failing_has_error = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["passed"].as_bool().unwrap())
        .all(|c| c["max_error"].as_f64().unwrap().is_finite());
    let nonzero = !status.success();
    let any_failed = !report["all_passed"].as_bool().unwrap();
    println!(
        "criterion 10 exit-codes             [{}] broken step reported and rejected",
        if nonzero && any_failed && failing_has_error {
            "PASS"
        } else {
            "FAIL"
        }
    );
    assert!(nonzero && any_failed && failing_has_error);
    std::fs::remove_file(&out_c).ok();

    // Config errors exit with a distinct code.
    let status = binary()
        .args(["verify", "--algebra", "banach:3"])
        .status()
        .expect("binary runs");
    assert_eq!(status.code(), Some(2));
}

#[test]
fn moment_image_csv_shape() {
    let out = temp_path("image.csv");
    let status = binary()
        .args([
            "moment-image",
            "--algebra",
            "scalar",
            "--grid",
            "5",
            "--seed",
            "3",
            "--out",
        ])
        .arg(&out)
        .status()
        .expect("binary runs");
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kind,id,t,nu_c1_0_re,nu_c1_0_im,nu_c2_0_re,nu_c2_0_im,defect,certificate_pass"
    );
    assert!(lines.clone().all(|l| l.ends_with("true")));
    // Witness rows cover the t-grid.
    assert!(csv.lines().any(|l| l.starts_with("witness") && l.contains(",0.25,")));
    std::fs::remove_file(&out).ok();
}

#[test]
fn scalar_compare_emits_report() {
    let out = temp_path("scalar.json");
    let status = binary()
        .args(["scalar-compare", "--samples", "30", "--seed", "9", "--out"])
        .arg(&out)
        .status()
        .expect("binary runs");
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["suite"], "scalar_oracle");
    assert!(report["all_passed"].as_bool().unwrap());
    std::fs::remove_file(&out).ok();
}
