//! End-to-end smoke tests of the command-line interface.

use std::io::Write;
use std::process::Command;

fn bstlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bstlab"))
}

fn stdout_of(cmd: &mut Command) -> String {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn constants_prints_known_digits() {
    let text = stdout_of(bstlab().arg("constants"));
    assert!(text.contains("c_prime=0.373365"), "{text}");
    assert!(text.contains("c=4.311070"), "{text}");
    // real-axis boundary of the square-moment region: 1 -/+ 1/sqrt(2)
    assert!(text.contains("0.292893"), "{text}");
    assert!(text.contains("1.707106") || text.contains("1.707107"), "{text}");
}

#[test]
fn constants_json_structure() {
    let text = stdout_of(bstlab().args(["constants", "--format", "json"]));
    let doc: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert!(doc["constants"]["c_prime"].as_f64().unwrap() > 0.37);
    assert!(doc["region"].as_array().unwrap().len() > 100);
    let first = &doc["region"][0];
    for key in ["z_re", "z_im", "q", "f"] {
        assert!(first.get(key).is_some(), "region record carries {key}");
    }
}

#[test]
fn malformed_flags_exit_nonzero() {
    let out = bstlab().args(["simulate", "bst", "--n", "nope"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--n"), "{err}");
    // unknown subcommand prints usage
    let out = bstlab().arg("frobnicate").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn simulate_bst_is_deterministic_and_well_formed() {
    let run = || {
        stdout_of(bstlab().args([
            "simulate", "bst", "--n", "200", "--seed", "31415",
        ]))
    };
    let a = run();
    assert_eq!(a, run(), "same seed, same bytes");
    let lines: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "n,d,saturation,height");
    assert_eq!(lines.len(), 201);
    // first insertion is at the root, afterwards depths stay within bounds
    assert_eq!(lines[1], "1,0,1,1");
    for row in &lines[2..] {
        let cols: Vec<u32> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[1] < cols[0]); // d_m <= m - 1 for m >= 2
        assert!(cols[2] <= cols[3]);
    }
    // the header echoes the seed so the file is self-reproducing
    assert!(a.contains("# seed=31415"));
}

#[test]
fn simulate_yule_reports_scaled_counts() {
    let text = stdout_of(bstlab().args([
        "simulate", "yule", "--n", "500", "--seed", "7",
    ]));
    let last = text.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    assert_eq!(cols[0], "500");
    let scaled: f64 = cols[2].parse().unwrap();
    assert!(scaled > 0.0 && scaled < 20.0, "n e^-tau_n plausible: {scaled}");
}

#[test]
fn profile_table_sums_to_leaf_count() {
    let text = stdout_of(bstlab().args(["profile", "--n", "300", "--seed", "2"]));
    let mut total = 0u64;
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("k,")) {
        total += line.split(',').nth(1).unwrap().parse::<u64>().unwrap();
    }
    assert_eq!(total, 301);
    assert!(text.contains("# total_count=301"));
}

#[test]
fn martingale_residual_is_tiny() {
    let text = stdout_of(bstlab().args([
        "martingale", "--n", "256", "--z", "0.5:1.5:0.5", "--seed", "3",
    ]));
    for line in text.lines().skip_while(|l| !l.starts_with("n,")).skip(1) {
        let residual: f64 = line.split(',').next_back().unwrap().parse().unwrap();
        assert!(residual < 1e-10, "{line}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "seed = 1\nn = 50").unwrap();
    drop(f);
    let text = stdout_of(bstlab().args([
        "simulate",
        "bst",
        "--config",
        path.to_str().unwrap(),
        "--seed",
        "99",
    ]));
    assert!(text.contains("# seed=99"), "flag wins over file");
    assert!(text.contains("# n=50"), "file value survives where no flag is given");
}

#[test]
fn verify_single_criterion_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bstlab()
        .args(["verify", "--criterion", "1", "--output", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS [ 1]"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["pass"], serde_json::Value::Bool(true));
    assert_eq!(doc["criteria"][0]["id"], 1);
}

#[test]
fn verify_exit_code_reflects_failures() {
    // criterion 14 is the documented red criterion: the binary must exit
    // nonzero on it
    let out = bstlab().args(["verify", "--criterion", "14"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL [14]"));
}

#[test]
fn spine_json_carries_statistics() {
    let text = stdout_of(bstlab().args([
        "spine", "--n", "400", "--two-z", "2", "--replicates", "400", "--seed", "5",
        "--format", "json",
    ]));
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["samples"].as_array().unwrap().len(), 400);
    assert!(doc["stats"]["lln_ratio"].as_f64().unwrap() > 0.0);
    assert!(doc["stats"]["ldp"].as_array().unwrap().len() == 4);
}
