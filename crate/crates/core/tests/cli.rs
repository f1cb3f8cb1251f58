//! The `hrlab` binary: exit codes, formats, config handling, determinism.

use std::process::{Command, Output};

fn hrlab(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hrlab"));
    cmd.args(args).env_remove("HRLAB_CONFIG").env_remove("HRLAB_WORKERS");
    if let Some(w) = workers {
        cmd.env("HRLAB_WORKERS", w);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn constants_table() {
    let o = hrlab(&["constants", "--n", "2:6"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# tool: hrlab "));
    assert!(text.contains("# spec_sha256: "));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 5);
    let n3 = &rows[1];
    assert_eq!(n3[2].parse::<f64>().unwrap(), 25.0 / 36.0);
    assert_eq!(n3[5].parse::<f64>().unwrap(), 9.0 / 16.0);
    let n5 = &rows[3];
    assert_eq!((n5[2].as_str(), n5[5].as_str()), ("6.2500000000000000e0", "1.5625000000000000e0"));

    let o = hrlab(&["constants", "--n", "2", "--gamma", "2", "--format", "json"], None);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["A"], 0.0);
    assert_eq!(v["rows"][0]["C"], 0.0);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["verify", "--profiles", "0"],
        vec!["verify", "--big-n", "2", "--eta", "2"],
        vec!["constants", "--n", "1"],
        vec!["verify", "--tol", "0.5"],
        vec!["verify", "--bogus"],
        vec!["probe", "--budget", "10"],
    ] {
        let o = hrlab(&args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(hrlab(&["constants"], Some("zero")).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let small = ["--n", "3:4", "--gamma", "0,2", "--profiles", "4"];
    let o = hrlab(&[&["verify"][..], &small].concat(), None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = hrlab(&[&["verify", "--debug-inflate-constant", "1.1"][..], &small].concat(), None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("# debug_inflate_constant: 1.1"));
}

#[test]
fn deterministic_across_workers() {
    let args = ["verify", "--n", "2:3", "--gamma", "-1:1", "--profiles", "6", "--seed", "11"];
    let a = hrlab(&args, Some("1"));
    let b = hrlab(&args, Some("4"));
    let c = hrlab(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let d = hrlab(&["verify", "--n", "2:3", "--gamma", "-1:1", "--profiles", "6", "--seed", "12"], None);
    assert_ne!(a.stdout, d.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spec.toml");
    std::fs::write(
        &cfg,
        "n = [3]\ngamma = [0.0, 1.0]\nbig_n = \"0:1\"\nprofiles = 2\nseed = 5\nformat = \"json\"\n\
         [[profile]]\nkind = \"poly_bump\"\na = 0.3\nb = 0.6\np = 3\ncoefficients = [1.0]\n",
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    let o =
        hrlab(&["verify", "--config", cfg.to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# seed: 5"));
    assert!(text.contains(",x000,"));
    let rows = data_rows(&text);
    // 2 gammas x 2 depths x (3 profiles + extremal) x 2 + 3 profiles x 6 alphas x 2 depths x 2
    assert_eq!(rows.len(), 2 * 2 * 4 * 2 + 3 * 6 * 2 * 2);
}

#[test]
fn factor_check_and_sweep() {
    let o = hrlab(&["factor-check", "--profiles", "5", "--alphas", "-2:3"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(data_rows(&stdout(&o)).len(), 5 * 6 * 4);
    let o = hrlab(&["sweep", "--n", "2", "--gamma", "2", "--big-n", "0:1", "--profiles", "5"], None);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.last().unwrap() == "true"));
}

#[test]
fn probe_reports() {
    let o = hrlab(&["probe", "--n", "2", "--gamma", "2", "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["optimality_open"], true);
    let o = hrlab(&["probe", "--n", "4,5", "--gamma", "0", "--format", "json"], None);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["mode_j"], 1);
    assert!(v["rows"][1]["gap"].as_f64().unwrap() <= 0.3125);
    let member = v["rows"][1]["best_member"].as_str().unwrap();
    assert!(hrlab_core::profile::RadialProfile::from_record_str(member).is_ok());
}
