use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn eos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eos"))
        .args(args)
        .env_remove("EOS_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn manifest(out: &Path) -> serde_json::Value {
    let mut p = out.as_os_str().to_owned();
    p.push(".manifest.json");
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

#[test]
fn sweep_n_writes_sixty_rows_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2a.csv");
    let o = eos(&[
        "sweep-n",
        "--set",
        "1",
        "--n-from",
        "1e6",
        "--n-to",
        "1e13",
        "--points",
        "60",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 61);
    assert_eq!(
        lines[0],
        "N,rms_total_per_photon,rms_sn,rms_s1,s2sq,s3s1,s2s0,s4s0,chi3"
    );
    assert!(lines[1].starts_with("1.00000000000e6,"));
    assert!(lines[60].starts_with("1.00000000000e13,"));
    assert!(!text.contains('\r'));
    let m = manifest(&out);
    assert_eq!(m["command"], "sweep-n");
    assert_eq!(m["parameter_set"], "set1");
    assert_eq!(m["converged"], true);
    assert_eq!(m["outputs"][0], out.to_str().unwrap());
    assert_eq!(m["hash"].as_str().unwrap().len(), 64);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = eos(&["sweep-n", "--points", "12", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        (fs::read(&out).unwrap(), manifest(&out))
    };
    let (a, ma) = run("a.csv");
    let (b, mb) = run("b.csv");
    assert_eq!(a, b);
    // outputs differ by path, so compare everything else
    for key in [
        "command",
        "parameter_set",
        "config",
        "tolerances",
        "settings",
        "convergence",
    ] {
        assert_eq!(ma[key], mb[key], "{key}");
    }
    let again = dir.path().join("a.csv");
    let o = eos(&[
        "sweep-n",
        "--points",
        "12",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(manifest(&again)["hash"], ma["hash"]);
}

#[test]
fn usage_errors_exit_with_two() {
    let o = eos(&["sweep-n", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--bogus"));
    assert_eq!(eos(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(eos(&["oracle", "--channels", "3"]).status.code(), Some(2));
    assert_eq!(eos(&["--help"]).status.code(), Some(0));
}

#[test]
fn computation_errors_exit_with_one() {
    assert_eq!(eos(&["sweep-n", "--set", "7"]).status.code(), Some(1));
    assert_eq!(eos(&["gating", "--threads", "0"]).status.code(), Some(1));
    assert_eq!(eos(&["sweep-n", "--n-from=-1"]).status.code(), Some(1));
}

#[test]
fn strict_mode_refuses_unconverged_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = eos(&[
        "sweep-n",
        "--points",
        "3",
        "--max-subdiv",
        "2",
        "--strict",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
    let lax = eos(&[
        "sweep-n",
        "--points",
        "3",
        "--max-subdiv",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(lax.status.code(), Some(0));
    assert_eq!(manifest(&out)["converged"], false);
}

#[test]
fn config_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wide.toml");
    fs::write(&cfg, "[crystal]\nw0_um = 6.0\n").unwrap();
    let out = dir.path().join("g.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_eos"))
        .args(["gating", "--points", "5", "--out", out.to_str().unwrap()])
        .env("EOS_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["parameter_set"], "custom");
    assert_eq!(m["config"]["crystal_w0_um"], 6.0);

    fs::write(&cfg, "[crystal]\nwaist = 6.0\n").unwrap();
    let bad = Command::new(env!("CARGO_BIN_EXE_eos"))
        .args(["gating"])
        .env("EOS_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("waist"));
}

#[test]
fn help_names_the_figures() {
    let cases = [
        ("sweep-n", "Fig. 2"),
        ("waist-sweep", "Fig. S1"),
        ("gating", "Figs. S6/S7"),
        ("correlate", "Fig. 3"),
    ];
    for (cmd, fig) in cases {
        let o = eos(&[cmd, "--help"]);
        assert!(stdout(&o).contains(fig), "{cmd}");
    }
}

#[test]
fn gating_columns_and_json() {
    let o = eos(&["gating", "--set", "2", "--points", "4"]);
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "nu_thz,R_sq,zeta_over_dLw,abs"
    );
    assert_eq!(text.lines().count(), 5);
    let j = eos(&["gating", "--set", "2", "--points", "4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["columns"][1], "R_sq");
}

#[test]
fn correlate_columns() {
    let o = eos(&[
        "correlate",
        "--points",
        "3",
        "--tau-max-fs",
        "300",
        "--terms",
        "main2,cross2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "tau_fs,main2,cross2,v22a,v22b,v22c,v13a,v13b,v04a,v04b,v04c,g2,g4,G"
    );
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(first[0], 0.0);
    assert!(first[1] > 0.0);
    assert_eq!(first[3], 0.0);
    assert_eq!(first[11], first[1] + first[2]);
    assert_eq!(eos(&["correlate", "--terms", "v99"]).status.code(), Some(1));
}

#[test]
fn oracle_reports_closed_forms() {
    let o = eos(&["oracle", "--alpha", "0.5", "--A-re", "0", "--A-im", "0.1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let text = v.to_string();
    assert!(text.contains("0.25125"), "{text}");
}

#[test]
fn selftest_passes() {
    let o = eos(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 30);
    assert!(!text.lines().any(|l| l.starts_with("FAIL")));
}
