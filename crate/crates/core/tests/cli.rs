//! End-to-end checks of the `satq` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_satq");

fn satq(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

const SMALL: &[&str] = &[
    "--set",
    "constellation.n_nodes=12",
    "--set",
    "simulation.t_sim_s=20",
    "--set",
    "simulation.n_mc=3",
];

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["--out", dir.to_str().unwrap(), "--seed", "7"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    args.push("run");
    satq(&args)
}

#[test]
fn validate_config_accepts_defaults() {
    let out = satq(&["validate-config"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("configuration ok"));
    assert!(text.contains("n_nodes = 50"));

    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.toml");
    assert_eq!(satq(&["--config", shipped, "validate-config"]).status.code(), Some(0));
}

#[test]
fn invalid_configuration_exits_with_code_2() {
    for args in [
        &["--set", "routing.f_min=1.5", "validate-config"][..],
        &["--set", "channel.sigma_fade=-0.2", "run"][..],
        &["--set", "routing.bogus=1", "validate-config"][..],
        &["--set", "channel.regime=foggy", "validate-config"][..],
        &["--config", "/nonexistent/satq.toml", "run"][..],
        &["sweep-nodes", "--sizes", "abc"][..],
    ] {
        let out = satq(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn runtime_failure_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    // Nothing is ever in range, so there is nothing to aggregate.
    let out = run_into(dir.path(), &["--set", "constellation.d_max_km=10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn run_is_byte_identical_across_repeats_and_threads() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let out = run_into(a.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let banner = String::from_utf8_lossy(&out.stderr);
    assert!(banner.contains("seed 7") && banner.contains("[constellation]"));
    assert!(run_into(b.path(), &[]).status.success());
    assert!(run_into(c.path(), &["--parallel", "4"]).status.success());

    let mut names: Vec<String> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["run_seed7.json", "run_standard_seed7.csv", "run_standard_seed7_routes.csv"]
    );
    for name in &names {
        let first = fs::read(a.path().join(name)).unwrap();
        assert_eq!(first, fs::read(b.path().join(name)).unwrap(), "{name}");
        assert_eq!(first, fs::read(c.path().join(name)).unwrap(), "{name} (parallel)");
    }

    let routes = fs::read_to_string(a.path().join("run_standard_seed7_routes.csv")).unwrap();
    assert_eq!(routes.lines().count(), 1 + 3 * 20 * 5);
    assert!(routes.starts_with("run,step,t_s,source,destination,path,"));
}

#[test]
fn sweep_nodes_writes_one_csv_per_regime() {
    let dir = tempfile::tempdir().unwrap();
    let out = satq(&[
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "simulation.t_sim_s=5",
        "--set",
        "simulation.n_mc=1",
        "sweep-nodes",
        "--sizes",
        "8,10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for regime in ["clear_sky", "standard", "strong_turbulence"] {
        let csv = fs::read_to_string(dir.path().join(format!("sweep_nodes_{regime}_seed42.csv"))).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("N,regime,sigma_fade,rho,mean_f_eff,mean_r_eff,mean_path_len,"));
        assert!(lines[1].starts_with(&format!("8,{regime},")));
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sweep_nodes_seed42.json")).unwrap())
            .unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn sweep_fading_and_density_files() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "--out",
        dir.path().to_str().unwrap(),
        "--set",
        "simulation.t_sim_s=5",
        "--set",
        "simulation.n_mc=1",
    ];
    let mut fading = base.to_vec();
    fading.extend(["sweep-fading", "--sigmas", "0.02,0.1", "--sizes", "10", "--regimes", "standard"]);
    assert!(satq(&fading).status.success());
    let csv = fs::read_to_string(dir.path().join("sweep_fading_standard_seed42.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().ends_with(",1.0"));

    let mut density = base.to_vec();
    density.extend(["sweep-density", "--sizes", "8,10,12", "--regimes", "clear_sky"]);
    assert!(satq(&density).status.success());
    let csv = fs::read_to_string(dir.path().join("sweep_density_clear_sky_seed42.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}
