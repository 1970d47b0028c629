use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use satq_ffi::*;

fn last_error() -> String {
    let p = satq_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_functions() {
    assert_eq!(satq_purify(0.5), 0.5);
    assert_eq!(satq_purify(1.0), 1.0);
    assert!((satq_qber(0.9) - 0.05).abs() < 1e-15);
    assert!((satq_secure_key_rate(0.7, 1e5) - 7e4).abs() < 1e-9);
    let mut loss = 0.0;
    assert_eq!(unsafe { satq_geometric_loss_db(500.0, 810e-9, &mut loss) }, SatqStatus::Ok);
    assert!((loss - 257.794).abs() < 0.01);
    assert!(satq_last_error().is_null());
}

#[test]
fn error_codes_and_messages() {
    let mut loss = 0.0;
    let s = unsafe { satq_geometric_loss_db(0.0, 810e-9, &mut loss) };
    assert_eq!(s, SatqStatus::InvalidArgument);
    assert!(last_error().contains("d_km"), "{}", last_error());
    assert_eq!(unsafe { satq_geometric_loss_db(1.0, 1.0, ptr::null_mut()) }, SatqStatus::NullPointer);

    let mut cfg = ptr::null_mut();
    let bad = "seed = 1\n";
    let s = unsafe { satq_config_from_toml(bad.as_ptr().cast(), bad.len(), &mut cfg) };
    assert_eq!(s, SatqStatus::Config);
    assert!(cfg.is_null());
    assert!(last_error().contains("missing field"), "{}", last_error());
}

#[test]
fn graph_paths_and_buffers() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(satq_graph_new(4, &mut g), SatqStatus::Ok);
        for (i, j, c) in [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 3.5)] {
            assert_eq!(satq_graph_add_edge(g, i, j, c), SatqStatus::Ok);
        }
        let mut nodes = [0usize; 4];
        let (mut len, mut cost) = (0usize, 0.0);
        assert_eq!(
            satq_shortest_path(g, 0, 3, nodes.as_mut_ptr(), 4, &mut len, &mut cost),
            SatqStatus::Ok
        );
        assert_eq!((&nodes[..len], cost), (&[0, 1, 2, 3][..], 3.0));
        assert_eq!(
            satq_shortest_path(g, 0, 3, nodes.as_mut_ptr(), 2, &mut len, ptr::null_mut()),
            SatqStatus::BufferTooSmall
        );
        assert_eq!(len, 4);
        assert_eq!(
            satq_second_path(g, 0, 3, nodes.as_mut_ptr(), 4, &mut len, &mut cost),
            SatqStatus::Ok
        );
        assert_eq!((&nodes[..len], cost), (&[0, 3][..], 3.5));
        assert_eq!(
            satq_shortest_path(g, 0, 9, nodes.as_mut_ptr(), 4, &mut len, &mut cost),
            SatqStatus::InvalidArgument
        );
        assert_eq!(satq_graph_add_edge(g, 0, 1, -1.0), SatqStatus::InvalidArgument);
        satq_graph_free(g);

        let mut h = ptr::null_mut();
        satq_graph_new(3, &mut h);
        satq_graph_add_edge(h, 0, 1, 1.0);
        assert_eq!(
            satq_shortest_path(h, 0, 2, nodes.as_mut_ptr(), 4, &mut len, &mut cost),
            SatqStatus::NoPath
        );
        satq_graph_free(h);
        satq_graph_free(ptr::null_mut());
    }
}

#[test]
fn config_overrides_and_monte_carlo() {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(satq_config_default(&mut cfg), SatqStatus::Ok);
        for kv in [
            "constellation.n_nodes=12",
            "simulation.t_sim_s=20",
            "simulation.n_mc=2",
        ] {
            let kv = CString::new(kv).unwrap();
            assert_eq!(satq_config_set(cfg, kv.as_ptr()), SatqStatus::Ok);
        }
        let bad = CString::new("routing.t_min=-1").unwrap();
        assert_eq!(satq_config_set(cfg, bad.as_ptr()), SatqStatus::Config);

        let mut a = SatqStats::default();
        let mut b = SatqStats::default();
        assert_eq!(satq_monte_carlo(cfg, 1, &mut a), SatqStatus::Ok);
        assert_eq!(satq_monte_carlo(cfg, 2, &mut b), SatqStatus::Ok);
        assert_eq!(a, b);
        assert_eq!(a.run_count, 2);
        assert_eq!(a.n_requests, 2 * 20 * 5);
        assert!(a.mean_f_eff > 0.0 && a.mean_f_eff <= 1.0);
        assert_eq!(satq_monte_carlo(ptr::null(), 1, &mut a), SatqStatus::NullPointer);
        satq_config_free(cfg);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/satq.h"),
    )
    .unwrap();
    for sym in [
        "satq_last_error",
        "satq_version",
        "satq_purify",
        "satq_qber",
        "satq_secure_key_rate",
        "satq_geometric_loss_db",
        "satq_config_default",
        "satq_config_from_toml",
        "satq_config_set",
        "satq_config_free",
        "satq_monte_carlo",
        "satq_graph_new",
        "satq_graph_add_edge",
        "satq_graph_free",
        "satq_shortest_path",
        "satq_second_path",
        "SATQ_STATUS_BUFFER_TOO_SMALL",
        "typedef struct SatqConfig SatqConfig",
    ] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}

/// Compile and run a C program against the header and static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .and_then(|deps| deps.parent())
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libsatq_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let exe = profile_dir.join("satq_c_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "C smoke failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("c smoke ok"));
}
