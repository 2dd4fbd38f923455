//! End-to-end tests of the CLI surface: subcommand happy paths, exit codes,
//! and file-level composability of the pipeline stages.

use std::fs;
use std::path::{Path, PathBuf};

use hrrp::cli::run;
use hrrp::{load_dataset, make_ship, render_fleet, SceneParams};

fn write_fleet_json(dir: &Path) -> PathBuf {
    let path = dir.join("fleet.json");
    fs::write(
        &path,
        r#"{
            "ships": [
                {"id": "alpha", "length_m": 100, "width_m": 20, "n_scatterers": 48, "seed": 1},
                {"id": "beta", "length_m": 104, "width_m": 20, "n_scatterers": 48, "seed": 2}
            ],
            "scene": {"s": 256, "seed": 9},
            "aspects_deg": [40.0, 42.0, 44.0, 46.0, 48.0],
            "draws_per_aspect": 2
        }"#,
    )
    .unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_writes_the_same_dataset_as_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let fleet = write_fleet_json(dir.path());
    let out = dir.path().join("ds.csv");
    assert_eq!(run(["hrrp", "synth", "--fleet", s(&fleet), "--out", s(&out)]), 0);

    let ds = load_dataset(&out).unwrap();
    assert_eq!(ds.len(), 2 * 5 * 2);
    assert_eq!(ds.s(), 256);

    let ships = vec![
        make_ship("alpha", 100.0, 20.0, 48, 1).unwrap(),
        make_ship("beta", 104.0, 20.0, 48, 2).unwrap(),
    ];
    let scene = SceneParams { s: 256, seed: 9, ..SceneParams::default() };
    let direct = render_fleet(&ships, &[40.0, 42.0, 44.0, 46.0, 48.0], 2, &scene).unwrap();
    assert_eq!(ds, direct, "CLI and in-process rendering must agree");
}

#[test]
fn segment_reports_one_row_per_profile() {
    let dir = tempfile::tempdir().unwrap();
    let fleet = write_fleet_json(dir.path());
    let ds = dir.path().join("ds.csv");
    let seg = dir.path().join("seg.csv");
    assert_eq!(run(["hrrp", "synth", "--fleet", s(&fleet), "--out", s(&ds)]), 0);
    assert_eq!(run(["hrrp", "segment", "--in", s(&ds), "--out", s(&seg)]), 0);

    let text = fs::read_to_string(&seg).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "row_index,lrp_cells,lrp_m,tlop_m,mask");
    assert_eq!(lines.len(), 1 + 20);
    // masks are 256-bit strings, LRP in cells matches the mask's first run
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[4].len(), 256);
    assert!(fields[4].contains('1'));
}

#[test]
fn decompose_emits_three_component_rows_per_profile() {
    let dir = tempfile::tempdir().unwrap();
    let fleet = write_fleet_json(dir.path());
    let ds = dir.path().join("ds.csv");
    let comps = dir.path().join("comps.csv");
    assert_eq!(run(["hrrp", "synth", "--fleet", s(&fleet), "--out", s(&ds)]), 0);
    assert_eq!(
        run(["hrrp", "decompose", "--in", s(&ds), "--sigma", "0.5", "--out", s(&comps)]),
        0
    );

    let text = fs::read_to_string(&comps).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("row_index,component,c0,"));
    assert_eq!(lines.len(), 1 + 3 * 20);
    assert!(lines[1].starts_with("0,m,"));
    assert!(lines[2].starts_with("0,f,"));
    assert!(lines[3].starts_with("0,n,"));

    // f + n reconstructs the input row
    let input = load_dataset(&ds).unwrap();
    let parse = |line: &str| -> Vec<f64> {
        line.split(',').skip(2).map(|v| v.parse().unwrap()).collect()
    };
    let f = parse(lines[2]);
    let n = parse(lines[3]);
    for i in 0..input.s() {
        assert!((f[i] + n[i] - input.profiles()[0].cells()[i]).abs() < 1e-9);
    }
}

#[test]
fn metrics_covers_the_full_cross_product() {
    let dir = tempfile::tempdir().unwrap();
    let fleet = write_fleet_json(dir.path());
    let ds = dir.path().join("ds.csv");
    let out = dir.path().join("pairs.csv");
    assert_eq!(run(["hrrp", "synth", "--fleet", s(&fleet), "--out", s(&ds)]), 0);
    assert_eq!(
        run(["hrrp", "metrics", "--in-a", s(&ds), "--in-b", s(&ds), "--out", s(&out)]),
        0
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "i,j,mse,cosine,mse_f,cos_f");
    assert_eq!(lines.len(), 1 + 20 * 20);
    // the diagonal compares a profile with itself
    let diag: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(diag[..2], ["0", "0"]);
    assert_eq!(diag[2].parse::<f64>().unwrap(), 0.0);
    assert_eq!(diag[3].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn bench_writes_bins_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let fleet = write_fleet_json(dir.path());
    let ds = dir.path().join("ds.csv");
    let cfg = dir.path().join("bench.json");
    let out = dir.path().join("results");
    fs::write(
        &cfg,
        r#"{
            "pairing": {"n_per_ship_per_bin": 10, "pairing_seed": 3},
            "sigmas": [0.5, 2.0]
        }"#,
    )
    .unwrap();
    assert_eq!(run(["hrrp", "synth", "--fleet", s(&fleet), "--out", s(&ds)]), 0);
    assert_eq!(
        run(["hrrp", "bench", "--in", s(&ds), "--config", s(&cfg), "--out", s(&out)]),
        0
    );
    let bins = fs::read_to_string(out.join("bins.csv")).unwrap();
    assert!(bins.starts_with("bin,metric,mean_top_same,mean_top_diff,relative_evolution,n"));
    // all 10 aspects fall in bin 4: one populated bin x 4 metrics
    assert!(bins.lines().any(|l| l.starts_with("4,cos_f,")));
    let sweep = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(sweep.starts_with("sigma,metric,mean_relative_evolution"));
    assert_eq!(sweep.lines().count(), 1 + 2 * 4);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(["hrrp"]), 1);
    assert_eq!(run(["hrrp", "frobnicate"]), 1);
    assert_eq!(run(["hrrp", "synth", "--no-such-flag", "x"]), 1);
    assert_eq!(run(["hrrp", "--help"]), 0);
}

#[test]
fn data_errors_exit_2_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    assert_eq!(
        run(["hrrp", "segment", "--in", "/definitely/missing.csv", "--out", s(&out)]),
        2
    );
    assert!(!out.exists(), "failed runs must not leave output files");

    // malformed fleet config
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(["hrrp", "synth", "--fleet", s(&bad), "--out", s(&out)]), 2);
    assert!(!out.exists());

    // malformed dataset
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "ship_id,aspect_deg\nx,1\n").unwrap();
    assert_eq!(run(["hrrp", "segment", "--in", s(&csv), "--out", s(&out)]), 2);
    assert!(!out.exists());
}

#[test]
fn dataset_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let fleet = write_fleet_json(dir.path());
    let ds_path = dir.path().join("ds.csv");
    assert_eq!(run(["hrrp", "synth", "--fleet", s(&fleet), "--out", s(&ds_path)]), 0);
    let ds = load_dataset(&ds_path).unwrap();
    let copy = dir.path().join("copy.csv");
    hrrp::save_dataset(&ds, &copy).unwrap();
    assert_eq!(fs::read(&ds_path).unwrap(), fs::read(&copy).unwrap());
}
