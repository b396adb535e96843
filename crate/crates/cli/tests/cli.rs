use std::path::Path;
use std::process::{Command, Output};

fn mmw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmw")).args(args).output().expect("binary runs")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn sidecar(p: &Path) -> serde_json::Value {
    serde_json::from_str(&read(p)).unwrap()
}

fn column(csv: &str, i: usize) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(i).unwrap().parse().unwrap()).collect()
}

#[test]
fn empty_config_resolves_to_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "").unwrap();
    let out = dir.path().join("r.csv");
    let o = mmw(&["rate", "-c", cfg.to_str().unwrap(), "--values", "100", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let side = sidecar(&dir.path().join("r.json"));
    let r = &side["resolved"];
    assert_eq!(r["user_density_per_m2"], 1e-3);
    assert_eq!(r["bs_density_per_m2"], 1e-4);
    assert_eq!(r["bandwidth_hz"], 2e9);
    assert_eq!(r["bs_power_mw"], 1000.0);
    assert_eq!(r["ue_power_mw"], 100.0);
    assert_eq!(r["carrier_hz"], 73e9);
    assert!((r["max_gain"].as_f64().unwrap() - 63.0957344480193).abs() < 1e-9);
    assert!((r["beamwidth_rad"].as_f64().unwrap() - 10f64.to_radians()).abs() < 1e-15);
    let c = &side["config"];
    assert_eq!(c["access"]["alpha_nlos"], 3.3);
    assert_eq!(c["access"]["beta_db"], 70.0);
    assert_eq!(c["access_blockage"]["los_inside"], 0.11);
    assert_eq!(c["access_blockage"]["ball_radius_m"], 200.0);
    assert_eq!(c["radio"]["noise_figure_db"], 10.0);
    assert_eq!(c["hybrid"]["uhf_density_per_km2"], 5.0);
}

#[test]
fn density_override_is_echoed_per_square_meter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = mmw(&["rate", "--set", "network.bs_density_per_km2=100", "--values", "100", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let side = sidecar(&dir.path().join("r.json"));
    assert_eq!(side["resolved"]["bs_density_per_m2"], 1e-4);
    assert_eq!(side["overrides"][0], "network.bs_density_per_km2=100");
}

#[test]
fn invalid_config_exits_with_code_2() {
    let o = mmw(&["coverage", "--set", "radio.beamwidth_deg=0", "--values", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("beamwidth"));
    assert_eq!(mmw(&["coverage", "--set", "radio.nonsense=1"]).status.code(), Some(2));
    assert_eq!(mmw(&["coverage", "--values", "3,1"]).status.code(), Some(2));
}

#[test]
fn three_point_coverage_is_nonincreasing() {
    let o = mmw(&["coverage", "--min", "-10", "--max", "20", "--points", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("threshold,value"));
    let p = column(&csv, 1);
    assert_eq!(p.len(), 3);
    assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
    assert!(p.windows(2).all(|w| w[1] <= w[0]), "{p:?}");
}

#[test]
fn simulation_is_byte_identical_across_runs_and_thread_counts() {
    let args = [
        "simulate",
        "--metric",
        "sinr",
        "--set",
        "sim.trials=1500",
        "--set",
        "sim.width_m=1000",
        "--set",
        "sim.height_m=1000",
        "--points",
        "6",
    ];
    let a = mmw(&[&["--threads", "1"], &args[..]].concat());
    let b = mmw(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let csv = String::from_utf8(a.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("threshold,value,ci_low,ci_high"));
    let (p, lo, hi) = (column(&csv, 1), column(&csv, 2), column(&csv, 3));
    for i in 0..p.len() {
        assert!(lo[i] <= p[i] && p[i] <= hi[i]);
    }
}

#[test]
fn sidecar_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let o = mmw(&[
        "simulate",
        "--metric",
        "snr",
        "--link",
        "backhaul",
        "--set",
        "sim.trials=800",
        "--set",
        "sim.seed=42",
        "--set",
        "network.abs_fraction=0.3",
        "--min",
        "-5",
        "--max",
        "25",
        "--points",
        "4",
        "-o",
        first.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let second = dir.path().join("second.csv");
    let side = dir.path().join("first.json");
    let o = mmw(&["simulate", "--metric", "snr", "--link", "backhaul", "-c", side.to_str().unwrap(), "-o", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&first), read(&second));
    let s = sidecar(&dir.path().join("second.json"));
    assert_eq!(s["seed"], 42);
    assert_eq!(s["config"]["network"]["abs_fraction"], 0.3);
}

#[test]
fn validate_reports_the_largest_gap() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = mmw(&["validate", "--metric", "snr", "--set", "sim.trials=2000", "--points", "5", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&out);
    let (a, s) = (column(&csv, 1), column(&csv, 2));
    let gap = a.iter().zip(&s).map(|(a, s)| (a - s).abs()).fold(0.0, f64::max);
    let side = sidecar(&dir.path().join("v.json"));
    assert_eq!(side["max_deviation"].as_f64().unwrap(), gap);
    assert!(gap < 0.05, "gap {gap}");
}

#[test]
fn unreachable_contour_exits_with_code_5() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = mmw(&["contour", "--target-mbps", "1000000", "--values", "100", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    assert_eq!(read(&out), "bs_density_per_km2,abs_fraction\n100.0,\n");
}

#[test]
fn unwritable_output_exits_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("out.csv");
    let o = mmw(&["rate", "--values", "100", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(mmw(&["rate", "-c", "/nonexistent/config.toml"]).status.code(), Some(4));
}

#[test]
fn blockage_fit_of_an_empty_map_is_all_los() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("map.geojson");
    std::fs::write(&map, r#"{"type":"FeatureCollection","features":[]}"#).unwrap();
    let o = mmw(&["fit-blockage", "--buildings", map.to_str().unwrap(), "--values", "50,100"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "ball_radius_m,los_inside,std_error\n50.0,1.0,0.0\n100.0,1.0,0.0\n");
    let bad = dir.path().join("bad.geojson");
    std::fs::write(
        &bad,
        r#"{"type":"FeatureCollection","features":[{"geometry":{"type":"Polygon","coordinates":[[[1,1],[2,1],[2,2],[1,1]]]}}]}"#,
    )
    .unwrap();
    assert_eq!(mmw(&["fit-blockage", "--buildings", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn shipped_configs_resolve() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = mmw_cli::schema::load_config(Some(&path), &[]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.resolve().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if let Some(g) = &cfg.grid {
            g.values().unwrap();
        }
        seen += 1;
    }
    assert!(seen >= 5);
    let reference = mmw_cli::schema::load_config(Some(&dir.join("reference.toml")), &[]).unwrap();
    assert_eq!(reference, mmw_cli::schema::FileConfig::default());
}
