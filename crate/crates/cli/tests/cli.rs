use piezo_cli::builtins::builtin_scenario;
use piezo_cli::cli_main;
use piezo_cli::run::{run, sha256_hex};
use std::fs;
use std::path::Path;

fn small_square() -> piezo_cli::ScenarioConfig {
    let mut cfg = builtin_scenario("square").unwrap();
    cfg.mesh.resolution = Some(2);
    cfg.time.nsteps = 12;
    cfg.output.raster.as_mut().unwrap().nx = 9;
    cfg.output.raster.as_mut().unwrap().ny = 9;
    cfg.output.snapshot_times = vec![0.2];
    cfg
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn zero_time_step_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_square();
    cfg.time.dt = 0.0;
    let path = dir.path().join("bad.toml");
    fs::write(&path, toml_text(&cfg)).unwrap();
    assert_eq!(cli_main(["piezo", "run", path.to_str().unwrap()]), 2);
    assert!(!dir.path().join("output").exists());
}

fn toml_text(cfg: &piezo_cli::ScenarioConfig) -> String {
    // to_toml does not validate, so invalid values survive serialization
    cfg.to_toml()
}

#[test]
fn missing_config_and_bad_arguments_exit_with_two() {
    assert_eq!(cli_main(["piezo", "run", "/nonexistent/config.toml"]), 2);
    assert_eq!(cli_main(["piezo", "frobnicate"]), 2);
    assert_eq!(cli_main(["piezo", "mesh", "hexagon", "3", "/tmp/x.msh"]), 2);
}

#[test]
fn mesh_subcommand_writes_a_parseable_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pentagon.msh");
    assert_eq!(cli_main(["piezo", "mesh", "pentagon", "3", out.to_str().unwrap()]), 0);
    let mesh = piezo_core::meshio::parse_msh(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(mesh.panels().len(), 15);
}

#[test]
fn example_subcommand_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("circle.toml");
    assert_eq!(cli_main(["piezo", "example", "circle", out.to_str().unwrap()]), 0);
    let cfg = piezo_cli::ScenarioConfig::load(&out).unwrap();
    assert_eq!(cfg, builtin_scenario("circle").unwrap());
}

#[test]
fn runs_are_deterministic_and_checksummed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_square();
    let (first, a) = run(&cfg, Some(&dir.path().join("a"))).unwrap();
    let (_, b) = run(&cfg, Some(&dir.path().join("b"))).unwrap();
    assert_eq!(first.result.snapshots.len(), 1);
    let files = ["norms.csv", "receivers.csv", "snapshots/frame_0000.csv"];
    for f in files {
        assert_eq!(read(&a, f), read(&b, f), "{f} differs between runs");
    }

    let manifest: toml::Table = toml::from_str(&read(&a, "manifest.toml")).unwrap();
    let sums = manifest["checksums"].as_table().unwrap();
    assert_eq!(sums.len(), files.len());
    for f in files {
        assert_eq!(sums[f].as_str().unwrap(), sha256_hex(read(&a, f).as_bytes()));
    }
    assert!(manifest["derived"]["x_dofs"].as_integer().unwrap() > 0);

    // rerunning from the manifest reproduces the outputs
    let c = dir.path().join("c");
    let code = cli_main([
        "piezo",
        "run",
        a.join("manifest.toml").to_str().unwrap(),
        "--out",
        c.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for f in files {
        assert_eq!(read(&a, f), read(&c, f), "{f} differs after manifest rerun");
    }
}

#[test]
fn output_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_square();
    let (out, d) = run(&cfg, Some(dir.path())).unwrap();
    let norms = read(&d, "norms.csv");
    assert_eq!(norms.lines().next().unwrap(), "t,psi_l2,grad_psi_l2,u_l2,u_h1,phi_h12,lambda_hm12");
    assert_eq!(norms.lines().count(), cfg.time.nsteps + 2);
    let rec = read(&d, "receivers.csv");
    assert_eq!(rec.lines().next().unwrap(), "t,r0,r1");
    let snap = read(&d, "snapshots/frame_0000.csv");
    assert_eq!(snap.lines().count(), 82);
    // inside points carry only the elastic value, outside points only the acoustic one
    let raster = &out.result.snapshots[0];
    for ((a, e), line) in raster.acoustic.iter().zip(&raster.elastic).zip(snap.lines().skip(1)) {
        assert!(!(a.is_some() && e.is_some()));
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[2].is_empty(), a.is_none());
        assert_eq!(cells[3].is_empty(), e.is_none());
    }
}

#[test]
fn failed_validation_exits_with_four() {
    assert_eq!(cli_main(["piezo", "validate", "--only", "2", "--perturb-v", "0.01"]), 4);
    assert_eq!(cli_main(["piezo", "validate", "--only", "1,3"]), 0);
}
