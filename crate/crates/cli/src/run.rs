//! The `run` pipeline: solve a configured scenario and write its outputs.

use crate::config::ScenarioConfig;
use crate::error::CliError;
use piezo_core::coupler::{norm_timeseries, solve_scenario, NormHistory, Scenario, SimulationResult};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// Everything a run produced, kept in memory for callers that post-process.
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
    pub result: SimulationResult,
    pub norms: NormHistory,
}

/// Solves without touching the file system.
pub fn simulate(config: &ScenarioConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let resolved = config.resolved()?;
    let scenario = resolved.scenario()?;
    let result = solve_scenario(&scenario)?;
    let norms = norm_timeseries(&result, &scenario.disc)?;
    Ok(RunOutput {
        config: resolved,
        scenario,
        result,
        norms,
    })
}

/// Solves and writes `norms.csv`, `receivers.csv`, `snapshots/` and
/// `manifest.toml` into `dir` (default: the configured output directory).
pub fn run(config: &ScenarioConfig, dir: Option<&Path>) -> Result<(RunOutput, PathBuf), CliError> {
    let out = simulate(config)?;
    let dir = dir.map(Path::to_path_buf).unwrap_or_else(|| out.config.output.dir.clone());
    write_outputs(&out, &dir)?;
    Ok((out, dir))
}

fn fmt(v: f64) -> String {
    // shortest round-trip representation, so reruns are byte-identical
    format!("{v}")
}

pub fn norms_csv(norms: &NormHistory) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(NormHistory::COLUMNS).map_err(csv_err)?;
    for n in 0..norms.len() {
        w.write_record(norms.row(n).iter().map(|&v| fmt(v))).map_err(csv_err)?;
    }
    finish(w)
}

pub fn receivers_csv(result: &SimulationResult) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t".to_string()];
    header.extend((0..result.receivers.len()).map(|k| format!("r{k}")));
    w.write_record(&header).map_err(csv_err)?;
    for (t, row) in result.times.iter().zip(&result.total) {
        let rec: Vec<String> = std::iter::once(*t).chain(row.iter().copied()).map(fmt).collect();
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}

fn snapshot_csv(snap: &piezo_core::coupler::Snapshot) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "y", "acoustic", "elastic"]).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    for ((p, a), e) in snap.points.iter().zip(&snap.acoustic).zip(&snap.elastic) {
        w.write_record([fmt(p[0]), fmt(p[1]), opt(*a), opt(*e)]).map_err(csv_err)?;
    }
    finish(w)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e.to_string()))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir.join("snapshots"))?;
    let mut files: Vec<(String, String)> = vec![
        ("norms.csv".into(), norms_csv(&out.norms)?),
        ("receivers.csv".into(), receivers_csv(&out.result)?),
    ];
    for (k, snap) in out.result.snapshots.iter().enumerate() {
        files.push((format!("snapshots/frame_{k:04}.csv"), snapshot_csv(snap)?));
    }
    let mut checksums = toml::Table::new();
    for (name, text) in &files {
        fs::write(dir.join(name), text)?;
        checksums.insert(name.clone(), toml::Value::String(sha256_hex(text.as_bytes())));
    }
    fs::write(dir.join("manifest.toml"), manifest(out, checksums))?;
    Ok(())
}

fn manifest(out: &RunOutput, checksums: toml::Table) -> String {
    let disc = &out.scenario.disc;
    let scheme = &out.scenario.scheme;
    let mut derived = toml::Table::new();
    let mut put = |k: &str, v: toml::Value| {
        derived.insert(k.into(), v);
    };
    put("version", toml::Value::String(env!("CARGO_PKG_VERSION").into()));
    put("final_time", toml::Value::Float(scheme.final_time()));
    put("cq_radius", toml::Value::Float(scheme.lambda()));
    put("stored_frequencies", toml::Value::Integer(scheme.num_stored() as i64));
    put("sound_speed", toml::Value::Float(disc.sound_speed()));
    put("boundary_panels", toml::Value::Integer(disc.curve.len() as i64));
    put("x_dofs", toml::Value::Integer(disc.num_x() as i64));
    put("y_dofs", toml::Value::Integer(disc.num_y() as i64));
    if let Some(solid) = &disc.solid {
        put("displacement_dofs", toml::Value::Integer(solid.spaces.num_vector() as i64));
        put("potential_dofs", toml::Value::Integer(solid.spaces.num_scalar() as i64));
        put("triangles", toml::Value::Integer(solid.spaces.mesh().num_triangles() as i64));
    }
    let config: toml::Table = toml::from_str(&out.config.to_toml()).expect("config is a table");
    let mut root = toml::Table::new();
    root.insert("config".into(), toml::Value::Table(config));
    root.insert("derived".into(), toml::Value::Table(derived));
    root.insert("checksums".into(), toml::Value::Table(checksums));
    toml::to_string(&root).expect("manifest serializes")
}

/// Accepts either a plain config or a manifest written by [`run`].
pub fn load_config_or_manifest(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    if let (Some(toml::Value::Table(cfg)), true) = (table.get("config"), table.contains_key("checksums")) {
        let cfg = ScenarioConfig::from_toml(&toml::to_string(cfg).expect("table serializes"))?;
        return Ok(cfg);
    }
    ScenarioConfig::load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn norms_csv_has_seven_columns() {
        let h = NormHistory {
            times: vec![0.0, 0.5],
            psi_l2: vec![0.0, 1.0],
            psi_grad_l2: vec![0.0, 2.0],
            u_l2: vec![0.0, 3.0],
            u_h1: vec![0.0, 4.0],
            phi_half: vec![0.0, 5.0],
            lambda_minus_half: vec![0.0, 6.0],
        };
        let text = norms_csv(&h).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,psi_l2,grad_psi_l2,u_l2,u_h1,phi_h12,lambda_hm12");
        assert_eq!(lines[2], "0.5,1,2,3,4,5,6");
    }
}
