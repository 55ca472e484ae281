//! Output files for a sweep run: CSV, run manifest, and the resolved
//! config that reproduces the run.
//!
//! Files are staged to a temp name and renamed into place, so a failed
//! run never leaves a partial CSV behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::sim::{SchemeKind, SweepResult};

pub const ARTIFACT_NAME: &str = "offloadsim";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Machine-readable description of one emitted CSV.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub csv: &'a str,
    /// Figure preset that produced the sweep, when one did.
    pub figure: Option<&'a str>,
    pub parameter: &'static str,
    pub values: Vec<f64>,
    pub trials_per_point: u64,
    pub seed: u64,
    pub config_hash: &'a str,
    pub schemes: Vec<&'static str>,
    /// Fully resolved config in the on-disk schema; loading it back
    /// reproduces this run byte for byte.
    pub resolved_config: &'a str,
}

fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Write `<stem>.csv`, `<stem>.manifest.json`, and `<stem>.config.toml`
/// under `dir`. Returns the paths written.
pub fn write_sweep_artifacts(
    dir: &Path,
    csv_name: &str,
    result: &SweepResult,
    resolved_config_toml: &str,
    figure: Option<&str>,
) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;

    let stem = csv_name.strip_suffix(".csv").unwrap_or(csv_name);
    let csv_path = dir.join(csv_name);
    let manifest_path = dir.join(format!("{stem}.manifest.json"));
    let config_path = dir.join(format!("{stem}.config.toml"));

    let manifest = RunManifest {
        artifact: ARTIFACT_NAME,
        version: ARTIFACT_VERSION,
        csv: csv_name,
        figure,
        parameter: result.parameter.name(),
        values: result.rows.iter().map(|r| r.swept_value).collect::<Vec<_>>().into_iter().fold(
            Vec::new(),
            |mut acc, v| {
                if acc.last() != Some(&v) {
                    acc.push(v);
                }
                acc
            },
        ),
        trials_per_point: result.trials_per_point,
        seed: result.seed,
        config_hash: &result.config_hash,
        schemes: SchemeKind::ALL.iter().map(|s| s.label()).collect(),
        resolved_config: resolved_config_toml,
    };
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");

    atomic_write(&csv_path, result.to_csv().as_bytes())?;
    atomic_write(&manifest_path, manifest_json.as_bytes())?;
    atomic_write(&config_path, resolved_config_toml.as_bytes())?;
    Ok(vec![csv_path, manifest_path, config_path])
}
