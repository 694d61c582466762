//! JSON manifest + headerless CSV dataset format.
//!
//! ```json
//! {
//!   "name": "stew",
//!   "fs": 128.0,
//!   "channels": ["AF3", "F7", ...],
//!   "recordings": [
//!     {"subject_id": "s01", "condition": "rest", "file": "s01_rest.csv"}
//!   ]
//! }
//! ```
//!
//! Each CSV has one row per sample and one column per channel, in the
//! manifest's channel order. Relative file paths resolve against the
//! manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Dataset, Recording};
use crate::report::write_atomic;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub fs: f64,
    pub channels: Vec<String>,
    pub recordings: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub condition: String,
    pub file: PathBuf,
}

pub fn load_dataset(manifest_path: impl AsRef<Path>) -> Result<Dataset<f64>> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));

    let mut recordings = Vec::with_capacity(manifest.recordings.len());
    for entry in &manifest.recordings {
        let path = if entry.file.is_absolute() {
            entry.file.clone()
        } else {
            base.join(&entry.file)
        };
        let data = read_channel_csv(&path, manifest.channels.len())?;
        recordings.push(Recording::new(
            entry.subject_id.clone(),
            entry.condition.clone(),
            manifest.channels.clone(),
            manifest.fs,
            data,
        )?);
    }
    Dataset::new(manifest.name, recordings)
}

fn read_channel_csv(path: &Path, n_channels: usize) -> Result<Vec<Vec<f64>>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut data = vec![Vec::new(); n_channels];
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != n_channels {
            return Err(Error::InconsistentChannels(format!(
                "{} row {} has {} columns, manifest lists {} channels",
                path.display(),
                row + 1,
                record.len(),
                n_channels
            )));
        }
        for (col, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                file: path.display().to_string(),
                row: row + 1,
                column: col + 1,
                message: format!("non-numeric cell {cell:?}"),
            })?;
            data[col].push(value);
        }
    }
    Ok(data)
}

/// Writes `dataset` as `manifest.json` plus one CSV per recording under `dir`.
/// Returns the manifest path.
pub fn write_dataset(dataset: &Dataset<f64>, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::new();
    for (i, rec) in dataset.recordings().iter().enumerate() {
        let file = PathBuf::from(format!(
            "{:03}_{}_{}.csv",
            i,
            sanitize(&rec.subject_id),
            sanitize(&rec.condition)
        ));
        let mut out = String::with_capacity(rec.n_samples() * rec.n_channels() * 12);
        for t in 0..rec.n_samples() {
            for c in 0..rec.n_channels() {
                if c > 0 {
                    out.push(',');
                }
                out.push_str(&rec.channel(c)[t].to_string());
            }
            out.push('\n');
        }
        write_atomic(&dir.join(&file), out.as_bytes())?;
        entries.push(ManifestEntry {
            subject_id: rec.subject_id.clone(),
            condition: rec.condition.clone(),
            file,
        });
    }
    let manifest = Manifest {
        name: dataset.name.clone(),
        fs: dataset.fs(),
        channels: dataset.channels().to_vec(),
        recordings: entries,
    };
    let path = dir.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write_atomic(&path, json.as_bytes())?;
    Ok(path)
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}
