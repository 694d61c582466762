use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{ConditionMode, Preprocess, SweepConfig};
use crate::classify::{ClassifierSpec, Protocol};
use crate::features::FeatureParams;
use crate::signal::{default_duration_grid, SynthSpec};
use crate::{Error, Result};

fn default_grid() -> Vec<f64> {
    default_duration_grid()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// One JSON document describing a full run. Exactly one of `manifest` and
/// `synth` names the data source; every other key has a default.
///
/// ```json
/// {
///   "synth": {"n_subjects": 10, "duration_s": 60},
///   "grid": [0.5, 1, 2, 4],
///   "classifiers": [{"kind": "knn", "k": 5}, {"kind": "gbt", "n_trees": 50}],
///   "master_seed": 7,
///   "output_dir": "out"
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthSpec>,
    #[serde(default = "default_grid")]
    pub grid: Vec<f64>,
    #[serde(default)]
    pub preprocess: Preprocess,
    #[serde(default)]
    pub features: FeatureParams,
    #[serde(default = "ClassifierSpec::defaults")]
    pub classifiers: Vec<ClassifierSpec>,
    #[serde(default)]
    pub protocol: Protocol,
    #[serde(default)]
    pub condition_mode: ConditionMode,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Also write one feature-matrix CSV per duration.
    #[serde(default)]
    pub export_features: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            synth: Some(SynthSpec::default()),
            grid: default_grid(),
            preprocess: Preprocess::default(),
            features: FeatureParams::default(),
            classifiers: ClassifierSpec::defaults(),
            protocol: Protocol::default(),
            condition_mode: ConditionMode::default(),
            master_seed: 0,
            output_dir: default_output_dir(),
            export_features: false,
        }
    }
}

/// Written next to the sweep outputs; `sweep --config` accepts it back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub config: RunConfig,
}

impl RunConfig {
    /// Parses and validates. Also accepts a [`RunManifest`] document.
    pub fn from_json_str(text: &str, origin: &Path) -> Result<Self> {
        let json_err = |e| Error::Json {
            path: origin.to_path_buf(),
            source: e,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
        let is_manifest = value.get("toolkit_version").is_some() && value.get("config").is_some();
        let config = if is_manifest {
            let m: RunManifest = serde_json::from_value(value).map_err(json_err)?;
            if m.toolkit_version != crate::VERSION {
                log::warn!(
                    "run manifest was written by version {}, this is {}",
                    m.toolkit_version,
                    crate::VERSION
                );
            }
            m.config
        } else {
            serde_json::from_value(value).map_err(json_err)?
        };
        config.validate()?;
        Ok(config)
    }

    /// Reads `path`; a relative `manifest` is resolved against the config
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json_str(&text, path)?;
        if let (Some(m), Some(dir)) = (config.manifest.as_mut(), path.parent()) {
            if m.is_relative() && !dir.as_os_str().is_empty() {
                *m = dir.join(&*m);
            }
        }
        Ok(config)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.manifest, &self.synth) {
            (Some(_), Some(_)) => return Err(Error::Config("give either manifest or synth, not both".into())),
            (None, None) => return Err(Error::Config("no data source: set manifest or synth".into())),
            _ => {}
        }
        self.sweep_config().validate()?;
        if let Some(s) = &self.synth {
            s.validate()?;
            let longest = self.grid.iter().copied().fold(0.0, f64::max);
            if s.duration_s < longest {
                return Err(Error::Config(format!(
                    "synth duration {} s is shorter than the longest grid duration {longest} s",
                    s.duration_s
                )));
            }
            if self.preprocess.enabled && self.preprocess.high_hz >= s.fs / 2.0 {
                return Err(Error::Config(format!(
                    "preprocess high_hz {} must be below Nyquist ({} Hz)",
                    self.preprocess.high_hz,
                    s.fs / 2.0
                )));
            }
        }
        Ok(())
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            grid: self.grid.clone(),
            preprocess: self.preprocess.clone(),
            features: self.features.clone(),
            classifiers: self.classifiers.clone(),
            protocol: self.protocol.clone(),
            condition_mode: self.condition_mode,
            master_seed: self.master_seed,
        }
    }

    pub fn manifest(&self) -> RunManifest {
        RunManifest {
            toolkit_version: crate::VERSION.to_string(),
            config: self.clone(),
        }
    }
}
