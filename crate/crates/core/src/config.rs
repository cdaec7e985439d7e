//! JSON run configuration with strict schema and dotted-path overrides.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};

use crate::ensemble::{EnsembleSpec, ModelSpec, RealizationPolicy};
use crate::error::{Error, Result};
use crate::monitor::{MonitorConfig, ObservableSet};
use crate::sweep::{SweepAxes, SweepSpec};

fn default_n_traj() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub realization_policy: RealizationPolicy,
    /// Worker threads; `None` uses the available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            n_traj: default_n_traj(),
            master_seed: 0,
            realization_policy: RealizationPolicy::default(),
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub monitor: MonitorConfig,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub observables: ObservableSet,
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: Option<SweepAxes>,
}

impl RunConfig {
    /// Parses `text`, applies `section.key=value` overrides, then validates.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config is not valid JSON: {e}")))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: RunConfig =
            serde_json::from_value(doc).map_err(|e| Error::InvalidInput(format!("config schema: {e}")))?;
        cfg.ensemble_spec().validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, overrides)
    }

    pub fn ensemble_spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            model: self.model,
            monitor: self.monitor,
            n_traj: self.ensemble.n_traj,
            master_seed: self.ensemble.master_seed,
            realization_policy: self.ensemble.realization_policy,
            observables: self.observables,
        }
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let axes = self
            .sweep
            .clone()
            .ok_or_else(|| Error::param("sweep", "section is required for a sweep"))?;
        let spec = SweepSpec {
            base: self.ensemble_spec(),
            axes,
            output: self.output.dir.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// `a.b.c=value`; the value is read as JSON when it parses, else as a string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::InvalidInput(format!("override `{assignment}` is not of the form key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::InvalidInput(format!("override path `{path}` is malformed")));
    }
    let mut node = doc;
    for k in &keys[..keys.len() - 1] {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| Error::InvalidInput(format!("override path `{path}` crosses a non-object")))?;
        node = obj.entry(k.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    node.as_object_mut()
        .ok_or_else(|| Error::InvalidInput(format!("override path `{path}` crosses a non-object")))?
        .insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}
