//! File inputs: instances, noise models, coupling maps and outcome data.

use std::path::{Path, PathBuf};

use qcharge_core::model::{parse_instance_str, InstanceFile};
use qcharge_core::report::{counts_to_distribution, load_record};
use qcharge_core::{ChargingUnit, Counts, CouplingMap, Distribution, ExperimentRecord, ReadoutNoiseModel};
use sha2::{Digest, Sha256};

use crate::commands::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn check_exists(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{}: no such file", path.display())))
    }
}

/// Output paths must land in an existing directory.
pub fn check_writable(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::Usage(format!(
            "{}: directory {} does not exist",
            path.display(),
            dir.display()
        ))),
        _ => Ok(()),
    }
}

pub struct Instance {
    pub unit: ChargingUnit,
    /// SHA-256 of the canonical instance JSON.
    pub hash: String,
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = read(path)?;
    let unit = parse_instance_str(&text)?;
    let canonical = serde_json::to_string(&InstanceFile::from_unit(&unit))?;
    Ok(Instance {
        unit,
        hash: hex::encode(Sha256::digest(canonical.as_bytes())),
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Usage(format!("{}: invalid {what}: {e}", path.display())))
}

pub fn load_noise(path: &Path) -> Result<ReadoutNoiseModel, CliError> {
    parse_json(path, "readout noise model")
}

pub fn coupling_map(spec: &str, n: usize) -> Result<CouplingMap, CliError> {
    match spec {
        "line" => Ok(CouplingMap::line(n)),
        "ring" => Ok(CouplingMap::ring(n)),
        "full" => Ok(CouplingMap::full(n)),
        path => parse_json(&PathBuf::from(path), "coupling map"),
    }
}

/// Measured or computed outcomes in any of the accepted file shapes.
pub enum Outcomes {
    Distribution(Distribution),
    Counts(Counts),
    Record(Box<ExperimentRecord>),
}

impl Outcomes {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let value: serde_json::Value = serde_json::from_str(&read(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let has = |key: &str| value.get(key).is_some();
        if has("schema_version") {
            Ok(Outcomes::Record(Box::new(load_record(path)?)))
        } else if has("counts") {
            let counts: Counts = serde_json::from_value(value)
                .map_err(|e| CliError::Usage(format!("{}: invalid counts: {e}", path.display())))?;
            counts.validate()?;
            Ok(Outcomes::Counts(counts))
        } else if has("probabilities") {
            let d: Distribution = serde_json::from_value(value)
                .map_err(|e| CliError::Usage(format!("{}: invalid distribution: {e}", path.display())))?;
            d.validate()?;
            Ok(Outcomes::Distribution(d))
        } else {
            Err(CliError::Usage(format!(
                "{}: expected a distribution, counts or experiment record",
                path.display()
            )))
        }
    }

    pub fn distribution(&self) -> Result<Distribution, CliError> {
        Ok(match self {
            Outcomes::Distribution(d) => d.clone(),
            Outcomes::Counts(c) => counts_to_distribution(c)?,
            Outcomes::Record(r) => counts_to_distribution(&r.counts)?,
        })
    }
}
