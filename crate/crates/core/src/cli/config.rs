// Copyright 2026 The ddr Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::model::{
    validate_params, GridError, RawParams, ScanGrid, SystemParams, ValidationError,
};
use crate::response::MethodSelection;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config must be a JSON object")]
    NotAnObject,
    #[error(transparent)]
    Params(#[from] ValidationError),
    #[error("invalid scan block: {0}")]
    Grid(#[from] GridError),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanBlock {
    delta_min: f64,
    delta_max: f64,
    points: usize,
}

/// A parsed config whose physical parameters have not been checked yet.
#[derive(Debug, Clone)]
pub struct RawConfig {
    pub params: RawParams,
    pub grid: Option<ScanGrid>,
    pub method: Option<MethodSelection>,
    pub output: Option<PathBuf>,
}

/// Everything one CLI invocation needs.
///
/// The file is a flat JSON object of parameter fields plus optional `scan`
/// (`{"delta_min", "delta_max", "points"}`), `method` and `output` keys.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub grid: Option<ScanGrid>,
    pub method: Option<MethodSelection>,
    pub output: Option<PathBuf>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let Value::Object(mut map) = serde_json::from_str::<Value>(text)? else {
            return Err(ConfigError::NotAnObject);
        };
        let grid = take::<ScanBlock>(&mut map, "scan")?
            .map(|s| ScanGrid::new(s.delta_min, s.delta_max, s.points))
            .transpose()?;
        let method = take::<MethodSelection>(&mut map, "method")?;
        let output = take::<PathBuf>(&mut map, "output")?;
        let params = serde_json::from_value(Value::Object(map))?;
        Ok(Self {
            params,
            grid,
            method,
            output,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn validate(self) -> Result<RunConfig, ConfigError> {
        Ok(RunConfig {
            params: validate_params(&self.params)?,
            grid: self.grid,
            method: self.method,
            output: self.output,
        })
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        RawConfig::parse(text)?.validate()
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        RawConfig::load(path)?.validate()
    }

    pub fn grid_or(&self, fallback: ScanGrid) -> ScanGrid {
        self.grid.unwrap_or(fallback)
    }
}

fn take<T: serde::de::DeserializeOwned>(
    map: &mut Map<String, Value>,
    key: &str,
) -> Result<Option<T>, ConfigError> {
    map.remove(key)
        .map(serde_json::from_value)
        .transpose()
        .map_err(ConfigError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPLIT: &str = r#"{"omega": 1, "omega_c": 0.2, "gamma_b": 1, "gamma_c": 1, "gamma_d": 1,
        "scan": {"delta_min": -1, "delta_max": 1, "points": 11}, "method": "numeric", "output": "x.csv"}"#;

    #[test]
    fn parses_flat_document() {
        let c = RunConfig::parse(SPLIT).unwrap();
        assert_eq!(c.params.omega_c, 0.2);
        assert_eq!(c.grid.unwrap().points, 11);
        assert_eq!(c.method, Some(MethodSelection::Numeric));
        assert_eq!(c.output.as_deref(), Some(Path::new("x.csv")));
    }

    #[test]
    fn transit_injection_defaults_to_equal_thirds() {
        let c = RunConfig::parse(r#"{"omega": 1, "gamma_b": 1, "gamma_0": 0.3}"#).unwrap();
        assert!((c.params.r_c - 0.1).abs() < 1e-15);
        assert_eq!(c.params.eta, 1.0);
        assert_eq!(c.params.probe, 1e-4);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_json() {
        assert!(matches!(
            RunConfig::parse(r#"{"omgea": 1}"#),
            Err(ConfigError::Json(_))
        ));
        assert!(matches!(RunConfig::parse("{"), Err(ConfigError::Json(_))));
        assert!(matches!(
            RunConfig::parse("[1]"),
            Err(ConfigError::NotAnObject)
        ));
    }

    #[test]
    fn flux_imbalance_is_a_parameter_error() {
        let text = r#"{"omega": 1, "gamma_b": 1, "gamma_0": 0.3, "r_b": 0.1, "r_c": 0, "r_d": 0}"#;
        assert!(RawConfig::parse(text).is_ok());
        assert!(matches!(
            RunConfig::parse(text),
            Err(ConfigError::Params(_))
        ));
    }

    #[test]
    fn bad_scan_block() {
        let text = r#"{"omega": 1, "scan": {"delta_min": 1, "delta_max": -1, "points": 11}}"#;
        assert!(matches!(RawConfig::parse(text), Err(ConfigError::Grid(_))));
    }
}
