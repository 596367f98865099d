//! Pipeline configuration shared by every subcommand.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cine::CinematographyConfig;
use crate::cues::CueConfig;
use crate::error::{Error, Result};
use crate::refine::RefinementConfig;
use crate::scoring::MatchFormat;
use crate::sim::SimConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExportConfig {
    pub sample_rate_hz: f64,
}

impl Default for ExportConfig {
    fn default() -> Self {
        Self { sample_rate_hz: 50.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrationConfig {
    pub max_median_reprojection_px: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            max_median_reprojection_px: 5.0,
        }
    }
}

/// Error bounds `verify` enforces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub max_ball_rmse_m: f64,
    pub max_player_rmse_m: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_ball_rmse_m: 0.05,
            max_player_rmse_m: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub refinement: RefinementConfig,
    pub cinematography: CinematographyConfig,
    pub cues: CueConfig,
    pub scoring: MatchFormat,
    pub export: ExportConfig,
    pub calibration: CalibrationConfig,
    pub simulator: SimConfig,
    pub verify: VerifyConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.refinement.validate()?;
        self.cinematography.validate()?;
        self.cues.validate()?;
        self.scoring.validate()?;
        let r = self.export.sample_rate_hz;
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Config("export.sample_rate_hz must be > 0".into()));
        }
        let m = self.calibration.max_median_reprojection_px;
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Config("calibration.max_median_reprojection_px must be > 0".into()));
        }
        for (name, v) in [
            ("max_ball_rmse_m", self.verify.max_ball_rmse_m),
            ("max_player_rmse_m", self.verify.max_player_rmse_m),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("verify.{name} must be ≥ 0")));
            }
        }
        Ok(())
    }
}

/// Parses a JSON config. Missing keys take defaults; unknown keys are
/// ignored and reported as warnings.
pub fn load_config(text: &str) -> Result<(PipelineConfig, Vec<String>)> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let known = serde_json::to_value(PipelineConfig::default()).expect("config serializes");
    let mut warnings = Vec::new();
    unknown_keys(&value, &known, "", &mut warnings);
    let cfg: PipelineConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok((cfg, warnings))
}

fn unknown_keys(given: &Value, known: &Value, path: &str, out: &mut Vec<String>) {
    let (Value::Object(g), Value::Object(k)) = (given, known) else {
        return;
    };
    for (key, v) in g {
        let here = if path.is_empty() {
            key.clone()
        } else {
            format!("{path}.{key}")
        };
        match k.get(key) {
            Some(kv) => unknown_keys(v, kv, &here, out),
            None => out.push(format!("unknown config key `{here}` ignored")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_defaults() {
        let (cfg, w) = load_config("{}").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        assert!(w.is_empty());
        assert_eq!(cfg.export.sample_rate_hz, 50.0);
        assert_eq!(cfg.simulator.pixel_noise_sigma_px, 0.0);
        assert_eq!(cfg.simulator.dropout_rate, 0.0);
    }

    #[test]
    fn unknown_keys_warned_at_any_depth() {
        let (cfg, w) = load_config(r#"{"bogus": 1, "refinement": {"knn_k": 3, "extra": true}}"#).unwrap();
        assert_eq!(cfg.refinement.knn_k, 3);
        assert_eq!(w.len(), 2);
        assert!(w[0].contains("`bogus`"));
        assert!(w[1].contains("`refinement.extra`"));
    }

    #[test]
    fn nested_invariants_enforced() {
        assert!(load_config(r#"{"scoring": {"best_of": 4}}"#).is_err());
        assert!(load_config(r#"{"export": {"sample_rate_hz": 0}}"#).is_err());
        assert!(load_config(r#"{"cinematography": {"slow_motion_factor": 2.0}}"#).is_err());
        assert!(load_config("[").is_err());
    }

    #[test]
    fn round_trips() {
        let text = serde_json::to_string(&PipelineConfig::default()).unwrap();
        let (cfg, w) = load_config(&text).unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        assert!(w.is_empty());
    }
}
