//! JSON run configuration shared by the command-line subcommands.
//!
//! Every section has defaults, so `{}` is a valid document describing the
//! reference parameter set with `w_plus = 3`. Unknown keys are rejected
//! and errors carry the dotted path of the offending key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::Scheme;
use crate::model::{Model, ModelParams};
use crate::simulator::{BaseMode, EscapeConfig, Grid, InstabilityConfig, Perturbation, SimOptions};
use crate::wave::OrbitOptions;
use crate::weights::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightConfig {
    pub w_plus: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self { w_plus: 3.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    #[serde(rename = "T", alias = "t_final")]
    pub t_final: f64,
    pub cfl: f64,
    pub scheme: Scheme,
    pub base_mode: BaseMode,
    pub p_floor: f64,
    pub record_dt: f64,
    pub sat_frac: f64,
    pub perturbation: Perturbation,
    pub escape: EscapeConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        let o = SimOptions::default();
        let i = InstabilityConfig::default();
        Self {
            t_final: i.t_final,
            cfl: o.cfl,
            scheme: o.scheme,
            base_mode: o.base_mode,
            p_floor: o.p_floor,
            record_dt: i.record_dt,
            sat_frac: i.sat_frac,
            perturbation: i.perturbation,
            escape: EscapeConfig::default(),
        }
    }
}

impl SimConfig {
    pub fn options(&self) -> SimOptions {
        SimOptions {
            scheme: self.scheme,
            base_mode: self.base_mode,
            cfl: self.cfl,
            p_floor: self.p_floor,
        }
    }

    pub fn instability(&self) -> InstabilityConfig {
        InstabilityConfig {
            t_final: self.t_final,
            record_dt: self.record_dt,
            sat_frac: self.sat_frac,
            perturbation: self.perturbation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub h_min: f64,
    pub h_max: f64,
    pub n_samples: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            h_min: -3.0,
            h_max: 3.0,
            n_samples: 601,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub emit_svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            emit_svg: false,
        }
    }
}

/// Pass/fail tolerances applied by the `wave` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveChecks {
    pub r1_max: f64,
    pub r2_max: f64,
    pub rate_tol: f64,
}

impl Default for WaveChecks {
    fn default() -> Self {
        Self {
            r1_max: 1e-6,
            r2_max: 1e-5,
            rate_tol: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub weight: WeightConfig,
    pub wave: OrbitOptions,
    pub wave_checks: WaveChecks,
    pub grid: Grid,
    pub sim: SimConfig,
    pub spectrum: SpectrumConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::reference(),
            weight: WeightConfig::default(),
            wave: OrbitOptions::default(),
            wave_checks: WaveChecks::default(),
            grid: Grid::default(),
            sim: SimConfig::default(),
            spectrum: SpectrumConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

fn config_err(key: &str, detail: impl ToString) -> Error {
    Error::Config {
        key: key.to_string(),
        detail: detail.to_string(),
    }
}

impl RunConfig {
    /// Parses a JSON document without semantic validation.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let key = if path == "." { "<root>".to_string() } else { path };
            config_err(&key, e.into_inner())
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Model with derived quantities; errors point at `model`.
    pub fn model(&self) -> Result<Model> {
        Model::new(self.model).map_err(|e| match e {
            Error::InvalidParams(_) => config_err("model", e),
            other => other,
        })
    }

    pub fn weight_spec(&self, model: &Model) -> Result<WeightSpec> {
        WeightSpec::new(model, self.weight.w_plus).map_err(|e| config_err("weight.w_plus", e))
    }

    /// Checks the option sections that do not depend on a solved wave.
    pub fn validate_options(&self, model: &Model) -> Result<()> {
        self.wave.validate().map_err(|e| config_err("wave", e))?;
        self.grid.validate(model).map_err(|e| config_err("grid", e))?;
        self.sim.perturbation.validate().map_err(|e| config_err("sim.perturbation", e))?;
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_err(key, format!("must be positive, got {v}")))
            }
        };
        positive("sim.T", self.sim.t_final)?;
        positive("sim.cfl", self.sim.cfl)?;
        positive("sim.p_floor", self.sim.p_floor)?;
        positive("sim.record_dt", self.sim.record_dt)?;
        positive("sim.sat_frac", self.sim.sat_frac)?;
        positive("sim.escape.epsilon0", self.sim.escape.epsilon0)?;
        positive("sim.escape.amplitude", self.sim.escape.amplitude)?;
        let s = &self.spectrum;
        if !(s.h_min.is_finite() && s.h_max.is_finite() && s.h_min <= s.h_max) {
            return Err(config_err("spectrum", format!("need h_min <= h_max, got [{}, {}]", s.h_min, s.h_max)));
        }
        if s.n_samples == 0 {
            return Err(config_err("spectrum.n_samples", "must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_reference() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.model, ModelParams::reference());
        assert_eq!(c.spectrum.n_samples, 601);
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::default();
        c.sim.perturbation.carrier_h = 0.5;
        c.weight.w_plus = 2.9;
        let back = RunConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(c.to_json().contains("\"T\""));
    }

    #[test]
    fn unknown_key_is_located() {
        let err = RunConfig::from_json(r#"{"sim": {"perturbation": {"amplitud": 1}}}"#).unwrap_err();
        match err {
            Error::Config { key, detail } => {
                assert_eq!(key, "sim.perturbation.amplitud");
                assert!(detail.contains("unknown field"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors() {
        let mut c = RunConfig::default();
        c.model.c = 2.0;
        let e = c.model().unwrap_err();
        assert!(e.to_string().contains("existence condition c > 2·sqrt(gamma) fails"));
        let mut c = RunConfig::default();
        c.weight.w_plus = 5.0;
        let m = c.model().unwrap();
        assert!(c.weight_spec(&m).unwrap_err().to_string().contains("w_plus = 5 outside J"));
        let mut c = RunConfig::default();
        c.sim.record_dt = 0.0;
        assert!(matches!(c.validate_options(&m), Err(Error::Config { key, .. }) if key == "sim.record_dt"));
    }
}
