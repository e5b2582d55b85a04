//! Scenario files: the model sections plus one optional section per command.
//! Unknown keys are rejected; every default is written back out when the
//! resolved configuration is echoed into output headers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cross_section::{build_model_with_s0, CrossSectionModel, LossSpec, Profile, ReactionSpec};
use crate::diagnostics::DEFAULT_DECAY_WINDOW;
use crate::error::{Error, Result};
use crate::front::FrontOptions;
use crate::ivp::{InitialProfile, DEFAULT_DT_MAX, DEFAULT_GUARD_MARGIN};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub length: f64,
    pub n_y: usize,
    #[serde(default = "one")]
    pub lewis: f64,
    #[serde(default = "one")]
    pub s0: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub samples: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            lambda_min: -2.0,
            lambda_max: 2.0,
            samples: 41,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub samples: usize,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            lambda_min: 0.05,
            lambda_max: 4.0,
            samples: 80,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub decay: Option<f64>,
}

impl Default for InitialProfile {
    fn default() -> Self {
        Self {
            decay: 0.5,
            fuel_decay: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            plateau: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub t_end: f64,
    pub dt_max: f64,
    /// Steps between diagnostic rows.
    pub cadence: usize,
    pub guard_margin: f64,
    pub fit_window: f64,
    pub decay_window: [f64; 2],
    pub snapshot_stride_x: usize,
    pub snapshot_stride_y: usize,
    pub initial: InitialProfile,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            x_min: -20.0,
            x_max: 80.0,
            n_x: 2001,
            t_end: 25.0,
            dt_max: DEFAULT_DT_MAX,
            cadence: 50,
            guard_margin: DEFAULT_GUARD_MARGIN,
            fit_window: 0.5,
            decay_window: [DEFAULT_DECAY_WINDOW.0, DEFAULT_DECAY_WINDOW.1],
            snapshot_stride_x: 10,
            snapshot_stride_y: 4,
            initial: InitialProfile::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontConfig {
    pub speed: Option<f64>,
    /// Approximate the minimal-speed front instead of solving at `speed`.
    pub minimal: bool,
    pub half_length: f64,
    pub n_x: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub violation_tol: f64,
    pub decay_window: [f64; 2],
    pub output_stride_x: usize,
}

impl Default for FrontConfig {
    fn default() -> Self {
        let o = FrontOptions::default();
        Self {
            speed: None,
            minimal: false,
            half_length: o.half_length,
            n_x: o.n_x,
            tol: o.tol,
            max_iter: o.max_iter,
            damping: o.damping,
            violation_tol: o.violation_tol,
            decay_window: [DEFAULT_DECAY_WINDOW.0, DEFAULT_DECAY_WINDOW.1],
            output_stride_x: 1,
        }
    }
}

impl FrontConfig {
    pub fn options(&self) -> FrontOptions {
        FrontOptions {
            half_length: self.half_length,
            n_x: self.n_x,
            max_iter: self.max_iter,
            tol: self.tol,
            damping: self.damping,
            violation_tol: self.violation_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub domain: DomainConfig,
    pub flow: Profile,
    pub reaction: ReactionSpec,
    pub loss: LossSpec,
    #[serde(default)]
    pub eigen: EigenConfig,
    #[serde(default)]
    pub dispersion: DispersionConfig,
    #[serde(default)]
    pub classify: ClassifyConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub front: FrontConfig,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim().replace('\n', " ")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                Error::ConfigNotFound(path.display().to_string())
            } else {
                Error::Config(format!("{}: {e}", path.display()))
            }
        })?;
        Self::parse(&text)
    }

    pub fn model(&self) -> Result<CrossSectionModel> {
        build_model_with_s0(
            self.domain.length,
            self.domain.n_y,
            &self.flow,
            &self.reaction,
            &self.loss,
            self.domain.lewis,
            self.domain.s0,
        )
    }

    /// The configuration with every default filled in, as TOML.
    pub fn resolved(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let m = (n - 1) as f64;
            (0..n).map(|i| (lo * (m - i as f64) + hi * i as f64) / m).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[domain]
length = 1.0
n_y = 9

[flow]
profile = "cosine"
amplitude = 2.0

[reaction]
kind = "linear"
amplitude = { profile = "constant", value = 1.0 }

[loss]
kind = "linear"
rate = { profile = "constant", value = 0.25 }
"#;

    #[test]
    fn defaults_fill_and_round_trip() {
        let cfg = ScenarioConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.simulate.n_x, 2001);
        assert_eq!(cfg.front.half_length, 40.0);
        let again = ScenarioConfig::parse(&cfg.resolved()).unwrap();
        assert_eq!(again, cfg);
        assert!(cfg.model().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[front]\nspeeed = 2.0\n");
        assert!(matches!(ScenarioConfig::parse(&text), Err(Error::Config(_))));
    }

    #[test]
    fn missing_file() {
        let err = ScenarioConfig::load(Path::new("/nonexistent/x.toml")).unwrap_err();
        assert_eq!(err.code(), "CONFIG_NOT_FOUND");
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-2.0, 2.0, 41);
        assert_eq!(v[0], -2.0);
        assert_eq!(v[20], 0.0);
        assert_eq!(v[40], 2.0);
    }
}
