//! JSON run specifications for `weylsteer steer`.
//!
//! ```json
//! {
//!   "model": {"device": "inductive-rf", "g": 1, "k": 0.1, "omega1": 3.8716, "omega2": 0.0258},
//!   "gamma": {"kind": "sin2", "period": 3.14159},
//!   "grid": {"t_end": 1.5708, "n_samples": 200},
//!   "units": "pi-over-2"
//! }
//! ```
//!
//! `model` is either a device model (tagged by `device`) or a generic
//! constant-shape drive `{"frame": "x", "controls": {...}, "ansatz": "full-system"}`
//! over the seven steering generators. When `grid.t_end` is omitted for a
//! device model with a constant envelope, the run stops at the CNOT time.

use serde::{Deserialize, Serialize};
use weylsteer_core::envelope::Envelope;
use weylsteer_core::lie::Frame;
use weylsteer_core::steer::{AnsatzKind, ControlVector};
use weylsteer_core::tracking::DeviceModel;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Device(DeviceModel),
    Controls {
        #[serde(default)]
        frame: Frame,
        controls: ControlVector,
        #[serde(default = "default_ansatz")]
        ansatz: AnsatzKind,
    },
}

fn default_ansatz() -> AnsatzKind {
    AnsatzKind::TrackingSymmetric
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Units {
    Radians,
    #[default]
    #[serde(rename = "pi-over-2")]
    PiOver2,
}

impl Units {
    pub fn convert(self, radians: f64) -> f64 {
        match self {
            Units::Radians => radians,
            Units::PiOver2 => weylsteer_core::units::to_half_pi(radians),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

fn default_samples() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub model: ModelSpec,
    #[serde(default = "Envelope::unit")]
    pub gamma: Envelope,
    pub grid: Grid,
    #[serde(default)]
    pub units: Units,
}

impl RunSpec {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let spec: RunSpec = serde_json::from_str(text)
            .map_err(|e| CliError::Parse { line: Some(e.line()), message: e.to_string() })?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> CliResult<()> {
        self.gamma.validate()?;
        if let ModelSpec::Device(d) = &self.model {
            d.validate()?;
        }
        if self.grid.n_samples == 0 {
            return Err(CliError::parse("grid.n_samples must be positive"));
        }
        if let Some(t) = self.grid.t_end {
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::parse(format!("grid.t_end must be finite and non-negative, got {t}")));
            }
        }
        Ok(())
    }

    /// End time: the given one, or the CNOT time of a constant-envelope device.
    pub fn t_end(&self) -> CliResult<f64> {
        match (self.grid.t_end, &self.model) {
            (Some(t), _) => Ok(t),
            (None, ModelSpec::Device(d)) if self.gamma.is_constant() => Ok(d.cnot_area() / self.gamma.value(0.0)),
            _ => Err(CliError::parse("grid.t_end is required unless the model is a device with a constant envelope")),
        }
    }
}
