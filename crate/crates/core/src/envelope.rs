//! Scalar pulse envelopes `γ(t)` shared by all controls of a tracking drive.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Relative tolerance for envelope areas.
pub const AREA_RTOL: f64 = 1e-12;
const AREA_ATOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Envelope {
    /// `γ(t) = value`.
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `γ(t) = sin²(πt/period)`.
    Sin2 { period: f64 },
    /// Monotone cubic interpolation through sampled points, held constant
    /// outside the sampled range.
    Table(SampledEnvelope),
}

fn one() -> f64 {
    1.0
}

impl Default for Envelope {
    fn default() -> Self {
        Envelope::Constant { value: 1.0 }
    }
}

impl Envelope {
    pub fn unit() -> Self {
        Self::default()
    }

    pub fn sin2(period: f64) -> Self {
        Envelope::Sin2 { period }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Envelope::Constant { value } => *value,
            Envelope::Sin2 { period } => (PI * t / period).sin().powi(2),
            Envelope::Table(s) => s.value(t),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Envelope::Constant { .. })
    }

    /// Points where the envelope is not smooth; quadrature splits there.
    fn breakpoints(&self) -> &[f64] {
        match self {
            Envelope::Table(s) => &s.times,
            _ => &[],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Envelope::Constant { value } if !value.is_finite() => {
                Err(Error::InvalidInput(format!("constant envelope value {value} is not finite")))
            }
            Envelope::Sin2 { period } if !(period.is_finite() && *period > 0.0) => {
                Err(Error::InvalidInput(format!("sin2 period must be positive, got {period}")))
            }
            Envelope::Table(s) => s.validate(),
            _ => Ok(()),
        }
    }
}

/// `∫_0^t γ(τ) dτ` by adaptive quadrature.
pub fn envelope_area(gamma: &Envelope, t: f64) -> f64 {
    integrate_on(gamma, |tau| gamma.value(tau), 0.0, t)
}

/// `∫_a^b f`, split at the envelope's knots so every piece is smooth.
pub fn integrate_on<F: Fn(f64) -> f64>(gamma: &Envelope, f: F, a: f64, b: f64) -> f64 {
    if b <= a {
        return -quad::integrate(&f, b, a, AREA_RTOL, AREA_ATOL);
    }
    let mut total = 0.0;
    let mut left = a;
    for &k in gamma.breakpoints().iter().filter(|&&k| k > a && k < b) {
        total += quad::integrate(&f, left, k, AREA_RTOL, AREA_ATOL);
        left = k;
    }
    total + quad::integrate(&f, left, b, AREA_RTOL, AREA_ATOL)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct SampledEnvelope {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawTable> for SampledEnvelope {
    type Error = Error;
    fn try_from(raw: RawTable) -> Result<Self> {
        SampledEnvelope::new(raw.times, raw.values)
    }
}

impl From<SampledEnvelope> for RawTable {
    fn from(s: SampledEnvelope) -> Self {
        RawTable { times: s.times, values: s.values }
    }
}

impl SampledEnvelope {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let mut s = Self { times, values, slopes: Vec::new() };
        s.validate()?;
        s.slopes = fritsch_carlson_slopes(&s.times, &s.values);
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.times.len() != self.values.len() || self.times.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "table envelope needs ≥ 2 matching samples, got {} times and {} values",
                self.times.len(),
                self.values.len()
            )));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("table envelope times must be strictly increasing".into()));
        }
        if self.times.iter().chain(&self.values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("table envelope contains non-finite entries".into()));
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * s) * (1.0 - s).powi(2),
            s * (1.0 - s).powi(2),
            s * s * (3.0 - 2.0 * s),
            s * s * (s - 1.0),
        );
        h00 * self.values[i] + h10 * h * self.slopes[i] + h01 * self.values[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        m[i] = if delta[i - 1] * delta[i] <= 0.0 { 0.0 } else { 0.5 * (delta[i - 1] + delta[i]) };
    }
    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / delta[i];
        let b = m[i + 1] / delta[i];
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * delta[i];
            m[i + 1] = tau * b * delta[i];
        }
    }
    m
}
