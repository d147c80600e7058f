//! Leaky integrate-and-fire encoding.
//!
//! The membrane potential `u` integrates the input with leak `α`. Whenever
//! `|u| ≥ θ` (and the refractory time has elapsed) a spike is emitted and the
//! potential is reset:
//!
//! | mode            | emitted amplitude      | potential after reset |
//! |-----------------|------------------------|-----------------------|
//! | `ToZero`        | `sgn(u)·θ`             | `0`                   |
//! | `BySubtraction` | `sgn(u)·θ`             | `u − sgn(u)·θ`        |
//! | `ToMod`         | `q(u) = θ·trunc(u/θ)`  | `u − q(u)`            |
//!
//! `ToMod` is the zero-refractory limit of `BySubtraction`: it discharges all
//! whole multiples of `θ` in one event, leaving a residual in `(−θ, θ)`.
//! With it, the encoder is a `θ`-quantizer in the weighted Alexiewicz norm.

use std::fmt;
use std::str::FromStr;

use crate::metrics::{decay, step_weight, trunc_levels};
use crate::signal::{HybridSignal, Spike, SpikeTrain};
use crate::{Error, Result, TIME_QUANTUM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ResetMode {
    #[serde(rename = "zero")]
    ToZero,
    #[serde(rename = "subtract")]
    BySubtraction,
    #[serde(rename = "mod")]
    ToMod,
}

impl ResetMode {
    pub const ALL: [ResetMode; 3] = [ResetMode::ToMod, ResetMode::BySubtraction, ResetMode::ToZero];

    pub fn as_str(self) -> &'static str {
        match self {
            ResetMode::ToZero => "zero",
            ResetMode::BySubtraction => "subtract",
            ResetMode::ToMod => "mod",
        }
    }
}

impl fmt::Display for ResetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(ResetMode::ToZero),
            "subtract" => Ok(ResetMode::BySubtraction),
            "mod" => Ok(ResetMode::ToMod),
            other => Err(Error::InvalidParameter(format!(
                "unknown reset mode '{other}' (expected zero, subtract or mod)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifConfig {
    theta: f64,
    alpha: f64,
    t_r: f64,
    reset: ResetMode,
}

impl LifConfig {
    pub fn new(theta: f64, alpha: f64, t_r: f64, reset: ResetMode) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidParameter(format!("threshold {theta} must be > 0")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!("leak rate {alpha} must be >= 0")));
        }
        if !(t_r.is_finite() && t_r >= 0.0) {
            return Err(Error::InvalidParameter(format!("refractory time {t_r} must be >= 0")));
        }
        Ok(LifConfig { theta, alpha, t_r, reset })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn refractory(&self) -> f64 {
        self.t_r
    }

    pub fn reset(&self) -> ResetMode {
        self.reset
    }

    pub fn with_reset(mut self, reset: ResetMode) -> Self {
        self.reset = reset;
        self
    }
}

/// Single-neuron state shared by the grid and the event-driven encoders.
#[derive(Debug, Clone)]
pub struct LifNeuron {
    cfg: LifConfig,
    potential: f64,
    last_spike: Option<f64>,
}

impl LifNeuron {
    pub fn new(cfg: LifConfig) -> Self {
        LifNeuron { cfg, potential: 0.0, last_spike: None }
    }

    pub fn potential(&self) -> f64 {
        self.potential
    }

    /// Decays the potential by `decay`, adds `input`, then fires at time `t`
    /// if the threshold is reached outside the refractory window.
    pub fn advance(&mut self, decay: f64, input: f64, t: f64) -> Option<Spike> {
        self.potential = decay * self.potential + input;
        self.try_fire(t)
    }

    fn try_fire(&mut self, t: f64) -> Option<Spike> {
        let u = self.potential;
        let theta = self.cfg.theta;
        if u.abs() < theta {
            return None;
        }
        if let Some(last) = self.last_spike {
            if t - last < self.cfg.t_r - TIME_QUANTUM {
                return None;
            }
        }
        let amplitude = match self.cfg.reset {
            ResetMode::ToZero => {
                self.potential = 0.0;
                theta.copysign(u)
            }
            ResetMode::BySubtraction => {
                let a = theta.copysign(u);
                self.potential = u - a;
                a
            }
            ResetMode::ToMod => {
                let a = theta * trunc_levels(u, theta);
                self.potential = u - a;
                a
            }
        };
        // |u| ≥ θ guarantees a non-zero quantum; guard against θ·n underflow anyway.
        if amplitude == 0.0 {
            return None;
        }
        self.last_spike = Some(t);
        Some(Spike { t, amplitude })
    }
}

fn check_encodable(f: &HybridSignal) -> Result<()> {
    if let Some(i) = f.base().samples().iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("sample {i} is not finite")));
    }
    if let Some(t) = f.diracs().first_time() {
        if t <= f.base().t0() {
            return Err(Error::InvalidInput(format!(
                "first Dirac at t={t} must lie strictly after the signal start {}",
                f.base().t0()
            )));
        }
    }
    Ok(())
}

/// Per-step input of the grid simulation: leak-weighted sample integral plus
/// the Dirac weight placed on that step. Index 0 carries nothing.
fn grid_inputs(f: &HybridSignal, alpha: f64) -> Vec<f64> {
    let base = f.base();
    let w = step_weight(alpha, base.dt());
    let mut inputs: Vec<f64> = base.samples().iter().map(|x| w * x).collect();
    if let Some(first) = inputs.first_mut() {
        *first = 0.0;
    }
    for (idx, weight) in f.dirac_weights_per_index() {
        // Diracs strictly after t0 that round onto index 0 belong to the first step.
        let last = inputs.len() - 1;
        inputs[idx.max(1).min(last)] += weight;
    }
    inputs
}

/// Encodes a Dirac-superimposed sampled signal on its own grid.
pub fn lif_encode(f: &HybridSignal, cfg: &LifConfig) -> Result<SpikeTrain> {
    lif_encode_with_residual(f, cfg).map(|(train, _)| train)
}

/// [`lif_encode`] that also returns the final membrane potential.
pub fn lif_encode_with_residual(f: &HybridSignal, cfg: &LifConfig) -> Result<(SpikeTrain, f64)> {
    check_encodable(f)?;
    let base = f.base();
    if base.is_empty() {
        return Ok((SpikeTrain::empty(), 0.0));
    }
    let d = decay(cfg.alpha, base.dt());
    let mut neuron = LifNeuron::new(*cfg);
    let mut out = Vec::new();
    for (i, input) in grid_inputs(f, cfg.alpha).into_iter().enumerate() {
        if let Some(s) = neuron.advance(d, input, base.time(i)) {
            out.push(s);
        }
    }
    Ok((SpikeTrain::from_sorted_unchecked(out), neuron.potential()))
}

/// Event-driven encoding of a spike train: the residual is carried from
/// event to event with `⊕` and thresholded at each incoming spike.
pub fn lif_encode_train(eta: &SpikeTrain, cfg: &LifConfig) -> Result<SpikeTrain> {
    lif_encode_train_with_residual(eta, cfg).map(|(train, _)| train)
}

/// [`lif_encode_train`] that also returns the residual after the last event.
pub fn lif_encode_train_with_residual(eta: &SpikeTrain, cfg: &LifConfig) -> Result<(SpikeTrain, f64)> {
    let mut neuron = LifNeuron::new(*cfg);
    let mut out = Vec::new();
    let mut prev_t: Option<f64> = None;
    for s in eta {
        let d = prev_t.map_or(1.0, |pt| decay(cfg.alpha, s.t - pt));
        prev_t = Some(s.t);
        if let Some(spike) = neuron.advance(d, s.amplitude, s.t) {
            out.push(spike);
        }
    }
    Ok((SpikeTrain::from_sorted_unchecked(out), neuron.potential()))
}

/// Collapses `f` onto the spike times of its own encoding.
///
/// Each returned weight is the leak-weighted integral of `f` over
/// `(t_k, t_{k+1}]` between consecutive output spikes; the tail after the last
/// spike is placed at the final grid time. Encoding the result with `ToMod`
/// reproduces the encoding of `f`.
pub fn collapse_to_spikes(f: &HybridSignal, cfg: &LifConfig) -> Result<SpikeTrain> {
    check_encodable(f)?;
    let base = f.base();
    if base.is_empty() {
        return Ok(SpikeTrain::empty());
    }
    let d = decay(cfg.alpha, base.dt());
    let mut neuron = LifNeuron::new(*cfg);
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut pending = false;
    for (i, input) in grid_inputs(f, cfg.alpha).into_iter().enumerate() {
        acc = d * acc + input;
        pending |= input != 0.0;
        let t = base.time(i);
        if neuron.advance(d, input, t).is_some() {
            if acc != 0.0 {
                out.push(Spike { t, amplitude: acc });
            }
            acc = 0.0;
            pending = false;
        }
    }
    if pending && acc != 0.0 {
        out.push(Spike { t: base.end_time(), amplitude: acc });
    }
    Ok(SpikeTrain::from_sorted_unchecked(out))
}
