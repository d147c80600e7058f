//! Send-on-delta sampling and signal preprocessing.
//!
//! The encoder tracks a reference level `r`, starting at the first sample.
//! Every time the signal moves a full threshold step above (below) `r`, a
//! `+1` (`−1`) spike is emitted and `r` moves by one step in that direction.
//! After each sample `|x − r| < θ` holds, so a staircase decoder started at
//! the same level reconstructs the input to within `θ`.

mod spline;

pub use spline::upsample_cubic;

use crate::signal::{Spike, SpikeTrain, UniformSignal};
use crate::{Error, Result, TIME_QUANTUM};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SodConfig {
    theta: f64,
}

impl SodConfig {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidParameter(format!("send-on-delta threshold {theta} must be > 0")));
        }
        Ok(SodConfig { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Scales `x` by `1 / max|x|` so the peak magnitude becomes exactly 1.
pub fn normalize(x: &UniformSignal) -> Result<UniformSignal> {
    if x.is_empty() {
        return Err(Error::DegenerateInput("cannot normalize an empty signal".into()));
    }
    let peak = x.samples().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !peak.is_finite() {
        return Err(Error::InvalidInput("signal contains non-finite samples".into()));
    }
    if peak == 0.0 {
        return Err(Error::DegenerateInput("cannot normalize an all-zero signal".into()));
    }
    Ok(x.with_samples(x.samples().iter().map(|v| v / peak).collect()))
}

/// Streaming send-on-delta encoder.
#[derive(Debug, Clone)]
pub struct SodEncoder {
    theta: f64,
    r0: f64,
    level: i64,
}

impl SodEncoder {
    pub fn new(cfg: SodConfig, r0: f64) -> Self {
        SodEncoder { theta: cfg.theta, r0, level: 0 }
    }

    /// Current reference level `r0 + level·θ`.
    pub fn reference(&self) -> f64 {
        reference_level(self.r0, self.level, self.theta)
    }

    /// Net number of threshold steps taken so far.
    pub fn level(&self) -> i64 {
        self.level
    }

    /// Processes one sample; crossings within the same sample are emitted
    /// one time quantum apart.
    pub fn push(&mut self, t: f64, x: f64, out: &mut Vec<Spike>) {
        let mut k = 0.0;
        while x - self.reference() >= self.theta {
            self.level += 1;
            out.push(Spike { t: t + k * TIME_QUANTUM, amplitude: 1.0 });
            k += 1.0;
        }
        while x - self.reference() <= -self.theta {
            self.level -= 1;
            out.push(Spike { t: t + k * TIME_QUANTUM, amplitude: -1.0 });
            k += 1.0;
        }
    }
}

#[inline]
fn reference_level(r0: f64, level: i64, theta: f64) -> f64 {
    r0 + level as f64 * theta
}

/// Send-on-delta encoding with the reference initialised to the first sample.
pub fn sod_encode(x: &UniformSignal, cfg: &SodConfig) -> Result<SpikeTrain> {
    let Some(&x0) = x.samples().first() else {
        return Ok(SpikeTrain::empty());
    };
    if let Some(i) = x.samples().iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("sample {i} is not finite")));
    }
    if x.t0() < 0.0 {
        return Err(Error::InvalidInput("spike times must be >= 0".into()));
    }
    let mut enc = SodEncoder::new(*cfg, x0);
    let mut out = Vec::new();
    for (t, v) in x.iter().skip(1) {
        enc.push(t, v, &mut out);
    }
    SpikeTrain::new(out)
}

/// Grid on which a staircase reconstruction is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub t0: f64,
    pub dt: f64,
    pub len: usize,
}

impl From<&UniformSignal> for Grid {
    fn from(x: &UniformSignal) -> Self {
        Grid { t0: x.t0(), dt: x.dt(), len: x.len() }
    }
}

/// Staircase decoder: `r0 + θ·(sum of amplitudes up to t)`.
///
/// Spikes count from the nearest grid point onwards, so the sub-sample
/// offsets of coincident crossings land on the sample that caused them.
pub fn sod_reconstruct(train: &SpikeTrain, cfg: &SodConfig, r0: f64, grid: Grid) -> Result<UniformSignal> {
    if let Some(s) = train.iter().find(|s| s.amplitude != 1.0 && s.amplitude != -1.0) {
        return Err(Error::InvalidInput(format!(
            "send-on-delta spikes must be ±1, found {} at t={}",
            s.amplitude, s.t
        )));
    }
    let mut out = Vec::with_capacity(grid.len);
    let spikes = train.spikes();
    let mut j = 0;
    let mut level: i64 = 0;
    for i in 0..grid.len {
        let edge = grid.t0 + (i as f64 + 0.5) * grid.dt;
        while j < spikes.len() && spikes[j].t < edge {
            level += spikes[j].amplitude as i64;
            j += 1;
        }
        out.push(reference_level(r0, level, cfg.theta));
    }
    UniformSignal::new(grid.t0, grid.dt, out)
}
