//! Spike trains and sampled signals.

use crate::{Error, Result};

/// A weighted Dirac pulse `amplitude · δ(t − t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spike {
    pub t: f64,
    pub amplitude: f64,
}

impl Spike {
    pub fn new(t: f64, amplitude: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidInput(format!("spike time {t} must be finite and >= 0")));
        }
        if !amplitude.is_finite() || amplitude == 0.0 {
            return Err(Error::InvalidInput(format!(
                "spike amplitude {amplitude} must be finite and non-zero"
            )));
        }
        Ok(Spike { t, amplitude })
    }
}

/// Time-sorted sequence of spikes with strictly increasing times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpikeTrain {
    spikes: Vec<Spike>,
}

impl SpikeTrain {
    pub fn empty() -> Self {
        SpikeTrain { spikes: Vec::new() }
    }

    /// Validates an already ordered list of spikes.
    pub fn new(spikes: Vec<Spike>) -> Result<Self> {
        for s in &spikes {
            Spike::new(s.t, s.amplitude)?;
        }
        if let Some(w) = spikes.windows(2).find(|w| w[1].t <= w[0].t) {
            return Err(Error::InvalidInput(format!(
                "spike times must be strictly increasing ({} followed by {})",
                w[0].t, w[1].t
            )));
        }
        Ok(SpikeTrain { spikes })
    }

    /// Builds a train from unordered `(t, amplitude)` events.
    ///
    /// Events at identical times are superimposed by summing their amplitudes;
    /// events whose (summed) amplitude is zero are dropped.
    pub fn from_events<I>(events: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut ev: Vec<(f64, f64)> = events.into_iter().collect();
        for &(t, a) in &ev {
            if !t.is_finite() || t < 0.0 || !a.is_finite() {
                return Err(Error::InvalidInput(format!("invalid event ({t}, {a})")));
            }
        }
        ev.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut spikes: Vec<Spike> = Vec::with_capacity(ev.len());
        let mut pending: Option<(f64, f64)> = None;
        for (t, a) in ev {
            match pending {
                Some((pt, pa)) if pt == t => pending = Some((pt, pa + a)),
                Some((pt, pa)) => {
                    if pa != 0.0 {
                        spikes.push(Spike { t: pt, amplitude: pa });
                    }
                    pending = Some((t, a));
                }
                None => pending = Some((t, a)),
            }
        }
        if let Some((pt, pa)) = pending {
            if pa != 0.0 {
                spikes.push(Spike { t: pt, amplitude: pa });
            }
        }
        Ok(SpikeTrain { spikes })
    }

    /// Caller guarantees validity; used by the encoders, which emit in order.
    pub(crate) fn from_sorted_unchecked(spikes: Vec<Spike>) -> Self {
        debug_assert!(spikes.windows(2).all(|w| w[0].t < w[1].t));
        debug_assert!(spikes.iter().all(|s| s.amplitude != 0.0));
        SpikeTrain { spikes }
    }

    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Spike> {
        self.spikes.iter()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.spikes.iter().map(|s| s.t)
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.spikes.iter().map(|s| s.amplitude)
    }

    pub fn first_time(&self) -> Option<f64> {
        self.spikes.first().map(|s| s.t)
    }

    pub fn last_time(&self) -> Option<f64> {
        self.spikes.last().map(|s| s.t)
    }

    /// Superposition `self + other` (coincident spikes are summed).
    pub fn superpose(&self, other: &SpikeTrain) -> SpikeTrain {
        merge_scaled(self, other, 1.0)
    }

    /// Difference train `self − other` (coincident spikes are subtracted).
    pub fn difference(&self, other: &SpikeTrain) -> SpikeTrain {
        merge_scaled(self, other, -1.0)
    }

    pub fn into_vec(self) -> Vec<Spike> {
        self.spikes
    }
}

impl<'a> IntoIterator for &'a SpikeTrain {
    type Item = &'a Spike;
    type IntoIter = std::slice::Iter<'a, Spike>;

    fn into_iter(self) -> Self::IntoIter {
        self.spikes.iter()
    }
}

fn merge_scaled(a: &SpikeTrain, b: &SpikeTrain, sign: f64) -> SpikeTrain {
    let (xs, ys) = (&a.spikes, &b.spikes);
    let mut out = Vec::with_capacity(xs.len() + ys.len());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() || j < ys.len() {
        let (t, amp) = if j == ys.len() || (i < xs.len() && xs[i].t < ys[j].t) {
            i += 1;
            (xs[i - 1].t, xs[i - 1].amplitude)
        } else if i == xs.len() || ys[j].t < xs[i].t {
            j += 1;
            (ys[j - 1].t, sign * ys[j - 1].amplitude)
        } else {
            i += 1;
            j += 1;
            (xs[i - 1].t, xs[i - 1].amplitude + sign * ys[j - 1].amplitude)
        };
        if amp != 0.0 {
            out.push(Spike { t, amplitude: amp });
        }
    }
    SpikeTrain { spikes: out }
}

/// A signal sampled on the grid `t0 + i·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSignal {
    t0: f64,
    dt: f64,
    samples: Vec<f64>,
}

impl UniformSignal {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::InvalidParameter(format!("start time {t0} is not finite")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("sample period {dt} must be > 0")));
        }
        Ok(UniformSignal { t0, dt, samples })
    }

    /// Signal sampled at `fs` Hz starting at t = 0.
    pub fn from_rate(fs: f64, samples: Vec<f64>) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidParameter(format!("sample rate {fs} must be > 0")));
        }
        Self::new(0.0, 1.0 / fs, samples)
    }

    pub fn zeros(t0: f64, dt: f64, len: usize) -> Result<Self> {
        Self::new(t0, dt, vec![0.0; len])
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn sample_rate(&self) -> f64 {
        1.0 / self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Time of the last sample (equals `t0` for a single sample).
    pub fn end_time(&self) -> f64 {
        self.time(self.samples.len().saturating_sub(1))
    }

    /// Duration covered by the samples, `len · dt`.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    /// Nearest grid index to `t`, or `None` outside the sampled span
    /// (a half-period margin is tolerated at either end).
    pub fn nearest_index(&self, t: f64) -> Option<usize> {
        if self.samples.is_empty() {
            return None;
        }
        let x = ((t - self.t0) / self.dt).round();
        if x < 0.0 || x > (self.samples.len() - 1) as f64 {
            return None;
        }
        Some(x as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().enumerate().map(|(i, &v)| (self.time(i), v))
    }

    /// Same grid, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> UniformSignal {
        UniformSignal { t0: self.t0, dt: self.dt, samples }
    }

    /// Restriction to the first `len` samples.
    pub fn prefix(&self, len: usize) -> UniformSignal {
        self.with_samples(self.samples[..len.min(self.samples.len())].to_vec())
    }

    pub fn scaled(&self, factor: f64) -> UniformSignal {
        self.with_samples(self.samples.iter().map(|v| v * factor).collect())
    }
}

/// A sampled signal with superimposed weighted Dirac pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridSignal {
    base: UniformSignal,
    diracs: SpikeTrain,
}

impl HybridSignal {
    pub fn new(base: UniformSignal, diracs: SpikeTrain) -> Result<Self> {
        if base.is_empty() && !diracs.is_empty() {
            return Err(Error::InvalidInput("Dirac pulses on an empty grid".into()));
        }
        let (lo, hi) = (base.t0(), base.end_time());
        let slack = crate::TIME_QUANTUM;
        if let Some(s) = diracs.iter().find(|s| s.t < lo - slack || s.t > hi + slack) {
            return Err(Error::InvalidInput(format!(
                "Dirac at t={} outside the sampled span [{lo}, {hi}]",
                s.t
            )));
        }
        Ok(HybridSignal { base, diracs })
    }

    pub fn from_base(base: UniformSignal) -> Self {
        HybridSignal { base, diracs: SpikeTrain::empty() }
    }

    /// Zero base signal of `len` samples carrying only the given pulses.
    pub fn dirac_only(t0: f64, dt: f64, len: usize, diracs: SpikeTrain) -> Result<Self> {
        Self::new(UniformSignal::zeros(t0, dt, len)?, diracs)
    }

    pub fn base(&self) -> &UniformSignal {
        &self.base
    }

    pub fn diracs(&self) -> &SpikeTrain {
        &self.diracs
    }

    /// Dirac weight falling on each grid index (nearest-index placement).
    pub(crate) fn dirac_weights_per_index(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(self.diracs.len());
        for s in &self.diracs {
            let idx = self
                .base
                .nearest_index(s.t)
                .unwrap_or(if s.t < self.base.t0() { 0 } else { self.base.len() - 1 });
            match out.last_mut() {
                Some((i, w)) if *i == idx => *w += s.amplitude,
                _ => out.push((idx, s.amplitude)),
            }
        }
        out
    }
}
