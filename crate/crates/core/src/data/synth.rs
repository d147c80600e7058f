//! Seeded generators: random spike trains, sinusoid mixtures carrying Dirac
//! pulses, and a clean synthetic ECG with known R-peak times.

use std::f64::consts::TAU;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::signal::{HybridSignal, Spike, SpikeTrain, UniformSignal};
use crate::{Error, Result};

/// The RNG used by every generator in this crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` spikes with amplitudes uniform in `[lo, hi]` (exact zeros redrawn)
/// and exponential inter-spike gaps of mean `mean_gap`; the first spike
/// sits one gap after `t = 0`.
pub fn gen_random_train(n: usize, amp_range: (f64, f64), mean_gap: f64, seed: u64) -> Result<SpikeTrain> {
    random_train(&mut rng_from_seed(seed), n, amp_range, mean_gap)
}

/// [`gen_random_train`] drawing from a caller-owned RNG.
pub fn random_train<R: Rng + ?Sized>(rng: &mut R, n: usize, amp_range: (f64, f64), mean_gap: f64) -> Result<SpikeTrain> {
    let (lo, hi) = amp_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!("amplitude range [{lo}, {hi}] is empty")));
    }
    if !(mean_gap.is_finite() && mean_gap > 0.0) {
        return Err(Error::InvalidParameter(format!("mean gap {mean_gap} must be > 0")));
    }
    let gap = Exp::new(1.0 / mean_gap).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut spikes = Vec::with_capacity(n);
    let mut t = 0.0;
    while spikes.len() < n {
        let g: f64 = gap.sample(rng);
        let a = rng.random_range(lo..=hi);
        if g <= 0.0 || a == 0.0 {
            continue;
        }
        let next = t + g;
        if next <= t {
            continue;
        }
        t = next;
        spikes.push(Spike { t, amplitude: a });
    }
    SpikeTrain::new(spikes)
}

/// Ranges for [`gen_wave_with_diracs_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveConfig {
    /// inclusive range for the number of sinusoids
    pub sines: (usize, usize),
    pub amplitude: (f64, f64),
    /// frequency range in Hz
    pub frequency: (f64, f64),
    /// inclusive range for the number of Dirac pulses
    pub diracs: (usize, usize),
    /// range of |weight|; the sign is drawn separately
    pub dirac_weight: (f64, f64),
}

impl Default for WaveConfig {
    fn default() -> Self {
        WaveConfig { sines: (2, 4), amplitude: (0.2, 1.0), frequency: (0.1, 2.0), diracs: (3, 10), dirac_weight: (0.5, 3.0) }
    }
}

pub fn gen_wave_with_diracs(seed: u64, duration: f64, dt: f64) -> Result<HybridSignal> {
    gen_wave_with_diracs_with(seed, duration, dt, &WaveConfig::default())
}

/// Sum of random sinusoids on `[0, duration]` sampled at `dt`, plus random
/// Dirac pulses placed on distinct grid points strictly after `dt`.
pub fn gen_wave_with_diracs_with(seed: u64, duration: f64, dt: f64, cfg: &WaveConfig) -> Result<HybridSignal> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter(format!("duration {duration} must be > 0")));
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= duration) {
        return Err(Error::InvalidParameter(format!("step {dt} must lie in (0, duration]")));
    }
    if cfg.sines.0 > cfg.sines.1 || cfg.diracs.0 > cfg.diracs.1 {
        return Err(Error::InvalidParameter("count ranges must satisfy min <= max".into()));
    }
    let mut rng = rng_from_seed(seed);
    let n = (duration / dt).round() as usize + 1;

    let mut x = vec![0.0; n];
    for _ in 0..rng.random_range(cfg.sines.0..=cfg.sines.1) {
        let a = rng.random_range(cfg.amplitude.0..=cfg.amplitude.1);
        let f = rng.random_range(cfg.frequency.0..=cfg.frequency.1);
        let phase = rng.random_range(0.0..TAU);
        for (i, v) in x.iter_mut().enumerate() {
            *v += a * (TAU * f * i as f64 * dt + phase).sin();
        }
    }
    let base = UniformSignal::new(0.0, dt, x)?;

    let wanted = rng.random_range(cfg.diracs.0..=cfg.diracs.1);
    let slots = n.saturating_sub(2);
    let mut idx = index::sample(&mut rng, slots, wanted.min(slots)).into_vec();
    idx.sort_unstable();
    let mut spikes = Vec::with_capacity(idx.len());
    for i in idx {
        let w = rng.random_range(cfg.dirac_weight.0..=cfg.dirac_weight.1);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        spikes.push(Spike { t: (i + 2) as f64 * dt, amplitude: sign * w });
    }
    HybridSignal::new(base, SpikeTrain::new(spikes)?)
}

/// One Gaussian component of the beat template.
#[derive(Debug, Clone, Copy)]
struct Wave {
    offset: f64,
    amplitude: f64,
    width: f64,
}

const TEMPLATE: [Wave; 5] = [
    Wave { offset: -0.20, amplitude: 0.12, width: 0.025 }, // P
    Wave { offset: -0.03, amplitude: -0.12, width: 0.008 }, // Q
    Wave { offset: 0.0, amplitude: 1.0, width: 0.010 },    // R
    Wave { offset: 0.03, amplitude: -0.20, width: 0.008 },  // S
    Wave { offset: 0.28, amplitude: 0.30, width: 0.040 },   // T
];

/// Time of the first R peak.
const FIRST_BEAT: f64 = 0.1;
/// Room left after the last R peak for its T wave.
const TAIL: f64 = 0.4;

/// Clean periodic ECG in mV with R peaks at `0.1 + k·60/bpm`, keeping only
/// beats whose T wave fits in the record. Returns the signal and the R times.
pub fn gen_synthetic_ecg(heart_rate_bpm: f64, duration: f64, fs: f64) -> Result<(UniformSignal, Vec<f64>)> {
    if !(30.0..=220.0).contains(&heart_rate_bpm) {
        return Err(Error::InvalidParameter(format!("heart rate {heart_rate_bpm} bpm outside [30, 220]")));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter(format!("duration {duration} must be > 0")));
    }
    if !(fs.is_finite() && fs > 0.0) {
        return Err(Error::InvalidParameter(format!("sample rate {fs} must be > 0")));
    }
    let rr = 60.0 / heart_rate_bpm;
    let beats: Vec<f64> = (0..)
        .map(|k| FIRST_BEAT + k as f64 * rr)
        .take_while(|&t| t + TAIL <= duration)
        .collect();
    let n = (duration * fs).round() as usize;
    let mut x = vec![0.0; n];
    for &r in &beats {
        for w in &TEMPLATE {
            let c = r + w.offset;
            let lo = (((c - 5.0 * w.width) * fs).floor().max(0.0)) as usize;
            let hi = (((c + 5.0 * w.width) * fs).ceil().max(0.0) as usize).min(n);
            for (i, v) in x.iter_mut().enumerate().take(hi).skip(lo) {
                let z = (i as f64 / fs - c) / w.width;
                *v += w.amplitude * (-0.5 * z * z).exp();
            }
        }
    }
    Ok((UniformSignal::from_rate(fs, x)?, beats))
}
