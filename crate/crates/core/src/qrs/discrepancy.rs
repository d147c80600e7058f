//! QRS detection on a send-on-delta spike train via the local discrepancy.

use super::window::{moving_average, moving_max};
use super::Detection;
use crate::metrics::weyl_discrepancy;
use crate::signal::SpikeTrain;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyDetectorConfig {
    /// Look-back span of the local discrepancy (s).
    pub window_disc: f64,
    /// Pre-filter moving-average span (s).
    pub window_prefilter: f64,
    /// Span of the moving maximum and moving average used for thresholding (s).
    pub window_stats: f64,
    /// Fraction of the moving maximum that opens a QRS episode.
    pub level_fraction: f64,
    /// Step of the grid on which the discrepancy is evaluated (s).
    pub step: f64,
}

impl Default for DiscrepancyDetectorConfig {
    fn default() -> Self {
        DiscrepancyDetectorConfig {
            window_disc: 0.018,
            window_prefilter: 0.1,
            window_stats: 2.0,
            level_fraction: 0.6,
            step: 0.001,
        }
    }
}

impl DiscrepancyDetectorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("window_disc", self.window_disc),
            ("window_prefilter", self.window_prefilter),
            ("window_stats", self.window_stats),
            ("step", self.step),
        ] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {w}")));
            }
        }
        if !(self.level_fraction > 0.0 && self.level_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "level_fraction must lie in (0, 1), got {}",
                self.level_fraction
            )));
        }
        Ok(())
    }
}

/// Weyl discrepancy of the spikes in `[t_k − window, t_k]`, one value per spike.
pub fn local_discrepancy_signal(train: &SpikeTrain, window: f64) -> Vec<(f64, f64)> {
    let spikes = train.spikes();
    let amps: Vec<f64> = train.amplitudes().collect();
    let mut out = Vec::with_capacity(spikes.len());
    let mut start = 0;
    for (k, s) in spikes.iter().enumerate() {
        while spikes[start].t < s.t - window {
            start += 1;
        }
        out.push((s.t, weyl_discrepancy(&amps[start..=k])));
    }
    out
}

/// The local discrepancy evaluated every `step` seconds over `[from, until]`:
/// at grid time `t` it covers the spikes in `[t − window, t]`, and is 0 when
/// that window is empty. At spike times it agrees with
/// [`local_discrepancy_signal`].
pub fn local_discrepancy_grid(train: &SpikeTrain, window: f64, step: f64, from: f64, until: f64) -> Vec<(f64, f64)> {
    let spikes = train.spikes();
    if spikes.is_empty() || until < from {
        return Vec::new();
    }
    let t0 = from;
    let amps: Vec<f64> = train.amplitudes().collect();
    let n = ((until - t0) / step + 1e-9).floor().max(0.0) as usize + 1;
    let mut out = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut cached: Option<(usize, usize, f64)> = None;
    for j in 0..n {
        let t = t0 + j as f64 * step;
        while hi < spikes.len() && spikes[hi].t <= t {
            hi += 1;
        }
        while lo < hi && spikes[lo].t < t - window {
            lo += 1;
        }
        let v = match cached {
            Some((l, h, v)) if l == lo && h == hi => v,
            _ => {
                let v = weyl_discrepancy(&amps[lo..hi]);
                cached = Some((lo, hi, v));
                v
            }
        };
        out.push((t, v));
    }
    out
}

/// QRS detector on the local discrepancy signal.
///
/// The discrepancy is evaluated every `step` seconds
/// ([`local_discrepancy_grid`]) and smoothed by a trailing moving average.
/// Both windowed stages are time-stamped at their window centres, so the
/// smoothed series lags the input by `(window_disc + window_prefilter) / 2`
/// and detections are reported with that latency. An episode opens when the smoothed value exceeds
/// `level_fraction` times its trailing moving maximum and closes when it
/// falls below its trailing moving average; the detection is placed midway
/// between the two times.
pub fn detect_qrs_discrepancy(train: &SpikeTrain, cfg: &DiscrepancyDetectorConfig) -> Result<Vec<Detection>> {
    cfg.validate()?;
    let (Some(t_first), Some(t_last)) = (train.first_time(), train.last_time()) else { return Ok(Vec::new()) };
    // start one pre-filter span early so the first average covers a full window
    let disc = local_discrepancy_grid(
        train,
        cfg.window_disc,
        cfg.step,
        t_first - cfg.window_prefilter,
        t_last + cfg.window_disc + cfg.window_prefilter,
    );
    let lag = 0.5 * (cfg.window_disc + cfg.window_prefilter);
    let smooth: Vec<(f64, f64)> = moving_average(&disc, cfg.window_prefilter)
        .into_iter()
        .map(|(t, v)| (t - lag, v))
        .collect();
    let peak = moving_max(&smooth, cfg.window_stats);
    let mean = moving_average(&smooth, cfg.window_stats);

    let mut out: Vec<Detection> = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for (k, &(t, v)) in smooth.iter().enumerate() {
        match open {
            None => {
                // an episode starting at or below the moving average would close at once
                if v > cfg.level_fraction * peak[k].1 && v > mean[k].1 {
                    open = Some((t, v));
                }
            }
            Some((t_on, top)) => {
                if v < mean[k].1 {
                    push_detection(&mut out, 0.5 * (t_on + t), top);
                    open = None;
                } else {
                    open = Some((t_on, top.max(v)));
                }
            }
        }
    }
    Ok(out)
}

fn push_detection(out: &mut Vec<Detection>, t: f64, score: f64) {
    if out.last().is_none_or(|d| d.t < t) {
        out.push(Detection { t, score });
    }
}
