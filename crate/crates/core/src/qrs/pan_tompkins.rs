//! Pan-Tompkins QRS detector.
//!
//! Stages: Butterworth band-pass, five-point derivative, squaring, moving
//! window integration, then adaptive dual thresholds on the integrated and
//! the band-passed signal with signal/noise peak tracking, a refractory
//! period, T-wave rejection and RR-based search-back. Thresholds start from
//! the first `learning` seconds of the record.

use super::filter::BandPass;
use super::Detection;
use crate::signal::UniformSignal;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanTompkinsConfig {
    pub low_hz: f64,
    pub high_hz: f64,
    /// Order of the low-pass prototype (band-pass order is twice this).
    pub prototype_order: usize,
    /// Moving-window integration span (s).
    pub integration_window: f64,
    /// Minimum spacing of accepted QRS complexes (s).
    pub refractory: f64,
    /// Initial threshold learning span (s); also the minimum record length.
    pub learning: f64,
    /// Search back once no QRS was found for this multiple of the RR average.
    pub searchback_factor: f64,
    /// Peaks closer than this to the previous QRS are checked for T waves (s).
    pub t_wave_window: f64,
}

impl Default for PanTompkinsConfig {
    fn default() -> Self {
        PanTompkinsConfig {
            low_hz: 5.0,
            high_hz: 15.0,
            prototype_order: 2,
            integration_window: 0.150,
            refractory: 0.200,
            learning: 2.0,
            searchback_factor: 1.66,
            t_wave_window: 0.360,
        }
    }
}

/// Intermediate signals, exposed for inspection and plotting.
#[derive(Debug, Clone)]
pub struct PanTompkinsStages {
    pub bandpassed: Vec<f64>,
    pub derivative: Vec<f64>,
    pub integrated: Vec<f64>,
}

pub fn pan_tompkins(x: &UniformSignal) -> Result<Vec<Detection>> {
    pan_tompkins_with(x, &PanTompkinsConfig::default())
}

pub fn pan_tompkins_stages(x: &UniformSignal, cfg: &PanTompkinsConfig) -> Result<(PanTompkinsStages, BandPass)> {
    let fs = x.sample_rate();
    let bp = BandPass::butterworth(cfg.prototype_order, cfg.low_hz, cfg.high_hz, fs)?;
    let bandpassed = bp.filter(x.samples());

    // (2x[n] + x[n−1] − x[n−3] − 2x[n−4]) · fs/8, history clamped to the first sample
    let at = |i: isize| bandpassed[i.max(0) as usize];
    let derivative: Vec<f64> = (0..bandpassed.len() as isize)
        .map(|i| (2.0 * at(i) + at(i - 1) - at(i - 3) - 2.0 * at(i - 4)) * fs / 8.0)
        .collect();

    let w = ((cfg.integration_window * fs).round() as usize).max(1);
    let mut integrated = Vec::with_capacity(derivative.len());
    let mut sum = 0.0;
    for i in 0..derivative.len() {
        sum += derivative[i] * derivative[i];
        if i >= w {
            sum -= derivative[i - w] * derivative[i - w];
        }
        integrated.push(sum.max(0.0) / w as f64);
    }
    Ok((PanTompkinsStages { bandpassed, derivative, integrated }, bp))
}

#[derive(Debug, Clone, Copy)]
struct Peak {
    /// index of the integrated-signal peak
    idx: usize,
    integrated: f64,
    /// location and magnitude of the band-passed peak that produced it
    fiducial: usize,
    filtered: f64,
    slope: f64,
}

/// Running signal/noise levels for one channel of the detector.
#[derive(Debug, Clone, Copy)]
struct Levels {
    signal: f64,
    noise: f64,
}

impl Levels {
    fn threshold1(&self) -> f64 {
        self.noise + 0.25 * (self.signal - self.noise)
    }

    fn threshold2(&self) -> f64 {
        0.5 * self.threshold1()
    }

    fn signal_peak(&mut self, v: f64) {
        self.signal = 0.125 * v + 0.875 * self.signal;
    }

    fn searchback_peak(&mut self, v: f64) {
        self.signal = 0.25 * v + 0.75 * self.signal;
    }

    fn noise_peak(&mut self, v: f64) {
        self.noise = 0.125 * v + 0.875 * self.noise;
    }
}

pub fn pan_tompkins_with(x: &UniformSignal, cfg: &PanTompkinsConfig) -> Result<Vec<Detection>> {
    let fs = x.sample_rate();
    let learn = (cfg.learning * fs).round() as usize;
    if x.len() < learn || x.len() < 8 {
        return Err(Error::InvalidInput(format!(
            "Pan-Tompkins needs at least {} s of signal, got {:.3} s",
            cfg.learning,
            x.duration()
        )));
    }
    if x.samples().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("signal contains non-finite samples".into()));
    }
    let (st, bp) = pan_tompkins_stages(x, cfg)?;
    let n = x.len();
    let w = ((cfg.integration_window * fs).round() as usize).max(1);
    let refractory = (cfg.refractory * fs).round() as usize;
    let t_wave = (cfg.t_wave_window * fs).round() as usize;
    let delay = bp.group_delay((cfg.low_hz * cfg.high_hz).sqrt()).round().max(0.0) as usize;

    let abs_bp: Vec<f64> = st.bandpassed.iter().map(|v| v.abs()).collect();
    let head = learn.max(1);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let peak_of = |v: &[f64]| v.iter().fold(0.0_f64, |m, &x| m.max(x));
    let mut li = Levels { signal: 0.25 * peak_of(&st.integrated[..head]), noise: 0.5 * mean(&st.integrated[..head]) };
    let mut lf = Levels { signal: 0.25 * peak_of(&abs_bp[..head]), noise: 0.5 * mean(&abs_bp[..head]) };

    let peak_at = |i: usize| -> Peak {
        let lo = i.saturating_sub(w);
        let (fiducial, filtered) = (lo..=i).map(|j| (j, abs_bp[j])).fold((i, f64::NEG_INFINITY), |best, c| {
            if c.1 > best.1 {
                c
            } else {
                best
            }
        });
        let slope = st.derivative[lo..=i].iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        Peak { idx: i, integrated: st.integrated[i], fiducial, filtered, slope }
    };

    let mut qrs: Vec<Peak> = Vec::new();
    let mut rr: Vec<usize> = Vec::new();
    let mut candidates: Vec<Peak> = Vec::new();

    let accept = |p: Peak, qrs: &mut Vec<Peak>, rr: &mut Vec<usize>| {
        if let Some(last) = qrs.last() {
            rr.push(p.idx - last.idx);
            if rr.len() > 8 {
                rr.remove(0);
            }
        }
        qrs.push(p);
    };

    let searchback = |now: usize,
                      qrs: &mut Vec<Peak>,
                      rr: &mut Vec<usize>,
                      candidates: &mut Vec<Peak>,
                      li: &mut Levels,
                      lf: &mut Levels| {
        loop {
            let Some(last) = qrs.last().copied() else { return };
            if rr.is_empty() {
                return;
            }
            let rr_avg = rr.iter().sum::<usize>() as f64 / rr.len() as f64;
            if ((now - last.idx) as f64) <= cfg.searchback_factor * rr_avg {
                return;
            }
            let best = candidates
                .iter()
                .enumerate()
                .filter(|(_, c)| c.idx > last.idx + refractory && c.idx < now)
                .filter(|(_, c)| c.integrated > li.threshold2() && c.filtered > lf.threshold2())
                .max_by(|a, b| a.1.integrated.total_cmp(&b.1.integrated))
                .map(|(k, c)| (k, *c));
            let Some((k, p)) = best else { return };
            li.searchback_peak(p.integrated);
            lf.searchback_peak(p.filtered);
            candidates.drain(..=k);
            accept(p, qrs, rr);
        }
    };

    for i in 1..n - 1 {
        let y = &st.integrated;
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > 0.0) {
            continue;
        }
        searchback(i, &mut qrs, &mut rr, &mut candidates, &mut li, &mut lf);
        let p = peak_at(i);
        if qrs.last().is_some_and(|q| i - q.idx < refractory) {
            continue;
        }
        let mut is_qrs = p.integrated > li.threshold1() && p.filtered > lf.threshold1();
        if is_qrs {
            if let Some(last) = qrs.last() {
                if i - last.idx < t_wave && p.slope < 0.5 * last.slope {
                    is_qrs = false;
                }
            }
        }
        if is_qrs {
            li.signal_peak(p.integrated);
            lf.signal_peak(p.filtered);
            candidates.clear();
            accept(p, &mut qrs, &mut rr);
        } else {
            li.noise_peak(p.integrated);
            lf.noise_peak(p.filtered);
            candidates.push(p);
        }
    }
    searchback(n - 1, &mut qrs, &mut rr, &mut candidates, &mut li, &mut lf);

    let mut out: Vec<Detection> = Vec::with_capacity(qrs.len());
    for p in qrs {
        let t = x.time(p.fiducial.saturating_sub(delay));
        if out.last().is_none_or(|d| d.t < t) {
            out.push(Detection { t, score: p.integrated });
        }
    }
    Ok(out)
}
