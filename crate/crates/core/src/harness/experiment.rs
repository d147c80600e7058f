//! Monte-Carlo study of the LIF quantization error in the weighted
//! Alexiewicz norm.
//!
//! A grid cell is one `(alpha, n_spikes, amp_scale)` combination. Each cell
//! draws its trains from its own RNG seeded with `seed + cell index`, and
//! every reset mode in the grid encodes the same trains, so reset variants
//! can be compared run by run. Cells run in parallel; the output does not
//! depend on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use super::stats::{box_stats, BoxStats};
use crate::data::{random_train, rng_from_seed};
use crate::lif::{lif_encode_train, LifConfig, ResetMode};
use crate::metrics::alexiewicz_distance;
use crate::signal::SpikeTrain;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub resets: Vec<ResetMode>,
    pub alphas: Vec<f64>,
    pub n_spikes: Vec<usize>,
    /// half-width of the amplitude range in units of `theta`
    pub amp_scales: Vec<f64>,
    pub theta: f64,
    /// mean inter-spike gap of the random trains (s)
    pub mean_gap: f64,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        ExperimentGrid {
            resets: ResetMode::ALL.to_vec(),
            alphas: vec![1.0, 0.1, 0.0],
            n_spikes: vec![10, 100, 1000],
            amp_scales: vec![1.0, 1.5],
            theta: 1.0,
            mean_gap: 1.0,
        }
    }
}

impl ExperimentGrid {
    fn validate(&self) -> Result<()> {
        if self.resets.is_empty() || self.alphas.is_empty() || self.n_spikes.is_empty() || self.amp_scales.is_empty() {
            return Err(Error::InvalidParameter("every grid axis needs at least one value".into()));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidParameter(format!("leak {a} must be >= 0")));
        }
        if let Some(s) = self.amp_scales.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::InvalidParameter(format!("amplitude scale {s} must be > 0")));
        }
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(Error::InvalidParameter(format!("threshold {} must be > 0", self.theta)));
        }
        if !(self.mean_gap.is_finite() && self.mean_gap > 0.0) {
            return Err(Error::InvalidParameter(format!("mean gap {} must be > 0", self.mean_gap)));
        }
        Ok(())
    }

    /// `(alpha, n_spikes, amp_scale)` cells in output order.
    pub fn cells(&self) -> Vec<(f64, usize, f64)> {
        let mut out = Vec::new();
        for &a in &self.alphas {
            for &n in &self.n_spikes {
                for &s in &self.amp_scales {
                    out.push((a, n, s));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorSample {
    pub reset: ResetMode,
    pub alpha: f64,
    pub n_spikes: usize,
    pub amp_scale: f64,
    pub run: usize,
    /// seed of the cell RNG that produced the input train
    pub seed: u64,
    pub error: f64,
}

/// Input trains of one cell, in run order.
pub fn cell_trains(grid: &ExperimentGrid, cell_index: usize, runs: usize, seed: u64) -> Result<Vec<SpikeTrain>> {
    let (_, n, scale) = grid.cells()[cell_index];
    let half = scale * grid.theta;
    let mut rng = rng_from_seed(seed.wrapping_add(cell_index as u64));
    (0..runs).map(|_| random_train(&mut rng, n, (-half, half), grid.mean_gap)).collect()
}

pub fn quantization_experiment(grid: &ExperimentGrid, runs: usize, seed: u64) -> Result<Vec<ErrorSample>> {
    grid.validate()?;
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    let cells = grid.cells();
    let per_cell: Vec<Result<Vec<ErrorSample>>> = cells
        .par_iter()
        .enumerate()
        .map(|(ci, &(alpha, n, scale))| {
            let trains = cell_trains(grid, ci, runs, seed)?;
            let cell_seed = seed.wrapping_add(ci as u64);
            let mut out = Vec::with_capacity(grid.resets.len() * runs);
            for &reset in &grid.resets {
                let cfg = LifConfig::new(grid.theta, alpha, 0.0, reset)?;
                for (run, eta) in trains.iter().enumerate() {
                    let q = lif_encode_train(eta, &cfg)?;
                    out.push(ErrorSample {
                        reset,
                        alpha,
                        n_spikes: n,
                        amp_scale: scale,
                        run,
                        seed: cell_seed,
                        error: alexiewicz_distance(eta, &q, alpha),
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut samples = Vec::with_capacity(cells.len() * grid.resets.len() * runs);
    for cell in per_cell {
        samples.extend(cell?);
    }
    Ok(samples)
}

/// Writes one CSV row per sample.
pub fn write_error_samples_csv<W: std::io::Write>(w: W, samples: &[ErrorSample]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for s in samples {
        wtr.serialize(s)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Box statistics of the error for one `(reset, alpha, n, scale)` group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSummary {
    pub reset: ResetMode,
    pub alpha: f64,
    pub n_spikes: usize,
    pub amp_scale: f64,
    pub runs: usize,
    pub stats: BoxStats,
    /// runs whose error reached the threshold
    pub at_or_above_theta: usize,
}

/// Groups samples by cell and reset mode, keeping first-appearance order.
pub fn summarize(samples: &[ErrorSample], theta: f64) -> Result<Vec<CellSummary>> {
    let mut keys: Vec<(ResetMode, u64, usize, u64)> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for s in samples {
        let key = (s.reset, s.alpha.to_bits(), s.n_spikes, s.amp_scale.to_bits());
        match keys.iter().position(|k| *k == key) {
            Some(i) => groups[i].push(s.error),
            None => {
                keys.push(key);
                groups.push(vec![s.error]);
            }
        }
    }
    keys.into_iter()
        .zip(groups)
        .map(|((reset, a, n, s), errs)| {
            Ok(CellSummary {
                reset,
                alpha: f64::from_bits(a),
                n_spikes: n,
                amp_scale: f64::from_bits(s),
                runs: errs.len(),
                stats: box_stats(&errs)?,
                at_or_above_theta: errs.iter().filter(|&&e| e >= theta).count(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> ExperimentGrid {
        ExperimentGrid { alphas: vec![0.5, 0.0], n_spikes: vec![5, 40], ..Default::default() }
    }

    #[test]
    fn deterministic_and_complete() {
        let g = small_grid();
        let a = quantization_experiment(&g, 7, 42).unwrap();
        let b = quantization_experiment(&g, 7, 42).unwrap();
        assert_eq!(a.len(), 3 * 2 * 2 * 2 * 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.error >= 0.0));
        assert_ne!(a, quantization_experiment(&g, 7, 43).unwrap());
    }

    #[test]
    fn serial_recomputation_matches() {
        let g = small_grid();
        let samples = quantization_experiment(&g, 3, 9).unwrap();
        for s in &samples {
            let ci = g
                .cells()
                .iter()
                .position(|&(a, n, sc)| a == s.alpha && n == s.n_spikes && sc == s.amp_scale)
                .unwrap();
            let eta = &cell_trains(&g, ci, 3, 9).unwrap()[s.run];
            let cfg = LifConfig::new(1.0, s.alpha, 0.0, s.reset).unwrap();
            let q = lif_encode_train(eta, &cfg).unwrap();
            assert_eq!(alexiewicz_distance(eta, &q, s.alpha), s.error);
        }
    }

    #[test]
    fn mod_reset_error_is_bounded() {
        let samples = quantization_experiment(&small_grid(), 20, 1).unwrap();
        assert!(samples.iter().filter(|s| s.reset == ResetMode::ToMod).all(|s| s.error < 1.0));
    }

    #[test]
    fn summaries() {
        let g = small_grid();
        let samples = quantization_experiment(&g, 5, 3).unwrap();
        let sum = summarize(&samples, g.theta).unwrap();
        assert_eq!(sum.len(), 3 * 2 * 2 * 2);
        assert!(sum.iter().all(|c| c.runs == 5 && c.stats.min <= c.stats.max));
    }

    #[test]
    fn samples_csv() {
        let samples = quantization_experiment(&small_grid(), 1, 0).unwrap();
        let mut buf = Vec::new();
        write_error_samples_csv(&mut buf, &samples[..2]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("reset,alpha,n_spikes,amp_scale,run,seed,error"));
        assert!(lines.next().unwrap().starts_with("mod,0.5,5,1.0,0,"));
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(quantization_experiment(&small_grid(), 0, 1).is_err());
        let g = ExperimentGrid { alphas: vec![], ..Default::default() };
        assert!(quantization_experiment(&g, 1, 1).is_err());
    }
}
