//! End-to-end QRS evaluation of single records and whole corpora.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use super::matching::{match_detections, tpr_ppv, MatchResult};
use crate::data::{list_records, load_record, AnnotatedRecord};
use crate::qrs::{detect_qrs_discrepancy, pan_tompkins_with, Detection, DiscrepancyDetectorConfig, PanTompkinsConfig};
use crate::signal::{SpikeTrain, UniformSignal};
use crate::sod::{normalize, sod_encode, upsample_cubic, SodConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    PanTompkins,
    Discrepancy,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::PanTompkins, Method::Discrepancy];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::PanTompkins => "pantompkins",
            Method::Discrepancy => "discrepancy",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pantompkins" => Ok(Method::PanTompkins),
            "discrepancy" => Ok(Method::Discrepancy),
            other => Err(Error::InvalidParameter(format!(
                "unknown method '{other}' (expected pantompkins or discrepancy)"
            ))),
        }
    }
}

/// Preprocessing in front of the spike-domain detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SodFrontEnd {
    pub theta: f64,
    pub upsample: usize,
    pub normalize: bool,
}

impl Default for SodFrontEnd {
    fn default() -> Self {
        SodFrontEnd { theta: 0.05, upsample: 10, normalize: true }
    }
}

/// Optional normalization, cubic upsampling, then send-on-delta.
pub fn sod_front_end(x: &UniformSignal, fe: &SodFrontEnd) -> Result<SpikeTrain> {
    let cfg = SodConfig::new(fe.theta)?;
    let x = if fe.normalize { normalize(x)? } else { x.clone() };
    let x = if fe.upsample > 1 { upsample_cubic(&x, fe.upsample)? } else { x };
    sod_encode(&x, &cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PipelineConfig {
    pub sod: SodFrontEnd,
    pub discrepancy: DiscrepancyDetectorConfig,
    pub pan_tompkins: PanTompkinsConfig,
}

/// Detections plus the number of samples (Pan-Tompkins) or spikes
/// (discrepancy) the detector consumed.
#[derive(Debug, Clone)]
pub struct DetectorOutput {
    pub detections: Vec<Detection>,
    pub n_events: usize,
}

pub fn run_detector(x: &UniformSignal, method: Method, cfg: &PipelineConfig) -> Result<DetectorOutput> {
    match method {
        Method::PanTompkins => {
            Ok(DetectorOutput { detections: pan_tompkins_with(x, &cfg.pan_tompkins)?, n_events: x.len() })
        }
        Method::Discrepancy => {
            let train = sod_front_end(x, &cfg.sod)?;
            let detections = detect_qrs_discrepancy(&train, &cfg.discrepancy)?;
            Ok(DetectorOutput { detections, n_events: train.len() })
        }
    }
}

#[derive(Debug, Clone)]
pub struct RecordReport {
    pub record: String,
    pub channel: usize,
    pub method: Method,
    pub n_events: usize,
    pub matches: MatchResult,
}

impl RecordReport {
    pub fn tpr(&self) -> Option<f64> {
        tpr_ppv(&self.matches).0
    }

    pub fn ppv(&self) -> Option<f64> {
        tpr_ppv(&self.matches).1
    }
}

pub fn evaluate_record(
    rec: &AnnotatedRecord,
    channel: usize,
    method: Method,
    tol: f64,
    cfg: &PipelineConfig,
) -> Result<(RecordReport, Vec<Detection>)> {
    let x = rec.channels.get(channel).ok_or_else(|| {
        Error::InvalidParameter(format!("record {} has no channel {channel}", rec.header.record_name))
    })?;
    let out = run_detector(x, method, cfg)?;
    let dets: Vec<f64> = out.detections.iter().map(|d| d.t).collect();
    let report = RecordReport {
        record: rec.header.record_name.clone(),
        channel,
        method,
        n_events: out.n_events,
        matches: match_detections(&dets, &rec.beat_times(), tol),
    };
    Ok((report, out.detections))
}

/// Scores every record with an annotation file in `dir`, in parallel.
pub fn evaluate_corpus(
    dir: &Path,
    channel: usize,
    method: Method,
    tol: f64,
    cfg: &PipelineConfig,
) -> Result<Vec<RecordReport>> {
    let names = list_records(dir)?;
    if names.is_empty() {
        return Err(Error::InvalidInput(format!("no annotated WFDB records in {}", dir.display())));
    }
    names
        .par_iter()
        .map(|name| {
            let rec = load_record(dir, name)?;
            evaluate_record(&rec, channel, method, tol, cfg).map(|(r, _)| r)
        })
        .collect()
}

/// Pooled scores over a set of records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSummary {
    pub records: usize,
    pub matches: MatchResult,
    pub tpr: Option<f64>,
    pub ppv: Option<f64>,
    pub mean_events: f64,
}

pub fn summarize_corpus(reports: &[RecordReport]) -> CorpusSummary {
    let matches: MatchResult = reports.iter().map(|r| r.matches).sum();
    let (tpr, ppv) = tpr_ppv(&matches);
    let mean_events = if reports.is_empty() {
        0.0
    } else {
        reports.iter().map(|r| r.n_events as f64).sum::<f64>() / reports.len() as f64
    };
    CorpusSummary { records: reports.len(), matches, tpr, ppv, mean_events }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_synthetic_ecg;

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("pt".parse::<Method>().is_err());
    }

    #[test]
    fn front_end_event_count_tracks_threshold() {
        let (x, _) = gen_synthetic_ecg(75.0, 10.0, 360.0).unwrap();
        let fine = sod_front_end(&x, &SodFrontEnd::default()).unwrap();
        let coarse = sod_front_end(&x, &SodFrontEnd { theta: 0.1, ..Default::default() }).unwrap();
        assert!(!fine.is_empty());
        assert!(coarse.len() <= fine.len());
        assert!(fine.amplitudes().all(|a| a == 1.0 || a == -1.0));
    }

    #[test]
    fn pan_tompkins_counts_samples() {
        let (x, _) = gen_synthetic_ecg(75.0, 10.0, 360.0).unwrap();
        let out = run_detector(&x, Method::PanTompkins, &PipelineConfig::default()).unwrap();
        assert_eq!(out.n_events, 3600);
    }

    #[test]
    fn corpus_summary_pools_counts() {
        let mk = |tp, p, pp, ev| RecordReport {
            record: "r".into(),
            channel: 0,
            method: Method::PanTompkins,
            n_events: ev,
            matches: MatchResult { tp, fn_: p - tp, fp: pp - tp, p, pp },
        };
        let s = summarize_corpus(&[mk(9, 10, 9, 100), mk(1, 10, 3, 300)]);
        assert_eq!(s.tpr, Some(0.5));
        assert_eq!(s.ppv, Some(10.0 / 12.0));
        assert_eq!(s.mean_events, 200.0);
    }
}
