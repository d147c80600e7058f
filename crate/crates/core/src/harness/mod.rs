//! Scoring, experiment runners and record pipelines.

mod experiment;
mod matching;
mod pipeline;
mod stats;

pub use experiment::{
    cell_trains, quantization_experiment, summarize, write_error_samples_csv, CellSummary, ErrorSample, ExperimentGrid,
};
pub use matching::{format_pct, match_detections, match_pairs, tpr_ppv, MatchResult, DEFAULT_TOLERANCE};
pub use pipeline::{
    evaluate_corpus, evaluate_record, run_detector, sod_front_end, summarize_corpus, CorpusSummary, DetectorOutput,
    Method, PipelineConfig, RecordReport, SodFrontEnd,
};
pub use stats::{box_stats, quantile_sorted, BoxStats};
