//! Dataset ingestion and synthetic inputs.

mod csvio;
mod synth;
mod wfdb;

pub use csvio::{
    read_annotations_csv, read_csv_auto, read_detections_csv, read_signal_csv, read_spikes_csv, sniff_csv,
    write_annotations_csv, write_detections_csv, write_signal_csv, write_spikes_csv, CsvData, CsvKind,
};
pub use synth::{
    gen_random_train, gen_synthetic_ecg, gen_wave_with_diracs, gen_wave_with_diracs_with, random_train, rng_from_seed,
    WaveConfig,
};
pub use wfdb::{
    bytes_for_212, decode_212, encode_212, is_beat_code, list_records, load_record, read_wfdb_212,
    read_wfdb_annotations, read_wfdb_header, write_wfdb_annotations, AnnotatedRecord, Annotation, RecordHeader,
    SignalSpec, BEAT_CODES, DEFAULT_GAIN, DEFAULT_SAMPLE_RATE,
};
