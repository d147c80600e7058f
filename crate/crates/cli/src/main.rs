//! `spikeqrs`: command-line front end for the encoders, norms, quantization
//! experiments and QRS detectors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use spikeqrs_core::data::{self, CsvData};
use spikeqrs_core::harness::{
    self, format_pct, tpr_ppv, ExperimentGrid, Method, PipelineConfig, SodFrontEnd, DEFAULT_TOLERANCE,
};
use spikeqrs_core::lif::{lif_encode, lif_encode_train};
use spikeqrs_core::metrics::{alexiewicz_norm, weyl_discrepancy};
use spikeqrs_core::{HybridSignal, LifConfig, ResetMode, SpikeTrain};

#[derive(Parser)]
#[command(name = "spikeqrs", version, about = "Event-based signal encoding and spike-domain QRS detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Send-on-delta encode a `t,value` signal into ±1 spikes.
    Sod {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        theta: f64,
        /// Cubic-spline upsampling factor applied before encoding.
        #[arg(long, default_value_t = 1)]
        upsample: usize,
        /// Scale the signal to peak magnitude 1 first.
        #[arg(long)]
        normalize: bool,
        /// Output spike CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// LIF-encode a spike train or a `t,value` signal.
    Lif {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Refractory time (s).
        #[arg(long, default_value_t = 0.0)]
        tr: f64,
        #[arg(long, value_enum, default_value_t = ResetArg::Mod)]
        reset: ResetArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the weighted Alexiewicz norm or the Weyl discrepancy of a spike train.
    Norm {
        #[arg(long, value_enum)]
        kind: NormKind,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long)]
        input: PathBuf,
    },
    /// Quantization error of LIF encoding on random spike trains.
    QuantizeBench {
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        spikes: Vec<usize>,
        #[arg(long = "amp-scale", value_delimiter = ',', default_value = "1.0,1.5")]
        amp_scale: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1.0,0.1,0.0")]
        alpha: Vec<f64>,
        /// Comma-separated reset modes, or `all`.
        #[arg(long, default_value = "all")]
        reset: String,
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-run samples as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print box statistics per grid cell.
        #[arg(long)]
        summary: bool,
    },
    /// Detect QRS complexes in one WFDB record and score them.
    Qrs {
        #[arg(long = "record-dir")]
        record_dir: PathBuf,
        #[arg(long)]
        record: String,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        channel: u8,
        #[arg(long, value_enum, default_value_t = MethodArg::Pantompkins)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a detector on every annotated record in a directory (CSV to stdout).
    QrsAll {
        #[arg(long = "record-dir")]
        record_dir: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Also print one row per record.
        #[arg(long = "per-record")]
        per_record: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ResetArg {
    Zero,
    Subtract,
    Mod,
}

impl From<ResetArg> for ResetMode {
    fn from(r: ResetArg) -> Self {
        match r {
            ResetArg::Zero => ResetMode::ToZero,
            ResetArg::Subtract => ResetMode::BySubtraction,
            ResetArg::Mod => ResetMode::ToMod,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    Alexiewicz,
    Discrepancy,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pantompkins,
    Discrepancy,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Pantompkins => Method::PanTompkins,
            MethodArg::Discrepancy => Method::Discrepancy,
        }
    }
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 1, err: anyhow::anyhow!(msg.into()) }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        let data = err
            .chain()
            .find_map(|e| e.downcast_ref::<spikeqrs_core::Error>())
            .is_none_or(spikeqrs_core::Error::is_data_error);
        Failure { code: if data { 2 } else { 1 }, err }
    }
}

impl From<spikeqrs_core::Error> for Failure {
    fn from(err: spikeqrs_core::Error) -> Self {
        anyhow::Error::from(err).into()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_spikes(path: &Path) -> anyhow::Result<SpikeTrain> {
    let text = read_text(path)?;
    data::read_spikes_csv(text.as_bytes()).with_context(|| format!("parsing {}", path.display()))
}

fn parse_resets(s: &str) -> Result<Vec<ResetMode>, Failure> {
    if s == "all" {
        return Ok(ResetMode::ALL.to_vec());
    }
    s.split(',').map(|r| r.trim().parse::<ResetMode>().map_err(|e| usage(e.to_string()))).collect()
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Sod { input, theta, upsample, normalize, out } => {
            if upsample == 0 {
                return Err(usage("--upsample must be >= 1"));
            }
            let text = read_text(&input)?;
            let x = data::read_signal_csv(text.as_bytes()).with_context(|| format!("parsing {}", input.display()))?;
            let fe = SodFrontEnd { theta, upsample, normalize };
            let train = harness::sod_front_end(&x, &fe)?;
            data::write_spikes_csv(output(out.as_deref())?, &train)?;
            eprintln!("samples: {}  spikes: {}", x.len(), train.len());
        }
        Command::Lif { input, theta, alpha, tr, reset, out } => {
            let cfg = LifConfig::new(theta, alpha, tr, reset.into())?;
            let text = read_text(&input)?;
            let parsed = data::read_csv_auto(&text).with_context(|| format!("parsing {}", input.display()))?;
            let (n_in, train) = match parsed {
                CsvData::Spikes(eta) => (eta.len(), lif_encode_train(&eta, &cfg)?),
                CsvData::Signal(x) => (x.len(), lif_encode(&HybridSignal::from_base(x), &cfg)?),
            };
            data::write_spikes_csv(output(out.as_deref())?, &train)?;
            eprintln!("input events: {n_in}  output spikes: {}", train.len());
        }
        Command::Norm { kind, alpha, input } => {
            if !(alpha.is_finite() && alpha >= 0.0) {
                return Err(usage(format!("--alpha must be >= 0, got {alpha}")));
            }
            let train = read_spikes(&input)?;
            let v = match kind {
                NormKind::Alexiewicz => alexiewicz_norm(&train, alpha),
                NormKind::Discrepancy => weyl_discrepancy(&train.amplitudes().collect::<Vec<_>>()),
            };
            println!("{v}");
        }
        Command::QuantizeBench { runs, spikes, amp_scale, alpha, reset, theta, seed, out, summary } => {
            let grid = ExperimentGrid {
                resets: parse_resets(&reset)?,
                alphas: alpha,
                n_spikes: spikes,
                amp_scales: amp_scale,
                theta,
                ..Default::default()
            };
            let samples = harness::quantization_experiment(&grid, runs, seed)?;
            if let Some(p) = out.as_deref() {
                harness::write_error_samples_csv(output(Some(p))?, &samples)?;
            }
            if summary || out.is_none() {
                let mut w = output(None)?;
                writeln!(w, "reset,alpha,n_spikes,amp_scale,runs,min,q1,median,q3,max,at_or_above_theta")
                    .context("writing summary")?;
                for c in harness::summarize(&samples, theta)? {
                    let b = c.stats;
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        c.reset, c.alpha, c.n_spikes, c.amp_scale, c.runs, b.min, b.q1, b.median, b.q3, b.max,
                        c.at_or_above_theta
                    )
                    .context("writing summary")?;
                }
                w.flush().context("writing summary")?;
            }
        }
        Command::Qrs { record_dir, record, channel, method, tol, out } => {
            check_tol(tol)?;
            let rec = data::load_record(&record_dir, &record)
                .with_context(|| format!("loading record {record} from {}", record_dir.display()))?;
            let (report, dets) =
                harness::evaluate_record(&rec, channel as usize, method.into(), tol, &PipelineConfig::default())?;
            if let Some(p) = out.as_deref() {
                data::write_detections_csv(output(Some(p))?, &dets)?;
            }
            let m = report.matches;
            let (tpr, ppv) = tpr_ppv(&m);
            let unit = match report.method {
                Method::PanTompkins => "samples",
                Method::Discrepancy => "spikes",
            };
            println!(
                "record {} channel {} method {}: TPR {}% PPV {}% (TP {} FN {} FP {}) {} {}",
                report.record,
                channel,
                report.method,
                format_pct(tpr),
                format_pct(ppv),
                m.tp,
                m.fn_,
                m.fp,
                report.n_events,
                unit
            );
        }
        Command::QrsAll { record_dir, method, tol, per_record } => {
            check_tol(tol)?;
            let method: Method = method.into();
            let cfg = PipelineConfig::default();
            let mut w = output(None)?;
            writeln!(w, "method,channel,records,tp,fn,fp,tpr,ppv,avg_events").context("writing table")?;
            let mut rows = Vec::new();
            for (channel, label) in [(0usize, "L1"), (1, "L2")] {
                let reports = harness::evaluate_corpus(&record_dir, channel, method, tol, &cfg)?;
                let s = harness::summarize_corpus(&reports);
                writeln!(
                    w,
                    "{method},{label},{},{},{},{},{},{},{:.1}",
                    s.records,
                    s.matches.tp,
                    s.matches.fn_,
                    s.matches.fp,
                    format_pct(s.tpr),
                    format_pct(s.ppv),
                    s.mean_events
                )
                .context("writing table")?;
                rows.push((label, reports));
            }
            if per_record {
                writeln!(w, "\nrecord,channel,tp,fn,fp,tpr,ppv,events").context("writing table")?;
                for (label, reports) in &rows {
                    for r in reports {
                        writeln!(
                            w,
                            "{},{label},{},{},{},{},{},{}",
                            r.record,
                            r.matches.tp,
                            r.matches.fn_,
                            r.matches.fp,
                            format_pct(r.tpr()),
                            format_pct(r.ppv()),
                            r.n_events
                        )
                        .context("writing table")?;
                    }
                }
            }
            w.flush().context("writing table")?;
        }
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(usage(format!("--tol must be >= 0, got {tol}")));
    }
    Ok(())
}
