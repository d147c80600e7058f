//! CSV exchange formats: spikes (`t,amplitude`), uniformly sampled signals
//! (`t,value`), detections (`t`) and annotations (`t,code`).
//!
//! Floats are written in shortest round-trip form, so write-then-read is exact.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::wfdb::Annotation;
use crate::qrs::Detection;
use crate::signal::{Spike, SpikeTrain, UniformSignal};
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct SpikeRow {
    t: f64,
    amplitude: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SampleRow {
    t: f64,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct TimeRow {
    t: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct AnnotationRow {
    t: f64,
    code: u8,
}

/// What a CSV file holds, judged from its header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvKind {
    Spikes,
    Signal,
}

/// Reads either a spike CSV or a signal CSV.
#[derive(Debug, Clone)]
pub enum CsvData {
    Spikes(SpikeTrain),
    Signal(UniformSignal),
}

fn rows<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

fn write_rows<W: Write, T: Serialize>(w: W, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_spikes_csv<R: Read>(r: R) -> Result<SpikeTrain> {
    let rows: Vec<SpikeRow> = rows(r)?;
    let spikes = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| Spike::new(r.t, r.amplitude).map_err(|e| Error::ParseLine { line: i + 2, msg: e.to_string() }))
        .collect::<Result<Vec<_>>>()?;
    SpikeTrain::new(spikes)
}

pub fn write_spikes_csv<W: Write>(w: W, train: &SpikeTrain) -> Result<()> {
    write_rows(w, train.iter().map(|s| SpikeRow { t: s.t, amplitude: s.amplitude }))
}

/// Reads a `t,value` table whose times must lie on a uniform grid.
pub fn read_signal_csv<R: Read>(r: R) -> Result<UniformSignal> {
    let rows: Vec<SampleRow> = rows(r)?;
    if rows.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "a signal needs at least 2 samples to fix its rate, got {}",
            rows.len()
        )));
    }
    let t0 = rows[0].t;
    let dt = (rows[rows.len() - 1].t - t0) / (rows.len() - 1) as f64;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidInput("signal times must increase".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        let expected = t0 + i as f64 * dt;
        if (row.t - expected).abs() > 1e-6 * dt + 1e-12 {
            return Err(Error::ParseLine {
                line: i + 2,
                msg: format!("time {} is off the uniform grid (expected {expected})", row.t),
            });
        }
    }
    UniformSignal::new(t0, dt, rows.into_iter().map(|r| r.value).collect())
}

pub fn write_signal_csv<W: Write>(w: W, x: &UniformSignal) -> Result<()> {
    write_rows(w, x.iter().map(|(t, value)| SampleRow { t, value }))
}

pub fn read_detections_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    Ok(rows::<_, TimeRow>(r)?.into_iter().map(|r| r.t).collect())
}

pub fn write_detections_csv<W: Write>(w: W, dets: &[Detection]) -> Result<()> {
    write_rows(w, dets.iter().map(|d| TimeRow { t: d.t }))
}

/// Annotations as `t,code`; the sample index is recovered from `sample_rate`.
pub fn read_annotations_csv<R: Read>(r: R, sample_rate: f64) -> Result<Vec<Annotation>> {
    let rows: Vec<AnnotationRow> = rows(r)?;
    let mut prev = f64::NEG_INFINITY;
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| {
            if !(r.t.is_finite() && r.t >= prev) {
                return Err(Error::ParseLine { line: i + 2, msg: format!("annotation time {} out of order", r.t) });
            }
            prev = r.t;
            Ok(Annotation { t: r.t, sample: (r.t * sample_rate).round() as i64, code: r.code })
        })
        .collect()
}

pub fn write_annotations_csv<W: Write>(w: W, ann: &[Annotation]) -> Result<()> {
    write_rows(w, ann.iter().map(|a| AnnotationRow { t: a.t, code: a.code }))
}

/// Classifies a CSV by its header row.
pub fn sniff_csv(header_line: &str) -> Result<CsvKind> {
    let cols: Vec<String> = header_line.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
    match cols.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["t", "amplitude"] => Ok(CsvKind::Spikes),
        ["t", "value"] => Ok(CsvKind::Signal),
        _ => Err(Error::UnsupportedFormat(format!(
            "CSV header '{}' is neither 't,amplitude' nor 't,value'",
            header_line.trim()
        ))),
    }
}

/// Reads a spike or signal CSV from text, dispatching on the header.
pub fn read_csv_auto(text: &str) -> Result<CsvData> {
    let header = text.lines().next().unwrap_or("");
    match sniff_csv(header)? {
        CsvKind::Spikes => read_spikes_csv(text.as_bytes()).map(CsvData::Spikes),
        CsvKind::Signal => read_signal_csv(text.as_bytes()).map(CsvData::Signal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_round_trip_is_exact() {
        let tr = SpikeTrain::new(vec![
            Spike { t: 0.1 + 0.2, amplitude: -1.0 },
            Spike { t: 1.0 / 3.0 + 1e-9, amplitude: 2.5e-7 },
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_spikes_csv(&mut buf, &tr).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("t,amplitude\n"));
        assert_eq!(read_spikes_csv(buf.as_slice()).unwrap(), tr);
    }

    #[test]
    fn signal_round_trip() {
        let x = UniformSignal::new(0.5, 1.0 / 360.0, vec![0.0, 1.5, -2.0, 0.25]).unwrap();
        let mut buf = Vec::new();
        write_signal_csv(&mut buf, &x).unwrap();
        let y = read_signal_csv(buf.as_slice()).unwrap();
        assert_eq!(y.samples(), x.samples());
        assert!((y.dt() - x.dt()).abs() < 1e-15);
    }

    #[test]
    fn irregular_signal_is_rejected() {
        let err = read_signal_csv("t,value\n0,1\n0.1,2\n0.35,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::ParseLine { line: 3, .. }), "{err:?}");
        assert!(read_signal_csv("t,value\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn bad_rows_are_errors() {
        assert!(read_spikes_csv("t,amplitude\n0.1,abc\n".as_bytes()).is_err());
        assert!(read_spikes_csv("t,amplitude\n0.2,1\n0.1,1\n".as_bytes()).is_err());
        assert!(matches!(
            read_spikes_csv("t,amplitude\n0.1,0\n".as_bytes()),
            Err(Error::ParseLine { line: 2, .. })
        ));
    }

    #[test]
    fn sniffing() {
        assert!(matches!(read_csv_auto("t,amplitude\n1,1\n").unwrap(), CsvData::Spikes(_)));
        assert!(matches!(read_csv_auto("t, value\n0,1\n1,1\n").unwrap(), CsvData::Signal(_)));
        assert!(matches!(read_csv_auto("a,b\n"), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn detections_and_annotations() {
        let mut buf = Vec::new();
        write_detections_csv(&mut buf, &[Detection { t: 0.25, score: 3.0 }, Detection { t: 1.5, score: 1.0 }]).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "t\n0.25\n1.5\n");
        assert_eq!(read_detections_csv(buf.as_slice()).unwrap(), vec![0.25, 1.5]);

        let ann = read_annotations_csv("t,code\n1.0,1\n2.0,5\n".as_bytes(), 360.0).unwrap();
        assert_eq!(ann[1], Annotation { t: 2.0, sample: 720, code: 5 });
        assert!(read_annotations_csv("t,code\n2.0,1\n1.0,1\n".as_bytes(), 360.0).is_err());
    }
}
