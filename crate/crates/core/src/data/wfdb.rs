//! WFDB records: `.hea` headers, format-212 signal files and MIT-format
//! `.atr` annotation files.

use std::fmt::Write as _;
use std::path::Path;

use crate::signal::UniformSignal;
use crate::{Error, Result};

/// Gain assumed when a header gives none (or zero), in adu per physical unit.
pub const DEFAULT_GAIN: f64 = 200.0;
/// Sampling frequency assumed when a header gives none.
pub const DEFAULT_SAMPLE_RATE: f64 = 250.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    pub file_name: String,
    pub format: u16,
    /// adu per physical unit (mV for ECG)
    pub gain: f64,
    /// adu value corresponding to 0 physical units
    pub baseline: i32,
    pub units: String,
    pub adc_resolution: u32,
    pub adc_zero: i32,
    pub initial_value: i32,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordHeader {
    pub record_name: String,
    pub n_channels: usize,
    pub sample_rate: f64,
    /// samples per channel; 0 when the header leaves it open
    pub n_samples: usize,
    pub signals: Vec<SignalSpec>,
}

impl RecordHeader {
    /// Renders the header in WFDB text form.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {} {}\n", self.record_name, self.n_channels, self.sample_rate, self.n_samples);
        for sig in &self.signals {
            let _ = writeln!(
                s,
                "{} {} {}({})/{} {} {} {} 0 0 {}",
                sig.file_name,
                sig.format,
                sig.gain,
                sig.baseline,
                sig.units,
                sig.adc_resolution,
                sig.adc_zero,
                sig.initial_value,
                sig.description
            );
        }
        s
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::ParseLine { line, msg: msg.into() }
}

fn leading_digits(s: &str) -> &str {
    let end = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    &s[..end]
}

/// Parses `.hea` text. Comment lines (`#`) and blank lines are skipped;
/// trailing fields beyond the ones used here are ignored.
pub fn read_wfdb_header(bytes: &[u8]) -> Result<RecordHeader> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Malformed(format!("header is not UTF-8: {e}")))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, record_line) = lines.next().ok_or_else(|| parse_err(1, "empty header"))?;
    let f: Vec<&str> = record_line.split_whitespace().collect();
    if f.len() < 2 {
        return Err(parse_err(ln, "record line needs at least a name and a signal count"));
    }
    let record_name = f[0].split('/').next().unwrap_or(f[0]).to_string();
    if f[0].contains('/') {
        return Err(Error::UnsupportedFormat("multi-segment records".into()));
    }
    let n_channels: usize = f[1].parse().map_err(|_| parse_err(ln, format!("bad signal count '{}'", f[1])))?;
    if n_channels == 0 {
        return Err(parse_err(ln, "record has no signals"));
    }
    let sample_rate = match f.get(2) {
        Some(s) => {
            let head = s.split(['/', '(']).next().unwrap_or(s);
            head.parse::<f64>().map_err(|_| parse_err(ln, format!("bad sampling frequency '{s}'")))?
        }
        None => DEFAULT_SAMPLE_RATE,
    };
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(parse_err(ln, format!("sampling frequency {sample_rate} must be > 0")));
    }
    let n_samples = match f.get(3) {
        Some(s) => s.parse().map_err(|_| parse_err(ln, format!("bad sample count '{s}'")))?,
        None => 0,
    };

    let mut signals = Vec::with_capacity(n_channels);
    let mut last_line = ln;
    for _ in 0..n_channels {
        let (ln, line) = lines.next().ok_or_else(|| {
            parse_err(last_line + 1, format!("expected {n_channels} signal lines, found {}", signals.len()))
        })?;
        last_line = ln;
        signals.push(parse_signal_line(ln, line)?);
    }
    if let Some(s) = signals.iter().find(|s| s.format != 212) {
        return Err(Error::UnsupportedFormat(format!("signal format {} (only 212 is supported)", s.format)));
    }
    if signals.iter().any(|s| s.file_name != signals[0].file_name) {
        return Err(Error::UnsupportedFormat("signals spread over several files".into()));
    }
    Ok(RecordHeader { record_name, n_channels, sample_rate, n_samples, signals })
}

fn parse_signal_line(ln: usize, line: &str) -> Result<SignalSpec> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() < 2 {
        return Err(parse_err(ln, "signal line needs a file name and a format"));
    }
    let digits = leading_digits(f[1]);
    let format: u16 = digits.parse().map_err(|_| parse_err(ln, format!("bad format field '{}'", f[1])))?;
    if f[1].len() != digits.len() && f[1][digits.len()..].starts_with('x') {
        return Err(Error::UnsupportedFormat("multi-frequency signals".into()));
    }

    let mut gain = DEFAULT_GAIN;
    let mut baseline: Option<i32> = None;
    let mut units = "mV".to_string();
    if let Some(g) = f.get(2) {
        let (gain_part, units_part) = match g.split_once('/') {
            Some((a, b)) => (a, Some(b)),
            None => (*g, None),
        };
        let (value, base) = match gain_part.split_once('(') {
            Some((v, b)) => {
                let b = b.strip_suffix(')').ok_or_else(|| parse_err(ln, format!("unterminated baseline in '{g}'")))?;
                (v, Some(b.parse::<i32>().map_err(|_| parse_err(ln, format!("bad baseline '{b}'")))?))
            }
            None => (gain_part, None),
        };
        let v: f64 = value.parse().map_err(|_| parse_err(ln, format!("bad gain '{value}'")))?;
        if v != 0.0 {
            gain = v;
        }
        baseline = base;
        if let Some(u) = units_part {
            units = u.to_string();
        }
    }
    let int_field = |i: usize, name: &str| -> Result<Option<i64>> {
        f.get(i)
            .map(|s| s.parse::<i64>().map_err(|_| parse_err(ln, format!("bad {name} '{s}'"))))
            .transpose()
    };
    let adc_resolution = int_field(3, "ADC resolution")?.unwrap_or(12) as u32;
    let adc_zero = int_field(4, "ADC zero")?.unwrap_or(0) as i32;
    let initial_value = int_field(5, "initial value")?.map_or(adc_zero, |v| v as i32);
    let description = if f.len() > 8 { f[8..].join(" ") } else { String::new() };
    Ok(SignalSpec {
        file_name: f[0].to_string(),
        format,
        gain,
        baseline: baseline.unwrap_or(adc_zero),
        units,
        adc_resolution,
        adc_zero,
        initial_value,
        description,
    })
}

/// Bytes occupied by `total` format-212 samples.
pub fn bytes_for_212(total: usize) -> usize {
    total / 2 * 3 + (total % 2) * 2
}

#[inline]
fn sign_extend_12(v: u16) -> i16 {
    ((v << 4) as i16) >> 4
}

/// Unpacks format-212 data into per-channel adu values.
///
/// Each 3-byte group holds two 12-bit two's-complement samples: the first is
/// byte 0 plus the low nibble of byte 1 as its high bits, the second is
/// byte 2 plus the high nibble of byte 1. Samples are frame-interleaved.
pub fn decode_212(bytes: &[u8], n_channels: usize, n_samples: usize) -> Result<Vec<Vec<i16>>> {
    if n_channels == 0 {
        return Err(Error::InvalidParameter("no channels to decode".into()));
    }
    let total = n_samples * n_channels;
    let expected = bytes_for_212(total);
    if bytes.len() < expected {
        return Err(Error::Truncated { expected, actual: bytes.len() });
    }
    let mut channels = vec![Vec::with_capacity(n_samples); n_channels];
    for k in 0..total {
        let g = k / 2 * 3;
        let raw = if k % 2 == 0 {
            bytes[g] as u16 | ((bytes[g + 1] as u16 & 0x0F) << 8)
        } else {
            bytes[g + 2] as u16 | ((bytes[g + 1] as u16 & 0xF0) << 4)
        };
        channels[k % n_channels].push(sign_extend_12(raw));
    }
    Ok(channels)
}

/// Packs per-channel 12-bit adu values (all channels equally long) into
/// format-212 bytes.
pub fn encode_212(channels: &[Vec<i16>]) -> Result<Vec<u8>> {
    let n_channels = channels.len();
    let n_samples = channels.first().map_or(0, Vec::len);
    if channels.iter().any(|c| c.len() != n_samples) {
        return Err(Error::InvalidInput("channels differ in length".into()));
    }
    if let Some(v) = channels.iter().flatten().find(|v| !(-2048..=2047).contains(*v)) {
        return Err(Error::InvalidInput(format!("sample {v} does not fit in 12 bits")));
    }
    let total = n_samples * n_channels;
    let mut out = vec![0u8; bytes_for_212(total)];
    for k in 0..total {
        let v = channels[k % n_channels][k / n_channels] as u16 & 0x0FFF;
        let g = k / 2 * 3;
        if k % 2 == 0 {
            out[g] = (v & 0xFF) as u8;
            out[g + 1] |= (v >> 8) as u8;
        } else {
            out[g + 2] = (v & 0xFF) as u8;
            out[g + 1] |= ((v >> 8) << 4) as u8;
        }
    }
    Ok(out)
}

/// Decodes a format-212 signal file into physical units, `(adu − baseline) / gain`.
///
/// A header with an open sample count takes as many whole frames as the
/// data holds.
pub fn read_wfdb_212(bytes: &[u8], header: &RecordHeader) -> Result<Vec<UniformSignal>> {
    if header.signals.len() != header.n_channels {
        return Err(Error::InvalidInput("header signal list does not match its channel count".into()));
    }
    let n_samples = if header.n_samples > 0 {
        header.n_samples
    } else {
        bytes.len() * 2 / 3 / header.n_channels
    };
    let adu = decode_212(bytes, header.n_channels, n_samples)?;
    adu.into_iter()
        .zip(&header.signals)
        .map(|(raw, spec)| {
            let base = spec.baseline as f64;
            let v = raw.into_iter().map(|a| (a as f64 - base) / spec.gain).collect();
            UniformSignal::from_rate(header.sample_rate, v)
        })
        .collect()
}

/// One annotation from an `.atr` file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annotation {
    pub t: f64,
    pub sample: i64,
    pub code: u8,
}

const SKIP: u16 = 59;
const NUM: u16 = 60;
const SUB: u16 = 61;
const CHN: u16 = 62;
const AUX: u16 = 63;

/// Annotation codes that mark a beat (QRS complex), following the WFDB
/// `isqrs` table.
pub const BEAT_CODES: [u8; 19] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 25, 30, 34, 35, 38, 41];

pub fn is_beat_code(code: u8) -> bool {
    BEAT_CODES.contains(&code)
}

fn read_u16(bytes: &[u8], pos: usize) -> Result<u16> {
    bytes
        .get(pos..pos + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| Error::Malformed(format!("annotation stream ends at byte {} without terminator", bytes.len())))
}

/// Parses an MIT-format annotation stream.
///
/// Each 16-bit little-endian word carries the type in its high 6 bits and
/// a time increment (or payload length) in its low 10 bits.
pub fn read_wfdb_annotations(bytes: &[u8], sample_rate: f64) -> Result<Vec<Annotation>> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::InvalidParameter(format!("sample rate {sample_rate} must be > 0")));
    }
    let mut out = Vec::new();
    let mut pos = 0usize;
    let mut sample: i64 = 0;
    loop {
        let word = read_u16(bytes, pos)?;
        pos += 2;
        let (kind, field) = (word >> 10, word & 0x3FF);
        match kind {
            0 if field == 0 => break,
            SKIP => {
                let hi = read_u16(bytes, pos)? as u32;
                let lo = read_u16(bytes, pos + 2)? as u32;
                pos += 4;
                sample += ((hi << 16) | lo) as i32 as i64;
            }
            NUM | SUB | CHN => {}
            // code 0 with a time increment is a placeholder (NOTQRS)
            0 => sample += field as i64,
            AUX => {
                let len = field as usize;
                pos += len + (len & 1);
                if pos > bytes.len() {
                    return Err(Error::Malformed("auxiliary payload runs past the end of the stream".into()));
                }
            }
            code => {
                sample += field as i64;
                out.push(Annotation { t: sample as f64 / sample_rate, sample, code: code as u8 });
            }
        }
    }
    Ok(out)
}

/// Writes `(sample, code)` annotations as an MIT-format stream, using SKIP
/// words for gaps that do not fit in 10 bits.
pub fn write_wfdb_annotations(annotations: &[(i64, u8)]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut prev = 0i64;
    for &(sample, code) in annotations {
        if code == 0 || code as u16 >= SKIP {
            return Err(Error::InvalidInput(format!("annotation code {code} cannot be written")));
        }
        let mut gap = sample - prev;
        if gap < 0 {
            return Err(Error::InvalidInput("annotation samples must be non-decreasing".into()));
        }
        if gap > 0x3FF {
            let skip = i32::try_from(gap).map_err(|_| Error::InvalidInput("gap too large".into()))? as u32;
            out.extend_from_slice(&(SKIP << 10).to_le_bytes());
            out.extend_from_slice(&((skip >> 16) as u16).to_le_bytes());
            out.extend_from_slice(&((skip & 0xFFFF) as u16).to_le_bytes());
            gap = 0;
        }
        out.extend_from_slice(&(((code as u16) << 10) | gap as u16).to_le_bytes());
        prev = sample;
    }
    out.extend_from_slice(&[0, 0]);
    Ok(out)
}

/// A record's channels (physical units) with its beat annotations.
#[derive(Debug, Clone)]
pub struct AnnotatedRecord {
    pub header: RecordHeader,
    pub channels: Vec<UniformSignal>,
    pub beats: Vec<Annotation>,
}

impl AnnotatedRecord {
    pub fn beat_times(&self) -> Vec<f64> {
        self.beats.iter().map(|a| a.t).collect()
    }
}

/// Loads `<dir>/<name>.hea`, its signal file and `<dir>/<name>.atr`.
pub fn load_record(dir: &Path, name: &str) -> Result<AnnotatedRecord> {
    let header = read_wfdb_header(&std::fs::read(dir.join(format!("{name}.hea")))?)?;
    let dat = std::fs::read(dir.join(&header.signals[0].file_name))?;
    let channels = read_wfdb_212(&dat, &header)?;
    let atr = std::fs::read(dir.join(format!("{name}.atr")))?;
    let beats = read_wfdb_annotations(&atr, header.sample_rate)?
        .into_iter()
        .filter(|a| is_beat_code(a.code))
        .collect();
    Ok(AnnotatedRecord { header, channels, beats })
}

/// Record names with a `.hea` file in `dir`, sorted.
pub fn list_records(dir: &Path) -> Result<Vec<String>> {
    let mut names: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            (p.extension().is_some_and(|x| x == "hea") && p.with_extension("atr").exists())
                .then(|| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
                .flatten()
        })
        .collect();
    names.sort();
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MITDB_100: &str = "100 2 360 650000\n\
        100.dat 212 200 11 1024 995 -22131 0 MLII\n\
        100.dat 212 200 11 1024 1011 20052 0 V5\n\
        # 69 M 1085 1629 x1\n";

    #[test]
    fn parses_mitdb_style_header() {
        let h = read_wfdb_header(MITDB_100.as_bytes()).unwrap();
        assert_eq!(h.record_name, "100");
        assert_eq!(h.n_channels, 2);
        assert_eq!(h.sample_rate, 360.0);
        assert_eq!(h.n_samples, 650000);
        assert_eq!(h.signals[0].format, 212);
        assert_eq!(h.signals[0].gain, 200.0);
        assert_eq!(h.signals[0].baseline, 1024);
        assert_eq!(h.signals[0].initial_value, 995);
        assert_eq!(h.signals[1].description, "V5");
    }

    #[test]
    fn explicit_baseline_and_units() {
        let h = read_wfdb_header(b"r 1 500 10\nr.dat 212 100(-5)/uV 12 0 0\n").unwrap();
        assert_eq!(h.signals[0].gain, 100.0);
        assert_eq!(h.signals[0].baseline, -5);
        assert_eq!(h.signals[0].units, "uV");
    }

    #[test]
    fn gain_defaults() {
        let h = read_wfdb_header(b"r 1 360 10\nr.dat 212\n").unwrap();
        assert_eq!(h.signals[0].gain, DEFAULT_GAIN);
        assert_eq!(h.signals[0].baseline, 0);
        let h = read_wfdb_header(b"r 1 360 10\nr.dat 212 0 12 7\n").unwrap();
        assert_eq!(h.signals[0].gain, DEFAULT_GAIN);
        assert_eq!(h.signals[0].baseline, 7);
        let h = read_wfdb_header(b"r 1\nr.dat 212\n").unwrap();
        assert_eq!(h.sample_rate, DEFAULT_SAMPLE_RATE);
        assert_eq!(h.n_samples, 0);
    }

    #[test]
    fn header_errors() {
        match read_wfdb_header(b"100 2 360 650000\n100.dat 212 200 11 1024 995\n") {
            Err(Error::ParseLine { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match read_wfdb_header(b"# c\n100 2 abc\n") {
            Err(Error::ParseLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_wfdb_header(b"r 1 360 10\nr.dat 16 200\n"), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(
            read_wfdb_header(b"r 1 360 10\nr.dat 212 2x0(3\n"),
            Err(Error::ParseLine { line: 2, .. })
        ));
        assert!(read_wfdb_header(b"").is_err());
    }

    #[test]
    fn bit_layout_examples() {
        assert_eq!(decode_212(&[0x01, 0x00, 0x00], 2, 1).unwrap(), vec![vec![1], vec![0]]);
        assert_eq!(decode_212(&[0xFF, 0x0F, 0x00], 2, 1).unwrap(), vec![vec![-1], vec![0]]);
        // second sample from the high nibble of byte 1 and byte 2
        assert_eq!(decode_212(&[0x00, 0x80, 0x00], 2, 1).unwrap(), vec![vec![0], vec![-2048]]);
        assert_eq!(decode_212(&[0x00, 0x70, 0xFF], 2, 1).unwrap(), vec![vec![0], vec![2047]]);
    }

    #[test]
    fn truncated_signal_reports_lengths() {
        match decode_212(&[0u8; 7], 2, 3) {
            Err(Error::Truncated { expected, actual }) => assert_eq!((expected, actual), (9, 7)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_sample_count_uses_two_bytes() {
        assert_eq!(bytes_for_212(3), 5);
        let enc = encode_212(&[vec![5, -7, 300]]).unwrap();
        assert_eq!(enc.len(), 5);
        assert_eq!(decode_212(&enc, 1, 3).unwrap(), vec![vec![5, -7, 300]]);
    }

    #[test]
    fn physical_units() {
        let h = read_wfdb_header(b"r 2 360 2\nr.dat 212 200 11 1024\nr.dat 212 100(0) 11 0\n").unwrap();
        let bytes = encode_212(&[vec![1024, 1224], vec![50, -100]]).unwrap();
        let ch = read_wfdb_212(&bytes, &h).unwrap();
        assert_eq!(ch[0].samples(), &[0.0, 1.0]);
        assert_eq!(ch[1].samples(), &[0.5, -1.0]);
        assert_eq!(ch[0].sample_rate(), 360.0);
    }

    fn word(kind: u16, field: u16) -> [u8; 2] {
        ((kind << 10) | field).to_le_bytes()
    }

    #[test]
    fn annotation_examples() {
        let mut b = word(1, 360).to_vec();
        b.extend_from_slice(&[0, 0]);
        let a = read_wfdb_annotations(&b, 360.0).unwrap();
        assert_eq!(a, vec![Annotation { t: 1.0, sample: 360, code: 1 }]);

        assert!(read_wfdb_annotations(&[0, 0], 360.0).unwrap().is_empty());

        // SKIP 100000 samples, then NORMAL after 20 more
        let mut b = word(SKIP, 0).to_vec();
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&((100_000u32 & 0xFFFF) as u16).to_le_bytes());
        b.extend_from_slice(&word(1, 20));
        b.extend_from_slice(&[0, 0]);
        let a = read_wfdb_annotations(&b, 360.0).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].sample, 100_020);
    }

    #[test]
    fn annotation_aux_and_modifiers_are_skipped() {
        let mut b = word(1, 10).to_vec();
        b.extend_from_slice(&word(AUX, 3));
        b.extend_from_slice(b"(N\0\0");
        b.extend_from_slice(&word(SUB, 2));
        b.extend_from_slice(&word(CHN, 1));
        b.extend_from_slice(&word(NUM, 4));
        b.extend_from_slice(&word(28, 5));
        b.extend_from_slice(&word(5, 15));
        b.extend_from_slice(&[0, 0]);
        let a = read_wfdb_annotations(&b, 100.0).unwrap();
        let got: Vec<(i64, u8)> = a.iter().map(|x| (x.sample, x.code)).collect();
        assert_eq!(got, vec![(10, 1), (15, 28), (30, 5)]);
    }

    #[test]
    fn annotation_truncation() {
        let b = word(1, 10);
        assert!(matches!(read_wfdb_annotations(&b, 360.0), Err(Error::Malformed(_))));
        let b = word(SKIP, 0);
        assert!(read_wfdb_annotations(&b, 360.0).is_err());
        let mut b = word(AUX, 40).to_vec();
        b.extend_from_slice(&[0, 0]);
        assert!(read_wfdb_annotations(&b, 360.0).is_err());
    }

    #[test]
    fn beat_filter() {
        assert!(is_beat_code(1) && is_beat_code(5) && is_beat_code(38));
        assert!(!is_beat_code(28) && !is_beat_code(14) && !is_beat_code(16));
    }

    proptest! {
        #[test]
        fn format_212_round_trip(ch in 1usize..4, data in prop::collection::vec(-2048i16..=2047, 0..300)) {
            let n = data.len() / ch;
            let channels: Vec<Vec<i16>> = (0..ch).map(|c| data[c * n..(c + 1) * n].to_vec()).collect();
            let bytes = encode_212(&channels).unwrap();
            prop_assert_eq!(decode_212(&bytes, ch, n).unwrap(), channels);
        }

        #[test]
        fn annotation_round_trip(gaps in prop::collection::vec((0i64..5000, 1u8..42), 0..100)) {
            let mut s = 0;
            let ann: Vec<(i64, u8)> = gaps.into_iter().map(|(g, c)| { s += g; (s, c) }).collect();
            let bytes = write_wfdb_annotations(&ann).unwrap();
            let back: Vec<(i64, u8)> = read_wfdb_annotations(&bytes, 360.0).unwrap().iter().map(|a| (a.sample, a.code)).collect();
            prop_assert_eq!(back, ann);
        }
    }
}
