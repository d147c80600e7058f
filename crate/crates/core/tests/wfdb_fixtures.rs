//! WFDB reader checked against files written (and decoded) by the reference
//! Python `wfdb` package. See scripts/make_wfdb_fixtures.py.

use std::path::{Path, PathBuf};

use spikeqrs_core::data::{decode_212, load_record, read_wfdb_212, read_wfdb_annotations, read_wfdb_header};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn read(name: &str) -> Vec<u8> {
    std::fs::read(fixtures().join(name)).unwrap()
}

/// Columns of an expected-values CSV (`adu*` then `mv*`), `nan` allowed.
fn expected(name: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_path(fixtures().join(name)).unwrap();
    let cols: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    let mut data = vec![Vec::new(); cols.len()];
    for row in rdr.records() {
        for (c, v) in row.unwrap().iter().enumerate() {
            data[c].push(v.parse::<f64>().unwrap());
        }
    }
    (cols, data)
}

fn check_record(name: &str, n_channels: usize) {
    let header = read_wfdb_header(&read(&format!("{name}.hea"))).unwrap();
    assert_eq!(header.n_channels, n_channels);
    let dat = read(&format!("{name}.dat"));
    let (cols, want) = expected(&format!("{name}_expected.csv"));
    assert_eq!(cols.len(), 2 * n_channels);

    let adu = decode_212(&dat, n_channels, header.n_samples).unwrap();
    let phys = read_wfdb_212(&dat, &header).unwrap();
    for c in 0..n_channels {
        let raw: Vec<f64> = adu[c].iter().map(|&a| a as f64).collect();
        assert_eq!(raw, want[c], "{name} channel {c} raw values");
        // initial value in the header is the first sample
        assert_eq!(header.signals[c].initial_value, adu[c][0] as i32);
        let mv = &want[n_channels + c];
        assert_eq!(phys[c].len(), mv.len());
        for (k, (got, w)) in phys[c].samples().iter().zip(mv).enumerate() {
            if w.is_nan() {
                // invalid-sample marker, kept as its raw conversion
                assert_eq!(adu[c][k], -2048);
            } else {
                assert!((got - w).abs() <= 1e-9 * w.abs().max(1.0), "{name} ch {c} sample {k}: {got} vs {w}");
            }
        }
    }
}

#[test]
fn two_channel_record_matches_reference_decoder() {
    check_record("fx2", 2);
}

#[test]
fn odd_length_single_channel_record() {
    check_record("fx1", 1);
}

#[test]
fn annotations_match_reference_reader() {
    let got = read_wfdb_annotations(&read("fx2.atr"), 360.0).unwrap();
    let (_, want) = expected("fx2_ann_expected.csv");
    // the writer stores the sampling frequency as a leading note at sample 0
    let got: Vec<_> = got.into_iter().filter(|a| !(a.sample == 0 && a.code == 22)).collect();
    let pairs: Vec<(f64, f64)> = got.iter().map(|a| (a.sample as f64, a.code as f64)).collect();
    let want: Vec<(f64, f64)> = want[0].iter().copied().zip(want[1].iter().copied()).collect();
    assert_eq!(pairs, want);
    assert_eq!(got.last().unwrap().t, 70000.0 / 360.0);
}

#[test]
fn loaded_record_keeps_beats_only() {
    let rec = load_record(&fixtures(), "fx2").unwrap();
    let samples: Vec<i64> = rec.beats.iter().map(|a| a.sample).collect();
    // codes 28 (rhythm), 16 (artifact), 14 (noise) and the note are dropped
    assert_eq!(samples, vec![10, 200, 1500, 1500, 4999, 70000]);
    assert_eq!(rec.channels.len(), 2);
    assert_eq!(rec.channels[0].len(), 5000);
}

/// Record 100 of the MIT-BIH Arrhythmia Database, when `MITBIH_DIR` points at it.
#[test]
fn mitbih_record_100() {
    let Some(dir) = std::env::var_os("MITBIH_DIR").map(PathBuf::from) else {
        eprintln!("MITBIH_DIR not set, skipping");
        return;
    };
    let rec = load_record(&dir, "100").unwrap();
    assert_eq!(rec.channels[0].len(), 650000);
    assert!((rec.channels[0].samples()[0] + 0.145).abs() < 1e-12);
    assert!((rec.channels[1].samples()[0] + 0.065).abs() < 1e-12);
    assert_eq!(rec.beats.len(), 2273);
}
