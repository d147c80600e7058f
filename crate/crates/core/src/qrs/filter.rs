//! Butterworth band-pass designed by bilinear transform, run as a cascade of
//! second-order sections.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::{Error, Result};

/// One direct-form-II-transposed biquad, `a0` normalised to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    fn response(&self, z_inv: Complex64) -> Complex64 {
        let num = self.b[0] + z_inv * (self.b[1] + z_inv * self.b[2]);
        let den = self.a[0] + z_inv * (self.a[1] + z_inv * self.a[2]);
        num / den
    }

    fn dc_gain(&self) -> f64 {
        self.b.iter().sum::<f64>() / self.a.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandPass {
    sections: Vec<Biquad>,
    fs: f64,
}

impl BandPass {
    /// Band-pass whose analog low-pass prototype has order `order`; the
    /// resulting filter has `2·order` poles.
    pub fn butterworth(order: usize, low_hz: f64, high_hz: f64, fs: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("filter order must be >= 1".into()));
        }
        if !(0.0 < low_hz && low_hz < high_hz && high_hz < fs / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "band {low_hz}-{high_hz} Hz does not fit below Nyquist at {fs} Hz"
            )));
        }
        // pre-warped analog band edges
        let k = 2.0 * fs;
        let w1 = k * (PI * low_hz / fs).tan();
        let w2 = k * (PI * high_hz / fs).tan();
        let bw = w2 - w1;
        let w0sq = w1 * w2;

        let mut poles: Vec<Complex64> = Vec::with_capacity(2 * order);
        for i in 0..order {
            let theta = PI * (2 * i + order + 1) as f64 / (2 * order) as f64;
            let p = Complex64::from_polar(1.0, theta);
            // s² − p·bw·s + w0² = 0
            let half = p * bw / 2.0;
            let disc = (half * half - w0sq).sqrt();
            for s in [half + disc, half - disc] {
                poles.push((k + s) / (k - s));
            }
        }
        // keep one pole of each conjugate pair (upper half plane)
        let mut upper: Vec<Complex64> = poles.into_iter().filter(|p| p.im > 0.0).collect();
        upper.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        if upper.len() != order {
            return Err(Error::InvalidParameter("band too narrow for a stable design".into()));
        }
        let mut sections: Vec<Biquad> = upper
            .iter()
            .map(|p| Biquad { b: [1.0, 0.0, -1.0], a: [1.0, -2.0 * p.re, p.norm_sqr()] })
            .collect();

        // unit gain at the geometric centre of the band
        let centre = 2.0 * ((w0sq.sqrt() / k).atan());
        let z_inv = Complex64::from_polar(1.0, -centre);
        let g: Complex64 = sections.iter().map(|s| s.response(z_inv)).product();
        let scale = g.norm().recip().powf(1.0 / order as f64);
        for s in &mut sections {
            for b in &mut s.b {
                *b *= scale;
            }
        }
        Ok(BandPass { sections, fs })
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// Magnitude response at `hz`.
    pub fn gain(&self, hz: f64) -> f64 {
        let z_inv = Complex64::from_polar(1.0, -2.0 * PI * hz / self.fs);
        self.sections.iter().map(|s| s.response(z_inv)).product::<Complex64>().norm()
    }

    /// Group delay in samples at `hz`, by central difference of the phase.
    pub fn group_delay(&self, hz: f64) -> f64 {
        let h = 1e-4;
        let phase = |f: f64| {
            let z_inv = Complex64::from_polar(1.0, -2.0 * PI * f / self.fs);
            self.sections.iter().map(|s| s.response(z_inv).arg()).sum::<f64>()
        };
        let unwrap = |mut d: f64| {
            while d > PI {
                d -= 2.0 * PI;
            }
            while d < -PI {
                d += 2.0 * PI;
            }
            d
        };
        let dphi = unwrap(phase(hz + h) - phase(hz - h));
        -dphi / (2.0 * PI * 2.0 * h / self.fs)
    }

    /// Causal forward filtering. The state starts in steady state for a
    /// constant input equal to the first sample, so a DC offset produces no
    /// start-up transient.
    pub fn filter(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        let mut level = x.first().copied().unwrap_or(0.0);
        for s in &self.sections {
            let out_level = level * s.dc_gain();
            let mut z2 = s.b[2] * level - s.a[2] * out_level;
            let mut z1 = s.b[1] * level - s.a[1] * out_level + z2;
            for v in y.iter_mut() {
                let xin = *v;
                let out = s.b[0] * xin + z1;
                z1 = s.b[1] * xin - s.a[1] * out + z2;
                z2 = s.b[2] * xin - s.a[2] * out;
                *v = out;
            }
            level = out_level;
        }
        y
    }
}
