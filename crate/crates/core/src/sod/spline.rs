//! Natural cubic spline on a uniform grid.

use crate::signal::UniformSignal;
use crate::{Error, Result};

/// Second derivatives `M_i` of the natural cubic spline through `y` with unit
/// knot spacing (`M_0 = M_{n−1} = 0`).
///
/// Interior equations `M_{i−1} + 4M_i + M_{i+1} = 6(y_{i+1} − 2y_i + y_{i−1})`
/// are solved with the Thomas algorithm.
fn natural_second_derivatives(y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let k = n - 2;
    let mut c = vec![0.0; k];
    let mut d = vec![0.0; k];
    for j in 0..k {
        let i = j + 1;
        let rhs = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
        if j == 0 {
            c[j] = 1.0 / 4.0;
            d[j] = rhs / 4.0;
        } else {
            let denom = 4.0 - c[j - 1];
            c[j] = 1.0 / denom;
            d[j] = (rhs - d[j - 1]) / denom;
        }
    }
    m[k] = d[k - 1];
    for j in (0..k - 1).rev() {
        m[j + 1] = d[j] - c[j] * m[j + 2];
    }
    m
}

/// Upsamples by an integer factor with a natural cubic spline.
///
/// The output grid has period `dt / factor`, spans the same interval as the
/// input and passes through every input sample.
pub fn upsample_cubic(x: &UniformSignal, factor: usize) -> Result<UniformSignal> {
    if factor == 0 {
        return Err(Error::InvalidParameter("upsampling factor must be >= 1".into()));
    }
    if x.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "cubic spline needs at least 4 samples, got {}",
            x.len()
        )));
    }
    if factor == 1 {
        return Ok(x.clone());
    }
    let y = x.samples();
    let m = natural_second_derivatives(y);
    let n = y.len();
    let mut out = Vec::with_capacity((n - 1) * factor + 1);
    let fac = factor as f64;
    for i in 0..n - 1 {
        let (y0, y1, m0, m1) = (y[i], y[i + 1], m[i], m[i + 1]);
        out.push(y0);
        for j in 1..factor {
            let s = j as f64 / fac;
            let r = 1.0 - s;
            out.push(r * y0 + s * y1 + ((r * r * r - r) * m0 + (s * s * s - s) * m1) / 6.0);
        }
    }
    out.push(y[n - 1]);
    UniformSignal::new(x.t0(), x.dt() / fac, out)
}
