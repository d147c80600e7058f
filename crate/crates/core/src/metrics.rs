//! Leaky aggregation, truncation quantization and the spike-train metrics.
//!
//! The weighted Alexiewicz norm of a spike train is
//! `max_n |Σ_{k≤n} e^{−α(t_n − t_k)} s_k|`: the running leaky integral only
//! changes at spike times and decays in magnitude in between, so its supremum
//! is attained at a spike. With `α = 0` it reduces to the classical
//! Alexiewicz norm (maximum absolute prefix sum).

use crate::signal::{HybridSignal, SpikeTrain, UniformSignal};
use crate::{Error, Result};

/// Leaky aggregation `a ⊕ b = e^{−α·gap}·a + b` of two adjacent spike weights.
#[inline]
pub fn oplus(a: f64, b: f64, gap: f64, alpha: f64) -> f64 {
    decay(alpha, gap) * a + b
}

/// Decay factor `e^{−α·gap}`; exactly 1 for `α = 0`.
#[inline]
pub fn decay(alpha: f64, gap: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        (-alpha * gap).exp()
    }
}

/// `∫_0^dt e^{−α(dt − s)} ds`, the weight a constant sample carries into the
/// leaky integral over one grid step. Tends to `dt` as `α → 0`.
#[inline]
pub fn step_weight(alpha: f64, dt: f64) -> f64 {
    if alpha == 0.0 {
        dt
    } else {
        -(-alpha * dt).exp_m1() / alpha
    }
}

/// Integer multiple of `theta` obtained by truncating `z / theta` toward zero.
pub fn trunc_quantize(z: f64, theta: f64) -> Result<f64> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold {theta} must be > 0")));
    }
    Ok(theta * trunc_levels(z, theta))
}

/// `sgn(z/θ)·⌊|z/θ|⌋`, as a float. Quotients within a few ulps of an
/// integer count as that integer, so `trunc_levels(k·θ, θ) = k` even when
/// the product `k·θ` was rounded down.
#[inline]
pub(crate) fn trunc_levels(z: f64, theta: f64) -> f64 {
    let q = z / theta;
    let r = q.round();
    if (q - r).abs() <= 4.0 * f64::EPSILON * r.abs() {
        r
    } else {
        q.trunc()
    }
}

/// Weighted Alexiewicz norm of a spike train.
pub fn alexiewicz_norm(train: &SpikeTrain, alpha: f64) -> f64 {
    let mut acc = 0.0_f64;
    let mut prev_t: Option<f64> = None;
    let mut best = 0.0_f64;
    for s in train {
        acc = match prev_t {
            Some(pt) => oplus(acc, s.amplitude, s.t - pt, alpha),
            None => s.amplitude,
        };
        prev_t = Some(s.t);
        best = best.max(acc.abs());
    }
    best
}

/// `‖a − b‖_{A,α}` computed on the merged difference train.
pub fn alexiewicz_distance(a: &SpikeTrain, b: &SpikeTrain, alpha: f64) -> f64 {
    alexiewicz_norm(&a.difference(b), alpha)
}

/// Largest magnitude of any contiguous partial sum of `amplitudes`.
///
/// Equals `max(P) − min(P)` over the prefix sums `P` including the empty
/// prefix, which makes it a single pass.
pub fn weyl_discrepancy(amplitudes: &[f64]) -> f64 {
    let (mut lo, mut hi, mut acc) = (0.0_f64, 0.0_f64, 0.0_f64);
    for &a in amplitudes {
        acc += a;
        lo = lo.min(acc);
        hi = hi.max(acc);
    }
    hi - lo
}

/// Leaky error integral `err(T) = ∫_0^T e^{−α(T−t)} (train(t) − f(t)) dt`
/// evaluated on the sample grid of `f`.
///
/// Base samples are treated as piecewise constant over the step that ends at
/// them, which makes the recursion exact for such inputs. Spikes and Diracs
/// are placed on the nearest grid index. The grid maximum of `|err|` is a
/// lower bound of the continuous-time supremum at grid resolution.
pub fn err_trajectory(f: &HybridSignal, train: &SpikeTrain, alpha: f64) -> Result<UniformSignal> {
    let base = f.base();
    if base.is_empty() {
        return Err(Error::InvalidInput("error trajectory of an empty signal".into()));
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("leak rate {alpha} must be >= 0")));
    }
    let n = base.len();
    let mut events = vec![0.0; n];
    for s in train {
        let idx = base.nearest_index(s.t).ok_or_else(|| {
            Error::InvalidInput(format!(
                "spike at t={} outside the signal span [{}, {}]",
                s.t,
                base.t0(),
                base.end_time()
            ))
        })?;
        events[idx] += s.amplitude;
    }
    for (idx, w) in f.dirac_weights_per_index() {
        events[idx] -= w;
    }
    let d = decay(alpha, base.dt());
    let w = step_weight(alpha, base.dt());
    let xs = base.samples();
    let mut out = Vec::with_capacity(n);
    let mut err = events[0];
    out.push(err);
    for i in 1..n {
        err = d * err - w * xs[i] + events[i];
        out.push(err);
    }
    Ok(base.with_samples(out))
}
