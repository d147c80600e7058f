//! Event-based encoding of time-varying signals and spike-domain QRS detection.
//!
//! The crate is organised bottom-up:
//!
//! * [`signal`] holds the value types (spikes, spike trains, uniformly sampled
//!   and Dirac-superimposed signals).
//! * [`metrics`] implements the leaky aggregation `⊕`, truncation quantization,
//!   the weighted Alexiewicz norm and the Weyl discrepancy.
//! * [`lif`] is the leaky integrate-and-fire encoder with its three reset regimes.
//! * [`sod`] is send-on-delta sampling together with normalization and cubic
//!   spline upsampling.
//! * [`qrs`] contains the local-discrepancy detector and a Pan-Tompkins baseline.
//! * [`data`] reads WFDB records and annotations and generates synthetic inputs.
//! * [`harness`] scores detections and runs the quantization-error experiments.

pub mod data;
pub mod error;
pub mod harness;
pub mod lif;
pub mod metrics;
pub mod qrs;
pub mod signal;
pub mod sod;

pub use error::{Error, Result};
pub use lif::{LifConfig, ResetMode};
pub use qrs::Detection;
pub use signal::{HybridSignal, Spike, SpikeTrain, UniformSignal};
pub use sod::SodConfig;

/// Smallest time separation used when several events fall on one sample (1 ns).
pub const TIME_QUANTUM: f64 = 1e-9;
