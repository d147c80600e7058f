//! QRS-complex detectors.

mod discrepancy;
pub mod filter;
mod pan_tompkins;
mod window;

pub use discrepancy::{detect_qrs_discrepancy, local_discrepancy_grid, local_discrepancy_signal, DiscrepancyDetectorConfig};
pub use pan_tompkins::{pan_tompkins, pan_tompkins_stages, pan_tompkins_with, PanTompkinsConfig, PanTompkinsStages};
pub use window::{moving_average, moving_max};

/// A detected QRS complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    /// Detection time (s).
    pub t: f64,
    /// Detector-specific strength of the detection.
    pub score: f64,
}
