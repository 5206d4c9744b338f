//! Classical vocoder: analysis into fo / spectral envelope / aperiodicity
//! streams and resynthesis from them.

mod analysis;
mod pitch;
mod synthesis;

pub use analysis::analyze;
pub use pitch::{median_voiced_fo, PitchTracker};
pub use synthesis::synthesize;

/// YIN threshold on the cumulative-mean-normalized difference.
pub const YIN_THRESHOLD: f64 = 0.15;

/// Number of log-spaced aperiodicity bands.
pub const AP_BANDS: usize = 8;
