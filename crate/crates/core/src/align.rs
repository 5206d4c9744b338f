//! Log-spectral distance between the canonical envelope and a warped
//! instance's envelope, frame by frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{VocoderParams, ENVELOPE_FLOOR};

/// Default upper frequency of the distance band.
pub const DEFAULT_METRIC_LIMIT_HZ: f64 = 6000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceTrajectory {
    pub frame_times: Vec<f64>,
    /// RMS dB difference per frame.
    pub per_frame: Vec<f64>,
    pub mean: f64,
}

/// RMS over bins up to `f_limit` of the dB difference between the two
/// envelopes. Both parameter sets must share the frame grid.
pub fn alignment_distance(
    canonical: &VocoderParams,
    warped: &VocoderParams,
    f_limit: f64,
) -> Result<DistanceTrajectory> {
    if canonical.frame_count() != warped.frame_count() {
        return Err(Error::GridMismatch(format!(
            "{} vs {} frames",
            canonical.frame_count(),
            warped.frame_count()
        )));
    }
    if canonical.fft_size != warped.fft_size || canonical.sample_rate != warped.sample_rate {
        return Err(Error::GridMismatch(format!(
            "fft size {}/{} at {}/{} Hz",
            canonical.fft_size, warped.fft_size, canonical.sample_rate, warped.sample_rate
        )));
    }
    if !(f_limit > 0.0 && f_limit <= canonical.nyquist()) {
        return Err(Error::OutOfRange(format!(
            "frequency limit {f_limit} outside (0, {}]",
            canonical.nyquist()
        )));
    }
    let bin_hz = canonical.bin_width();
    // bins at or below the limit
    let used = ((f_limit / bin_hz + 1e-9).floor() as usize + 1).min(canonical.bins());

    let per_frame: Vec<f64> = (0..canonical.frame_count())
        .map(|i| {
            let a = &canonical.envelope_frame(i)[..used];
            let b = &warped.envelope_frame(i)[..used];
            let sum: f64 = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| {
                    let (x, y) = (x.max(ENVELOPE_FLOOR), y.max(ENVELOPE_FLOOR));
                    let ratio = if x >= y { x / y } else { y / x };
                    let db = 10.0 * ratio.log10();
                    db * db
                })
                .sum();
            (sum / used as f64).sqrt()
        })
        .collect();
    let mean = per_frame.iter().sum::<f64>() / per_frame.len() as f64;
    Ok(DistanceTrajectory {
        frame_times: canonical.frame_times(),
        per_frame,
        mean,
    })
}
