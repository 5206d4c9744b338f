//! Waveforms, vocoder parameter streams and analysis settings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower clamp for aperiodicity ratios.
pub const AP_FLOOR: f64 = 1e-6;
/// Lower clamp applied to envelope power before any logarithm.
pub const ENVELOPE_FLOOR: f64 = 1e-12;
/// Lowest sample rate accepted for analysis.
pub const MIN_SAMPLE_RATE: u32 = 8000;

/// A monaural signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidInput(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Frame-synchronous vocoder parameters.
///
/// `envelope` and `aperiodicity` are stored row-major, one row of
/// `fft_size / 2 + 1` bins per frame. An `fo` of `0.0` marks an unvoiced frame.
#[derive(Debug, Clone, PartialEq)]
pub struct VocoderParams {
    pub sample_rate: u32,
    pub frame_period: f64,
    pub fft_size: usize,
    pub fo: Vec<f64>,
    pub envelope: Vec<f64>,
    pub aperiodicity: Vec<f64>,
}

impl VocoderParams {
    pub fn bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn frame_count(&self) -> usize {
        self.fo.len()
    }

    /// Time spanned from the first to the last frame.
    pub fn duration(&self) -> f64 {
        self.frame_count().saturating_sub(1) as f64 * self.frame_period
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate as f64 / 2.0
    }

    pub fn bin_width(&self) -> f64 {
        self.sample_rate as f64 / self.fft_size as f64
    }

    pub fn frame_time(&self, i: usize) -> f64 {
        i as f64 * self.frame_period
    }

    pub fn frame_times(&self) -> Vec<f64> {
        (0..self.frame_count())
            .map(|i| self.frame_time(i))
            .collect()
    }

    pub fn envelope_frame(&self, i: usize) -> &[f64] {
        let b = self.bins();
        &self.envelope[i * b..(i + 1) * b]
    }

    pub fn aperiodicity_frame(&self, i: usize) -> &[f64] {
        let b = self.bins();
        &self.aperiodicity[i * b..(i + 1) * b]
    }

    pub fn is_voiced(&self, i: usize) -> bool {
        self.fo[i] > 0.0
    }

    /// Checks every structural and range invariant.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.sample_rate == 0 {
            return bad("sample rate must be positive".into());
        }
        if !(self.frame_period.is_finite() && self.frame_period > 0.0) {
            return bad(format!(
                "frame period {} must be positive",
                self.frame_period
            ));
        }
        if self.fft_size < 2 || !self.fft_size.is_multiple_of(2) {
            return bad(format!("fft size {} must be even and >= 2", self.fft_size));
        }
        let frames = self.fo.len();
        if frames == 0 {
            return bad("no frames".into());
        }
        let expected = frames
            .checked_mul(self.bins())
            .ok_or_else(|| Error::InvalidParams("frame count overflow".into()))?;
        if self.envelope.len() != expected || self.aperiodicity.len() != expected {
            return bad(format!(
                "expected {expected} envelope/aperiodicity values, got {}/{}",
                self.envelope.len(),
                self.aperiodicity.len()
            ));
        }
        let nyquist = self.nyquist();
        if let Some(i) = self
            .fo
            .iter()
            .position(|&f| !(f == 0.0 || (f.is_finite() && f > 0.0 && f < nyquist)))
        {
            return bad(format!(
                "fo[{i}] = {} is neither 0 nor a valid frequency",
                self.fo[i]
            ));
        }
        if let Some(i) = self
            .envelope
            .iter()
            .position(|&e| !(e.is_finite() && e > 0.0))
        {
            return bad(format!(
                "envelope value {i} = {} is not positive",
                self.envelope[i]
            ));
        }
        if let Some(i) = self
            .aperiodicity
            .iter()
            .position(|&a| !(a.is_finite() && (AP_FLOOR..=1.0).contains(&a)))
        {
            return bad(format!(
                "aperiodicity value {i} = {} outside [{AP_FLOOR}, 1]",
                self.aperiodicity[i]
            ));
        }
        Ok(())
    }
}

/// Analysis settings. `fft_size = None` picks the smallest power of two
/// covering three periods of `fo_floor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub frame_period: f64,
    pub fo_floor: f64,
    pub fo_ceil: f64,
    pub fft_size: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            frame_period: 0.005,
            fo_floor: 60.0,
            fo_ceil: 600.0,
            fft_size: None,
        }
    }
}

impl AnalysisConfig {
    pub fn fft_size_for(&self, sample_rate: u32) -> usize {
        self.fft_size.unwrap_or_else(|| {
            let min = (3.0 * sample_rate as f64 / self.fo_floor).ceil() as usize;
            min.next_power_of_two()
        })
    }

    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.frame_period.is_finite() && self.frame_period > 0.0) {
            return Err(Error::InvalidInput(format!(
                "frame period {} must be positive",
                self.frame_period
            )));
        }
        if !(self.fo_floor > 0.0 && self.fo_floor < self.fo_ceil && self.fo_ceil < nyquist) {
            return Err(Error::InvalidInput(format!(
                "need 0 < fo_floor ({}) < fo_ceil ({}) < nyquist ({nyquist})",
                self.fo_floor, self.fo_ceil
            )));
        }
        if let Some(n) = self.fft_size {
            let window = (3.0 * sample_rate as f64 / self.fo_floor).round() as usize;
            if n % 2 != 0 || n < window {
                return Err(Error::InvalidInput(format!(
                    "fft size {n} must be even and at least the analysis window ({window})"
                )));
            }
        }
        Ok(())
    }
}
