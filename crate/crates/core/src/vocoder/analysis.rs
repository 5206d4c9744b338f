use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::pitch::PitchTracker;
use super::AP_BANDS;
use crate::dsp::{hann, lowpass, segment, Spectral};
use crate::error::{Error, Result};
use crate::params::{
    AnalysisConfig, VocoderParams, Waveform, AP_FLOOR, ENVELOPE_FLOOR, MIN_SAMPLE_RATE,
};

/// Lowest aperiodicity band edge; the first band extends down to DC.
const AP_LOW_EDGE_HZ: f64 = 100.0;
/// Pitch tracking runs on the signal band-limited to this many Hz (at
/// least twice `fo_ceil`).
const PITCH_BAND_HZ: f64 = 1000.0;

/// Decomposes a mono waveform into fo, spectral envelope and aperiodicity.
///
/// Frames sit at multiples of `cfg.frame_period`, so a signal of duration
/// `d` yields `floor(d / frame_period) + 1` frames.
pub fn analyze(w: &Waveform, cfg: &AnalysisConfig) -> Result<VocoderParams> {
    if w.samples.is_empty() {
        return Err(Error::InvalidInput("empty waveform".into()));
    }
    if w.sample_rate < MIN_SAMPLE_RATE {
        return Err(Error::UnsupportedRate(w.sample_rate));
    }
    if let Some(i) = w.samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::InvalidInput(format!("sample {i} is not finite")));
    }
    cfg.validate(w.sample_rate)?;

    let fs = w.sample_rate as f64;
    let fft_size = cfg.fft_size_for(w.sample_rate);
    let frames = (w.duration() / cfg.frame_period + 1e-9).floor() as usize + 1;
    let bins = fft_size / 2 + 1;
    let setup = FrameSetup::new(w.sample_rate, cfg, fft_size);
    let band = PITCH_BAND_HZ.max(2.0 * cfg.fo_ceil).min(0.45 * fs);
    let taps = (6.0 * fs / (0.5 * band)).ceil() as usize;
    let pitch_signal = lowpass(&w.samples, fs, band, taps);

    let results: Vec<FrameResult> = (0..frames)
        .into_par_iter()
        .map_init(
            || FrameAnalyzer::new(&setup, w.sample_rate, cfg),
            |fa, i| {
                let center = (i as f64 * cfg.frame_period * fs).round() as isize;
                fa.analyze_frame(&w.samples, &pitch_signal, center)
            },
        )
        .collect();

    let mut fo = Vec::with_capacity(frames);
    let mut envelope = Vec::with_capacity(frames * bins);
    let mut aperiodicity = Vec::with_capacity(frames * bins);
    for r in results {
        fo.push(r.fo);
        envelope.extend_from_slice(&r.envelope);
        aperiodicity.extend_from_slice(&r.aperiodicity);
    }
    let params = VocoderParams {
        sample_rate: w.sample_rate,
        frame_period: cfg.frame_period,
        fft_size,
        fo,
        envelope,
        aperiodicity,
    };
    debug_assert!(params.validate().is_ok());
    Ok(params)
}

/// Per-analysis constants shared by all worker threads.
struct FrameSetup {
    fft_size: usize,
    window: Vec<f64>,
    window_power: f64,
    sample_rate: f64,
    /// Cepstral cutoff for unvoiced frames, in samples.
    lifter: usize,
    /// Band index for each bin range and the bin-domain band centers.
    band_edges: Vec<usize>,
    band_centers: Vec<f64>,
}

impl FrameSetup {
    fn new(sample_rate: u32, cfg: &AnalysisConfig, fft_size: usize) -> Self {
        let fs = sample_rate as f64;
        let win_len = ((3.0 * fs / cfg.fo_floor).round() as usize).min(fft_size);
        let window = hann(win_len);
        let window_power = window.iter().map(|v| v * v).sum();
        let lifter = (fs / (2.0 * cfg.fo_floor)).floor() as usize;

        let nyquist = fs / 2.0;
        let bin_hz = fs / fft_size as f64;
        let bins = fft_size / 2 + 1;
        let ratio = nyquist / AP_LOW_EDGE_HZ;
        let edge_hz: Vec<f64> = (0..=AP_BANDS)
            .map(|i| AP_LOW_EDGE_HZ * ratio.powf(i as f64 / AP_BANDS as f64))
            .collect();
        let mut band_edges: Vec<usize> = edge_hz
            .iter()
            .map(|f| ((f / bin_hz).round() as usize).min(bins))
            .collect();
        band_edges[0] = 0;
        band_edges[AP_BANDS] = bins;
        let band_centers = (0..AP_BANDS)
            .map(|b| {
                let lo = if b == 0 {
                    AP_LOW_EDGE_HZ / 2.0
                } else {
                    edge_hz[b]
                };
                (lo * edge_hz[b + 1]).sqrt() / bin_hz
            })
            .collect();
        Self {
            fft_size,
            window,
            window_power,
            sample_rate: fs,
            lifter,
            band_edges,
            band_centers,
        }
    }
}

struct FrameResult {
    fo: f64,
    envelope: Vec<f64>,
    aperiodicity: Vec<f64>,
}

struct FrameAnalyzer<'a> {
    setup: &'a FrameSetup,
    pitch: PitchTracker,
    spectral: Spectral,
}

impl<'a> FrameAnalyzer<'a> {
    fn new(setup: &'a FrameSetup, sample_rate: u32, cfg: &AnalysisConfig) -> Self {
        Self {
            setup,
            pitch: PitchTracker::new(sample_rate, cfg.fo_floor, cfg.fo_ceil),
            spectral: Spectral::new(setup.fft_size),
        }
    }

    fn windowed_spectrum(&mut self, x: &[f64], center: isize) -> Vec<Complex64> {
        let win = &self.setup.window;
        let start = center - (win.len() / 2) as isize;
        let mut seg = segment(x, start, win.len());
        for (s, w) in seg.iter_mut().zip(win) {
            *s *= w;
        }
        self.spectral.forward_real(&seg)
    }

    fn analyze_frame(&mut self, x: &[f64], pitch_signal: &[f64], center: isize) -> FrameResult {
        let bins = self.setup.fft_size / 2 + 1;
        let pitch = self.pitch.estimate(pitch_signal, center);
        let spec = self.windowed_spectrum(x, center);
        let power: Vec<f64> = spec[..bins]
            .iter()
            .map(|c| c.norm_sqr() / self.setup.window_power)
            .collect();
        // voiced frames lifter below half the pitch period to drop harmonic ripple
        let lifter = match pitch {
            Some(est) => ((self.setup.sample_rate / (2.0 * est.fo)).floor() as usize).max(1),
            None => self.setup.lifter,
        };
        let envelope = self.spectral.smooth_power(&power, lifter, ENVELOPE_FLOOR);

        let (fo, aperiodicity) = match pitch {
            Some(est) => (est.fo, self.aperiodicity(x, center, est.period, &spec)),
            None => (0.0, vec![1.0; bins]),
        };
        FrameResult {
            fo,
            envelope,
            aperiodicity,
        }
    }

    /// Ratio of the one-period prediction residual to the total power,
    /// per band, interpolated over bins.
    fn aperiodicity(
        &mut self,
        x: &[f64],
        center: isize,
        period: f64,
        here: &[Complex64],
    ) -> Vec<f64> {
        let n = self.setup.fft_size;
        let bins = n / 2 + 1;
        let whole = period.round();
        let frac = period - whole;
        let ahead = self.windowed_spectrum(x, center + whole as isize);

        let mut residual = vec![0.0; bins];
        let mut total = vec![0.0; bins];
        for k in 0..bins {
            let shift = Complex64::from_polar(1.0, 2.0 * PI * k as f64 * frac / n as f64);
            residual[k] = (here[k] - ahead[k] * shift).norm_sqr();
            total[k] = here[k].norm_sqr() + ahead[k].norm_sqr();
        }

        let edges = &self.setup.band_edges;
        let ratios: Vec<f64> = (0..AP_BANDS)
            .map(|b| {
                let (lo, hi) = (edges[b], edges[b + 1]);
                let r: f64 = residual[lo..hi].iter().sum();
                let t: f64 = total[lo..hi].iter().sum();
                if t > 1e-20 {
                    (r / t).clamp(AP_FLOOR, 1.0)
                } else {
                    1.0
                }
            })
            .collect();

        let centers = &self.setup.band_centers;
        (0..bins)
            .map(|k| {
                let k = k as f64;
                if k <= centers[0] {
                    return ratios[0];
                }
                if k >= centers[AP_BANDS - 1] {
                    return ratios[AP_BANDS - 1];
                }
                let b = centers.iter().rposition(|&c| c <= k).unwrap_or(0);
                let u = (k - centers[b]) / (centers[b + 1] - centers[b]);
                (ratios[b] + u * (ratios[b + 1] - ratios[b])).clamp(AP_FLOOR, 1.0)
            })
            .collect()
    }
}
