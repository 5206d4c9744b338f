//! Frame-wise fundamental frequency by cumulative-mean-normalized difference
//! (YIN) with parabolic refinement. The difference function is evaluated
//! through an FFT cross-correlation.

use rustfft::num_complex::Complex64;

use super::YIN_THRESHOLD;
use crate::dsp::{segment, Spectral};

/// Mean-square level below which a frame counts as silent.
const SILENCE_POWER: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchEstimate {
    /// Fundamental frequency in Hz.
    pub fo: f64,
    /// Refined period in samples.
    pub period: f64,
    /// Normalized difference at the selected lag.
    pub dip: f64,
}

pub struct PitchTracker {
    sample_rate: f64,
    fo_floor: f64,
    fo_ceil: f64,
    min_lag: usize,
    max_lag: usize,
    window: usize,
    spectral: Spectral,
}

impl PitchTracker {
    pub fn new(sample_rate: u32, fo_floor: f64, fo_ceil: f64) -> Self {
        let fs = sample_rate as f64;
        let max_lag = (fs / fo_floor).ceil() as usize + 1;
        let min_lag = ((fs / fo_ceil).floor() as usize).max(2);
        let window = max_lag;
        let fft = (window + max_lag + 1 + window).next_power_of_two();
        Self {
            sample_rate: fs,
            fo_floor,
            fo_ceil,
            min_lag,
            max_lag,
            window,
            spectral: Spectral::new(fft),
        }
    }

    /// Estimates the fundamental around sample `center`; `None` means unvoiced.
    pub fn estimate(&mut self, x: &[f64], center: isize) -> Option<PitchEstimate> {
        let w = self.window;
        let len = w + self.max_lag + 1;
        let seg = segment(x, center - (len / 2) as isize, len);

        let mut prefix = Vec::with_capacity(len + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for v in &seg {
            acc += v * v;
            prefix.push(acc);
        }
        let energy = |tau: usize| prefix[tau + w] - prefix[tau];
        if energy(0) / (w as f64) < SILENCE_POWER {
            return None;
        }

        let head = self.spectral.forward_real(&seg[..w]);
        let mut full = self.spectral.forward_real(&seg);
        for (f, h) in full.iter_mut().zip(&head) {
            *f *= h.conj();
        }
        self.spectral.inverse(&mut full);
        let scale = 1.0 / self.spectral.len() as f64;
        let corr: Vec<f64> = full[..=self.max_lag]
            .iter()
            .map(|c: &Complex64| c.re * scale)
            .collect();

        let e0 = energy(0);
        let mut cmnd = vec![1.0; self.max_lag + 1];
        let mut running = 0.0;
        for tau in 1..=self.max_lag {
            let d = (e0 + energy(tau) - 2.0 * corr[tau]).max(0.0);
            running += d;
            cmnd[tau] = if running > 0.0 {
                d * tau as f64 / running
            } else {
                1.0
            };
        }

        let mut tau = self.min_lag.max(1);
        while tau < self.max_lag && cmnd[tau] >= YIN_THRESHOLD {
            tau += 1;
        }
        if tau >= self.max_lag {
            return None;
        }
        while tau + 1 < self.max_lag && cmnd[tau + 1] < cmnd[tau] {
            tau += 1;
        }

        let (a, b, c) = (cmnd[tau - 1], cmnd[tau], cmnd[tau + 1]);
        let denom = a - 2.0 * b + c;
        let shift = if denom.abs() > 1e-15 {
            (0.5 * (a - c) / denom).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        let period = tau as f64 + shift;
        let fo = self.sample_rate / period;
        if !(self.fo_floor..=self.fo_ceil).contains(&fo) {
            return None;
        }
        Some(PitchEstimate { fo, period, dip: b })
    }
}

/// Median of the voiced entries of an fo track, skipping `edge` frames at
/// each end. `None` if nothing is voiced.
pub fn median_voiced_fo(fo: &[f64], edge: usize) -> Option<f64> {
    if fo.len() <= 2 * edge {
        return None;
    }
    let mut voiced: Vec<f64> = fo[edge..fo.len() - edge]
        .iter()
        .copied()
        .filter(|&f| f > 0.0)
        .collect();
    if voiced.is_empty() {
        return None;
    }
    voiced.sort_by(f64::total_cmp);
    let m = voiced.len() / 2;
    Some(if voiced.len() % 2 == 1 {
        voiced[m]
    } else {
        0.5 * (voiced[m - 1] + voiced[m])
    })
}
