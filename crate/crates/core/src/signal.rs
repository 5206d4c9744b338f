//! Synthetic test signals with known fundamental frequency.

use std::f64::consts::PI;

use crate::dsp::XorShift64Star;
use crate::params::Waveform;

fn additive(freq: f64, seconds: f64, sample_rate: u32, amp: impl Fn(usize) -> f64) -> Waveform {
    let fs = sample_rate as f64;
    let n = (seconds * fs).round() as usize;
    let harmonics = ((fs / 2.0 - 1.0) / freq).floor().max(1.0) as usize;
    let mut samples = vec![0.0; n];
    for h in 1..=harmonics {
        let a = amp(h);
        if a == 0.0 {
            continue;
        }
        let w = 2.0 * PI * h as f64 * freq / fs;
        for (i, s) in samples.iter_mut().enumerate() {
            *s += a * (w * i as f64).sin();
        }
    }
    Waveform {
        samples,
        sample_rate,
    }
}

/// Band-limited sawtooth with peak amplitude of roughly `level`.
pub fn sawtooth(freq: f64, seconds: f64, sample_rate: u32, level: f64) -> Waveform {
    let scale = level * 2.0 / PI;
    additive(freq, seconds, sample_rate, |h| {
        let sign = if h % 2 == 1 { 1.0 } else { -1.0 };
        sign * scale / h as f64
    })
}

pub fn sine(freq: f64, seconds: f64, sample_rate: u32, level: f64) -> Waveform {
    additive(
        freq,
        seconds,
        sample_rate,
        |h| if h == 1 { level } else { 0.0 },
    )
}

/// Band-limited impulse train (equal-amplitude harmonics), normalized to a
/// peak of `level`.
pub fn pulse_train(freq: f64, seconds: f64, sample_rate: u32, level: f64) -> Waveform {
    let fs = sample_rate as f64;
    let harmonics = ((fs / 2.0 - 1.0) / freq).floor().max(1.0);
    let n = (seconds * fs).round() as usize;
    let w = 2.0 * PI * freq / fs;
    let samples = (0..n)
        .map(|i| {
            let phase = w * i as f64;
            let s: f64 = (1..=harmonics as usize)
                .map(|h| (h as f64 * phase).cos())
                .sum();
            level * s / harmonics
        })
        .collect();
    Waveform {
        samples,
        sample_rate,
    }
}

/// Uniform white noise with standard deviation `level`.
pub fn white_noise(seconds: f64, sample_rate: u32, level: f64, seed: u64) -> Waveform {
    let n = (seconds * sample_rate as f64).round() as usize;
    let mut rng = XorShift64Star::new(seed);
    let samples = (0..n)
        .map(|_| (level * rng.next_noise()).clamp(-1.0, 1.0))
        .collect();
    Waveform {
        samples,
        sample_rate,
    }
}

pub fn silence(seconds: f64, sample_rate: u32) -> Waveform {
    let n = (seconds * sample_rate as f64).round() as usize;
    Waveform {
        samples: vec![0.0; n],
        sample_rate,
    }
}
