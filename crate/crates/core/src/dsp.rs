//! Shared spectral helpers: real FFT wrappers, windows, cepstral smoothing,
//! minimum-phase reconstruction and the seeded noise source.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse transforms of one size, planned once and reused per frame.
pub(crate) struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            scratch: vec![Complex64::default(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Spectrum of a real sequence zero-padded to the transform size.
    pub fn forward_real(&mut self, x: &[f64]) -> Vec<Complex64> {
        debug_assert!(x.len() <= self.n);
        let mut buf = vec![Complex64::default(); self.n];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        self.forward
            .process_with_scratch(&mut buf, &mut self.scratch);
        buf
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.forward.process_with_scratch(buf, &mut self.scratch);
    }

    /// Unnormalized inverse transform in place.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.inverse.process_with_scratch(buf, &mut self.scratch);
    }

    /// Real part of the normalized inverse of a Hermitian half spectrum
    /// (`n / 2 + 1` bins).
    pub fn inverse_half(&mut self, half: &[Complex64]) -> Vec<f64> {
        let n = self.n;
        let mut buf = vec![Complex64::default(); n];
        buf[..half.len()].copy_from_slice(half);
        for k in 1..n / 2 {
            buf[n - k] = half[k].conj();
        }
        self.inverse(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Cepstrally smoothed power spectrum. Quefrencies at or above `cutoff`
    /// samples are discarded. Input and output are half spectra.
    pub fn smooth_power(&mut self, power: &[f64], cutoff: usize, floor: f64) -> Vec<f64> {
        let n = self.n;
        let half = n / 2;
        let mut buf = vec![Complex64::default(); n];
        for k in 0..=half {
            buf[k].re = power[k].max(floor).ln();
        }
        for k in 1..half {
            buf[n - k] = buf[k];
        }
        self.inverse(&mut buf);
        let scale = 1.0 / n as f64;
        for (q, c) in buf.iter_mut().enumerate() {
            let keep = q < cutoff || n - q < cutoff;
            *c = if keep {
                Complex64::new(c.re * scale, 0.0)
            } else {
                Complex64::default()
            };
        }
        self.forward(&mut buf);
        buf[..=half].iter().map(|c| c.re.exp().max(floor)).collect()
    }

    /// Minimum-phase frequency response whose squared magnitude follows the
    /// given power half spectrum.
    pub fn minimum_phase(&mut self, power: &[f64], floor: f64) -> Vec<Complex64> {
        let n = self.n;
        let half = n / 2;
        let mut buf = vec![Complex64::default(); n];
        for k in 0..=half {
            buf[k].re = 0.5 * power[k].max(floor).ln();
        }
        for k in 1..half {
            buf[n - k] = buf[k];
        }
        self.inverse(&mut buf);
        let scale = 1.0 / n as f64;
        // fold the real cepstrum onto positive quefrencies
        for (q, v) in buf.iter_mut().enumerate() {
            let c = v.re * scale;
            let folded = if q == 0 || q == half {
                c
            } else if q < half {
                2.0 * c
            } else {
                0.0
            };
            *v = Complex64::new(folded, 0.0);
        }
        self.forward(&mut buf);
        buf[..=half].iter().map(|c| c.exp()).collect()
    }
}

/// Linear-phase low-pass (Blackman-windowed sinc) applied by FFT
/// convolution. Output is aligned with the input.
pub(crate) fn lowpass(x: &[f64], sample_rate: f64, cutoff: f64, taps: usize) -> Vec<f64> {
    let taps = taps | 1;
    let half = (taps / 2) as isize;
    let fc = cutoff / sample_rate;
    let kernel: Vec<f64> = (0..taps)
        .map(|i| {
            let m = i as isize - half;
            let sinc = if m == 0 {
                2.0 * fc
            } else {
                (2.0 * PI * fc * m as f64).sin() / (PI * m as f64)
            };
            let r = i as f64 / (taps - 1) as f64;
            let blackman = 0.42 - 0.5 * (2.0 * PI * r).cos() + 0.08 * (4.0 * PI * r).cos();
            sinc * blackman
        })
        .collect();
    let n = (x.len() + taps).next_power_of_two();
    let mut fft = Spectral::new(n);
    let xs = fft.forward_real(x);
    let ks = fft.forward_real(&kernel);
    let mut prod: Vec<Complex64> = xs.iter().zip(&ks).map(|(a, b)| a * b).collect();
    fft.inverse(&mut prod);
    let scale = 1.0 / n as f64;
    prod[half as usize..half as usize + x.len()]
        .iter()
        .map(|c| c.re * scale)
        .collect()
}

/// Symmetric Hann window.
pub(crate) fn hann(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (len - 1) as f64).cos())
        .collect()
}

/// Copies `len` samples starting at `start` (which may lie outside the
/// signal), zero-filling anything out of bounds.
pub(crate) fn segment(x: &[f64], start: isize, len: usize) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let j = start + i as isize;
            if j >= 0 && (j as usize) < x.len() {
                x[j as usize]
            } else {
                0.0
            }
        })
        .collect()
}

/// xorshift64* generator. The seed is scrambled with splitmix64 so that
/// any value, including zero, gives a valid nonzero state.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        Self {
            state: if z == 0 { 0x2545_F491_4F6C_DD1D } else { z },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Zero-mean, unit-variance uniform sample.
    pub fn next_noise(&mut self) -> f64 {
        (2.0 * self.next_unit() - 1.0) * 3f64.sqrt()
    }
}

/// Linear interpolation positions closer than this to an integer are snapped.
pub(crate) const SNAP_EPS: f64 = 1e-9;

/// Splits a fractional index into `(base, frac)` clamped to `[0, len - 1]`,
/// snapping near-integers so coincident grids read values verbatim.
pub(crate) fn split_position(pos: f64, len: usize) -> (usize, f64) {
    let last = (len - 1) as f64;
    let p = pos.clamp(0.0, last);
    let r = p.round();
    if (p - r).abs() <= SNAP_EPS * r.max(1.0) {
        return (r as usize, 0.0);
    }
    let base = p.floor();
    (base as usize, p - base)
}

/// Reads `row[pos]` with linear interpolation.
pub(crate) fn sample_linear(row: &[f64], pos: f64) -> f64 {
    let (i, frac) = split_position(pos, row.len());
    if frac == 0.0 {
        row[i]
    } else {
        row[i] + frac * (row[i + 1] - row[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xorshift_is_deterministic_and_centered() {
        let mut a = XorShift64Star::new(7);
        let mut b = XorShift64Star::new(7);
        let xs: Vec<f64> = (0..20000).map(|_| a.next_noise()).collect();
        let ys: Vec<f64> = (0..20000).map(|_| b.next_noise()).collect();
        assert_eq!(xs, ys);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
        assert_ne!(XorShift64Star::new(0).next_u64(), 0);
    }

    #[test]
    fn minimum_phase_matches_magnitude() {
        let mut s = Spectral::new(64);
        let power: Vec<f64> = (0..=32)
            .map(|k| 1.0 + (k as f64 / 5.0).sin().powi(2))
            .collect();
        let h = s.minimum_phase(&power, 1e-12);
        for (hk, pk) in h.iter().zip(&power) {
            assert!((hk.norm_sqr() - pk).abs() < 1e-9 * pk);
        }
        // minimum-phase impulse response concentrates energy at the start
        let ir = s.inverse_half(&h);
        let head: f64 = ir[..16].iter().map(|v| v * v).sum();
        let total: f64 = ir.iter().map(|v| v * v).sum();
        assert!(head / total > 0.95);
    }

    #[test]
    fn smoothing_flat_spectrum_is_identity() {
        let mut s = Spectral::new(32);
        let out = s.smooth_power(&[2.5; 17], 4, 1e-12);
        for v in out {
            assert!((v - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn lowpass_keeps_low_and_removes_high() {
        let fs = 16000.0;
        let tone = |f: f64| -> Vec<f64> {
            (0..4000)
                .map(|i| (2.0 * PI * f * i as f64 / fs).sin())
                .collect()
        };
        let rms = |v: &[f64]| (v[1000..3000].iter().map(|x| x * x).sum::<f64>() / 2000.0).sqrt();
        let low = lowpass(&tone(200.0), fs, 1000.0, 255);
        let high = lowpass(&tone(4000.0), fs, 1000.0, 255);
        assert!((rms(&low) - 0.5f64.sqrt()).abs() < 0.01);
        assert!(rms(&high) < 1e-3);
        // zero delay
        let src = tone(200.0);
        assert!((low[2000] - src[2000]).abs() < 0.02);
    }

    #[test]
    fn split_position_snaps() {
        assert_eq!(split_position(3.0 + 1e-12, 10), (3, 0.0));
        let (i, f) = split_position(2.5, 10);
        assert_eq!(i, 2);
        assert!((f - 0.5).abs() < 1e-15);
        assert_eq!(split_position(42.0, 10), (9, 0.0));
        assert_eq!(sample_linear(&[1.0, 3.0], 0.25), 1.5);
    }
}
