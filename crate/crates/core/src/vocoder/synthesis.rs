use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::dsp::{Spectral, XorShift64Star};
use crate::error::{Error, Result};
use crate::params::{VocoderParams, Waveform, ENVELOPE_FLOOR};

/// Frames synthesized per parallel batch before overlap-adding.
const BATCH: usize = 64;

#[derive(Debug, Clone, Copy)]
struct Pulse {
    position: f64,
    amplitude: f64,
}

/// Resynthesizes a waveform from vocoder parameters.
///
/// Each frame mixes a pulse train (weight `sqrt(1 - ap)`) with white noise
/// (weight `sqrt(ap)`) bin by bin, filters the mix with the minimum-phase
/// response of the envelope and overlap-adds the result under a Hann
/// crossfade spanning the neighbouring frames. Output is
/// `(frames - 1) * frame_period * sample_rate` samples, hard-limited to
/// `[-1, 1]`, and fully determined by `(p, seed)`.
pub fn synthesize(p: &VocoderParams, seed: u64) -> Result<Waveform> {
    p.validate()?;
    let fs = p.sample_rate as f64;
    let n = p.fft_size;
    let hop = p.frame_period * fs;
    if 2.0 * hop + 2.0 > n as f64 {
        return Err(Error::InvalidParams(format!(
            "frame period {} s is too long for fft size {n}",
            p.frame_period
        )));
    }
    let frames = p.frame_count();
    let out_len = ((frames - 1) as f64 * hop).round() as usize;

    let pulses = pulse_positions(p, hop, out_len);
    // noise covers every sample any frame window can touch
    let lead = hop.ceil() as usize + 1;
    let mut rng = XorShift64Star::new(seed);
    let noise: Vec<f64> = (0..out_len + 2 * lead + 1)
        .map(|_| rng.next_noise())
        .collect();

    let mut out = vec![0.0; out_len + n + 2 * lead];
    let frame_ids: Vec<usize> = (0..frames).collect();
    for batch in frame_ids.chunks(BATCH) {
        let rendered: Vec<(isize, Vec<f64>)> = batch
            .par_iter()
            .map_init(
                || Spectral::new(n),
                |spec, &i| render_frame(spec, p, i, hop, &pulses, &noise, lead),
            )
            .collect();
        for (start, frame) in rendered {
            for (j, v) in frame.into_iter().enumerate() {
                let idx = start + j as isize + lead as isize;
                if idx >= 0 && (idx as usize) < out.len() {
                    out[idx as usize] += v;
                }
            }
        }
    }
    let samples = out[lead..lead + out_len]
        .iter()
        .map(|v| v.clamp(-1.0, 1.0))
        .collect();
    Ok(Waveform {
        samples,
        sample_rate: p.sample_rate,
    })
}

/// fo at fractional frame position: log-linear between voiced neighbours,
/// nearest frame otherwise.
fn fo_at(p: &VocoderParams, pos: f64) -> f64 {
    let last = p.frame_count() - 1;
    let pos = pos.clamp(0.0, last as f64);
    let i = (pos.floor() as usize).min(last);
    let j = (i + 1).min(last);
    let u = pos - i as f64;
    let (a, b) = (p.fo[i], p.fo[j]);
    if a > 0.0 && b > 0.0 {
        (a.ln() + u * (b.ln() - a.ln())).exp()
    } else if u < 0.5 {
        a
    } else {
        b
    }
}

/// Glottal pulse instants from a phase accumulator over the fo track.
fn pulse_positions(p: &VocoderParams, hop: f64, out_len: usize) -> Vec<Pulse> {
    let fs = p.sample_rate as f64;
    let mut pulses = Vec::new();
    let mut phase = 1.0;
    for s in 0..=out_len {
        let fo = fo_at(p, s as f64 / hop);
        if fo <= 0.0 {
            phase = 1.0;
            continue;
        }
        let inc = fo / fs;
        let next = phase + inc;
        if next >= 1.0 {
            pulses.push(Pulse {
                position: s as f64 + (1.0 - phase) / inc,
                amplitude: (fs / fo).sqrt(),
            });
            phase = next - 1.0;
        } else {
            phase = next;
        }
    }
    pulses
}

/// Crossfade weight of frame `center` at sample position `x`.
fn crossfade(x: f64, center: f64, hop: f64) -> f64 {
    let d = (x - center) / hop;
    if d.abs() >= 1.0 {
        0.0
    } else {
        (0.5 * PI * d).cos().powi(2)
    }
}

fn render_frame(
    spec: &mut Spectral,
    p: &VocoderParams,
    i: usize,
    hop: f64,
    pulses: &[Pulse],
    noise: &[f64],
    lead: usize,
) -> (isize, Vec<f64>) {
    let n = p.fft_size;
    let bins = p.bins();
    let center = i as f64 * hop;
    let start = (center - hop).floor() as isize;
    let span = (2.0 * hop).ceil() as usize + 2;

    let windowed_noise: Vec<f64> = (0..span)
        .map(|j| {
            let x = start + j as isize;
            let w = crossfade(x as f64, center, hop);
            let idx = x + lead as isize;
            if w > 0.0 && idx >= 0 && (idx as usize) < noise.len() {
                w * noise[idx as usize]
            } else {
                0.0
            }
        })
        .collect();
    let noise_spec = spec.forward_real(&windowed_noise);
    let filter = spec.minimum_phase(p.envelope_frame(i), ENVELOPE_FLOOR);

    let mut mixed: Vec<Complex64> = vec![Complex64::default(); bins];
    if p.is_voiced(i) {
        let mut pulse_spec = vec![Complex64::default(); bins];
        let lo = pulses.partition_point(|q| q.position <= center - hop);
        for q in pulses[lo..]
            .iter()
            .take_while(|q| q.position < center + hop)
        {
            let a = q.amplitude * crossfade(q.position, center, hop);
            let offset = q.position - start as f64;
            let step = Complex64::from_polar(1.0, -2.0 * PI * offset / n as f64);
            let mut rot = Complex64::new(a, 0.0);
            for v in pulse_spec.iter_mut() {
                *v += rot;
                rot *= step;
            }
        }
        let ap = p.aperiodicity_frame(i);
        for k in 0..bins {
            let src = pulse_spec[k] * (1.0 - ap[k]).sqrt() + noise_spec[k] * ap[k].sqrt();
            mixed[k] = filter[k] * src;
        }
    } else {
        for k in 0..bins {
            mixed[k] = filter[k] * noise_spec[k];
        }
    }
    // bins 0 and n/2 of a real signal's spectrum are real
    mixed[0].im = 0.0;
    mixed[bins - 1].im = 0.0;
    (start, spec.inverse_half(&mixed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(frames: usize, fo: f64, ap: f64) -> VocoderParams {
        let fft_size = 1024;
        let bins = fft_size / 2 + 1;
        VocoderParams {
            sample_rate: 16000,
            frame_period: 0.005,
            fft_size,
            fo: vec![fo; frames],
            envelope: vec![1e-3; frames * bins],
            aperiodicity: vec![ap; frames * bins],
        }
    }

    #[test]
    fn output_length_and_determinism() {
        let p = flat(41, 0.0, 1.0);
        let a = synthesize(&p, 11).unwrap();
        let b = synthesize(&p, 11).unwrap();
        assert_eq!(a.samples.len(), 3200);
        assert!(a
            .samples
            .iter()
            .zip(&b.samples)
            .all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = synthesize(&p, 12).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn noise_level_follows_envelope() {
        // flat power envelope 1e-3 through unit-variance noise -> variance ~1e-3
        let p = flat(201, 0.0, 1.0);
        let w = synthesize(&p, 5).unwrap();
        let var = w.samples.iter().map(|v| v * v).sum::<f64>() / w.samples.len() as f64;
        assert!((var / 1e-3 - 1.0).abs() < 0.15, "{var}");
    }

    #[test]
    fn empty_params_rejected() {
        let mut p = flat(3, 100.0, 0.5);
        p.fo.clear();
        p.envelope.clear();
        p.aperiodicity.clear();
        assert!(matches!(synthesize(&p, 0), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn pulses_follow_fo() {
        let p = flat(201, 100.0, 1e-6);
        let pulses = pulse_positions(&p, 80.0, 16000);
        assert_eq!(pulses.len(), 101);
        let gap = pulses[50].position - pulses[49].position;
        assert!((gap - 160.0).abs() < 1e-6);
    }
}
