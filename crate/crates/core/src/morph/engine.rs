use rayon::prelude::*;

use super::{check_weights_k, Attribute, MorphObject, RowWeights, WeightMatrix};
use crate::anchors::{frame_at, frequency_pairs_at};
use crate::dsp::sample_linear;
use crate::error::{Error, Result};
use crate::params::{VocoderParams, Waveform};
use crate::vocoder::synthesize;

use super::rate_to_weights;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorphOptions {
    /// Extrapolated fo below this (and below every input fo) is clamped.
    pub fo_floor: f64,
    /// Extrapolated fo above this (and above every input fo) is clamped.
    pub fo_ceil: f64,
}

impl Default for MorphOptions {
    fn default() -> Self {
        Self {
            fo_floor: 60.0,
            fo_ceil: 600.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphOutcome {
    pub params: VocoderParams,
    /// Number of values clamped back into range after extrapolation.
    pub clamped: usize,
}

/// Segment index and fraction of `x` along increasing knots. Exact knot hits
/// report a zero fraction.
fn locate(knots: &[f64], x: f64) -> (usize, f64) {
    match knots.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => (i, 0.0),
        Err(0) => (0, 0.0),
        Err(i) if i >= knots.len() => (knots.len() - 1, 0.0),
        Err(i) => (i - 1, (x - knots[i - 1]) / (knots[i] - knots[i - 1])),
    }
}

fn along(knots: &[f64], (s, u): (usize, f64)) -> f64 {
    if u == 0.0 {
        knots[s]
    } else {
        knots[s] + u * (knots[s + 1] - knots[s])
    }
}

/// Morphs segment lengths between consecutive knots in the log domain and
/// accumulates them. A unit weight row returns that instance's knots.
fn morph_knots(knots: &[Vec<f64>], row: &RowWeights, attr: Attribute) -> (Vec<f64>, usize) {
    if let Some(j) = row.unit {
        return (knots[j].clone(), 0);
    }
    let n = knots[0].len();
    let mut out = Vec::with_capacity(n);
    let mut clamped = 0;
    out.push(knots[0][0]);
    let mut acc = knots[0][0];
    for s in 0..n - 1 {
        let (gap, c) = row.blend(attr, knots.iter().map(|k| k[s + 1] - k[s]));
        clamped += c as usize;
        acc += gap;
        out.push(acc);
    }
    (out, clamped)
}

fn instance_time_knots(obj: &MorphObject) -> Result<Vec<Vec<f64>>> {
    let knots: Vec<Vec<f64>> = obj
        .instances
        .iter()
        .map(|i| i.anchors.time_knots().1)
        .collect();
    if knots.iter().any(|k| k.len() != knots[0].len()) {
        return Err(Error::AnchorTopologyMismatch(
            "instances carry different numbers of temporal anchors".into(),
        ));
    }
    Ok(knots)
}

/// Morphed temporal anchor times, boundaries included. Segment durations
/// are blended as `exp(sum w_k ln d_k)`, so the result increases strictly
/// for any weights summing to one.
pub fn morph_time_axis(obj: &MorphObject, w_tx: &[f64]) -> Result<Vec<f64>> {
    let knots = instance_time_knots(obj)?;
    check_weights_k(Attribute::Tx, w_tx, knots.len())?;
    Ok(morph_knots(&knots, &RowWeights::new(w_tx), Attribute::Tx).0)
}

/// Each instance's frequency knots (0 and nyquist included) at a canonical time.
fn instance_frequency_knots(obj: &MorphObject, t_canonical: f64) -> Result<Vec<Vec<f64>>> {
    let nyquist = obj.canonical().params.nyquist();
    let mut out = Vec::with_capacity(obj.len());
    for inst in &obj.instances {
        let pairs = frequency_pairs_at(&inst.anchors, t_canonical)?;
        let mut fk = Vec::with_capacity(pairs.len() + 2);
        fk.push(0.0);
        fk.extend(pairs.iter().map(|p| p.f_instance));
        fk.push(nyquist);
        out.push(fk);
    }
    if out.iter().any(|f| f.len() != out[0].len()) {
        return Err(Error::AnchorTopologyMismatch(format!(
            "instances disagree on frequency anchor count at {t_canonical} s"
        )));
    }
    Ok(out)
}

/// Frequency gaps are blended like durations; since they are blended
/// independently, the axis is rescaled afterwards to end at nyquist.
fn morph_frequency_knots(knots: &[Vec<f64>], row: &RowWeights, nyquist: f64) -> (Vec<f64>, usize) {
    let (mut target, clamped) = morph_knots(knots, row, Attribute::Fx);
    if row.unit.is_none() {
        let end = *target.last().unwrap();
        let last = target.len() - 1;
        for f in target.iter_mut() {
            *f *= nyquist / end;
        }
        target[last] = nyquist;
    }
    (target, clamped)
}

/// Morphed frequency anchor positions, with 0 and nyquist, at a canonical time.
pub fn morph_frequency_axis(obj: &MorphObject, w_fx: &[f64], t_canonical: f64) -> Result<Vec<f64>> {
    obj.validate()?;
    check_weights_k(Attribute::Fx, w_fx, obj.len())?;
    let knots = instance_frequency_knots(obj, t_canonical)?;
    let nyquist = obj.canonical().params.nyquist();
    Ok(morph_frequency_knots(&knots, &RowWeights::new(w_fx), nyquist).0)
}

/// One rendered frame: fo, envelope, aperiodicity and the clamp count.
type Frame = (f64, Vec<f64>, Vec<f64>, usize);

/// Morph with default options.
pub fn morph(obj: &MorphObject, w: &WeightMatrix) -> Result<VocoderParams> {
    morph_with(obj, w, &MorphOptions::default()).map(|o| o.params)
}

/// Produces morphed vocoder parameters on the morphed time axis.
///
/// Output frames sit at the canonical frame period. For every frame each
/// instance is read at its own warped time, its spectra are resampled onto
/// the morphed frequency axis, and envelope (log), aperiodicity (logit)
/// and fo (log, voiced instances only, weights renormalized) are blended.
/// A frame is voiced when the fo-weighted vote of voiced instances
/// reaches one half.
pub fn morph_with(
    obj: &MorphObject,
    w: &WeightMatrix,
    opts: &MorphOptions,
) -> Result<MorphOutcome> {
    obj.validate()?;
    let k = obj.len();
    w.validate(k)?;
    let time_knots = instance_time_knots(obj)?;
    let (morphed_knots, mut clamped) =
        morph_knots(&time_knots, &RowWeights::new(&w.tx), Attribute::Tx);
    let canon = obj.canonical();
    let canonical_knots = canon.anchors.time_knots().0;

    let cp = &canon.params;
    let frame_period = cp.frame_period;
    let duration = *morphed_knots.last().expect("at least two knots");
    let frames = (duration / frame_period + 1e-9).floor() as usize + 1;
    let bins = cp.bins();
    let bin_hz = cp.bin_width();
    let nyquist = cp.nyquist();

    let fx = RowWeights::new(&w.fx);
    let sl = RowWeights::new(&w.sl);
    let ap = RowWeights::new(&w.ap);
    let fo_row = RowWeights::new(&w.fo);

    let rendered: Vec<Result<Frame>> = (0..frames)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 * frame_period).min(duration);
            let at = locate(&morphed_knots, t);
            let t_canonical =
                along(&canonical_knots, at).clamp(0.0, canon.anchors.duration_canonical);

            let mut fos = Vec::with_capacity(k);
            let mut envs = Vec::with_capacity(k);
            let mut aps = Vec::with_capacity(k);
            for (inst, knots) in obj.instances.iter().zip(&time_knots) {
                let t_inst = along(knots, at);
                let (f0, env, a) = frame_at(&inst.params, t_inst / inst.params.frame_period);
                fos.push(f0);
                envs.push(env);
                aps.push(a);
            }
            let freq_knots = instance_frequency_knots(obj, t_canonical)?;
            let (target, mut clamped) = morph_frequency_knots(&freq_knots, &fx, nyquist);

            let warped: Vec<(Vec<f64>, Vec<f64>)> = if freq_knots.iter().all(|f| *f == target) {
                envs.into_iter().zip(aps).collect()
            } else {
                envs.iter()
                    .zip(&aps)
                    .zip(&freq_knots)
                    .map(|((env, a), fk)| {
                        let mut e_out = Vec::with_capacity(bins);
                        let mut a_out = Vec::with_capacity(bins);
                        for b in 0..bins {
                            let f = (b as f64 * bin_hz).min(nyquist);
                            let src = along(fk, locate(&target, f)) / bin_hz;
                            e_out.push(sample_linear(env, src));
                            a_out.push(sample_linear(a, src));
                        }
                        (e_out, a_out)
                    })
                    .collect()
            };

            let mut envelope = Vec::with_capacity(bins);
            let mut aperiodicity = Vec::with_capacity(bins);
            for b in 0..bins {
                let (e, c1) = sl.blend(Attribute::Sl, warped.iter().map(|(e, _)| e[b]));
                let (a, c2) = ap.blend(Attribute::Ap, warped.iter().map(|(_, a)| a[b]));
                envelope.push(e);
                aperiodicity.push(a);
                clamped += c1 as usize + c2 as usize;
            }

            let (fo, c) = blend_fo(&fos, &fo_row, opts, nyquist);
            clamped += c as usize;
            Ok((fo, envelope, aperiodicity, clamped))
        })
        .collect();

    let mut fo = Vec::with_capacity(frames);
    let mut envelope = Vec::with_capacity(frames * bins);
    let mut aperiodicity = Vec::with_capacity(frames * bins);
    for r in rendered {
        let (f, e, a, c) = r?;
        fo.push(f);
        envelope.extend(e);
        aperiodicity.extend(a);
        clamped += c;
    }
    let params = VocoderParams {
        sample_rate: cp.sample_rate,
        frame_period,
        fft_size: cp.fft_size,
        fo,
        envelope,
        aperiodicity,
    };
    params.validate()?;
    Ok(MorphOutcome { params, clamped })
}

/// Weighted voicing vote, then a log-domain blend over voiced instances.
fn blend_fo(fos: &[f64], row: &RowWeights, opts: &MorphOptions, nyquist: f64) -> (f64, bool) {
    if let Some(j) = row.unit {
        return (fos[j], false);
    }
    let vote: f64 = fos
        .iter()
        .zip(row.weights)
        .filter(|(f, _)| **f > 0.0)
        .map(|(_, w)| w)
        .sum();
    if vote < 0.5 {
        return (0.0, false);
    }
    let (xs, ws): (Vec<f64>, Vec<f64>) = fos
        .iter()
        .zip(row.weights)
        .filter(|(f, _)| **f > 0.0)
        .map(|(f, w)| (*f, w / vote))
        .unzip();
    let sub = RowWeights::new(&ws);
    let (v, _) = sub.blend(Attribute::Fo, xs.iter().copied());
    let lo = xs.iter().copied().fold(opts.fo_floor, f64::min);
    let hi = xs
        .iter()
        .copied()
        .fold(opts.fo_ceil, f64::max)
        .min(nyquist * (1.0 - 1e-9));
    if v < lo {
        (lo, true)
    } else if v > hi {
        (hi, true)
    } else {
        (v, false)
    }
}

/// Synthesizes one stimulus per morphing rate between the two instances
/// of `obj`. Results keep the order of `rates`.
pub fn continuum(obj: &MorphObject, rates: &[f64], seed: u64) -> Result<Vec<Waveform>> {
    if obj.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "a continuum needs exactly two instances, object has {}",
            obj.len()
        )));
    }
    if let Some(r) = rates.iter().find(|r| !r.is_finite()) {
        return Err(Error::InvalidInput(format!("rate {r} is not finite")));
    }
    rates
        .par_iter()
        .map(|&r| synthesize(&morph(obj, &rate_to_weights(r))?, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_and_along() {
        let k = [0.0, 0.5, 1.0];
        assert_eq!(locate(&k, 0.5), (1, 0.0));
        assert_eq!(locate(&k, 1.0), (2, 0.0));
        let at = locate(&k, 0.25);
        assert_eq!(at, (0, 0.5));
        assert_eq!(along(&[0.0, 0.7, 1.0], at), 0.35);
    }
}
