//! Seeded random inputs shared by tests, the acceptance suite and benches.

use crate::anchors::{AnchorColumn, AnchorSet, FrequencyAnchorPair, MorphInstance};
use crate::dsp::XorShift64Star;
use crate::morph::MorphObject;
use crate::params::VocoderParams;

pub struct Rng(XorShift64Star);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(XorShift64Star::new(seed))
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.next_unit()
    }

    /// Uniform in `lo..hi`.
    pub fn index(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.0.next_u64() % (hi - lo) as u64) as usize
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.0.next_unit() < p
    }

    /// `n` strictly increasing values inside `(0, end)`, separated by at
    /// least `end / (4 (n + 1))`.
    pub fn increasing(&mut self, n: usize, end: f64) -> Vec<f64> {
        let slot = end / (n + 1) as f64;
        (0..n)
            .map(|i| (i as f64 + 1.0) * slot + self.uniform(-0.375, 0.375) * slot)
            .collect()
    }
}

/// Valid random parameters: mixed voicing, log-uniform envelope, wide-range
/// aperiodicity.
pub fn random_params(
    rng: &mut Rng,
    frames: usize,
    sample_rate: u32,
    fft_size: usize,
) -> VocoderParams {
    let bins = fft_size / 2 + 1;
    let fo = (0..frames)
        .map(|_| {
            if rng.chance(0.8) {
                rng.uniform(70.0, 400.0)
            } else {
                0.0
            }
        })
        .collect();
    let envelope = (0..frames * bins)
        .map(|_| 10f64.powf(rng.uniform(-8.0, 0.0)))
        .collect();
    let aperiodicity = (0..frames * bins)
        .map(|_| rng.uniform(0.001, 1.0))
        .collect();
    VocoderParams {
        sample_rate,
        frame_period: 0.005,
        fft_size,
        fo,
        envelope,
        aperiodicity,
    }
}

/// Anchor set with the given shared canonical coordinates and random
/// instance coordinates.
pub fn random_anchors(
    rng: &mut Rng,
    t_canonical: &[f64],
    f_canonical: &[Vec<f64>],
    duration_canonical: f64,
    duration_instance: f64,
    nyquist: f64,
) -> AnchorSet {
    let t_inst = rng.increasing(t_canonical.len(), duration_instance);
    let columns = t_canonical
        .iter()
        .zip(&t_inst)
        .zip(f_canonical)
        .map(|((&tc, &ti), fcs)| {
            let fis = rng.increasing(fcs.len(), nyquist);
            AnchorColumn::new(tc, ti).with_pairs(
                fcs.iter()
                    .zip(&fis)
                    .map(|(&fc, &fi)| FrequencyAnchorPair::new(fc, fi))
                    .collect(),
            )
        })
        .collect();
    AnchorSet {
        columns,
        duration_canonical,
        duration_instance,
        nyquist,
    }
}

/// A valid `k`-instance object with random durations, anchor topology and
/// parameters, canonical index chosen at random.
pub fn random_object(seed: u64, k: usize, fft_size: usize) -> MorphObject {
    let mut rng = Rng::new(seed);
    let sample_rate = 16000;
    let nyquist = sample_rate as f64 / 2.0;
    let frames: Vec<usize> = (0..k).map(|_| rng.index(20, 60)).collect();
    let canonical_index = rng.index(0, k);
    let params: Vec<VocoderParams> = frames
        .iter()
        .map(|&n| random_params(&mut rng, n, sample_rate, fft_size))
        .collect();
    let d_can = params[canonical_index].duration();
    let columns = rng.index(0, 5);
    let tc = rng.increasing(columns, d_can);
    let fc: Vec<Vec<f64>> = (0..columns)
        .map(|_| {
            let n = rng.index(0, 4);
            rng.increasing(n, nyquist)
        })
        .collect();
    let instances = params
        .into_iter()
        .enumerate()
        .map(|(j, p)| {
            let d = p.duration();
            let a = random_anchors(&mut rng, &tc, &fc, d_can, d, nyquist);
            let a = if j == canonical_index {
                a.identity_of()
            } else {
                a
            };
            MorphInstance::new(p, a, format!("instance-{j}")).expect("fixture instance")
        })
        .collect();
    let mut obj = MorphObject::new(instances, canonical_index).expect("fixture object");
    obj.metadata.insert("seed".into(), seed.to_string());
    obj
}
