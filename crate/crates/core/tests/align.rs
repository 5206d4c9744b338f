use proptest::prelude::*;
use vocmorph_core::fixtures::{random_params, Rng};
use vocmorph_core::{
    alignment_distance, resample_to_canonical, AnchorColumn, AnchorSet, Error, FrequencyAnchorPair,
    MorphInstance, VocoderParams,
};

fn peak_params(frames: usize, fft: usize, peak_hz: f64) -> VocoderParams {
    let bins = fft / 2 + 1;
    let bin_hz = 16000.0 / fft as f64;
    VocoderParams {
        sample_rate: 16000,
        frame_period: 0.005,
        fft_size: fft,
        fo: vec![120.0; frames],
        envelope: (0..frames * bins)
            .map(|k| {
                let f = (k % bins) as f64 * bin_hz;
                1e-4 + (-((f - peak_hz) / 150.0).powi(2)).exp()
            })
            .collect(),
        aperiodicity: vec![0.1; frames * bins],
    }
}

proptest! {
    #[test]
    fn distance_is_symmetric(seed in any::<u64>(), limit in 100.0f64..8000.0) {
        let mut rng = Rng::new(seed);
        let a = random_params(&mut rng, 12, 16000, 64);
        let b = random_params(&mut rng, 12, 16000, 64);
        let ab = alignment_distance(&a, &b, limit).unwrap();
        let ba = alignment_distance(&b, &a, limit).unwrap();
        prop_assert_eq!(&ab.per_frame, &ba.per_frame);
        prop_assert!(ab.per_frame.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn raising_the_limit_keeps_lower_bins(seed in any::<u64>(), lo in 100.0f64..4000.0, extra in 1.0f64..4000.0) {
        let mut rng = Rng::new(seed);
        let a = random_params(&mut rng, 8, 16000, 64);
        let b = random_params(&mut rng, 8, 16000, 64);
        let hi = (lo + extra).min(8000.0);
        let bin_hz = a.bin_width();
        let n_lo = (lo / bin_hz + 1e-9).floor() as usize + 1;
        let n_hi = (hi / bin_hz + 1e-9).floor() as usize + 1;
        let d_lo = alignment_distance(&a, &b, lo).unwrap();
        let d_hi = alignment_distance(&a, &b, hi).unwrap();
        // scrambling bins above the old limit leaves the old distance untouched
        let mut c = b.clone();
        let bins = c.bins();
        for (k, e) in c.envelope.iter_mut().enumerate() {
            if k % bins >= n_lo {
                *e *= 7.0;
            }
        }
        let d_lo2 = alignment_distance(&a, &c, lo).unwrap();
        prop_assert_eq!(&d_lo.per_frame, &d_lo2.per_frame);
        for (x, y) in d_lo.per_frame.iter().zip(&d_hi.per_frame) {
            prop_assert!(y * y * n_hi as f64 >= x * x * n_lo as f64 * (1.0 - 1e-12));
        }
    }
}

#[test]
fn identity_and_uniform_offset() {
    let mut rng = Rng::new(3);
    let a = random_params(&mut rng, 30, 16000, 128);
    let d = alignment_distance(&a, &a, 6000.0).unwrap();
    assert!(d.per_frame.iter().all(|&v| v == 0.0));
    assert_eq!(d.mean, 0.0);
    assert_eq!(d.frame_times, a.frame_times());

    let mut b = a.clone();
    b.envelope.iter_mut().for_each(|e| *e *= 10.0);
    let d = alignment_distance(&a, &b, 6000.0).unwrap();
    assert!(d.per_frame.iter().all(|&v| v == 10.0), "{:?}", d.per_frame);
    let mean: f64 = d.per_frame.iter().sum::<f64>() / d.per_frame.len() as f64;
    assert!((d.mean - mean).abs() < 1e-12);
}

#[test]
fn mismatched_grids() {
    let mut rng = Rng::new(4);
    let a = random_params(&mut rng, 10, 16000, 64);
    let b = random_params(&mut rng, 11, 16000, 64);
    assert!(matches!(
        alignment_distance(&a, &b, 4000.0),
        Err(Error::GridMismatch(_))
    ));
    assert!(matches!(
        alignment_distance(&a, &a, 9000.0),
        Err(Error::OutOfRange(_))
    ));
}

#[test]
fn sweep_finds_matching_peaks() {
    let fft = 512;
    let canon = peak_params(9, fft, 1000.0);
    let inst = peak_params(9, fft, 1500.0);
    let d = canon.duration();
    // the anchor and two flanking pairs move together, a pure shift around the peak
    let sweep: Vec<f64> = (0..=20).map(|i| 1000.0 + 50.0 * i as f64).collect();
    let dist: Vec<f64> = sweep
        .iter()
        .map(|&fi| {
            let a = AnchorSet {
                columns: vec![AnchorColumn::new(d / 2.0, d / 2.0).with_pairs(vec![
                    FrequencyAnchorPair::new(600.0, fi - 400.0),
                    FrequencyAnchorPair::new(1000.0, fi),
                    FrequencyAnchorPair::new(1400.0, fi + 400.0),
                ])],
                duration_canonical: d,
                duration_instance: d,
                nyquist: 8000.0,
            };
            let w = resample_to_canonical(
                &MorphInstance::new(inst.clone(), a, "i").unwrap(),
                &canon.frame_times(),
            )
            .unwrap();
            alignment_distance(&canon, &w, 4000.0).unwrap().mean
        })
        .collect();
    let best = (0..dist.len())
        .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
        .unwrap();
    assert_eq!(sweep[best], 1500.0, "{dist:?}");
    assert!(dist[..=best].windows(2).all(|p| p[1] < p[0]), "{dist:?}");
}
