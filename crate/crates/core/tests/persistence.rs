use vocmorph_core::editor::rebase;
use vocmorph_core::fixtures::{random_object, random_params, Rng};
use vocmorph_core::persistence::{
    morph_object_from_bytes, morph_object_to_bytes, read_edit_state, read_morph_object, read_vocp,
    restore_edit_state, save_edit_state, vocp_from_bytes, vocp_to_bytes, write_edit_state,
    write_morph_object, write_vocp,
};
use vocmorph_core::signal::sawtooth;
use vocmorph_core::{
    analyze, AnalysisConfig, AnchorColumn, AnchorEdit, AnchorSet, EditState, Error, MorphObject,
    NamedParams, VocoderParams,
};

fn same_bits(a: &VocoderParams, b: &VocoderParams) -> bool {
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    a.sample_rate == b.sample_rate
        && a.frame_period.to_bits() == b.frame_period.to_bits()
        && a.fft_size == b.fft_size
        && bits(&a.fo) == bits(&b.fo)
        && bits(&a.envelope) == bits(&b.envelope)
        && bits(&a.aperiodicity) == bits(&b.aperiodicity)
}

fn edit_state(seed: u64) -> EditState {
    let obj = random_object(seed, 2, 16);
    let mut st = EditState::default();
    let c = obj.canonical().clone();
    let n = obj.instances[1 - obj.canonical_index].clone();
    st.load(true, NamedParams::new(c.label, c.params)).unwrap();
    st.load(false, NamedParams::new(n.label, n.params)).unwrap();
    st.editor
        .as_mut()
        .unwrap()
        .replace(n.anchors.clone())
        .unwrap();
    let e = st.editor.as_mut().unwrap();
    let d = n.anchors.duration_canonical;
    let _ = e.apply(&AnchorEdit::PlaceTemporal {
        t_canonical: d * 0.123,
        t_instance: None,
    });
    e.undo();
    st
}

#[test]
fn vocp_round_trip_of_analysis() {
    let p = analyze(
        &sawtooth(180.0, 0.3, 16000, 0.5),
        &AnalysisConfig::default(),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.vocp");
    write_vocp(&path, &p).unwrap();
    assert!(same_bits(&read_vocp(&path).unwrap(), &p));
}

#[test]
fn round_trips_are_bit_identical() {
    for seed in 0..100u64 {
        let mut rng = Rng::new(seed);
        let frames = rng.index(1, 30);
        let p = random_params(&mut rng, frames, 16000, 16);
        let b = vocp_to_bytes(&p).unwrap();
        let back = vocp_from_bytes(&b).unwrap();
        assert!(same_bits(&p, &back));
        assert_eq!(vocp_to_bytes(&back).unwrap(), b);

        let obj = random_object(seed, 2 + (seed % 3) as usize, 16);
        let b = morph_object_to_bytes(&obj).unwrap();
        let back = morph_object_from_bytes(&b).unwrap();
        assert_eq!(back, obj);
        assert_eq!(morph_object_to_bytes(&back).unwrap(), b);

        let st = edit_state(seed);
        let b = save_edit_state(&st).unwrap();
        let back = restore_edit_state(&b).unwrap();
        assert_eq!(back, st);
        assert_eq!(save_edit_state(&back).unwrap(), b);
    }
}

#[test]
fn byte_flips_give_typed_errors() {
    let mut rng = Rng::new(99);
    let p = random_params(&mut rng, 6, 16000, 16);
    let files = [
        vocp_to_bytes(&p).unwrap(),
        morph_object_to_bytes(&random_object(5, 3, 16)).unwrap(),
        save_edit_state(&edit_state(6)).unwrap(),
    ];
    for i in 0..300 {
        for (kind, f) in files.iter().enumerate() {
            let mut b = f.clone();
            let at = rng.index(0, b.len());
            b[at] ^= 1 << rng.index(0, 8);
            if rng.chance(0.2) {
                b.truncate(rng.index(0, b.len()));
            }
            // any Result is fine; a panic fails the test
            let _ = match kind {
                0 => vocp_from_bytes(&b).map(|_| ()),
                1 => morph_object_from_bytes(&b).map(|_| ()),
                _ => restore_edit_state(&b).map(|_| ()),
            };
            let _ = i;
        }
    }
}

#[test]
fn vocp_negative_cases() {
    let mut rng = Rng::new(1);
    let b = vocp_to_bytes(&random_params(&mut rng, 4, 16000, 16)).unwrap();
    let mut m = b.clone();
    m[1] = b'x';
    assert!(matches!(vocp_from_bytes(&m), Err(Error::NotAVocpFile)));
    assert!(matches!(
        vocp_from_bytes(&b[..b.len() - 8]),
        Err(Error::CorruptFile(_))
    ));
    let mut nan = b.clone();
    nan[48..56].copy_from_slice(&f64::NAN.to_le_bytes());
    assert!(matches!(vocp_from_bytes(&nan), Err(Error::CorruptFile(_))));
}

#[test]
fn object_files() {
    let obj = random_object(21, 3, 16);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.morb");
    write_morph_object(&path, &obj).unwrap();
    let back = read_morph_object(&path).unwrap();
    assert_eq!(back.canonical_index, obj.canonical_index);
    assert_eq!(back, obj);

    // a column whose instance time runs backwards
    let mut v: serde_json::Value =
        serde_json::from_slice(&morph_object_to_bytes(&obj).unwrap()).unwrap();
    let j = (obj.canonical_index + 1) % 3;
    let cols = v["instances"][j]["anchors"]["columns"]
        .as_array_mut()
        .unwrap();
    if cols.len() < 2 {
        cols.clear();
        cols.push(serde_json::json!({"t_canonical": 0.02, "t_instance": 0.05, "freq_anchors": []}));
        cols.push(serde_json::json!({"t_canonical": 0.04, "t_instance": 0.03, "freq_anchors": []}));
    } else {
        let t = cols[0]["t_instance"].clone();
        cols[0]["t_instance"] = cols[1]["t_instance"].clone();
        cols[1]["t_instance"] = t;
    }
    let bad = serde_json::to_vec(&v).unwrap();
    assert!(matches!(
        morph_object_from_bytes(&bad),
        Err(Error::InvalidObjectFile(_))
    ));

    v["schema_version"] = 9.into();
    let bad = serde_json::to_vec(&v).unwrap();
    assert!(matches!(
        morph_object_from_bytes(&bad),
        Err(Error::UnsupportedVersion(_))
    ));
    assert!(matches!(
        morph_object_from_bytes(b"{"),
        Err(Error::CorruptFile(_))
    ));
}

fn two_instances() -> EditState {
    let mut rng = Rng::new(8);
    let a = random_params(&mut rng, 101, 16000, 16);
    let b = random_params(&mut rng, 81, 16000, 16);
    let mut st = EditState::default();
    st.load(true, NamedParams::new("a", a)).unwrap();
    st.load(false, NamedParams::new("b", b)).unwrap();
    st
}

#[test]
fn edit_state_restore_resumes_history() {
    let mut st = two_instances();
    let e = st.editor.as_mut().unwrap();
    for t in [0.1, 0.2, 0.3] {
        e.apply(&AnchorEdit::PlaceTemporal {
            t_canonical: t,
            t_instance: None,
        })
        .unwrap();
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.medit");
    write_edit_state(&path, &st).unwrap();
    let mut back = read_edit_state(&path).unwrap();
    let times: Vec<f64> = back
        .editor
        .as_ref()
        .unwrap()
        .anchors()
        .columns
        .iter()
        .map(|c| c.t_canonical)
        .collect();
    assert_eq!(times, vec![0.1, 0.2, 0.3]);
    assert!(back.editor.as_mut().unwrap().undo());
    let times: Vec<f64> = back
        .editor
        .as_ref()
        .unwrap()
        .anchors()
        .columns
        .iter()
        .map(|c| c.t_canonical)
        .collect();
    assert_eq!(times, vec![0.1, 0.2]);

    let mut v: serde_json::Value = serde_json::from_slice(&save_edit_state(&st).unwrap()).unwrap();
    v["nonlinear"] = serde_json::Value::Null;
    assert!(matches!(
        restore_edit_state(&serde_json::to_vec(&v).unwrap()),
        Err(Error::CorruptFile(_))
    ));
    v["schema_version"] = 2.into();
    assert!(matches!(
        restore_edit_state(&serde_json::to_vec(&v).unwrap()),
        Err(Error::UnsupportedVersion(_))
    ));
}

/// Envelope peak sweeping upward over time, so misaligned time warps show.
fn sweep_params(frames: usize, peak_at: impl Fn(f64) -> f64) -> VocoderParams {
    let fft = 128;
    let bins = fft / 2 + 1;
    let bin_hz = 16000.0 / fft as f64;
    VocoderParams {
        sample_rate: 16000,
        frame_period: 0.005,
        fft_size: fft,
        fo: vec![150.0; frames],
        envelope: (0..frames * bins)
            .map(|k| {
                let t = (k / bins) as f64 * 0.005;
                let f = (k % bins) as f64 * bin_hz;
                1e-4 + (-((f - peak_at(t)) / 300.0).powi(2)).exp()
            })
            .collect(),
        aperiodicity: vec![0.1; frames * bins],
    }
}

#[test]
fn rebase_self_and_stretched() {
    let peak = |t: f64| 500.0 + 3000.0 * t;
    let p = sweep_params(201, peak);
    let anchors = AnchorSet {
        columns: vec![AnchorColumn::new(0.5, 0.5)],
        duration_canonical: 1.0,
        duration_instance: 1.0,
        nyquist: 8000.0,
    };
    let obj = MorphObject::from_pair(p.clone(), "orig", p.clone(), "copy", anchors).unwrap();

    let st = rebase(NamedParams::new("self", p.clone()), &obj).unwrap();
    assert!(st
        .distance()
        .unwrap()
        .per_frame
        .iter()
        .all(|&d| d.abs() < 1e-9));

    // first half slowed to twice its length
    let q = sweep_params(301, |tau| {
        peak(if tau <= 1.0 { tau * 0.5 } else { tau - 0.5 })
    });
    let mut st = rebase(NamedParams::new("stretched", q), &obj).unwrap();
    let col = &st.editor.as_ref().unwrap().anchors().columns[0];
    assert!((col.t_canonical - 0.75).abs() < 1e-12 && col.t_instance == 0.5);
    let before = st.distance().unwrap().mean;
    st.editor
        .as_mut()
        .unwrap()
        .apply(&AnchorEdit::MoveTemporal {
            column: 0,
            t_canonical: Some(1.0),
            t_instance: None,
        })
        .unwrap();
    let after = st.distance().unwrap().mean;
    assert!(before > 1.0 && after < 0.2 * before, "{before} -> {after}");

    let mut other_rate = p.clone();
    other_rate.sample_rate = 22050;
    assert!(matches!(
        rebase(NamedParams::new("x", other_rate), &obj),
        Err(Error::RateMismatch(..))
    ));
}
