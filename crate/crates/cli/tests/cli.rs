use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use vocmorph_core::persistence::{read_vocp, write_morph_object, write_vocp};
use vocmorph_core::signal::sawtooth;
use vocmorph_core::wav::{read_wav, write_wav};
use vocmorph_core::{analyze, AnalysisConfig, AnchorSet, MorphObject, WavEncoding};

fn vocmorph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vocmorph"))
        .args(args)
        .output()
        .expect("spawn vocmorph")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn object(dir: &Path) -> std::path::PathBuf {
    let cfg = AnalysisConfig::default();
    let a = analyze(&sawtooth(100.0, 0.4, 16000, 0.4), &cfg).unwrap();
    let b = analyze(&sawtooth(200.0, 0.5, 16000, 0.4), &cfg).unwrap();
    let anchors = AnchorSet::empty(a.duration(), b.duration(), a.nyquist());
    let obj = MorphObject::from_pair(a, "low", b, "high", anchors).unwrap();
    let path = dir.join("pair.morb");
    write_morph_object(&path, &obj).unwrap();
    path
}

#[test]
fn analyze_and_synth() {
    let dir = TempDir::new().unwrap();
    let wav = dir.path().join("in.wav");
    write_wav(&wav, &sawtooth(150.0, 0.5, 16000, 0.4), WavEncoding::Pcm16).unwrap();
    let vocp = dir.path().join("in.vocp");
    let o = vocmorph(&["analyze", s(&wav), "-o", s(&vocp)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let p = read_vocp(&vocp).unwrap();
    assert_eq!(p.sample_rate, 16000);

    let fine = dir.path().join("fine.vocp");
    let o = vocmorph(&[
        "analyze",
        s(&wav),
        "-o",
        s(&fine),
        "--frame-period",
        "0.002",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let ratio = read_vocp(&fine).unwrap().frame_count() as f64 / p.frame_count() as f64;
    assert!((ratio - 2.5).abs() < 0.05, "{ratio}");

    let out = dir.path().join("out.wav");
    let o = vocmorph(&["synth", s(&vocp), "-o", s(&out), "--pcm16"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let w = read_wav(&out).unwrap();
    assert!((w.duration() - 0.5).abs() < 0.02);
}

#[test]
fn missing_input_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.vocp");
    let o = vocmorph(&["analyze", s(&dir.path().join("absent.wav")), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.wav"));
    assert!(!out.exists());

    let o = vocmorph(&["synth", s(&dir.path().join("absent.vocp")), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(2));

    let bogus = dir.path().join("bogus.vocp");
    std::fs::write(&bogus, b"RIFF not a vocp").unwrap();
    let o = vocmorph(&["synth", s(&bogus), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        vocmorph(&["morph", "x.morb", "-o", "y.wav"]).status.code(),
        Some(2)
    );
    assert_eq!(vocmorph(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn rate_zero_matches_first_instance() {
    let dir = TempDir::new().unwrap();
    let morb = object(dir.path());
    let m = dir.path().join("m.wav");
    let o = vocmorph(&["morph", s(&morb), "--rate", "0", "-o", s(&m), "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let obj = vocmorph_core::persistence::read_morph_object(&morb).unwrap();
    let vocp = dir.path().join("first.vocp");
    write_vocp(&vocp, &obj.instances[0].params).unwrap();
    let direct = dir.path().join("direct.wav");
    let o = vocmorph(&["synth", s(&vocp), "-o", s(&direct), "--seed", "7"]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&m).unwrap(), std::fs::read(&direct).unwrap());

    let again = dir.path().join("again.wav");
    vocmorph(&[
        "morph",
        s(&morb),
        "--rate",
        "0",
        "-o",
        s(&again),
        "--seed",
        "7",
    ]);
    assert_eq!(std::fs::read(&m).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn morph_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let morb = object(dir.path());
    let a = dir.path().join("a.wav");
    let b = dir.path().join("b.wav");
    for out in [&a, &b] {
        let o = vocmorph(&[
            "morph",
            s(&morb),
            "--rate",
            "-0.3",
            "-o",
            s(out),
            "--seed",
            "11",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bad_weight_row_is_named() {
    let dir = TempDir::new().unwrap();
    let morb = object(dir.path());
    let w = dir.path().join("w.json");
    std::fs::write(
        &w,
        r#"{"tx":[0.5,0.5],"fx":[0.5,0.5],"sl":[0.5,0.5],"fo":[0.5,0.4],"ap":[0.5,0.5]}"#,
    )
    .unwrap();
    let out = dir.path().join("m.wav");
    let o = vocmorph(&["morph", s(&morb), "--weights", s(&w), "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("'fo'"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn continuum_writes_named_files() {
    let dir = TempDir::new().unwrap();
    let morb = object(dir.path());
    let out = dir.path().join("cont");
    let o = vocmorph(&[
        "continuum",
        s(&morb),
        "--steps",
        "8",
        "--from",
        "-0.2",
        "--to",
        "1.2",
        "-o",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 8);
    assert_eq!(names[0], "00_rate-0.2000.wav");
    assert_eq!(names[7], "07_rate1.2000.wav");

    let o = vocmorph(&[
        "continuum",
        s(&morb),
        "--steps",
        "1",
        "-o",
        s(&dir.path().join("one")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
