//! Read-only projections of a session for the UI.

use serde::{Deserialize, Serialize};
use vocmorph_core::{
    AnchorSet, DistanceTrajectory, EditState, NamedParams, ViewState, VocoderParams, Waveform,
};

pub const MAX_SPECTROGRAM_SIDE: usize = 512;
pub const MAX_WAVEFORM_COLUMNS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Canonical,
    Nonlinear,
    /// The non-linear instance resampled onto the canonical axes.
    Warped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub label: String,
    pub sample_rate: u32,
    pub frame_period: f64,
    pub fft_size: usize,
    pub frame_count: usize,
    pub duration: f64,
}

impl InstanceInfo {
    fn of(n: &NamedParams) -> Self {
        let p = &n.params;
        Self {
            label: n.label.clone(),
            sample_rate: p.sample_rate,
            frame_period: p.frame_period,
            fft_size: p.fft_size,
            frame_count: p.frame_count(),
            duration: p.duration(),
        }
    }
}

/// Session snapshot returned by every mutating endpoint.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub canonical: Option<InstanceInfo>,
    pub nonlinear: Option<InstanceInfo>,
    pub anchors: Option<AnchorSet>,
    pub undo_depth: usize,
    pub redo_depth: usize,
    pub view: ViewState,
    pub distance: Option<DistanceTrajectory>,
}

impl SessionView {
    pub fn of(id: &str, st: &EditState) -> Self {
        Self {
            id: id.to_string(),
            canonical: st.canonical.as_ref().map(InstanceInfo::of),
            nonlinear: st.nonlinear.as_ref().map(InstanceInfo::of),
            anchors: st.editor.as_ref().map(|e| e.anchors().clone()),
            undo_depth: st.editor.as_ref().map_or(0, |e| e.undo_stack().len()),
            redo_depth: st.editor.as_ref().map_or(0, |e| e.redo_stack().len()),
            view: st.view,
            distance: st.distance().ok(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrogram {
    pub axis: Axis,
    pub frame_times: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// `db[t][f]`, power in dB.
    pub db: Vec<Vec<f64>>,
    pub db_min: f64,
    pub db_max: f64,
}

/// `m` indices spread evenly over `0..n`, or all of them when `n <= m`.
fn pick(n: usize, m: usize) -> Vec<usize> {
    if n <= m {
        return (0..n).collect();
    }
    (0..m)
        .map(|k| ((k as f64) * (n - 1) as f64 / (m - 1) as f64).round() as usize)
        .collect()
}

pub fn spectrogram(axis: Axis, p: &VocoderParams, fmax: f64) -> Spectrogram {
    let bin_hz = p.bin_width();
    let n_bins = ((fmax / bin_hz + 1e-9).floor() as usize + 1).min(p.bins());
    let frames = pick(p.frame_count(), MAX_SPECTROGRAM_SIDE);
    let bins = pick(n_bins, MAX_SPECTROGRAM_SIDE);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let db: Vec<Vec<f64>> = frames
        .iter()
        .map(|&i| {
            let row = p.envelope_frame(i);
            bins.iter()
                .map(|&b| {
                    let v = 10.0 * row[b].log10();
                    lo = lo.min(v);
                    hi = hi.max(v);
                    v
                })
                .collect()
        })
        .collect();
    Spectrogram {
        axis,
        frame_times: frames.iter().map(|&i| p.frame_time(i)).collect(),
        frequencies: bins.iter().map(|&b| b as f64 * bin_hz).collect(),
        db,
        db_min: lo,
        db_max: hi,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveformView {
    pub axis: Axis,
    pub sample_rate: u32,
    pub duration: f64,
    /// Per-column minimum and maximum sample value.
    pub min: Vec<f32>,
    pub max: Vec<f32>,
}

pub fn waveform(axis: Axis, w: &Waveform, columns: usize) -> WaveformView {
    let columns = columns.clamp(1, MAX_WAVEFORM_COLUMNS).min(w.len().max(1));
    let mut min = Vec::with_capacity(columns);
    let mut max = Vec::with_capacity(columns);
    for c in 0..columns {
        let a = c * w.len() / columns;
        let b = ((c + 1) * w.len() / columns).max(a + 1).min(w.len());
        let seg = &w.samples[a.min(w.len())..b.max(a.min(w.len()))];
        min.push(seg.iter().copied().fold(f64::INFINITY, f64::min).min(0.0) as f32);
        max.push(
            seg.iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
                .max(0.0) as f32,
        );
    }
    WaveformView {
        axis,
        sample_rate: w.sample_rate,
        duration: w.duration(),
        min,
        max,
    }
}
