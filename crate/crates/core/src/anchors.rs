//! Temporal and frequency anchors and the piecewise-linear axis warps they
//! define between the canonical axis and an instance's own axis.
//!
//! Boundary correspondences are implicit: `(0, 0)` and
//! `(duration_canonical, duration_instance)` in time, `(0, 0)` and
//! `(nyquist, nyquist)` in frequency.

use serde::{Deserialize, Serialize};

use crate::dsp::sample_linear;
use crate::error::{Error, Result};
use crate::params::VocoderParams;

/// Relative slack allowed when checking that a time lies inside an utterance.
const RANGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyAnchorPair {
    pub f_canonical: f64,
    pub f_instance: f64,
}

impl FrequencyAnchorPair {
    pub fn new(f_canonical: f64, f_instance: f64) -> Self {
        Self {
            f_canonical,
            f_instance,
        }
    }
}

/// A temporal anchor with the frequency anchors attached to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorColumn {
    pub t_canonical: f64,
    pub t_instance: f64,
    #[serde(default)]
    pub freq_anchors: Vec<FrequencyAnchorPair>,
}

impl AnchorColumn {
    pub fn new(t_canonical: f64, t_instance: f64) -> Self {
        Self {
            t_canonical,
            t_instance,
            freq_anchors: Vec::new(),
        }
    }

    pub fn with_pairs(mut self, pairs: Vec<FrequencyAnchorPair>) -> Self {
        self.freq_anchors = pairs;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorSet {
    pub columns: Vec<AnchorColumn>,
    pub duration_canonical: f64,
    pub duration_instance: f64,
    pub nyquist: f64,
}

fn check_pairs(pairs: &[FrequencyAnchorPair], nyquist: f64) -> Result<()> {
    for p in pairs {
        for f in [p.f_canonical, p.f_instance] {
            if !(f.is_finite() && f > 0.0 && f < nyquist) {
                return Err(Error::OutOfRange(format!(
                    "frequency anchor {f} Hz outside (0, {nyquist})"
                )));
            }
        }
    }
    for w in pairs.windows(2) {
        if !(w[1].f_canonical > w[0].f_canonical && w[1].f_instance > w[0].f_instance) {
            return Err(Error::InvalidAnchors(format!(
                "frequency anchors ({}, {}) and ({}, {}) are not strictly increasing",
                w[0].f_canonical, w[0].f_instance, w[1].f_canonical, w[1].f_instance
            )));
        }
    }
    Ok(())
}

/// Piecewise-linear map through `(xs[i], ys[i])`. Knots map exactly.
fn piecewise(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match xs.binary_search_by(|v| v.total_cmp(&x)) {
        Ok(i) => ys[i],
        Err(0) => ys[0],
        Err(i) if i >= xs.len() => ys[xs.len() - 1],
        Err(i) => {
            let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
            y0 + (x - x0) * (y1 - y0) / (x1 - x0)
        }
    }
}

impl AnchorSet {
    /// No anchors: identity-shaped warp between the two durations.
    pub fn empty(duration_canonical: f64, duration_instance: f64, nyquist: f64) -> Self {
        Self {
            columns: Vec::new(),
            duration_canonical,
            duration_instance,
            nyquist,
        }
    }

    /// Checks ranges (`OutOfRange`) and monotonicity (`InvalidAnchors`).
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("canonical duration", self.duration_canonical),
            ("instance duration", self.duration_instance),
            ("nyquist", self.nyquist),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::OutOfRange(format!("{name} {v} must be positive")));
            }
        }
        for c in &self.columns {
            if !(c.t_canonical.is_finite()
                && c.t_canonical > 0.0
                && c.t_canonical < self.duration_canonical)
            {
                return Err(Error::OutOfRange(format!(
                    "canonical anchor time {} outside (0, {})",
                    c.t_canonical, self.duration_canonical
                )));
            }
            if !(c.t_instance.is_finite()
                && c.t_instance > 0.0
                && c.t_instance < self.duration_instance)
            {
                return Err(Error::OutOfRange(format!(
                    "instance anchor time {} outside (0, {})",
                    c.t_instance, self.duration_instance
                )));
            }
            check_pairs(&c.freq_anchors, self.nyquist)?;
        }
        for w in self.columns.windows(2) {
            if !(w[1].t_canonical > w[0].t_canonical && w[1].t_instance > w[0].t_instance) {
                return Err(Error::InvalidAnchors(format!(
                    "temporal anchors ({}, {}) and ({}, {}) are not strictly increasing",
                    w[0].t_canonical, w[0].t_instance, w[1].t_canonical, w[1].t_instance
                )));
            }
        }
        Ok(())
    }

    /// Knots of the time warp including the virtual boundary points.
    pub fn time_knots(&self) -> (Vec<f64>, Vec<f64>) {
        let mut can = Vec::with_capacity(self.columns.len() + 2);
        let mut inst = Vec::with_capacity(self.columns.len() + 2);
        can.push(0.0);
        inst.push(0.0);
        for c in &self.columns {
            can.push(c.t_canonical);
            inst.push(c.t_instance);
        }
        can.push(self.duration_canonical);
        inst.push(self.duration_instance);
        (can, inst)
    }

    fn check_time(&self, t: f64, duration: f64) -> Result<f64> {
        if !t.is_finite() || t < -RANGE_EPS * duration || t > duration * (1.0 + RANGE_EPS) {
            return Err(Error::OutOfRange(format!(
                "time {t} outside [0, {duration}]"
            )));
        }
        Ok(t.clamp(0.0, duration))
    }

    /// Canonical time to instance time.
    pub fn warp_time(&self, t_canonical: f64) -> Result<f64> {
        let t = self.check_time(t_canonical, self.duration_canonical)?;
        let (can, inst) = self.time_knots();
        Ok(piecewise(&can, &inst, t))
    }

    /// Instance time to canonical time.
    pub fn unwarp_time(&self, t_instance: f64) -> Result<f64> {
        let t = self.check_time(t_instance, self.duration_instance)?;
        let (can, inst) = self.time_knots();
        Ok(piecewise(&inst, &can, t))
    }

    /// Same columns with both sides set to the canonical coordinates.
    pub fn identity_of(&self) -> AnchorSet {
        AnchorSet {
            columns: self
                .columns
                .iter()
                .map(|c| AnchorColumn {
                    t_canonical: c.t_canonical,
                    t_instance: c.t_canonical,
                    freq_anchors: c
                        .freq_anchors
                        .iter()
                        .map(|p| FrequencyAnchorPair::new(p.f_canonical, p.f_canonical))
                        .collect(),
                })
                .collect(),
            duration_canonical: self.duration_canonical,
            duration_instance: self.duration_canonical,
            nyquist: self.nyquist,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.duration_canonical == self.duration_instance
            && self.columns.iter().all(|c| {
                c.t_canonical == c.t_instance
                    && c.freq_anchors.iter().all(|p| p.f_canonical == p.f_instance)
            })
    }
}

/// Frequency anchors in effect at a canonical time.
///
/// Exact column hits return that column's pairs. Between two columns with
/// the same number of pairs the pair coordinates are interpolated linearly
/// in time; with differing counts the nearer column wins (the earlier on a
/// tie). Outside the first/last column the end column's pairs hold.
pub fn frequency_pairs_at(a: &AnchorSet, t_canonical: f64) -> Result<Vec<FrequencyAnchorPair>> {
    let t = a.check_time(t_canonical, a.duration_canonical)?;
    let cols = &a.columns;
    if cols.is_empty() {
        return Ok(Vec::new());
    }
    let idx = cols.partition_point(|c| c.t_canonical < t);
    if idx < cols.len() && cols[idx].t_canonical == t {
        return Ok(cols[idx].freq_anchors.clone());
    }
    if idx == 0 {
        return Ok(cols[0].freq_anchors.clone());
    }
    if idx == cols.len() {
        return Ok(cols[idx - 1].freq_anchors.clone());
    }
    let (left, right) = (&cols[idx - 1], &cols[idx]);
    let u = (t - left.t_canonical) / (right.t_canonical - left.t_canonical);
    if left.freq_anchors.len() == right.freq_anchors.len() {
        return Ok(left
            .freq_anchors
            .iter()
            .zip(&right.freq_anchors)
            .map(|(l, r)| FrequencyAnchorPair {
                f_canonical: l.f_canonical + u * (r.f_canonical - l.f_canonical),
                f_instance: l.f_instance + u * (r.f_instance - l.f_instance),
            })
            .collect());
    }
    Ok(if u <= 0.5 {
        left.freq_anchors.clone()
    } else {
        right.freq_anchors.clone()
    })
}

fn frequency_knots(pairs: &[FrequencyAnchorPair], nyquist: f64) -> (Vec<f64>, Vec<f64>) {
    let mut can = Vec::with_capacity(pairs.len() + 2);
    let mut inst = Vec::with_capacity(pairs.len() + 2);
    can.push(0.0);
    inst.push(0.0);
    for p in pairs {
        can.push(p.f_canonical);
        inst.push(p.f_instance);
    }
    can.push(nyquist);
    inst.push(nyquist);
    (can, inst)
}

fn check_frequency(f: f64, nyquist: f64) -> Result<f64> {
    if !f.is_finite() || f < 0.0 || f > nyquist * (1.0 + RANGE_EPS) {
        return Err(Error::OutOfRange(format!(
            "frequency {f} outside [0, {nyquist}]"
        )));
    }
    Ok(f.min(nyquist))
}

/// Canonical frequency to instance frequency.
pub fn warp_frequency(
    pairs: &[FrequencyAnchorPair],
    nyquist: f64,
    f_canonical: f64,
) -> Result<f64> {
    check_pairs(pairs, nyquist).map_err(|e| match e {
        Error::OutOfRange(m) => Error::InvalidAnchors(m),
        e => e,
    })?;
    let f = check_frequency(f_canonical, nyquist)?;
    let (can, inst) = frequency_knots(pairs, nyquist);
    Ok(piecewise(&can, &inst, f))
}

/// Instance frequency to canonical frequency.
pub fn unwarp_frequency(
    pairs: &[FrequencyAnchorPair],
    nyquist: f64,
    f_instance: f64,
) -> Result<f64> {
    check_pairs(pairs, nyquist).map_err(|e| match e {
        Error::OutOfRange(m) => Error::InvalidAnchors(m),
        e => e,
    })?;
    let f = check_frequency(f_instance, nyquist)?;
    let (can, inst) = frequency_knots(pairs, nyquist);
    Ok(piecewise(&inst, &can, f))
}

/// Vocoder parameters together with their alignment to the canonical axis.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphInstance {
    pub params: VocoderParams,
    pub anchors: AnchorSet,
    pub label: String,
}

impl MorphInstance {
    pub fn new(
        params: VocoderParams,
        anchors: AnchorSet,
        label: impl Into<String>,
    ) -> Result<Self> {
        let inst = Self {
            params,
            anchors,
            label: label.into(),
        };
        inst.validate()?;
        Ok(inst)
    }

    /// An instance that is its own canonical axis, carrying no anchors.
    pub fn canonical(params: VocoderParams, label: impl Into<String>) -> Result<Self> {
        let d = params.duration();
        let anchors = AnchorSet::empty(d, d, params.nyquist());
        Self::new(params, anchors, label)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.anchors.validate()?;
        let span = self.params.duration();
        if (self.anchors.duration_instance - span).abs() > 1e-9 * span.max(1.0) {
            return Err(Error::InvalidAnchors(format!(
                "anchor instance duration {} does not match parameter span {span}",
                self.anchors.duration_instance
            )));
        }
        if self.anchors.nyquist != self.params.nyquist() {
            return Err(Error::InvalidAnchors(format!(
                "anchor nyquist {} does not match sample rate {}",
                self.anchors.nyquist, self.params.sample_rate
            )));
        }
        Ok(())
    }
}

/// Frame content of `p` at fractional frame position `pos`: envelope and
/// aperiodicity linearly interpolated, fo log-linear between voiced
/// neighbours and nearest-neighbour otherwise.
pub(crate) fn frame_at(p: &VocoderParams, pos: f64) -> (f64, Vec<f64>, Vec<f64>) {
    let (i, frac) = crate::dsp::split_position(pos, p.frame_count());
    if frac == 0.0 {
        return (
            p.fo[i],
            p.envelope_frame(i).to_vec(),
            p.aperiodicity_frame(i).to_vec(),
        );
    }
    let j = i + 1;
    let lerp = |a: &[f64], b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + frac * (y - x)).collect()
    };
    let (fa, fb) = (p.fo[i], p.fo[j]);
    let fo = if fa > 0.0 && fb > 0.0 {
        (fa.ln() + frac * (fb.ln() - fa.ln())).exp()
    } else if frac < 0.5 {
        fa
    } else {
        fb
    };
    (
        fo,
        lerp(p.envelope_frame(i), p.envelope_frame(j)),
        lerp(p.aperiodicity_frame(i), p.aperiodicity_frame(j)),
    )
}

/// Brings an instance onto the canonical axes: each canonical frame reads
/// the instance frame at the warped time, and each canonical bin reads the
/// instance spectrum at the warped frequency. The result keeps the
/// instance's frame period, fft size and sample rate.
pub fn resample_to_canonical(
    inst: &MorphInstance,
    canonical_frame_times: &[f64],
) -> Result<VocoderParams> {
    inst.validate()?;
    if canonical_frame_times.is_empty() {
        return Err(Error::InvalidInput("no canonical frame times".into()));
    }
    let p = &inst.params;
    let a = &inst.anchors;
    let bins = p.bins();
    let bin_hz = p.bin_width();
    let mut fo = Vec::with_capacity(canonical_frame_times.len());
    let mut envelope = Vec::with_capacity(canonical_frame_times.len() * bins);
    let mut aperiodicity = Vec::with_capacity(canonical_frame_times.len() * bins);
    for &t in canonical_frame_times {
        let t_inst = a.warp_time(t)?;
        let (f0, env, ap) = frame_at(p, t_inst / p.frame_period);
        fo.push(f0);
        let pairs = frequency_pairs_at(a, t.clamp(0.0, a.duration_canonical))?;
        if pairs.is_empty() {
            envelope.extend_from_slice(&env);
            aperiodicity.extend_from_slice(&ap);
            continue;
        }
        for k in 0..bins {
            let f = warp_frequency(&pairs, a.nyquist, (k as f64 * bin_hz).min(a.nyquist))?;
            let pos = f / bin_hz;
            envelope.push(sample_linear(&env, pos));
            aperiodicity.push(sample_linear(&ap, pos));
        }
    }
    Ok(VocoderParams {
        sample_rate: p.sample_rate,
        frame_period: p.frame_period,
        fft_size: p.fft_size,
        fo,
        envelope,
        aperiodicity,
    })
}
