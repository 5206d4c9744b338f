//! Interactive anchor editing: single edits with undo/redo, and the
//! two-instance edit state that the preparation workflow saves and restores.

use serde::{Deserialize, Serialize};

use crate::align::{alignment_distance, DistanceTrajectory, DEFAULT_METRIC_LIMIT_HZ};
use crate::anchors::{
    frequency_pairs_at, resample_to_canonical, warp_frequency, AnchorColumn, AnchorSet,
    FrequencyAnchorPair, MorphInstance,
};
use crate::error::{Error, Result};
use crate::morph::MorphObject;
use crate::params::VocoderParams;

/// One user edit. Omitted instance-side coordinates default to the current
/// warp, so a fresh anchor never changes the mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AnchorEdit {
    PlaceTemporal {
        t_canonical: f64,
        #[serde(default)]
        t_instance: Option<f64>,
    },
    MoveTemporal {
        column: usize,
        #[serde(default)]
        t_canonical: Option<f64>,
        #[serde(default)]
        t_instance: Option<f64>,
    },
    RemoveTemporal {
        column: usize,
    },
    PlaceFrequency {
        column: usize,
        f_canonical: f64,
        #[serde(default)]
        f_instance: Option<f64>,
    },
    MoveFrequency {
        column: usize,
        pair: usize,
        #[serde(default)]
        f_canonical: Option<f64>,
        #[serde(default)]
        f_instance: Option<f64>,
    },
    RemoveFrequency {
        column: usize,
        pair: usize,
    },
}

/// Anchor set plus snapshot-based undo and redo stacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorEditor {
    anchors: AnchorSet,
    undo: Vec<AnchorSet>,
    redo: Vec<AnchorSet>,
}

fn no_column(column: usize) -> Error {
    Error::InvalidInput(format!("no temporal anchor {column}"))
}

impl AnchorEditor {
    pub fn new(anchors: AnchorSet) -> Result<Self> {
        anchors.validate()?;
        Ok(Self {
            anchors,
            undo: Vec::new(),
            redo: Vec::new(),
        })
    }

    /// Rebuilds an editor from saved parts, validating every snapshot.
    pub fn from_parts(
        anchors: AnchorSet,
        undo: Vec<AnchorSet>,
        redo: Vec<AnchorSet>,
    ) -> Result<Self> {
        for set in std::iter::once(&anchors).chain(&undo).chain(&redo) {
            set.validate()?;
        }
        Ok(Self {
            anchors,
            undo,
            redo,
        })
    }

    pub fn anchors(&self) -> &AnchorSet {
        &self.anchors
    }

    pub fn undo_stack(&self) -> &[AnchorSet] {
        &self.undo
    }

    pub fn redo_stack(&self) -> &[AnchorSet] {
        &self.redo
    }

    fn commit(&mut self, next: AnchorSet) -> Result<()> {
        next.validate()?;
        let prev = std::mem::replace(&mut self.anchors, next);
        self.undo.push(prev);
        self.redo.clear();
        Ok(())
    }

    /// Applies an edit; on error the state is untouched.
    pub fn apply(&mut self, edit: &AnchorEdit) -> Result<()> {
        let mut next = self.anchors.clone();
        match *edit {
            AnchorEdit::PlaceTemporal {
                t_canonical,
                t_instance,
            } => {
                let t_instance = match t_instance {
                    Some(t) => t,
                    None => self.anchors.warp_time(t_canonical)?,
                };
                let at = next
                    .columns
                    .partition_point(|c| c.t_canonical < t_canonical);
                next.columns
                    .insert(at, AnchorColumn::new(t_canonical, t_instance));
            }
            AnchorEdit::MoveTemporal {
                column,
                t_canonical,
                t_instance,
            } => {
                let c = next
                    .columns
                    .get_mut(column)
                    .ok_or_else(|| no_column(column))?;
                if let Some(t) = t_canonical {
                    c.t_canonical = t;
                }
                if let Some(t) = t_instance {
                    c.t_instance = t;
                }
            }
            AnchorEdit::RemoveTemporal { column } => {
                if column >= next.columns.len() {
                    return Err(no_column(column));
                }
                next.columns.remove(column);
            }
            AnchorEdit::PlaceFrequency {
                column,
                f_canonical,
                f_instance,
            } => {
                let col = self
                    .anchors
                    .columns
                    .get(column)
                    .ok_or_else(|| no_column(column))?;
                let f_instance = match f_instance {
                    Some(f) => f,
                    None => {
                        let pairs = frequency_pairs_at(&self.anchors, col.t_canonical)?;
                        warp_frequency(&pairs, self.anchors.nyquist, f_canonical)?
                    }
                };
                let pairs = &mut next.columns[column].freq_anchors;
                let at = pairs.partition_point(|p| p.f_canonical < f_canonical);
                pairs.insert(at, FrequencyAnchorPair::new(f_canonical, f_instance));
            }
            AnchorEdit::MoveFrequency {
                column,
                pair,
                f_canonical,
                f_instance,
            } => {
                let c = next
                    .columns
                    .get_mut(column)
                    .ok_or_else(|| no_column(column))?;
                let p = c
                    .freq_anchors
                    .get_mut(pair)
                    .ok_or_else(|| Error::InvalidInput(format!("no frequency anchor {pair}")))?;
                if let Some(f) = f_canonical {
                    p.f_canonical = f;
                }
                if let Some(f) = f_instance {
                    p.f_instance = f;
                }
            }
            AnchorEdit::RemoveFrequency { column, pair } => {
                let c = next
                    .columns
                    .get_mut(column)
                    .ok_or_else(|| no_column(column))?;
                if pair >= c.freq_anchors.len() {
                    return Err(Error::InvalidInput(format!("no frequency anchor {pair}")));
                }
                c.freq_anchors.remove(pair);
            }
        }
        self.commit(next)
    }

    /// Replaces the whole anchor set. Durations and nyquist must not change.
    pub fn replace(&mut self, anchors: AnchorSet) -> Result<()> {
        let cur = &self.anchors;
        if anchors.duration_canonical != cur.duration_canonical
            || anchors.duration_instance != cur.duration_instance
            || anchors.nyquist != cur.nyquist
        {
            return Err(Error::OutOfRange(
                "anchor set durations or nyquist differ from the loaded instances".into(),
            ));
        }
        self.commit(anchors)
    }

    /// Removes every temporal anchor. Returns false if there was nothing to clear.
    pub fn clear(&mut self) -> bool {
        if self.anchors.columns.is_empty() {
            return false;
        }
        let mut next = self.anchors.clone();
        next.columns.clear();
        self.commit(next).is_ok()
    }

    pub fn undo(&mut self) -> bool {
        match self.undo.pop() {
            Some(prev) => {
                let cur = std::mem::replace(&mut self.anchors, prev);
                self.redo.push(cur);
                true
            }
            None => false,
        }
    }

    pub fn redo(&mut self) -> bool {
        match self.redo.pop() {
            Some(next) => {
                let cur = std::mem::replace(&mut self.anchors, next);
                self.undo.push(cur);
                true
            }
            None => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplayMode {
    Canonical,
    Nonlinear,
    #[default]
    Variable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewState {
    pub display_mode: DisplayMode,
    /// Upper frequency of the spectrogram display.
    pub frequency_limit: f64,
    /// Use the display limit as the distance band instead of the default.
    #[serde(default)]
    pub metric_follows_view: bool,
}

impl Default for ViewState {
    fn default() -> Self {
        Self {
            display_mode: DisplayMode::Variable,
            frequency_limit: DEFAULT_METRIC_LIMIT_HZ,
            metric_follows_view: false,
        }
    }
}

impl ViewState {
    pub fn metric_limit(&self, nyquist: f64) -> f64 {
        let f = if self.metric_follows_view {
            self.frequency_limit
        } else {
            DEFAULT_METRIC_LIMIT_HZ
        };
        f.min(nyquist)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedParams {
    pub label: String,
    pub params: VocoderParams,
}

impl NamedParams {
    pub fn new(label: impl Into<String>, params: VocoderParams) -> Self {
        Self {
            label: label.into(),
            params,
        }
    }
}

/// Progress of preparing a morphing object: the instance on the canonical
/// axes, the instance on the non-linear axes, and the anchors between them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EditState {
    pub canonical: Option<NamedParams>,
    pub nonlinear: Option<NamedParams>,
    pub editor: Option<AnchorEditor>,
    pub view: ViewState,
}

impl EditState {
    /// Loads one side. Once both sides are present the anchors restart
    /// from an empty set spanning the two durations.
    pub fn load(&mut self, canonical_axis: bool, inst: NamedParams) -> Result<()> {
        inst.params.validate()?;
        let other = if canonical_axis {
            &self.nonlinear
        } else {
            &self.canonical
        };
        if let Some(o) = other {
            if o.params.sample_rate != inst.params.sample_rate {
                return Err(Error::RateMismatch(
                    o.params.sample_rate,
                    inst.params.sample_rate,
                ));
            }
            if o.params.fft_size != inst.params.fft_size
                || o.params.frame_period != inst.params.frame_period
            {
                return Err(Error::GridMismatch(format!(
                    "fft size {} / frame period {} vs {} / {}",
                    o.params.fft_size,
                    o.params.frame_period,
                    inst.params.fft_size,
                    inst.params.frame_period
                )));
            }
        }
        let (c, n) = if canonical_axis {
            (Some(&inst), self.nonlinear.as_ref())
        } else {
            (self.canonical.as_ref(), Some(&inst))
        };
        let editor = match (c, n) {
            (Some(c), Some(n)) => Some(AnchorEditor::new(AnchorSet::empty(
                c.params.duration(),
                n.params.duration(),
                c.params.nyquist(),
            ))?),
            _ => None,
        };
        if canonical_axis {
            self.canonical = Some(inst);
        } else {
            self.nonlinear = Some(inst);
        }
        self.editor = editor;
        Ok(())
    }

    pub fn reset(&mut self) {
        *self = EditState {
            view: self.view,
            ..Default::default()
        };
    }

    fn loaded(&self) -> Result<(&NamedParams, &NamedParams, &AnchorEditor)> {
        match (&self.canonical, &self.nonlinear, &self.editor) {
            (Some(c), Some(n), Some(e)) => Ok((c, n, e)),
            _ => Err(Error::InvalidInput("both instances must be loaded".into())),
        }
    }

    /// The non-linear instance resampled onto the canonical frame grid.
    pub fn warped_nonlinear(&self) -> Result<VocoderParams> {
        let (c, n, e) = self.loaded()?;
        let inst = MorphInstance::new(n.params.clone(), e.anchors().clone(), n.label.clone())?;
        resample_to_canonical(&inst, &c.params.frame_times())
    }

    pub fn distance(&self) -> Result<DistanceTrajectory> {
        let (c, _, _) = self.loaded()?;
        let warped = self.warped_nonlinear()?;
        alignment_distance(
            &c.params,
            &warped,
            self.view.metric_limit(c.params.nyquist()),
        )
    }

    /// Packages the current alignment as a two-instance morphing object with
    /// the canonical instance first.
    pub fn to_morph_object(&self) -> Result<MorphObject> {
        let (c, n, e) = self.loaded()?;
        MorphObject::from_pair(
            c.params.clone(),
            c.label.clone(),
            n.params.clone(),
            n.label.clone(),
            e.anchors().clone(),
        )
    }
}

/// Starts a new alignment of `obj`'s canonical instance (with its anchors)
/// against new canonical parameters. Anchor times are carried over in
/// proportion to the new duration; frequency anchors start as identity.
pub fn rebase(new_canonical: NamedParams, obj: &MorphObject) -> Result<EditState> {
    obj.validate()?;
    new_canonical.params.validate()?;
    let src = obj.canonical();
    let (np, sp) = (&new_canonical.params, &src.params);
    if np.sample_rate != sp.sample_rate {
        return Err(Error::RateMismatch(sp.sample_rate, np.sample_rate));
    }
    if np.fft_size != sp.fft_size || np.frame_period != sp.frame_period {
        return Err(Error::GridMismatch(format!(
            "fft size {} / frame period {} vs {} / {}",
            np.fft_size, np.frame_period, sp.fft_size, sp.frame_period
        )));
    }
    let d_new = np.duration();
    let d_old = sp.duration();
    let scale = d_new / d_old;
    let anchors = AnchorSet {
        columns: src
            .anchors
            .columns
            .iter()
            .map(|c| AnchorColumn {
                t_canonical: if scale == 1.0 {
                    c.t_instance
                } else {
                    c.t_instance * scale
                },
                t_instance: c.t_instance,
                freq_anchors: c
                    .freq_anchors
                    .iter()
                    .map(|p| FrequencyAnchorPair::new(p.f_instance, p.f_instance))
                    .collect(),
            })
            .collect(),
        duration_canonical: d_new,
        duration_instance: d_old,
        nyquist: np.nyquist(),
    };
    Ok(EditState {
        canonical: Some(new_canonical),
        nonlinear: Some(NamedParams::new(src.label.clone(), sp.clone())),
        editor: Some(AnchorEditor::new(anchors)?),
        view: ViewState::default(),
    })
}
