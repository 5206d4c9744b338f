//! `.medit`: saved edit state, restorable mid-session.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::object::{check_header, decode_params, encode_params};
use super::{write_atomic, SCHEMA_VERSION};
use crate::anchors::AnchorSet;
use crate::editor::{AnchorEditor, EditState, NamedParams, ViewState};
use crate::error::{Error, Result};

pub const EDIT_FORMAT: &str = "vocmorph-edit";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EditFile {
    format: String,
    schema_version: u32,
    canonical: Option<Entry>,
    nonlinear: Option<Entry>,
    anchors: Option<AnchorSet>,
    #[serde(default)]
    undo: Vec<AnchorSet>,
    #[serde(default)]
    redo: Vec<AnchorSet>,
    view: ViewState,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    label: String,
    params: String,
}

fn encode(n: &Option<NamedParams>) -> Result<Option<Entry>> {
    n.as_ref()
        .map(|n| {
            Ok(Entry {
                label: n.label.clone(),
                params: encode_params(&n.params)?,
            })
        })
        .transpose()
}

fn decode(e: Option<Entry>) -> Result<Option<NamedParams>> {
    e.map(|e| Ok(NamedParams::new(e.label, decode_params(&e.params)?)))
        .transpose()
}

pub fn save_edit_state(state: &EditState) -> Result<Vec<u8>> {
    let file = EditFile {
        format: EDIT_FORMAT.into(),
        schema_version: SCHEMA_VERSION,
        canonical: encode(&state.canonical)?,
        nonlinear: encode(&state.nonlinear)?,
        anchors: state.editor.as_ref().map(|e| e.anchors().clone()),
        undo: state
            .editor
            .as_ref()
            .map(|e| e.undo_stack().to_vec())
            .unwrap_or_default(),
        redo: state
            .editor
            .as_ref()
            .map(|e| e.redo_stack().to_vec())
            .unwrap_or_default(),
        view: state.view,
    };
    serde_json::to_vec_pretty(&file).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn restore_edit_state(bytes: &[u8]) -> Result<EditState> {
    check_header(bytes, EDIT_FORMAT)?;
    let file: EditFile =
        serde_json::from_slice(bytes).map_err(|e| Error::CorruptFile(format!("manifest: {e}")))?;
    let canonical = decode(file.canonical)?;
    let nonlinear = decode(file.nonlinear)?;
    let editor = match file.anchors {
        None => {
            if !file.undo.is_empty() || !file.redo.is_empty() {
                return Err(Error::CorruptFile("edit history without anchors".into()));
            }
            None
        }
        Some(anchors) => {
            let (c, n) = match (&canonical, &nonlinear) {
                (Some(c), Some(n)) => (c, n),
                _ => {
                    return Err(Error::CorruptFile(
                        "anchors reference an instance that is not in the file".into(),
                    ))
                }
            };
            let editor = AnchorEditor::from_parts(anchors, file.undo, file.redo)
                .map_err(|e| Error::CorruptFile(e.to_string()))?;
            let span_ok = |a: &AnchorSet| {
                a.duration_canonical == c.params.duration()
                    && a.duration_instance == n.params.duration()
                    && a.nyquist == c.params.nyquist()
            };
            let all = std::iter::once(editor.anchors())
                .chain(editor.undo_stack())
                .chain(editor.redo_stack());
            for a in all {
                if !span_ok(a) {
                    return Err(Error::CorruptFile(
                        "anchor durations do not match the instances".into(),
                    ));
                }
            }
            Some(editor)
        }
    };
    if canonical.is_some() && nonlinear.is_some() && editor.is_none() {
        return Err(Error::CorruptFile(
            "both instances present but no anchors".into(),
        ));
    }
    Ok(EditState {
        canonical,
        nonlinear,
        editor,
        view: file.view,
    })
}

pub fn write_edit_state(path: impl AsRef<Path>, state: &EditState) -> Result<()> {
    write_atomic(path.as_ref(), &save_edit_state(state)?)
}

pub fn read_edit_state(path: impl AsRef<Path>) -> Result<EditState> {
    restore_edit_state(&std::fs::read(path)?)
}
