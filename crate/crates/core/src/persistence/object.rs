//! `.morb`: a JSON manifest holding the morphing object.

use std::collections::BTreeMap;
use std::path::Path;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::vocp::{vocp_from_bytes, vocp_to_bytes};
use super::{write_atomic, SCHEMA_VERSION};
use crate::anchors::{AnchorSet, MorphInstance};
use crate::error::{Error, Result};
use crate::morph::MorphObject;

pub const OBJECT_FORMAT: &str = "vocmorph-object";

#[derive(Deserialize)]
pub(super) struct Header {
    pub format: String,
    pub schema_version: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectFile {
    format: String,
    schema_version: u32,
    canonical_index: usize,
    metadata: BTreeMap<String, String>,
    instances: Vec<InstanceEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceEntry {
    label: String,
    anchors: AnchorSet,
    params: String,
}

pub(super) fn check_header(bytes: &[u8], format: &str) -> Result<()> {
    let h: Header =
        serde_json::from_slice(bytes).map_err(|e| Error::CorruptFile(format!("manifest: {e}")))?;
    if h.format != format {
        return Err(Error::CorruptFile(format!(
            "expected format {format:?}, found {:?}",
            h.format
        )));
    }
    if h.schema_version != SCHEMA_VERSION {
        return Err(Error::UnsupportedVersion(format!(
            "schema version {}",
            h.schema_version
        )));
    }
    Ok(())
}

pub(super) fn decode_params(s: &str) -> Result<crate::params::VocoderParams> {
    let bytes = B64
        .decode(s)
        .map_err(|e| Error::CorruptFile(format!("parameter payload: {e}")))?;
    vocp_from_bytes(&bytes).map_err(|e| match e {
        Error::CorruptFile(_) => e,
        other => Error::CorruptFile(format!("parameter payload: {other}")),
    })
}

pub(super) fn encode_params(p: &crate::params::VocoderParams) -> Result<String> {
    Ok(B64.encode(vocp_to_bytes(p)?))
}

pub fn morph_object_to_bytes(obj: &MorphObject) -> Result<Vec<u8>> {
    obj.validate()?;
    let file = ObjectFile {
        format: OBJECT_FORMAT.into(),
        schema_version: SCHEMA_VERSION,
        canonical_index: obj.canonical_index,
        metadata: obj.metadata.clone(),
        instances: obj
            .instances
            .iter()
            .map(|i| {
                Ok(InstanceEntry {
                    label: i.label.clone(),
                    anchors: i.anchors.clone(),
                    params: encode_params(&i.params)?,
                })
            })
            .collect::<Result<_>>()?,
    };
    serde_json::to_vec_pretty(&file).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn morph_object_from_bytes(bytes: &[u8]) -> Result<MorphObject> {
    check_header(bytes, OBJECT_FORMAT)?;
    let file: ObjectFile =
        serde_json::from_slice(bytes).map_err(|e| Error::CorruptFile(format!("manifest: {e}")))?;
    let instances = file
        .instances
        .into_iter()
        .map(|e| {
            let params = decode_params(&e.params)?;
            MorphInstance::new(params, e.anchors, e.label)
                .map_err(|err| Error::InvalidObjectFile(err.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    if file.canonical_index >= instances.len() {
        return Err(Error::InvalidObjectFile(format!(
            "canonical index {} out of range",
            file.canonical_index
        )));
    }
    let obj = MorphObject {
        instances,
        canonical_index: file.canonical_index,
        metadata: file.metadata,
    };
    obj.validate()
        .map_err(|e| Error::InvalidObjectFile(e.to_string()))?;
    Ok(obj)
}

pub fn write_morph_object(path: impl AsRef<Path>, obj: &MorphObject) -> Result<()> {
    write_atomic(path.as_ref(), &morph_object_to_bytes(obj)?)
}

pub fn read_morph_object(path: impl AsRef<Path>) -> Result<MorphObject> {
    morph_object_from_bytes(&std::fs::read(path)?)
}
