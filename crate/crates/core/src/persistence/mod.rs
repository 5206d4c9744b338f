//! File formats: `.vocp` (binary vocoder parameters), `.morb` (morphing
//! objects) and `.medit` (saved edit state). The JSON formats embed
//! instance parameters as base64-encoded `.vocp` bytes.

mod edit;
mod object;
mod vocp;

use std::io::Write;
use std::path::Path;

pub use edit::{
    read_edit_state, restore_edit_state, save_edit_state, write_edit_state, EDIT_FORMAT,
};
pub use object::{
    morph_object_from_bytes, morph_object_to_bytes, read_morph_object, write_morph_object,
    OBJECT_FORMAT,
};
pub use vocp::{
    read_vocp, vocp_from_bytes, vocp_to_bytes, write_vocp, VOCP_HEADER_LEN, VOCP_MAGIC,
    VOCP_VERSION,
};

/// Schema version written into `.morb` and `.medit` manifests.
pub const SCHEMA_VERSION: u32 = 1;

/// Writes through a temporary file in the target directory, then renames.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> crate::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
