use std::collections::BTreeMap;

use crate::anchors::{AnchorSet, MorphInstance};
use crate::error::{Error, Result};
use crate::params::VocoderParams;

/// Canonical coordinates of matching anchors may differ by this much.
const COORD_TOLERANCE: f64 = 1e-9;

/// `K >= 2` instances aligned to one canonical axis. The canonical instance
/// carries identity anchors with the same topology as the others.
#[derive(Debug, Clone, PartialEq)]
pub struct MorphObject {
    pub instances: Vec<MorphInstance>,
    pub canonical_index: usize,
    pub metadata: BTreeMap<String, String>,
}

impl MorphObject {
    pub fn new(instances: Vec<MorphInstance>, canonical_index: usize) -> Result<Self> {
        let obj = Self {
            instances,
            canonical_index,
            metadata: BTreeMap::new(),
        };
        obj.validate()?;
        Ok(obj)
    }

    /// Two-instance object from a canonical parameter set and a second
    /// instance aligned to it by `anchors`.
    pub fn from_pair(
        canonical: VocoderParams,
        canonical_label: impl Into<String>,
        other: VocoderParams,
        other_label: impl Into<String>,
        anchors: AnchorSet,
    ) -> Result<Self> {
        let identity = anchors.identity_of();
        let first = MorphInstance::new(canonical, identity, canonical_label)?;
        let second = MorphInstance::new(other, anchors, other_label)?;
        Self::new(vec![first, second], 0)
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn canonical(&self) -> &MorphInstance {
        &self.instances[self.canonical_index]
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.len() < 2 {
            return Err(Error::InvalidObject(format!(
                "need at least two instances, got {}",
                self.instances.len()
            )));
        }
        if self.canonical_index >= self.instances.len() {
            return Err(Error::InvalidObject(format!(
                "canonical index {} out of range",
                self.canonical_index
            )));
        }
        for inst in &self.instances {
            inst.validate()?;
        }
        let canon = self.canonical();
        if !canon.anchors.is_identity() {
            return Err(Error::InvalidObject(
                "canonical instance must carry identity anchors".into(),
            ));
        }
        let cp = &canon.params;
        for inst in &self.instances {
            let p = &inst.params;
            if p.sample_rate != cp.sample_rate {
                return Err(Error::RateMismatch(cp.sample_rate, p.sample_rate));
            }
            if p.fft_size != cp.fft_size || p.frame_period != cp.frame_period {
                return Err(Error::InvalidObject(format!(
                    "instance '{}' uses fft size {} / frame period {}, canonical uses {} / {}",
                    inst.label, p.fft_size, p.frame_period, cp.fft_size, cp.frame_period
                )));
            }
            check_topology(&canon.anchors, &inst.anchors, &inst.label)?;
        }
        Ok(())
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= COORD_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn check_topology(canon: &AnchorSet, other: &AnchorSet, label: &str) -> Result<()> {
    let mismatch = |m: String| {
        Err(Error::AnchorTopologyMismatch(format!(
            "instance '{label}': {m}"
        )))
    };
    if !close(canon.duration_canonical, other.duration_canonical) {
        return mismatch(format!(
            "canonical duration {} differs from {}",
            other.duration_canonical, canon.duration_canonical
        ));
    }
    if canon.columns.len() != other.columns.len() {
        return mismatch(format!(
            "{} temporal anchors, canonical has {}",
            other.columns.len(),
            canon.columns.len()
        ));
    }
    for (i, (c, o)) in canon.columns.iter().zip(&other.columns).enumerate() {
        if !close(c.t_canonical, o.t_canonical) {
            return mismatch(format!(
                "anchor {i} sits at canonical time {}",
                o.t_canonical
            ));
        }
        if c.freq_anchors.len() != o.freq_anchors.len() {
            return mismatch(format!(
                "anchor {i} has {} frequency anchors, canonical has {}",
                o.freq_anchors.len(),
                c.freq_anchors.len()
            ));
        }
        for (j, (cf, of)) in c.freq_anchors.iter().zip(&o.freq_anchors).enumerate() {
            if !close(cf.f_canonical, of.f_canonical) {
                return mismatch(format!(
                    "frequency anchor {j} of column {i} sits at canonical {} Hz",
                    of.f_canonical
                ));
            }
        }
    }
    Ok(())
}
