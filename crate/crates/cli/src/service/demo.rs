//! Three-way morphing: a triangle knob over three instances, with each
//! attribute either following the knob or pinned to one vertex.

use serde::{Deserialize, Serialize};
use vocmorph_core::{
    area_coordinates, AnchorSet, Attribute, Error, MorphInstance, MorphObject, Result, WeightMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    Knob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PatternEntry {
    Follow(Knob),
    /// Pinned to triangle vertex 0, 1 or 2.
    Pinned(usize),
}

impl Default for PatternEntry {
    fn default() -> Self {
        PatternEntry::Follow(Knob::Knob)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Pattern {
    pub tx: PatternEntry,
    pub fx: PatternEntry,
    pub sl: PatternEntry,
    pub fo: PatternEntry,
    pub ap: PatternEntry,
}

impl Pattern {
    fn entry(&self, a: Attribute) -> PatternEntry {
        match a {
            Attribute::Tx => self.tx,
            Attribute::Fx => self.fx,
            Attribute::Sl => self.sl,
            Attribute::Fo => self.fo,
            Attribute::Ap => self.ap,
        }
    }
}

pub const DEFAULT_TRIANGLE: [[f64; 2]; 3] =
    [[0.0, 0.0], [1.0, 0.0], [0.5, 0.866_025_403_784_438_6]];

/// A loaded demo object and which instance sits at each triangle vertex.
#[derive(Debug, Clone)]
pub struct Demo {
    pub object: MorphObject,
    pub vertices: [usize; 3],
}

impl Demo {
    pub fn from_object(object: MorphObject) -> Result<Self> {
        if object.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "a single demo object needs three instances, found {}",
                object.len()
            )));
        }
        Ok(Self {
            object,
            vertices: [0, 1, 2],
        })
    }

    /// Merges three two-instance objects that share one canonical instance.
    /// The canonical instance is kept (with weight zero) so the three
    /// others stay aligned through it.
    pub fn from_pairs(objects: &[MorphObject]) -> Result<Self> {
        if objects.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "expected three objects, got {}",
                objects.len()
            )));
        }
        let first = objects[0].canonical();
        let mut instances = vec![first.clone()];
        for o in objects {
            if o.len() != 2 {
                return Err(Error::InvalidInput(format!(
                    "merged objects must have two instances, found {}",
                    o.len()
                )));
            }
            let c = o.canonical();
            if c.params != first.params {
                return Err(Error::InvalidInput(
                    "objects do not share the same canonical parameters".into(),
                ));
            }
            let other = &o.instances[1 - o.canonical_index];
            instances.push(other.clone());
        }
        // the canonical side needs the same anchor topology as the others
        let identity: AnchorSet = instances[1].anchors.identity_of();
        instances[0] = MorphInstance::new(first.params.clone(), identity, first.label.clone())?;
        let object = MorphObject::new(instances, 0)?;
        Ok(Self {
            object,
            vertices: [1, 2, 3],
        })
    }

    pub fn weights(
        &self,
        point: [f64; 2],
        triangle: [[f64; 2]; 3],
        pattern: &Pattern,
    ) -> Result<([f64; 3], WeightMatrix)> {
        let coords = area_coordinates(point, triangle)?;
        let k = self.object.len();
        let row = |a: Attribute| -> Result<Vec<f64>> {
            let mut w = vec![0.0; k];
            match pattern.entry(a) {
                PatternEntry::Follow(_) => {
                    for (v, c) in self.vertices.iter().zip(coords) {
                        w[*v] = c;
                    }
                }
                PatternEntry::Pinned(v) if v < 3 => w[self.vertices[v]] = 1.0,
                PatternEntry::Pinned(v) => {
                    return Err(Error::InvalidInput(format!(
                        "{a} pinned to vertex {v}, expected 0, 1 or 2"
                    )))
                }
            }
            Ok(w)
        };
        let w = WeightMatrix {
            tx: row(Attribute::Tx)?,
            fx: row(Attribute::Fx)?,
            sl: row(Attribute::Sl)?,
            fo: row(Attribute::Fo)?,
            ap: row(Attribute::Ap)?,
        };
        Ok((coords, w))
    }
}
