//! Generalized morphing: every attribute is mapped onto the real line,
//! blended with weights summing to one, and mapped back.

mod engine;
mod object;
mod transform;
mod weights;

pub use engine::{
    continuum, morph, morph_frequency_axis, morph_time_axis, morph_with, MorphOptions, MorphOutcome,
};
pub use object::MorphObject;
pub use transform::{inverse_transform, morph_scalar, transform, Attribute, MorphedValue};
pub use weights::{area_coordinates, rate_to_weights, WeightMatrix, WEIGHT_SUM_TOLERANCE};

pub(crate) use transform::RowWeights;
pub(crate) use weights::check_weights_k;
