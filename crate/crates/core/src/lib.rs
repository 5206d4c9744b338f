//! Voice morphing over classical-vocoder parameters.
//!
//! Speech is decomposed into fo, spectral envelope and aperiodicity streams
//! ([`vocoder`]), instances are aligned with piecewise-linear time and
//! frequency anchors ([`anchors`]), and any subset of the five attributes
//! (time axis, frequency axis, spectrum level, fo, aperiodicity) is
//! interpolated or extrapolated across `K` instances ([`morph`]).

pub mod align;
pub mod anchors;
mod dsp;
pub mod editor;
pub mod error;
pub mod fixtures;
pub mod morph;
pub mod params;
pub mod persistence;
pub mod signal;
pub mod vocoder;
pub mod wav;

pub use align::{alignment_distance, DistanceTrajectory};
pub use anchors::{
    frequency_pairs_at, resample_to_canonical, warp_frequency, AnchorColumn, AnchorSet,
    FrequencyAnchorPair, MorphInstance,
};
pub use dsp::XorShift64Star;
pub use editor::{
    rebase, AnchorEdit, AnchorEditor, DisplayMode, EditState, NamedParams, ViewState,
};
pub use error::{Error, Result};
pub use morph::{
    area_coordinates, continuum, morph, morph_scalar, morph_time_axis, rate_to_weights, Attribute,
    MorphObject, WeightMatrix,
};
pub use params::{AnalysisConfig, VocoderParams, Waveform};
pub use vocoder::{analyze, synthesize};
pub use wav::WavEncoding;
