use std::fmt;

use serde::{Deserialize, Serialize};

use super::weights::check_row;
use crate::error::{Error, Result};
use crate::params::{AP_FLOOR, ENVELOPE_FLOOR};

/// The five morphable attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    /// Time axis (segment durations between temporal anchors).
    Tx,
    /// Frequency axis (gaps between frequency anchors).
    Fx,
    /// Spectrum level (envelope power).
    Sl,
    /// Fundamental frequency.
    Fo,
    /// Aperiodicity.
    Ap,
}

impl Attribute {
    pub const ALL: [Attribute; 5] = [
        Attribute::Tx,
        Attribute::Fx,
        Attribute::Sl,
        Attribute::Fo,
        Attribute::Ap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Tx => "tx",
            Attribute::Fx => "fx",
            Attribute::Sl => "sl",
            Attribute::Fo => "fo",
            Attribute::Ap => "ap",
        }
    }

    /// Range a morphed value is clamped into.
    fn bounds(self) -> (f64, f64) {
        match self {
            Attribute::Tx | Attribute::Fx | Attribute::Fo => (f64::MIN_POSITIVE, f64::MAX),
            Attribute::Sl => (ENVELOPE_FLOOR, f64::MAX),
            Attribute::Ap => (AP_FLOOR, 1.0),
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Largest aperiodicity fed to the logit.
const AP_CEIL: f64 = 1.0 - AP_FLOOR;

#[inline]
fn forward_unchecked(attr: Attribute, x: f64) -> f64 {
    match attr {
        Attribute::Tx | Attribute::Fx | Attribute::Fo => x.ln(),
        Attribute::Sl => x.max(ENVELOPE_FLOOR).ln(),
        Attribute::Ap => {
            let a = x.clamp(AP_FLOOR, AP_CEIL);
            (a / (1.0 - a)).ln()
        }
    }
}

#[inline]
fn inverse_unchecked(attr: Attribute, y: f64) -> f64 {
    match attr {
        Attribute::Ap => 1.0 / (1.0 + (-y).exp()),
        _ => y.exp(),
    }
}

/// Maps an attribute value from its natural range onto the real line:
/// natural log for durations, frequency gaps, fo and power (floored at
/// 1e-12); logit for aperiodicity (clamped to `[1e-6, 1 - 1e-6]`).
pub fn transform(attr: Attribute, x: f64) -> Result<f64> {
    let ok = match attr {
        Attribute::Ap => x.is_finite() && x > 0.0 && x <= 1.0,
        _ => x.is_finite() && x > 0.0,
    };
    if !ok {
        return Err(Error::DomainError {
            attribute: attr,
            value: x,
        });
    }
    Ok(forward_unchecked(attr, x))
}

pub fn inverse_transform(attr: Attribute, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::DomainError {
            attribute: attr,
            value: y,
        });
    }
    Ok(inverse_unchecked(attr, y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorphedValue {
    pub value: f64,
    /// The blended value left the attribute's range and was clamped.
    pub clamped: bool,
}

/// Blends `xs` with weights `w` in the transformed domain.
pub fn morph_scalar(attr: Attribute, xs: &[f64], w: &[f64]) -> Result<MorphedValue> {
    if xs.len() != w.len() {
        return Err(Error::InvalidWeights {
            attribute: attr,
            reason: format!("{} weights for {} values", w.len(), xs.len()),
        });
    }
    check_row(attr, w)?;
    for &x in xs {
        transform(attr, x)?;
    }
    let row = RowWeights::new(w);
    let (value, clamped) = row.blend(attr, xs.iter().copied());
    if value.is_nan() {
        return Err(Error::DomainError {
            attribute: attr,
            value,
        });
    }
    Ok(MorphedValue { value, clamped })
}

/// A validated weight row with its unit-vector shortcut precomputed.
#[derive(Debug, Clone)]
pub(crate) struct RowWeights<'a> {
    pub weights: &'a [f64],
    pub unit: Option<usize>,
}

impl<'a> RowWeights<'a> {
    pub fn new(weights: &'a [f64]) -> Self {
        let unit = if weights.iter().filter(|&&v| v != 0.0).count() == 1 {
            weights.iter().position(|&v| v == 1.0)
        } else {
            None
        };
        Self { weights, unit }
    }

    /// Blend of pre-validated values. A unit row returns its value verbatim.
    pub fn blend(&self, attr: Attribute, xs: impl Iterator<Item = f64>) -> (f64, bool) {
        if let Some(j) = self.unit {
            return (xs.into_iter().nth(j).unwrap_or(f64::NAN), false);
        }
        let y: f64 = xs
            .zip(self.weights)
            .map(|(x, &w)| w * forward_unchecked(attr, x))
            .sum();
        let v = inverse_unchecked(attr, y);
        let (lo, hi) = attr.bounds();
        if v < lo {
            (lo, true)
        } else if v > hi {
            (hi, true)
        } else {
            (v, false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_examples() {
        assert_eq!(transform(Attribute::Fo, 100.0).unwrap(), 100f64.ln());
        assert!((inverse_transform(Attribute::Fo, 100f64.ln()).unwrap() - 100.0).abs() < 1e-12);
        assert_eq!(transform(Attribute::Ap, 0.5).unwrap(), 0.0);
        let y = transform(Attribute::Sl, 1e-12).unwrap();
        assert!(y.is_finite());
        let back = inverse_transform(Attribute::Sl, y).unwrap();
        assert!((back - 1e-12).abs() < 1e-9 * 1e-12);
        assert!(matches!(
            transform(Attribute::Fo, -1.0),
            Err(Error::DomainError { .. })
        ));
        assert!(transform(Attribute::Ap, 1.5).is_err());
        assert!(inverse_transform(Attribute::Ap, f64::INFINITY).is_err());
    }

    #[test]
    fn transforms_round_trip_and_increase() {
        for attr in Attribute::ALL {
            let xs: Vec<f64> = match attr {
                Attribute::Ap => vec![1e-5, 0.01, 0.3, 0.5, 0.9, 0.99999],
                _ => vec![1e-3, 0.5, 1.0, 80.0, 1e4],
            };
            let ys: Vec<f64> = xs.iter().map(|&x| transform(attr, x).unwrap()).collect();
            assert!(ys.windows(2).all(|p| p[1] > p[0]), "{attr}");
            for (x, y) in xs.iter().zip(&ys) {
                let back = inverse_transform(attr, *y).unwrap();
                assert!(((back - x) / x).abs() < 1e-9, "{attr} {x} {back}");
            }
        }
    }

    #[test]
    fn scalar_examples() {
        let m = morph_scalar(Attribute::Fo, &[100.0, 400.0], &[0.5, 0.5]).unwrap();
        assert!((m.value - 200.0).abs() < 1e-9);
        assert!(!m.clamped);
        let m = morph_scalar(Attribute::Fo, &[100.0, 400.0], &[-0.5, 1.5]).unwrap();
        assert!((m.value - 800.0).abs() < 1e-9);
        for attr in Attribute::ALL {
            let xs = [0.37, 0.81];
            assert_eq!(morph_scalar(attr, &xs, &[1.0, 0.0]).unwrap().value, 0.37);
            assert_eq!(morph_scalar(attr, &xs, &[0.0, 1.0]).unwrap().value, 0.81);
        }
    }

    #[test]
    fn scalar_rejects_bad_weights_and_clamps() {
        assert!(matches!(
            morph_scalar(Attribute::Sl, &[1.0, 2.0], &[0.5, 0.4]),
            Err(Error::InvalidWeights {
                attribute: Attribute::Sl,
                ..
            })
        ));
        assert!(morph_scalar(Attribute::Sl, &[1.0], &[0.5, 0.5]).is_err());
        let m = morph_scalar(Attribute::Ap, &[0.001, 0.9], &[-3.0, 4.0]).unwrap();
        assert!(m.value <= 1.0);
        let m = morph_scalar(Attribute::Sl, &[1e-12, 1.0], &[3.0, -2.0]).unwrap();
        assert!(m.clamped);
        assert_eq!(m.value, ENVELOPE_FLOOR);
    }
}
