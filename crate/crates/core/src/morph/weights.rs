use serde::{Deserialize, Serialize};

use super::Attribute;
use crate::error::{Error, Result};

/// Allowed deviation of a weight row's sum from one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

pub(crate) fn check_row(attr: Attribute, w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidWeights {
            attribute: attr,
            reason: "empty row".into(),
        });
    }
    if let Some(v) = w.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidWeights {
            attribute: attr,
            reason: format!("non-finite weight {v}"),
        });
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::InvalidWeights {
            attribute: attr,
            reason: format!("row sums to {sum}, expected 1"),
        });
    }
    Ok(())
}

pub(crate) fn check_weights_k(attr: Attribute, w: &[f64], k: usize) -> Result<()> {
    if w.len() != k {
        return Err(Error::InvalidWeights {
            attribute: attr,
            reason: format!("{} weights for {k} instances", w.len()),
        });
    }
    check_row(attr, w)
}

/// One weight vector per attribute. Weights may be negative or exceed one,
/// but every row must sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightMatrix {
    pub tx: Vec<f64>,
    pub fx: Vec<f64>,
    pub sl: Vec<f64>,
    pub fo: Vec<f64>,
    pub ap: Vec<f64>,
}

impl WeightMatrix {
    /// Same weights for every attribute.
    pub fn uniform(w: Vec<f64>) -> Self {
        Self {
            tx: w.clone(),
            fx: w.clone(),
            sl: w.clone(),
            fo: w.clone(),
            ap: w,
        }
    }

    /// Every row selects instance `j` of `k`.
    pub fn unit(k: usize, j: usize) -> Self {
        let mut w = vec![0.0; k];
        w[j] = 1.0;
        Self::uniform(w)
    }

    pub fn row(&self, attr: Attribute) -> &[f64] {
        match attr {
            Attribute::Tx => &self.tx,
            Attribute::Fx => &self.fx,
            Attribute::Sl => &self.sl,
            Attribute::Fo => &self.fo,
            Attribute::Ap => &self.ap,
        }
    }

    pub fn row_mut(&mut self, attr: Attribute) -> &mut Vec<f64> {
        match attr {
            Attribute::Tx => &mut self.tx,
            Attribute::Fx => &mut self.fx,
            Attribute::Sl => &mut self.sl,
            Attribute::Fo => &mut self.fo,
            Attribute::Ap => &mut self.ap,
        }
    }

    /// Checks every row has `k` finite entries summing to one.
    pub fn validate(&self, k: usize) -> Result<()> {
        for attr in Attribute::ALL {
            check_weights_k(attr, self.row(attr), k)?;
        }
        Ok(())
    }
}

/// Two-instance weights `(1 - rate, rate)` on every row.
pub fn rate_to_weights(rate: f64) -> WeightMatrix {
    WeightMatrix::uniform(vec![1.0 - rate, rate])
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Barycentric (area) coordinates of `p` in `triangle`. A weight is
/// negative exactly when `p` lies beyond the edge opposite its vertex.
pub fn area_coordinates(p: [f64; 2], triangle: [[f64; 2]; 3]) -> Result<[f64; 3]> {
    let [a, b, c] = triangle;
    let total = signed_area(a, b, c);
    if total == 0.0 || !total.is_finite() {
        return Err(Error::DegenerateTriangle);
    }
    Ok([
        signed_area(p, b, c) / total,
        signed_area(a, p, c) / total,
        signed_area(a, b, p) / total,
    ])
}
