use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned search box, with a note on how it was derived.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub derivation: String,
}

impl BoxSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, derivation: impl Into<String>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::Parse("box must have at least one axis".into()));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !l.is_finite() || !u.is_finite() || l >= u)
        {
            return Err(Error::Parse("box needs finite lower < upper on every axis".into()));
        }
        Ok(BoxSpec {
            lower,
            upper,
            derivation: derivation.into(),
        })
    }

    /// The standard box: bounding box of the points, each half-width doubled
    /// and then widened by 1 about the same center.
    pub fn around(points: &[Vec<f64>]) -> Self {
        let n = points[0].len();
        let mut lower = vec![f64::INFINITY; n];
        let mut upper = vec![f64::NEG_INFINITY; n];
        for p in points {
            for i in 0..n {
                lower[i] = lower[i].min(p[i]);
                upper[i] = upper[i].max(p[i]);
            }
        }
        for i in 0..n {
            let c = 0.5 * (lower[i] + upper[i]);
            let half = 2.0 * 0.5 * (upper[i] - lower[i]) + 1.0;
            lower[i] = c - half;
            upper[i] = c + half;
        }
        BoxSpec {
            lower,
            upper,
            derivation: "bounding box of X, half-widths x2 + 1 per axis".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Same center, every half-width multiplied by `factor`.
    pub fn inflate(&self, factor: f64) -> Self {
        let (lower, upper) = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| {
                let c = 0.5 * (l + u);
                let h = 0.5 * (u - l) * factor;
                (c - h, c + h)
            })
            .unzip();
        BoxSpec {
            lower,
            upper,
            derivation: format!("{} (inflated x{factor})", self.derivation),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    /// Point at fractional position `t ∈ [0, 1]ⁿ`.
    pub fn lerp(&self, t: &[f64]) -> Vec<f64> {
        t.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(s, (l, u))| l + s * (u - l))
            .collect()
    }
}
