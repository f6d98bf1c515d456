use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

/// One scalar per curve node.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodalField(pub Vec<f64>);

impl NodalField {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl From<Vec<f64>> for NodalField {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl Deref for NodalField {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for NodalField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}
