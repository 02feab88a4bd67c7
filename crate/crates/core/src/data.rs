use nalgebra::DVector;

use crate::error::{Error, Result};

/// One observation: a feature row, its integer identity label, and an
/// optional camera (view) id used by re-identification protocols.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: DVector<f64>,
    pub label: i32,
    pub camera: Option<i32>,
}

impl LabeledSample {
    pub fn new(label: i32, camera: Option<i32>, features: Vec<f64>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::StreamFormat("sample has no features".into()));
        }
        if let Some(i) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::StreamFormat(format!(
                "feature {i} is not finite"
            )));
        }
        Ok(Self {
            features: DVector::from_vec(features),
            label,
            camera,
        })
    }

    pub fn dim(&self) -> usize {
        self.features.len()
    }
}
