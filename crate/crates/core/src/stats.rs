//! Running per-class and population means plus the scatter matrices built
//! from them and the sketch.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::gram;

/// One-pass per-class and population mean/count tracking.
///
/// Means use the recurrence m ← (N·m + x)/(N + 1) so no large-magnitude sum
/// accumulator exists. Labels are opaque integers with no contiguity
/// assumption.
#[derive(Debug, Clone)]
pub struct ClassStatistics {
    dim: usize,
    class_means: BTreeMap<i32, DVector<f64>>,
    class_counts: BTreeMap<i32, u64>,
    population_mean: DVector<f64>,
    population_count: u64,
}

/// Scatter matrices derived from the statistics and the compacted sketch.
/// `total_approx` is stored as `within_approx + between`, so that identity
/// holds to the bit.
#[derive(Debug, Clone)]
pub struct ScatterSet {
    pub between: DMatrix<f64>,
    pub total_approx: DMatrix<f64>,
    pub within_approx: DMatrix<f64>,
}

impl ClassStatistics {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("feature dimension must be at least 1".into()));
        }
        Ok(Self {
            dim,
            class_means: BTreeMap::new(),
            class_counts: BTreeMap::new(),
            population_mean: DVector::zeros(dim),
            population_count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.class_means.len()
    }

    pub fn population_count(&self) -> u64 {
        self.population_count
    }

    pub fn population_mean(&self) -> &DVector<f64> {
        &self.population_mean
    }

    pub fn class_count(&self, label: i32) -> u64 {
        self.class_counts.get(&label).copied().unwrap_or(0)
    }

    pub fn class_mean(&self, label: i32) -> Option<&DVector<f64>> {
        self.class_means.get(&label)
    }

    pub fn labels(&self) -> impl Iterator<Item = i32> + '_ {
        self.class_means.keys().copied()
    }

    /// Absorb one labeled row into the per-class and population means.
    pub fn observe(&mut self, label: i32, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::StreamFormat(format!(
                "sample has {} features, expected {}",
                x.len(),
                self.dim
            )));
        }
        match self.class_means.get_mut(&label) {
            Some(mean) => {
                let n = self.class_counts[&label] as f64;
                *mean = (&*mean * n + x) / (n + 1.0);
                *self.class_counts.get_mut(&label).unwrap() += 1;
            }
            None => {
                self.class_means.insert(label, x.clone());
                self.class_counts.insert(label, 1);
            }
        }
        let n0 = self.population_count as f64;
        self.population_mean = (&self.population_mean * n0 + x) / (n0 + 1.0);
        self.population_count += 1;
        Ok(())
    }

    /// Between-class scatter Σ_c (N_c/N₀)(m_c − m₀)(m_c − m₀)ᵀ.
    /// Symmetric PSD with rank ≤ C − 1.
    pub fn between_scatter(&self) -> Result<DMatrix<f64>> {
        if self.population_count == 0 {
            return Err(Error::State("no samples observed".into()));
        }
        let n0 = self.population_count as f64;
        let mut s = DMatrix::zeros(self.dim, self.dim);
        for (label, mean) in &self.class_means {
            let w = self.class_counts[label] as f64 / n0;
            let delta = mean - &self.population_mean;
            // outer products are entrywise symmetric, so no re-symmetrization
            s += (&delta * delta.transpose()) * w;
        }
        Ok(s)
    }

    /// Bytes held by the persistent statistics state.
    pub fn state_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + self.class_means.len() * (self.dim * 8 + 48)
            + self.class_counts.len() * 48
            + self.dim * 8
    }
}

/// Scatters from the compacted sketch: S̃_t = B⁺ᵀB⁺/N₀ − m₀m₀ᵀ and
/// S̃_w = S̃_t − S_b. S̃_w is deliberately not projected onto the PSD cone;
/// the solver's ridge absorbs any rounding-induced indefiniteness.
pub fn approx_scatters(stats: &ClassStatistics, b_plus: &DMatrix<f64>) -> Result<ScatterSet> {
    if b_plus.ncols() != stats.dim {
        return Err(Error::Config(format!(
            "sketch dimension {} does not match statistics dimension {}",
            b_plus.ncols(),
            stats.dim
        )));
    }
    let between = stats.between_scatter()?;
    let n0 = stats.population_count as f64;
    let m0 = &stats.population_mean;
    let total = gram(b_plus) / n0 - m0 * m0.transpose();
    let within_approx = &total - &between;
    let total_approx = &within_approx + &between;
    Ok(ScatterSet {
        between,
        total_approx,
        within_approx,
    })
}
