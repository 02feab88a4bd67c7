//! Frequent-directions sketch of the streamed data matrix.
//!
//! The sketch keeps a 2ℓ×d buffer B. Incoming rows fill zero rows; once the
//! buffer is full it is shrunk: B = UΣVᵀ, ξ is the (ℓ+1)-th singular value,
//! and B is replaced by sqrt(max(Σ² − ξ²I, 0))·Vᵀ, which zeroes at least half
//! the rows. At every point of the stream BᵀB never overestimates XᵀX along
//! any direction and trails it by at most 2‖X‖_F²/ℓ in spectral norm.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{thin_svd, ThinSvd, SV_RELATIVE_ZERO};

#[derive(Debug, Clone)]
pub struct SketchState {
    buffer: DMatrix<f64>,
    sketch_size: usize,
    dim: usize,
    fill_count: usize,
    rows_seen: u64,
    last_basis: Option<DMatrix<f64>>,
    frobenius_accum: f64,
}

impl SketchState {
    pub fn new(sketch_size: usize, dim: usize) -> Result<Self> {
        if sketch_size == 0 {
            return Err(Error::Config("sketch size must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::Config("feature dimension must be at least 1".into()));
        }
        Ok(Self {
            buffer: DMatrix::zeros(2 * sketch_size, dim),
            sketch_size,
            dim,
            fill_count: 0,
            rows_seen: 0,
            last_basis: None,
            frobenius_accum: 0.0,
        })
    }

    pub fn sketch_size(&self) -> usize {
        self.sketch_size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fill_count(&self) -> usize {
        self.fill_count
    }

    pub fn rows_seen(&self) -> u64 {
        self.rows_seen
    }

    /// Running Σ‖xᵢ‖² over every streamed row; never reduced by shrinks.
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.frobenius_accum
    }

    pub fn buffer(&self) -> &DMatrix<f64> {
        &self.buffer
    }

    /// Right singular vectors (as rows) from the most recent shrink.
    pub fn last_basis(&self) -> Option<&DMatrix<f64>> {
        self.last_basis.as_ref()
    }

    /// Absorb one row. Amortized O(ℓd) per row; an SVD runs every ~ℓ rows.
    pub fn update(&mut self, row: &DVector<f64>) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::StreamFormat(format!(
                "row has {} features, expected {}",
                row.len(),
                self.dim
            )));
        }
        if let Some(i) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::StreamFormat(format!("feature {i} is not finite")));
        }
        debug_assert!(self.fill_count < 2 * self.sketch_size);
        for j in 0..self.dim {
            self.buffer[(self.fill_count, j)] = row[j];
        }
        self.fill_count += 1;
        self.rows_seen += 1;
        self.frobenius_accum += row.norm_squared();
        if self.fill_count == 2 * self.sketch_size {
            self.shrink()?;
        }
        Ok(())
    }

    /// Shrink the buffer in place: rotate onto the right singular vectors
    /// and subtract the (ℓ+1)-th squared singular value from every squared
    /// singular value. Leaves at most ℓ nonzero rows, sorted by weight.
    pub fn shrink(&mut self) -> Result<()> {
        let svd = thin_svd(&self.buffer)?;
        let (xi2, floor) = self.shrink_threshold(&svd);
        self.buffer.fill(0.0);
        let s = &svd.singular_values;
        let mut kept = 0;
        for i in 0..s.len() {
            let scale = (s[i] * s[i] - xi2).max(0.0).sqrt();
            if scale <= floor {
                break;
            }
            for j in 0..self.dim {
                self.buffer[(kept, j)] = scale * svd.vt[(i, j)];
            }
            kept += 1;
        }
        self.fill_count = kept;
        self.last_basis = Some(svd.vt);
        Ok(())
    }

    /// Final compaction. Runs a fresh SVD on the current buffer (so the
    /// returned basis matches it exactly, even right after a shrink) and
    /// returns the compacted sketch B⁺ (ℓ×d, zero rows trailing) together
    /// with the first k right singular vectors as columns of P (d×k).
    pub fn finalize(&self, k: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        if self.rows_seen == 0 {
            return Err(Error::State(
                "cannot finalize a sketch before any row was streamed".into(),
            ));
        }
        let k_max = self.sketch_size.min(self.dim);
        if k == 0 || k > k_max {
            return Err(Error::Config(format!(
                "basis size k={k} out of range 1..={k_max}"
            )));
        }
        let svd = thin_svd(&self.buffer)?;
        let (xi2, floor) = self.shrink_threshold(&svd);
        let s = &svd.singular_values;
        let mut b_plus = DMatrix::zeros(self.sketch_size, self.dim);
        for i in 0..s.len().min(self.sketch_size) {
            let scale = (s[i] * s[i] - xi2).max(0.0).sqrt();
            if scale <= floor {
                break;
            }
            for j in 0..self.dim {
                b_plus[(i, j)] = scale * svd.vt[(i, j)];
            }
        }
        let p = svd.vt.rows(0, k).transpose();
        Ok((b_plus, p))
    }

    /// ξ² for the shrink plus the absolute floor under which a singular
    /// value counts as zero. ξ is the (ℓ+1)-th singular value when at least
    /// ℓ+1 of them are nonzero, else 0.
    fn shrink_threshold(&self, svd: &ThinSvd) -> (f64, f64) {
        let s = &svd.singular_values;
        let floor = SV_RELATIVE_ZERO * s[0];
        let xi = if s.len() > self.sketch_size && s[self.sketch_size] > floor {
            s[self.sketch_size]
        } else {
            0.0
        };
        (xi * xi, floor)
    }

    /// Bytes held by the persistent sketch state (buffer + stored basis).
    pub fn state_bytes(&self) -> usize {
        let mut bytes = std::mem::size_of::<Self>() + self.buffer.len() * 8;
        if let Some(b) = &self.last_basis {
            bytes += b.len() * 8;
        }
        bytes
    }
}
