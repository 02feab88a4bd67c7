//! Reduction of the scatter matrices into the sketch basis, the whitened
//! generalized eigensolve, and the frozen model used to embed features.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{spd_inv_sqrt, sym_eigen_desc, symmetrize};
use crate::sketch::SketchState;
use crate::stats::{approx_scatters, ClassStatistics, ScatterSet};

const MODEL_MAGIC: &[u8; 4] = b"SODA";
const MODEL_VERSION: u16 = 1;

/// Frozen discriminant model: an orthonormal reduction basis P (d×k), the
/// discriminant components W (k×r) solving Ŝ_b w = λ(Ŝ_w + εI)w, and the
/// eigenvalues Λ in nonincreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantModel {
    pub reduction: DMatrix<f64>,
    pub transform: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
    pub ridge: f64,
    pub dim: usize,
    pub reduced_dim: usize,
    pub n_components: usize,
}

/// Optional overrides for [`fit_finalize`]; every `None` falls back to the
/// documented default.
#[derive(Debug, Clone, Default)]
pub struct FitOptions {
    /// Basis size k; defaults to min(ℓ, d).
    pub reduced_dim: Option<usize>,
    /// Component count r; defaults to min(k, max(C−1, 1)).
    pub n_components: Option<usize>,
    /// Ridge ε; defaults to 1e-6 · trace(Ŝ_w)/k.
    pub ridge: Option<f64>,
}

/// Congruence projection of the scatters into the sketch basis:
/// Ŝ_b = PᵀS_bP and Ŝ_w = PᵀS̃_wP, re-symmetrized.
pub fn reduce_scatters(
    scatters: &ScatterSet,
    p: &DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let d = scatters.between.nrows();
    if p.nrows() != d || scatters.within_approx.nrows() != d {
        return Err(Error::Config(format!(
            "basis has {} rows but scatters are {}×{}",
            p.nrows(),
            d,
            d
        )));
    }
    if p.ncols() > d {
        return Err(Error::Config(format!(
            "basis has {} columns, more than the dimension {}",
            p.ncols(),
            d
        )));
    }
    let sb = symmetrize(&(p.tr_mul(&scatters.between) * p));
    let sw = symmetrize(&(p.tr_mul(&scatters.within_approx) * p));
    Ok((sb, sw))
}

/// Solves the symmetric-definite generalized eigenproblem
/// Ŝ_b w = λ(Ŝ_w + εI)w by whitening with (Ŝ_w + εI)^{-1/2}, returning the
/// top-r eigenpairs by descending λ. Each column is normalized so that
/// wᵀ(Ŝ_w + εI)w = 1 and sign-fixed (largest-magnitude entry positive).
pub fn solve_discriminant(
    s_b_hat: &DMatrix<f64>,
    s_w_hat: &DMatrix<f64>,
    ridge: f64,
    n_components: usize,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let k = s_w_hat.nrows();
    if s_b_hat.nrows() != k || s_b_hat.ncols() != k || s_w_hat.ncols() != k {
        return Err(Error::Config("scatter matrices must be square and of equal size".into()));
    }
    if n_components == 0 || n_components > k {
        return Err(Error::Config(format!(
            "component count {n_components} out of range 1..={k}"
        )));
    }
    if !ridge.is_finite() || ridge < 0.0 {
        return Err(Error::Config("ridge must be finite and nonnegative".into()));
    }
    let mut m = s_w_hat.clone();
    for i in 0..k {
        m[(i, i)] += ridge;
    }
    let whiten = spd_inv_sqrt(&m)?;
    let a = symmetrize(&(&whiten * s_b_hat * &whiten));
    let (vals, vecs) = sym_eigen_desc(&a);
    let mut w = &whiten * vecs.columns(0, n_components);
    let mut lambda = DVector::zeros(n_components);
    for j in 0..n_components {
        lambda[j] = vals[j].max(0.0);
        let mut col = w.column_mut(j);
        let q = (&m * &col).dot(&col.clone_owned());
        if q > 0.0 {
            col /= q.sqrt();
        }
        let mut arg = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[arg].abs() {
                arg = i;
            }
        }
        if col[arg] < 0.0 {
            col.neg_mut();
        }
    }
    Ok((w, lambda))
}

/// Chains sketch finalization, scatter construction, reduction and the
/// eigensolve into a frozen model.
pub fn fit_finalize(
    sketch: &SketchState,
    stats: &ClassStatistics,
    options: &FitOptions,
) -> Result<DiscriminantModel> {
    let d = sketch.dim();
    if stats.dim() != d {
        return Err(Error::Config(format!(
            "sketch dimension {} does not match statistics dimension {}",
            d,
            stats.dim()
        )));
    }
    if stats.population_count() == 0 {
        return Err(Error::State("cannot fit a model from an empty stream".into()));
    }
    if sketch.rows_seen() != stats.population_count() {
        return Err(Error::State(format!(
            "sketch saw {} rows but statistics saw {}",
            sketch.rows_seen(),
            stats.population_count()
        )));
    }
    let k_max = sketch.sketch_size().min(d);
    let k = options.reduced_dim.unwrap_or(k_max);
    if k == 0 || k > k_max {
        return Err(Error::Config(format!(
            "reduced dimension k={k} out of range 1..={k_max}"
        )));
    }
    let (b_plus, p) = sketch.finalize(k)?;
    let scatters = approx_scatters(stats, &b_plus)?;
    let (sb_hat, sw_hat) = reduce_scatters(&scatters, &p)?;
    let ridge = options
        .ridge
        .unwrap_or_else(|| 1e-6 * sw_hat.trace().max(0.0) / k as f64);
    let c = stats.n_classes();
    let r = options
        .n_components
        .unwrap_or_else(|| k.min((c - 1).max(1)));
    if r == 0 || r > k {
        return Err(Error::Config(format!(
            "component count r={r} out of range 1..={k}"
        )));
    }
    let (w, lambda) = solve_discriminant(&sb_hat, &sw_hat, ridge, r)?;
    Ok(DiscriminantModel {
        reduction: p,
        transform: w,
        eigenvalues: lambda,
        ridge,
        dim: d,
        reduced_dim: k,
        n_components: r,
    })
}

impl DiscriminantModel {
    /// Projects a feature vector into the discriminant space: Wᵀ(Pᵀx).
    pub fn embed(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim {
            return Err(Error::Input(format!(
                "vector has {} features, model expects {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self.transform.tr_mul(&self.reduction.tr_mul(x)))
    }

    /// The combined d×r projection P·W.
    pub fn full_transform(&self) -> DMatrix<f64> {
        &self.reduction * &self.transform
    }

    /// Bytes held by the frozen model.
    pub fn state_bytes(&self) -> usize {
        std::mem::size_of::<Self>()
            + (self.reduction.len() + self.transform.len() + self.eigenvalues.len()) * 8
    }

    /// Serializes the model. Layout: magic "SODA", version u16, then d, k, r
    /// as u32, ridge as f64, P column-major, W column-major, Λ — all
    /// little-endian. The round-trip is bit-exact.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MODEL_MAGIC)?;
        w.write_all(&MODEL_VERSION.to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.reduced_dim as u32).to_le_bytes())?;
        w.write_all(&(self.n_components as u32).to_le_bytes())?;
        w.write_all(&self.ridge.to_le_bytes())?;
        for v in self.reduction.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in self.transform.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in self.eigenvalues.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MODEL_MAGIC {
            return Err(Error::Input("not a discriminant model file (bad magic)".into()));
        }
        let version = read_u16(r)?;
        if version != MODEL_VERSION {
            return Err(Error::Input(format!("unsupported model version {version}")));
        }
        let dim = read_u32(r)? as usize;
        let reduced_dim = read_u32(r)? as usize;
        let n_components = read_u32(r)? as usize;
        if dim == 0 || reduced_dim == 0 || n_components == 0 {
            return Err(Error::Input("model header has zero dimensions".into()));
        }
        let ridge = read_f64(r)?;
        let reduction = read_matrix(r, dim, reduced_dim)?;
        let transform = read_matrix(r, reduced_dim, n_components)?;
        let mut eigenvalues = DVector::zeros(n_components);
        for i in 0..n_components {
            eigenvalues[i] = read_f64(r)?;
        }
        let mut trailing = [0u8; 1];
        match r.read(&mut trailing)? {
            0 => {}
            _ => return Err(Error::Input("trailing bytes after model data".into())),
        }
        Ok(Self {
            reduction,
            transform,
            eigenvalues,
            ridge,
            dim,
            reduced_dim,
            n_components,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f)
    }
}

fn read_u16(r: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_matrix(r: &mut impl Read, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(rows, cols);
    // column-major, matching the in-memory layout
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = read_f64(r)?;
        }
    }
    Ok(m)
}
