//! Ground-truth harness for the streaming path: exact batch scatters from
//! stored samples, batch Fisher discriminant analysis, Fisher scores, and a
//! numerical audit of the sketch approximation guarantees.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::LabeledSample;
use crate::error::{Error, Result};
use crate::linalg::{gram, min_eig_sym, spectral_norm_sym, thin_svd};
use crate::sketch::SketchState;

/// Relative slack for the positive-semidefinite ordering checks.
pub const PSD_SLACK_REL: f64 = 1e-9;
/// Absolute slack added on top of the spectral-gap bound.
pub const GAP_SLACK_ABS: f64 = 1e-9;
/// Per-vector slack for the sampled quadratic-form sandwich.
pub const PROBE_SLACK_ABS: f64 = 1e-9;
/// Relative slack for eigenvalue and trace-chain comparisons.
pub const CHAIN_SLACK_REL: f64 = 1e-9;
/// Absolute floor under the relative chain slack.
pub const CHAIN_SLACK_ABS: f64 = 1e-12;
/// Singular values of the between scatter below this fraction of the largest
/// count as zero when ranking it.
pub const BETWEEN_RANK_REL: f64 = 1e-10;
/// Number of random unit vectors drawn for the sampled sandwich check.
pub const N_PROBE_VECTORS: usize = 200;

/// Exact scatter matrices computed in one shot from stored samples, together
/// with the summary quantities the bound checks need.
#[derive(Debug, Clone)]
pub struct BatchScatters {
    pub s_w: DMatrix<f64>,
    pub s_b: DMatrix<f64>,
    pub s_t: DMatrix<f64>,
    pub mean: DVector<f64>,
    pub class_means: BTreeMap<i32, DVector<f64>>,
    pub class_counts: BTreeMap<i32, u64>,
    pub n: usize,
    pub frobenius_norm_sq: f64,
    pub max_sq_row_norm: f64,
}

impl BatchScatters {
    pub fn n_classes(&self) -> usize {
        self.class_counts.len()
    }
}

/// Computes the within, between and total scatters directly from the data.
/// The total scatter is built from its own definition and then checked
/// against the within/between sum rather than derived from it.
pub fn batch_scatters(samples: &[LabeledSample]) -> Result<BatchScatters> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::State("cannot compute scatters from an empty sample set".into()));
    }
    let d = samples[0].features.len();
    for (i, s) in samples.iter().enumerate() {
        if s.features.len() != d {
            return Err(Error::Input(format!(
                "sample {i} has {} features, expected {d}",
                s.features.len()
            )));
        }
    }
    let nf = n as f64;
    let mut class_sums: BTreeMap<i32, DVector<f64>> = BTreeMap::new();
    let mut class_counts: BTreeMap<i32, u64> = BTreeMap::new();
    let mut total_sum = DVector::zeros(d);
    let mut frobenius_norm_sq = 0.0;
    let mut max_sq_row_norm: f64 = 0.0;
    for s in samples {
        let entry = class_sums
            .entry(s.label)
            .or_insert_with(|| DVector::zeros(d));
        *entry += &s.features;
        *class_counts.entry(s.label).or_insert(0) += 1;
        total_sum += &s.features;
        let sq = s.features.norm_squared();
        frobenius_norm_sq += sq;
        max_sq_row_norm = max_sq_row_norm.max(sq);
    }
    let mean = &total_sum / nf;
    let class_means: BTreeMap<i32, DVector<f64>> = class_sums
        .iter()
        .map(|(&c, sum)| (c, sum / class_counts[&c] as f64))
        .collect();

    let mut s_b = DMatrix::zeros(d, d);
    for (c, m_c) in &class_means {
        let delta = m_c - &mean;
        s_b += (&delta * delta.transpose()) * (class_counts[c] as f64 / nf);
    }
    let mut s_w = DMatrix::zeros(d, d);
    let mut s_t = DMatrix::zeros(d, d);
    for s in samples {
        let dw = &s.features - &class_means[&s.label];
        s_w += (&dw * dw.transpose()) / nf;
        let dt = &s.features - &mean;
        s_t += (&dt * dt.transpose()) / nf;
    }

    let residual = (&s_t - (&s_w + &s_b)).norm();
    if residual > 1e-10 * s_t.norm().max(1.0) {
        return Err(Error::Numerical(format!(
            "scatter decomposition failed its consistency check (residual {residual:.3e})"
        )));
    }
    Ok(BatchScatters {
        s_w,
        s_b,
        s_t,
        mean,
        class_means,
        class_counts,
        n,
        frobenius_norm_sq,
        max_sq_row_norm,
    })
}

/// Batch Fisher discriminant analysis on the exact scatters. Same contract as
/// the streaming solver, so the two routes are directly comparable.
pub fn batch_fda(
    scatters: &BatchScatters,
    ridge: f64,
    n_components: usize,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    crate::discriminant::solve_discriminant(&scatters.s_b, &scatters.s_w, ridge, n_components)
}

/// Trace-ratio objective tr(Wᵀ S_num W) / tr(Wᵀ (S_den + εI) W).
pub fn fisher_score(
    w: &DMatrix<f64>,
    s_num: &DMatrix<f64>,
    s_den: &DMatrix<f64>,
    ridge: f64,
) -> Result<f64> {
    if w.nrows() != s_num.nrows() || w.nrows() != s_den.nrows() {
        return Err(Error::Config("projection and scatters have mismatched dimensions".into()));
    }
    let num = (s_num * w).dot(w);
    let den = (s_den * w).dot(w) + ridge * w.norm_squared();
    if den <= 0.0 {
        return Err(Error::Numerical(
            "trace-ratio denominator is not positive; add a ridge".into(),
        ));
    }
    Ok(num / den)
}

/// Inputs for [`verify_bounds`]. `reduced_dim` defaults to min(ℓ, d); the
/// ridge defaults to a value just large enough to make both regularized
/// within scatters safely positive definite, and the same ridge is applied
/// to the exact and sketched problems.
#[derive(Debug, Clone)]
pub struct BoundConfig {
    pub sketch_size: usize,
    pub reduced_dim: Option<usize>,
    pub ridge: Option<f64>,
    pub seed: u64,
}

/// Every measured quantity and pass flag from one bound-verification run.
/// Pass flags are recomputable from the stored reals and the tolerance
/// constants alone. Quantities belonging to a check that was not applicable
/// are left at zero with the matching `*_applicable` flag false.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub dim: usize,
    pub n_classes: usize,
    pub sketch_size: usize,
    pub k_used: usize,
    pub ridge: f64,
    pub s_w_spectral_norm: f64,
    pub gap_psd_min_eig: f64,
    pub gap_spectral_norm: f64,
    pub gap_bound: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub s0: f64,
    pub rb: usize,
    pub max_sq_row_norm: f64,
    pub order_psd_pass: bool,
    pub order_gap_pass: bool,
    pub two_class_applicable: bool,
    pub two_class_vacuous: bool,
    pub theorem2_lhs: f64,
    pub two_class_pass: bool,
    pub chain_applicable: bool,
    pub chain_sketch_optimum: f64,
    pub chain_cross_term: f64,
    pub chain_exact_optimum: f64,
    pub chain_pass: bool,
    pub probe_max_lower_violation: f64,
    pub probe_max_upper_violation: f64,
    pub probe_pass: bool,
    pub score_applicable: bool,
    pub theorem5_lower: f64,
    pub score_value: f64,
    pub score_pass: bool,
    pub all_pass: bool,
}

fn quad(m: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    (m * v).dot(v)
}

/// Streams the samples through a fresh sketch, rebuilds the approximate
/// within scatter against the exact batch quantities, and audits every
/// inequality the sketch is supposed to satisfy.
pub fn verify_bounds(samples: &[LabeledSample], config: &BoundConfig) -> Result<BoundReport> {
    let batch = batch_scatters(samples)?;
    let d = batch.mean.len();
    let ell = config.sketch_size;
    let k_used = config.reduced_dim.unwrap_or_else(|| ell.min(d));

    let mut sketch = SketchState::new(ell, d)?;
    for s in samples {
        sketch.update(&s.features)?;
    }
    let (b_plus, _p) = sketch.finalize(k_used)?;

    let nf = batch.n as f64;
    let s_t_approx = gram(&b_plus) / nf - &batch.mean * batch.mean.transpose();
    let s_w_approx = &s_t_approx - &batch.s_b;

    let s_w_spectral_norm = spectral_norm_sym(&batch.s_w);
    let diff = &batch.s_w - &s_w_approx;
    let gap_psd_min_eig = min_eig_sym(&diff);
    let gap_spectral_norm = spectral_norm_sym(&diff);
    let gap_bound = 2.0 * batch.frobenius_norm_sq / (nf * ell as f64);
    let order_psd_pass = gap_psd_min_eig >= -PSD_SLACK_REL * s_w_spectral_norm;
    let order_gap_pass = gap_spectral_norm <= gap_bound + GAP_SLACK_ABS;

    // random unit-vector sandwich
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut probe_max_lower_violation = f64::NEG_INFINITY;
    let mut probe_max_upper_violation = f64::NEG_INFINITY;
    for _ in 0..N_PROBE_VECTORS {
        let v = loop {
            let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let norm = v.norm();
            if norm > 1e-12 {
                break v / norm;
            }
        };
        let approx = quad(&s_w_approx, &v);
        let exact = quad(&batch.s_w, &v);
        probe_max_lower_violation = probe_max_lower_violation.max(approx - exact);
        probe_max_upper_violation = probe_max_upper_violation.max(exact - (approx + gap_bound));
    }
    let probe_pass = probe_max_lower_violation <= PROBE_SLACK_ABS
        && probe_max_upper_violation <= PROBE_SLACK_ABS;

    // rank and smallest retained singular value of the between scatter
    let sv_b = thin_svd(&batch.s_b)?.singular_values;
    let top = sv_b.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = BETWEEN_RANK_REL * top;
    let retained: Vec<f64> = sv_b.iter().copied().filter(|&s| s > cutoff).collect();
    let rb = retained.len();
    let s0 = retained.iter().copied().fold(f64::INFINITY, f64::min);
    let s0 = if rb == 0 { 0.0 } else { s0 };

    let mut report = BoundReport {
        n: batch.n,
        dim: d,
        n_classes: batch.n_classes(),
        sketch_size: ell,
        k_used,
        ridge: 0.0,
        s_w_spectral_norm,
        gap_psd_min_eig,
        gap_spectral_norm,
        gap_bound,
        mu1: 0.0,
        mu2: 0.0,
        s0,
        rb,
        max_sq_row_norm: batch.max_sq_row_norm,
        order_psd_pass,
        order_gap_pass,
        two_class_applicable: false,
        two_class_vacuous: false,
        theorem2_lhs: 0.0,
        two_class_pass: true,
        chain_applicable: false,
        chain_sketch_optimum: 0.0,
        chain_cross_term: 0.0,
        chain_exact_optimum: 0.0,
        chain_pass: true,
        probe_max_lower_violation,
        probe_max_upper_violation,
        probe_pass,
        score_applicable: false,
        theorem5_lower: 0.0,
        score_value: 0.0,
        score_pass: true,
        all_pass: false,
    };

    if rb > 0 {
        // Shared ridge for the exact and sketched problems. Defaulting to the
        // worst-case sketch loss keeps the sketched denominator from going
        // near-singular in directions the sketch dropped, which would make
        // the comparison meaningless; the floor additionally guarantees both
        // regularized scatters clear the definiteness gate of the solve.
        let ridge = config.ridge.unwrap_or_else(|| {
            let worst_neg = (-min_eig_sym(&s_w_approx)).max(-min_eig_sym(&batch.s_w)).max(0.0);
            let scale = spectral_norm_sym(&batch.s_w).max(spectral_norm_sym(&s_w_approx));
            let pd_floor = worst_neg * 1.001 + 1e-9 * scale + 1e-12;
            gap_bound.max(pd_floor)
        });
        report.ridge = ridge;

        let (w1, l1) = crate::discriminant::solve_discriminant(&batch.s_b, &batch.s_w, ridge, 1)?;
        let (w2, l2) = crate::discriminant::solve_discriminant(&batch.s_b, &s_w_approx, ridge, 1)?;
        let mu1 = l1[0];
        let mu2 = l2[0];
        report.mu1 = mu1;
        report.mu2 = mu2;

        // scale both directions to wᵀ S_b w = 1
        let w1 = w1.column(0).into_owned();
        let w2 = w2.column(0).into_owned();
        let q1 = quad(&batch.s_b, &w1);
        let q2 = quad(&batch.s_b, &w2);
        if mu1 > 0.0 && mu2 > 0.0 && q1 > 0.0 && q2 > 0.0 {
            let w1 = w1 / q1.sqrt();
            let w2 = w2 / q2.sqrt();
            let ridged = |m: &DMatrix<f64>, v: &DVector<f64>| quad(m, v) + ridge * v.norm_squared();

            if batch.n_classes() == 2 {
                report.two_class_applicable = true;
                let lhs = 1.0 / mu1
                    - 2.0 / (s0 * rb as f64).sqrt() * batch.frobenius_norm_sq / (nf * ell as f64);
                report.theorem2_lhs = lhs;
                report.two_class_vacuous = lhs < 0.0;
                let inv_mu2 = 1.0 / mu2;
                let inv_mu1 = 1.0 / mu1;
                let right_ok = inv_mu2 <= inv_mu1 * (1.0 + CHAIN_SLACK_REL) + CHAIN_SLACK_ABS;
                let left_ok = report.two_class_vacuous
                    || lhs <= inv_mu2 * (1.0 + CHAIN_SLACK_REL) + CHAIN_SLACK_ABS;
                report.two_class_pass = right_ok && left_ok;
            }

            report.chain_applicable = true;
            report.chain_sketch_optimum = ridged(&s_w_approx, &w2);
            report.chain_cross_term = ridged(&s_w_approx, &w1);
            report.chain_exact_optimum = ridged(&batch.s_w, &w1);
            report.chain_pass = report.chain_sketch_optimum
                <= report.chain_cross_term * (1.0 + CHAIN_SLACK_REL) + CHAIN_SLACK_ABS
                && report.chain_cross_term
                    <= report.chain_exact_optimum * (1.0 + CHAIN_SLACK_REL) + CHAIN_SLACK_ABS;

            report.score_applicable = true;
            let w2_mat = DMatrix::from_column_slice(d, 1, w2.as_slice());
            let score = fisher_score(&w2_mat, &batch.s_b, &batch.s_w, ridge)?;
            report.score_value = score;
            report.theorem5_lower = 1.0
                / (1.0 / mu1
                    + (2.0 * k_used as f64 / (s0 * rb as f64)) * batch.max_sq_row_norm
                        / ell as f64);
            report.score_pass = report.theorem5_lower
                <= score * (1.0 + CHAIN_SLACK_REL) + CHAIN_SLACK_ABS
                && score <= mu1 * (1.0 + CHAIN_SLACK_REL) + CHAIN_SLACK_ABS;
        }
    }

    report.all_pass = report.order_psd_pass
        && report.order_gap_pass
        && report.probe_pass
        && (!report.two_class_applicable || report.two_class_pass)
        && (!report.chain_applicable || report.chain_pass)
        && (!report.score_applicable || report.score_pass);
    Ok(report)
}
