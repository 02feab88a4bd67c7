//! Cross-view matching evaluation: embeds queries and gallery with a frozen
//! model, ranks the gallery per query, and scores the ranking with CMC,
//! rank-k rates and mean average precision.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::LabeledSample;
use crate::discriminant::DiscriminantModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Cosine,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::Config(format!(
                "unknown metric {other:?}, expected euclidean or cosine"
            ))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Euclidean => write!(f, "euclidean"),
            Metric::Cosine => write!(f, "cosine"),
        }
    }
}

impl Metric {
    /// Distance between two embedded vectors. Cosine distance of a zero
    /// vector is defined as 1 (no similarity).
    pub fn distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        match self {
            Metric::Euclidean => (a - b).norm(),
            Metric::Cosine => {
                let na = a.norm();
                let nb = b.norm();
                if na == 0.0 || nb == 0.0 {
                    1.0
                } else {
                    1.0 - a.dot(b) / (na * nb)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    pub metric: Metric,
    /// Drop gallery items sharing both label and camera with the query
    /// before ranking. Only applies to pairs where both camera IDs are set.
    pub exclude_same_camera: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            metric: Metric::Euclidean,
            exclude_same_camera: false,
        }
    }
}

/// Matching quality of one query set against one gallery.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    /// cmc[j] = fraction of scored queries whose first correct match
    /// appears at rank ≤ j+1; length equals the gallery size.
    pub cmc: Vec<f64>,
    /// Rank-k matching rates for k in {1, 5, 10, 20}, restricted to k that
    /// fit in the gallery; rank_k[k] equals cmc[k−1] exactly.
    pub rank_k: BTreeMap<u32, f64>,
    /// Mean average precision over queries with at least one relevant
    /// gallery item; NaN (JSON null) when no query has a match.
    pub map: f64,
    pub n_queries: usize,
    pub n_gallery: usize,
    /// Queries with no same-label gallery item; excluded from cmc and map.
    pub skipped_queries: usize,
}

fn sort_by_distance(distances: &mut [(usize, f64)]) {
    distances.sort_by(|a, b| match a.1.total_cmp(&b.1) {
        Ordering::Equal => a.0.cmp(&b.0),
        other => other,
    });
}

fn rank_embedded(
    query: &DVector<f64>,
    gallery: &[DVector<f64>],
    candidates: impl Iterator<Item = usize>,
    metric: Metric,
) -> Vec<usize> {
    let mut distances: Vec<(usize, f64)> = candidates
        .map(|i| (i, metric.distance(query, &gallery[i])))
        .collect();
    sort_by_distance(&mut distances);
    distances.into_iter().map(|(i, _)| i).collect()
}

/// Ranks the whole gallery against one query: indices sorted by ascending
/// embedded distance, ties broken by original index.
pub fn rank_gallery(
    model: &DiscriminantModel,
    query: &LabeledSample,
    gallery: &[LabeledSample],
    metric: Metric,
) -> Result<Vec<usize>> {
    if gallery.is_empty() {
        return Err(Error::Input("gallery is empty".into()));
    }
    let q = model.embed(&query.features)?;
    let embedded = gallery
        .iter()
        .map(|g| model.embed(&g.features))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_embedded(&q, &embedded, 0..gallery.len(), metric))
}

/// Cumulative matching characteristic over per-query rank lists. Returns the
/// curve (length = gallery size) and the number of queries skipped because
/// the gallery holds no item with their label.
pub fn compute_cmc(
    rank_lists: &[Vec<usize>],
    query_labels: &[i32],
    gallery_labels: &[i32],
) -> Result<(Vec<f64>, usize)> {
    check_rank_inputs(rank_lists, query_labels, gallery_labels)?;
    let n_gallery = gallery_labels.len();
    let mut first_match = vec![0u64; n_gallery];
    let mut scored = 0u64;
    let mut skipped = 0usize;
    for (list, &label) in rank_lists.iter().zip(query_labels) {
        match list.iter().position(|&g| gallery_labels[g] == label) {
            Some(pos) => {
                first_match[pos] += 1;
                scored += 1;
            }
            None => skipped += 1,
        }
    }
    let mut cmc = vec![0.0; n_gallery];
    let mut cumulative = 0u64;
    for (slot, &count) in cmc.iter_mut().zip(&first_match) {
        cumulative += count;
        *slot = if scored == 0 {
            0.0
        } else {
            cumulative as f64 / scored as f64
        };
    }
    Ok((cmc, skipped))
}

/// Mean average precision over per-query rank lists. AP of one query is the
/// mean, over positions holding a relevant item, of precision at that
/// position. Queries without a relevant item are skipped; if every query is
/// skipped the mean is NaN.
pub fn compute_map(
    rank_lists: &[Vec<usize>],
    query_labels: &[i32],
    gallery_labels: &[i32],
) -> Result<(f64, usize)> {
    check_rank_inputs(rank_lists, query_labels, gallery_labels)?;
    let mut total = 0.0;
    let mut scored = 0u64;
    let mut skipped = 0usize;
    for (list, &label) in rank_lists.iter().zip(query_labels) {
        let mut hits = 0u64;
        let mut precision_sum = 0.0;
        for (pos, &g) in list.iter().enumerate() {
            if gallery_labels[g] == label {
                hits += 1;
                precision_sum += hits as f64 / (pos + 1) as f64;
            }
        }
        if hits == 0 {
            skipped += 1;
        } else {
            total += precision_sum / hits as f64;
            scored += 1;
        }
    }
    let map = if scored == 0 {
        f64::NAN
    } else {
        total / scored as f64
    };
    Ok((map, skipped))
}

fn check_rank_inputs(
    rank_lists: &[Vec<usize>],
    query_labels: &[i32],
    gallery_labels: &[i32],
) -> Result<()> {
    if rank_lists.len() != query_labels.len() {
        return Err(Error::Input(format!(
            "{} rank lists for {} query labels",
            rank_lists.len(),
            query_labels.len()
        )));
    }
    if gallery_labels.is_empty() {
        return Err(Error::Input("gallery is empty".into()));
    }
    for (i, list) in rank_lists.iter().enumerate() {
        if let Some(&bad) = list.iter().find(|&&g| g >= gallery_labels.len()) {
            return Err(Error::Input(format!(
                "rank list {i} references gallery index {bad}, gallery has {}",
                gallery_labels.len()
            )));
        }
    }
    Ok(())
}

/// Embeds both sides, ranks each query against the gallery (in parallel) and
/// assembles the full report.
pub fn evaluate(
    model: &DiscriminantModel,
    queries: &[LabeledSample],
    gallery: &[LabeledSample],
    options: &EvalOptions,
) -> Result<EvalReport> {
    if gallery.is_empty() {
        return Err(Error::Input("gallery is empty".into()));
    }
    let gallery_embedded = gallery
        .par_iter()
        .map(|s| model.embed(&s.features))
        .collect::<Result<Vec<_>>>()?;
    let rank_lists = queries
        .par_iter()
        .map(|q| {
            let emb = model.embed(&q.features)?;
            let candidates = (0..gallery.len()).filter(|&i| {
                if !options.exclude_same_camera || gallery[i].label != q.label {
                    return true;
                }
                match (q.camera, gallery[i].camera) {
                    (Some(qc), Some(gc)) => qc != gc,
                    _ => true,
                }
            });
            Ok(rank_embedded(&emb, &gallery_embedded, candidates, options.metric))
        })
        .collect::<Result<Vec<_>>>()?;

    let query_labels: Vec<i32> = queries.iter().map(|q| q.label).collect();
    let gallery_labels: Vec<i32> = gallery.iter().map(|g| g.label).collect();
    let (cmc, skipped) = compute_cmc(&rank_lists, &query_labels, &gallery_labels)?;
    let (map, _) = compute_map(&rank_lists, &query_labels, &gallery_labels)?;
    let mut rank_k = BTreeMap::new();
    for k in [1u32, 5, 10, 20] {
        if (k as usize) <= cmc.len() {
            rank_k.insert(k, cmc[k as usize - 1]);
        }
    }
    Ok(EvalReport {
        cmc,
        rank_k,
        map,
        n_queries: queries.len(),
        n_gallery: gallery.len(),
        skipped_queries: skipped,
    })
}

/// Writes the CMC curve as a two-column CSV (1-based rank, rate).
pub fn write_cmc_csv(report: &EvalReport, out: &mut impl std::io::Write) -> Result<()> {
    writeln!(out, "rank,rate")?;
    for (i, rate) in report.cmc.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, rate)?;
    }
    Ok(())
}
