//! Acceptance gate: one test per release criterion, each printing a
//! `criterion N (...): PASS` line (visible with `--nocapture`). The shared
//! instance generator sweeps class counts {2,3,10}, dimensions {4,16,64},
//! sketch sizes in [2, d], and stream lengths in [50, 2000].

use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;
use tempfile::TempDir;

use soda_cli::commands::train_stream;
use soda_cli::formats;
use soda_core::linalg::{gram, min_eig_sym, spectral_norm_sym};
use soda_core::{
    BoundConfig, BoundReport, ClassStatistics, FitOptions, LabeledSample, SketchState,
    batch_fda, batch_scatters, fisher_score, verify_bounds,
};

const MASTER: u64 = 0x50da_0001;
const N_INSTANCES: usize = 100;

/// Seeded random stream: class count, dimension, sketch size, length, and
/// separation all vary per index so the hundred instances cover the whole
/// supported envelope.
fn instance(i: usize, master: u64) -> (Vec<LabeledSample>, usize) {
    let c = [2usize, 3, 10][i % 3];
    let d = [4usize, 16, 64][(i / 3) % 3];
    let mut rng = ChaCha8Rng::seed_from_u64(master ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let ell = rng.random_range(2..=d);
    let n = rng.random_range(50..=2000usize);
    let sep = rng.random_range(1.0..3.0);
    let spread = rng.random_range(0.3..1.2);
    let means: Vec<DVector<f64>> = (0..c)
        .map(|_| DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)) * sep)
        .collect();
    let mut samples = Vec::with_capacity(n);
    for t in 0..n {
        let label = if t < 2 * c { t % c } else { rng.random_range(0..c) };
        let x = &means[label]
            + DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)) * spread;
        samples.push(LabeledSample::new(label as i32, None, x.iter().copied().collect()).unwrap());
    }
    (samples, ell)
}

fn bound_report(i: usize) -> BoundReport {
    let (samples, ell) = instance(i, MASTER);
    let config = BoundConfig {
        sketch_size: ell,
        reduced_dim: None,
        ridge: None,
        seed: MASTER.wrapping_add(i as u64),
    };
    verify_bounds(&samples, &config).unwrap()
}

#[test]
fn criterion_01_sketch_gram_bounds_hold_at_every_prefix() {
    let started = Instant::now();
    let mut checkpoints = 0usize;
    for i in 0..N_INSTANCES {
        let (samples, ell) = instance(i, MASTER);
        let d = samples[0].dim();
        let n = samples.len();
        let mut sketch = SketchState::new(ell, d).unwrap();
        let mut gram_x = DMatrix::<f64>::zeros(d, d);
        let mut next_check = 1usize;
        for (t, sample) in samples.iter().enumerate() {
            sketch.update(&sample.features).unwrap();
            gram_x.ger(1.0, &sample.features, &sample.features, 1.0);
            let row = t + 1;
            if row == next_check || row == n {
                let diff = &gram_x - gram(sketch.buffer());
                let floor = -1e-9 * spectral_norm_sym(&gram_x);
                let min_eig = min_eig_sym(&diff);
                assert!(
                    min_eig >= floor,
                    "instance {i} row {row}: sketch overshoots the stream gram \
                     (min eig {min_eig:.3e} < {floor:.3e})"
                );
                let gap = spectral_norm_sym(&diff);
                let limit = 2.0 * sketch.frobenius_norm_sq() / ell as f64 + 1e-9;
                assert!(
                    gap <= limit,
                    "instance {i} row {row}: gram gap {gap:.6e} exceeds {limit:.6e}"
                );
                checkpoints += 1;
                if row == next_check {
                    next_check *= 2;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(30),
        "prefix sweep took {elapsed:.2?}, budget is 30 s"
    );
    println!(
        "criterion 1 (sketch gram error bounded at every prefix): PASS \
         ({N_INSTANCES} streams, {checkpoints} checkpoints, {elapsed:.2?})"
    );
}

#[test]
fn criterion_02_within_scatter_ordering_and_gap_bound() {
    for i in 0..N_INSTANCES {
        let r = bound_report(i);
        assert!(
            r.order_psd_pass,
            "instance {i}: S_w - approx not PSD (min eig {:.3e}, norm {:.3e})",
            r.gap_psd_min_eig, r.s_w_spectral_norm
        );
        assert!(
            r.order_gap_pass,
            "instance {i}: within-scatter gap {:.6e} exceeds bound {:.6e}",
            r.gap_spectral_norm, r.gap_bound
        );
    }
    println!("criterion 2 (within-scatter ordering and spectral gap bound): PASS ({N_INSTANCES} instances)");
}

#[test]
fn criterion_03_random_probe_sandwich() {
    for i in 0..N_INSTANCES {
        let r = bound_report(i);
        assert!(
            r.probe_pass,
            "instance {i}: probe sandwich violated (lower {:.3e}, upper {:.3e})",
            r.probe_max_lower_violation, r.probe_max_upper_violation
        );
        assert!(r.probe_max_lower_violation <= 1e-9 && r.probe_max_upper_violation <= 1e-9);
    }
    println!("criterion 3 (200 random unit-vector probes per instance): PASS ({N_INSTANCES} instances, 1e-9 slack)");
}

#[test]
fn criterion_04_two_class_optimum_relationship() {
    let mut applicable = 0usize;
    let mut vacuous = 0usize;
    for i in 0..N_INSTANCES {
        let r = bound_report(i);
        if !r.two_class_applicable {
            continue;
        }
        applicable += 1;
        assert!(
            r.mu2 >= r.mu1 * (1.0 - 1e-9),
            "instance {i}: sketched optimum {:.6e} fell below exact optimum {:.6e}",
            r.mu2,
            r.mu1
        );
        assert!(
            r.two_class_pass,
            "instance {i}: two-class bound failed (lhs {:.6e}, mu2 {:.6e})",
            r.theorem2_lhs, r.mu2
        );
        if r.two_class_vacuous {
            vacuous += 1;
            println!(
                "criterion 4 note: instance {i} vacuous (lower bound {:.3e} < 0)",
                r.theorem2_lhs
            );
        }
    }
    assert!(applicable > 0, "no two-class instances generated");
    assert!(
        vacuous < applicable,
        "every two-class instance was vacuous; the bound was never exercised"
    );
    println!(
        "criterion 4 (two-class optimum relationship): PASS \
         ({applicable} two-class instances, {vacuous} vacuous, {} binding)",
        applicable - vacuous
    );
}

#[test]
fn criterion_05_trace_chain_and_score_bounds() {
    let mut chain_checked = 0usize;
    let mut score_checked = 0usize;
    for i in 0..N_INSTANCES {
        let r = bound_report(i);
        if r.chain_applicable {
            chain_checked += 1;
            assert!(
                r.chain_pass,
                "instance {i}: trace chain violated ({:.6e}, {:.6e}, {:.6e})",
                r.chain_sketch_optimum, r.chain_cross_term, r.chain_exact_optimum
            );
            let slack = 1e-9 * r.chain_exact_optimum.abs() + 1e-12;
            assert!(r.chain_sketch_optimum <= r.chain_exact_optimum + slack);
        }
        if r.score_applicable {
            score_checked += 1;
            assert!(
                r.score_pass,
                "instance {i}: score {:.6e} outside [{:.6e}, {:.6e}]",
                r.score_value, r.theorem5_lower, r.mu1
            );
            let slack = 1e-9 * r.mu1.abs() + 1e-12;
            assert!(r.theorem5_lower <= r.score_value + slack);
            assert!(r.score_value <= r.mu1 + slack);
        }
    }
    assert!(chain_checked > 0 && score_checked > 0);
    println!(
        "criterion 5 (trace chain and sketched-score bounds): PASS \
         (chain on {chain_checked}, score on {score_checked} instances)"
    );
}

#[test]
fn criterion_06_lossless_regime_matches_batch_solver() {
    // Data confined to a rank-5 subspace of R^10; sketch size 6 >= rank, so
    // the sketch is exact and the streaming fit must agree with batch FDA.
    let (d, rank, c, n, ell, ridge, r) = (10usize, 5usize, 4usize, 300usize, 6usize, 1e-3, 3usize);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e55);
    let raw = DMatrix::<f64>::from_fn(d, rank, |_, _| rng.sample::<f64, _>(StandardNormal));
    let basis = raw.qr().q();
    let class_z: Vec<DVector<f64>> = (0..c)
        .map(|_| DVector::from_fn(rank, |_, _| rng.sample::<f64, _>(StandardNormal)) * 3.0)
        .collect();
    let mut samples = Vec::with_capacity(n);
    let mut sketch = SketchState::new(ell, d).unwrap();
    let mut stats = ClassStatistics::new(d).unwrap();
    for t in 0..n {
        let label = t % c;
        let z = &class_z[label]
            + DVector::from_fn(rank, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = &basis * z;
        let sample = LabeledSample::new(label as i32, None, x.iter().copied().collect()).unwrap();
        stats.observe(sample.label, &sample.features).unwrap();
        sketch.update(&sample.features).unwrap();
        samples.push(sample);
    }
    let options = FitOptions {
        reduced_dim: None,
        n_components: Some(r),
        ridge: Some(ridge),
    };
    let model = soda_core::fit_finalize(&sketch, &stats, &options).unwrap();

    let batch = batch_scatters(&samples).unwrap();
    let (_, batch_eigs) = batch_fda(&batch, ridge, r).unwrap();

    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-12);
    assert!(
        rel(model.eigenvalues[0], batch_eigs[0]) <= 1e-6,
        "top eigenvalue mismatch: streaming {:.9e} vs batch {:.9e}",
        model.eigenvalues[0],
        batch_eigs[0]
    );
    for j in 0..r {
        assert!(
            rel(model.eigenvalues[j], batch_eigs[j]) <= 1e-6,
            "eigenvalue {j}: streaming {:.9e} vs batch {:.9e}",
            model.eigenvalues[j],
            batch_eigs[j]
        );
    }
    // The streamed top direction must also achieve the batch optimum as a
    // Rayleigh quotient in the original space.
    let w1 = model.full_transform().columns(0, 1).into_owned();
    let score = fisher_score(&w1, &batch.s_b, &batch.s_w, ridge).unwrap();
    assert!(
        rel(score, batch_eigs[0]) <= 1e-6,
        "top direction scores {score:.9e}, batch optimum is {:.9e}",
        batch_eigs[0]
    );
    println!(
        "criterion 6 (lossless sketch equals batch solver): PASS \
         (top eigenvalue rel err {:.2e})",
        rel(model.eigenvalues[0], batch_eigs[0])
    );
}

#[test]
fn criterion_07_score_is_monotone_in_sketch_size() {
    // Fixed 10-class stream in 64 dimensions; the ridge is fixed across all
    // sketch sizes so only the sketch quality varies.
    let (n, d, c) = (1500usize, 64usize, 10usize);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let means: Vec<DVector<f64>> = (0..c)
        .map(|_| DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let samples: Vec<LabeledSample> = (0..n)
        .map(|t| {
            let label = t % c;
            let x = &means[label]
                + DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            LabeledSample::new(label as i32, None, x.iter().copied().collect()).unwrap()
        })
        .collect();
    let batch = batch_scatters(&samples).unwrap();
    // Large enough to keep the sketched within scatter positive definite even
    // at the smallest sketch size (worst-case sketch error at ell = 2).
    let ridge = 1.05 * 2.0 * batch.frobenius_norm_sq / (n as f64 * 2.0);

    let mut scores = Vec::new();
    for ell in [2usize, 4, 8, 16, 32, 64] {
        let mut sketch = SketchState::new(ell, d).unwrap();
        let mut stats = ClassStatistics::new(d).unwrap();
        for s in &samples {
            stats.observe(s.label, &s.features).unwrap();
            sketch.update(&s.features).unwrap();
        }
        let options = FitOptions {
            reduced_dim: None,
            n_components: Some(1),
            ridge: Some(ridge),
        };
        let model = soda_core::fit_finalize(&sketch, &stats, &options).unwrap();
        let w1 = model.full_transform().columns(0, 1).into_owned();
        scores.push(fisher_score(&w1, &batch.s_b, &batch.s_w, ridge).unwrap());
    }
    for pair in scores.windows(2) {
        assert!(
            pair[1] >= pair[0] - 1e-6,
            "score decreased along sketch sizes: {scores:?}"
        );
    }
    println!(
        "criterion 7 (top score nondecreasing in sketch size): PASS (scores {:?})",
        scores.iter().map(|s| (s * 1e4).round() / 1e4).collect::<Vec<_>>()
    );
}

fn soda(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_soda"))
        .args(args)
        .output()
        .expect("failed to spawn soda");
    assert!(
        out.status.success(),
        "soda {args:?} failed\nstderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn criterion_08_end_to_end_synthetic_matching() {
    let started = Instant::now();
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().to_str().unwrap().to_string();
    soda(&[
        "synth", "--classes", "50", "--per-class", "20", "--dim", "32",
        "--between-spread", "10", "--within-spread", "1", "--seed", "808",
        "--format", "sodf", "--out", &out_dir,
    ]);
    let train = dir.path().join("train.sodf");
    let query = dir.path().join("query.sodf");
    let gallery = dir.path().join("gallery.sodf");
    let model = dir.path().join("model.bin");
    soda(&[
        "train", "--input", train.to_str().unwrap(), "--model", model.to_str().unwrap(),
        "--sketch-size", "32",
    ]);
    let out = soda(&[
        "eval", "--model", model.to_str().unwrap(), "--query", query.to_str().unwrap(),
        "--gallery", gallery.to_str().unwrap(),
    ]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rank1 = report["rank_k"]["1"].as_f64().unwrap();
    let map = report["map"].as_f64().unwrap();
    assert!(rank1 >= 0.95, "rank-1 {rank1} below 0.95");
    assert!(map >= 0.90, "mAP {map} below 0.90");

    // Sanity-check the thresholds with a model-free nearest-class-mean
    // matcher on the same evaluation split.
    let queries = formats::read_all(&query).unwrap();
    let gallery_rows = formats::read_all(&gallery).unwrap();
    let mut sums: std::collections::BTreeMap<i32, (DVector<f64>, f64)> =
        std::collections::BTreeMap::new();
    for g in &gallery_rows {
        let entry = sums
            .entry(g.label)
            .or_insert_with(|| (DVector::zeros(g.dim()), 0.0));
        entry.0 += &g.features;
        entry.1 += 1.0;
    }
    let means: Vec<(i32, DVector<f64>)> =
        sums.into_iter().map(|(l, (s, n))| (l, s / n)).collect();
    let correct = queries
        .iter()
        .filter(|q| {
            means
                .iter()
                .min_by(|a, b| {
                    (&a.1 - &q.features).norm().total_cmp(&(&b.1 - &q.features).norm())
                })
                .map(|(l, _)| *l == q.label)
                .unwrap_or(false)
        })
        .count();
    let ncm_accuracy = correct as f64 / queries.len() as f64;
    assert!(
        ncm_accuracy >= 0.95,
        "nearest-class-mean oracle only reaches {ncm_accuracy}; thresholds are miscalibrated"
    );

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "end-to-end run took {elapsed:.2?}");
    println!(
        "criterion 8 (synthetic two-view matching): PASS \
         (rank-1 {rank1:.4}, mAP {map:.4}, mean-matcher {ncm_accuracy:.4}, {elapsed:.2?})"
    );
}

#[test]
fn criterion_09_streaming_statistics_equal_batch() {
    for i in 0..N_INSTANCES {
        let (samples, _) = instance(i, MASTER);
        let d = samples[0].dim();
        let mut stats = ClassStatistics::new(d).unwrap();
        for s in &samples {
            stats.observe(s.label, &s.features).unwrap();
        }
        let batch = batch_scatters(&samples).unwrap();

        assert_eq!(stats.population_count() as usize, batch.n);
        let mean_err = (stats.population_mean() - &batch.mean).norm();
        assert!(
            mean_err <= 1e-10 * (1.0 + batch.mean.norm()),
            "instance {i}: population mean drift {mean_err:.3e}"
        );
        for (label, batch_mean) in &batch.class_means {
            assert_eq!(stats.class_count(*label), batch.class_counts[label]);
            let streamed = stats.class_mean(*label).unwrap();
            let err = (streamed - batch_mean).norm();
            assert!(
                err <= 1e-10 * (1.0 + batch_mean.norm()),
                "instance {i} class {label}: mean drift {err:.3e}"
            );
        }
        assert_eq!(stats.n_classes(), batch.class_counts.len());
        let s_b = stats.between_scatter().unwrap();
        let diff = (&s_b - &batch.s_b).norm();
        assert!(
            diff <= 1e-10 * batch.s_b.norm().max(1e-12),
            "instance {i}: between scatter drift {diff:.3e}"
        );
    }
    println!("criterion 9 (streaming means/counts/between-scatter equal batch): PASS ({N_INSTANCES} instances)");
}

/// Brute-force CMC: for each rank, count from scratch how many queries have
/// their first correct match at or before it.
fn cmc_by_counting(
    rank_lists: &[Vec<usize>],
    query_labels: &[i32],
    gallery_labels: &[i32],
) -> (Vec<f64>, usize) {
    let first_match = |q: usize| -> Option<usize> {
        rank_lists[q]
            .iter()
            .position(|&g| gallery_labels[g] == query_labels[q])
    };
    let scored = (0..query_labels.len())
        .filter(|&q| first_match(q).is_some())
        .count();
    let skipped = query_labels.len() - scored;
    let mut cmc = vec![0.0; gallery_labels.len()];
    for (rank, slot) in cmc.iter_mut().enumerate() {
        let hits = (0..query_labels.len())
            .filter(|&q| first_match(q).is_some_and(|p| p <= rank))
            .count();
        *slot = if scored == 0 {
            0.0
        } else {
            hits as f64 / scored as f64
        };
    }
    (cmc, skipped)
}

/// Brute-force mAP: collect the match positions of each query, average the
/// precisions at those positions, then average over scored queries.
fn map_by_positions(
    rank_lists: &[Vec<usize>],
    query_labels: &[i32],
    gallery_labels: &[i32],
) -> (f64, usize) {
    let mut total = 0.0;
    let mut scored = 0usize;
    let mut skipped = 0usize;
    for (list, &label) in rank_lists.iter().zip(query_labels) {
        let positions: Vec<usize> = list
            .iter()
            .enumerate()
            .filter(|&(_, &g)| gallery_labels[g] == label)
            .map(|(pos, _)| pos)
            .collect();
        if positions.is_empty() {
            skipped += 1;
            continue;
        }
        let mut ap = 0.0;
        for (hit, &pos) in positions.iter().enumerate() {
            ap += (hit + 1) as f64 / (pos + 1) as f64;
        }
        total += ap / positions.len() as f64;
        scored += 1;
    }
    let map = if scored == 0 { f64::NAN } else { total / scored as f64 };
    (map, skipped)
}

#[test]
fn criterion_10_metric_oracle_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac1);
    for case in 0..1000 {
        let n_gallery = rng.random_range(1..=50usize);
        let n_queries = rng.random_range(1..=20usize);
        let n_labels = rng.random_range(1..=6i32);
        let gallery_labels: Vec<i32> =
            (0..n_gallery).map(|_| rng.random_range(0..n_labels)).collect();
        let query_labels: Vec<i32> =
            (0..n_queries).map(|_| rng.random_range(0..n_labels)).collect();
        let rank_lists: Vec<Vec<usize>> = (0..n_queries)
            .map(|_| {
                let mut perm: Vec<usize> = (0..n_gallery).collect();
                for j in (1..perm.len()).rev() {
                    perm.swap(j, rng.random_range(0..=j));
                }
                perm
            })
            .collect();

        let (cmc, skipped) =
            soda_core::eval::compute_cmc(&rank_lists, &query_labels, &gallery_labels).unwrap();
        let (cmc_bf, skipped_bf) = cmc_by_counting(&rank_lists, &query_labels, &gallery_labels);
        assert_eq!(cmc, cmc_bf, "case {case}: CMC mismatch");
        assert_eq!(skipped, skipped_bf, "case {case}: skip count mismatch");

        let (map, map_skipped) =
            soda_core::eval::compute_map(&rank_lists, &query_labels, &gallery_labels).unwrap();
        let (map_bf, map_skipped_bf) =
            map_by_positions(&rank_lists, &query_labels, &gallery_labels);
        assert_eq!(map_skipped, map_skipped_bf, "case {case}: mAP skip mismatch");
        assert!(
            map == map_bf || (map.is_nan() && map_bf.is_nan()),
            "case {case}: mAP {map} != brute force {map_bf}"
        );
    }
    println!("criterion 10 (CMC and mAP match brute force exactly): PASS (1000 instances)");
}

fn resource_stream(n: usize, d: usize, c: usize, seed: u64) -> Vec<LabeledSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<DVector<f64>> = (0..c)
        .map(|_| DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal)) * 2.0)
        .collect();
    (0..n)
        .map(|t| {
            let label = t % c;
            let x = &means[label]
                + DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            LabeledSample::new(label as i32, None, x.iter().copied().collect()).unwrap()
        })
        .collect()
}

fn timed_train(path: &Path, sketch_size: usize) -> (Duration, usize) {
    let file = fs::File::open(path).unwrap();
    let started = Instant::now();
    let (_, summary) =
        train_stream(BufReader::new(file), sketch_size, &FitOptions::default()).unwrap();
    (started.elapsed(), summary.peak_state_bytes)
}

#[test]
fn criterion_11_resource_contract() {
    let (d, ell, c) = (64usize, 64usize, 10usize);
    let dir = TempDir::new().unwrap();
    let samples = resource_stream(200_000, d, c, 0x11ac);
    let half = dir.path().join("n1.sodf");
    let full = dir.path().join("n2.sodf");
    formats::write_file(&half, formats::DataFormat::Sodf, &samples[..100_000], d, false).unwrap();
    formats::write_file(&full, formats::DataFormat::Sodf, &samples, d, false).unwrap();
    drop(samples);

    // Warm up caches and the allocator, then take the best of two runs each.
    timed_train(&half, ell);
    let (t1a, peak) = timed_train(&half, ell);
    let (t1b, _) = timed_train(&half, ell);
    let (t2a, _) = timed_train(&full, ell);
    let (t2b, _) = timed_train(&full, ell);
    let t1 = t1a.min(t1b);
    let t2 = t2a.min(t2b);

    // Sketch buffer (2 ell rows) + class means (C) + model (k + r columns),
    // all d-dimensional f64: the contract allows 4x of (2 ell + k + C) d 8.
    let k = ell.min(d);
    let budget = 4 * (2 * ell + k + c) * d * 8;
    assert!(
        peak <= budget,
        "peak state {peak} bytes exceeds budget {budget} bytes"
    );

    let limit = t1.mul_f64(3.0) + Duration::from_millis(500);
    assert!(
        t2 <= limit,
        "training 200k rows took {t2:.2?}, more than 1.5x linear over {t1:.2?}"
    );
    println!(
        "criterion 11 (memory within 4x of state budget, time within 1.5x linear): PASS \
         (peak {peak} B of {budget} B, 100k in {t1:.2?}, 200k in {t2:.2?})"
    );
}
