//! Command implementations shared by the binary and the integration tests.

use std::io::{BufReader, Read};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use soda_core::eval::write_cmc_csv;
use soda_core::{
    BoundConfig, BoundReport, ClassStatistics, DiscriminantModel, Error, EvalOptions, EvalReport,
    FitOptions, Result, SketchState, evaluate, verify_bounds,
};

use crate::formats::{self, DataFormat, SampleReader};
use crate::synth::{self, SynthConfig};

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::State(format!("report serialization failed: {e}")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub n: u64,
    pub n_classes: usize,
    pub dim: usize,
    pub sketch_size: usize,
    pub reduced_dim: usize,
    pub n_components: usize,
    pub ridge: f64,
    pub wall_time_ms: f64,
    pub peak_state_bytes: usize,
    pub model_path: String,
}

#[derive(Debug, Clone)]
pub struct StreamSummary {
    pub n: u64,
    pub n_classes: usize,
    pub dim: usize,
    pub peak_state_bytes: usize,
}

/// Fits a model with exactly one pass over `source`: every record updates the
/// sketch and the class statistics once and is then dropped.
pub fn train_stream(
    source: impl Read,
    sketch_size: usize,
    options: &FitOptions,
) -> Result<(DiscriminantModel, StreamSummary)> {
    let mut state: Option<(SketchState, ClassStatistics)> = None;
    let mut peak = 0usize;
    for sample in SampleReader::new(BufReader::new(source))? {
        let sample = sample?;
        let (sketch, stats) = match &mut state {
            Some(pair) => pair,
            None => {
                state = Some((
                    SketchState::new(sketch_size, sample.dim())?,
                    ClassStatistics::new(sample.dim())?,
                ));
                state.as_mut().unwrap()
            }
        };
        stats.observe(sample.label, &sample.features)?;
        sketch.update(&sample.features)?;
        peak = peak.max(sketch.state_bytes() + stats.state_bytes());
    }
    let Some((sketch, stats)) = state else {
        return Err(Error::State("input stream contained no samples".into()));
    };
    let model = soda_core::fit_finalize(&sketch, &stats, options)?;
    peak = peak.max(sketch.state_bytes() + stats.state_bytes() + model.state_bytes());
    let summary = StreamSummary {
        n: stats.population_count(),
        n_classes: stats.n_classes(),
        dim: sketch.dim(),
        peak_state_bytes: peak,
    };
    Ok((model, summary))
}

pub fn cmd_train(
    input: &Path,
    model_path: &Path,
    sketch_size: usize,
    options: &FitOptions,
) -> Result<TrainReport> {
    let started = Instant::now();
    let file = std::fs::File::open(input)
        .map_err(|e| Error::Input(format!("cannot open {}: {e}", input.display())))?;
    let (model, summary) = train_stream(file, sketch_size, options)?;
    model.save(model_path)?;
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(TrainReport {
        n: summary.n,
        n_classes: summary.n_classes,
        dim: summary.dim,
        sketch_size,
        reduced_dim: model.reduced_dim,
        n_components: model.n_components,
        ridge: model.ridge,
        wall_time_ms,
        peak_state_bytes: summary.peak_state_bytes,
        model_path: model_path.display().to_string(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalRunReport {
    #[serde(flatten)]
    pub metrics: EvalReport,
    /// False when no query matched the gallery and mAP is therefore undefined.
    pub map_valid: bool,
    pub warnings: Vec<String>,
}

pub fn cmd_eval(
    model_path: &Path,
    query_path: &Path,
    gallery_path: &Path,
    options: &EvalOptions,
    cmc_out: Option<&Path>,
) -> Result<EvalRunReport> {
    let model = DiscriminantModel::load(model_path)?;
    let queries = formats::read_all(query_path)?;
    let gallery = formats::read_all(gallery_path)?;
    let metrics = evaluate(&model, &queries, &gallery, options)?;
    let mut warnings = Vec::new();
    if metrics.skipped_queries == metrics.n_queries {
        warnings.push(
            "no query identity appears in the gallery; mAP and CMC are undefined".to_string(),
        );
    } else if metrics.skipped_queries > 0 {
        warnings.push(format!(
            "{} of {} queries have no gallery match and were skipped",
            metrics.skipped_queries, metrics.n_queries
        ));
    }
    if let Some(path) = cmc_out {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_cmc_csv(&metrics, &mut file)?;
    }
    let map_valid = !metrics.map.is_nan();
    Ok(EvalRunReport { metrics, map_valid, warnings })
}

/// Reads at most `max_cells / d` records for bound verification; the cap
/// keeps the exact batch computation from exhausting memory.
pub fn cmd_verify(input: &Path, config: &BoundConfig, max_cells: u64) -> Result<BoundReport> {
    let mut samples = Vec::new();
    let mut cells = 0u64;
    for sample in SampleReader::from_path(input)? {
        let sample = sample?;
        cells += sample.dim() as u64;
        if cells > max_cells {
            return Err(Error::Input(format!(
                "input exceeds the verification cap of {max_cells} matrix cells; \
                 raise --max-cells to verify larger streams"
            )));
        }
        samples.push(sample);
    }
    verify_bounds(&samples, config)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthReport {
    pub classes: usize,
    pub per_class: usize,
    pub dim: usize,
    pub seed: u64,
    pub train_rows: usize,
    pub query_rows: usize,
    pub gallery_rows: usize,
    pub train_path: String,
    pub query_path: String,
    pub gallery_path: String,
    pub warnings: Vec<String>,
}

pub fn cmd_synth(
    config: &SynthConfig,
    format: DataFormat,
    out_dir: &Path,
) -> Result<SynthReport> {
    let data = synth::generate(config)?;
    let ext = match format {
        DataFormat::Csv => "csv",
        DataFormat::Sodf => "sodf",
    };
    let train_path = out_dir.join(format!("train.{ext}"));
    let query_path = out_dir.join(format!("query.{ext}"));
    let gallery_path = out_dir.join(format!("gallery.{ext}"));
    formats::write_file(&train_path, format, &data.train, config.dim, true)?;
    formats::write_file(&query_path, format, &data.query, config.dim, true)?;
    formats::write_file(&gallery_path, format, &data.gallery, config.dim, true)?;
    Ok(SynthReport {
        classes: config.classes,
        per_class: config.per_class,
        dim: config.dim,
        seed: config.seed,
        train_rows: data.train.len(),
        query_rows: data.query.len(),
        gallery_rows: data.gallery.len(),
        train_path: train_path.display().to_string(),
        query_path: query_path.display().to_string(),
        gallery_path: gallery_path.display().to_string(),
        warnings: data.warnings,
    })
}
