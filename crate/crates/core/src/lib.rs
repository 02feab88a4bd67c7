//! One-pass streaming discriminant analysis.
//!
//! The library keeps a fixed-size frequent-directions sketch of the data
//! stream next to running per-class means. After a single pass, the sketch
//! yields an approximate within-class scatter and a small basis in which a
//! regularized Fisher discriminant is solved. A batch oracle recomputes
//! everything from stored data so the approximation guarantees can be
//! checked numerically, and an evaluation module scores cross-view matching
//! with CMC and mAP.

pub mod data;
pub mod discriminant;
pub mod error;
pub mod eval;
pub mod linalg;
pub mod oracle;
pub mod sketch;
pub mod stats;

pub use data::LabeledSample;
pub use discriminant::{fit_finalize, solve_discriminant, DiscriminantModel, FitOptions};
pub use error::{Error, Result};
pub use eval::{evaluate, EvalOptions, EvalReport, Metric};
pub use oracle::{batch_fda, batch_scatters, fisher_score, verify_bounds, BoundConfig, BoundReport};
pub use sketch::SketchState;
pub use stats::{approx_scatters, ClassStatistics, ScatterSet};
