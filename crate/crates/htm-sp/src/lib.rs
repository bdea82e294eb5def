//! Hierarchical Temporal Memory Spatial Pooler engine with two
//! interchangeable backends (a sequential reference and a data-parallel
//! implementation mirroring a work-group-per-column reduction layout),
//! embedded in an end-to-end video-frame classification pipeline:
//! adaptive-threshold encoder, pooler, per-video SDR histograms, linear
//! classifier and clustering-style F1 evaluation, plus a benchmark harness
//! for parameter sweeps with phase-level timing.

pub mod classifier;
pub mod config;
pub mod dataset;
pub mod encoder;
pub mod error;
pub mod experiment;
pub mod frame;
pub mod metrics;
pub mod parallel;
pub mod pgm;
pub mod render;
mod seed;
pub mod snapshot;
pub mod sp;

pub use classifier::{accumulate_histogram, train_classifier, LinearModel, SdrHistogram};
pub use config::SpConfig;
pub use encoder::{adaptive_threshold, downscale, EncoderConfig, GrayFrame};
pub use error::{Error, Result};
pub use experiment::{load_config, run_sweep, run_trial, BackendKind, ExperimentConfig, Mode};
pub use frame::BinaryFrame;
pub use metrics::{f1_report, ConfusionCounts, F1Report};
pub use parallel::{
    overlap_share, parallel_inhibition_fused, parallel_overlap, plan_kernels, KernelPlan, Phase,
    ProfileRecord,
};
pub use render::ShapeClass;
pub use snapshot::{load_snapshot, save_snapshot};
pub use sp::{Column, SpState};
