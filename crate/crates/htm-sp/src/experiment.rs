//! Experiment orchestration: configuration files, the end-to-end
//! classification pipeline (encoder, pooler, histograms, classifier, F1),
//! parameter sweeps and report emission.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{accumulate_histogram, train_classifier, SdrHistogram, TrainParams};
use crate::config::SpConfig;
use crate::dataset::{load_manifest, DatasetSpec, Split};
use crate::encoder::{encode, EncoderConfig};
use crate::error::{Error, Result};
use crate::frame::BinaryFrame;
use crate::metrics::{f1_report, ConfusionCounts, F1Report};
use crate::parallel::{
    plan_kernels, step_parallel, write_profile_csv, KernelPlan, Phase, ProfileRecord,
};
use crate::pgm::read_pgm;
use crate::seed::mix_seeds;
use crate::sp::SpState;

/// Pipeline wiring of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One pooler instance fed by all classes.
    SingleHtm,
    /// One pooler per class; per-class histograms are concatenated into one
    /// feature vector for a shared classifier.
    MultiHtm,
    /// Pooler bypassed: encoder bits feed the histograms directly. The
    /// baseline the pooler is compared against.
    SvmOnly,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::SingleHtm => "single_htm",
            Mode::MultiHtm => "multi_htm",
            Mode::SvmOnly => "svm_only",
        }
    }
}

/// Which Spatial Pooler implementation drives the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Sequential,
    Parallel,
}

impl BackendKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BackendKind::Sequential => "sequential",
            BackendKind::Parallel => "parallel",
        }
    }
}

/// Pooler parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    NumColumns,
    SynapsesPerColumn,
    MinOverlap,
    WinnersSetSize,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::NumColumns => "num_columns",
            SweepParameter::SynapsesPerColumn => "synapses_per_column",
            SweepParameter::MinOverlap => "min_overlap",
            SweepParameter::WinnersSetSize => "winners_set_size",
        }
    }

    pub fn apply(&self, config: &mut SpConfig, value: u64) {
        match self {
            SweepParameter::NumColumns => config.num_columns = value as usize,
            SweepParameter::SynapsesPerColumn => config.synapses_per_column = value as usize,
            SweepParameter::MinOverlap => config.min_overlap = value as u32,
            SweepParameter::WinnersSetSize => config.winners_set_size = value as usize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<u64>,
}

/// Where the dataset lives, plus (optionally) the spec to generate it with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetRef {
    pub path: PathBuf,
    #[serde(default)]
    pub spec: Option<DatasetSpec>,
}

/// A full experiment description, stored as a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sp: SpConfig,
    pub encoder: EncoderConfig,
    pub dataset: DatasetRef,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_backend")]
    pub backend: BackendKind,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Learning passes over the training set; the default is a single pass.
    #[serde(default = "default_epochs")]
    pub epochs: usize,
}

fn default_mode() -> Mode {
    Mode::SingleHtm
}

fn default_backend() -> BackendKind {
    BackendKind::Sequential
}

fn default_trials() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_epochs() -> usize {
    1
}

impl ExperimentConfig {
    /// Fills derived fields and checks every invariant, including each sweep
    /// point.
    pub fn resolve(mut self) -> Result<Self> {
        self.encoder.validate()?;
        if self.sp.input_size == 0 {
            self.sp.input_size = self.encoder.output_len();
        } else if self.sp.input_size != self.encoder.output_len() {
            return Err(Error::config(format!(
                "sp.input_size ({}) does not match encoder output {}x{} = {}",
                self.sp.input_size,
                self.encoder.target_width,
                self.encoder.target_height,
                self.encoder.output_len()
            )));
        }
        self.sp.validate()?;
        if self.trials == 0 {
            return Err(Error::config("trials must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs must be positive"));
        }
        if let Some(spec) = &self.dataset.spec {
            spec.validate()?;
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::config("sweep.values must be non-empty"));
            }
            for &value in &sweep.values {
                let mut point = self.sp.clone();
                sweep.parameter.apply(&mut point, value);
                point.validate().map_err(|e| {
                    Error::config(format!(
                        "sweep point {}={value}: {e}",
                        sweep.parameter.as_str()
                    ))
                })?;
            }
        }
        Ok(self)
    }
}

/// Loads, resolves and validates an experiment config file.
///
/// Parse failures carry the file position; unknown keys are rejected with
/// the offending key named.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
    config.resolve()
}

/// One video after encoding: its identity and the per-frame bit vectors.
pub struct EncodedVideo {
    pub id: String,
    pub class: String,
    pub split: Split,
    pub frames: Vec<BinaryFrame>,
}

/// The whole dataset, encoded once and shared across trials and sweep
/// points (the encoder settings never change within an experiment).
pub struct EncodedDataset {
    pub videos: Vec<EncodedVideo>,
    /// Class names in manifest order.
    pub classes: Vec<String>,
    pub frames_per_video: usize,
    pub input_size: usize,
}

impl EncodedDataset {
    pub fn train_videos(&self) -> impl Iterator<Item = &EncodedVideo> {
        self.videos.iter().filter(|v| v.split == Split::Train)
    }

    pub fn test_videos(&self) -> impl Iterator<Item = &EncodedVideo> {
        self.videos.iter().filter(|v| v.split == Split::Test)
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }
}

/// Reads every video listed in the manifest and encodes its frames.
pub fn load_encoded_dataset(
    root: impl AsRef<Path>,
    encoder: &EncoderConfig,
) -> Result<EncodedDataset> {
    let root = root.as_ref();
    encoder.validate()?;
    let manifest = load_manifest(root)?;
    if manifest.is_empty() {
        return Err(Error::format(format!(
            "{}: manifest lists no videos",
            root.display()
        )));
    }

    let videos: Vec<EncodedVideo> = manifest
        .par_iter()
        .map(|entry| -> Result<EncodedVideo> {
            let dir = root.join(&entry.path);
            let mut frame_files: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| Error::io(&dir, e))?
                .filter_map(|res| res.ok().map(|d| d.path()))
                .filter(|p| {
                    p.extension().is_some_and(|e| e == "pgm")
                        && p.file_name()
                            .and_then(|n| n.to_str())
                            .is_some_and(|n| n.starts_with("frame_"))
                })
                .collect();
            frame_files.sort();
            if frame_files.is_empty() {
                return Err(Error::format(format!(
                    "video {}: no frame_*.pgm files",
                    entry.path
                )));
            }
            let frames = frame_files
                .iter()
                .map(|file| -> Result<BinaryFrame> {
                    let gray = read_pgm(file)
                        .map_err(|e| Error::format(format!("video {}: {e}", entry.path)))?;
                    encode(&gray, encoder)
                        .map_err(|e| Error::format(format!("video {}: {e}", entry.path)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(EncodedVideo {
                id: entry.path.clone(),
                class: entry.class.clone(),
                split: entry.split,
                frames,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let frames_per_video = videos[0].frames.len();
    for v in &videos {
        if v.frames.len() != frames_per_video {
            return Err(Error::format(format!(
                "video {} has {} frames, expected {frames_per_video}",
                v.id,
                v.frames.len()
            )));
        }
    }
    let mut classes = Vec::new();
    for v in &videos {
        if !classes.contains(&v.class) {
            classes.push(v.class.clone());
        }
    }
    Ok(EncodedDataset {
        videos,
        classes,
        frames_per_video,
        input_size: encoder.output_len(),
    })
}

/// Runs one pooler step on the configured backend, appending one timing
/// record per phase. The sequential backend has no staging, so its staging
/// records are zero-duration placeholders that keep the CSV schema uniform.
fn timed_step(
    state: &mut SpState,
    frame: &BinaryFrame,
    backend: BackendKind,
    plan: &KernelPlan,
    learn: bool,
    sink: &mut Vec<ProfileRecord>,
) -> Result<Vec<usize>> {
    match backend {
        BackendKind::Sequential => {
            let iteration = state.iteration();
            sink.push(ProfileRecord {
                phase: Phase::StagingIn,
                duration_ns: 0,
                iteration,
            });
            let t = Instant::now();
            let overlaps = state.compute_overlap(frame)?;
            sink.push(ProfileRecord {
                phase: Phase::KernelOverlap,
                duration_ns: t.elapsed().as_nanos() as u64,
                iteration,
            });
            let t = Instant::now();
            let active = state.compute_inhibition(&overlaps)?;
            sink.push(ProfileRecord {
                phase: Phase::KernelInhibition,
                duration_ns: t.elapsed().as_nanos() as u64,
                iteration,
            });
            sink.push(ProfileRecord {
                phase: Phase::StagingOut,
                duration_ns: 0,
                iteration,
            });
            if learn {
                state.learn(frame, &active)?;
            }
            Ok(active)
        }
        BackendKind::Parallel => {
            let (active, records) = step_parallel(state, frame, plan, learn)?;
            sink.extend(records);
            Ok(active)
        }
    }
}

/// Output of one pipeline run (one trial).
pub struct ModeOutput {
    pub confusion: ConfusionCounts,
    pub report: F1Report,
    pub records: Vec<ProfileRecord>,
    pub steps: u64,
}

fn classify_and_score(
    data: &EncodedDataset,
    train_features: Vec<SdrHistogram>,
    test_features: Vec<(usize, SdrHistogram)>,
    classifier_seed: u64,
) -> Result<(ConfusionCounts, F1Report)> {
    let params = TrainParams {
        seed: classifier_seed,
        ..TrainParams::default()
    };
    let model = train_classifier(&train_features, &params)?;
    let mut confusion = ConfusionCounts::zeros(data.classes.len(), data.classes.len());
    for (true_idx, feature) in &test_features {
        let predicted = model.predict(feature)?;
        let predicted_idx = data
            .class_index(predicted)
            .expect("model classes come from the dataset");
        confusion.record(*true_idx, predicted_idx);
    }
    let report = f1_report(&confusion)?;
    Ok((confusion, report))
}

fn run_single_htm(
    sp_config: &SpConfig,
    data: &EncodedDataset,
    backend: BackendKind,
    epochs: usize,
    classifier_seed: u64,
) -> Result<ModeOutput> {
    let mut state = SpState::init(sp_config.clone())?;
    let plan = plan_kernels(sp_config);
    let mut records = Vec::new();
    let mut steps = 0u64;

    // Warm-up iteration; its records are discarded.
    if let Some(video) = data.videos.first() {
        let mut scratch = Vec::new();
        timed_step(
            &mut state,
            &video.frames[0],
            backend,
            &plan,
            false,
            &mut scratch,
        )?;
    }

    for _ in 0..epochs {
        for video in data.train_videos() {
            for frame in &video.frames {
                timed_step(&mut state, frame, backend, &plan, true, &mut records)?;
                steps += 1;
            }
        }
    }

    let mut train_features = Vec::new();
    let mut test_features = Vec::new();
    for video in &data.videos {
        let mut active_sets = Vec::with_capacity(video.frames.len());
        for frame in &video.frames {
            active_sets.push(timed_step(
                &mut state,
                frame,
                backend,
                &plan,
                false,
                &mut records,
            )?);
            steps += 1;
        }
        let histogram = accumulate_histogram(
            &active_sets,
            sp_config.num_columns,
            data.frames_per_video,
        )?
        .with_label(video.class.clone());
        match video.split {
            Split::Train => train_features.push(histogram),
            Split::Test => {
                let idx = data.class_index(&video.class).expect("class in manifest");
                test_features.push((idx, histogram));
            }
        }
    }

    let (confusion, report) =
        classify_and_score(data, train_features, test_features, classifier_seed)?;
    Ok(ModeOutput {
        confusion,
        report,
        records,
        steps,
    })
}

fn run_multi_htm(
    sp_config: &SpConfig,
    data: &EncodedDataset,
    backend: BackendKind,
    epochs: usize,
    classifier_seed: u64,
) -> Result<ModeOutput> {
    let plan = plan_kernels(sp_config);
    let mut states: Vec<SpState> = data
        .classes
        .iter()
        .enumerate()
        .map(|(k, _)| {
            let mut cfg = sp_config.clone();
            cfg.rng_seed = mix_seeds(sp_config.rng_seed, 0x0DDC0 + k as u64);
            SpState::init(cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    let mut steps = 0u64;

    if let Some(video) = data.videos.first() {
        let mut scratch = Vec::new();
        for state in &mut states {
            timed_step(state, &video.frames[0], backend, &plan, false, &mut scratch)?;
        }
    }

    // Each class's pooler learns from its own class only.
    for _ in 0..epochs {
        for video in data.train_videos() {
            let k = data.class_index(&video.class).expect("class in manifest");
            for frame in &video.frames {
                timed_step(&mut states[k], frame, backend, &plan, true, &mut records)?;
                steps += 1;
            }
        }
    }

    let mut train_features = Vec::new();
    let mut test_features = Vec::new();
    for video in &data.videos {
        let mut parts = Vec::with_capacity(states.len());
        for state in &mut states {
            let mut active_sets = Vec::with_capacity(video.frames.len());
            for frame in &video.frames {
                active_sets.push(timed_step(
                    state,
                    frame,
                    backend,
                    &plan,
                    false,
                    &mut records,
                )?);
                steps += 1;
            }
            parts.push(accumulate_histogram(
                &active_sets,
                sp_config.num_columns,
                data.frames_per_video,
            )?);
        }
        let histogram = SdrHistogram::concat(&parts).with_label(video.class.clone());
        match video.split {
            Split::Train => train_features.push(histogram),
            Split::Test => {
                let idx = data.class_index(&video.class).expect("class in manifest");
                test_features.push((idx, histogram));
            }
        }
    }

    let (confusion, report) =
        classify_and_score(data, train_features, test_features, classifier_seed)?;
    Ok(ModeOutput {
        confusion,
        report,
        records,
        steps,
    })
}

fn run_svm_only(data: &EncodedDataset, classifier_seed: u64) -> Result<ModeOutput> {
    let mut train_features = Vec::new();
    let mut test_features = Vec::new();
    for video in &data.videos {
        let mut hits = vec![0u32; data.input_size];
        for frame in &video.frames {
            frame.for_each_set_bit(|i| hits[i] += 1);
        }
        let counts: Vec<f64> = hits
            .iter()
            .map(|&h| h as f64 / data.frames_per_video as f64)
            .collect();
        let histogram = SdrHistogram::new(counts).with_label(video.class.clone());
        match video.split {
            Split::Train => train_features.push(histogram),
            Split::Test => {
                let idx = data.class_index(&video.class).expect("class in manifest");
                test_features.push((idx, histogram));
            }
        }
    }
    let (confusion, report) =
        classify_and_score(data, train_features, test_features, classifier_seed)?;
    Ok(ModeOutput {
        confusion,
        report,
        records: Vec::new(),
        steps: 0,
    })
}

fn run_mode(config: &ExperimentConfig, data: &EncodedDataset, sp_config: &SpConfig) -> Result<ModeOutput> {
    match config.mode {
        Mode::SingleHtm => run_single_htm(
            sp_config,
            data,
            config.backend,
            config.epochs,
            classifier_seed(sp_config.rng_seed),
        ),
        Mode::MultiHtm => run_multi_htm(
            sp_config,
            data,
            config.backend,
            config.epochs,
            classifier_seed(sp_config.rng_seed),
        ),
        Mode::SvmOnly => run_svm_only(data, classifier_seed(sp_config.rng_seed)),
    }
}

fn classifier_seed(trial_seed: u64) -> u64 {
    mix_seeds(trial_seed, 0xC1A55)
}

/// Per-trial report file contents; everything needed to reproduce the run.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrialReport {
    pub mode: Mode,
    pub backend: BackendKind,
    pub trial_index: usize,
    pub epochs: usize,
    pub classes: Vec<String>,
    pub confusion: Vec<Vec<u64>>,
    pub per_class_best_f: Vec<f64>,
    pub f1: f64,
    pub empty_classes: Vec<usize>,
    pub sp_config: SpConfig,
    pub encoder: EncoderConfig,
    pub classifier_seed: u64,
}

/// Aggregates of one `run_trial` invocation (covering `config.trials`
/// seeded trials).
pub struct TrialOutcome {
    pub f1_per_trial: Vec<f64>,
    pub f1_mean: f64,
    pub f1_std: f64,
    /// Mean per-step kernel time (overlap + inhibition), ns.
    pub kernel_ns: f64,
    pub staging_in_ns: f64,
    pub staging_out_ns: f64,
    /// Mean per-step total time (staging + kernels), ns.
    pub total_ns: f64,
    /// Overlap kernel share of kernel time, when both kernel phases ran.
    pub overlap_share: Option<f64>,
    pub steps: u64,
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs `config.trials` seeded trials of the configured mode, writing one
/// report JSON and one profile CSV per trial plus a summary JSON into
/// `out_dir`. Trial `t` uses pooler seed `config.sp.rng_seed + t`, so
/// re-running an identical config reproduces identical reports.
pub fn run_trial_with_data(
    config: &ExperimentConfig,
    data: &EncodedDataset,
    out_dir: impl AsRef<Path>,
) -> Result<TrialOutcome> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut f1_per_trial = Vec::with_capacity(config.trials);
    let mut phase_totals = [0u64; 4];
    let mut overlap_ns = 0u64;
    let mut inhibition_ns = 0u64;
    let mut steps = 0u64;

    for t in 0..config.trials {
        let mut sp_config = config.sp.clone();
        sp_config.rng_seed = config.sp.rng_seed.wrapping_add(t as u64);
        let output = run_mode(config, data, &sp_config)?;

        let report_path = out_dir.join(format!("trial_{t}_report.json"));
        let report = TrialReport {
            mode: config.mode,
            backend: config.backend,
            trial_index: t,
            epochs: config.epochs,
            classes: data.classes.clone(),
            confusion: output.confusion.matrix().to_vec(),
            per_class_best_f: output.report.best_f.clone(),
            f1: output.report.f1,
            empty_classes: output.report.empty_classes.clone(),
            sp_config: sp_config.clone(),
            encoder: config.encoder.clone(),
            classifier_seed: classifier_seed(sp_config.rng_seed),
        };
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::format(format!("serializing trial report: {e}")))?;
        fs::write(&report_path, text).map_err(|e| Error::io(&report_path, e))?;

        let profile_path = out_dir.join(format!("trial_{t}_profile.csv"));
        let file = fs::File::create(&profile_path).map_err(|e| Error::io(&profile_path, e))?;
        write_profile_csv(
            std::io::BufWriter::new(file),
            &output.records,
            config.backend.as_str(),
            &sp_config,
        )
        .map_err(|e| Error::io(&profile_path, e))?;

        for r in &output.records {
            match r.phase {
                Phase::StagingIn => phase_totals[0] += r.duration_ns,
                Phase::KernelOverlap => {
                    phase_totals[1] += r.duration_ns;
                    overlap_ns += r.duration_ns;
                }
                Phase::KernelInhibition => {
                    phase_totals[2] += r.duration_ns;
                    inhibition_ns += r.duration_ns;
                }
                Phase::StagingOut => phase_totals[3] += r.duration_ns,
            }
        }
        steps += output.steps;
        f1_per_trial.push(output.report.f1);
    }

    let (f1_mean, f1_std) = mean_and_std(&f1_per_trial);
    let per_step = |total: u64| {
        if steps == 0 {
            0.0
        } else {
            total as f64 / steps as f64
        }
    };
    let outcome = TrialOutcome {
        f1_mean,
        f1_std,
        kernel_ns: per_step(phase_totals[1] + phase_totals[2]),
        staging_in_ns: per_step(phase_totals[0]),
        staging_out_ns: per_step(phase_totals[3]),
        total_ns: per_step(phase_totals.iter().sum()),
        overlap_share: if overlap_ns + inhibition_ns > 0 {
            Some(overlap_ns as f64 / (overlap_ns + inhibition_ns) as f64)
        } else {
            None
        },
        steps,
        f1_per_trial,
    };

    #[derive(Serialize)]
    struct Summary<'a> {
        config: &'a ExperimentConfig,
        f1_per_trial: &'a [f64],
        f1_mean: f64,
        f1_std: f64,
    }
    let summary_path = out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&Summary {
        config,
        f1_per_trial: &outcome.f1_per_trial,
        f1_mean: outcome.f1_mean,
        f1_std: outcome.f1_std,
    })
    .map_err(|e| Error::format(format!("serializing summary: {e}")))?;
    fs::write(&summary_path, text).map_err(|e| Error::io(&summary_path, e))?;

    Ok(outcome)
}

/// Loads and encodes the dataset, then runs the trials into
/// `config.output_dir`.
pub fn run_trial(config: &ExperimentConfig) -> Result<TrialOutcome> {
    let data = load_encoded_dataset(&config.dataset.path, &config.encoder)?;
    run_trial_with_data(config, &data, &config.output_dir)
}

/// One row of the sweep summary CSV.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: u64,
    pub backend: String,
    pub f1_mean: f64,
    pub f1_std: f64,
    pub kernel_ns: f64,
    pub staging_in_ns: f64,
    pub staging_out_ns: f64,
    /// Sequential kernel time over this backend's kernel time.
    pub speedup_kernel: f64,
    /// Sequential total time over this backend's total time (staging
    /// included).
    pub speedup_total: f64,
    pub overlap_share: f64,
}

pub const SWEEP_CSV_HEADER: &str = "param,value,backend,f1_mean,f1_std,kernel_ns,staging_in_ns,staging_out_ns,speedup_kernel,speedup_total,overlap_share";

/// Runs every sweep point on both backends, writing per-point trial outputs
/// and resolved configs under `out_root` plus a `sweep_summary.csv`. Failing
/// points are recorded in `sweep_errors.log` and skipped.
pub fn run_sweep_with_data(
    config: &ExperimentConfig,
    data: &EncodedDataset,
    out_root: impl AsRef<Path>,
) -> Result<Vec<SweepRow>> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("config has no sweep section"))?;
    let out_root = out_root.as_ref();
    fs::create_dir_all(out_root).map_err(|e| Error::io(out_root, e))?;

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for &value in &sweep.values {
        let mut point = config.clone();
        point.sweep = None;
        sweep.parameter.apply(&mut point.sp, value);
        if let Err(e) = point.sp.validate() {
            errors.push(format!("{}={value}: {e}", sweep.parameter.as_str()));
            continue;
        }

        let mut outcomes = Vec::new();
        let mut failed = false;
        for backend in [BackendKind::Sequential, BackendKind::Parallel] {
            let mut point = point.clone();
            point.backend = backend;
            let dir = out_root.join(format!(
                "{}_{value}/{}",
                sweep.parameter.as_str(),
                backend.as_str()
            ));
            match run_trial_with_data(&point, data, &dir) {
                Ok(outcome) => {
                    let config_path = dir.join("config.json");
                    let text = serde_json::to_string_pretty(&point)
                        .map_err(|e| Error::format(format!("serializing point config: {e}")))?;
                    fs::write(&config_path, text).map_err(|e| Error::io(&config_path, e))?;
                    outcomes.push((backend, outcome));
                }
                Err(e) => {
                    errors.push(format!(
                        "{}={value} backend={}: {e}",
                        sweep.parameter.as_str(),
                        backend.as_str()
                    ));
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            continue;
        }

        let seq = &outcomes[0].1;
        for (backend, outcome) in &outcomes {
            let ratio = |seq_v: f64, own: f64| if own > 0.0 { seq_v / own } else { 0.0 };
            rows.push(SweepRow {
                param: sweep.parameter.as_str().to_string(),
                value,
                backend: backend.as_str().to_string(),
                f1_mean: outcome.f1_mean,
                f1_std: outcome.f1_std,
                kernel_ns: outcome.kernel_ns,
                staging_in_ns: outcome.staging_in_ns,
                staging_out_ns: outcome.staging_out_ns,
                speedup_kernel: ratio(seq.kernel_ns, outcome.kernel_ns),
                speedup_total: ratio(seq.total_ns, outcome.total_ns),
                overlap_share: outcome.overlap_share.unwrap_or(0.0),
            });
        }
    }

    let csv_path = out_root.join("sweep_summary.csv");
    let mut text = String::from(SWEEP_CSV_HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.param,
            r.value,
            r.backend,
            r.f1_mean,
            r.f1_std,
            r.kernel_ns,
            r.staging_in_ns,
            r.staging_out_ns,
            r.speedup_kernel,
            r.speedup_total,
            r.overlap_share
        ));
    }
    fs::write(&csv_path, text).map_err(|e| Error::io(&csv_path, e))?;

    if !errors.is_empty() {
        let log_path = out_root.join("sweep_errors.log");
        fs::write(&log_path, errors.join("\n") + "\n").map_err(|e| Error::io(&log_path, e))?;
    }
    Ok(rows)
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let data = load_encoded_dataset(&config.dataset.path, &config.encoder)?;
    run_sweep_with_data(config, &data, &config.output_dir)
}

/// Renders a human-readable summary of a previously written output
/// directory (trial summaries and/or a sweep CSV).
pub fn summarize_output_dir(dir: impl AsRef<Path>) -> Result<String> {
    let dir = dir.as_ref();
    let mut out = String::new();
    let sweep_csv = dir.join("sweep_summary.csv");
    if sweep_csv.exists() {
        let text = fs::read_to_string(&sweep_csv).map_err(|e| Error::io(&sweep_csv, e))?;
        out.push_str(&format!("sweep summary ({})\n", sweep_csv.display()));
        for line in text.lines() {
            out.push_str("  ");
            out.push_str(&line.replace(',', "\t"));
            out.push('\n');
        }
    }
    let summary_json = dir.join("summary.json");
    if summary_json.exists() {
        let text = fs::read_to_string(&summary_json).map_err(|e| Error::io(&summary_json, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::format(format!("{}: {e}", summary_json.display())))?;
        out.push_str(&format!("trial summary ({})\n", summary_json.display()));
        out.push_str(&format!(
            "  f1_mean = {}  f1_std = {}  trials = {}\n",
            value["f1_mean"],
            value["f1_std"],
            value["f1_per_trial"].as_array().map_or(0, Vec::len)
        ));
    }
    if out.is_empty() {
        return Err(Error::input(format!(
            "{}: no summary.json or sweep_summary.csv found",
            dir.display()
        )));
    }
    Ok(out)
}
