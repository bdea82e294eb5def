//! Synthetic dataset generation and on-disk layout.
//!
//! Layout: `<root>/<class>/video_NNNN/frame_NNNN.pgm`, one directory per
//! video, plus `manifest.tsv` (one record per video: path, class, split) and
//! `dataset.json` (the generating spec).

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pgm::write_pgm;
use crate::render::{render_video, ShapeClass};
use crate::seed::mix_seeds;

/// Train/test membership of one video.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

/// Parameters of the generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub classes: Vec<ShapeClass>,
    pub videos_per_class: usize,
    pub frames_per_video: usize,
    pub frame_width: usize,
    pub frame_height: usize,
    #[serde(default = "default_seed")]
    pub rng_seed: u64,
}

fn default_seed() -> u64 {
    1
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec {
            classes: ShapeClass::ALL.to_vec(),
            videos_per_class: 100,
            frames_per_video: 32,
            frame_width: 240,
            frame_height: 134,
            rng_seed: default_seed(),
        }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::config("dataset classes must be non-empty"));
        }
        let mut seen = std::collections::HashSet::new();
        for c in &self.classes {
            if !seen.insert(c) {
                return Err(Error::config(format!("duplicate class '{}'", c.name())));
            }
        }
        if self.videos_per_class == 0 || self.frames_per_video == 0 {
            return Err(Error::config("video and frame counts must be positive"));
        }
        if self.frame_width == 0 || self.frame_height == 0 {
            return Err(Error::config("frame dimensions must be positive"));
        }
        Ok(())
    }

    /// Training videos per class: an 80/20 split.
    pub fn train_count(&self) -> usize {
        self.videos_per_class * 4 / 5
    }
}

/// One manifest record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Video directory path relative to the dataset root.
    pub path: String,
    pub class: String,
    pub split: Split,
}

/// Generates every video of the dataset under `root` and writes the
/// manifest. Videos render in parallel; the split is drawn per class from
/// the spec seed, so regeneration with the same seed is identical.
pub fn build_dataset(spec: &DatasetSpec, root: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    spec.validate()?;
    let root = root.as_ref();
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;

    let mut entries = Vec::with_capacity(spec.classes.len() * spec.videos_per_class);
    for (class_idx, &class) in spec.classes.iter().enumerate() {
        let split_flags = draw_split(spec, class_idx);
        for (video, &split) in split_flags.iter().enumerate() {
            entries.push(ManifestEntry {
                path: format!("{}/video_{video:04}", class.name()),
                class: class.name().to_string(),
                split,
            });
        }
    }

    // Render videos independently; the manifest is written once at the end.
    entries
        .par_iter()
        .enumerate()
        .try_for_each(|(i, entry)| -> Result<()> {
            let class = ShapeClass::from_name(&entry.class)?;
            let class_idx = i / spec.videos_per_class;
            let video = i % spec.videos_per_class;
            let instance_seed = instance_seed(spec.rng_seed, class_idx as u64, video as u64);
            let frames = render_video(
                class,
                instance_seed,
                spec.frames_per_video,
                spec.frame_width,
                spec.frame_height,
            );
            let dir = root.join(&entry.path);
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            for (f, frame) in frames.iter().enumerate() {
                write_pgm(frame, dir.join(format!("frame_{f:04}.pgm")))?;
            }
            Ok(())
        })?;

    write_manifest(root, &entries)?;
    let spec_path = root.join("dataset.json");
    let text = serde_json::to_string_pretty(spec)
        .map_err(|e| Error::format(format!("serializing dataset spec: {e}")))?;
    fs::write(&spec_path, text).map_err(|e| Error::io(&spec_path, e))?;
    Ok(entries)
}

fn instance_seed(base: u64, class_idx: u64, video: u64) -> u64 {
    mix_seeds(mix_seeds(base, class_idx.wrapping_add(0x5EED)), video)
}

/// Per-class split flags in video order; exactly `train_count` train videos
/// chosen by a seeded shuffle.
fn draw_split(spec: &DatasetSpec, class_idx: usize) -> Vec<Split> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seeds(spec.rng_seed, 0xB1A5 + class_idx as u64));
    let mut order: Vec<usize> = (0..spec.videos_per_class).collect();
    order.shuffle(&mut rng);
    let mut flags = vec![Split::Test; spec.videos_per_class];
    for &video in order.iter().take(spec.train_count()) {
        flags[video] = Split::Train;
    }
    flags
}

fn write_manifest(root: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let path = root.join("manifest.tsv");
    let mut text = String::from("path\tclass\tsplit\n");
    for e in entries {
        text.push_str(&format!("{}\t{}\t{}\n", e.path, e.class, e.split.as_str()));
    }
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Reads `manifest.tsv` under `root`.
pub fn load_manifest(root: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = root.as_ref().join("manifest.tsv");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("path\tclass\tsplit") => {}
        other => {
            return Err(Error::format(format!(
                "{}: bad manifest header {other:?}",
                path.display()
            )))
        }
    }
    let mut entries = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (p, c, s) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(p), Some(c), Some(s), None) => (p, c, s),
            _ => {
                return Err(Error::format(format!(
                    "{}: line {}: expected 3 tab-separated fields",
                    path.display(),
                    lineno + 2
                )))
            }
        };
        let split = match s {
            "train" => Split::Train,
            "test" => Split::Test,
            other => {
                return Err(Error::format(format!(
                    "{}: line {}: unknown split '{other}'",
                    path.display(),
                    lineno + 2
                )))
            }
        };
        entries.push(ManifestEntry {
            path: p.to_string(),
            class: c.to_string(),
            split,
        });
    }
    Ok(entries)
}
