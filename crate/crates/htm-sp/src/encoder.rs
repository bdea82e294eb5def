//! Frame encoder: optional area-average downscaling followed by
//! Gaussian-weighted adaptive thresholding.
//!
//! Each pixel is compared against the Gaussian-weighted mean of its
//! `block_size x block_size` neighborhood minus a constant bias; borders are
//! edge-replicated. The output bit is 1 iff the pixel strictly exceeds its
//! local threshold, row-major order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::BinaryFrame;

/// An 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayFrame {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::input("frame dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(Error::input(format!(
                "pixel buffer holds {} bytes, expected {}x{} = {}",
                pixels.len(),
                width,
                height,
                width * height
            )));
        }
        Ok(GrayFrame {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayFrame {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.pixels[y * self.width + x] = value;
    }
}

/// Encoder parameters. `gaussian_sigma` defaults to the window-size-derived
/// value `0.3 * ((block_size - 1) * 0.5 - 1) + 0.8` when unset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderConfig {
    pub target_width: usize,
    pub target_height: usize,
    /// Adaptive-threshold neighborhood side; odd, at least 3.
    #[serde(default = "default_block_size")]
    pub block_size: usize,
    /// Constant subtracted from the weighted neighborhood mean.
    #[serde(default = "default_bias_c")]
    pub bias_c: f64,
    #[serde(default)]
    pub gaussian_sigma: Option<f64>,
}

fn default_block_size() -> usize {
    11
}

fn default_bias_c() -> f64 {
    2.0
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            target_width: 240,
            target_height: 134,
            block_size: default_block_size(),
            bias_c: default_bias_c(),
            gaussian_sigma: None,
        }
    }
}

impl EncoderConfig {
    pub fn sigma(&self) -> f64 {
        self.gaussian_sigma
            .unwrap_or(0.3 * ((self.block_size as f64 - 1.0) * 0.5 - 1.0) + 0.8)
    }

    /// Output bits per frame; must equal the pooler's `input_size`.
    pub fn output_len(&self) -> usize {
        self.target_width * self.target_height
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_width == 0 || self.target_height == 0 {
            return Err(Error::config("encoder target dimensions must be positive"));
        }
        if self.block_size < 3 || self.block_size.is_multiple_of(2) {
            return Err(Error::config(format!(
                "block_size must be an odd integer >= 3, got {}",
                self.block_size
            )));
        }
        if !self.bias_c.is_finite() {
            return Err(Error::config("bias_c must be finite"));
        }
        if self.sigma() <= 0.0 || !self.sigma().is_finite() {
            return Err(Error::config(format!(
                "gaussian_sigma must be positive, got {}",
                self.sigma()
            )));
        }
        Ok(())
    }
}

/// Normalized 1-D Gaussian window of length `block_size`.
pub(crate) fn gaussian_window(block_size: usize, sigma: f64) -> Vec<f64> {
    let half = (block_size / 2) as f64;
    let mut weights: Vec<f64> = (0..block_size)
        .map(|i| {
            let d = i as f64 - half;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    weights
}

/// Area-averaging resample to the configured target size.
///
/// Each output pixel averages the source rectangle it covers, with
/// fractional edge coverage, so constant images stay constant and identity
/// sizes reproduce the source exactly.
pub fn downscale(frame: &GrayFrame, config: &EncoderConfig) -> Result<GrayFrame> {
    config.validate()?;
    let (sw, sh) = (frame.width(), frame.height());
    let (tw, th) = (config.target_width, config.target_height);
    if tw > sw || th > sh {
        return Err(Error::input(format!(
            "cannot upscale {sw}x{sh} to {tw}x{th}"
        )));
    }
    if tw == sw && th == sh {
        return Ok(frame.clone());
    }
    let x_ratio = sw as f64 / tw as f64;
    let y_ratio = sh as f64 / th as f64;
    let mut pixels = Vec::with_capacity(tw * th);
    for ty in 0..th {
        let sy0 = ty as f64 * y_ratio;
        let sy1 = (ty + 1) as f64 * y_ratio;
        for tx in 0..tw {
            let sx0 = tx as f64 * x_ratio;
            let sx1 = (tx + 1) as f64 * x_ratio;
            let mut sum = 0.0;
            let mut area = 0.0;
            let y_start = sy0.floor() as usize;
            let y_end = (sy1.ceil() as usize).min(sh);
            let x_start = sx0.floor() as usize;
            let x_end = (sx1.ceil() as usize).min(sw);
            for sy in y_start..y_end {
                let wy = overlap_1d(sy as f64, sy0, sy1);
                if wy == 0.0 {
                    continue;
                }
                for sx in x_start..x_end {
                    let wx = overlap_1d(sx as f64, sx0, sx1);
                    let w = wx * wy;
                    sum += w * frame.get(sx, sy) as f64;
                    area += w;
                }
            }
            pixels.push((sum / area).round().clamp(0.0, 255.0) as u8);
        }
    }
    GrayFrame::new(tw, th, pixels)
}

/// Length of the overlap between the unit cell [p, p+1) and [lo, hi).
fn overlap_1d(p: f64, lo: f64, hi: f64) -> f64 {
    (hi.min(p + 1.0) - lo.max(p)).max(0.0)
}

/// Gaussian adaptive threshold: bit = 1 iff
/// `pixel > weighted_neighborhood_mean - bias_c`.
///
/// The Gaussian is separable, so the weighted mean runs as a horizontal then
/// a vertical pass; per-axis index clamping reproduces 2-D edge replication
/// exactly.
pub fn adaptive_threshold(frame: &GrayFrame, config: &EncoderConfig) -> Result<BinaryFrame> {
    config.validate()?;
    let (w, h) = (frame.width(), frame.height());
    if w != config.target_width || h != config.target_height {
        return Err(Error::input(format!(
            "frame is {w}x{h}, expected target {}x{}",
            config.target_width, config.target_height
        )));
    }
    let window = gaussian_window(config.block_size, config.sigma());
    let half = config.block_size / 2;

    // Horizontal pass with edge replication.
    let mut tmp = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &wk) in window.iter().enumerate() {
                let sx = (x + k).saturating_sub(half).min(w - 1);
                acc += wk * frame.get(sx, y) as f64;
            }
            tmp[y * w + x] = acc;
        }
    }
    // Vertical pass.
    let bias = config.bias_c;
    let mut frame_out = BinaryFrame::zeros(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &wk) in window.iter().enumerate() {
                let sy = (y + k).saturating_sub(half).min(h - 1);
                acc += wk * tmp[sy * w + x];
            }
            let threshold = acc - bias;
            if frame.get(x, y) as f64 > threshold {
                frame_out.set(y * w + x, true);
            }
        }
    }
    Ok(frame_out)
}

/// Full encoding pipeline: downscale when the source is larger than the
/// target, then binarize.
pub fn encode(frame: &GrayFrame, config: &EncoderConfig) -> Result<BinaryFrame> {
    if frame.width() == config.target_width && frame.height() == config.target_height {
        adaptive_threshold(frame, config)
    } else {
        let reduced = downscale(frame, config)?;
        adaptive_threshold(&reduced, config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(w: usize, h: usize, block: usize, bias: f64) -> EncoderConfig {
        EncoderConfig {
            target_width: w,
            target_height: h,
            block_size: block,
            bias_c: bias,
            gaussian_sigma: None,
        }
    }

    /// Independent oracle: direct 2-D convolution with clamped indexing.
    fn oracle_threshold(frame: &GrayFrame, config: &EncoderConfig) -> Vec<bool> {
        let window = gaussian_window(config.block_size, config.sigma());
        let half = config.block_size / 2;
        let (w, h) = (frame.width(), frame.height());
        let mut out = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let mut mean = 0.0;
                for (ky, &wy) in window.iter().enumerate() {
                    for (kx, &wx) in window.iter().enumerate() {
                        let sx = (x + kx).saturating_sub(half).min(w - 1);
                        let sy = (y + ky).saturating_sub(half).min(h - 1);
                        mean += wy * wx * frame.get(sx, sy) as f64;
                    }
                }
                out.push(frame.get(x, y) as f64 > mean - config.bias_c);
            }
        }
        out
    }

    #[test]
    fn default_sigma_matches_window_formula() {
        let c = EncoderConfig::default();
        assert_eq!(c.block_size, 11);
        assert!((c.sigma() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn downscale_hits_target_dimensions() {
        let src = GrayFrame::filled(960, 540, 100);
        let out = downscale(&src, &cfg(240, 134, 11, 2.0)).unwrap();
        assert_eq!((out.width(), out.height()), (240, 134));
        assert!(out.pixels().iter().all(|&p| p == 100));
    }

    #[test]
    fn identity_downscale_is_exact() {
        let pixels: Vec<u8> = (0..30 * 20).map(|i| (i * 7 % 256) as u8).collect();
        let src = GrayFrame::new(30, 20, pixels).unwrap();
        let out = downscale(&src, &cfg(30, 20, 11, 2.0)).unwrap();
        assert_eq!(src, out);
    }

    #[test]
    fn upscale_is_rejected() {
        let src = GrayFrame::filled(10, 10, 0);
        let err = downscale(&src, &cfg(20, 10, 11, 2.0)).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn uniform_image_with_positive_bias_sets_all_bits() {
        let frame = GrayFrame::filled(16, 12, 90);
        let bits = adaptive_threshold(&frame, &cfg(16, 12, 5, 2.0)).unwrap();
        assert_eq!(bits.count_ones(), 16 * 12);
    }

    #[test]
    fn uniform_image_with_negative_bias_clears_all_bits() {
        let frame = GrayFrame::filled(16, 12, 90);
        let bits = adaptive_threshold(&frame, &cfg(16, 12, 5, -2.0)).unwrap();
        assert_eq!(bits.count_ones(), 0);
    }

    #[test]
    fn single_bright_pixel_fixture_matches_hand_convolution() {
        // 5x5 dark field with one bright center; the oracle convolves the
        // Gaussian window directly. The bright pixel beats its raised
        // threshold, its eight neighbors sit below theirs, and pixels whose
        // neighborhood is uniformly dark behave like the uniform case
        // (bias 2 keeps them set).
        let mut frame = GrayFrame::filled(5, 5, 0);
        frame.set(2, 2, 255);
        let config = cfg(5, 5, 3, 2.0);
        let bits = adaptive_threshold(&frame, &config).unwrap();
        let oracle = oracle_threshold(&frame, &config);
        for (i, &expected) in oracle.iter().enumerate() {
            assert_eq!(bits.get(i), expected, "bit {i}");
        }
        assert!(bits.get(2 * 5 + 2));
        for (dx, dy) in [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)] {
            let (x, y) = ((2 + dx) as usize, (2 + dy) as usize);
            assert!(!bits.get(y * 5 + x), "neighbor ({dx}, {dy}) should be clear");
        }
        assert_eq!(bits.count_ones(), 25 - 8);
    }

    #[test]
    fn dimension_mismatch_is_an_input_error() {
        let frame = GrayFrame::filled(8, 8, 0);
        let err = adaptive_threshold(&frame, &cfg(9, 8, 3, 2.0)).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn block_size_must_be_odd() {
        assert!(cfg(8, 8, 4, 2.0).validate().is_err());
        assert!(cfg(8, 8, 1, 2.0).validate().is_err());
        assert!(cfg(8, 8, 3, 2.0).validate().is_ok());
    }

    proptest! {
        #[test]
        fn separable_filter_matches_direct_convolution(
            seed in any::<u64>(),
            block in prop_oneof![Just(3usize), Just(5), Just(7)],
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (w, h) = (rng.gen_range(3..14), rng.gen_range(3..14));
            let pixels: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
            let frame = GrayFrame::new(w, h, pixels).unwrap();
            let config = cfg(w, h, block, 2.0);
            let bits = adaptive_threshold(&frame, &config).unwrap();
            let oracle = oracle_threshold(&frame, &config);
            for (i, &expected) in oracle.iter().enumerate() {
                prop_assert_eq!(bits.get(i), expected);
            }
        }

        #[test]
        fn shifting_the_image_shifts_interior_bits(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (w, h) = (18usize, 14usize);
            let pixels: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
            let frame = GrayFrame::new(w, h, pixels.clone()).unwrap();
            // Shift left by one: shifted(x, y) = original(x + 1, y).
            let shifted_pixels: Vec<u8> = (0..w * h)
                .map(|i| {
                    let (x, y) = (i % w, i / w);
                    let sx = (x + 1).min(w - 1);
                    pixels[y * w + sx]
                })
                .collect();
            let shifted = GrayFrame::new(w, h, shifted_pixels).unwrap();
            let config = cfg(w, h, 5, 2.0);
            let a = adaptive_threshold(&frame, &config).unwrap();
            let b = adaptive_threshold(&shifted, &config).unwrap();
            let margin = config.block_size / 2 + 1;
            for y in margin..h - margin {
                for x in margin..w - 1 - margin {
                    prop_assert_eq!(
                        b.get(y * w + x),
                        a.get(y * w + x + 1),
                        "pixel ({}, {})", x, y
                    );
                }
            }
        }

        #[test]
        fn raising_a_pixel_never_clears_its_own_bit(
            seed in any::<u64>(),
            raise in 1u8..=255,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (w, h) = (10usize, 9usize);
            let pixels: Vec<u8> = (0..w * h).map(|_| rng.gen()).collect();
            let frame = GrayFrame::new(w, h, pixels).unwrap();
            let config = cfg(w, h, 5, 2.0);
            let before = adaptive_threshold(&frame, &config).unwrap();
            let x = rng.gen_range(0..w);
            let y = rng.gen_range(0..h);
            let mut raised = frame.clone();
            raised.set(x, y, frame.get(x, y).saturating_add(raise));
            let after = adaptive_threshold(&raised, &config).unwrap();
            if before.get(y * w + x) {
                prop_assert!(after.get(y * w + x));
            }
        }
    }
}
