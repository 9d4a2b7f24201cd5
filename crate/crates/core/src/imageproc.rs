//! Image standardization to the fixed network input geometry.
//!
//! Inputs of any size are resized so the shorter side is exactly 224
//! (bilinear, aspect-preserving, upscaling included), center-cropped to
//! 224x224, and normalized per channel.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Side length of a standardized image.
pub const STANDARD_SIDE: usize = 224;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImageError {
    #[error("image must have 3 channels, got {0}")]
    ChannelCount(usize),
    #[error("image dimensions must be non-zero, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },
    #[error("pixel buffer length {got} does not match {width}x{height}x3 = {expected}")]
    BufferLength {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
    #[error("normalization std must be positive")]
    NonPositiveStd,
}

/// An RGB image with f32 samples in [0, 1], row-major interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct RawImage {
    width: usize,
    height: usize,
    pixels: Vec<f32>,
}

impl RawImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f32>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage { width, height });
        }
        let expected = width * height * 3;
        if pixels.len() != expected {
            return Err(ImageError::BufferLength {
                width,
                height,
                expected,
                got: pixels.len(),
            });
        }
        Ok(RawImage {
            width,
            height,
            pixels,
        })
    }

    /// Build from interleaved data with an explicit channel count; anything
    /// other than 3 channels is rejected.
    pub fn from_channels(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f32>,
    ) -> Result<Self, ImageError> {
        if channels != 3 {
            return Err(ImageError::ChannelCount(channels));
        }
        RawImage::new(width, height, data)
    }

    /// Build from 8-bit interleaved RGB, scaling samples to [0, 1].
    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self, ImageError> {
        let pixels = bytes.iter().map(|&b| f32::from(b) / 255.0).collect();
        RawImage::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.pixels[(y * self.width + x) * 3 + c]
    }
}

/// Per-channel normalization constants. Defaults to the reference statistics
/// of the backbone's pretraining corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mean: [f32; 3],
    pub std: [f32; 3],
}

impl NormalizationStats {
    /// ImageNet channel statistics.
    pub const IMAGENET: NormalizationStats = NormalizationStats {
        mean: [0.485, 0.456, 0.406],
        std: [0.229, 0.224, 0.225],
    };

    pub fn validate(&self) -> Result<(), ImageError> {
        if self.std.iter().any(|&s| s <= 0.0) {
            return Err(ImageError::NonPositiveStd);
        }
        Ok(())
    }
}

impl Default for NormalizationStats {
    fn default() -> Self {
        NormalizationStats::IMAGENET
    }
}

/// A 224x224x3 normalized image ready for a backbone.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardImage {
    pixels: Vec<f32>,
}

impl StandardImage {
    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.pixels[(y * STANDARD_SIDE + x) * 3 + c]
    }
}

/// The geometry a given input size goes through: resized dimensions and the
/// top-left corner of the center crop. Odd leftovers take the lower offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResizePlan {
    pub resized_width: usize,
    pub resized_height: usize,
    pub crop_x: usize,
    pub crop_y: usize,
}

/// Compute the resize-then-center-crop geometry for an input size: scale so
/// the shorter side is exactly 224 (rounding the longer side), then crop the
/// central 224x224 square.
pub fn resize_plan(width: usize, height: usize) -> ResizePlan {
    let side = STANDARD_SIDE;
    let (resized_width, resized_height) = if width <= height {
        let scaled = libm::round(height as f64 * side as f64 / width as f64) as usize;
        (side, scaled.max(side))
    } else {
        let scaled = libm::round(width as f64 * side as f64 / height as f64) as usize;
        (scaled.max(side), side)
    };
    ResizePlan {
        resized_width,
        resized_height,
        crop_x: (resized_width - side) / 2,
        crop_y: (resized_height - side) / 2,
    }
}

/// Resize (bilinear), center-crop to 224x224, and normalize per channel.
pub fn standardize(image: &RawImage, stats: &NormalizationStats) -> Result<StandardImage, ImageError> {
    stats.validate()?;
    let plan = resize_plan(image.width, image.height);
    let resized = bilinear_resize(image, plan.resized_width, plan.resized_height);
    let side = STANDARD_SIDE;
    let mut pixels = vec![0.0f32; side * side * 3];
    for y in 0..side {
        for x in 0..side {
            for c in 0..3 {
                let v = resized.get(plan.crop_x + x, plan.crop_y + y, c);
                pixels[(y * side + x) * 3 + c] = (v - stats.mean[c]) / stats.std[c];
            }
        }
    }
    Ok(StandardImage { pixels })
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
fn bilinear_resize(image: &RawImage, new_width: usize, new_height: usize) -> RawImage {
    if new_width == image.width && new_height == image.height {
        return image.clone();
    }
    let x_ratio = image.width as f64 / new_width as f64;
    let y_ratio = image.height as f64 / new_height as f64;
    let mut pixels = vec![0.0f32; new_width * new_height * 3];
    for y in 0..new_height {
        let src_y = ((y as f64 + 0.5) * y_ratio - 0.5).max(0.0);
        let y0 = (src_y as usize).min(image.height - 1);
        let y1 = (y0 + 1).min(image.height - 1);
        let fy = (src_y - y0 as f64) as f32;
        for x in 0..new_width {
            let src_x = ((x as f64 + 0.5) * x_ratio - 0.5).max(0.0);
            let x0 = (src_x as usize).min(image.width - 1);
            let x1 = (x0 + 1).min(image.width - 1);
            let fx = (src_x - x0 as f64) as f32;
            for c in 0..3 {
                let top = image.get(x0, y0, c) * (1.0 - fx) + image.get(x1, y0, c) * fx;
                let bottom = image.get(x0, y1, c) * (1.0 - fx) + image.get(x1, y1, c) * fx;
                pixels[(y * new_width + x) * 3 + c] = top * (1.0 - fy) + bottom * fy;
            }
        }
    }
    RawImage {
        width: new_width,
        height: new_height,
        pixels,
    }
}
