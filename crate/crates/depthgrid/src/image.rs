//! Core image containers: integer depth maps, a parallel real-valued grid for
//! filter math, and hole masks.
//!
//! A depth map is a row-major grid of non-negative samples together with the
//! largest representable value (`max_value`, e.g. 255 for 8-bit data). Sample
//! `(v, h)` lives at index `v * width + h`. A sample of 0 marks invalid data
//! (a hole).

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyDimensions { width: usize, height: usize },
    #[error("sample buffer holds {got} values, expected {expected} for {width}x{height}")]
    SampleCountMismatch {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
    #[error("sample {value} at index {index} exceeds max_value {max_value}")]
    SampleOutOfRange {
        index: usize,
        value: u16,
        max_value: u16,
    },
    #[error("max_value must be at least 1")]
    ZeroMaxValue,
    #[error("hole coordinate ({row}, {col}) outside {width}x{height} image")]
    HoleOutOfBounds {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },
    #[error("polynomial axis needs 1 to 4 coefficients (degree <= 3), got {got}")]
    BadPolynomialDegree { got: usize },
}

/// Integer depth image. Immutable after construction; all invariants are
/// checked by [`DepthImage::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthImage {
    width: usize,
    height: usize,
    max_value: u16,
    samples: Vec<u16>,
}

impl DepthImage {
    pub fn new(
        width: usize,
        height: usize,
        max_value: u16,
        samples: Vec<u16>,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        if max_value == 0 {
            return Err(ImageError::ZeroMaxValue);
        }
        let expected = width * height;
        if samples.len() != expected {
            return Err(ImageError::SampleCountMismatch {
                width,
                height,
                expected,
                got: samples.len(),
            });
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, &s)| s > max_value) {
            return Err(ImageError::SampleOutOfRange {
                index,
                value,
                max_value,
            });
        }
        Ok(Self {
            width,
            height,
            max_value,
            samples,
        })
    }

    /// Constant-valued image, handy for tests and synthetic data.
    pub fn filled(
        width: usize,
        height: usize,
        max_value: u16,
        value: u16,
    ) -> Result<Self, ImageError> {
        Self::new(width, height, max_value, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Total pixel count (width x height).
    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn max_value(&self) -> u16 {
        self.max_value
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u16 {
        debug_assert!(row < self.height && col < self.width);
        self.samples[row * self.width + col]
    }

    /// Lossless widening into the real-valued pipeline.
    pub fn to_real(&self) -> RealImage {
        RealImage {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|&s| f64::from(s)).collect(),
        }
    }
}

/// Real-valued grid used wherever filter math must stay exact in `f64`
/// (polynomial-reproduction tests, separable-pass intermediates).
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl RealImage {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let expected = width * height;
        if samples.len() != expected {
            return Err(ImageError::SampleCountMismatch {
                width,
                height,
                expected,
                got: samples.len(),
            });
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    /// Builds the grid by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyDimensions { width, height });
        }
        let mut samples = Vec::with_capacity(width * height);
        for v in 0..height {
            for h in 0..width {
                samples.push(f(v, h));
            }
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.samples[row * self.width + col]
    }

    /// Quantizes into an integer image: round half-up, then clamp to
    /// `[0, max_value]`. Integer-valued samples pass through unchanged.
    pub fn to_depth(&self, max_value: u16) -> Result<DepthImage, ImageError> {
        if max_value == 0 {
            return Err(ImageError::ZeroMaxValue);
        }
        let samples = self
            .samples
            .iter()
            .map(|&s| round_half_up_clamped(s, max_value))
            .collect();
        DepthImage::new(self.width, self.height, max_value, samples)
    }
}

/// Round half-up (ties toward +inf), clamped to `[0, max_value]`.
pub(crate) fn round_half_up_clamped(x: f64, max_value: u16) -> u16 {
    let rounded = (x + 0.5).floor();
    if rounded <= 0.0 {
        0
    } else if rounded >= f64::from(max_value) {
        max_value
    } else {
        rounded as u16
    }
}

/// Boolean grid marking invalid (zero-valued) pixels; dimensions always match
/// the image it was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleMask {
    width: usize,
    height: usize,
    flags: Vec<bool>,
}

impl HoleMask {
    pub(crate) fn from_flags(width: usize, height: usize, flags: Vec<bool>) -> Self {
        debug_assert_eq!(flags.len(), width * height);
        Self {
            width,
            height,
            flags,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    #[inline]
    pub fn is_hole(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.height && col < self.width);
        self.flags[row * self.width + col]
    }

    /// Number of flagged pixels.
    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn any(&self) -> bool {
        self.flags.iter().any(|&f| f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_rejects_bad_dimensions() {
        assert_eq!(
            DepthImage::new(0, 3, 255, vec![]),
            Err(ImageError::EmptyDimensions {
                width: 0,
                height: 3
            })
        );
    }

    #[test]
    fn new_rejects_sample_count_mismatch() {
        let err = DepthImage::new(2, 2, 255, vec![1, 2, 3]).unwrap_err();
        assert!(matches!(
            err,
            ImageError::SampleCountMismatch {
                expected: 4,
                got: 3,
                ..
            }
        ));
    }

    #[test]
    fn new_rejects_out_of_range_sample() {
        let err = DepthImage::new(2, 1, 100, vec![50, 101]).unwrap_err();
        assert_eq!(
            err,
            ImageError::SampleOutOfRange {
                index: 1,
                value: 101,
                max_value: 100
            }
        );
    }

    #[test]
    fn round_half_up_behaviour() {
        assert_eq!(round_half_up_clamped(10.5, 255), 11);
        assert_eq!(round_half_up_clamped(10.4999, 255), 10);
        assert_eq!(round_half_up_clamped(-3.2, 255), 0);
        assert_eq!(round_half_up_clamped(300.0, 255), 255);
        // Ties round toward +inf, even for negatives.
        assert_eq!(round_half_up_clamped(-0.5, 255), 0);
    }

    #[test]
    fn real_round_trip_is_identity_on_integers() {
        let img = DepthImage::new(3, 2, 255, vec![0, 1, 2, 253, 254, 255]).unwrap();
        assert_eq!(img.to_real().to_depth(255).unwrap(), img);
    }

    #[test]
    fn indexing_is_row_major() {
        let img = DepthImage::new(3, 2, 9, vec![0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!(img.get(0, 2), 2);
        assert_eq!(img.get(1, 0), 3);
    }
}
