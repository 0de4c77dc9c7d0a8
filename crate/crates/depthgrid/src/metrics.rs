//! Mean squared error and peak signal-to-noise ratio.
//!
//! `PSNR = 10*log10(I_MAX^2 / MSE)` in dB. A zero MSE (identical images)
//! yields `f64::INFINITY` rather than an error so that benchmark code
//! survives perfect reconstruction.

use thiserror::Error;

use crate::image::{DepthImage, RealImage};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("image dimensions differ: {a_width}x{a_height} vs {b_width}x{b_height}")]
    DimensionMismatch {
        a_width: usize,
        a_height: usize,
        b_width: usize,
        b_height: usize,
    },
    #[error("max_value differs: {a} vs {b}")]
    MaxValueMismatch { a: u16, b: u16 },
    #[error("margin {margin} leaves no pixels in a {width}x{height} image")]
    EmptyRegion {
        margin: usize,
        width: usize,
        height: usize,
    },
}

/// MSE and PSNR of a comparison, along with the `I_MAX` used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityResult {
    pub mse: f64,
    /// `f64::INFINITY` when `mse == 0`.
    pub psnr_db: f64,
    pub max_value: u16,
}

fn check_dims((aw, ah): (usize, usize), (bw, bh): (usize, usize)) -> Result<(), MetricsError> {
    if (aw, ah) != (bw, bh) {
        return Err(MetricsError::DimensionMismatch {
            a_width: aw,
            a_height: ah,
            b_width: bw,
            b_height: bh,
        });
    }
    Ok(())
}

fn region(width: usize, height: usize, margin: usize) -> Result<(), MetricsError> {
    if 2 * margin >= width || 2 * margin >= height {
        return Err(MetricsError::EmptyRegion {
            margin,
            width,
            height,
        });
    }
    Ok(())
}

/// Mean squared error over all pixels. Squared differences accumulate in
/// integer arithmetic wide enough for 16-bit samples over any realistic
/// image size.
pub fn mse(reference: &DepthImage, test: &DepthImage) -> Result<f64, MetricsError> {
    mse_with_margin(reference, test, 0)
}

/// MSE excluding a `margin`-pixel border on every side.
pub fn mse_with_margin(
    reference: &DepthImage,
    test: &DepthImage,
    margin: usize,
) -> Result<f64, MetricsError> {
    check_dims(
        (reference.width(), reference.height()),
        (test.width(), test.height()),
    )?;
    region(reference.width(), reference.height(), margin)?;
    let (w, h) = (reference.width(), reference.height());
    let mut acc: u128 = 0;
    let mut count: u128 = 0;
    for row in margin..h - margin {
        for col in margin..w - margin {
            let d = i64::from(reference.get(row, col)) - i64::from(test.get(row, col));
            acc += (d * d) as u128;
            count += 1;
        }
    }
    Ok(acc as f64 / count as f64)
}

/// Real-pipeline MSE over all pixels.
pub fn mse_real(reference: &RealImage, test: &RealImage) -> Result<f64, MetricsError> {
    mse_real_with_margin(reference, test, 0)
}

/// Real-pipeline MSE excluding a `margin`-pixel border.
pub fn mse_real_with_margin(
    reference: &RealImage,
    test: &RealImage,
    margin: usize,
) -> Result<f64, MetricsError> {
    check_dims(
        (reference.width(), reference.height()),
        (test.width(), test.height()),
    )?;
    region(reference.width(), reference.height(), margin)?;
    let (w, h) = (reference.width(), reference.height());
    let mut acc = 0.0;
    let mut count = 0usize;
    for row in margin..h - margin {
        for col in margin..w - margin {
            let d = reference.get(row, col) - test.get(row, col);
            acc += d * d;
            count += 1;
        }
    }
    Ok(acc / count as f64)
}

/// PSNR from a precomputed MSE and peak value.
pub fn psnr_from_mse(mse: f64, max_value: u16) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        let peak = f64::from(max_value);
        10.0 * (peak * peak / mse).log10()
    }
}

/// PSNR between two images of identical dimensions and `max_value`; the
/// reference's `max_value` is the `I_MAX` of the formula.
pub fn psnr(reference: &DepthImage, test: &DepthImage) -> Result<QualityResult, MetricsError> {
    psnr_with_margin(reference, test, 0)
}

/// PSNR excluding a `margin`-pixel border.
pub fn psnr_with_margin(
    reference: &DepthImage,
    test: &DepthImage,
    margin: usize,
) -> Result<QualityResult, MetricsError> {
    if reference.max_value() != test.max_value() {
        return Err(MetricsError::MaxValueMismatch {
            a: reference.max_value(),
            b: test.max_value(),
        });
    }
    let mse = mse_with_margin(reference, test, margin)?;
    Ok(QualityResult {
        mse,
        psnr_db: psnr_from_mse(mse, reference.max_value()),
        max_value: reference.max_value(),
    })
}
